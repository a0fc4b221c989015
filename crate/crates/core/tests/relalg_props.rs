use num_bigint::BigUint;
use proptest::prelude::*;
use relctl::relalg::{Carrier, DenseRelation, RelAlgebra, Relation};

const CASES: u32 = 500;

fn base(name: &str, n: usize) -> Carrier {
    Carrier::base(name, n)
}

fn size(c: &Carrier) -> usize {
    c.small_size().unwrap()
}

fn carrier(tag: &'static str) -> BoxedStrategy<Carrier> {
    prop_oneof![
        4 => (0usize..=6).prop_map(move |n| base(tag, n)),
        1 => Just(Carrier::Unit),
        2 => (1usize..=3, 1usize..=3)
            .prop_map(move |(a, b)| Carrier::product(base(&format!("{tag}l"), a), base(&format!("{tag}r"), b))),
        2 => (0usize..=3).prop_map(move |n| Carrier::powerset(base(&format!("{tag}p"), n))),
    ]
    .boxed()
}

fn dense(src: Carrier, tgt: Carrier) -> BoxedStrategy<DenseRelation> {
    let cols = size(&tgt);
    prop::collection::vec(any::<bool>(), size(&src) * cols)
        .prop_map(move |bits| DenseRelation::from_fn(src.clone(), tgt.clone(), |i, j| bits[i * cols + j]))
        .boxed()
}

/// Engine result must agree with the dense oracle and stay inside its carriers.
fn same(alg: &RelAlgebra, r: &Relation, d: &DenseRelation) -> Result<(), TestCaseError> {
    prop_assert_eq!(r.source(), d.source());
    prop_assert_eq!(r.target(), d.target());
    let got = alg.to_dense(r).unwrap();
    prop_assert_eq!(&got, d);
    prop_assert_eq!(alg.entry_count(r).unwrap(), BigUint::from(d.count()));
    Ok(())
}

fn engine() -> RelAlgebra {
    RelAlgebra::new(12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn boolean_and_order_operations_match_dense(
        (r, s) in (carrier("X"), carrier("Y")).prop_flat_map(|(x, y)| (dense(x.clone(), y.clone()), dense(x, y)))
    ) {
        let mut alg = engine();
        let (er, es) = (alg.from_dense(&r).unwrap(), alg.from_dense(&s).unwrap());
        same(&alg, &er, &r)?;

        let c = alg.complement(&er).unwrap();
        same(&alg, &c, &r.complement())?;
        let t = alg.transpose(&er).unwrap();
        same(&alg, &t, &r.transpose())?;
        let u = alg.union(&er, &es).unwrap();
        same(&alg, &u, &r.union(&s))?;
        let i = alg.inter(&er, &es).unwrap();
        same(&alg, &i, &r.inter(&s))?;

        let incl = r.entries().all(|(a, b)| s.get(a, b));
        prop_assert_eq!(alg.is_incl(&er, &es).unwrap(), incl);
        prop_assert_eq!(alg.is_eq(&er, &es).unwrap(), r == s);
        prop_assert_eq!(er == es, r == s);

        let tt = alg.transpose(&t).unwrap();
        prop_assert_eq!(&tt, &er);
        let cc = alg.complement(&c).unwrap();
        prop_assert_eq!(&cc, &er);

        // De Morgan and transpose distributes over the lattice operations
        let nu = alg.complement(&u).unwrap();
        let (nr, ns) = (alg.complement(&er).unwrap(), alg.complement(&es).unwrap());
        prop_assert_eq!(nu, alg.inter(&nr, &ns).unwrap());
        let ut = alg.transpose(&u).unwrap();
        let st = alg.transpose(&es).unwrap();
        prop_assert_eq!(ut, alg.union(&t, &st).unwrap());

        let l = alg.universal(r.source(), r.target()).unwrap();
        same(&alg, &l, &DenseRelation::universal(r.source().clone(), r.target().clone()))?;
        let o = alg.empty(r.source(), r.target()).unwrap();
        same(&alg, &o, &DenseRelation::empty(r.source().clone(), r.target().clone()))?;
        prop_assert_eq!(alg.union(&er, &c).unwrap(), l);
        prop_assert_eq!(alg.inter(&er, &c).unwrap(), o);

        for (a, b) in (0..r.rows()).flat_map(|a| (0..r.cols()).map(move |b| (a, b))) {
            prop_assert_eq!(alg.contains(&er, a, b).unwrap(), r.get(a, b));
        }
        let listed = alg.entries(&er, usize::MAX).unwrap();
        prop_assert_eq!(listed.len(), r.count());
        prop_assert!(listed.iter().all(|&(a, b)| r.get(a, b)));
    }

    #[test]
    fn vec_and_rel_match_dense_and_round_trip(
        r in (carrier("X"), carrier("Y")).prop_flat_map(|(x, y)| dense(x, y))
    ) {
        let mut alg = engine();
        let er = alg.from_dense(&r).unwrap();
        let v = alg.vec(&er).unwrap();
        let dv = r.vec();
        same(&alg, &v, &dv)?;
        prop_assert_eq!(alg.entry_count(&v).unwrap(), alg.entry_count(&er).unwrap());
        let back = alg.rel_of(&v).unwrap();
        same(&alg, &back, &dv.rel_of())?;
        prop_assert_eq!(back, er.clone());
        prop_assert_eq!(alg.to_dense(&er).unwrap(), r);
    }

    #[test]
    fn compose_matches_dense(
        (r, s) in (carrier("X"), carrier("Y"), carrier("Z"))
            .prop_flat_map(|(x, y, z)| (dense(x, y.clone()), dense(y, z)))
    ) {
        let mut alg = engine();
        let (er, es) = (alg.from_dense(&r).unwrap(), alg.from_dense(&s).unwrap());
        let c = alg.compose(&er, &es).unwrap();
        same(&alg, &c, &r.compose(&s))?;

        let ix = alg.identity(r.source()).unwrap();
        prop_assert_eq!(alg.compose(&ix, &er).unwrap(), er.clone());
        let iy = alg.identity(r.target()).unwrap();
        prop_assert_eq!(alg.compose(&er, &iy).unwrap(), er.clone());

        // (R.S)^ = S^.R^
        let ct = alg.transpose(&c).unwrap();
        let (rt, st) = (alg.transpose(&er).unwrap(), alg.transpose(&es).unwrap());
        prop_assert_eq!(ct, alg.compose(&st, &rt).unwrap());
    }

    #[test]
    fn composition_is_associative(
        (q, r, s) in (carrier("W"), carrier("X"), carrier("Y"), carrier("Z"))
            .prop_flat_map(|(w, x, y, z)| (dense(w, x.clone()), dense(x, y.clone()), dense(y, z)))
    ) {
        let mut alg = engine();
        let (eq, er, es) = (alg.from_dense(&q).unwrap(), alg.from_dense(&r).unwrap(), alg.from_dense(&s).unwrap());
        let qr = alg.compose(&eq, &er).unwrap();
        let rs = alg.compose(&er, &es).unwrap();
        let left = alg.compose(&qr, &es).unwrap();
        let right = alg.compose(&eq, &rs).unwrap();
        prop_assert_eq!(&left, &right);
        same(&alg, &left, &q.compose(&r).compose(&s))?;
    }

    #[test]
    fn syq_and_pairing_match_dense(
        (r, s) in (carrier("X"), carrier("Y"), carrier("Z"))
            .prop_flat_map(|(x, y, z)| (dense(x.clone(), y), dense(x, z)))
    ) {
        let mut alg = engine();
        let (er, es) = (alg.from_dense(&r).unwrap(), alg.from_dense(&s).unwrap());
        let q = alg.syq(&er, &es).unwrap();
        same(&alg, &q, &r.syq(&s))?;
        let p = alg.pairing(&er, &es).unwrap();
        same(&alg, &p, &r.pairing(&s))?;

        // syq(R,S)^ = syq(S,R)
        let qt = alg.transpose(&q).unwrap();
        prop_assert_eq!(qt, alg.syq(&es, &er).unwrap());

        // pair(R,S).pi = R when every row of S is nonempty
        if (0..s.rows()).all(|i| (0..s.cols()).any(|j| s.get(i, j))) {
            let pi = alg.pi(p.target()).unwrap();
            prop_assert_eq!(alg.compose(&p, &pi).unwrap(), er.clone());
        }
    }

    #[test]
    fn product_constants_match_dense((x, y) in (carrier("X"), carrier("Y"))) {
        let mut alg = engine();
        let xy = Carrier::product(x.clone(), y.clone());
        let pi = alg.pi(&xy).unwrap();
        same(&alg, &pi, &DenseRelation::pi(xy.clone()))?;
        let rho = alg.rho(&xy).unwrap();
        same(&alg, &rho, &DenseRelation::rho(xy.clone()))?;
        let id = alg.identity(&xy).unwrap();
        same(&alg, &id, &DenseRelation::identity(xy.clone()))?;
        prop_assert_eq!(alg.pairing(&pi, &rho).unwrap(), id);

        let xx = Carrier::product(x.clone(), x.clone());
        let ex = alg.exchange(&xx).unwrap();
        same(&alg, &ex, &DenseRelation::exchange(xx.clone()))?;
        let ex2 = alg.compose(&ex, &ex).unwrap();
        prop_assert_eq!(ex2, alg.identity(&xx).unwrap());
    }

    #[test]
    fn points_vectors_and_injections_match_dense(
        v in carrier("X").prop_flat_map(|x| dense(x, Carrier::Unit))
    ) {
        let mut alg = engine();
        let x = v.source().clone();
        let ev = alg.from_dense(&v).unwrap();
        let members: Vec<usize> = (0..v.rows()).filter(|&i| v.get(i, 0)).collect();
        prop_assert_eq!(alg.vector_members(&ev).unwrap(), members.clone());
        let built = alg.vector(&x, members.iter().copied()).unwrap();
        prop_assert_eq!(&built, &ev);

        let mut union = alg.empty(&x, &Carrier::Unit).unwrap();
        for i in 0..v.rows() {
            let p = alg.point(&x, i).unwrap();
            same(&alg, &p, &DenseRelation::point(x.clone(), i))?;
            prop_assert!(alg.is_point(&p).unwrap());
            union = alg.union(&union, &p).unwrap();
        }
        prop_assert_eq!(union, alg.universal(&x, &Carrier::Unit).unwrap());

        let (inj, idx) = alg.inj(&ev, "S").unwrap();
        let (dinj, didx) = v.inj("S");
        prop_assert_eq!(&idx, &didx);
        same(&alg, &inj, &dinj)?;
        let injt = alg.transpose(&inj).unwrap();
        let back = alg.compose(&inj, &injt).unwrap();
        prop_assert_eq!(back, alg.identity(inj.source()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn membership_and_size_relations_match_dense(m in 0usize..=4, tag in prop::sample::select(vec!["X", "Y"])) {
        let mut alg = engine();
        let x = base(tag, m);
        let e = alg.eps(&x).unwrap();
        same(&alg, &e, &DenseRelation::eps(x.clone()))?;
        let om = alg.omega(&x).unwrap();
        same(&alg, &om, &DenseRelation::omega(x.clone()))?;
    }

    #[test]
    fn column_enumeration_lists_the_described_sets(
        v in (0usize..=3).prop_flat_map(|m| dense(Carrier::powerset(base("X", m)), Carrier::Unit))
    ) {
        let mut alg = engine();
        let x = v.source().as_powerset().unwrap().clone();
        let ev = alg.from_dense(&v).unwrap();
        let (cols, sets) = alg.column_enum(&ev, "K").unwrap();
        let want: Vec<usize> = (0..v.rows()).filter(|&i| v.get(i, 0)).collect();
        prop_assert_eq!(&sets, &want);
        let d = DenseRelation::from_fn(x.clone(), base("K", sets.len()), |i, k| (sets[k] >> i) & 1 == 1);
        same(&alg, &cols, &d)?;
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn eps_is_membership_on_small_carriers() {
    let mut alg = engine();
    let inners = [
        base("X", 0),
        base("X", 1),
        base("X", 2),
        base("X", 3),
        base("X", 4),
        Carrier::product(base("L", 2), base("R", 2)),
        Carrier::Unit,
    ];
    for x in inners {
        let m = size(&x);
        let e = alg.eps(&x).unwrap();
        for i in 0..m {
            for set in 0..1usize << m {
                assert_eq!(alg.contains(&e, i, set).unwrap(), (set >> i) & 1 == 1, "{x} {i} {set}");
            }
        }
        let want = if m == 0 { 0 } else { m << (m - 1) };
        assert_eq!(alg.entry_count(&e).unwrap(), BigUint::from(want));
    }
}

#[test]
fn omega_compares_sizes_on_small_carriers() {
    let mut alg = engine();
    for m in 0..=4 {
        let x = base("X", m);
        let om = alg.omega(&x).unwrap();
        for y in 0..1usize << m {
            for z in 0..1usize << m {
                assert_eq!(alg.contains(&om, y, z).unwrap(), y.count_ones() <= z.count_ones());
            }
        }
        let want: usize = (0..=m)
            .map(|s| binomial(m, s) * (s..=m).map(|t| binomial(m, t)).sum::<usize>())
            .sum();
        assert_eq!(alg.entry_count(&om).unwrap(), BigUint::from(want));
        if m == 3 {
            assert_eq!(want, 42);
        }

        // reflexive and total
        let id = alg.identity(om.source()).unwrap();
        assert!(alg.is_incl(&id, &om).unwrap());
        let omt = alg.transpose(&om).unwrap();
        let both = alg.union(&om, &omt).unwrap();
        let l = alg.universal(om.source(), om.target()).unwrap();
        assert_eq!(both, l);
    }
}

fn syq_law_holds(alg: &mut RelAlgebra, x: &Carrier, y: &Carrier, z: &Carrier, rb: usize, sb: usize) {
    let (nx, ny, nz) = (size(x), size(y), size(z));
    let r = DenseRelation::from_fn(x.clone(), y.clone(), |i, j| (rb >> (i * ny + j)) & 1 == 1);
    let s = DenseRelation::from_fn(x.clone(), z.clone(), |i, k| (sb >> (i * nz + k)) & 1 == 1);
    let (er, es) = (alg.from_dense(&r).unwrap(), alg.from_dense(&s).unwrap());
    let q = alg.syq(&er, &es).unwrap();
    let got = alg.to_dense(&q).unwrap();
    for j in 0..ny {
        for k in 0..nz {
            let law = (0..nx).all(|i| r.get(i, j) == s.get(i, k));
            assert_eq!(got.get(j, k), law, "syq law fails for {rb:b} {sb:b} at ({j},{k})");
        }
    }
}

#[test]
fn syq_is_column_equality_on_all_small_relations() {
    let mut alg = engine();
    for nx in 1..=3 {
        for ny in 1..=3 {
            for nz in 1..=3 {
                let (x, y, z) = (base("X", nx), base("Y", ny), base("Z", nz));
                for rb in 0..1usize << (nx * ny) {
                    for sb in 0..1usize << (nx * nz) {
                        syq_law_holds(&mut alg, &x, &y, &z, rb, sb);
                    }
                }
            }
        }
    }
    // size-4 source: every relation against a fixed family of partners
    let (x, y, z) = (base("X", 4), base("Y", 2), base("Z", 2));
    for rb in 0..1usize << 8 {
        for sb in 0..1usize << 8 {
            syq_law_holds(&mut alg, &x, &y, &z, rb, sb);
        }
    }
}

#[test]
fn syq_of_membership_with_itself_is_identity() {
    let mut alg = engine();
    for m in 0..=4 {
        let x = base("X", m);
        let e = alg.eps(&x).unwrap();
        let q = alg.syq(&e, &e).unwrap();
        let id = alg.identity(e.target()).unwrap();
        assert_eq!(q, id);
    }
}

#[test]
fn dense_round_trip_on_larger_random_relations() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut alg = engine();
    for _ in 0..300 {
        let (a, b) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let density = rng.gen_range(0.0..1.0);
        let d = DenseRelation::from_fn(base("X", a), base("Y", b), |_, _| rng.gen_bool(density));
        let r = alg.from_dense(&d).unwrap();
        assert_eq!(alg.to_dense(&r).unwrap(), d);
        assert_eq!(alg.entry_count(&r).unwrap(), BigUint::from(d.count()));
    }
}
