//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relctl::bdd::{Manager, VarBlock};
use relctl::control::{Backend, ControlResult, ControlSolver, Rule};
use relctl::dsl::{self, scripts, DslEnv};
use relctl::election::{
    covering_from_dominance, dominance, dominance_from_margins, sub_election, uncovered_from_covering,
    DominanceView, Election,
};
use relctl::oracle::{oracle_solve, OracleConfig};
use relctl::reduction::{
    audit_margins, build_control_instance, find_exact_cover, planted_instance, scan_uncovering_deletions,
};
use relctl::relalg::{Carrier, DenseRelation, RelAlgebra, Relation};

use common::{running, small_elections};

/// Collects failed sub-checks so one run reports all of them.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.failures.push(format!("{what}: got {got:?}, expected {want:?}"));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check(t < limit, format!("took {t:.2?}, limit {limit:?}"));
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let e = running();
    let mut alg = RelAlgebra::new(e.engine_width());
    let view = DominanceView::compute(&mut alg, &e).unwrap();
    let json = view.to_json(&mut alg, &e).unwrap();
    r.eq("winner", json["winner"].as_str(), Some("a"));
    let row: Vec<bool> = view.matrix(&alg).unwrap()[0].clone();
    r.eq("row a", row, vec![false, true, true, true, true, true, true, true]);
    r.within(start, Duration::from_secs(1));
}

fn counts(res: &ControlResult) -> (Option<usize>, BigUint) {
    (res.min_deletions, res.num_optimal.clone())
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let e = running();
    let mut s = ControlSolver::new(&e).unwrap();
    let mut solve = |t: &str| s.solve(t, Rule::CondorcetWinner, usize::MAX).unwrap();

    let b = solve("b");
    r.eq("target b", counts(&b), (Some(8), 45u32.into()));
    let worked_set = vec![1, 2, 3, 4, 5, 6, 10, 11];
    r.check(
        b.solutions.iter().any(|x| one_based(&x.delete) == worked_set),
        "no solution for b deletes exactly {1,2,3,4,5,6,10,11}",
    );
    let h = solve("h");
    r.eq("target h", counts(&h), (Some(6), 85u32.into()));
    for t in ["c", "d", "e", "f", "g"] {
        let res = solve(t);
        r.check(!res.feasible, format!("target {t} should be infeasible"));
    }
    let a = solve("a");
    r.eq("target a", counts(&a), (Some(0), 1u32.into()));
    r.within(start, Duration::from_secs(60));
}

fn criterion_3(r: &mut Report) {
    let start = Instant::now();
    let e = running();
    let mut s = ControlSolver::new(&e).unwrap();
    let mut solve = |t: &str| s.solve(t, Rule::UncoveredSet, usize::MAX).unwrap();

    for (t, k, count) in [("e", 5, 11u32), ("f", 5, 111), ("g", 5, 15), ("h", 5, 126), ("b", 7, 120)] {
        let res = solve(t);
        r.eq(&format!("target {t}"), counts(&res), (Some(k), count.into()));
        if t == "e" {
            let gone = vec![1, 2, 4, 5, 6];
            r.check(
                res.solutions.iter().any(|x| one_based(&x.delete) == gone),
                "keep-set without {1,2,4,5,6} missing from e's solutions",
            );
            let keep: Vec<usize> = (0..13).filter(|i| !gone.contains(&(i + 1))).collect();
            let sub = sub_election(&e, &keep).unwrap();
            let free = uncovered_from_covering(&covering_from_dominance(&dominance_from_margins(&sub.margins())));
            let names: Vec<&str> = free.iter().map(|&i| e.alternatives()[i].as_str()).collect();
            r.eq("uncovered set after deleting {1,2,4,5,6}", names, vec!["a", "e", "f", "h"]);
        }
    }
    for t in ["c", "d"] {
        let res = solve(t);
        r.eq(&format!("target {t}"), counts(&res), (Some(13), 1u32.into()));
        r.check(
            res.solutions.len() == 1 && res.solutions[0].keep.is_empty(),
            format!("target {t}: the only solution should keep nobody"),
        );
    }
    r.within(start, Duration::from_secs(120));
}

fn agree(r: &mut Report, e: &Election, label: &str, cfg: &OracleConfig) {
    let mut s = ControlSolver::new(e).unwrap();
    for rule in [Rule::CondorcetWinner, Rule::UncoveredSet] {
        for t in e.alternatives().to_vec() {
            let sym = s.solve(&t, rule, usize::MAX).unwrap();
            let mut ora = oracle_solve(e, &t, rule, usize::MAX, cfg).unwrap();
            ora.backend = Backend::Symbolic;
            r.check(sym == ora, format!("{label}: target {t}, rule {rule} differs"));
        }
    }
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    agree(r, &running(), "running example", &cfg);
    let family = small_elections(11, 100, 7, 5);
    for (i, e) in family.iter().enumerate() {
        agree(r, e, &format!("random election {i}"), &cfg);
    }
    r.note(format!("{} elections, both rules, every target", family.len() + 1));
    r.within(start, Duration::from_secs(600));
}

fn random_carrier(rng: &mut impl Rng, tag: &str) -> Carrier {
    match rng.gen_range(0..9) {
        0 => Carrier::Unit,
        1 | 2 => Carrier::product(
            Carrier::base(format!("{tag}l"), rng.gen_range(1..=3)),
            Carrier::base(format!("{tag}r"), rng.gen_range(1..=3)),
        ),
        3 | 4 => Carrier::powerset(Carrier::base(format!("{tag}p"), rng.gen_range(0..=3))),
        _ => Carrier::base(tag, rng.gen_range(0..=6)),
    }
}

fn random_dense(rng: &mut impl Rng, src: &Carrier, tgt: &Carrier) -> DenseRelation {
    let p = rng.gen_range(0.0..1.0);
    DenseRelation::from_fn(src.clone(), tgt.clone(), |_, _| rng.gen_bool(p))
}

const CASES: usize = 500;

struct Tally {
    ops: Vec<(&'static str, usize)>,
    case: usize,
}

impl Tally {
    fn bump(&mut self, name: &'static str) {
        match self.ops.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => self.ops.push((name, 1)),
        }
    }

    fn cmp(&mut self, r: &mut Report, alg: &RelAlgebra, name: &'static str, got: Relation, want: DenseRelation) {
        self.bump(name);
        let d = alg.to_dense(&got).unwrap();
        let inside = alg.entry_count(&got).unwrap() == BigUint::from(want.count());
        r.check(d == want && inside, format!("{name} differs from the dense backend in case {}", self.case));
    }
}

fn criterion_5(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tl = Tally { ops: Vec::new(), case: 0 };
    for case in 0..CASES {
        tl.case = case;
        let mut alg = RelAlgebra::new(12);
        let (x, y, z) = (random_carrier(&mut rng, "X"), random_carrier(&mut rng, "Y"), random_carrier(&mut rng, "Z"));
        let dr = random_dense(&mut rng, &x, &y);
        let ds = random_dense(&mut rng, &x, &y);
        let dt = random_dense(&mut rng, &y, &z);
        let du = random_dense(&mut rng, &x, &z);
        let (er, es, et, eu) = (
            alg.from_dense(&dr).unwrap(),
            alg.from_dense(&ds).unwrap(),
            alg.from_dense(&dt).unwrap(),
            alg.from_dense(&du).unwrap(),
        );
        let got = alg.complement(&er).unwrap();
        tl.cmp(r, &alg, "complement", got, dr.complement());
        let got = alg.transpose(&er).unwrap();
        tl.cmp(r, &alg, "transpose", got, dr.transpose());
        let got = alg.union(&er, &es).unwrap();
        tl.cmp(r, &alg, "union", got, dr.union(&ds));
        let got = alg.inter(&er, &es).unwrap();
        tl.cmp(r, &alg, "intersection", got, dr.inter(&ds));
        let got = alg.compose(&er, &et).unwrap();
        tl.cmp(r, &alg, "composition", got, dr.compose(&dt));
        let got = alg.syq(&er, &eu).unwrap();
        tl.cmp(r, &alg, "syq", got, dr.syq(&du));
        let got = alg.pairing(&er, &eu).unwrap();
        tl.cmp(r, &alg, "pairing", got, dr.pairing(&du));
        let v = alg.vec(&er).unwrap();
        tl.cmp(r, &alg, "vec", v.clone(), dr.vec());
        let got = alg.rel_of(&v).unwrap();
        tl.cmp(r, &alg, "rel", got, dr.vec().rel_of());
        let xy = Carrier::product(x.clone(), y.clone());
        let got = alg.pi(&xy).unwrap();
        tl.cmp(r, &alg, "pi", got, DenseRelation::pi(xy.clone()));
        let got = alg.rho(&xy).unwrap();
        tl.cmp(r, &alg, "rho", got, DenseRelation::rho(xy.clone()));
        let got = alg.identity(&x).unwrap();
        tl.cmp(r, &alg, "identity", got, DenseRelation::identity(x.clone()));
        let xx = Carrier::product(x.clone(), x.clone());
        let got = alg.exchange(&xx).unwrap();
        tl.cmp(r, &alg, "exchange", got, DenseRelation::exchange(xx));
        let got = alg.universal(&x, &y).unwrap();
        tl.cmp(r, &alg, "universal", got, DenseRelation::universal(x.clone(), y.clone()));
        let got = alg.empty(&x, &y).unwrap();
        tl.cmp(r, &alg, "empty", got, DenseRelation::empty(x.clone(), y.clone()));
        let m = Carrier::base("M", case % 5);
        let got = alg.eps(&m).unwrap();
        tl.cmp(r, &alg, "eps", got, DenseRelation::eps(m.clone()));
        let got = alg.omega(&m).unwrap();
        tl.cmp(r, &alg, "omega", got, DenseRelation::omega(m));
        let nx = x.small_size().unwrap();
        if nx > 0 {
            let i = rng.gen_range(0..nx);
            let got = alg.point(&x, i).unwrap();
            tl.cmp(r, &alg, "point", got, DenseRelation::point(x.clone(), i));
        } else {
            tl.bump("point");
        }
        let dv = random_dense(&mut rng, &x, &Carrier::Unit);
        let ev = alg.from_dense(&dv).unwrap();
        let (inj, _) = alg.inj(&ev, "S").unwrap();
        tl.cmp(r, &alg, "inj", inj, dv.inj("S").0);

        tl.bump("inclusion");
        let incl = dr.entries().all(|(a, b)| ds.get(a, b));
        r.check(alg.is_incl(&er, &es).unwrap() == incl, format!("inclusion differs in case {case}"));
        tl.bump("equality");
        r.check(alg.is_eq(&er, &es).unwrap() == (dr == ds), format!("equality differs in case {case}"));

        let back = alg.rel_of(&v).unwrap();
        r.check(back == er, format!("rel(vec(R)) != R in case {case}"));
        let tt = alg.transpose(&er).unwrap();
        r.check(alg.transpose(&tt).unwrap() == er, format!("double transpose differs in case {case}"));
        r.check(alg.to_dense(&er).unwrap() == dr, format!("dense round trip differs in case {case}"));
    }
    let min = tl.ops.iter().map(|(_, c)| *c).min().unwrap_or(0);
    r.check(min >= CASES, format!("an operation ran fewer than {CASES} cases"));
    r.note(format!("{} operations x {min} random cases", tl.ops.len()));

    // point-wise laws on every element of carriers of size <= 4
    let mut alg = RelAlgebra::new(12);
    for m in 0..=4usize {
        let x = Carrier::base("X", m);
        let e = alg.eps(&x).unwrap();
        let om = alg.omega(&x).unwrap();
        for set in 0..1usize << m {
            for i in 0..m {
                r.check(alg.contains(&e, i, set).unwrap() == ((set >> i) & 1 == 1), format!("eps law fails for m={m}"));
            }
            for other in 0..1usize << m {
                let law = set.count_ones() <= other.count_ones();
                r.check(alg.contains(&om, set, other).unwrap() == law, format!("omega law fails for m={m}"));
            }
        }
    }
    let mut syq_cases = 0u64;
    for nx in 1..=4usize {
        for ny in 1..=2usize {
            for nz in 1..=2usize {
                let (x, y, z) = (Carrier::base("X", nx), Carrier::base("Y", ny), Carrier::base("Z", nz));
                for rb in 0..1usize << (nx * ny) {
                    for sb in 0..1usize << (nx * nz) {
                        let dr = DenseRelation::from_fn(x.clone(), y.clone(), |i, j| (rb >> (i * ny + j)) & 1 == 1);
                        let ds = DenseRelation::from_fn(x.clone(), z.clone(), |i, k| (sb >> (i * nz + k)) & 1 == 1);
                        let (er, es) = (alg.from_dense(&dr).unwrap(), alg.from_dense(&ds).unwrap());
                        let q = alg.syq(&er, &es).unwrap();
                        for j in 0..ny {
                            for k in 0..nz {
                                let law = (0..nx).all(|i| dr.get(i, j) == ds.get(i, k));
                                if alg.contains(&q, j, k).unwrap() != law {
                                    r.check(false, format!("syq law fails for {nx}x{ny}, {nx}x{nz}"));
                                }
                            }
                        }
                        syq_cases += 1;
                    }
                }
            }
        }
    }
    r.note(format!("{syq_cases} syq relation pairs checked point-wise"));

    // sat_count(f) + sat_count(-f) = 2^k
    for k in 1..=8u32 {
        let mut mgr = Manager::new(k);
        for _ in 0..40 {
            let mut f = mgr.constant(false);
            for _ in 0..rng.gen_range(1..6) {
                let mut lits: Vec<(u32, bool)> = Vec::new();
                for v in 0..k {
                    if rng.gen_bool(0.6) {
                        lits.push((v, rng.gen()));
                    }
                }
                let c = mgr.cube(&lits).unwrap();
                f = if rng.gen() { mgr.or(f, c).unwrap() } else { mgr.xor(f, c).unwrap() };
            }
            let nf = mgr.not(f).unwrap();
            let all = [VarBlock::new(0, k)];
            let total = mgr.sat_count(f, &all).unwrap() + mgr.sat_count(nf, &all).unwrap();
            r.eq("sat_count(f) + sat_count(-f)", total, BigUint::from(1u32) << k as usize);
        }
    }
}

fn scripts_match(r: &mut Report, e: &Election, label: &str) {
    let mut solver = ControlSolver::new(e).unwrap();
    let p = solver.p().clone();
    let rr = solver.dominance().unwrap();
    let u = solver.covering().unwrap();
    for t in 0..e.num_alternatives() {
        let cw = solver.artifacts(t, Rule::CondorcetWinner).unwrap();
        let uc = solver.artifacts(t, Rule::UncoveredSet).unwrap();
        let alg = solver.algebra();
        let env = DslEnv::for_election(alg, e, Some(t)).unwrap();
        let mut same = |name: &str, text: &str, want: &Relation, alg: &mut RelAlgebra| {
            let got = dsl::run(text, alg, &env).unwrap();
            r.check(&got == want, format!("{label}: {name} differs for target {t}"));
        };
        let c = dominance(alg, &p).unwrap();
        same("cv1.ra", scripts::CV1, &c, alg);
        same("cv2.ra", scripts::CV2, &rr, alg);
        same("cv3.ra", scripts::CV3, &cw.sol, alg);
        same("cv4.ra", scripts::CV4, &u, alg);
        same("cv5.ra", scripts::CV5, &uc.sol, alg);
    }
}

fn criterion_6(r: &mut Report) {
    scripts_match(r, &running(), "running example");
    let family = small_elections(3, 50, 6, 4);
    for (i, e) in family.iter().enumerate() {
        scripts_match(r, e, &format!("random election {i}"));
    }
    r.note(format!("running example and {} random elections", family.len()));
}

fn criterion_7(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [16usize, 20, 24] {
        let (inst, _) = planted_instance(n, &mut rng);
        let (e, layout) = build_control_instance(&inst).unwrap();
        let a = audit_margins(&e, &layout);
        let (ni, t) = (n as i64, layout.t as i64);
        r.eq(
            &format!("n={n} predicted margins"),
            (a.b_over_astar, a.astar_over_s, a.b_over_other_s, a.b_over_own_s),
            (2 * (ni - 1) * t + 3 * ni / 4 - 7, 3 * ni / 4 + 1, 3 * ni / 4 - 7, ni / 4 - 3),
        );
        r.eq(&format!("n={n} deviations"), a.deviations.len(), 0);
    }

    let (inst, _) = planted_instance(16, &mut rng);
    let (e, layout) = build_control_instance(&inst).unwrap();
    let target = e.alternative_index(&layout.target).unwrap();
    match find_exact_cover(&inst) {
        None => r.check(false, "generated n=16 instance has no exact cover"),
        Some(cover) => {
            let del = layout.group3_voters(&cover);
            r.eq("group-3 voters of the cover", del.len(), 4);
            let keep: Vec<usize> = (0..e.num_voters()).filter(|i| !del.contains(i)).collect();
            let sub = sub_election(&e, &keep).unwrap();
            let free = uncovered_from_covering(&covering_from_dominance(&dominance_from_margins(&sub.margins())));
            r.check(free.contains(&target), "deleting the cover's group-3 voters leaves a* covered");
        }
    }
    let scan = scan_uncovering_deletions(&e, target, 3);
    r.eq("deletion sets of size <= 3 that uncover a*", scan.successes.len(), 0);
    r.note(format!("{} deletion sets scanned", scan.checked));
    r.within(start, Duration::from_secs(300));
}

fn main() {
    let criteria: [(&str, fn(&mut Report)); 7] = [
        ("running-example winner", criterion_1),
        ("Condorcet-winner control", criterion_2),
        ("uncovered-set control", criterion_3),
        ("oracle equivalence", criterion_4),
        ("engine property suite", criterion_5),
        ("DSL fidelity", criterion_6),
        ("reduction audit", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut report = Report::default();
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| run(&mut report)));
        if let Err(p) = outcome {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            report.failures.push(format!("panicked: {msg}"));
        }
        let status = if report.failures.is_empty() { "PASS" } else { "FAIL" };
        let notes = if report.notes.is_empty() { String::new() } else { format!(" ({})", report.notes.join("; ")) };
        println!("criterion {} {name}: {status} in {:.2?}{notes}", i + 1, start.elapsed());
        for f in &report.failures {
            println!("    {f}");
        }
        if !report.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
