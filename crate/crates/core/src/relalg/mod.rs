//! Typed heterogeneous relation algebra on top of the BDD kernel.
//!
//! Every [`Relation`] is the characteristic function of a set of pairs,
//! stored over two variable blocks of one shared [`Manager`]: the source
//! block starts at variable 0, the target block at `2 * width`. The block in
//! between is reserved for the middle carrier of a composition. All blocks
//! have the same capacity `width`, fixed when the [`RelAlgebra`] is created.

mod carrier;
pub mod dense;

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bdd::{BddError, BoolFn, Manager, Var, VarBlock};

pub use carrier::Carrier;
pub use dense::DenseRelation;

/// Maximum number of matrix cells of a [`DenseRelation`].
pub const DENSE_LIMIT: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelError {
    #[error("{op}: type mismatch between {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("{op}: {carrier} is not a {expected}")]
    WrongShape {
        op: &'static str,
        carrier: String,
        expected: &'static str,
    },
    #[error("{op}: expected a point, found a vector with {entries} entries")]
    NotAPoint { op: &'static str, entries: String },
    #[error("element index {index} out of range for {carrier}")]
    IndexOutOfRange { index: usize, carrier: String },
    #[error("carrier {carrier} needs {needed} bits but the engine blocks hold {available}")]
    WidthExceeded {
        carrier: String,
        needed: u32,
        available: u32,
    },
    #[error("{rows}x{cols} matrix exceeds the dense backend limit")]
    DenseTooLarge { rows: String, cols: String },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

pub type Result<T> = std::result::Result<T, RelError>;

/// An immutable typed relation `source <-> target`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relation {
    src: Carrier,
    tgt: Carrier,
    f: BoolFn,
}

impl Relation {
    pub fn source(&self) -> &Carrier {
        &self.src
    }

    pub fn target(&self) -> &Carrier {
        &self.tgt
    }

    pub fn func(&self) -> BoolFn {
        self.f
    }

    pub fn is_vector(&self) -> bool {
        self.tgt.is_unit()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_false()
    }

    /// `source <-> target` in script syntax.
    pub fn type_string(&self) -> String {
        format!("{} <-> {}", self.src, self.tgt)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Slot {
    Source,
    Middle,
    Target,
}

/// Relation-algebra engine: owns the BDD manager and all derived caches.
pub struct RelAlgebra {
    mgr: Manager,
    width: u32,
    care_cache: FxHashMap<(Carrier, Var), BoolFn>,
    strict_size_cache: FxHashMap<Carrier, Relation>,
    labels: HashMap<String, Vec<String>>,
}

impl std::fmt::Debug for RelAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RelAlgebra")
            .field("width", &self.width)
            .field("manager", &self.mgr)
            .finish()
    }
}

impl RelAlgebra {
    /// An engine whose carriers may use up to `width` encoding bits.
    pub fn new(width: u32) -> Self {
        RelAlgebra {
            mgr: Manager::new(3 * width),
            width,
            care_cache: FxHashMap::default(),
            strict_size_cache: FxHashMap::default(),
            labels: HashMap::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn manager(&self) -> &Manager {
        &self.mgr
    }

    pub fn manager_mut(&mut self) -> &mut Manager {
        &mut self.mgr
    }

    /// Register display names for the elements of a base carrier.
    pub fn set_labels(&mut self, base_name: &str, names: Vec<String>) {
        self.labels.insert(base_name.to_string(), names);
    }

    fn fits(&self, c: &Carrier) -> Result<u32> {
        let w = c.width();
        if w > self.width {
            return Err(RelError::WidthExceeded {
                carrier: c.to_string(),
                needed: w,
                available: self.width,
            });
        }
        Ok(w)
    }

    fn slot_offset(&self, slot: Slot) -> Var {
        match slot {
            Slot::Source => 0,
            Slot::Middle => self.width,
            Slot::Target => 2 * self.width,
        }
    }

    fn block(&self, c: &Carrier, slot: Slot) -> VarBlock {
        VarBlock::new(self.slot_offset(slot), c.width())
    }

    /// The variable block holding the source encoding of `r`.
    pub fn source_block(&self, r: &Relation) -> VarBlock {
        self.block(&r.src, Slot::Source)
    }

    /// The variable block holding the target encoding of `r`.
    pub fn target_block(&self, r: &Relation) -> VarBlock {
        self.block(&r.tgt, Slot::Target)
    }

    fn make(&mut self, src: Carrier, tgt: Carrier, f: BoolFn) -> Result<Relation> {
        let r = Relation { src, tgt, f };
        if cfg!(debug_assertions) {
            let care = self.care_pair(&r.src, &r.tgt)?;
            let outside = self.mgr.diff(r.f, care)?;
            debug_assert!(outside.is_false(), "relation {} has entries outside its care set", r.type_string());
        }
        Ok(r)
    }

    /// Care predicate of carrier `c` encoded at variables `offset ..`.
    fn care_at(&mut self, c: &Carrier, offset: Var) -> Result<BoolFn> {
        if let Some(&f) = self.care_cache.get(&(c.clone(), offset)) {
            return Ok(f);
        }
        let f = match c {
            Carrier::Unit | Carrier::Powerset(_) => self.mgr.constant(true),
            Carrier::Base { size, .. } => {
                let w = c.width();
                if *size == 0 {
                    self.mgr.constant(false)
                } else if (*size as u128) >= (1u128 << w) {
                    self.mgr.constant(true)
                } else {
                    // x < size, scanning from the least significant bit up
                    let mut g = self.mgr.constant(false);
                    for k in (0..w).rev() {
                        let bit = (size >> (w - 1 - k)) & 1 == 1;
                        let x = self.mgr.var(offset + k)?;
                        g = if bit {
                            let t = self.mgr.constant(true);
                            self.mgr.ite(x, g, t)?
                        } else {
                            let fls = self.mgr.constant(false);
                            self.mgr.ite(x, fls, g)?
                        };
                    }
                    g
                }
            }
            Carrier::Product(l, r) => {
                let lc = self.care_at(l, offset)?;
                let rc = self.care_at(r, offset + l.width())?;
                self.mgr.and(lc, rc)?
            }
        };
        self.care_cache.insert((c.clone(), offset), f);
        Ok(f)
    }

    fn care(&mut self, c: &Carrier, slot: Slot) -> Result<BoolFn> {
        self.fits(c)?;
        let off = self.slot_offset(slot);
        self.care_at(c, off)
    }

    fn care_pair(&mut self, src: &Carrier, tgt: &Carrier) -> Result<BoolFn> {
        let s = self.care(src, Slot::Source)?;
        let t = self.care(tgt, Slot::Target)?;
        Ok(self.mgr.and(s, t)?)
    }

    /// Bitwise equality of two equally wide variable runs.
    fn block_eq(&mut self, a: VarBlock, b: VarBlock) -> Result<BoolFn> {
        debug_assert_eq!(a.width, b.width);
        let mut acc = self.mgr.constant(true);
        for k in (0..a.width).rev() {
            let x = self.mgr.var(a.offset + k)?;
            let y = self.mgr.var(b.offset + k)?;
            let d = self.mgr.xor(x, y)?;
            let same = self.mgr.not(d)?;
            acc = self.mgr.and(same, acc)?;
        }
        Ok(acc)
    }

    fn element_cube(&mut self, c: &Carrier, slot: Slot, index: usize) -> Result<BoolFn> {
        let off = self.slot_offset(slot);
        let lits: Vec<(Var, bool)> = c
            .encode(index)
            .into_iter()
            .enumerate()
            .map(|(k, b)| (off + k as Var, b))
            .collect();
        Ok(self.mgr.cube(&lits)?)
    }

    fn check_index(c: &Carrier, index: usize) -> Result<()> {
        match c.small_size() {
            Some(s) if index < s => Ok(()),
            _ => Err(RelError::IndexOutOfRange {
                index,
                carrier: c.to_string(),
            }),
        }
    }

    fn same_type(op: &'static str, r: &Relation, s: &Relation) -> Result<()> {
        if r.src != s.src || r.tgt != s.tgt {
            return Err(RelError::TypeMismatch {
                op,
                left: r.type_string(),
                right: s.type_string(),
            });
        }
        Ok(())
    }

    // ----- constants ------------------------------------------------------

    pub fn empty(&mut self, src: &Carrier, tgt: &Carrier) -> Result<Relation> {
        self.fits(src)?;
        self.fits(tgt)?;
        let f = self.mgr.constant(false);
        self.make(src.clone(), tgt.clone(), f)
    }

    pub fn universal(&mut self, src: &Carrier, tgt: &Carrier) -> Result<Relation> {
        let f = self.care_pair(src, tgt)?;
        self.make(src.clone(), tgt.clone(), f)
    }

    pub fn identity(&mut self, c: &Carrier) -> Result<Relation> {
        let w = self.fits(c)?;
        let eq = self.block_eq(
            VarBlock::new(self.slot_offset(Slot::Source), w),
            VarBlock::new(self.slot_offset(Slot::Target), w),
        )?;
        let care = self.care_pair(c, c)?;
        let f = self.mgr.and(eq, care)?;
        self.make(c.clone(), c.clone(), f)
    }

    /// Vector over `c` describing exactly the element `index`.
    pub fn point(&mut self, c: &Carrier, index: usize) -> Result<Relation> {
        self.fits(c)?;
        Self::check_index(c, index)?;
        let f = self.element_cube(c, Slot::Source, index)?;
        self.make(c.clone(), Carrier::Unit, f)
    }

    /// Vector over `c` describing the given elements.
    pub fn vector(&mut self, c: &Carrier, indices: impl IntoIterator<Item = usize>) -> Result<Relation> {
        self.fits(c)?;
        let mut f = self.mgr.constant(false);
        for i in indices {
            Self::check_index(c, i)?;
            let cube = self.element_cube(c, Slot::Source, i)?;
            f = self.mgr.or(f, cube)?;
        }
        self.make(c.clone(), Carrier::Unit, f)
    }

    /// Relation with exactly the listed `(source index, target index)` entries.
    pub fn from_pairs(
        &mut self,
        src: &Carrier,
        tgt: &Carrier,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Relation> {
        self.fits(src)?;
        self.fits(tgt)?;
        let mut f = self.mgr.constant(false);
        for (i, j) in pairs {
            Self::check_index(src, i)?;
            Self::check_index(tgt, j)?;
            let a = self.element_cube(src, Slot::Source, i)?;
            let b = self.element_cube(tgt, Slot::Target, j)?;
            let ab = self.mgr.and(a, b)?;
            f = self.mgr.or(f, ab)?;
        }
        self.make(src.clone(), tgt.clone(), f)
    }

    // ----- basic algebra --------------------------------------------------

    pub fn complement(&mut self, r: &Relation) -> Result<Relation> {
        let care = self.care_pair(&r.src, &r.tgt)?;
        let f = self.mgr.diff(care, r.f)?;
        self.make(r.src.clone(), r.tgt.clone(), f)
    }

    pub fn transpose(&mut self, r: &Relation) -> Result<Relation> {
        let s = self.source_block(r);
        let t = self.target_block(r);
        let to_src = VarBlock::new(self.slot_offset(Slot::Source), t.width);
        let to_tgt = VarBlock::new(self.slot_offset(Slot::Target), s.width);
        let pairs: Vec<(Var, Var)> = s
            .vars()
            .zip(to_tgt.vars())
            .chain(t.vars().zip(to_src.vars()))
            .collect();
        let f = self.mgr.replace(r.f, &pairs)?;
        self.make(r.tgt.clone(), r.src.clone(), f)
    }

    pub fn union(&mut self, r: &Relation, s: &Relation) -> Result<Relation> {
        Self::same_type("union", r, s)?;
        let f = self.mgr.or(r.f, s.f)?;
        self.make(r.src.clone(), r.tgt.clone(), f)
    }

    pub fn inter(&mut self, r: &Relation, s: &Relation) -> Result<Relation> {
        Self::same_type("intersection", r, s)?;
        let f = self.mgr.and(r.f, s.f)?;
        self.make(r.src.clone(), r.tgt.clone(), f)
    }

    /// `(r . s)_{x,z}` iff some `y` has `r_{x,y}` and `s_{y,z}`.
    pub fn compose(&mut self, r: &Relation, s: &Relation) -> Result<Relation> {
        if r.tgt != s.src {
            return Err(RelError::TypeMismatch {
                op: "composition",
                left: r.type_string(),
                right: s.type_string(),
            });
        }
        let mid = self.block(&r.tgt, Slot::Middle);
        let rt = self.target_block(r);
        let ss = self.source_block(s);
        let r_mid = self.mgr.rename(r.f, rt, mid)?;
        let s_mid = self.mgr.rename(s.f, ss, mid)?;
        let f = self.mgr.and_exists(r_mid, s_mid, &[mid])?;
        self.make(r.src.clone(), s.tgt.clone(), f)
    }

    pub fn is_incl(&mut self, r: &Relation, s: &Relation) -> Result<bool> {
        Self::same_type("inclusion", r, s)?;
        Ok(self.mgr.diff(r.f, s.f)?.is_false())
    }

    pub fn is_eq(&mut self, r: &Relation, s: &Relation) -> Result<bool> {
        Self::same_type("equality", r, s)?;
        Ok(r.f == s.f)
    }

    // ----- derived constructs ---------------------------------------------

    /// Symmetric quotient: `syq(r, s)_{y,z}` iff `r_{x,y} <-> s_{x,z}` for all `x`.
    pub fn syq(&mut self, r: &Relation, s: &Relation) -> Result<Relation> {
        if r.src != s.src {
            return Err(RelError::TypeMismatch {
                op: "syq",
                left: r.type_string(),
                right: s.type_string(),
            });
        }
        let rt = self.transpose(r)?;
        let ns = self.complement(s)?;
        let left = self.compose(&rt, &ns)?;
        let nrt = self.complement(&rt)?;
        let right = self.compose(&nrt, s)?;
        let nl = self.complement(&left)?;
        let nr = self.complement(&right)?;
        self.inter(&nl, &nr)
    }

    fn split_product<'c>(op: &'static str, c: &'c Carrier) -> Result<(&'c Carrier, &'c Carrier)> {
        c.as_product().ok_or_else(|| RelError::WrongShape {
            op,
            carrier: c.to_string(),
            expected: "product carrier",
        })
    }

    /// First projection `X*Y <-> X`.
    pub fn pi(&mut self, prod: &Carrier) -> Result<Relation> {
        let (x, _) = Self::split_product("pi", prod)?;
        self.fits(prod)?;
        let w = x.width();
        let eq = self.block_eq(
            VarBlock::new(self.slot_offset(Slot::Source), w),
            VarBlock::new(self.slot_offset(Slot::Target), w),
        )?;
        let care = self.care_pair(prod, x)?;
        let f = self.mgr.and(eq, care)?;
        self.make(prod.clone(), x.clone(), f)
    }

    /// Second projection `X*Y <-> Y`.
    pub fn rho(&mut self, prod: &Carrier) -> Result<Relation> {
        let (x, y) = Self::split_product("rho", prod)?;
        self.fits(prod)?;
        let eq = self.block_eq(
            VarBlock::new(self.slot_offset(Slot::Source) + x.width(), y.width()),
            VarBlock::new(self.slot_offset(Slot::Target), y.width()),
        )?;
        let care = self.care_pair(prod, y)?;
        let f = self.mgr.and(eq, care)?;
        self.make(prod.clone(), y.clone(), f)
    }

    /// `[r, s]_{z,(x,y)}` iff `r_{z,x}` and `s_{z,y}`.
    pub fn pairing(&mut self, r: &Relation, s: &Relation) -> Result<Relation> {
        if r.src != s.src {
            return Err(RelError::TypeMismatch {
                op: "pairing",
                left: r.type_string(),
                right: s.type_string(),
            });
        }
        let tgt = Carrier::product(r.tgt.clone(), s.tgt.clone());
        self.fits(&tgt)?;
        let st = self.target_block(s);
        let shifted = VarBlock::new(st.offset + r.tgt.width(), st.width);
        let s_shift = self.mgr.rename(s.f, st, shifted)?;
        let f = self.mgr.and(r.f, s_shift)?;
        self.make(r.src.clone(), tgt, f)
    }

    /// Relates each pair `(x, y)` with `(y, x)`; equals `[rho, pi]`.
    pub fn exchange(&mut self, sq: &Carrier) -> Result<Relation> {
        let (x, y) = Self::split_product("exchange", sq)?;
        if x != y {
            return Err(RelError::WrongShape {
                op: "exchange",
                carrier: sq.to_string(),
                expected: "square product carrier",
            });
        }
        let p = self.pi(sq)?;
        let q = self.rho(sq)?;
        self.pairing(&q, &p)
    }

    /// Corresponding vector `X*Y <-> unit` of `r : X <-> Y`.
    pub fn vec(&mut self, r: &Relation) -> Result<Relation> {
        let src = Carrier::product(r.src.clone(), r.tgt.clone());
        self.fits(&src)?;
        let t = self.target_block(r);
        let dest = VarBlock::new(self.slot_offset(Slot::Source) + r.src.width(), t.width);
        let f = self.mgr.rename(r.f, t, dest)?;
        self.make(src, Carrier::Unit, f)
    }

    /// Corresponding relation `X <-> Y` of a vector `v : X*Y <-> unit`.
    pub fn rel_of(&mut self, v: &Relation) -> Result<Relation> {
        if !v.tgt.is_unit() {
            return Err(RelError::WrongShape {
                op: "rel",
                carrier: v.tgt.to_string(),
                expected: "unit carrier",
            });
        }
        let (x, y) = Self::split_product("rel", &v.src)?;
        let from = VarBlock::new(self.slot_offset(Slot::Source) + x.width(), y.width());
        let dest = VarBlock::new(self.slot_offset(Slot::Target), y.width());
        let f = self.mgr.rename(v.f, from, dest)?;
        let (x, y) = (x.clone(), y.clone());
        self.make(x, y, f)
    }

    /// Membership relation `X <-> pow X`.
    pub fn eps(&mut self, inner: &Carrier) -> Result<Relation> {
        let pow = Carrier::powerset(inner.clone());
        self.fits(inner)?;
        let m = self.fits(&pow)?;
        let tgt_off = self.slot_offset(Slot::Target);
        let mut f = self.mgr.constant(false);
        for j in 0..m as usize {
            let e = self.element_cube(inner, Slot::Source, j)?;
            let member = self.mgr.var(tgt_off + j as Var)?;
            let both = self.mgr.and(e, member)?;
            f = self.mgr.or(f, both)?;
        }
        self.make(inner.clone(), pow, f)
    }

    /// Size comparison `pow X <-> pow X`: `omega_{Y,Z}` iff `|Y| <= |Z|`.
    pub fn omega(&mut self, inner: &Carrier) -> Result<Relation> {
        let pow = Carrier::powerset(inner.clone());
        let m = self.fits(&pow)?;
        let src_off = self.slot_offset(Slot::Source);
        let tgt_off = self.slot_offset(Slot::Target);
        // target part: at[need] = "the remaining target bits hold >= need members"
        let t = self.mgr.constant(true);
        let fls = self.mgr.constant(false);
        let mut at: Vec<BoolFn> = (0..=m).map(|need| if need == 0 { t } else { fls }).collect();
        for k in (0..m).rev() {
            let z = self.mgr.var(tgt_off + k)?;
            let mut next = Vec::with_capacity(at.len());
            for need in 0..=m as usize {
                let f = if need == 0 {
                    t
                } else {
                    self.mgr.ite(z, at[need - 1], at[need])?
                };
                next.push(f);
            }
            at = next;
        }
        // source part: counts[c] = function given c members seen so far
        let mut counts = at;
        for k in (0..m).rev() {
            let y = self.mgr.var(src_off + k)?;
            let mut next = Vec::with_capacity(k as usize + 1);
            for c in 0..=k as usize {
                next.push(self.mgr.ite(y, counts[c + 1], counts[c])?);
            }
            counts = next;
        }
        self.make(pow.clone(), pow, counts[0])
    }

    /// Strict size comparison `omega ∩ -omega^`, cached per carrier.
    pub fn strict_size(&mut self, inner: &Carrier) -> Result<Relation> {
        if let Some(r) = self.strict_size_cache.get(inner) {
            return Ok(r.clone());
        }
        let om = self.omega(inner)?;
        let omt = self.transpose(&om)?;
        let nomt = self.complement(&omt)?;
        let r = self.inter(&om, &nomt)?;
        self.strict_size_cache.insert(inner.clone(), r.clone());
        Ok(r)
    }

    /// Embedding `Y <-> X` of the subset `Y` described by the vector `v : X <-> unit`.
    ///
    /// `Y` becomes a base carrier named `name` whose elements are the
    /// members of the subset in index order; the returned index map gives
    /// the `X`-index of every element of `Y`.
    pub fn inj(&mut self, v: &Relation, name: &str) -> Result<(Relation, Vec<usize>)> {
        if !v.tgt.is_unit() {
            return Err(RelError::WrongShape {
                op: "inj",
                carrier: v.tgt.to_string(),
                expected: "unit carrier",
            });
        }
        let members = self.vector_members(v)?;
        let sub = Carrier::base(name, members.len());
        self.fits(&sub)?;
        let pairs: Vec<(usize, usize)> = members.iter().copied().enumerate().collect();
        let r = self.from_pairs(&sub, &v.src, pairs)?;
        Ok((r, members))
    }

    /// Column-wise enumeration `eps . inj(v)^ : X <-> Y` of the sets described by `v : pow X <-> unit`.
    pub fn column_enum(&mut self, v: &Relation, name: &str) -> Result<(Relation, Vec<usize>)> {
        let inner = v
            .src
            .as_powerset()
            .ok_or_else(|| RelError::WrongShape {
                op: "column_enum",
                carrier: v.src.to_string(),
                expected: "powerset carrier",
            })?
            .clone();
        let (emb, members) = self.inj(v, name)?;
        let e = self.eps(&inner)?;
        let embt = self.transpose(&emb)?;
        Ok((self.compose(&e, &embt)?, members))
    }

    // ----- inspection -----------------------------------------------------

    pub fn entry_count(&self, r: &Relation) -> Result<BigUint> {
        let blocks = [self.source_block(r), self.target_block(r)];
        Ok(self.mgr.sat_count(r.f, &blocks)?)
    }

    pub fn contains(&self, r: &Relation, i: usize, j: usize) -> Result<bool> {
        Self::check_index(&r.src, i)?;
        Self::check_index(&r.tgt, j)?;
        let s = r.src.encode(i);
        let t = r.tgt.encode(j);
        let so = self.slot_offset(Slot::Source);
        let to = self.slot_offset(Slot::Target);
        Ok(self.mgr.eval(r.f, |v| {
            if v >= to {
                t.get((v - to) as usize).copied().unwrap_or(false)
            } else if v >= so && ((v - so) as usize) < s.len() {
                s[(v - so) as usize]
            } else {
                false
            }
        })?)
    }

    /// Entries as `(source index, target index)` in lexicographic bit order.
    pub fn entries(&self, r: &Relation, limit: usize) -> Result<Vec<(usize, usize)>> {
        let sb = self.source_block(r);
        let tb = self.target_block(r);
        let ws = sb.width as usize;
        Ok(self
            .mgr
            .models(r.f, &[sb, tb], limit)?
            .map(|bits| (r.src.decode(&bits[..ws]), r.tgt.decode(&bits[ws..])))
            .collect())
    }

    /// Element indices described by a vector, ascending by index.
    pub fn vector_members(&self, v: &Relation) -> Result<Vec<usize>> {
        let mut m: Vec<usize> = self.entries(v, usize::MAX)?.into_iter().map(|(i, _)| i).collect();
        m.sort_unstable();
        Ok(m)
    }

    pub fn is_point(&self, v: &Relation) -> Result<bool> {
        Ok(v.tgt.is_unit() && self.entry_count(v)? == BigUint::from(1u8))
    }

    /// Ensure `p` is a point over `c`.
    pub fn expect_point(&self, op: &'static str, p: &Relation, c: &Carrier) -> Result<usize> {
        if &p.src != c || !p.tgt.is_unit() {
            return Err(RelError::TypeMismatch {
                op,
                left: p.type_string(),
                right: format!("{c} <-> unit"),
            });
        }
        let n = self.entry_count(p)?;
        if n != BigUint::from(1u8) {
            return Err(RelError::NotAPoint {
                op,
                entries: n.to_string(),
            });
        }
        Ok(self.vector_members(p)?[0])
    }

    /// Lexicographically least source element of a vector (bit order), if any.
    pub fn pick_member(&self, v: &Relation) -> Result<Option<Vec<bool>>> {
        let sb = self.source_block(v);
        Ok(self.mgr.pick_model(v.f, &[sb])?)
    }

    // ----- dense conversion -----------------------------------------------

    fn dense_dims(src: &Carrier, tgt: &Carrier) -> Result<(usize, usize)> {
        let too_large = || RelError::DenseTooLarge {
            rows: src.size().to_string(),
            cols: tgt.size().to_string(),
        };
        let rows = src.small_size().ok_or_else(too_large)?;
        let cols = tgt.small_size().ok_or_else(too_large)?;
        if rows.checked_mul(cols).is_none_or(|c| c > DENSE_LIMIT) {
            return Err(too_large());
        }
        Ok((rows, cols))
    }

    pub fn to_dense(&self, r: &Relation) -> Result<DenseRelation> {
        Self::dense_dims(&r.src, &r.tgt)?;
        let mut d = DenseRelation::empty(r.src.clone(), r.tgt.clone());
        for (i, j) in self.entries(r, usize::MAX)? {
            d.set(i, j, true);
        }
        Ok(d)
    }

    pub fn from_dense(&mut self, d: &DenseRelation) -> Result<Relation> {
        Self::dense_dims(d.source(), d.target())?;
        let pairs: Vec<(usize, usize)> = d.entries().collect();
        self.from_pairs(d.source(), d.target(), pairs)
    }

    // ----- printing -------------------------------------------------------

    /// Display name of an element.
    pub fn element_label(&self, c: &Carrier, index: usize) -> String {
        match c {
            Carrier::Unit => "*".to_string(),
            Carrier::Base { name, .. } => self
                .labels
                .get(name)
                .and_then(|l| l.get(index))
                .cloned()
                .unwrap_or_else(|| index.to_string()),
            Carrier::Product(l, r) => {
                let rs = r.small_size().unwrap_or(1).max(1);
                format!(
                    "({},{})",
                    self.element_label(l, index / rs),
                    self.element_label(r, index % rs)
                )
            }
            Carrier::Powerset(inner) => {
                let m = inner.small_size().unwrap_or(0);
                let members: Vec<String> = (0..m)
                    .filter(|j| (index >> j) & 1 == 1)
                    .map(|j| self.element_label(inner, j))
                    .collect();
                format!("{{{}}}", members.join(","))
            }
        }
    }

    /// Boolean matrix: one line per source element, `1`/`.` per target element.
    pub fn format_matrix(&self, r: &Relation) -> Result<String> {
        let d = self.to_dense(r)?;
        let (rows, cols) = (d.rows(), d.cols());
        let row_labels: Vec<String> = (0..rows).map(|i| self.element_label(&r.src, i)).collect();
        let col_labels: Vec<String> = (0..cols).map(|j| self.element_label(&r.tgt, j)).collect();
        let pad = row_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        if !r.tgt.is_unit() {
            if col_labels.iter().all(|l| l.chars().count() == 1) {
                let _ = writeln!(out, "{:pad$} {}", "", col_labels.concat());
            } else {
                let _ = writeln!(out, "{:pad$} columns: {}", "", col_labels.join(" "));
            }
        }
        for (i, label) in row_labels.iter().enumerate() {
            let line: String = (0..cols).map(|j| if d.get(i, j) { '1' } else { '.' }).collect();
            let _ = writeln!(out, "{label:>pad$} {line}");
        }
        Ok(out)
    }
}
