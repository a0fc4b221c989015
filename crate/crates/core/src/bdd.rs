//! Reduced ordered binary decision diagrams.
//!
//! A [`Manager`] owns a shared node store with a fixed variable order
//! (variable index = level, smaller indices closer to the root). Handles
//! ([`BoolFn`]) are plain copyable values tagged with the id of the manager
//! that created them; two handles of one manager are equal iff they denote
//! the same Boolean function.
//!
//! The store never frees nodes. Binary operations and `ite` go through a
//! lossy direct-mapped cache; quantification and substitution use memo
//! tables that live for the duration of one call.

use std::fmt::Write as _;
use std::ops::Range;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigUint;
use num_traits::Zero;
use rustc_hash::FxHashMap;
use thiserror::Error;

/// Index of a decision variable; also its level in the fixed order.
pub type Var = u32;

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }
}

const TERMINAL_VAR: Var = Var::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    var: Var,
    lo: NodeId,
    hi: NodeId,
}

/// A Boolean function owned by a [`Manager`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BoolFn {
    manager: u32,
    node: NodeId,
}

impl BoolFn {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn manager_id(&self) -> u32 {
        self.manager
    }

    pub fn is_false(&self) -> bool {
        self.node == NodeId::FALSE
    }

    pub fn is_true(&self) -> bool {
        self.node == NodeId::TRUE
    }
}

/// A run of consecutive variables `offset .. offset + width`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct VarBlock {
    pub offset: Var,
    pub width: u32,
}

impl VarBlock {
    pub fn new(offset: Var, width: u32) -> Self {
        VarBlock { offset, width }
    }

    pub fn end(&self) -> Var {
        self.offset + self.width
    }

    pub fn vars(&self) -> Range<Var> {
        self.offset..self.end()
    }

    pub fn contains(&self, v: Var) -> bool {
        v >= self.offset && v < self.end()
    }

    pub fn overlaps(&self, other: &VarBlock) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }

    /// Sub-block `self.offset + start .. self.offset + start + width`.
    pub fn slice(&self, start: u32, width: u32) -> VarBlock {
        debug_assert!(start + width <= self.width);
        VarBlock::new(self.offset + start, width)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BinOp {
    And,
    Or,
    Xor,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("function belongs to manager #{found}, expected manager #{expected}")]
    ManagerMismatch { expected: u32, found: u32 },
    #[error("variable {var} out of range (manager has {count} variables)")]
    VarOutOfRange { var: Var, count: u32 },
    #[error("rename blocks differ in width ({from} vs {to})")]
    WidthMismatch { from: u32, to: u32 },
    #[error("rename would merge variable {var} with a variable already in the support")]
    RenameOverlap { var: Var },
    #[error("support list does not contain variable {var} of the function")]
    SupportTooSmall { var: Var },
}

pub type Result<T> = std::result::Result<T, BddError>;

// cache tags; 0 marks an empty slot
const TAG_AND: u32 = 1;
const TAG_OR: u32 = 2;
const TAG_XOR: u32 = 3;
const TAG_NOT: u32 = 4;
const TAG_ITE: u32 = 5;

#[derive(Clone, Copy, Default)]
struct CacheEntry {
    tag: u32,
    a: u32,
    b: u32,
    c: u32,
    res: u32,
}

struct OpCache {
    entries: Vec<CacheEntry>,
    mask: usize,
}

const CACHE_MIN_BITS: u32 = 14;
const CACHE_MAX_BITS: u32 = 23;

impl OpCache {
    fn with_bits(bits: u32) -> Self {
        let len = 1usize << bits;
        OpCache {
            entries: vec![CacheEntry::default(); len],
            mask: len - 1,
        }
    }

    #[inline]
    fn slot(&self, tag: u32, a: u32, b: u32, c: u32) -> usize {
        let mut h = (tag as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h = (h ^ a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h = (h ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h = (h ^ c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        (h >> 20) as usize & self.mask
    }

    #[inline]
    fn get(&self, tag: u32, a: NodeId, b: NodeId, c: NodeId) -> Option<NodeId> {
        let e = &self.entries[self.slot(tag, a.0, b.0, c.0)];
        (e.tag == tag && e.a == a.0 && e.b == b.0 && e.c == c.0).then_some(NodeId(e.res))
    }

    #[inline]
    fn put(&mut self, tag: u32, a: NodeId, b: NodeId, c: NodeId, res: NodeId) {
        let s = self.slot(tag, a.0, b.0, c.0);
        self.entries[s] = CacheEntry {
            tag,
            a: a.0,
            b: b.0,
            c: c.0,
            res: res.0,
        };
    }
}

/// Canonical node store plus operation cache.
pub struct Manager {
    id: u32,
    var_count: u32,
    nodes: Vec<Node>,
    unique: FxHashMap<(Var, NodeId, NodeId), NodeId>,
    cache: OpCache,
    cache_bits: u32,
}

impl std::fmt::Debug for Manager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Manager")
            .field("id", &self.id)
            .field("var_count", &self.var_count)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

/// Memo state for one quantification call.
struct Quant {
    mask: Vec<bool>,
    max_var: Var,
    ex: FxHashMap<NodeId, NodeId>,
    ae: FxHashMap<(NodeId, NodeId), NodeId>,
}

impl Manager {
    pub fn new(var_count: u32) -> Self {
        let terminal = Node {
            var: TERMINAL_VAR,
            lo: NodeId::FALSE,
            hi: NodeId::FALSE,
        };
        Manager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            var_count,
            nodes: vec![terminal, terminal],
            unique: FxHashMap::default(),
            cache: OpCache::with_bits(CACHE_MIN_BITS),
            cache_bits: CACHE_MIN_BITS,
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    /// Number of nodes in the store, terminals included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn wrap(&self, node: NodeId) -> BoolFn {
        BoolFn {
            manager: self.id,
            node,
        }
    }

    fn check(&self, f: BoolFn) -> Result<NodeId> {
        if f.manager != self.id {
            return Err(BddError::ManagerMismatch {
                expected: self.id,
                found: f.manager,
            });
        }
        Ok(f.node)
    }

    fn check_var(&self, v: Var) -> Result<()> {
        if v >= self.var_count {
            return Err(BddError::VarOutOfRange {
                var: v,
                count: self.var_count,
            });
        }
        Ok(())
    }

    fn check_block(&self, b: &VarBlock) -> Result<()> {
        if b.width > 0 {
            self.check_var(b.end() - 1)?;
        }
        Ok(())
    }

    fn maybe_grow_cache(&mut self) {
        while self.cache_bits < CACHE_MAX_BITS && self.nodes.len() > (1usize << self.cache_bits) {
            self.cache_bits += 2;
            self.cache = OpCache::with_bits(self.cache_bits.min(CACHE_MAX_BITS));
        }
    }

    #[inline]
    fn var_of(&self, n: NodeId) -> Var {
        self.nodes[n.index()].var
    }

    #[inline]
    fn lo(&self, n: NodeId) -> NodeId {
        self.nodes[n.index()].lo
    }

    #[inline]
    fn hi(&self, n: NodeId) -> NodeId {
        self.nodes[n.index()].hi
    }

    /// Find or create the node `var ? hi : lo`.
    fn mk(&mut self, var: Var, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        debug_assert!(var < self.var_of(lo) && var < self.var_of(hi));
        if let Some(&n) = self.unique.get(&(var, lo, hi)) {
            return n;
        }
        let n = NodeId(u32::try_from(self.nodes.len()).expect("BDD node store exhausted"));
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), n);
        n
    }

    #[inline]
    fn cofactors(&self, n: NodeId, v: Var) -> (NodeId, NodeId) {
        let node = &self.nodes[n.index()];
        if node.var == v {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    pub fn constant(&self, value: bool) -> BoolFn {
        self.wrap(if value { NodeId::TRUE } else { NodeId::FALSE })
    }

    /// The projection function of variable `v`.
    pub fn var(&mut self, v: Var) -> Result<BoolFn> {
        self.check_var(v)?;
        let n = self.mk(v, NodeId::FALSE, NodeId::TRUE);
        Ok(self.wrap(n))
    }

    pub fn nvar(&mut self, v: Var) -> Result<BoolFn> {
        self.check_var(v)?;
        let n = self.mk(v, NodeId::TRUE, NodeId::FALSE);
        Ok(self.wrap(n))
    }

    /// Conjunction of literals; `lits` may be given in any order.
    pub fn cube(&mut self, lits: &[(Var, bool)]) -> Result<BoolFn> {
        let mut sorted = lits.to_vec();
        sorted.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut acc = NodeId::TRUE;
        let mut last: Option<Var> = None;
        for (v, val) in sorted {
            self.check_var(v)?;
            if last == Some(v) {
                // repeated variable: consistent literals collapse, conflicting ones give false
                let cur_val = self.hi(acc) != NodeId::FALSE;
                if cur_val != val {
                    return Ok(self.constant(false));
                }
                continue;
            }
            acc = if val {
                self.mk(v, NodeId::FALSE, acc)
            } else {
                self.mk(v, acc, NodeId::FALSE)
            };
            last = Some(v);
        }
        Ok(self.wrap(acc))
    }

    pub fn not(&mut self, f: BoolFn) -> Result<BoolFn> {
        let a = self.check(f)?;
        self.maybe_grow_cache();
        let r = self.not_rec(a);
        Ok(self.wrap(r))
    }

    pub fn apply(&mut self, op: BinOp, f: BoolFn, g: BoolFn) -> Result<BoolFn> {
        let a = self.check(f)?;
        let b = self.check(g)?;
        self.maybe_grow_cache();
        let r = self.apply_rec(op, a, b);
        Ok(self.wrap(r))
    }

    pub fn and(&mut self, f: BoolFn, g: BoolFn) -> Result<BoolFn> {
        self.apply(BinOp::And, f, g)
    }

    pub fn or(&mut self, f: BoolFn, g: BoolFn) -> Result<BoolFn> {
        self.apply(BinOp::Or, f, g)
    }

    pub fn xor(&mut self, f: BoolFn, g: BoolFn) -> Result<BoolFn> {
        self.apply(BinOp::Xor, f, g)
    }

    /// `f ∧ ¬g`
    pub fn diff(&mut self, f: BoolFn, g: BoolFn) -> Result<BoolFn> {
        let ng = self.not(g)?;
        self.and(f, ng)
    }

    pub fn ite(&mut self, f: BoolFn, g: BoolFn, h: BoolFn) -> Result<BoolFn> {
        let a = self.check(f)?;
        let b = self.check(g)?;
        let c = self.check(h)?;
        self.maybe_grow_cache();
        let r = self.ite_rec(a, b, c);
        Ok(self.wrap(r))
    }

    fn not_rec(&mut self, a: NodeId) -> NodeId {
        match a {
            NodeId::FALSE => return NodeId::TRUE,
            NodeId::TRUE => return NodeId::FALSE,
            _ => {}
        }
        if let Some(r) = self.cache.get(TAG_NOT, a, a, a) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[a.index()];
        let l = self.not_rec(lo);
        let h = self.not_rec(hi);
        let r = self.mk(var, l, h);
        self.cache.put(TAG_NOT, a, a, a, r);
        r
    }

    fn apply_rec(&mut self, op: BinOp, a: NodeId, b: NodeId) -> NodeId {
        let tag = match op {
            BinOp::And => {
                if a == b || b == NodeId::TRUE {
                    return a;
                }
                if a == NodeId::FALSE || b == NodeId::FALSE {
                    return NodeId::FALSE;
                }
                if a == NodeId::TRUE {
                    return b;
                }
                TAG_AND
            }
            BinOp::Or => {
                if a == b || b == NodeId::FALSE {
                    return a;
                }
                if a == NodeId::TRUE || b == NodeId::TRUE {
                    return NodeId::TRUE;
                }
                if a == NodeId::FALSE {
                    return b;
                }
                TAG_OR
            }
            BinOp::Xor => {
                if a == b {
                    return NodeId::FALSE;
                }
                if a == NodeId::FALSE {
                    return b;
                }
                if b == NodeId::FALSE {
                    return a;
                }
                if a == NodeId::TRUE {
                    return self.not_rec(b);
                }
                if b == NodeId::TRUE {
                    return self.not_rec(a);
                }
                TAG_XOR
            }
        };
        // all three operators are commutative
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(r) = self.cache.get(tag, a, b, NodeId::FALSE) {
            return r;
        }
        let v = self.var_of(a).min(self.var_of(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.apply_rec(op, a0, b0);
        let hi = self.apply_rec(op, a1, b1);
        let r = self.mk(v, lo, hi);
        self.cache.put(tag, a, b, NodeId::FALSE, r);
        r
    }

    fn ite_rec(&mut self, f: NodeId, g: NodeId, h: NodeId) -> NodeId {
        if f == NodeId::TRUE || g == h {
            return g;
        }
        if f == NodeId::FALSE {
            return h;
        }
        if g == NodeId::TRUE && h == NodeId::FALSE {
            return f;
        }
        if g == NodeId::FALSE && h == NodeId::TRUE {
            return self.not_rec(f);
        }
        if g == NodeId::TRUE || f == g {
            return self.apply_rec(BinOp::Or, f, h);
        }
        if h == NodeId::FALSE || f == h {
            return self.apply_rec(BinOp::And, f, g);
        }
        if let Some(r) = self.cache.get(TAG_ITE, f, g, h) {
            return r;
        }
        let v = self.var_of(f).min(self.var_of(g)).min(self.var_of(h));
        let (f0, f1) = self.cofactors(f, v);
        let (g0, g1) = self.cofactors(g, v);
        let (h0, h1) = self.cofactors(h, v);
        let lo = self.ite_rec(f0, g0, h0);
        let hi = self.ite_rec(f1, g1, h1);
        let r = self.mk(v, lo, hi);
        self.cache.put(TAG_ITE, f, g, h, r);
        r
    }

    fn quant_for(&self, blocks: &[VarBlock]) -> Result<Quant> {
        let mut mask = vec![false; self.var_count as usize];
        let mut max_var = 0;
        let mut any = false;
        for b in blocks {
            self.check_block(b)?;
            for v in b.vars() {
                mask[v as usize] = true;
                max_var = max_var.max(v);
                any = true;
            }
        }
        Ok(Quant {
            mask,
            max_var: if any { max_var } else { 0 },
            ex: FxHashMap::default(),
            ae: FxHashMap::default(),
        })
    }

    /// Existential projection over every variable of `blocks`.
    pub fn exists(&mut self, f: BoolFn, blocks: &[VarBlock]) -> Result<BoolFn> {
        let a = self.check(f)?;
        let mut q = self.quant_for(blocks)?;
        if blocks.iter().all(|b| b.width == 0) {
            return Ok(f);
        }
        self.maybe_grow_cache();
        let r = self.exists_rec(a, &mut q);
        Ok(self.wrap(r))
    }

    /// Universal projection over every variable of `blocks`.
    pub fn forall(&mut self, f: BoolFn, blocks: &[VarBlock]) -> Result<BoolFn> {
        let nf = self.not(f)?;
        let e = self.exists(nf, blocks)?;
        self.not(e)
    }

    /// `∃ blocks. f ∧ g` without building the conjunction first.
    pub fn and_exists(&mut self, f: BoolFn, g: BoolFn, blocks: &[VarBlock]) -> Result<BoolFn> {
        let a = self.check(f)?;
        let b = self.check(g)?;
        let mut q = self.quant_for(blocks)?;
        self.maybe_grow_cache();
        if blocks.iter().all(|b| b.width == 0) {
            let r = self.apply_rec(BinOp::And, a, b);
            return Ok(self.wrap(r));
        }
        let r = self.and_exists_rec(a, b, &mut q);
        Ok(self.wrap(r))
    }

    fn exists_rec(&mut self, a: NodeId, q: &mut Quant) -> NodeId {
        if a.is_terminal() || self.var_of(a) > q.max_var {
            return a;
        }
        if let Some(&r) = q.ex.get(&a) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[a.index()];
        let l = self.exists_rec(lo, q);
        let r = if q.mask[var as usize] {
            if l == NodeId::TRUE {
                NodeId::TRUE
            } else {
                let h = self.exists_rec(hi, q);
                self.apply_rec(BinOp::Or, l, h)
            }
        } else {
            let h = self.exists_rec(hi, q);
            self.mk(var, l, h)
        };
        q.ex.insert(a, r);
        r
    }

    fn and_exists_rec(&mut self, a: NodeId, b: NodeId, q: &mut Quant) -> NodeId {
        if a == NodeId::FALSE || b == NodeId::FALSE {
            return NodeId::FALSE;
        }
        if a == b || b == NodeId::TRUE {
            return self.exists_rec(a, q);
        }
        if a == NodeId::TRUE {
            return self.exists_rec(b, q);
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let v = self.var_of(a).min(self.var_of(b));
        if v > q.max_var {
            return self.apply_rec(BinOp::And, a, b);
        }
        if let Some(&r) = q.ae.get(&(a, b)) {
            return r;
        }
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.and_exists_rec(a0, b0, q);
        let r = if q.mask[v as usize] {
            if lo == NodeId::TRUE {
                NodeId::TRUE
            } else {
                let hi = self.and_exists_rec(a1, b1, q);
                self.apply_rec(BinOp::Or, lo, hi)
            }
        } else {
            let hi = self.and_exists_rec(a1, b1, q);
            self.mk(v, lo, hi)
        };
        q.ae.insert((a, b), r);
        r
    }

    /// Substitute variable `from.offset + k` by `to.offset + k` for every `k`.
    pub fn rename(&mut self, f: BoolFn, from: VarBlock, to: VarBlock) -> Result<BoolFn> {
        if from.width != to.width {
            return Err(BddError::WidthMismatch {
                from: from.width,
                to: to.width,
            });
        }
        let pairs: Vec<(Var, Var)> = from.vars().zip(to.vars()).collect();
        self.replace(f, &pairs)
    }

    /// Simultaneous substitution of variables by variables.
    ///
    /// Every variable of the support of `f` must end up at a distinct
    /// variable; unmapped support variables stay where they are.
    pub fn replace(&mut self, f: BoolFn, pairs: &[(Var, Var)]) -> Result<BoolFn> {
        let a = self.check(f)?;
        let mut table: Vec<Var> = (0..self.var_count).collect();
        for &(from, to) in pairs {
            self.check_var(from)?;
            self.check_var(to)?;
            table[from as usize] = to;
        }
        let support = self.support_nodes(a);
        let mut seen = vec![false; self.var_count as usize];
        let mut monotone = true;
        let mut prev: Option<Var> = None;
        for &v in &support {
            let t = table[v as usize];
            if seen[t as usize] {
                return Err(BddError::RenameOverlap { var: t });
            }
            seen[t as usize] = true;
            if prev.is_some_and(|p| p >= t) {
                monotone = false;
            }
            prev = Some(t);
        }
        self.maybe_grow_cache();
        let mut memo = FxHashMap::default();
        let r = if monotone {
            self.relabel_rec(a, &table, &mut memo)
        } else {
            self.substitute_rec(a, &table, &mut memo)
        };
        Ok(self.wrap(r))
    }

    fn relabel_rec(&mut self, a: NodeId, table: &[Var], memo: &mut FxHashMap<NodeId, NodeId>) -> NodeId {
        if a.is_terminal() {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[a.index()];
        let l = self.relabel_rec(lo, table, memo);
        let h = self.relabel_rec(hi, table, memo);
        let r = self.mk(table[var as usize], l, h);
        memo.insert(a, r);
        r
    }

    fn substitute_rec(&mut self, a: NodeId, table: &[Var], memo: &mut FxHashMap<NodeId, NodeId>) -> NodeId {
        if a.is_terminal() {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[a.index()];
        let l = self.substitute_rec(lo, table, memo);
        let h = self.substitute_rec(hi, table, memo);
        let x = self.mk(table[var as usize], NodeId::FALSE, NodeId::TRUE);
        let r = self.ite_rec(x, h, l);
        memo.insert(a, r);
        r
    }

    fn support_nodes(&self, a: NodeId) -> Vec<Var> {
        let mut vars = vec![false; self.var_count as usize];
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![a];
        while let Some(n) = stack.pop() {
            if n.is_terminal() || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n.index()];
            vars[node.var as usize] = true;
            stack.push(node.lo);
            stack.push(node.hi);
        }
        (0..self.var_count).filter(|&v| vars[v as usize]).collect()
    }

    /// Variables the function depends on, ascending.
    pub fn support(&self, f: BoolFn) -> Result<Vec<Var>> {
        let a = self.check(f)?;
        Ok(self.support_nodes(a))
    }

    /// Number of internal nodes reachable from `f`.
    pub fn size(&self, f: BoolFn) -> Result<usize> {
        let a = self.check(f)?;
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![a];
        while let Some(n) = stack.pop() {
            if n.is_terminal() || !seen.insert(n) {
                continue;
            }
            stack.push(self.lo(n));
            stack.push(self.hi(n));
        }
        Ok(seen.len())
    }

    /// Evaluate under an assignment given as a predicate on variables.
    pub fn eval(&self, f: BoolFn, assignment: impl Fn(Var) -> bool) -> Result<bool> {
        let mut n = self.check(f)?;
        while !n.is_terminal() {
            n = if assignment(self.var_of(n)) {
                self.hi(n)
            } else {
                self.lo(n)
            };
        }
        Ok(n == NodeId::TRUE)
    }

    fn support_positions(&self, a: NodeId, blocks: &[VarBlock]) -> Result<(Vec<Var>, Vec<u32>)> {
        let mut vars: Vec<Var> = Vec::new();
        for b in blocks {
            self.check_block(b)?;
            vars.extend(b.vars());
        }
        vars.sort_unstable();
        vars.dedup();
        let mut pos = vec![u32::MAX; self.var_count as usize];
        for (i, &v) in vars.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        for v in self.support_nodes(a) {
            if pos[v as usize] == u32::MAX {
                return Err(BddError::SupportTooSmall { var: v });
            }
        }
        Ok((vars, pos))
    }

    /// Number of assignments to exactly the variables of `blocks` that satisfy `f`.
    pub fn sat_count(&self, f: BoolFn, blocks: &[VarBlock]) -> Result<BigUint> {
        let a = self.check(f)?;
        let (vars, pos) = self.support_positions(a, blocks)?;
        let len = vars.len() as u32;
        let level = |n: NodeId| -> u32 {
            if n.is_terminal() {
                len
            } else {
                pos[self.var_of(n) as usize]
            }
        };
        let mut memo: FxHashMap<NodeId, BigUint> = FxHashMap::default();
        // post-order traversal to avoid deep recursion on BigUint frames
        let mut stack = vec![(a, false)];
        while let Some((n, expanded)) = stack.pop() {
            if n.is_terminal() || memo.contains_key(&n) {
                continue;
            }
            let (lo, hi) = (self.lo(n), self.hi(n));
            if !expanded {
                stack.push((n, true));
                stack.push((lo, false));
                stack.push((hi, false));
                continue;
            }
            let get = |m: NodeId, memo: &FxHashMap<NodeId, BigUint>| -> BigUint {
                match m {
                    NodeId::FALSE => BigUint::zero(),
                    NodeId::TRUE => BigUint::from(1u8),
                    _ => memo[&m].clone(),
                }
            };
            let here = level(n);
            let c = (get(lo, &memo) << (level(lo) - here - 1) as usize)
                + (get(hi, &memo) << (level(hi) - here - 1) as usize);
            memo.insert(n, c);
        }
        Ok(match a {
            NodeId::FALSE => BigUint::zero(),
            NodeId::TRUE => BigUint::from(1u8) << len as usize,
            _ => memo[&a].clone() << level(a) as usize,
        })
    }

    /// Lexicographically least satisfying assignment over `blocks`
    /// (variables in ascending order, `false < true`).
    pub fn pick_model(&self, f: BoolFn, blocks: &[VarBlock]) -> Result<Option<Vec<bool>>> {
        Ok(self.models(f, blocks, 1)?.next())
    }

    /// Satisfying assignments over `blocks` in lexicographic order, at most `limit`.
    pub fn models(&self, f: BoolFn, blocks: &[VarBlock], limit: usize) -> Result<Models<'_>> {
        let a = self.check(f)?;
        let (vars, _) = self.support_positions(a, blocks)?;
        Ok(Models {
            mgr: self,
            root: a,
            vars,
            frames: Vec::new(),
            started: false,
            remaining: limit,
        })
    }

    /// Graphviz rendering of `f`, for debugging.
    pub fn to_dot(&self, f: BoolFn) -> Result<String> {
        let a = self.check(f)?;
        let mut out = String::from("digraph bdd {\n  node [shape=circle];\n");
        out.push_str("  n0 [label=\"0\", shape=box];\n  n1 [label=\"1\", shape=box];\n");
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![a];
        while let Some(n) = stack.pop() {
            if n.is_terminal() || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n.index()];
            let _ = writeln!(out, "  n{} [label=\"x{}\"];", n.0, node.var);
            let _ = writeln!(out, "  n{} -> n{} [style=dashed];", n.0, node.lo.0);
            let _ = writeln!(out, "  n{} -> n{};", n.0, node.hi.0);
            stack.push(node.lo);
            stack.push(node.hi);
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// Lazy stream of satisfying assignments, see [`Manager::models`].
pub struct Models<'m> {
    mgr: &'m Manager,
    root: NodeId,
    vars: Vec<Var>,
    // one frame per decided variable: node before the decision and the chosen value
    frames: Vec<(NodeId, bool)>,
    started: bool,
    remaining: usize,
}

impl Models<'_> {
    fn step(&self, n: NodeId, pos: usize, value: bool) -> NodeId {
        let m = self.mgr;
        if !n.is_terminal() && m.var_of(n) == self.vars[pos] {
            if value {
                m.hi(n)
            } else {
                m.lo(n)
            }
        } else {
            n
        }
    }

    fn current_node(&self) -> NodeId {
        match self.frames.last() {
            Some(&(n, v)) => self.step(n, self.frames.len() - 1, v),
            None => self.root,
        }
    }

    /// Extend the frames with least choices down to a full assignment.
    fn descend(&mut self) {
        let mut n = self.current_node();
        while self.frames.len() < self.vars.len() {
            let pos = self.frames.len();
            let value = self.step(n, pos, false) == NodeId::FALSE;
            self.frames.push((n, value));
            n = self.step(n, pos, value);
        }
        debug_assert_eq!(n, NodeId::TRUE);
    }
}

impl Iterator for Models<'_> {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        if self.remaining == 0 || self.root == NodeId::FALSE {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
        } else {
            loop {
                let (n, value) = self.frames.pop()?;
                let pos = self.frames.len();
                if !value && self.step(n, pos, true) != NodeId::FALSE {
                    self.frames.push((n, true));
                    break;
                }
            }
            self.descend();
        }
        self.remaining -= 1;
        Some(self.frames.iter().map(|&(_, v)| v).collect())
    }
}
