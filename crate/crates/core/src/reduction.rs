//! Exact cover by 4-sets (X4C) and the control instance built from it.
//!
//! Elements and sets are 1-based in the JSON formats and in
//! [`X4CInstance::sets`]; set indices returned by the search functions are
//! 0-based positions in that list.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::{Election, VoterOrder};

/// `{"n": int, "sets": [[int, int, int, int], ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct X4CInstance {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

/// `{"vars": int, "clauses": [[int, int, int], ...]}` with 1-based variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneInThreeInstance {
    pub vars: usize,
    pub clauses: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    GroundSetNotMultipleOfFour(usize),
    SetSize { set: usize, size: usize },
    ElementOutOfRange { set: usize, element: usize },
    RepeatedElement { set: usize, element: usize },
    Occurrences { element: usize, count: usize },
    SetCount { expected: usize, found: usize },
    ClauseSize { clause: usize, size: usize },
    VariableOutOfRange { clause: usize, var: usize },
    RepeatedVariable { clause: usize, var: usize },
    VariableOccurrences { var: usize, count: usize },
    VariableCount { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GroundSetNotMultipleOfFour(n) => write!(f, "ground set size {n} is not a multiple of 4"),
            Violation::SetSize { set, size } => write!(f, "set {set} has {size} elements, expected 4"),
            Violation::ElementOutOfRange { set, element } => write!(f, "set {set} contains {element}, outside the ground set"),
            Violation::RepeatedElement { set, element } => write!(f, "set {set} lists element {element} twice"),
            Violation::Occurrences { element, count } => write!(f, "element {element} occurs in {count} sets, expected 3"),
            Violation::SetCount { expected, found } => write!(f, "{found} sets given, expected {expected}"),
            Violation::ClauseSize { clause, size } => write!(f, "clause {clause} has {size} variables, expected 3"),
            Violation::VariableOutOfRange { clause, var } => write!(f, "clause {clause} mentions unknown variable {var}"),
            Violation::RepeatedVariable { clause, var } => write!(f, "clause {clause} repeats variable {var}"),
            Violation::VariableOccurrences { var, count } => write!(f, "variable {var} occurs in {count} clauses, expected 4"),
            Violation::VariableCount { expected, found } => write!(f, "{found} variables declared, expected {expected}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid instance: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("ground set size {0} is below 16")]
    TooSmall(usize),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Check every X4C constraint; all violations are reported.
pub fn validate_x4c(inst: &X4CInstance) -> Result<(), Vec<Violation>> {
    let n = inst.n;
    let mut out = Vec::new();
    if n % 4 != 0 || n == 0 {
        out.push(Violation::GroundSetNotMultipleOfFour(n));
    }
    let mut occ = vec![0usize; n + 1];
    for (s, set) in inst.sets.iter().enumerate() {
        let s = s + 1;
        if set.len() != 4 {
            out.push(Violation::SetSize { set: s, size: set.len() });
        }
        let mut seen = Vec::new();
        for &x in set {
            if x == 0 || x > n {
                out.push(Violation::ElementOutOfRange { set: s, element: x });
            } else if seen.contains(&x) {
                out.push(Violation::RepeatedElement { set: s, element: x });
            } else {
                seen.push(x);
                occ[x] += 1;
            }
        }
    }
    for (x, &c) in occ.iter().enumerate().skip(1) {
        if c != 3 {
            out.push(Violation::Occurrences { element: x, count: c });
        }
    }
    if inst.sets.len() * 4 != n * 3 {
        out.push(Violation::SetCount {
            expected: 3 * n / 4,
            found: inst.sets.len(),
        });
    }
    if out.is_empty() { Ok(()) } else { Err(out) }
}

pub fn validate_1in3(inst: &OneInThreeInstance) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut occ = vec![0usize; inst.vars + 1];
    for (c, clause) in inst.clauses.iter().enumerate() {
        let c = c + 1;
        if clause.len() != 3 {
            out.push(Violation::ClauseSize { clause: c, size: clause.len() });
        }
        let mut seen = Vec::new();
        for &v in clause {
            if v == 0 || v > inst.vars {
                out.push(Violation::VariableOutOfRange { clause: c, var: v });
            } else if seen.contains(&v) {
                out.push(Violation::RepeatedVariable { clause: c, var: v });
            } else {
                seen.push(v);
                occ[v] += 1;
            }
        }
    }
    for (v, &c) in occ.iter().enumerate().skip(1) {
        if c != 4 {
            out.push(Violation::VariableOccurrences { var: v, count: c });
        }
    }
    if inst.vars * 4 != inst.clauses.len() * 3 {
        out.push(Violation::VariableCount {
            expected: 3 * inst.clauses.len() / 4,
            found: inst.vars,
        });
    }
    if out.is_empty() { Ok(()) } else { Err(out) }
}

/// Clause `j` becomes element `j`; variable `i` becomes the set of clauses containing it.
pub fn reduce_1in3_to_x4c(inst: &OneInThreeInstance) -> Result<X4CInstance, ReductionError> {
    validate_1in3(inst).map_err(ReductionError::Invalid)?;
    let mut sets = vec![Vec::new(); inst.vars];
    for (j, clause) in inst.clauses.iter().enumerate() {
        for &v in clause {
            sets[v - 1].push(j + 1);
        }
    }
    Ok(X4CInstance {
        n: inst.clauses.len(),
        sets,
    })
}

impl OneInThreeInstance {
    /// The formula whose reduction is `inst`: clause `j` lists the sets containing `j`.
    pub fn from_x4c(inst: &X4CInstance) -> OneInThreeInstance {
        let mut clauses = vec![Vec::new(); inst.n];
        for (i, set) in inst.sets.iter().enumerate() {
            for &x in set {
                clauses[x - 1].push(i + 1);
            }
        }
        OneInThreeInstance {
            vars: inst.sets.len(),
            clauses,
        }
    }

    /// Whether the true variables (1-based) satisfy exactly one literal per clause.
    pub fn satisfied_by(&self, true_vars: &[usize]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|v| true_vars.contains(v)).count() == 1)
    }
}

/// Origin of a voter in the constructed election.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "group", content = "index")]
pub enum VoterGroup {
    /// `S_{≠i} > s_i > b_i > B_{≠i} > a*`
    #[serde(rename = "1")]
    One(usize),
    /// `B_{≠i} > a* > s_i > b_i > S_{≠i}`
    #[serde(rename = "2")]
    Two(usize),
    /// `B_{∉S_i} > a* > S > B_{∈S_i}`, indexed by 1-based set number
    #[serde(rename = "3")]
    Three(usize),
    /// `a* > S > B`
    #[serde(rename = "4")]
    Four,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLayout {
    pub n: usize,
    pub t: usize,
    pub target: String,
    pub budget: usize,
    pub voters: Vec<VoterGroup>,
}

pub const TARGET: &str = "astar";

impl ReductionLayout {
    /// Alternative index of `s_i` (1-based `i`).
    pub fn s(&self, i: usize) -> usize {
        i
    }

    /// Alternative index of `b_i` (1-based `i`).
    pub fn b(&self, i: usize) -> usize {
        self.n + i
    }

    /// 0-based voter indices of the group-3 voters for the given 0-based sets.
    pub fn group3_voters(&self, sets: &[usize]) -> Vec<usize> {
        self.voters
            .iter()
            .enumerate()
            .filter(|(_, g)| matches!(g, VoterGroup::Three(s) if sets.contains(&(s - 1))))
            .map(|(v, _)| v)
            .collect()
    }
}

/// Alternatives `astar, s1..sn, b1..bn`; voter groups 1 to 4 in order.
pub fn build_control_instance(inst: &X4CInstance) -> Result<(Election, ReductionLayout), ReductionError> {
    validate_x4c(inst).map_err(ReductionError::Invalid)?;
    let n = inst.n;
    if n < 16 {
        return Err(ReductionError::TooSmall(n));
    }
    let t = n / 4 - 2;
    let a = 0;
    let s = |i: usize| i;
    let b = |i: usize| n + i;
    let s_all = || (1..=n).map(s);
    let b_all = || (1..=n).map(b);
    let mut alternatives = vec![TARGET.to_string()];
    alternatives.extend((1..=n).map(|i| format!("s{i}")));
    alternatives.extend((1..=n).map(|i| format!("b{i}")));
    let mut voters = Vec::new();
    let mut groups = Vec::new();
    for i in 1..=n {
        let mut r: Vec<usize> = (1..=n).filter(|&j| j != i).map(s).collect();
        r.extend([s(i), b(i)]);
        r.extend((1..=n).filter(|&j| j != i).map(b));
        r.push(a);
        for _ in 0..t {
            voters.push(VoterOrder::linear(&r));
            groups.push(VoterGroup::One(i));
        }
    }
    for i in 1..=n {
        let mut r: Vec<usize> = (1..=n).filter(|&j| j != i).map(b).collect();
        r.extend([a, s(i), b(i)]);
        r.extend((1..=n).filter(|&j| j != i).map(s));
        for _ in 0..t {
            voters.push(VoterOrder::linear(&r));
            groups.push(VoterGroup::Two(i));
        }
    }
    for (k, set) in inst.sets.iter().enumerate() {
        let mut r: Vec<usize> = (1..=n).filter(|j| !set.contains(j)).map(b).collect();
        r.push(a);
        r.extend(s_all());
        r.extend((1..=n).filter(|j| set.contains(j)).map(b));
        voters.push(VoterOrder::linear(&r));
        groups.push(VoterGroup::Three(k + 1));
    }
    let mut r = vec![a];
    r.extend(s_all());
    r.extend(b_all());
    voters.push(VoterOrder::linear(&r));
    groups.push(VoterGroup::Four);
    let layout = ReductionLayout {
        n,
        t,
        target: TARGET.to_string(),
        budget: n / 4,
        voters: groups,
    };
    Ok((Election::new(alternatives, voters), layout))
}

/// A pairwise margin that differs from its predicted value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub claim: &'static str,
    pub winner: String,
    pub loser: String,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginAudit {
    pub n: usize,
    pub t: usize,
    /// `2(n-1)t + 3n/4 - 7`
    pub b_over_astar: i64,
    /// `3n/4 + 1`
    pub astar_over_s: i64,
    /// `3n/4 - 7`
    pub b_over_other_s: i64,
    /// `n/4 - 3`
    pub b_over_own_s: i64,
    /// `n/4 + 1`: margins at least this large survive `n/4` deletions.
    pub safe_threshold: i64,
    /// Smallest observed margin of `astar` over any `s_i`.
    pub astar_over_s_min: i64,
    pub astar_over_s_meets_safe_threshold: bool,
    pub deviations: Vec<Deviation>,
}

/// Compare all claimed margins with direct counts.
pub fn audit_margins(e: &Election, layout: &ReductionLayout) -> MarginAudit {
    let n = layout.n as i64;
    let t = layout.t as i64;
    let margins = e.margins();
    let mut audit = MarginAudit {
        n: layout.n,
        t: layout.t,
        b_over_astar: 2 * (n - 1) * t + 3 * n / 4 - 7,
        astar_over_s: 3 * n / 4 + 1,
        b_over_other_s: 3 * n / 4 - 7,
        b_over_own_s: n / 4 - 3,
        safe_threshold: n / 4 + 1,
        astar_over_s_min: i64::MAX,
        astar_over_s_meets_safe_threshold: false,
        deviations: Vec::new(),
    };
    let name = |x: usize| e.alternatives()[x].clone();
    let check = |claim: &'static str, x: usize, y: usize, expected: i64, out: &mut Vec<Deviation>| {
        let actual = margins[x][y];
        if actual != expected {
            out.push(Deviation {
                claim,
                winner: name(x),
                loser: name(y),
                expected,
                actual,
            });
        }
    };
    let mut dev = Vec::new();
    for i in 1..=layout.n {
        check("b_i over a*", layout.b(i), 0, audit.b_over_astar, &mut dev);
        check("a* over s_i", 0, layout.s(i), audit.astar_over_s, &mut dev);
        check("b_i over s_i", layout.b(i), layout.s(i), audit.b_over_own_s, &mut dev);
        for j in (1..=layout.n).filter(|&j| j != i) {
            check("b_i over s_j", layout.b(i), layout.s(j), audit.b_over_other_s, &mut dev);
        }
        audit.astar_over_s_min = audit.astar_over_s_min.min(margins[0][layout.s(i)]);
    }
    audit.astar_over_s_meets_safe_threshold = audit.astar_over_s_min >= audit.safe_threshold;
    audit.deviations = dev;
    audit
}

/// Any exact cover, as ascending 0-based set indices.
///
/// Branches on the uncovered element with the fewest candidate sets.
pub fn find_exact_cover(inst: &X4CInstance) -> Option<Vec<usize>> {
    let n = inst.n;
    let mut containing = vec![Vec::new(); n + 1];
    for (k, set) in inst.sets.iter().enumerate() {
        if set.iter().any(|&x| x == 0 || x > n) {
            return None;
        }
        for &x in set {
            containing[x].push(k);
        }
    }
    let mut covered = vec![false; n + 1];
    let mut chosen = Vec::new();
    if search(inst, &containing, &mut covered, &mut chosen) {
        chosen.sort_unstable();
        Some(chosen)
    } else {
        None
    }
}

fn search(inst: &X4CInstance, containing: &[Vec<usize>], covered: &mut [bool], chosen: &mut Vec<usize>) -> bool {
    let fits = |k: usize, covered: &[bool]| {
        let s = &inst.sets[k];
        s.iter().all(|&x| !covered[x]) && s.iter().enumerate().all(|(i, x)| !s[..i].contains(x))
    };
    let mut best: Option<(usize, usize)> = None;
    for x in 1..covered.len() {
        if covered[x] {
            continue;
        }
        let options = containing[x].iter().filter(|&&k| fits(k, covered)).count();
        if best.is_none_or(|(_, c)| options < c) {
            best = Some((x, options));
            if options == 0 {
                return false;
            }
        }
    }
    let Some((x, _)) = best else {
        return true;
    };
    for &k in &containing[x] {
        if !fits(k, covered) {
            continue;
        }
        for &y in &inst.sets[k] {
            covered[y] = true;
        }
        chosen.push(k);
        if search(inst, containing, covered, chosen) {
            return true;
        }
        chosen.pop();
        for &y in &inst.sets[k] {
            covered[y] = false;
        }
    }
    false
}

/// Three random partitions of `1..=n` into 4-blocks, in shuffled order,
/// together with the positions of the first partition (an exact cover).
pub fn planted_instance(n: usize, rng: &mut impl Rng) -> (X4CInstance, Vec<usize>) {
    assert!(n % 4 == 0 && n > 0, "n must be a positive multiple of 4");
    let mut sets = Vec::new();
    for _ in 0..3 {
        let mut p: Vec<usize> = (1..=n).collect();
        p.shuffle(rng);
        for c in p.chunks(4) {
            let mut c = c.to_vec();
            c.sort_unstable();
            sets.push(c);
        }
    }
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.shuffle(rng);
    let mut cover: Vec<usize> = (0..n / 4)
        .map(|k| order.iter().position(|&o| o == k).expect("permutation"))
        .collect();
    cover.sort_unstable();
    let sets = order.into_iter().map(|o| sets[o].clone()).collect();
    (X4CInstance { n, sets }, cover)
}

/// Configuration model: three copies of each element dealt into 4-sets,
/// redealt until no set repeats an element.
pub fn random_instance(n: usize, rng: &mut impl Rng) -> X4CInstance {
    assert!(n % 4 == 0 && n > 0, "n must be a positive multiple of 4");
    loop {
        let mut pool: Vec<usize> = (1..=n).flat_map(|x| [x; 3]).collect();
        pool.shuffle(rng);
        let sets: Vec<Vec<usize>> = pool
            .chunks(4)
            .map(|c| {
                let mut c = c.to_vec();
                c.sort_unstable();
                c
            })
            .collect();
        if sets.iter().all(|s| s.windows(2).all(|w| w[0] != w[1])) {
            return X4CInstance { n, sets };
        }
    }
}

/// Outcome of an exhaustive scan over small deletion sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionScan {
    pub checked: u64,
    /// Every deletion set (0-based voters) that makes the target uncovered.
    pub successes: Vec<Vec<usize>>,
}

/// Try every deletion set of at most `max_size` voters, counting margins
/// incrementally from the full election.
pub fn scan_uncovering_deletions(e: &Election, target: usize, max_size: usize) -> DeletionScan {
    let m = e.num_alternatives();
    let nv = e.num_voters();
    let contrib: Vec<Vec<i64>> = e
        .voters()
        .iter()
        .map(|v| {
            let mut c = vec![0i64; m * m];
            for x in 0..m {
                for y in 0..m {
                    if v.prefers(x, y) {
                        c[x * m + y] = 1;
                        c[y * m + x] = -1;
                    }
                }
            }
            c
        })
        .collect();
    let full: Vec<i64> = e.margins().into_iter().flatten().collect();
    let uncovered = |margins: &[i64]| {
        let dom = |x: usize, y: usize| margins[x * m + y] > 0;
        !(0..m).any(|b| b != target && dom(b, target) && (0..m).all(|c| !dom(c, b) || dom(c, target)))
    };
    let mut results: Vec<(u64, Vec<Vec<usize>>)> = Vec::new();
    results.push((1, if uncovered(&full) { vec![vec![]] } else { vec![] }));
    if max_size >= 1 {
        let per_first: Vec<(u64, Vec<Vec<usize>>)> = (0..nv)
            .into_par_iter()
            .map(|i| {
                let mut cur = full.clone();
                sub(&mut cur, &contrib[i]);
                let mut found = Vec::new();
                let mut checked = 0u64;
                extend(&mut cur, &contrib, &mut vec![i], i + 1, max_size, &uncovered, &mut checked, &mut found);
                (checked, found)
            })
            .collect();
        results.extend(per_first);
    }
    let checked = results.iter().map(|r| r.0).sum();
    let mut successes: Vec<Vec<usize>> = results.into_iter().flat_map(|r| r.1).collect();
    successes.sort();
    DeletionScan { checked, successes }
}

fn sub(cur: &mut [i64], c: &[i64]) {
    cur.iter_mut().zip(c).for_each(|(x, y)| *x -= y);
}

#[allow(clippy::too_many_arguments)]
fn extend(
    cur: &mut Vec<i64>,
    contrib: &[Vec<i64>],
    chosen: &mut Vec<usize>,
    next: usize,
    max_size: usize,
    uncovered: &(impl Fn(&[i64]) -> bool + Sync),
    checked: &mut u64,
    found: &mut Vec<Vec<usize>>,
) {
    *checked += 1;
    if uncovered(cur) {
        found.push(chosen.clone());
    }
    if chosen.len() == max_size {
        return;
    }
    for j in next..contrib.len() {
        sub(cur, &contrib[j]);
        chosen.push(j);
        extend(cur, contrib, chosen, j + 1, max_size, uncovered, checked, found);
        chosen.pop();
        cur.iter_mut().zip(&contrib[j]).for_each(|(x, y)| *x += y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validator_examples() {
        let ok = X4CInstance {
            n: 4,
            sets: vec![vec![1, 2, 3, 4]; 3],
        };
        assert_eq!(validate_x4c(&ok), Ok(()));
        let mut short = ok.clone();
        short.sets[0] = vec![1, 2, 3];
        assert!(validate_x4c(&short)
            .unwrap_err()
            .contains(&Violation::SetSize { set: 1, size: 3 }));
        let mut twice = ok.clone();
        twice.sets[1] = vec![1, 1, 2, 3];
        let v = validate_x4c(&twice).unwrap_err();
        assert!(v.contains(&Violation::RepeatedElement { set: 2, element: 1 }));
        assert!(v.contains(&Violation::Occurrences { element: 4, count: 2 }));
    }

    #[test]
    fn construction_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (inst, cover) = planted_instance(16, &mut rng);
        assert_eq!(validate_x4c(&inst), Ok(()));
        assert_eq!(cover.len(), 4);
        let (e, layout) = build_control_instance(&inst).unwrap();
        assert_eq!(layout.t, 2);
        assert_eq!(layout.budget, 4);
        assert_eq!(e.num_alternatives(), 33);
        assert_eq!(e.num_voters(), 77);
        assert_eq!(layout.voters.len(), 77);
        assert_eq!(e.voters()[76].ranking().unwrap()[0], 0);
        assert_eq!(layout.group3_voters(&cover).len(), 4);
    }

    #[test]
    fn rejects_small_or_invalid() {
        let four = X4CInstance {
            n: 4,
            sets: vec![vec![1, 2, 3, 4]; 3],
        };
        assert_eq!(build_control_instance(&four), Err(ReductionError::TooSmall(4)));
        let bad = X4CInstance { n: 16, sets: vec![] };
        assert!(matches!(build_control_instance(&bad), Err(ReductionError::Invalid(_))));
    }

    #[test]
    fn layout_json_shape() {
        let v = serde_json::to_value([VoterGroup::One(3), VoterGroup::Four]).unwrap();
        assert_eq!(v, serde_json::json!([{"group": "1", "index": 3}, {"group": "4"}]));
    }
}
