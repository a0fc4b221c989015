//! Constructive control by deleting voters.
//!
//! Relativized dominance `R : 2^N <-> A*A` holds at `(X, (a, b))` when `a`
//! beats `b` among the voters of `X`; relativized covering `U` refines it
//! to upward covering within `X`. A target point `p` then yields the vector
//! `cand` of voter sets within which the target wins, and `sol` keeps only
//! the maximum-cardinality members of `cand`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

pub use crate::election::Rule;
use crate::election::{build_p, Election, ElectionError};
use crate::relalg::{Carrier, RelAlgebra, Relation};

pub type Result<T> = std::result::Result<T, ElectionError>;

/// `E = syq([eps, P], eps)`, `F = syq([eps, P . [rho, pi]], eps)`,
/// `R = rel((E ∩ F . (Omega ∩ -Omega^)) . L)`.
pub fn relativized_dominance(alg: &mut RelAlgebra, p: &Relation) -> Result<Relation> {
    let n = p.source().clone();
    let aa = p.target().clone();
    let pn = Carrier::powerset(n.clone());
    let eps = alg.eps(&n)?;
    let ep = alg.pairing(&eps, p)?;
    let e = alg.syq(&ep, &eps)?;
    drop(ep);
    let ex = alg.exchange(&aa)?;
    let pex = alg.compose(p, &ex)?;
    let epx = alg.pairing(&eps, &pex)?;
    let f = alg.syq(&epx, &eps)?;
    let strict = alg.strict_size(&n)?;
    let fs = alg.compose(&f, &strict)?;
    let both = alg.inter(&e, &fs)?;
    let l = alg.universal(&pn, &Carrier::Unit)?;
    let v = alg.compose(&both, &l)?;
    Ok(alg.rel_of(&v)?)
}

/// `E = [pi . rho^, rho . rho^]^ ∩ vec(pi . pi^) . L`, `U = R ∩ -([R, -R] . E)`.
pub fn relativized_covering(alg: &mut RelAlgebra, r: &Relation) -> Result<Relation> {
    let aa = r.target().clone();
    let pi = alg.pi(&aa)?;
    let rho = alg.rho(&aa)?;
    let rho_t = alg.transpose(&rho)?;
    let pi_t = alg.transpose(&pi)?;
    let x = alg.compose(&pi, &rho_t)?;
    let y = alg.compose(&rho, &rho_t)?;
    let xy = alg.pairing(&x, &y)?;
    let xy_t = alg.transpose(&xy)?;
    let same_first = alg.compose(&pi, &pi_t)?;
    let v = alg.vec(&same_first)?;
    let l = alg.universal(&Carrier::Unit, &aa)?;
    let vl = alg.compose(&v, &l)?;
    let e = alg.inter(&xy_t, &vl)?;
    let nr = alg.complement(r)?;
    let rr = alg.pairing(r, &nr)?;
    let bad = alg.compose(&rr, &e)?;
    let nbad = alg.complement(&bad)?;
    Ok(alg.inter(r, &nbad)?)
}

/// `cand = -(-R . (pi . p ∩ -(rho . p)))`.
pub fn cand_condorcet(alg: &mut RelAlgebra, r: &Relation, p: &Relation) -> Result<Relation> {
    let aa = r.target().clone();
    let a = aa.as_product().map(|(l, _)| l.clone()).unwrap_or(Carrier::Unit);
    alg.expect_point("cand", p, &a)?;
    let pi = alg.pi(&aa)?;
    let rho = alg.rho(&aa)?;
    let first = alg.compose(&pi, p)?;
    let second = alg.compose(&rho, p)?;
    let nsecond = alg.complement(&second)?;
    let rivals = alg.inter(&first, &nsecond)?;
    let nr = alg.complement(r)?;
    let lost = alg.compose(&nr, &rivals)?;
    Ok(alg.complement(&lost)?)
}

/// `cand = -(U . (-(pi . p) ∩ rho . p))`.
pub fn cand_uncovered(alg: &mut RelAlgebra, u: &Relation, p: &Relation) -> Result<Relation> {
    let aa = u.target().clone();
    let a = aa.as_product().map(|(l, _)| l.clone()).unwrap_or(Carrier::Unit);
    alg.expect_point("cand", p, &a)?;
    let pi = alg.pi(&aa)?;
    let rho = alg.rho(&aa)?;
    let first = alg.compose(&pi, p)?;
    let nfirst = alg.complement(&first)?;
    let second = alg.compose(&rho, p)?;
    let coverers = alg.inter(&nfirst, &second)?;
    let covered = alg.compose(u, &coverers)?;
    Ok(alg.complement(&covered)?)
}

/// `sol = cand ∩ -(-Omega^ . cand)`.
pub fn maximal_solutions(alg: &mut RelAlgebra, cand: &Relation) -> Result<Relation> {
    let inner = cand
        .source()
        .as_powerset()
        .cloned()
        .ok_or_else(|| crate::relalg::RelError::WrongShape {
            op: "sol",
            carrier: cand.source().to_string(),
            expected: "powerset",
        })?;
    let omega = alg.omega(&inner)?;
    let ot = alg.transpose(&omega)?;
    let not = alg.complement(&ot)?;
    let bigger = alg.compose(&not, cand)?;
    let nb = alg.complement(&bigger)?;
    Ok(alg.inter(cand, &nb)?)
}

/// Intermediate relations of one solve.
#[derive(Clone, Debug)]
pub struct ControlArtifacts {
    pub r: Relation,
    pub u: Option<Relation>,
    pub cand: Relation,
    pub sol: Relation,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Symbolic,
    Oracle,
}

/// One optimal control action; voter indices are 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Solution {
    pub keep: Vec<usize>,
    pub delete: Vec<usize>,
}

impl Solution {
    pub fn from_keep(keep: Vec<usize>, n: usize) -> Self {
        let mut mask = vec![false; n];
        for &k in &keep {
            mask[k] = true;
        }
        let delete = (0..n).filter(|&i| !mask[i]).collect();
        Solution { keep, delete }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ControlResult {
    pub target: String,
    pub rule: Rule,
    pub feasible: bool,
    pub min_deletions: Option<usize>,
    pub num_optimal: BigUint,
    /// Optimal solutions in lexicographic order of keep-set bit vectors
    /// (voter 1 first, absent before present), at most the requested limit.
    pub solutions: Vec<Solution>,
    pub truncated: bool,
    pub backend: Backend,
}

#[derive(Serialize)]
struct SolutionJson {
    keep: Vec<usize>,
    delete: Vec<usize>,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    target: &'a str,
    rule: &'static str,
    feasible: bool,
    min_deletions: Option<usize>,
    num_optimal: String,
    solutions: Vec<SolutionJson>,
    truncated: bool,
    backend: Backend,
}

impl ControlResult {
    /// JSON rendering with 1-based voter numbers.
    pub fn to_json(&self) -> serde_json::Value {
        let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        serde_json::to_value(ResultJson {
            target: &self.target,
            rule: self.rule.as_str(),
            feasible: self.feasible,
            min_deletions: self.min_deletions,
            num_optimal: self.num_optimal.to_string(),
            solutions: self
                .solutions
                .iter()
                .map(|s| SolutionJson {
                    keep: one_based(&s.keep),
                    delete: one_based(&s.delete),
                })
                .collect(),
            truncated: self.truncated,
            backend: self.backend,
        })
        .expect("serializable")
    }
}

impl fmt::Display for ControlResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "rule: {}", self.rule)?;
        if !self.feasible {
            return writeln!(f, "feasible: no");
        }
        writeln!(f, "feasible: yes")?;
        if let Some(k) = self.min_deletions {
            writeln!(f, "minimum deletions: {k}")?;
        }
        writeln!(f, "optimal solutions: {}", self.num_optimal)?;
        let list = |v: &[usize]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
            }
        };
        for s in &self.solutions {
            writeln!(f, "  delete {}  keep {}", list(&s.delete), list(&s.keep))?;
        }
        if self.truncated {
            writeln!(f, "  ... (truncated)")?;
        }
        Ok(())
    }
}

/// Symbolic control solver for one election; caches `P`, `R` and `U`.
pub struct ControlSolver<'e> {
    election: &'e Election,
    alg: RelAlgebra,
    p: Relation,
    r: Option<Relation>,
    u: Option<Relation>,
}

impl<'e> ControlSolver<'e> {
    pub fn new(election: &'e Election) -> Result<Self> {
        let mut alg = RelAlgebra::new(election.engine_width());
        election.register_labels(&mut alg);
        let p = build_p(&mut alg, election)?;
        Ok(ControlSolver {
            election,
            alg,
            p,
            r: None,
            u: None,
        })
    }

    pub fn algebra(&mut self) -> &mut RelAlgebra {
        &mut self.alg
    }

    pub fn p(&self) -> &Relation {
        &self.p
    }

    pub fn dominance(&mut self) -> Result<Relation> {
        if let Some(r) = &self.r {
            return Ok(r.clone());
        }
        let r = relativized_dominance(&mut self.alg, &self.p)?;
        self.r = Some(r.clone());
        Ok(r)
    }

    pub fn covering(&mut self) -> Result<Relation> {
        if let Some(u) = &self.u {
            return Ok(u.clone());
        }
        let r = self.dominance()?;
        let u = relativized_covering(&mut self.alg, &r)?;
        self.u = Some(u.clone());
        Ok(u)
    }

    pub fn artifacts(&mut self, target: usize, rule: Rule) -> Result<ControlArtifacts> {
        let p = self.alg.point(&self.election.alternative_carrier(), target)?;
        let r = self.dominance()?;
        let (u, cand) = match rule {
            Rule::CondorcetWinner => (None, cand_condorcet(&mut self.alg, &r, &p)?),
            Rule::UncoveredSet => {
                let u = self.covering()?;
                let cand = cand_uncovered(&mut self.alg, &u, &p)?;
                (Some(u), cand)
            }
        };
        let sol = maximal_solutions(&mut self.alg, &cand)?;
        Ok(ControlArtifacts { r, u, cand, sol })
    }

    /// Solve for the named target, listing at most `limit` optimal solutions.
    pub fn solve(&mut self, target: &str, rule: Rule, limit: usize) -> Result<ControlResult> {
        let t = self.election.alternative_index(target)?;
        let art = self.artifacts(t, rule)?;
        let n = self.election.num_voters();
        let num_optimal = self.alg.entry_count(&art.sol)?;
        let feasible = !art.sol.is_empty();
        let mut solutions = Vec::new();
        let mut min_deletions = None;
        if feasible {
            for (mask, _) in self.alg.entries(&art.sol, limit)? {
                let keep: Vec<usize> = (0..n).filter(|&i| (mask >> i) & 1 == 1).collect();
                min_deletions = Some(n - keep.len());
                solutions.push(Solution::from_keep(keep, n));
            }
        }
        let truncated = num_optimal.to_usize().is_none_or(|c| c > solutions.len());
        Ok(ControlResult {
            target: target.to_string(),
            rule,
            feasible,
            min_deletions,
            num_optimal,
            solutions,
            truncated,
            backend: Backend::Symbolic,
        })
    }
}

/// Bit vector of a keep-set, voter 1 first.
pub fn lex_key(keep: &[usize], n: usize) -> Vec<bool> {
    let mut bits = vec![false; n];
    for &k in keep {
        bits[k] = true;
    }
    bits
}

/// One-shot symbolic solve.
pub fn solve(e: &Election, target: &str, rule: Rule, limit: usize) -> Result<ControlResult> {
    ControlSolver::new(e)?.solve(target, rule, limit)
}
