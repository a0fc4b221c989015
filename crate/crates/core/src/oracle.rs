//! Brute-force reference solver.
//!
//! Works on plain rankings and subset bitmasks only: for each candidate set
//! of allowed voters the pairwise margins are recounted from scratch.

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::control::{lex_key, Backend, ControlResult, Solution};
use crate::election::{Election, ElectionError, Rule};

/// Environment variable overriding [`OracleConfig::max_n`].
pub const CAP_ENV: &str = "RELCTL_ORACLE_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest number of voters accepted.
    pub max_n: usize,
    /// Number of work chunks per cardinality level; 1 runs sequentially.
    pub parallel_chunks: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: 20,
            parallel_chunks: rayon::current_num_threads().max(1),
        }
    }
}

impl OracleConfig {
    /// Defaults, with `max_n` taken from `RELCTL_ORACLE_CAP` when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(cap) = std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            cfg.max_n = cap;
        }
        cfg
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("election has {n} voters, above the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error(transparent)]
    Election(#[from] ElectionError),
}

/// Margins and dominance bits of a restricted election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleDominance {
    pub margins: Vec<Vec<i64>>,
    pub dominance: Vec<Vec<bool>>,
}

/// Position of each alternative in each voter's order (`None` if unranked),
/// with tied alternatives sharing a position.
fn positions(e: &Election) -> Vec<Vec<Option<usize>>> {
    let m = e.num_alternatives();
    e.voters()
        .iter()
        .map(|v| {
            let mut pos = vec![None; m];
            for (t, tier) in v.tiers().iter().enumerate() {
                for &a in tier {
                    pos[a] = Some(t);
                }
            }
            pos
        })
        .collect()
}

fn dominance_with(pos: &[Vec<Option<usize>>], m: usize, keep: impl Fn(usize) -> bool) -> OracleDominance {
    let mut margins = vec![vec![0i64; m]; m];
    for (i, p) in pos.iter().enumerate() {
        if !keep(i) {
            continue;
        }
        for a in 0..m {
            for b in 0..m {
                if let (Some(x), Some(y)) = (p[a], p[b]) {
                    if x < y {
                        margins[a][b] += 1;
                    } else if y < x {
                        margins[a][b] -= 1;
                    }
                }
            }
        }
    }
    let dominance = margins.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    OracleDominance { margins, dominance }
}

fn wins(d: &OracleDominance, target: usize, rule: Rule) -> bool {
    let m = d.dominance.len();
    let dom = &d.dominance;
    match rule {
        Rule::CondorcetWinner => (0..m).filter(|&b| b != target).all(|b| dom[target][b]),
        Rule::UncoveredSet => !(0..m).any(|b| {
            b != target && dom[b][target] && (0..m).all(|c| !dom[c][b] || dom[c][target])
        }),
    }
}

/// Direct counting restricted to the voters with `keep[i]`.
pub fn oracle_dominance_on(e: &Election, keep: &[bool]) -> OracleDominance {
    dominance_with(&positions(e), e.num_alternatives(), |i| keep[i])
}

/// Whether `target` wins under `rule` among the voters with `keep[i]`.
pub fn oracle_winner_check(e: &Election, keep: &[bool], target: usize, rule: Rule) -> bool {
    wins(&oracle_dominance_on(e, keep), target, rule)
}

/// All `k`-subsets of `0..n` as bitmasks.
fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |acc, &i| acc | (1 << i)));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact control answer by scanning voter sets from the largest cardinality down.
pub fn oracle_solve(
    e: &Election,
    target: &str,
    rule: Rule,
    limit: usize,
    cfg: &OracleConfig,
) -> Result<ControlResult, OracleError> {
    let n = e.num_voters();
    if n > cfg.max_n || n >= 64 {
        return Err(OracleError::CapExceeded { n, cap: cfg.max_n });
    }
    let t = e.alternative_index(target)?;
    let m = e.num_alternatives();
    let pos = positions(e);
    let check = |mask: &u64| wins(&dominance_with(&pos, m, |i| (mask >> i) & 1 == 1), t, rule);
    for k in (0..=n).rev() {
        let masks = subsets_of_size(n, k);
        let mut found: Vec<u64> = if cfg.parallel_chunks > 1 {
            let chunk = masks.len().div_ceil(cfg.parallel_chunks).max(1);
            masks
                .par_chunks(chunk)
                .flat_map_iter(|c| c.iter().copied().filter(|m| check(m)).collect::<Vec<_>>())
                .collect()
        } else {
            masks.into_iter().filter(|m| check(m)).collect()
        };
        if found.is_empty() {
            continue;
        }
        let to_keep = |mask: u64| (0..n).filter(|&i| (mask >> i) & 1 == 1).collect::<Vec<_>>();
        found.sort_by_cached_key(|&mask| lex_key(&to_keep(mask), n));
        let num_optimal = BigUint::from(found.len());
        let truncated = found.len() > limit;
        let solutions = found
            .into_iter()
            .take(limit)
            .map(|mask| Solution::from_keep(to_keep(mask), n))
            .collect();
        return Ok(ControlResult {
            target: target.to_string(),
            rule,
            feasible: true,
            min_deletions: Some(n - k),
            num_optimal,
            solutions,
            truncated,
            backend: Backend::Oracle,
        });
    }
    Ok(ControlResult {
        target: target.to_string(),
        rule,
        feasible: false,
        min_deletions: None,
        num_optimal: BigUint::from(0u8),
        solutions: Vec::new(),
        truncated: false,
        backend: Backend::Oracle,
    })
}
