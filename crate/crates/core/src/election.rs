//! Elections, the individual-preference relation and Condorcet dominance.
//!
//! Election file format (UTF-8, `#` starts a comment, blank lines ignored):
//!
//! ```text
//! alternatives: a b c d
//! 3: a c b d        # three voters with this ranking, best first
//! b a d c           # one voter
//! ```
//!
//! Voters are numbered in expansion order. In permissive mode a ballot may
//! leave alternatives out and group incomparable alternatives in
//! parentheses, e.g. `a (b c) d`; unlisted alternatives are incomparable to
//! everything.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::relalg::{Carrier, RelAlgebra, RelError, Relation};

/// Winning condition of the control problem.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    CondorcetWinner,
    UncoveredSet,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::CondorcetWinner => "condorcet",
            Rule::UncoveredSet => "uncovered",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "condorcet" => Ok(Rule::CondorcetWinner),
            "uncovered" => Ok(Rule::UncoveredSet),
            other => Err(format!("unknown rule `{other}` (expected `condorcet` or `uncovered`)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElectionError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("unknown voter {0}")]
    UnknownVoter(usize),
    #[error(transparent)]
    Relation(#[from] RelError),
}

pub type Result<T> = std::result::Result<T, ElectionError>;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ParseMode {
    /// Every ballot is a full ranking.
    #[default]
    Strict,
    /// Ballots may be any strict weak order on a subset of the alternatives.
    Permissive,
}

/// One voter's preferences as ranked tiers, best first.
///
/// Alternatives in the same tier, and alternatives not listed at all, are
/// incomparable. A linear order has only singleton tiers covering every
/// alternative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VoterOrder {
    tiers: Vec<Vec<usize>>,
    rank: Vec<Option<usize>>,
}

impl VoterOrder {
    /// A full ranking (best first) over `0..ranking.len()`.
    pub fn linear(ranking: &[usize]) -> Self {
        Self::from_tiers(ranking.iter().map(|&a| vec![a]).collect(), ranking.len())
    }

    pub fn from_tiers(tiers: Vec<Vec<usize>>, alternatives: usize) -> Self {
        let mut rank = vec![None; alternatives];
        for (t, tier) in tiers.iter().enumerate() {
            for &a in tier {
                rank[a] = Some(t);
            }
        }
        VoterOrder { tiers, rank }
    }

    /// Whether `a` is strictly preferred to `b`.
    #[inline]
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        matches!((self.rank[a], self.rank[b]), (Some(x), Some(y)) if x < y)
    }

    pub fn tiers(&self) -> &[Vec<usize>] {
        &self.tiers
    }

    pub fn is_linear(&self) -> bool {
        self.tiers.iter().all(|t| t.len() == 1) && self.rank.iter().all(Option::is_some)
    }

    /// The ranking, best first, when the order is linear.
    pub fn ranking(&self) -> Option<Vec<usize>> {
        self.is_linear().then(|| self.tiers.iter().map(|t| t[0]).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Election {
    alternatives: Vec<String>,
    voters: Vec<VoterOrder>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_err(line: usize, message: impl Into<String>) -> ElectionError {
    ElectionError::Parse {
        line,
        message: message.into(),
    }
}

impl Election {
    pub fn new(alternatives: Vec<String>, voters: Vec<VoterOrder>) -> Self {
        Election {
            alternatives,
            voters,
        }
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn voters(&self) -> &[VoterOrder] {
        &self.voters
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn num_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn alternative_index(&self, name: &str) -> Result<usize> {
        self.alternatives
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| ElectionError::UnknownAlternative(name.to_string()))
    }

    /// Carrier `N` of voters.
    pub fn voter_carrier(&self) -> Carrier {
        Carrier::base("N", self.voters.len())
    }

    /// Carrier `A` of alternatives.
    pub fn alternative_carrier(&self) -> Carrier {
        Carrier::base("A", self.alternatives.len())
    }

    /// Carrier `A*A` of ordered pairs of alternatives.
    pub fn pair_carrier(&self) -> Carrier {
        let a = self.alternative_carrier();
        Carrier::product(a.clone(), a)
    }

    /// Engine block width sufficient for every relation of the control pipeline.
    pub fn engine_width(&self) -> u32 {
        let n = self.voters.len() as u32;
        let wa = self.alternative_carrier().width();
        let wn = self.voter_carrier().width();
        (n + 2 * wa).max(4 * wa).max(wn + 2 * wa).max(1)
    }

    /// Register element names of `N` (1-based voter numbers) and `A`.
    pub fn register_labels(&self, alg: &mut RelAlgebra) {
        alg.set_labels("A", self.alternatives.clone());
        alg.set_labels("N", (1..=self.voters.len()).map(|i| i.to_string()).collect());
    }

    pub fn parse(text: &str) -> Result<Election> {
        Self::parse_with(text, ParseMode::Strict)
    }

    pub fn parse_with(text: &str, mode: ParseMode) -> Result<Election> {
        let mut alternatives: Option<Vec<String>> = None;
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut voters = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(alts) = &alternatives else {
                let rest = line
                    .strip_prefix("alternatives:")
                    .ok_or_else(|| parse_err(lineno, "expected `alternatives: <name> ...`"))?;
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(parse_err(lineno, "empty alternative list"));
                }
                for (i, n) in names.iter().enumerate() {
                    if !valid_name(n) {
                        return Err(parse_err(lineno, format!("invalid alternative name `{n}`")));
                    }
                    if index.insert(n.clone(), i).is_some() {
                        return Err(parse_err(lineno, format!("duplicate alternative `{n}`")));
                    }
                }
                alternatives = Some(names);
                continue;
            };
            let (count, ballot) = match line.split_once(':') {
                Some((c, rest)) => {
                    let c: i64 = c
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("invalid voter count `{}`", c.trim())))?;
                    if c < 1 {
                        return Err(parse_err(lineno, format!("voter count {c} is less than 1")));
                    }
                    (c as usize, rest)
                }
                None => (1, line),
            };
            let order = parse_ballot(ballot, &index, alts.len(), mode).map_err(|m| parse_err(lineno, m))?;
            voters.extend(std::iter::repeat_n(order, count));
        }
        let alternatives = alternatives.ok_or_else(|| parse_err(0, "missing `alternatives:` line"))?;
        Ok(Election {
            alternatives,
            voters,
        })
    }

    /// Render in the election file format, merging consecutive equal ballots.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("alternatives: {}\n", self.alternatives.join(" "));
        let mut i = 0;
        while i < self.voters.len() {
            let mut j = i + 1;
            while j < self.voters.len() && self.voters[j] == self.voters[i] {
                j += 1;
            }
            let ballot = self.format_ballot(&self.voters[i]);
            if j - i > 1 {
                let _ = writeln!(out, "{}: {}", j - i, ballot);
            } else {
                let _ = writeln!(out, "{ballot}");
            }
            i = j;
        }
        out
    }

    fn format_ballot(&self, v: &VoterOrder) -> String {
        v.tiers
            .iter()
            .map(|t| {
                let names: Vec<&str> = t.iter().map(|&a| self.alternatives[a].as_str()).collect();
                if names.len() == 1 {
                    names[0].to_string()
                } else {
                    format!("({})", names.join(" "))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn check_voters(&self, voters: &[usize]) -> Result<()> {
        match voters.iter().find(|&&v| v >= self.voters.len()) {
            Some(&v) => Err(ElectionError::UnknownVoter(v + 1)),
            None => Ok(()),
        }
    }

    /// Pairwise margins `#(a over b) - #(b over a)` among the voters with `keep[i]`.
    pub fn margins_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<i64>> {
        let m = self.alternatives.len();
        let mut margins = vec![vec![0i64; m]; m];
        for (i, v) in self.voters.iter().enumerate() {
            if !keep(i) {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    if v.prefers(a, b) {
                        margins[a][b] += 1;
                        margins[b][a] -= 1;
                    }
                }
            }
        }
        margins
    }

    pub fn margins(&self) -> Vec<Vec<i64>> {
        self.margins_where(|_| true)
    }
}

fn parse_ballot(
    text: &str,
    index: &HashMap<String, usize>,
    m: usize,
    mode: ParseMode,
) -> std::result::Result<VoterOrder, String> {
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| format!("unknown alternative `{name}`"))
    };
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    let spaced = text.replace('(', " ( ").replace(')', " ) ");
    let mut group: Option<Vec<usize>> = None;
    for tok in spaced.split_whitespace() {
        match (tok, &mut group, mode) {
            ("(" | ")", _, ParseMode::Strict) => return Err("ties are only accepted in permissive mode".into()),
            ("(", Some(_), _) => return Err("nested parentheses".into()),
            ("(", None, _) => group = Some(Vec::new()),
            (")", None, _) => return Err("unbalanced `)`".into()),
            (")", Some(_), _) => {
                let g = group.take().unwrap_or_default();
                if g.is_empty() {
                    return Err("empty group".into());
                }
                tiers.push(g);
            }
            (name, Some(g), _) => g.push(lookup(name)?),
            (name, None, _) => tiers.push(vec![lookup(name)?]),
        }
    }
    if group.is_some() {
        return Err("unbalanced `(`".into());
    }
    let mut seen = vec![false; m];
    for &a in tiers.iter().flatten() {
        if std::mem::replace(&mut seen[a], true) {
            return Err("ranking is not a permutation: an alternative occurs twice".into());
        }
    }
    if mode == ParseMode::Strict && seen.iter().any(|s| !s) {
        return Err("ranking is not a permutation: an alternative is missing".into());
    }
    if tiers.is_empty() {
        return Err("empty ballot".into());
    }
    Ok(VoterOrder::from_tiers(tiers, m))
}

/// The preference relation `P : N <-> A*A` with `P_{i,(a,b)}` iff voter `i` ranks `a` above `b`.
pub fn build_p(alg: &mut RelAlgebra, e: &Election) -> Result<Relation> {
    let m = e.num_alternatives();
    let pairs: Vec<(usize, usize)> = e
        .voters
        .iter()
        .enumerate()
        .flat_map(|(i, v)| {
            (0..m).flat_map(move |a| (0..m).filter(move |&b| v.prefers(a, b)).map(move |b| (i, a * m + b)))
        })
        .collect();
    Ok(alg.from_pairs(&e.voter_carrier(), &e.pair_carrier(), pairs)?)
}

/// Dominance `C : A <-> A` from the preference relation, via
/// `E = syq(P, eps)`, `F = syq(P . [rho, pi], eps)` and
/// `C = rel((E ∩ F . (Omega ∩ -Omega^)) . L)`.
pub fn dominance(alg: &mut RelAlgebra, p: &Relation) -> Result<Relation> {
    let n = p.source().clone();
    let aa = p.target().clone();
    let eps = alg.eps(&n)?;
    let e = alg.syq(p, &eps)?;
    let ex = alg.exchange(&aa)?;
    let pex = alg.compose(p, &ex)?;
    let f = alg.syq(&pex, &eps)?;
    let strict = alg.strict_size(&n)?;
    let fs = alg.compose(&f, &strict)?;
    let both = alg.inter(&e, &fs)?;
    let l = alg.universal(&Carrier::powerset(n), &Carrier::Unit)?;
    let v = alg.compose(&both, &l)?;
    Ok(alg.rel_of(&v)?)
}

/// Dominance relation together with the counted margins.
#[derive(Clone, Debug)]
pub struct DominanceView {
    pub c: Relation,
    pub margins: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct DominanceJson<'a> {
    winner: Option<&'a str>,
    dominance: Vec<Vec<bool>>,
    margins: &'a [Vec<i64>],
}

impl DominanceView {
    pub fn compute(alg: &mut RelAlgebra, e: &Election) -> Result<DominanceView> {
        let p = build_p(alg, e)?;
        let c = dominance(alg, &p)?;
        Ok(DominanceView {
            c,
            margins: e.margins(),
        })
    }

    pub fn matrix(&self, alg: &RelAlgebra) -> Result<Vec<Vec<bool>>> {
        let d = alg.to_dense(&self.c)?;
        Ok((0..d.rows()).map(|i| (0..d.cols()).map(|j| d.get(i, j)).collect()).collect())
    }

    /// `{"winner": name|null, "dominance": [[bool]], "margins": [[int]]}`
    pub fn to_json(&self, alg: &mut RelAlgebra, e: &Election) -> Result<serde_json::Value> {
        let winner = condorcet_winners(alg, &self.c)?
            .first()
            .map(|&w| e.alternatives[w].as_str());
        let dominance = self.matrix(alg)?;
        Ok(serde_json::to_value(DominanceJson {
            winner,
            dominance,
            margins: &self.margins,
        })
        .expect("serializable"))
    }
}

/// Alternatives dominating every other alternative.
pub fn condorcet_winners(alg: &mut RelAlgebra, c: &Relation) -> Result<Vec<usize>> {
    let a = c.source().clone();
    let i = alg.identity(&a)?;
    let ni = alg.complement(&i)?;
    let nc = alg.complement(c)?;
    let missing = alg.inter(&nc, &ni)?;
    let l = alg.universal(&a, &Carrier::Unit)?;
    let lost = alg.compose(&missing, &l)?;
    let w = alg.complement(&lost)?;
    Ok(alg.vector_members(&w)?)
}

/// Upward covering `G = C ∩ -(C^ . -C)`.
pub fn covering(alg: &mut RelAlgebra, c: &Relation) -> Result<Relation> {
    let ct = alg.transpose(c)?;
    let nc = alg.complement(c)?;
    let k = alg.compose(&ct, &nc)?;
    let nk = alg.complement(&k)?;
    Ok(alg.inter(c, &nk)?)
}

/// Alternatives not covered by any other alternative.
pub fn uncovered(alg: &mut RelAlgebra, g: &Relation) -> Result<Vec<usize>> {
    let a = g.source().clone();
    let i = alg.identity(&a)?;
    let ni = alg.complement(&i)?;
    let gt = alg.transpose(g)?;
    let gt = alg.inter(&gt, &ni)?;
    let l = alg.universal(&a, &Carrier::Unit)?;
    let covered = alg.compose(&gt, &l)?;
    let free = alg.complement(&covered)?;
    Ok(alg.vector_members(&free)?)
}

/// Dominance bits from margins.
pub fn dominance_from_margins(margins: &[Vec<i64>]) -> Vec<Vec<bool>> {
    margins.iter().map(|row| row.iter().map(|&m| m > 0).collect()).collect()
}

/// Covering bits: `a` covers `b` iff `a` dominates `b` and everything dominating `a` dominates `b`.
pub fn covering_from_dominance(dom: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let m = dom.len();
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| dom[a][b] && (0..m).all(|c| !dom[c][a] || dom[c][b]))
                .collect()
        })
        .collect()
}

pub fn uncovered_from_covering(cov: &[Vec<bool>]) -> Vec<usize> {
    let m = cov.len();
    (0..m).filter(|&a| (0..m).all(|b| b == a || !cov[b][a])).collect()
}

/// Whether `target` wins under `rule` once the voters in `delete` (0-based) are removed.
pub fn verify_deletion(e: &Election, delete: &[usize], target: usize, rule: Rule) -> Result<bool> {
    e.check_voters(delete)?;
    if target >= e.num_alternatives() {
        return Err(ElectionError::UnknownAlternative(format!("#{target}")));
    }
    let mut keep = vec![true; e.num_voters()];
    for &d in delete {
        keep[d] = false;
    }
    let margins = e.margins_where(|i| keep[i]);
    let dom = dominance_from_margins(&margins);
    Ok(match rule {
        Rule::CondorcetWinner => (0..e.num_alternatives()).all(|b| b == target || dom[target][b]),
        Rule::UncoveredSet => uncovered_from_covering(&covering_from_dominance(&dom)).contains(&target),
    })
}

/// The election restricted to the voters with the given (0-based) indices.
pub fn sub_election(e: &Election, keep: &[usize]) -> Result<Election> {
    e.check_voters(keep)?;
    Ok(Election {
        alternatives: e.alternatives.clone(),
        voters: keep.iter().map(|&i| e.voters[i].clone()).collect(),
    })
}
