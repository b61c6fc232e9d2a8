//! Uniqueness verdicts for maxima of k-generalized Markov triples.
//!
//! Every verdict other than [`Verdict::Unknown`] records a theorem whose
//! hypotheses were checked by arithmetic here. Membership of `b` among the
//! k-generalized Markov numbers is the caller's side of the contract.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::address::TreeKind;
use crate::error::{domain, Error, Result};
use crate::markov_tree;
use crate::numtheory::{count_quadratic_solutions, factorize, is_probable_prime, Budget, Factorization, ResidueSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    /// `b` is 1 or `k + 2`.
    TrivialSmall,
    /// At most two solutions of `x^2 + kx + 1 = 0 (mod b)`.
    UniqueByCriterion,
    /// `b = p` or `b = 2p` for a prime `p`.
    UniqueByPrimeOr2p,
    /// `b = p^m` or `2p^m`, `p` odd, `m >= 2`, `k^2 - 4` not divisible by `p`.
    UniqueByPrimePowerCondition,
    /// `k = 2` and `b = p^m` or `2p^m`, via the squares of classical triples.
    UniqueByK2Square,
    /// At most `limit` triples have maximum `b`.
    BoundOnly(BigUint),
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::TrivialSmall => "TrivialSmall",
            Verdict::UniqueByCriterion => "UniqueByCriterion",
            Verdict::UniqueByPrimeOr2p => "UniqueByPrimeOr2p",
            Verdict::UniqueByPrimePowerCondition => "UniqueByPrimePowerCondition",
            Verdict::UniqueByK2Square => "UniqueByK2Square",
            Verdict::BoundOnly(_) => "BoundOnly",
            Verdict::Unknown => "Unknown",
        }
    }

    /// The largest number of triples with maximum `b` the verdict allows.
    pub fn guarantee(&self) -> Option<BigUint> {
        match self {
            Verdict::Unknown => None,
            Verdict::BoundOnly(limit) => Some(limit.clone()),
            _ => Some(BigUint::one()),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A verdict on `b` with the evidence that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessVerdict {
    pub k: u64,
    pub b: BigUint,
    pub verdict: Verdict,
    pub solutions: Option<ResidueSet>,
    pub factorization: Option<Factorization>,
    pub note: Option<String>,
}

impl UniquenessVerdict {
    fn new(k: u64, b: &BigUint, verdict: Verdict) -> Self {
        Self {
            k,
            b: b.clone(),
            verdict,
            solutions: None,
            factorization: None,
            note: None,
        }
    }
}

impl Serialize for UniquenessVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("k", &self.k.to_string())?;
        map.serialize_entry("b", &self.b.to_string())?;
        map.serialize_entry("verdict", self.verdict.name())?;
        if let Some(set) = &self.solutions {
            if set.is_complete() {
                let list: Vec<String> = set.residues().iter().map(|r| r.to_string()).collect();
                map.serialize_entry("solutions", &list)?;
            }
        }
        if let Some(f) = &self.factorization {
            map.serialize_entry("factorization", f)?;
        }
        if let Verdict::BoundOnly(limit) = &self.verdict {
            map.serialize_entry("bound", &limit.to_string())?;
        }
        if let Some(note) = &self.note {
            map.serialize_entry("note", note)?;
        }
        map.end()
    }
}

fn check_positive(b: &BigUint) -> Result<()> {
    if b.is_zero() {
        return Err(domain("b must be at least 1"));
    }
    Ok(())
}

fn is_trivial(k: u64, b: &BigUint) -> bool {
    b.is_one() || *b == BigUint::from(k) + 2u32
}

/// Applies the solution-count criterion.
///
/// More than two solutions gives `Unknown` even for `b = k + 2`: the
/// criterion says nothing there, and the report lists the solutions.
pub fn criterion_applies(k: u64, b: &BigUint, budget: Budget) -> Result<UniquenessVerdict> {
    check_positive(b)?;
    let mut v = UniquenessVerdict::new(k, b, Verdict::Unknown);
    let set = match count_quadratic_solutions(k, b, budget) {
        Err(Error::TooManySolutions(msg)) => {
            v.note = Some(msg);
            return Ok(v);
        }
        other => other?,
    };
    if !set.is_complete() {
        v.note = Some("factorization incomplete; solutions not counted".into());
    } else if set.len() <= 2 {
        v.verdict = if is_trivial(k, b) {
            Verdict::TrivialSmall
        } else {
            Verdict::UniqueByCriterion
        };
    }
    v.solutions = Some(set);
    Ok(v)
}

/// `b` split as `2^e * odd`, with the odd part's factorization.
struct Shape {
    two_exp: u32,
    odd: Vec<(BigUint, u32)>,
}

fn shape(f: &Factorization) -> Shape {
    let two = BigUint::from(2u32);
    Shape {
        two_exp: f.exponent_of(&two),
        odd: f.factors().iter().filter(|(p, _)| *p != two).cloned().collect(),
    }
}

/// Classifies `b` as `p`, `2p`, `p^m` or `2p^m` and applies the matching
/// theorem.
pub fn prime_shape_verdict(k: u64, b: &BigUint, budget: Budget) -> Result<UniquenessVerdict> {
    check_positive(b)?;
    if b.is_one() {
        return Ok(UniquenessVerdict::new(k, b, Verdict::TrivialSmall));
    }
    let f = factorize(b, budget)?;
    let mut v = UniquenessVerdict::new(k, b, Verdict::Unknown);
    if !f.is_complete() {
        v.note = Some("factorization incomplete".into());
        v.factorization = Some(f);
        return Ok(v);
    }
    let s = shape(&f);
    v.verdict = match (s.two_exp, s.odd.as_slice()) {
        // p, 2p with p odd, and 2 or 4 = 2 * 2
        (0, [(_, 1)]) | (1, [(_, 1)]) | (1, []) | (2, []) => Verdict::UniqueByPrimeOr2p,
        (0 | 1, [(p, m)]) if *m >= 2 => {
            let disc = BigUint::from(k) * k;
            // k^2 - 4 = 0 (mod p)  <=>  k^2 = 4 (mod p)
            if (&disc % p) != (BigUint::from(4u32) % p) {
                Verdict::UniqueByPrimePowerCondition
            } else if k == 2 {
                Verdict::UniqueByK2Square
            } else {
                Verdict::Unknown
            }
        }
        // 2^m with m >= 3: only the k = 2 square argument covers it
        (e, []) if e >= 3 && k == 2 => Verdict::UniqueByK2Square,
        _ => Verdict::Unknown,
    };
    v.factorization = Some(f);
    Ok(v)
}

fn is_squarefree(n: u64, budget: Budget) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    let f = factorize(&BigUint::from(n), budget)?;
    if !f.is_complete() {
        return Err(Error::IncompleteFactorization(n.to_string()));
    }
    Ok(f.is_squarefree())
}

/// True when `k = 2`, or `k >= 4` is even with `k/2 + 1` and `k/2 - 1`
/// squarefree, or `k` is odd with `k + 2` and `|k - 2|` squarefree.
pub fn k_universal_check(k: u64, budget: Budget) -> Result<bool> {
    if k == 2 {
        return Ok(true);
    }
    if k.is_even() {
        if k < 4 {
            return Ok(false);
        }
        let half = k / 2;
        return Ok(is_squarefree(half + 1, budget)? && is_squarefree(half - 1, budget)?);
    }
    let plus = k.checked_add(2).ok_or_else(|| domain("k too large"))?;
    Ok(is_squarefree(plus, budget)? && is_squarefree(k.abs_diff(2), budget)?)
}

/// `2^(n-1)`, where `b = p_1^a_1 ... p_n^a_n` or twice that over odd primes.
///
/// Needs `k` to pass [`k_universal_check`] or `k = 0` (the classical case),
/// a complete factorization, `4` not dividing `b`, and `n >= 1`.
pub fn bound_2_pow(k: u64, b: &BigUint, budget: Budget) -> Result<BigUint> {
    check_positive(b)?;
    if k != 0 && !k_universal_check(k, budget)? {
        return Err(Error::NotApplicable(format!("k = {k} fails the squarefree conditions")));
    }
    let f = factorize(b, budget)?;
    if !f.is_complete() {
        return Err(Error::NotApplicable(format!("{b} was not fully factored")));
    }
    let s = shape(&f);
    if s.two_exp > 1 {
        return Err(Error::NotApplicable(format!("4 divides {b}")));
    }
    if s.odd.is_empty() {
        return Err(Error::NotApplicable(format!("{b} has no odd prime factor")));
    }
    Ok(BigUint::one() << (s.odd.len() - 1))
}

/// The strongest verdict available: prime shapes, then the criterion,
/// then the `2^(n-1)` bound.
pub fn best_verdict(k: u64, b: &BigUint, budget: Budget) -> Result<UniquenessVerdict> {
    let shaped = prime_shape_verdict(k, b, budget)?;
    if shaped.verdict != Verdict::Unknown {
        return Ok(shaped);
    }
    let mut counted = criterion_applies(k, b, budget)?;
    if counted.verdict == Verdict::Unknown {
        if let Ok(limit) = bound_2_pow(k, b, budget) {
            counted.verdict = Verdict::BoundOnly(limit);
        }
    }
    counted.factorization = shaped.factorization;
    Ok(counted)
}

/// Maxima up to this many bits get a full verdict in empirical scans;
/// larger ones only when prime or twice a prime.
pub const VERDICT_BITS: u64 = 64;

/// Result of scanning LMT(k) for repeated maxima.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalReport {
    pub k: u64,
    pub depth: usize,
    pub vertices: u64,
    pub distinct_maxima: u64,
    /// Maxima shared by distinct unordered triples.
    pub duplicate_maxima: Vec<String>,
    /// `m_t` values shared by distinct fractions.
    pub duplicate_labels: Vec<String>,
    /// Verdict name to number of distinct maxima with that verdict.
    pub verdicts: BTreeMap<String, u64>,
    /// Maxima too large to classify without a prime shortcut.
    pub unclassified: u64,
    /// Maxima whose triple count exceeds their verdict's guarantee.
    pub violations: Vec<String>,
}

impl EmpiricalReport {
    pub fn passed(&self) -> bool {
        self.duplicate_maxima.is_empty()
            && self.duplicate_labels.is_empty()
            && self.violations.is_empty()
    }
}

fn scan_verdict(k: u64, b: &BigUint, budget: Budget) -> Result<Option<Verdict>> {
    if is_probable_prime(b) {
        return Ok(Some(Verdict::UniqueByPrimeOr2p));
    }
    if b.is_even() && is_probable_prime(&(b >> 1u32)) {
        return Ok(Some(Verdict::UniqueByPrimeOr2p));
    }
    if b.bits() <= VERDICT_BITS {
        return Ok(Some(best_verdict(k, b, budget)?.verdict));
    }
    Ok(None)
}

/// Groups the vertices of LMT(k) to `depth` by maximum and reports any
/// maximum reached by two distinct triples or two distinct fractions.
pub fn uniqueness_empirical(k: u64, depth: usize, budget: Budget) -> Result<EmpiricalReport> {
    let mut by_max: HashMap<BigUint, Vec<[BigUint; 3]>> = HashMap::new();
    let mut labels: HashMap<BigUint, u64> = HashMap::new();
    let mut vertices = 0;
    for t in markov_tree::enumerate_levels(k, depth, TreeKind::Left).into_iter().flatten() {
        vertices += 1;
        *labels.entry(t.b().clone()).or_default() += 1;
        let entry = by_max.entry(t.max().clone()).or_default();
        let form = t.unordered();
        if !entry.contains(&form) {
            entry.push(form);
        }
    }

    let mut maxima: Vec<&BigUint> = by_max.keys().collect();
    maxima.sort();
    let mut report = EmpiricalReport {
        k,
        depth,
        vertices,
        distinct_maxima: maxima.len() as u64,
        duplicate_maxima: Vec::new(),
        duplicate_labels: Vec::new(),
        verdicts: BTreeMap::new(),
        unclassified: 0,
        violations: Vec::new(),
    };
    for b in maxima {
        let count = by_max[b].len();
        if count > 1 {
            report.duplicate_maxima.push(b.to_string());
        }
        if labels.get(b).copied().unwrap_or(0) > 1 {
            report.duplicate_labels.push(b.to_string());
        }
        match scan_verdict(k, b, budget)? {
            None => report.unclassified += 1,
            Some(verdict) => {
                if let Some(cap) = verdict.guarantee() {
                    if BigUint::from(count) > cap {
                        report.violations.push(format!("{b}: {count} triples under {verdict}"));
                    }
                }
                *report.verdicts.entry(verdict.name().to_string()).or_default() += 1;
            }
        }
    }
    Ok(report)
}
