use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::prime::{is_prime_u64, primes_below};
use super::{is_probable_prime, Budget};
use crate::error::{domain, Result};

/// Trial division uses every prime below this bound.
pub const TRIAL_DIVISION_BOUND: u32 = 1 << 14;

fn trial_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(TRIAL_DIVISION_BOUND))
}

/// A (possibly partial) prime factorization.
///
/// The product of `p^e` over `factors` times `cofactor` is the factored
/// input. A cofactor other than 1 is the part the budget could not split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(BigUint, u32)>,
    cofactor: BigUint,
}

impl Factorization {
    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// The number this factorization represents.
    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Exponent of `p` (0 when absent).
    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }

    /// True when no prime appears squared. Only meaningful when complete.
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

impl Serialize for Factorization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            p: String,
            e: u32,
        }
        let entries: Vec<Entry> = self
            .factors
            .iter()
            .map(|(p, e)| Entry {
                p: p.to_string(),
                e: *e,
            })
            .collect();
        let mut st = s.serialize_struct("Factorization", 3)?;
        st.serialize_field("factors", &entries)?;
        st.serialize_field("cofactor", &self.cofactor.to_string())?;
        st.serialize_field("complete", &self.is_complete())?;
        st.end()
    }
}

/// Factors `n` by trial division below [`TRIAL_DIVISION_BOUND`], then
/// perfect-power detection and Brent's variant of Pollard rho spending at
/// most `budget.rho_iterations` iterations in total.
pub fn factorize(n: &BigUint, budget: Budget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(domain("cannot factor 0"));
    }
    let mut primes: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.clone();

    if let Some(small) = rest.to_u64() {
        let (found, left) = trial_divide_u64(small);
        for (p, e) in found {
            *primes.entry(BigUint::from(p)).or_default() += e;
        }
        rest = BigUint::from(left);
    } else {
        for &p in trial_primes() {
            if (&rest % p).is_zero() {
                let mut e = 0;
                while (&rest % p).is_zero() {
                    rest /= p;
                    e += 1;
                }
                primes.insert(BigUint::from(p), e);
            }
            if rest.is_one() {
                break;
            }
        }
    }

    let bound = BigUint::from(TRIAL_DIVISION_BOUND);
    let mut cofactor = BigUint::one();
    let mut remaining = budget.rho_iterations;
    let mut pending = vec![rest];
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if m < &bound * &bound || is_probable_prime(&m) {
            // No factor below the trial bound survives, so m < bound^2 is prime.
            *primes.entry(m).or_default() += 1;
            continue;
        }
        if let Some((root, e)) = perfect_power(&m) {
            for _ in 0..e {
                pending.push(root.clone());
            }
            continue;
        }
        match pollard_rho(&m, &mut remaining) {
            Some(d) => {
                let other = &m / &d;
                pending.push(d);
                pending.push(other);
            }
            None => cofactor *= m,
        }
    }

    Ok(Factorization {
        factors: primes.into_iter().collect(),
        cofactor,
    })
}

fn trial_divide_u64(mut n: u64) -> (Vec<(u64, u32)>, u64) {
    let mut found = Vec::new();
    for &p in trial_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            found.push((p, e));
        }
    }
    // Anything left below bound^2 has no factor under the bound and is prime.
    let bound = TRIAL_DIVISION_BOUND as u64;
    if n > 1 && n < bound * bound {
        found.push((n, 1));
        n = 1;
    }
    (found, n)
}

/// `Some((r, e))` with `e >= 2` and `r^e == m`, taking the largest such `e`.
fn perfect_power(m: &BigUint) -> Option<(BigUint, u32)> {
    // every prime factor of m exceeds the trial bound, so e <= log_bound(m)
    let max_e = (m.bits() / 14) as u32;
    for e in (2..=max_e.max(2)).rev() {
        let r = m.nth_root(e);
        if r.pow(e) == *m {
            return Some((r, e));
        }
    }
    None
}

/// A nontrivial factor of composite `m`, or `None` when the budget runs out.
fn pollard_rho(m: &BigUint, remaining: &mut u64) -> Option<BigUint> {
    if let Some(small) = m.to_u64() {
        return pollard_rho_u64(small, remaining).map(BigUint::from);
    }
    if m.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BATCH: u64 = 128;
    let mut c = BigUint::one();
    while *remaining > 0 {
        let step = |x: &BigUint| (x * x + &c) % m;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r: u64 = 1;
        'cycle: while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let span = BATCH.min(r - k);
                for _ in 0..span {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % m;
                }
                *remaining = remaining.saturating_sub(span);
                g = q.gcd(m);
                k += span;
                if *remaining == 0 && g.is_one() {
                    break 'cycle;
                }
            }
            r *= 2;
        }
        if g == *m {
            // batch overshot; replay one step at a time from ys
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(m);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *m {
            return Some(g);
        }
        c += 1u32;
    }
    None
}

fn pollard_rho_u64(m: u64, remaining: &mut u64) -> Option<u64> {
    if m.is_multiple_of(2) {
        return Some(2);
    }
    if is_prime_u64(m) {
        return None;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % m as u128) as u64;
    let mut c = 1u64;
    while *remaining > 0 {
        let step = |x: u64| (mul(x, x) + c) % m;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let (mut q, mut g, mut r) = (1u64, 1u64, 1u64);
        'cycle: while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let span = 128.min(r - k);
                for _ in 0..span {
                    y = step(y);
                    q = mul(q, x.abs_diff(y));
                }
                *remaining = remaining.saturating_sub(span);
                g = num_integer::gcd(q, m);
                k += span;
                if *remaining == 0 && g == 1 {
                    break 'cycle;
                }
            }
            r *= 2;
        }
        if g == m {
            loop {
                ys = step(ys);
                g = num_integer::gcd(x.abs_diff(ys), m);
                if g != 1 {
                    break;
                }
            }
        }
        if g != 1 && g != m {
            return Some(g);
        }
        c += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn small_examples() {
        let one = factorize(&n(1), Budget::default()).unwrap();
        assert!(one.factors().is_empty());
        assert_eq!(one.cofactor(), &n(1));
        assert_eq!(pairs(&factorize(&n(12), Budget::default()).unwrap()), [(2, 2), (3, 1)]);
        assert_eq!(pairs(&factorize(&n(18), Budget::default()).unwrap()), [(2, 1), (3, 2)]);
        assert!(factorize(&n(0), Budget::default()).is_err());
    }

    #[test]
    fn splits_large_semiprimes_and_powers() {
        let p = n(1_000_000_007);
        let q = n(998_244_353);
        let f = factorize(&(&p * &q), Budget::default()).unwrap();
        assert!(f.is_complete());
        assert_eq!(pairs(&f), [(998_244_353, 1), (1_000_000_007, 1)]);

        let big_p: BigUint = "170141183460469231731687303715884105727".parse().unwrap();
        let f = factorize(&(&big_p * &big_p * 12u32), Budget::default()).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.exponent_of(&big_p), 2);
        assert_eq!(f.exponent_of(&n(2)), 2);

        // 2^67 - 1 = 193707721 * 761838257287
        let m67 = (BigUint::one() << 67u32) - 1u32;
        let f = factorize(&m67, Budget::default()).unwrap();
        assert_eq!(pairs(&f), [(193_707_721, 1), (761_838_257_287, 1)]);
    }

    #[test]
    fn exhausted_budget_leaves_cofactor() {
        let p: BigUint = "170141183460469231731687303715884105727".parse().unwrap();
        let q: BigUint = "618970019642690137449562111".parse().unwrap();
        let f = factorize(&(&p * &q * 6u32), Budget::new(1000)).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.cofactor(), &(&p * &q));
        assert_eq!(f.value(), &p * &q * 6u32);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn product_invariant(v in 1u64..u64::MAX) {
                let f = factorize(&n(v), Budget::default()).unwrap();
                prop_assert_eq!(f.value(), n(v));
                prop_assert!(f.is_complete());
                let ps: Vec<&BigUint> = f.factors().iter().map(|(p, _)| p).collect();
                prop_assert!(ps.windows(2).all(|w| w[0] < w[1]));
                for p in ps {
                    prop_assert!(is_probable_prime(p));
                }
            }
        }
    }
}
