//! Solution sets of `x^2 + kx + 1 = 0 (mod b)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::{crt, factorize, mod_floor, sqrt_mod_prime_power, Budget, ResidueSet, MAX_RESIDUES};
use crate::error::{domain, Error, Result};

/// Moduli up to this size are solved by direct enumeration.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// All `x` in `[0, b)` with `x^2 + kx + 1 = 0 (mod b)`.
///
/// Enumerates directly when `b <= BRUTE_FORCE_LIMIT`, otherwise factors `b`
/// and combines the prime-power solutions. If the factorization is cut short
/// by the budget the result is marked incomplete.
pub fn count_quadratic_solutions(k: u64, b: &BigUint, budget: Budget) -> Result<ResidueSet> {
    if b.is_zero() {
        return Err(domain("modulus must be at least 1"));
    }
    match b.to_u64() {
        Some(small) if small <= BRUTE_FORCE_LIMIT => Ok(solve_quadratic_brute(k, small)),
        _ => solve_quadratic_by_factoring(k, b, budget),
    }
}

/// Direct enumeration over `[0, b)`; `b` must be positive.
pub fn solve_quadratic_brute(k: u64, b: u64) -> ResidueSet {
    assert!(b > 0, "modulus must be positive");
    let b128 = b as u128;
    let k = k as u128 % b128;
    // f(x + 1) = f(x) + 2x + 1 + k
    let mut f = 1 % b128;
    let mut roots = Vec::new();
    for x in 0..b128 {
        if f == 0 {
            roots.push(BigUint::from(x as u64));
        }
        f = (f + 2 * x + 1 + k) % b128;
    }
    ResidueSet::new(BigUint::from(b), roots)
}

/// Solves through the factorization of `b` and the Chinese remainder theorem.
pub fn solve_quadratic_by_factoring(k: u64, b: &BigUint, budget: Budget) -> Result<ResidueSet> {
    if b.is_zero() {
        return Err(domain("modulus must be at least 1"));
    }
    let factorization = factorize(b, budget)?;
    if !factorization.is_complete() {
        return Ok(ResidueSet::incomplete(b.clone()));
    }
    let mut combined: Vec<BigUint> = vec![BigUint::zero()];
    let mut modulus = BigUint::one();
    for (p, e) in factorization.factors() {
        let local = solve_quadratic_prime_power(k, p, *e)?;
        if local.is_empty() {
            return Ok(ResidueSet::new(b.clone(), []));
        }
        if combined.len() * local.len() > MAX_RESIDUES {
            return Err(Error::TooManySolutions(format!(
                "more than {MAX_RESIDUES} solutions modulo {b}"
            )));
        }
        let mut next = Vec::with_capacity(combined.len() * local.len());
        for r in &combined {
            for s in local.residues() {
                let (x, _) = crt(&[(r.clone(), modulus.clone()), (s.clone(), local.modulus().clone())])?;
                next.push(x);
            }
        }
        modulus *= local.modulus();
        combined = next;
    }
    Ok(ResidueSet::new(b.clone(), combined))
}

/// Solutions modulo `p^m` for a prime `p`.
///
/// For odd `p` this completes the square: `(2x + k)^2 = k^2 - 4`. For
/// `p = 2` there are no solutions when `k` is odd; for even `k = 2j` the
/// substitution `r = x + j` gives `r^2 = j^2 - 1 (mod 2^m)`.
pub fn solve_quadratic_prime_power(k: u64, p: &BigUint, m: u32) -> Result<ResidueSet> {
    let modulus = p.pow(m);
    let k_big = BigInt::from(k);
    if p == &BigUint::from(2u32) {
        if k % 2 == 1 {
            return Ok(ResidueSet::new(modulus, []));
        }
        let j = BigInt::from(k / 2);
        let roots = sqrt_mod_prime_power(&(&j * &j - 1), p, m)?;
        let xs: Vec<BigUint> = roots
            .residues()
            .iter()
            .map(|r| mod_floor(&(BigInt::from(r.clone()) - &j), &modulus))
            .collect();
        return Ok(ResidueSet::new(modulus, xs));
    }
    let disc = &k_big * &k_big - 4;
    let roots = sqrt_mod_prime_power(&disc, p, m)?;
    let half = BigInt::from((&modulus + 1u32) >> 1);
    let xs: Vec<BigUint> = roots
        .residues()
        .iter()
        .map(|r| mod_floor(&((BigInt::from(r.clone()) - &k_big) * &half), &modulus))
        .collect();
    Ok(ResidueSet::new(modulus, xs))
}
