//! Arbitrary-precision integer utilities: gcd, inverses, CRT, probable-prime
//! testing, factorization, modular square roots and the solution sets of
//! `x^2 + kx + 1 = 0 (mod b)`.

mod factor;
mod prime;
mod quadratic;
mod sqrt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{domain, Error, Result};

pub use factor::{factorize, Factorization, TRIAL_DIVISION_BOUND};
pub use prime::{is_probable_prime, is_probable_prime_with_rounds};
pub(crate) use prime::primes_below;
pub use quadratic::{
    count_quadratic_solutions, solve_quadratic_brute, solve_quadratic_by_factoring,
    solve_quadratic_prime_power, BRUTE_FORCE_LIMIT,
};
pub use sqrt::{sqrt_mod_prime_power, tonelli_shanks, MAX_RESIDUES};

#[doc(hidden)]
pub use prime::{bpsw, strong_lucas_probable_prime, strong_probable_prime};

/// Nonnegative integer of unbounded magnitude.
pub type Natural = BigUint;
/// Signed integer of unbounded magnitude.
pub type Integer = BigInt;

/// Effort limit for Pollard rho: total iterations across one factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub rho_iterations: u64,
}

impl Budget {
    pub const DEFAULT_RHO_ITERATIONS: u64 = 200_000;

    pub fn new(rho_iterations: u64) -> Self {
        Self { rho_iterations }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_RHO_ITERATIONS)
    }
}

/// The residues mod `modulus` satisfying some congruence.
///
/// `complete == false` means the set could not be determined (the modulus
/// was not fully factored); the residue list is then empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    #[serde(with = "decimal::nat")]
    modulus: BigUint,
    #[serde(with = "decimal::nat_vec")]
    residues: Vec<BigUint>,
    complete: bool,
}

impl ResidueSet {
    /// Builds a complete set; residues are reduced, sorted and deduplicated.
    pub fn new(modulus: BigUint, residues: impl IntoIterator<Item = BigUint>) -> Self {
        assert!(!modulus.is_zero(), "residue set modulus must be positive");
        let mut residues: Vec<BigUint> = residues.into_iter().map(|r| r % &modulus).collect();
        residues.sort();
        residues.dedup();
        Self {
            modulus,
            residues,
            complete: true,
        }
    }

    pub fn incomplete(modulus: BigUint) -> Self {
        Self {
            modulus,
            residues: Vec::new(),
            complete: false,
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        self.residues.binary_search(x).is_ok()
    }
}

/// Greatest common divisor; `gcd(a, 0) = a`.
pub fn gcd(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    if a.is_zero() && b.is_zero() {
        return Err(domain("gcd(0, 0) is undefined"));
    }
    Ok(a.gcd(b))
}

/// The unique `r` in `[1, m)` with `a * r = 1 (mod m)`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if *m < BigUint::from(2u32) {
        return Err(domain(format!("modulus {m} must be at least 2")));
    }
    let a = BigInt::from(a % m);
    let m_int = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            m: m.to_string(),
        });
    }
    Ok(to_natural(&ext.x.mod_floor(&m_int)))
}

/// Combines `(residue, modulus)` pairs with pairwise coprime moduli into the
/// unique `(R, M)` with `M` the product of the moduli.
pub fn crt(parts: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    let mut acc = BigUint::zero();
    let mut modulus = BigUint::one();
    for (residue, m) in parts {
        if m.is_zero() {
            return Err(domain("CRT modulus must be at least 1"));
        }
        if !modulus.gcd(m).is_one() {
            return Err(domain(format!(
                "CRT moduli are not pairwise coprime (modulus {m})"
            )));
        }
        if m.is_one() {
            continue;
        }
        let r = residue % m;
        let acc_mod = &acc % m;
        // acc + modulus * t = r (mod m)
        let diff = (&r + m - acc_mod) % m;
        let inv = mod_inverse(&(&modulus % m), m)?;
        let t = (diff * inv) % m;
        acc += &modulus * t;
        modulus *= m;
    }
    Ok((acc, modulus))
}

/// `x mod m` as a natural number, for signed `x`.
pub fn mod_floor(x: &BigInt, m: &BigUint) -> BigUint {
    let m_int = BigInt::from(m.clone());
    to_natural(&x.mod_floor(&m_int))
}

/// Converts a value known to be nonnegative.
pub(crate) fn to_natural(x: &BigInt) -> BigUint {
    debug_assert!(!x.is_negative());
    x.to_biguint().expect("value is nonnegative")
}

/// `Some(x)` for nonnegative `x`, `None` otherwise.
pub(crate) fn checked_natural(x: BigInt) -> Option<BigUint> {
    match x.sign() {
        Sign::Minus => None,
        _ => x.to_biguint(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&n(12), &n(18)).unwrap(), n(6));
        assert_eq!(gcd(&n(1), &n(987654321)).unwrap(), n(1));
        assert_eq!(gcd(&n(433), &n(29)).unwrap(), n(1));
        assert_eq!(gcd(&n(7), &n(0)).unwrap(), n(7));
        assert!(matches!(gcd(&n(0), &n(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(&n(1), &n(97)).unwrap(), n(1));
        assert_eq!(mod_inverse(&n(2), &n(5)).unwrap(), n(3));
        for m in 2..60u64 {
            assert_eq!(mod_inverse(&n(m - 1), &n(m)).unwrap(), n(m - 1));
        }
        assert!(matches!(
            mod_inverse(&n(6), &n(9)),
            Err(Error::NotInvertible { .. })
        ));
        assert!(mod_inverse(&n(1), &n(1)).is_err());
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt(&[(n(1), n(2)), (n(2), n(3))]).unwrap(), (n(5), n(6)));
        assert_eq!(crt(&[(n(0), n(1))]).unwrap(), (n(0), n(1)));
        assert_eq!(crt(&[(n(1), n(2)), (n(4), n(9))]).unwrap(), (n(13), n(18)));
        assert_eq!(crt(&[]).unwrap(), (n(0), n(1)));
        assert!(crt(&[(n(1), n(4)), (n(3), n(6))]).is_err());
    }

    #[test]
    fn residue_set_normalizes() {
        let set = ResidueSet::new(n(10), [n(13), n(3), n(7), n(27)]);
        assert_eq!(set.residues(), &[n(3), n(7)]);
        assert!(set.contains(&n(7)));
        assert!(set.is_complete());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn crt_round_trip(moduli in proptest::collection::vec(1u64..500, 1..5), seed in any::<u64>()) {
                // keep only pairwise coprime moduli
                let mut chosen: Vec<u64> = Vec::new();
                for m in moduli {
                    if chosen.iter().all(|c| num_integer::gcd(*c, m) == 1) {
                        chosen.push(m);
                    }
                }
                let parts: Vec<(BigUint, BigUint)> = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| (n(seed.rotate_left(i as u32 * 7) % m), n(m)))
                    .collect();
                let (r, m) = crt(&parts).unwrap();
                let product: BigUint = chosen.iter().map(|&m| n(m)).product();
                prop_assert_eq!(&m, &product);
                prop_assert!(r < m);
                for (res, md) in &parts {
                    prop_assert_eq!(&(&r % md), res);
                }
            }

            #[test]
            fn inverse_is_inverse(a in 1u64..10_000, m in 2u64..10_000) {
                let result = mod_inverse(&n(a), &n(m));
                if num_integer::gcd(a, m) == 1 {
                    let r = result.unwrap();
                    prop_assert!(r >= n(1) && r < n(m));
                    prop_assert_eq!((n(a) * r) % n(m), n(1) % n(m));
                } else {
                    prop_assert!(result.is_err());
                }
            }
        }
    }
}
