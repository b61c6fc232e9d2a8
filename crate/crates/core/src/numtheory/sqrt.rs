use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::{is_probable_prime, mod_floor, mod_inverse, ResidueSet};
use crate::error::{domain, Error, Result};

/// Largest residue set we are willing to materialize.
pub const MAX_RESIDUES: usize = 1 << 20;

/// A square root of `a` modulo the odd prime `p`, or `None` when `a` is a
/// quadratic nonresidue.
pub fn tonelli_shanks(a: &BigUint, p: &BigUint) -> Option<BigUint> {
    let a = a % p;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let one = BigUint::one();
    let p_minus_1 = p - &one;
    if *p == BigUint::from(2u32) {
        return Some(a);
    }
    if a.modpow(&(&p_minus_1 >> 1), p) != one {
        return None;
    }
    let s = p_minus_1.trailing_zeros().unwrap_or(0);
    let q = &p_minus_1 >> s;
    if s == 1 {
        return Some(a.modpow(&((p + &one) >> 2), p));
    }
    let mut z = BigUint::from(2u32);
    while z.modpow(&(&p_minus_1 >> 1), p) != p_minus_1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

/// All `x` in `[0, p^m)` with `x^2 = a (mod p^m)`.
///
/// Handles `p | a` and `p = 2`. Fails when `p` is not prime, `m` is zero, or
/// the answer would exceed [`MAX_RESIDUES`] elements.
pub fn sqrt_mod_prime_power(a: &BigInt, p: &BigUint, m: u32) -> Result<ResidueSet> {
    if m == 0 {
        return Err(domain("prime power exponent must be positive"));
    }
    if !is_probable_prime(p) {
        return Err(domain(format!("{p} is not prime")));
    }
    let modulus = p.pow(m);
    let mut a = mod_floor(a, &modulus);

    if a.is_zero() {
        // x = 0 (mod p^ceil(m/2))
        let step = p.pow(m.div_ceil(2));
        let count = p.pow(m / 2);
        check_size(&count)?;
        let count = count.to_usize().expect("checked");
        let roots = (0..count).map(|j| &step * j);
        return Ok(ResidueSet::new(modulus, roots));
    }

    let mut v = 0;
    while (&a % p).is_zero() {
        a /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return Ok(ResidueSet::new(modulus, []));
    }
    // x = p^(v/2) y with y^2 = a (mod p^(m - v)), y a unit
    let n = m - v;
    let unit_roots = sqrt_unit(&a, p, n);
    let scale = p.pow(v / 2);
    let lift = p.pow(n);
    let spread = p.pow(v / 2);
    check_size(&(&spread * unit_roots.len()))?;
    let spread = spread.to_usize().expect("checked");
    let mut roots = Vec::with_capacity(unit_roots.len() * spread);
    for y in &unit_roots {
        for t in 0..spread {
            roots.push((&scale * (y + &lift * t)) % &modulus);
        }
    }
    Ok(ResidueSet::new(modulus, roots))
}

fn check_size(count: &BigUint) -> Result<()> {
    if *count > BigUint::from(MAX_RESIDUES) {
        return Err(Error::TooManySolutions(format!(
            "{count} square roots exceed the limit of {MAX_RESIDUES}"
        )));
    }
    Ok(())
}

/// Square roots of a unit `a` modulo `p^n`.
fn sqrt_unit(a: &BigUint, p: &BigUint, n: u32) -> Vec<BigUint> {
    if p == &BigUint::from(2u32) {
        return sqrt_unit_two_adic(a, n);
    }
    let Some(mut y) = tonelli_shanks(a, p) else {
        return Vec::new();
    };
    // Hensel: y <- y - (y^2 - a) / (2y), precision doubling each step
    let target = p.pow(n);
    let mut precision = 1u32;
    while precision < n {
        precision = (precision * 2).min(n);
        let pk = p.pow(precision);
        let two_y = (&y * 2u32) % &pk;
        let inv = mod_inverse(&two_y, &pk).expect("2y is a unit for odd p");
        let y2 = (&y * &y) % &pk;
        let a_k = a % &pk;
        let excess = (y2 + &pk - a_k) % &pk;
        y = (&y + &pk - (excess * inv) % &pk) % &pk;
    }
    let other = (&target - &y) % &target;
    vec![y, other]
}

fn sqrt_unit_two_adic(a: &BigUint, n: u32) -> Vec<BigUint> {
    let modulus = BigUint::one() << n;
    let a = a % &modulus;
    if n <= 3 {
        let m = 1u32 << n;
        let a = a.to_u32().expect("small");
        return (0..m)
            .filter(|x| (x * x) % m == a)
            .map(BigUint::from)
            .collect();
    }
    if (&a % 8u32) != BigUint::one() {
        return Vec::new();
    }
    // y^2 = a (mod 2^i) for odd y; fix bit i-1 whenever 2^i fails to divide y^2 - a
    let mut y = BigUint::one();
    for i in 3..n {
        let pi = BigUint::one() << (i + 1);
        let y2 = (&y * &y) % &pi;
        if y2 != &a % &pi {
            y += BigUint::one() << (i - 1);
        }
    }
    let half = BigUint::one() << (n - 1);
    let neg = &modulus - &y;
    vec![
        y.clone(),
        neg.clone(),
        (&y + &half) % &modulus,
        (neg + &half) % &modulus,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(a: i64, p: u64, m: u32) -> Vec<u64> {
        sqrt_mod_prime_power(&BigInt::from(a), &BigUint::from(p), m)
            .unwrap()
            .residues()
            .iter()
            .map(|r| r.to_u64().unwrap())
            .collect()
    }

    fn brute(a: i64, p: u64, m: u32) -> Vec<u64> {
        let q = p.pow(m);
        let a = a.rem_euclid(q as i64) as u64;
        (0..q).filter(|x| (x * x) % q == a).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(roots(0, 5, 1), [0]);
        assert_eq!(roots(4, 7, 1), [2, 5]);
        assert_eq!(roots(2, 7, 2), [10, 39]);
        assert_eq!(roots(3, 7, 1), Vec::<u64>::new());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(sqrt_mod_prime_power(&BigInt::from(1), &BigUint::from(9u32), 1).is_err());
        assert!(sqrt_mod_prime_power(&BigInt::from(1), &BigUint::from(7u32), 0).is_err());
    }

    #[test]
    fn tonelli_on_large_prime() {
        let p: BigUint = "170141183460469231731687303715884105727".parse().unwrap();
        let x = BigUint::from(123_456_789_012_345u64);
        let a = (&x * &x) % &p;
        let r = tonelli_shanks(&a, &p).unwrap();
        assert!(r == x || r == &p - &x);
        // 2^127 - 1 = 7 (mod 8); check a prime with a large 2-power in p - 1
        let p = BigUint::from(998_244_353u64); // 119 * 2^23 + 1
        for v in [2u64, 3, 5, 1_000_000] {
            let a = BigUint::from(v * v);
            let r = tonelli_shanks(&a, &p).unwrap();
            assert_eq!((&r * &r) % &p, a % &p);
        }
    }

    #[test]
    fn matches_brute_force_exhaustively() {
        for (p, max_m) in [(2u64, 10u32), (3, 6), (5, 4), (7, 3), (11, 3), (13, 2)] {
            for m in 1..=max_m {
                let q = p.pow(m) as i64;
                for a in -3..q {
                    assert_eq!(roots(a, p, m), brute(a, p, m), "a={a} p={p} m={m}");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn agrees_with_brute_force(
                a in -1000i64..100_000,
                pi in 0usize..8,
                m in 1u32..5,
            ) {
                let p = [2u64, 3, 5, 7, 11, 13, 17, 19][pi];
                prop_assume!(p.pow(m) <= 20_000);
                prop_assert_eq!(roots(a, p, m), brute(a, p, m));
            }
        }
    }
}
