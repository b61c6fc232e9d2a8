//! Probable-prime testing.
//!
//! Below 2^64 the answer is exact: Miller-Rabin with the first twelve prime
//! bases is deterministic there. Above 2^64 we run Baillie-PSW (a strong
//! base-2 test plus a strong Lucas test with Selfridge parameters), which has
//! no known counterexample.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primes below this bound are used to reject composites before any modpow.
const PRETEST_BOUND: u32 = 1000;

pub(crate) fn primes_below(bound: u32) -> Vec<u32> {
    let bound = bound as usize;
    if bound < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; bound];
    let mut primes = Vec::new();
    for i in 2..bound {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn pretest_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(PRETEST_BOUND))
}

/// True iff `n` is a probable prime (exact for `n < 2^64`).
pub fn is_probable_prime(n: &BigUint) -> bool {
    is_probable_prime_with_rounds(n, 0)
}

/// As [`is_probable_prime`], with `extra_rounds` additional strong
/// Miller-Rabin rounds (bases 3, 5, 7, ...) above 2^64.
pub fn is_probable_prime_with_rounds(n: &BigUint, extra_rounds: u32) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in pretest_primes() {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !bpsw(n) {
        return false;
    }
    pretest_primes()
        .iter()
        .skip(1)
        .take(extra_rounds as usize)
        .all(|&base| strong_probable_prime(n, &BigUint::from(base)))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &DETERMINISTIC_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Baillie-PSW on an odd `n > 2` with no tiny factors.
pub fn bpsw(n: &BigUint) -> bool {
    strong_probable_prime(n, &BigUint::from(2u32)) && strong_lucas_probable_prime(n)
}

/// Strong Fermat test to `base` for odd `n > 2`.
pub fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = (base % n).modpow(&d, n);
    if x.is_zero() {
        return false;
    }
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub(crate) fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    debug_assert!(n.is_odd());
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().expect("reduced");
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        a >>= twos;
        let n_mod_8 = (&n % 8u32).to_u32().expect("small");
        if twos % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_even() {
        x >> 1
    } else {
        (x + n) >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameters
/// (`P = 1`, `Q = (1 - D) / 4`, `D` the first of 5, -7, 9, -11, ... with
/// Jacobi symbol -1). `n` must be odd and greater than 2.
pub fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d_abs: i64 = 5;
    let mut positive = true;
    let d = loop {
        let d = BigInt::from(if positive { d_abs } else { -d_abs });
        match jacobi(&d, n) {
            -1 => break d,
            0
                // gcd(D, n) > 1; composite unless n itself divides D.
                if BigUint::from(d_abs as u64) != *n => {
                    return false;
                }
            _ => {}
        }
        d_abs += 2;
        positive = !positive;
    };
    let n_int = BigInt::from(n.clone());
    let to_mod = |x: &BigInt| x.mod_floor(&n_int).to_biguint().expect("reduced");
    let q_int: BigInt = (BigInt::one() - &d) / 4;
    let q = to_mod(&q_int);
    let d_mod = to_mod(&d);
    let two = BigUint::from(2u32);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let odd_part = &n_plus_1 >> s;

    // Walk the bits of odd_part from the top, holding U_j, V_j, Q^j with P = 1.
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q.clone();
    let bits = odd_part.bits();
    for i in (0..bits - 1).rev() {
        // doubling: U_2j = U_j V_j, V_2j = V_j^2 - 2 Q^j
        u = (&u * &v) % n;
        v = (&v * &v + n * &two - (&two * &qk) % n) % n;
        qk = (&qk * &qk) % n;
        if odd_part.bit(i) {
            // increment: U_{j+1} = (U + V) / 2, V_{j+1} = (D U + V) / 2
            let new_u = half_mod((&u + &v) % n, n);
            let new_v = half_mod((&d_mod * &u + &v) % n, n);
            u = new_u;
            v = new_v;
            qk = (&qk * &q) % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * &two - (&two * &qk) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk) % n;
    }
    false
}
