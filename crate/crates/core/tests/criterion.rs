use gmarkov_core::criterion::{
    best_verdict, bound_2_pow, criterion_applies, k_universal_check, prime_shape_verdict, uniqueness_empirical, Verdict,
};
use gmarkov_core::numtheory::Budget;
use num_bigint::BigUint;
use proptest::prelude::*;

fn naive_count(k: u64, b: u64) -> u64 {
    (0..b).filter(|&x| (x * x + k * x + 1).is_multiple_of(b)).count() as u64
}

fn squarefree(n: u64) -> bool {
    n != 0 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

fn odd_prime_count(mut b: u64) -> u32 {
    let mut n = 0;
    let mut d = 3;
    while b.is_multiple_of(2) {
        b /= 2;
    }
    while d * d <= b {
        if b.is_multiple_of(d) {
            n += 1;
            while b.is_multiple_of(d) {
                b /= d;
            }
        }
        d += 2;
    }
    n + u32::from(b > 1)
}

proptest! {
    #[test]
    fn criterion_matches_naive_count(k in 0u64..40, b in 1u64..20_000) {
        let v = criterion_applies(k, &BigUint::from(b), Budget::default()).unwrap();
        let count = naive_count(k, b);
        prop_assert_eq!(v.solutions.as_ref().unwrap().len() as u64, count);
        prop_assert_eq!(v.verdict != Verdict::Unknown, count <= 2);
    }

    #[test]
    fn shape_verdicts_leave_at_most_two_solutions(k in 0u64..40, b in 2u64..20_000) {
        let v = prime_shape_verdict(k, &BigUint::from(b), Budget::default()).unwrap();
        if matches!(v.verdict, Verdict::UniqueByPrimeOr2p | Verdict::UniqueByPrimePowerCondition) {
            prop_assert!(naive_count(k, b) <= 2);
        }
    }

    #[test]
    fn bound_covers_naive_count(k in 0u64..60, b in 1u64..20_000) {
        prop_assume!(k != 2);
        if let Ok(bound) = bound_2_pow(k, &BigUint::from(b), Budget::default()) {
            let n = odd_prime_count(b);
            prop_assert_eq!(bound, BigUint::from(1u64 << (n - 1)));
            prop_assert!(naive_count(k, b) <= 1 << n);
        }
    }

    #[test]
    fn best_verdict_never_weaker(k in 0u64..20, b in 1u64..5_000) {
        let b = BigUint::from(b);
        let best = best_verdict(k, &b, Budget::default()).unwrap();
        let shaped = prime_shape_verdict(k, &b, Budget::default()).unwrap();
        if shaped.verdict != Verdict::Unknown {
            prop_assert_eq!(best.verdict, shaped.verdict);
        }
    }
}

#[test]
fn universality_matches_trial_division() {
    for k in 0..2000u64 {
        let expected = k == 2
            || (k >= 4 && k % 2 == 0 && squarefree(k / 2 + 1) && squarefree(k / 2 - 1))
            || (k % 2 == 1 && squarefree(k + 2) && squarefree(k.abs_diff(2)));
        assert_eq!(k_universal_check(k, Budget::default()).unwrap(), expected, "k = {k}");
    }
}

#[test]
fn seven_nine_has_three_solutions() {
    let v = criterion_applies(7, &BigUint::from(9u32), Budget::default()).unwrap();
    let got: Vec<String> = v.solutions.unwrap().residues().iter().map(|r| r.to_string()).collect();
    assert_eq!(got, ["1", "4", "7"]);
}

#[test]
fn no_repeated_maxima_at_depth_eight() {
    for k in 0..=10 {
        let r = uniqueness_empirical(k, 8, Budget::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.vertices, 511);
    }
}
