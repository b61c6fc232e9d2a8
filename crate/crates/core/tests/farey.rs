use gmarkov_core::address::{Side, TreeAddress, TreeKind};
use gmarkov_core::farey::{
    address_to_fraction, characteristic_number, farey_det, farey_triple_at, fraction_to_address, label,
    markov_label, Fraction,
};
use gmarkov_core::markov_tree;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

fn address(max: usize) -> impl Strategy<Value = TreeAddress> {
    prop::collection::vec(any::<bool>(), 0..=max)
        .prop_map(|bits| bits.into_iter().map(|b| if b { Side::R } else { Side::L }).collect::<Vec<_>>().into())
}

/// A fraction strictly inside (0, 1) at depth at most `max` below 1/2.
fn interior(max: usize) -> impl Strategy<Value = (TreeAddress, Fraction)> {
    address(max).prop_map(|a| {
        let mut sides = vec![Side::L];
        sides.extend_from_slice(a.sides());
        let full: TreeAddress = sides.into();
        let t = address_to_fraction(&full).unwrap();
        (a, t)
    })
}

proptest! {
    #[test]
    fn farey_triples_are_unimodular_and_ordered(addr in address(14)) {
        let t = farey_triple_at(&addr).unwrap();
        prop_assert!(t.is_valid());
        prop_assert_eq!(farey_det(&t.left, &t.mid).abs(), 1);
        prop_assert_eq!(farey_det(&t.mid, &t.right).abs(), 1);
        prop_assert!(t.left < t.mid && t.mid < t.right);
        prop_assert_eq!(t.mid, address_to_fraction(&addr).unwrap());
    }

    #[test]
    fn address_round_trip(addr in address(14)) {
        let t = address_to_fraction(&addr).unwrap();
        prop_assert_eq!(fraction_to_address(&t).unwrap(), addr);
    }

    #[test]
    fn fraction_round_trip(num in 1u64..5000, den in 1u64..5000) {
        let t = Fraction::new(num, den).unwrap();
        prop_assert_eq!(address_to_fraction(&fraction_to_address(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn labels_match_lmt((addr, t) in interior(9), k in 0u64..=10) {
        let m = markov_tree::triple_at(k, &addr, TreeKind::Left);
        prop_assert_eq!(&markov_label(k, &t).unwrap(), m.b());
        let u = characteristic_number(k, &t).unwrap();
        let m_t = m.b();
        prop_assert!((&u * &u + k * &u + 1u32).is_multiple_of(m_t));
        prop_assert!(!u.is_zero() && &u * (k + 2) < *m_t);
        prop_assert!((&u + k) * 2u32 < *m_t);
        let lhs = (m.a() * &u) % m_t;
        let s = m.c() % m_t;
        prop_assert!(lhs == s || (&lhs + &s) == *m_t);
        // m_t - u_t - k is the other root in (m_t/2, m_t)
        let other = m_t - &u - k;
        prop_assert!((&other * &other + k * &other + 1u32).is_multiple_of(m_t));
    }
}

#[test]
fn endpoint_labels() {
    for k in 0..=10u64 {
        let zero = label(k, &Fraction::ZERO).unwrap();
        assert_eq!(zero.m_t, BigUint::from(1u32));
        assert!(zero.u_t.is_none());
        let one = label(k, &Fraction::ONE).unwrap();
        assert_eq!(one.m_t, BigUint::from(k + 2));
        assert!(one.u_t.is_none());
    }
}

#[test]
fn half_is_five_with_two() {
    let t: Fraction = "1/2".parse().unwrap();
    let l = label(0, &t).unwrap();
    assert_eq!((l.m_t, l.u_t), (BigUint::from(5u32), Some(BigUint::from(2u32))));
    assert_eq!(serde_json::to_value(label(0, &t).unwrap()).unwrap()["u_t"], "2");
}
