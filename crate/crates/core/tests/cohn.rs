use gmarkov_core::address::{Side, TreeAddress, TreeKind};
use gmarkov_core::cohn::{
    self, child_left, child_right, descend, index, is_cohn_matrix, parent, root_triple, shift_trace, triple_at,
    CohnTriple, Mat2,
};
use gmarkov_core::markov_tree;
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

fn address(max: usize) -> impl Strategy<Value = TreeAddress> {
    prop::collection::vec(any::<bool>(), 0..=max)
        .prop_map(|bits| bits.into_iter().map(|b| if b { Side::R } else { Side::L }).collect::<Vec<_>>().into())
}

fn walk(mut t: CohnTriple, addr: &TreeAddress) -> CohnTriple {
    for side in addr.sides() {
        t = match side {
            Side::L => child_left(&t),
            Side::R => child_right(&t),
        }
        .unwrap();
    }
    t
}

proptest! {
    #[test]
    fn vertices_are_cohn_triples(k in 0u64..15, l in -20i64..20, addr in address(10)) {
        let t = triple_at(k, l, &addr, TreeKind::Wide);
        prop_assert!(t.validate().is_ok());
        let s = cohn::s_matrix(k);
        prop_assert_eq!(t.q(), &(&(t.p() * t.r()) - &s));
        for m in t.matrices() {
            prop_assert!(m.is_unimodular());
            prop_assert!(is_cohn_matrix(k, m));
            prop_assert_eq!(shift_trace(k, m), -BigInt::from(k * k));
        }
        let idx: Vec<_> = t.matrices().iter().map(|m| index(m).unwrap()).collect();
        prop_assert!(idx[0] < idx[1] && idx[1] < idx[2]);
    }

    #[test]
    fn top_right_entries_form_the_markov_tree(k in 0u64..15, l in -20i64..20, addr in address(10)) {
        let c = triple_at(k, l, &addr, TreeKind::Wide);
        let m = markov_tree::triple_at(k, &addr, TreeKind::Wide);
        prop_assert_eq!(c.markov_entries(), [m.a().clone(), m.b().clone(), m.c().clone()]);
    }

    #[test]
    fn parent_inverts_children(k in 0u64..15, l in -20i64..20, addr in address(9)) {
        let t = triple_at(k, l, &addr, TreeKind::Wide);
        for side in [Side::L, Side::R] {
            let child = walk(t.clone(), &vec![side].into());
            let (p, s) = parent(&child).unwrap();
            prop_assert_eq!(p.matrices(), t.matrices());
            prop_assert_eq!(s, side);
        }
    }

    #[test]
    fn descent_returns_to_the_root_family(k in 0u64..15, l in -20i64..20, addr in address(10)) {
        let t = triple_at(k, l, &addr, TreeKind::Wide);
        let d = descend(&t).unwrap();
        prop_assert_eq!(d.steps(), addr.depth());
        prop_assert_eq!(d.l, l);
        prop_assert_eq!(&d.path, &addr);

        let bare = CohnTriple::new(k, None, t.p().clone(), t.q().clone(), t.r().clone()).unwrap();
        let d = descend(&bare).unwrap();
        prop_assert_eq!(d.steps(), addr.depth());
        let back = walk(root_triple(k, d.l), &d.path);
        prop_assert_eq!(back.matrices(), t.matrices());
    }

    #[test]
    fn lgct_middle_matrices_have_positive_corner(k in 0u64..15, addr in address(10)) {
        let t = triple_at(k, -(k as i64), &addr, TreeKind::Left);
        prop_assert!(t.q().m11.is_positive());
    }
}

#[test]
fn lgct_roots_match_displays() {
    for k in 0..=5i64 {
        let t = cohn::tree_root(k as u64, -k, TreeKind::Left);
        let p = Mat2::from_i64(-k, 1, -3 * k * k - 3 * k - 1, 3 * k + 3);
        let q = Mat2::from_i64(
            k + 2,
            2 * k * k + 6 * k + 5,
            3 * k * k + 9 * k + 5,
            6 * k * k * k + 24 * k * k + 31 * k + 13,
        );
        let r = Mat2::from_i64(1, k + 2, 3 * k + 2, 3 * k * k + 8 * k + 5);
        assert_eq!(t.matrices(), [&p, &q, &r]);
    }
}

#[test]
fn gct_star_is_a_shifted_gct() {
    for k in 0..=4u64 {
        for l in [-(k as i64), 0, 3] {
            assert!(cohn::gct_star_check(k, l, 5).passed(), "k = {k}, l = {l}");
        }
    }
}
