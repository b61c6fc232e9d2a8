use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    child_left, child_right, random_unimodular, root_triple, shift_lemma_holds, shift_trace,
    trace_lemmas_hold, CohnTriple,
};
use crate::address::{Side, TreeAddress, TreeKind};
use crate::report::Report;

fn child(t: &CohnTriple, side: Side) -> CohnTriple {
    match side {
        Side::L => child_left(t),
        Side::R => child_right(t),
    }
    .expect("children of a valid Cohn triple are valid")
}

fn walk(mut t: CohnTriple, address: &TreeAddress) -> CohnTriple {
    for side in address.sides() {
        t = child(&t, *side);
    }
    t
}

/// Root of WGCT(k, l), GCT(k, l) or LGCT(k, l), with the empty address.
pub fn tree_root(k: u64, l: i64, tree: TreeKind) -> CohnTriple {
    walk(root_triple(k, l), &tree.root_address()).with_address(TreeAddress::root())
}

/// The vertex at `address` below the root of `tree`.
pub fn triple_at(k: u64, l: i64, address: &TreeAddress, tree: TreeKind) -> CohnTriple {
    walk(tree_root(k, l, tree), address)
}

fn expand_levels(root: CohnTriple, depth: usize) -> Vec<Vec<CohnTriple>> {
    let mut levels = vec![vec![root]];
    for _ in 0..depth {
        let next: Vec<CohnTriple> = levels
            .last()
            .expect("nonempty")
            .par_iter()
            .flat_map_iter(|t| [child(t, Side::L), child(t, Side::R)])
            .collect();
        levels.push(next);
    }
    levels
}

/// Levels `0..=depth` of the chosen Cohn tree, each in address order.
pub fn enumerate_cohn_levels(k: u64, l: i64, depth: usize, tree: TreeKind) -> Vec<Vec<CohnTriple>> {
    expand_levels(tree_root(k, l, tree), depth)
}

/// Every vertex to `depth`, ordered by (depth, address).
pub fn enumerate_cohn(k: u64, l: i64, depth: usize, tree: TreeKind) -> Vec<CohnTriple> {
    enumerate_cohn_levels(k, l, depth, tree)
        .into_iter()
        .flatten()
        .collect()
}

/// Compares the right-child subtree of WGCT(k, l) with GCT(k, k+l+1)
/// vertex by vertex.
pub fn gct_star_check(k: u64, l: i64, depth: usize) -> Report {
    let mut report = Report::new(format!("GCT*({k},{l}) = GCT({k},{})", k as i64 + l + 1));
    let right: TreeAddress = vec![Side::R].into();
    let star_root = triple_at(k, l, &right, TreeKind::Wide).with_address(TreeAddress::root());
    let star = expand_levels(star_root, depth);
    let shifted = enumerate_cohn_levels(k, k as i64 + l + 1, depth, TreeKind::Main);
    for (a, b) in star.iter().flatten().zip(shifted.iter().flatten()) {
        report.check(a.matrices() == b.matrices(), || {
            format!("address {:?}: matrices differ", a.address())
        });
    }
    report
}

/// The trace lemmas on `samples` random unimodular pairs, and on every
/// matrix of GCT(k, l) to `depth` the shift lemma and `tr(S P^-1) = -k^2`.
pub fn verify_trace_lemmas(k: u64, l: i64, depth: usize, samples: usize, seed: u64) -> Report {
    let mut report = Report::new(format!("trace lemmas k={k} l={l}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_unimodular(&mut rng, 40);
        let b = random_unimodular(&mut rng, 40);
        report.check(trace_lemmas_hold(&a, &b), || format!("trace lemma fails at {a}, {b}"));
    }
    let minus_k2 = -BigInt::from(k) * BigInt::from(k);
    for t in enumerate_cohn(k, l, depth, TreeKind::Main) {
        for m in t.matrices() {
            report.check(shift_lemma_holds(k, m), || format!("shift lemma fails at {m}"));
            report.check(shift_trace(k, m) == minus_k2, || format!("tr(S M^-1) != -k^2 at {m}"));
        }
    }
    report
}
