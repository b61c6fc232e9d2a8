//! Solutions of the k-generalized Markov equation
//!
//! ```text
//! x^2 + y^2 + z^2 + k(yz + zx + xy) = (3 + 3k) xyz
//! ```
//!
//! and the trees generated from `(1, 1, 1)` by Vieta jumping, together with
//! the companion equation
//!
//! ```text
//! x^2 + y^2 + z^2 + (k^2 + 2k)(x + y + z) + 2k^3 + 3k^2 = xyz
//! ```
//!
//! reached through `x = (3 + 3k) a - k`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::address::{Side, TreeAddress, TreeKind};
use crate::decimal;
use crate::error::{domain, invariant, Result};
use crate::numtheory::checked_natural;
use crate::report::Report;

/// A positive solution `(a, b, c)` of GME(k), in the positional form used
/// by the trees (the middle entry is the maximum away from the root).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovTriple {
    #[serde(with = "decimal::display")]
    k: u64,
    #[serde(with = "decimal::nat")]
    a: BigUint,
    #[serde(with = "decimal::nat")]
    b: BigUint,
    #[serde(with = "decimal::nat")]
    c: BigUint,
    address: Option<TreeAddress>,
}

impl MarkovTriple {
    /// Validates positivity and the equation.
    pub fn new(k: u64, a: BigUint, b: BigUint, c: BigUint) -> Result<Self> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(domain("Markov triple entries must be positive"));
        }
        if !is_gme_solution(k, &a, &b, &c) {
            return Err(domain(format!("({a}, {b}, {c}) does not solve GME({k})")));
        }
        Ok(Self::trusted(k, a, b, c, None))
    }

    pub(crate) fn trusted(
        k: u64,
        a: BigUint,
        b: BigUint,
        c: BigUint,
        address: Option<TreeAddress>,
    ) -> Self {
        Self { k, a, b, c, address }
    }

    /// `(1, 1, 1)`, which solves GME(k) for every k.
    pub fn root(k: u64) -> Self {
        let one = BigUint::one();
        Self::trusted(k, one.clone(), one.clone(), one, Some(TreeAddress::root()))
    }

    pub fn with_address(mut self, address: TreeAddress) -> Self {
        self.address = Some(address);
        self
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn c(&self) -> &BigUint {
        &self.c
    }

    pub fn address(&self) -> Option<&TreeAddress> {
        self.address.as_ref()
    }

    pub fn entries(&self) -> [&BigUint; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn max(&self) -> &BigUint {
        self.entries().into_iter().max().expect("three entries")
    }

    /// The entries in ascending order; equal for all orderings of one solution.
    pub fn unordered(&self) -> [BigUint; 3] {
        let mut e = [self.a.clone(), self.b.clone(), self.c.clone()];
        e.sort();
        e
    }

    pub fn is_pairwise_coprime(&self) -> bool {
        self.a.gcd(&self.b).is_one() && self.b.gcd(&self.c).is_one() && self.c.gcd(&self.a).is_one()
    }

    pub fn is_root(&self) -> bool {
        self.a.is_one() && self.b.is_one() && self.c.is_one()
    }
}

fn coeff(k: u64) -> BigUint {
    BigUint::from(3 + 3 * k)
}

/// True iff `(a, b, c)` solves GME(k) exactly.
pub fn is_gme_solution(k: u64, a: &BigUint, b: &BigUint, c: &BigUint) -> bool {
    let lhs = a * a + b * b + c * c + (b * c + c * a + a * b) * k;
    lhs == coeff(k) * a * b * c
}

/// `(3 + 3k) xy - z - k(x + y)`, the other root of the quadratic in `z`.
fn jump(k: u64, x: &BigUint, y: &BigUint, z: &BigUint) -> Result<BigUint> {
    let value = BigInt::from(coeff(k) * x * y) - BigInt::from(z.clone()) - BigInt::from((x + y) * k);
    let next = checked_natural(value)
        .filter(|v| !v.is_zero())
        .ok_or_else(|| invariant(format!("jump from ({x}, {y}, {z}) left the positive solutions")))?;
    if cfg!(debug_assertions) && &next * z != x * x + x * y * k + y * y {
        return Err(invariant(format!("{z} does not divide x^2 + kxy + y^2 at ({x}, {y})")));
    }
    Ok(next)
}

/// `(a, b, c) -> (a, (a^2 + kab + b^2)/c, b)`.
pub fn vieta_left(t: &MarkovTriple) -> Result<MarkovTriple> {
    let mid = jump(t.k, &t.a, &t.b, &t.c)?;
    let address = t.address.as_ref().map(|a| a.child(Side::L));
    Ok(MarkovTriple::trusted(t.k, t.a.clone(), mid, t.b.clone(), address))
}

/// `(a, b, c) -> (b, (b^2 + kbc + c^2)/a, c)`.
pub fn vieta_right(t: &MarkovTriple) -> Result<MarkovTriple> {
    let mid = jump(t.k, &t.b, &t.c, &t.a)?;
    let address = t.address.as_ref().map(|a| a.child(Side::R));
    Ok(MarkovTriple::trusted(t.k, t.b.clone(), mid, t.c.clone(), address))
}

/// The parent of a non-root vertex and the side `t` hangs on.
///
/// The side is `L` when `a <= c`. The only vertex with `a == c` is
/// `(1, k+2, 1)`, both children of the wide root; there a known address
/// decides, and `L` is reported otherwise.
pub fn parent(t: &MarkovTriple) -> Result<(MarkovTriple, Side)> {
    if t.is_root() {
        return Err(domain("(1, 1, 1) has no parent"));
    }
    if t.b <= t.a || t.b <= t.c {
        return Err(domain(format!(
            "middle entry of ({}, {}, {}) is not strictly maximal",
            t.a, t.b, t.c
        )));
    }
    let numer = &t.a * &t.a + &t.a * &t.c * t.k + &t.c * &t.c;
    let (prev, rem) = numer.div_rem(&t.b);
    if !rem.is_zero() {
        return Err(invariant(format!("{} does not divide a^2 + kac + c^2", t.b)));
    }
    let from_address = t.address.as_ref().and_then(|a| a.parent());
    let side = match (t.a.cmp(&t.c), &from_address) {
        (std::cmp::Ordering::Equal, Some((_, side))) => *side,
        (std::cmp::Ordering::Greater, _) => Side::R,
        _ => Side::L,
    };
    let address = from_address.map(|(a, _)| a);
    let up = match side {
        Side::L => MarkovTriple::trusted(t.k, t.a.clone(), t.c.clone(), prev, address),
        Side::R => MarkovTriple::trusted(t.k, prev, t.a.clone(), t.c.clone(), address),
    };
    Ok((up, side))
}

fn child(t: &MarkovTriple, side: Side) -> MarkovTriple {
    match side {
        Side::L => vieta_left(t),
        Side::R => vieta_right(t),
    }
    .expect("jumps from a valid triple stay valid")
}

/// The root of WMT(k), MT(k) or LMT(k), with the empty address.
pub fn tree_root(k: u64, tree: TreeKind) -> MarkovTriple {
    let mut t = MarkovTriple::root(k);
    for side in tree.root_address().sides() {
        t = child(&t, *side);
    }
    t.with_address(TreeAddress::root())
}

/// The vertex at `address`, measured from the root of `tree`.
pub fn triple_at(k: u64, address: &TreeAddress, tree: TreeKind) -> MarkovTriple {
    let mut t = tree_root(k, tree);
    for side in address.sides() {
        t = child(&t, *side);
    }
    t
}

/// Breadth-first stream of every vertex of `tree` down to `depth`, in
/// address order.
pub fn enumerate(k: u64, depth: usize, tree: TreeKind) -> Enumeration {
    Enumeration {
        level: vec![tree_root(k, tree)],
        next: 0,
        depth: 0,
        max_depth: depth,
    }
}

pub struct Enumeration {
    level: Vec<MarkovTriple>,
    next: usize,
    depth: usize,
    max_depth: usize,
}

impl Iterator for Enumeration {
    type Item = MarkovTriple;

    fn next(&mut self) -> Option<MarkovTriple> {
        if self.next == self.level.len() {
            if self.depth == self.max_depth || self.level.is_empty() {
                return None;
            }
            self.level = self
                .level
                .iter()
                .flat_map(|t| [child(t, Side::L), child(t, Side::R)])
                .collect();
            self.next = 0;
            self.depth += 1;
        }
        self.next += 1;
        Some(self.level[self.next - 1].clone())
    }
}

/// All levels `0..=depth` of `tree`, each level in address order. Levels
/// are expanded in parallel; the output does not depend on the thread count.
pub fn enumerate_levels(k: u64, depth: usize, tree: TreeKind) -> Vec<Vec<MarkovTriple>> {
    let mut levels = vec![vec![tree_root(k, tree)]];
    for _ in 0..depth {
        let next: Vec<MarkovTriple> = levels
            .last()
            .expect("nonempty")
            .par_iter()
            .flat_map_iter(|t| [child(t, Side::L), child(t, Side::R)])
            .collect();
        levels.push(next);
    }
    levels
}

/// A positive solution of GSME(k).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsmeTriple {
    #[serde(with = "decimal::display")]
    k: u64,
    #[serde(with = "decimal::nat")]
    x: BigUint,
    #[serde(with = "decimal::nat")]
    y: BigUint,
    #[serde(with = "decimal::nat")]
    z: BigUint,
}

impl GsmeTriple {
    pub fn new(k: u64, x: BigUint, y: BigUint, z: BigUint) -> Result<Self> {
        if x.is_zero() || y.is_zero() || z.is_zero() {
            return Err(domain("GSME triple entries must be positive"));
        }
        if !is_gsme_solution(k, &x, &y, &z) {
            return Err(domain(format!("({x}, {y}, {z}) does not solve GSME({k})")));
        }
        Ok(Self { k, x, y, z })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn entries(&self) -> [&BigUint; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn is_induced(&self) -> bool {
        is_induced(self.k, &self.x, &self.y, &self.z)
    }
}

/// True iff `(x, y, z)` solves GSME(k) exactly.
pub fn is_gsme_solution(k: u64, x: &BigUint, y: &BigUint, z: &BigUint) -> bool {
    let k2 = k as u128 * k as u128;
    let shift = BigUint::from(k2 + 2 * k as u128);
    let constant = BigUint::from(2 * k2 * k as u128 + 3 * k2);
    x * x + y * y + z * z + shift * (x + y + z) + constant == x * y * z
}

/// True iff `((x+k)/(3+3k), (y+k)/(3+3k), (z+k)/(3+3k))` is an integer
/// solution of GME(k).
pub fn is_induced(k: u64, x: &BigUint, y: &BigUint, z: &BigUint) -> bool {
    let d = coeff(k);
    let mut back = Vec::with_capacity(3);
    for v in [x, y, z] {
        let (q, r) = (v + k).div_rem(&d);
        if !r.is_zero() || q.is_zero() {
            return false;
        }
        back.push(q);
    }
    is_gme_solution(k, &back[0], &back[1], &back[2])
}

/// `(a, b, c) -> ((3+3k)a - k, (3+3k)b - k, (3+3k)c - k)`.
pub fn to_gsme(t: &MarkovTriple) -> GsmeTriple {
    let d = coeff(t.k);
    let map = |v: &BigUint| &d * v - t.k;
    let g = GsmeTriple {
        k: t.k,
        x: map(&t.a),
        y: map(&t.b),
        z: map(&t.c),
    };
    debug_assert!(is_gsme_solution(g.k, &g.x, &g.y, &g.z));
    g
}

fn gsme_jump(k: u64, x: &BigUint, y: &BigUint, z: &BigUint) -> Result<BigUint> {
    let shift = BigInt::from(k as u128 * k as u128 + 2 * k as u128);
    let value = BigInt::from(x * y) - BigInt::from(z.clone()) - shift;
    checked_natural(value)
        .filter(|v| !v.is_zero())
        .ok_or_else(|| invariant(format!("GSME jump from ({x}, {y}, {z}) is not positive")))
}

/// `(x, y, z) -> (x, xy - z - k^2 - 2k, y)`.
pub fn gsme_vieta_left(t: &GsmeTriple) -> Result<GsmeTriple> {
    let mid = gsme_jump(t.k, &t.x, &t.y, &t.z)?;
    GsmeTriple::new(t.k, t.x.clone(), mid, t.y.clone()).map_err(|e| invariant(e.to_string()))
}

/// `(x, y, z) -> (y, yz - x - k^2 - 2k, z)`.
pub fn gsme_vieta_right(t: &GsmeTriple) -> Result<GsmeTriple> {
    let mid = gsme_jump(t.k, &t.y, &t.z, &t.x)?;
    GsmeTriple::new(t.k, t.y.clone(), mid, t.z.clone()).map_err(|e| invariant(e.to_string()))
}

/// Squares every classical (k = 0) triple of WMT(0) down to `depth` and
/// compares with the vertex of WMT(2) at the same address.
pub fn square_correspondence_check(depth: usize) -> Report {
    let mut report = Report::new("square correspondence k=0 -> k=2");
    let classical = enumerate_levels(0, depth, TreeKind::Wide);
    let shifted = enumerate_levels(2, depth, TreeKind::Wide);
    for (t0, t2) in classical.iter().flatten().zip(shifted.iter().flatten()) {
        let sq = [&t0.a * &t0.a, &t0.b * &t0.b, &t0.c * &t0.c];
        report.check(is_gme_solution(2, &sq[0], &sq[1], &sq[2]), || {
            format!("squares of ({}, {}, {}) do not solve GME(2)", t0.a, t0.b, t0.c)
        });
        report.check(
            sq[0] == t2.a && sq[1] == t2.b && sq[2] == t2.c,
            || format!("address {:?}: squared classical triple differs from WMT(2)", t0.address),
        );
    }
    report
}
