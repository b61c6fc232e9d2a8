//! k-generalized Cohn matrices and triples.
//!
//! A Cohn matrix `M` has determinant 1 and `tr(M) = (3+3k) m12 - k`; a Cohn
//! triple `(P, Q, R)` adds `Q = PR - S` with `S = [[k, 0], [3k^2+3k, k]]`
//! and asks the `(1,2)`-entries to solve GME(k).

mod matrix;
mod tree;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::address::{Side, TreeAddress};
use crate::decimal;
use crate::error::{domain, invariant, Result};
use crate::markov_tree::{is_gme_solution, MarkovTriple};

pub use matrix::{random_unimodular, trace_identity_check, trace_lemmas_hold, Mat2};
pub use tree::{
    enumerate_cohn, enumerate_cohn_levels, gct_star_check, triple_at, tree_root,
    verify_trace_lemmas,
};

/// `[[k, 0], [3k^2 + 3k, k]]`.
pub fn s_matrix(k: u64) -> Mat2 {
    let k = BigInt::from(k);
    Mat2::new(k.clone(), BigInt::zero(), &k * &k * 3 + &k * 3, k)
}

/// `[[0, 0], [3 + 3k, 0]]`.
pub fn e_matrix(k: u64) -> Mat2 {
    Mat2::new(BigInt::zero(), BigInt::zero(), BigInt::from(3 + 3 * k), BigInt::zero())
}

/// Determinant 1 and `tr(M) = (3+3k) m12 - k`. Whether `m12` is a Markov
/// number is not decidable here; see the tree enumerations.
pub fn is_cohn_matrix(k: u64, m: &Mat2) -> bool {
    m.is_unimodular() && m.trace() == BigInt::from(3 + 3 * k) * &m.m12 - k
}

/// `m11 / m12`.
pub fn index(m: &Mat2) -> Result<BigRational> {
    if m.m12.is_zero() {
        return Err(domain("index needs a nonzero (1,2)-entry"));
    }
    Ok(BigRational::new(m.m11.clone(), m.m12.clone()))
}

/// `tr(S P^-1)`, which equals `-k^2` for every Cohn matrix.
pub fn shift_trace(k: u64, p: &Mat2) -> BigInt {
    (&s_matrix(k) * &p.adjugate()).trace()
}

/// `MEM = (tr M + k) M + E` and `M^-1 E M^-1 = -(tr M^-1 + k) M^-1 + E`
/// with `E = [[0, 0], [3+3k, 0]]`.
pub fn shift_lemma_holds(k: u64, m: &Mat2) -> bool {
    let Ok(inv) = m.inverse() else {
        return false;
    };
    let e = e_matrix(k);
    let k_int = BigInt::from(k);
    let first = &(m * &e) * m == &m.scale(&(m.trace() + &k_int)) + &e;
    let second = &(&inv * &e) * &inv == &inv.scale(&(-(inv.trace() + &k_int))) + &e;
    first && second
}

/// A k-generalized Cohn triple `(P, Q, R)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohnTriple {
    #[serde(with = "decimal::display")]
    k: u64,
    #[serde(with = "decimal::opt_display")]
    l: Option<i64>,
    #[serde(rename = "P")]
    p: Mat2,
    #[serde(rename = "Q")]
    q: Mat2,
    #[serde(rename = "R")]
    r: Mat2,
    address: Option<TreeAddress>,
}

impl CohnTriple {
    /// Checks every triple condition.
    pub fn new(k: u64, l: Option<i64>, p: Mat2, q: Mat2, r: Mat2) -> Result<Self> {
        let t = Self::raw(k, l, p, q, r, None);
        t.validate()?;
        Ok(t)
    }

    /// No validation; for deliberately broken fixtures.
    #[doc(hidden)]
    pub fn raw(
        k: u64,
        l: Option<i64>,
        p: Mat2,
        q: Mat2,
        r: Mat2,
        address: Option<TreeAddress>,
    ) -> Self {
        Self { k, l, p, q, r, address }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("P", &self.p), ("Q", &self.q), ("R", &self.r)] {
            if !is_cohn_matrix(self.k, m) {
                return Err(invariant(format!("{name} = {m} is not a Cohn matrix for k = {}", self.k)));
            }
            if !m.m12.is_positive() {
                return Err(invariant(format!("{name} = {m} has a nonpositive (1,2)-entry")));
            }
        }
        if self.q != &(&self.p * &self.r) - &s_matrix(self.k) {
            return Err(invariant("Q differs from PR - S"));
        }
        let [a, b, c] = self.markov_entries();
        if !is_gme_solution(self.k, &a, &b, &c) {
            return Err(invariant(format!("({a}, {b}, {c}) does not solve GME({})", self.k)));
        }
        Ok(())
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> Option<i64> {
        self.l
    }

    pub fn p(&self) -> &Mat2 {
        &self.p
    }

    pub fn q(&self) -> &Mat2 {
        &self.q
    }

    pub fn r(&self) -> &Mat2 {
        &self.r
    }

    pub fn matrices(&self) -> [&Mat2; 3] {
        [&self.p, &self.q, &self.r]
    }

    pub fn address(&self) -> Option<&TreeAddress> {
        self.address.as_ref()
    }

    pub fn with_address(mut self, address: TreeAddress) -> Self {
        self.address = Some(address);
        self
    }

    /// The `(1,2)`-entries `(p12, q12, r12)`.
    pub fn markov_entries(&self) -> [BigUint; 3] {
        self.matrices()
            .map(|m| m.m12.to_biguint().unwrap_or_default())
    }

    /// The Markov triple of `(1,2)`-entries, carrying the same address.
    pub fn markov_triple(&self) -> Result<MarkovTriple> {
        let [a, b, c] = self.markov_entries();
        let t = MarkovTriple::new(self.k, a, b, c)?;
        Ok(match &self.address {
            Some(addr) => t.with_address(addr.clone()),
            None => t,
        })
    }

    /// `I_P < I_Q < I_R` as exact rationals.
    pub fn index_increasing(&self) -> bool {
        match (index(&self.p), index(&self.q), index(&self.r)) {
            (Ok(ip), Ok(iq), Ok(ir)) => ip < iq && iq < ir,
            _ => false,
        }
    }
}

/// The root family with `(1,2)`-entries `(1, 1, 1)`, parameterized by `l`.
pub fn root_triple(k: u64, l: i64) -> CohnTriple {
    let k = BigInt::from(k);
    let l_int = BigInt::from(l);
    let one = BigInt::from(1);
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let ll = &l_int * &l_int;
    let p = Mat2::new(
        l_int.clone(),
        one.clone(),
        -&ll + &two * &k * &l_int + &three * &l_int - &one,
        -&l_int + &two * &k + &three,
    );
    let q = Mat2::new(
        &k + &l_int + &one,
        one.clone(),
        &k * &k - &ll + &three * &k + &l_int + &one,
        &k - &l_int + &two,
    );
    let r = Mat2::new(
        &two * &k + &l_int + &two,
        one.clone(),
        -&ll - &two * &k * &l_int + &two * &k - &l_int + &one,
        -&l_int + &one,
    );
    let k = u64::try_from(k).expect("k came from u64");
    CohnTriple::new(k, Some(l), p, q, r)
        .expect("the root family is a Cohn triple")
        .with_address(TreeAddress::root())
}

/// `(P, Q, R) -> (P, PQ - S, Q)`.
pub fn child_left(t: &CohnTriple) -> Result<CohnTriple> {
    let mid = &(&t.p * &t.q) - &s_matrix(t.k);
    let child = CohnTriple::new(t.k, t.l, t.p.clone(), mid, t.q.clone())?;
    Ok(with_child_address(child, t, Side::L))
}

/// `(P, Q, R) -> (Q, QR - S, R)`.
pub fn child_right(t: &CohnTriple) -> Result<CohnTriple> {
    let mid = &(&t.q * &t.r) - &s_matrix(t.k);
    let child = CohnTriple::new(t.k, t.l, t.q.clone(), mid, t.r.clone())?;
    Ok(with_child_address(child, t, Side::R))
}

fn with_child_address(child: CohnTriple, parent: &CohnTriple, side: Side) -> CohnTriple {
    match &parent.address {
        Some(a) => child.with_address(a.child(side)),
        None => child,
    }
}

fn check_descendable(t: &CohnTriple) -> Result<()> {
    let [a, b, c] = t.markov_entries();
    if b <= a || b <= c {
        return Err(domain(format!(
            "middle (1,2)-entry of ({a}, {b}, {c}) is not strictly maximal"
        )));
    }
    Ok(())
}

fn parent_address(t: &CohnTriple) -> Option<TreeAddress> {
    t.address.as_ref().and_then(|a| a.parent()).map(|(a, _)| a)
}

/// Inverts [`child_left`]: `(P, Q, R) -> (P, R, P^-1 (R + S))`.
pub fn parent_from_left(t: &CohnTriple) -> Result<CohnTriple> {
    check_descendable(t)?;
    let p_inv = t.p.inverse()?;
    let r_new = &p_inv * &(&t.r + &s_matrix(t.k));
    let up = CohnTriple::new(t.k, t.l, t.p.clone(), t.r.clone(), r_new)?;
    Ok(CohnTriple { address: parent_address(t), ..up })
}

/// Inverts [`child_right`]: `(P, Q, R) -> ((P + S) R^-1, P, R)`.
pub fn parent_from_right(t: &CohnTriple) -> Result<CohnTriple> {
    check_descendable(t)?;
    let r_inv = t.r.inverse()?;
    let p_new = &(&t.p + &s_matrix(t.k)) * &r_inv;
    let up = CohnTriple::new(t.k, t.l, p_new, t.p.clone(), t.r.clone())?;
    Ok(CohnTriple { address: parent_address(t), ..up })
}

/// One descent step, choosing the side by `p12 <= r12`. When the outer
/// entries tie (only at `(1, k+2, 1)`) a known address decides.
pub fn parent(t: &CohnTriple) -> Result<(CohnTriple, Side)> {
    let [a, _, c] = t.markov_entries();
    let side = match (a.cmp(&c), t.address.as_ref().and_then(|x| x.parent())) {
        (std::cmp::Ordering::Equal, Some((_, side))) => side,
        (std::cmp::Ordering::Greater, _) => Side::R,
        _ => Side::L,
    };
    let up = match side {
        Side::L => parent_from_left(t)?,
        Side::R => parent_from_right(t)?,
    };
    Ok((up, side))
}

/// Result of walking a triple up to the `(1, 1, 1)` root family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descent {
    pub root: CohnTriple,
    /// The parameter of the reached root, read off as its `p11`.
    pub l: i64,
    /// Address of the starting triple below the reached root.
    pub path: TreeAddress,
}

impl Descent {
    pub fn steps(&self) -> usize {
        self.path.depth()
    }
}

/// Descends until the `(1,2)`-entries are `(1, 1, 1)`.
pub fn descend(t: &CohnTriple) -> Result<Descent> {
    let mut current = t.clone();
    let mut sides = Vec::new();
    loop {
        let [a, b, c] = current.markov_entries();
        if a == BigUint::from(1u32) && b == a && c == a {
            break;
        }
        let (up, side) = parent(&current)?;
        sides.push(side);
        current = up;
    }
    sides.reverse();
    let l = i64::try_from(&current.p.m11)
        .map_err(|_| domain("recovered root parameter exceeds 64 bits"))?;
    let expected = root_triple(current.k, l);
    if expected.matrices() != current.matrices() {
        return Err(invariant(format!("descent ended outside the root family at l = {l}")));
    }
    Ok(Descent {
        root: expected,
        l,
        path: TreeAddress::from(sides),
    })
}
