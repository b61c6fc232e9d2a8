//! The Farey tree and the fraction labels of Cohn matrices and Markov numbers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::address::{Side, TreeAddress, TreeKind};
use crate::cohn::{self, Mat2};
use crate::decimal;
use crate::error::{domain, invariant, Error, Result};
use crate::markov_tree;
use crate::numtheory::mod_inverse;

/// Longest address `fraction_to_address` will build.
pub const MAX_ADDRESS_DEPTH: usize = 1 << 16;

/// A reduced fraction `num/den`; `1/0` stands for infinity, `0/0` is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 && den == 0 {
            return Err(domain("0/0 is not a fraction"));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };
    pub const INFINITY: Fraction = Fraction { num: 1, den: 0 };

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// `(a + c) / (b + d)`; fails when a component overflows.
    pub fn mediant(&self, other: &Fraction) -> Result<Fraction> {
        let num = self.num.checked_add(other.num);
        let den = self.den.checked_add(other.den);
        match (num, den) {
            (Some(num), Some(den)) => Fraction::new(num, den),
            _ => Err(domain(format!("mediant of {self} and {other} overflows"))),
        }
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected num/den, got {s:?}"));
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: u64 = n.parse().map_err(|_| bad())?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        Fraction::new(n, d)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `num(p) den(q) - den(p) num(q)`.
pub fn farey_det(p: &Fraction, q: &Fraction) -> i128 {
    p.num as i128 * q.den as i128 - p.den as i128 * q.num as i128
}

/// Three fractions with pairwise `|det| = 1` and `left < mid < right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FareyTriple {
    pub left: Fraction,
    pub mid: Fraction,
    pub right: Fraction,
}

impl FareyTriple {
    pub fn new(left: Fraction, mid: Fraction, right: Fraction) -> Result<Self> {
        let t = Self { left, mid, right };
        if !t.is_valid() {
            return Err(domain(format!("({left}, {mid}, {right}) is not a Farey triple")));
        }
        Ok(t)
    }

    /// `(0/1, 1/1, 1/0)`.
    pub fn root() -> Self {
        Self {
            left: Fraction::ZERO,
            mid: Fraction::ONE,
            right: Fraction::INFINITY,
        }
    }

    pub fn is_valid(&self) -> bool {
        let unit = |p: &Fraction, q: &Fraction| farey_det(p, q).abs() == 1;
        unit(&self.left, &self.mid)
            && unit(&self.mid, &self.right)
            && unit(&self.right, &self.left)
            && self.left < self.mid
            && self.mid < self.right
    }
}

/// Children built with an arbitrary mediant rule, without validation.
pub fn farey_children_with<F>(t: &FareyTriple, mediant: F) -> Result<(FareyTriple, FareyTriple)>
where
    F: Fn(&Fraction, &Fraction) -> Result<Fraction>,
{
    let left = FareyTriple {
        left: t.left,
        mid: mediant(&t.left, &t.mid)?,
        right: t.mid,
    };
    let right = FareyTriple {
        left: t.mid,
        mid: mediant(&t.mid, &t.right)?,
        right: t.right,
    };
    Ok((left, right))
}

/// `(a, m, c) -> (a, a+m, m)` and `(m, m+c, c)` with mediants.
pub fn farey_children(t: &FareyTriple) -> Result<(FareyTriple, FareyTriple)> {
    let (l, r) = farey_children_with(t, Fraction::mediant)?;
    if !(l.is_valid() && r.is_valid()) {
        return Err(invariant(format!("children of {t:?} are not Farey triples")));
    }
    Ok((l, r))
}

/// The Farey triple at `address` below the root.
pub fn farey_triple_at(address: &TreeAddress) -> Result<FareyTriple> {
    let mut t = FareyTriple::root();
    for side in address.sides() {
        let (l, r) = farey_children(&t)?;
        t = match side {
            Side::L => l,
            Side::R => r,
        };
    }
    Ok(t)
}

/// The middle fraction of the vertex at `address`.
pub fn address_to_fraction(address: &TreeAddress) -> Result<Fraction> {
    Ok(farey_triple_at(address)?.mid)
}

/// The address whose Farey vertex has middle entry `t`.
pub fn fraction_to_address(t: &Fraction) -> Result<TreeAddress> {
    if t.num == 0 || t.den == 0 {
        return Err(domain(format!("{t} is never the middle of a Farey triple")));
    }
    let mut sides = Vec::new();
    let mut v = FareyTriple::root();
    while v.mid != *t {
        if sides.len() >= MAX_ADDRESS_DEPTH {
            return Err(domain(format!("{t} lies deeper than {MAX_ADDRESS_DEPTH} levels")));
        }
        let (l, r) = farey_children_with(&v, Fraction::mediant)?;
        if *t < v.mid {
            sides.push(Side::L);
            v = l;
        } else {
            sides.push(Side::R);
            v = r;
        }
    }
    Ok(TreeAddress::from(sides))
}

fn check_unit_interval(t: &Fraction) -> Result<()> {
    if t.den == 0 || t.num > t.den {
        return Err(domain(format!("{t} is outside [0, 1]")));
    }
    Ok(())
}

/// `C_t(k, l)`: the middle matrix of the GCT(k, l) vertex labelled `t`.
pub fn label_cohn(k: u64, l: i64, t: &Fraction) -> Result<Mat2> {
    let address = fraction_to_address(t)?;
    Ok(cohn::triple_at(k, l, &address, TreeKind::Main).q().clone())
}

/// The LMT(k) address of an interior `t` in `(0, 1)`.
fn left_tree_address(t: &Fraction) -> Result<TreeAddress> {
    check_unit_interval(t)?;
    let address = fraction_to_address(t)?;
    match address.strip_first() {
        Some((Side::L, rest)) => Ok(rest),
        _ => Err(domain(format!("{t} is not strictly between 0 and 1"))),
    }
}

/// `m_t` for `t` in `[0, 1]`: 1 at `0/1`, `k+2` at `1/1`, otherwise the
/// maximum of the LMT(k) triple labelled `t`.
pub fn markov_label(k: u64, t: &Fraction) -> Result<BigUint> {
    check_unit_interval(t)?;
    if *t == Fraction::ZERO {
        return Ok(BigUint::one());
    }
    if *t == Fraction::ONE {
        return Ok(BigUint::from(k) + 2u32);
    }
    let address = left_tree_address(t)?;
    Ok(markov_tree::triple_at(k, &address, TreeKind::Left).b().clone())
}

/// The representative of `+-m_s / m_r (mod m_t)` in `(0, m_t / 2)`, which
/// must be unique.
pub fn characteristic_from_triple(m_r: &BigUint, m_t: &BigUint, m_s: &BigUint) -> Result<BigUint> {
    let x = (m_s * mod_inverse(m_r, m_t)?) % m_t;
    let other = (m_t - &x) % m_t;
    let in_range = |v: &BigUint| !v.is_zero() && v * 2u32 < *m_t;
    match (in_range(&x), in_range(&other)) {
        (true, false) => Ok(x),
        (false, true) => Ok(other),
        _ => Err(invariant(format!(
            "no unique representative of +-{m_s}/{m_r} mod {m_t} in (0, {m_t}/2)"
        ))),
    }
}

fn positive_natural(x: &BigInt, what: &str) -> Result<BigUint> {
    if !x.is_positive() {
        return Err(invariant(format!("{what} = {x} is not positive")));
    }
    Ok(x.magnitude().clone())
}

/// `u_t` for interior `t`, computed from `C_t(k, -k)` and from the Markov
/// triple `(m_r, m_t, m_s)`; the two must agree.
pub fn characteristic_number(k: u64, t: &Fraction) -> Result<BigUint> {
    let address = left_tree_address(t)?;
    let triple = markov_tree::triple_at(k, &address, TreeKind::Left);
    let via_matrix = cohn::triple_at(k, -(k as i64), &address, TreeKind::Left);
    agree(k, t, &triple, via_matrix.q())
}

fn agree(k: u64, t: &Fraction, triple: &markov_tree::MarkovTriple, c_t: &Mat2) -> Result<BigUint> {
    let from_matrix = positive_natural(&c_t.m11, "(1,1)-entry of C_t")?;
    let from_triple = characteristic_from_triple(triple.a(), triple.b(), triple.c())?;
    if from_matrix != from_triple {
        return Err(invariant(format!(
            "u_{t} for k = {k}: matrix gives {from_matrix}, congruence gives {from_triple}"
        )));
    }
    Ok(from_matrix)
}

/// `{k, t, m_t, u_t}`; `u_t` is absent at the endpoints `0/1` and `1/1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    #[serde(with = "decimal::display")]
    pub k: u64,
    pub t: Fraction,
    #[serde(with = "decimal::nat")]
    pub m_t: BigUint,
    #[serde(with = "decimal::opt_display")]
    pub u_t: Option<BigUint>,
}

/// The label record of `t` in `[0, 1]`.
pub fn label(k: u64, t: &Fraction) -> Result<Label> {
    let m_t = markov_label(k, t)?;
    let u_t = if *t == Fraction::ZERO || *t == Fraction::ONE {
        None
    } else {
        Some(characteristic_number(k, t)?)
    };
    Ok(Label { k, t: *t, m_t, u_t })
}

/// A labelled vertex of LMT(k) together with its Farey triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledVertex {
    pub farey: FareyTriple,
    pub triple: markov_tree::MarkovTriple,
    pub u_t: BigUint,
}

/// Every interior label to `depth` below `1/2`, in (depth, address) order,
/// with `u_t` checked by both routes.
pub fn labelled_vertices(k: u64, depth: usize) -> Result<Vec<LabelledVertex>> {
    let half: TreeAddress = vec![Side::L].into();
    let farey_root = farey_triple_at(&half)?;
    let mut farey = vec![farey_root];
    let mut fractions = vec![farey_root];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(fractions.len() * 2);
        for t in &fractions {
            let (l, r) = farey_children(t)?;
            next.push(l);
            next.push(r);
        }
        farey.extend_from_slice(&next);
        fractions = next;
    }
    let markov: Vec<_> = markov_tree::enumerate_levels(k, depth, TreeKind::Left)
        .into_iter()
        .flatten()
        .collect();
    let matrices = cohn::enumerate_cohn(k, -(k as i64), depth, TreeKind::Left);
    farey
        .into_par_iter()
        .zip(markov.into_par_iter())
        .zip(matrices.into_par_iter())
        .map(|((f, triple), c)| {
            let u_t = agree(k, &f.mid, &triple, c.q())?;
            Ok(LabelledVertex { farey: f, triple, u_t })
        })
        .collect()
}
