use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// A 2x2 integer matrix `[[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub m11: BigInt,
    pub m12: BigInt,
    pub m21: BigInt,
    pub m22: BigInt,
}

impl Mat2 {
    pub fn new(m11: BigInt, m12: BigInt, m21: BigInt, m22: BigInt) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn from_i64(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        Self::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0, 0, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.m11 * &self.m22 - &self.m12 * &self.m21
    }

    pub fn trace(&self) -> BigInt {
        &self.m11 + &self.m22
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().is_one()
    }

    /// `[[m22, -m12], [-m21, m11]]`; the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Self::new(
            self.m22.clone(),
            -&self.m12,
            -&self.m21,
            self.m11.clone(),
        )
    }

    /// Inverse of a determinant-1 matrix.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unimodular() {
            return Err(domain(format!("{self} has determinant {}, not 1", self.det())));
        }
        Ok(self.adjugate())
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(s * &self.m11, s * &self.m12, s * &self.m21, s * &self.m22)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.m11, &self.m12, &self.m21, &self.m22]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.m11 * &o.m11 + &self.m12 * &o.m21,
            &self.m11 * &o.m12 + &self.m12 * &o.m22,
            &self.m21 * &o.m11 + &self.m22 * &o.m21,
            &self.m21 * &o.m12 + &self.m22 * &o.m22,
        )
    }
}

impl Add for &Mat2 {
    type Output = Mat2;

    fn add(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.m11 + &o.m11,
            &self.m12 + &o.m12,
            &self.m21 + &o.m21,
            &self.m22 + &o.m22,
        )
    }
}

impl Sub for &Mat2 {
    type Output = Mat2;

    fn sub(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.m11 - &o.m11,
            &self.m12 - &o.m12,
            &self.m21 - &o.m21,
            &self.m22 - &o.m22,
        )
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        Mat2::new(-&self.m11, -&self.m12, -&self.m21, -&self.m22)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m11, self.m12, self.m21, self.m22)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [self.m11.to_string(), self.m12.to_string()],
            [self.m21.to_string(), self.m22.to_string()],
        ];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[String; 2]; 2]>::deserialize(d)?;
        let parse = |s: &String| s.parse::<BigInt>().map_err(D::Error::custom);
        Ok(Mat2::new(
            parse(&rows[0][0])?,
            parse(&rows[0][1])?,
            parse(&rows[1][0])?,
            parse(&rows[1][1])?,
        ))
    }
}

/// `tr(A) = tr(A^-1)`, `tr(AB) = tr(A)tr(B) - tr(AB^-1)` and
/// `A^2 = tr(A)A - I`, for determinant-1 `a` and `b`.
pub fn trace_lemmas_hold(a: &Mat2, b: &Mat2) -> bool {
    let (Ok(a_inv), Ok(b_inv)) = (a.inverse(), b.inverse()) else {
        return false;
    };
    let first = a.trace() == a_inv.trace();
    let second = (a * b).trace() == a.trace() * b.trace() - (a * &b_inv).trace();
    let third = a * a == &a.scale(&a.trace()) - &Mat2::identity();
    first && second && third
}

/// The Fricke-type identity
///
/// ```text
/// x^2 + y^2 + z^2 + (ad + bc)x + (bd + ca)y + (cd + ab)z
///     + a^2 + b^2 + c^2 + d^2 + abcd - 4 = xyz
/// ```
///
/// with `a, b, c, d = -tr A, -tr B, -tr C, -tr ABC` and
/// `x, y, z = -tr BC, -tr CA, -tr AB`: each of `x, y, z` is the pair
/// product avoiding the matrix whose trace multiplies it alongside `d`.
/// Returns false if any input has `det != 1`.
pub fn trace_identity_check(a: &Mat2, b: &Mat2, c: &Mat2) -> bool {
    if !(a.is_unimodular() && b.is_unimodular() && c.is_unimodular()) {
        return false;
    }
    let (x, y, z) = (-(b * c).trace(), -(c * a).trace(), -(a * b).trace());
    fricke_polynomial_vanishes(a, b, c, &x, &y, &z)
}

fn fricke_polynomial_vanishes(a: &Mat2, b: &Mat2, c: &Mat2, x: &BigInt, y: &BigInt, z: &BigInt) -> bool {
    let abc = &(a * b) * c;
    let ta = -a.trace();
    let tb = -b.trace();
    let tc = -c.trace();
    let d = -abc.trace();
    let lhs = x * x + y * y + z * z
        + (&ta * &d + &tb * &tc) * x
        + (&tb * &d + &tc * &ta) * y
        + (&tc * &d + &ta * &tb) * z
        + &ta * &ta
        + &tb * &tb
        + &tc * &tc
        + &d * &d
        + &ta * &tb * &tc * &d
        - BigInt::from(4);
    lhs == x * y * z
}

/// A random product of at most `max_len` factors drawn from
/// `[[1, +-1], [0, 1]]` and `[[1, 0], [+-1, 1]]`.
pub fn random_unimodular<R: rand::Rng>(rng: &mut R, max_len: usize) -> Mat2 {
    let len = rng.gen_range(0..=max_len);
    let mut m = Mat2::identity();
    for _ in 0..len {
        let s: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let g = if rng.gen_bool(0.5) {
            Mat2::from_i64(1, s, 0, 1)
        } else {
            Mat2::from_i64(1, 0, s, 1)
        };
        m = &m * &g;
    }
    m
}
