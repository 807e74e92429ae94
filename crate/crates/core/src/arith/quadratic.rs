use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{isqrt, square_free_decomposition, PrimePower};
use crate::{Error, Int, Rat, Result};

/// An exact element `a + b√d` with `a, b` rational and `d` square-free.
///
/// Rational values are stored with `b = 0` and `d = 1`; they combine with any
/// radicand.  Arithmetic between two irrational values with different
/// radicands panics, [`quad_compare`] reports it as a domain error.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticValue {
    a: Rat,
    b: Rat,
    d: u64,
}

impl QuadraticValue {
    /// Builds `a + b√d`, extracting square factors of `d`.
    pub fn new(a: Rat, b: Rat, d: u64) -> Self {
        let (k, d) = square_free_decomposition(d);
        let b = b * Rat::from_integer(Int::from(k));
        Self::canon(a, b, d)
    }

    fn canon(a: Rat, b: Rat, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            QuadraticValue { a, b: Rat::zero(), d: 1 }
        } else if d == 1 {
            QuadraticValue { a: a + b, b: Rat::zero(), d: 1 }
        } else {
            QuadraticValue { a, b, d }
        }
    }

    pub fn rational(a: Rat) -> Self {
        QuadraticValue { a, b: Rat::zero(), d: 1 }
    }

    pub fn integer(a: impl Into<Int>) -> Self {
        Self::rational(Rat::from_integer(a.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `√n`.
    pub fn sqrt_of(n: u64) -> Self {
        Self::new(Rat::zero(), Rat::one(), n)
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    pub fn as_integer(&self) -> Option<Int> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    fn common_d(&self, other: &Self) -> Option<u64> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Some(1),
            (true, false) => Some(other.d),
            (false, true) => Some(self.d),
            (false, false) => (self.d == other.d).then_some(self.d),
        }
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.common_d(other).is_some()
    }

    fn expect_d(&self, other: &Self) -> u64 {
        self.common_d(other).unwrap_or_else(|| {
            panic!(
                "incompatible radicands √{} and √{} in surd arithmetic",
                self.d, other.d
            )
        })
    }

    /// `a - b√d`.
    pub fn conjugate(&self) -> Self {
        QuadraticValue { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² - d b²`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(Int::from(self.d))
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(QuadraticValue::canon(c.a / &n, c.b / &n, self.d))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuadraticValue::canon(&self.a * r, &self.b * r, self.d)
    }

    /// Exact sign, using at most one squaring.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rat::zero());
        let sb = self.b.cmp(&Rat::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rat::from_integer(Int::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // a² = b²d with b ≠ 0 forces d to be a square, excluded by construction.
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// `⌊self⌋`, decided exactly.
    pub fn floor(&self) -> Int {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        // b√d = sgn(b)·√(b²d); bracket it with the integer square root.
        let b2d = &self.b * &self.b * Rat::from_integer(Int::from(self.d));
        let approx = &self.a
            + if self.b.is_negative() {
                -Rat::from_integer(isqrt(&b2d.floor().to_integer()).unwrap_or_default())
            } else {
                Rat::from_integer(isqrt(&b2d.floor().to_integer()).unwrap_or_default())
            };
        let mut k: Int = approx.floor().to_integer() - 2;
        while (self - &Self::integer(k.clone() + 1)).signum() != Ordering::Less {
            k += 1;
        }
        k
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }
}

impl fmt::Debug for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})√{}", self.b, self.d)
        } else {
            write!(f, "{} + ({})√{}", self.a, self.b, self.d)
        }
    }
}

impl From<Rat> for QuadraticValue {
    fn from(r: Rat) -> Self {
        Self::rational(r)
    }
}

impl From<Int> for QuadraticValue {
    fn from(i: Int) -> Self {
        Self::integer(i)
    }
}

impl<'a> Add<&'a QuadraticValue> for &'a QuadraticValue {
    type Output = QuadraticValue;
    fn add(self, rhs: &QuadraticValue) -> QuadraticValue {
        let d = self.expect_d(rhs);
        QuadraticValue::canon(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadraticValue> for &'a QuadraticValue {
    type Output = QuadraticValue;
    fn sub(self, rhs: &QuadraticValue) -> QuadraticValue {
        let d = self.expect_d(rhs);
        QuadraticValue::canon(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadraticValue> for &'a QuadraticValue {
    type Output = QuadraticValue;
    fn mul(self, rhs: &QuadraticValue) -> QuadraticValue {
        let d = self.expect_d(rhs);
        let dr = Rat::from_integer(Int::from(d));
        QuadraticValue::canon(
            &self.a * &rhs.a + &self.b * &rhs.b * dr,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Neg for &QuadraticValue {
    type Output = QuadraticValue;
    fn neg(self) -> QuadraticValue {
        QuadraticValue { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<QuadraticValue> for QuadraticValue {
            type Output = QuadraticValue;
            fn $f(self, rhs: QuadraticValue) -> QuadraticValue {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadraticValue> for QuadraticValue {
            type Output = QuadraticValue;
            fn $f(self, rhs: &QuadraticValue) -> QuadraticValue {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadraticValue {
    type Output = QuadraticValue;
    fn neg(self) -> QuadraticValue {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct QuadraticRepr {
    a: String,
    b: String,
    d: u64,
}

impl Serialize for QuadraticValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadraticRepr {
            a: self.a.to_string(),
            b: self.b.to_string(),
            d: self.d,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = QuadraticRepr::deserialize(de)?;
        let a: Rat = r.a.parse().map_err(serde::de::Error::custom)?;
        let b: Rat = r.b.parse().map_err(serde::de::Error::custom)?;
        Ok(QuadraticValue::new(a, b, r.d))
    }
}

/// Exact sign of `x - y`.
pub fn quad_compare(x: &QuadraticValue, y: &QuadraticValue) -> Result<Ordering> {
    if !x.compatible(y) {
        return Err(Error::Domain(format!(
            "cannot compare surds over √{} and √{}",
            x.d, y.d
        )));
    }
    Ok((x - y).signum())
}

/// Sign of `{2√q} - theta` for non-square `q`.
///
/// The comparison is `2√q` against `R = m + theta`: when `R > 0` both sides
/// are squared and `4q - R²` is a surd over the radicand of `theta`.
pub fn frac_2sqrtq_cmp(q: &PrimePower, theta: &QuadraticValue) -> Result<Ordering> {
    if q.is_square() {
        return Err(Error::Domain(format!(
            "q = {} is a square: the fractional part of 2√q is 0",
            q.q()
        )));
    }
    let r = theta + &QuadraticValue::integer(q.m());
    if r.signum() != Ordering::Greater {
        return Ok(Ordering::Greater);
    }
    let diff = &QuadraticValue::integer(4 * q.q()) - &(&r * &r);
    match diff.signum() {
        Ordering::Equal => Err(Error::Internal(format!(
            "{{2√{}}} equals {theta}, impossible for non-square q",
            q.q()
        ))),
        s => Ok(s),
    }
}

/// `⌊t / (2√q)⌋`.
pub fn floor_over_2sqrtq(t: &Int, q: &PrimePower) -> Int {
    let four_q = Int::from(4u64) * q.q_int();
    let u = t.abs();
    let u2 = &u * &u;
    let k = isqrt(&(&u2 / &four_q)).expect("non-negative");
    if !t.is_negative() {
        k
    } else if &k * &k * &four_q == u2 {
        -k
    } else {
        -k - 1
    }
}

fn half(n: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(2))
}

/// `φ₁ = (-1 + √5)/2`.
pub fn phi1() -> QuadraticValue {
    QuadraticValue::new(half(-1), half(1), 5)
}

/// `φ₂ = (-1 - √5)/2`.
pub fn phi2() -> QuadraticValue {
    QuadraticValue::new(half(-1), half(-1), 5)
}

pub fn sqrt2_minus_1() -> QuadraticValue {
    QuadraticValue::new(-Rat::one(), Rat::one(), 2)
}

pub fn sqrt3_minus_1() -> QuadraticValue {
    QuadraticValue::new(-Rat::one(), Rat::one(), 3)
}
