use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::QuadraticValue;
use crate::{Error, Int, Rat, Result};

/// Slack applied on top of the library's rounding for transcendental functions.
const TRANSCENDENTAL_SLACK_BITS: usize = 8;

pub const MIN_PRECISION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        }
    }
}

/// Working precision and constant cache for interval evaluation.
pub struct Working {
    prec: usize,
    cc: Consts,
}

impl Working {
    pub fn new(prec: usize) -> Result<Self> {
        if prec < MIN_PRECISION {
            return Err(Error::Domain(format!(
                "precision {prec} bits is below the floor of {MIN_PRECISION}"
            )));
        }
        let cc = Consts::new().map_err(|e| Error::Internal(format!("constant cache: {e:?}")))?;
        Ok(Working { prec, cc })
    }

    pub fn precision(&self) -> usize {
        self.prec
    }
}

impl fmt::Debug for Working {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Working").field("prec", &self.prec).finish()
    }
}

fn check(x: BigFloat) -> Result<BigFloat> {
    if x.is_nan() || x.is_inf() {
        Err(Error::Internal(format!("floating-point evaluation produced {x}")))
    } else {
        Ok(x)
    }
}

fn int_to_bf(n: &Int) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, MIN_PRECISION);
    }
    let words: Vec<Word> = n.magnitude().to_u64_digits();
    let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
    let e = (words.len() * 64) as i32;
    BigFloat::from_words(&words, sign, e)
}

/// The exact dyadic rational equal to a finite `BigFloat`.
fn bf_to_rat(x: &BigFloat) -> Result<Rat> {
    let (m, _, s, e, _) = x
        .as_raw_parts()
        .ok_or_else(|| Error::Internal(format!("non-finite float {x}")))?;
    let mant = Int::from(BigUint::new(
        m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect(),
    ));
    let shift = e as i64 - (m.len() as i64) * 64;
    let mant = if s == Sign::Neg { -mant } else { mant };
    Ok(if shift >= 0 {
        Rat::from_integer(mant << shift as usize)
    } else {
        Rat::new(mant, Int::one() << (-shift) as usize)
    })
}

fn bf_cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

/// A closed interval `[lo, hi]` of binary floats enclosing an exact real.
#[derive(Clone)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn from_int(n: &Int, w: &Working) -> Self {
        let x = int_to_bf(n);
        let mut lo = x.clone();
        let mut hi = x;
        // Rounding only bites when n has more significant bits than the precision.
        let _ = lo.set_precision(w.prec, RoundingMode::Down);
        let _ = hi.set_precision(w.prec, RoundingMode::Up);
        Interval { lo, hi }
    }

    pub fn from_rat(r: &Rat, w: &Working) -> Self {
        let n = int_to_bf(r.numer());
        let d = int_to_bf(r.denom());
        Interval {
            lo: n.div(&d, w.prec, RoundingMode::Down),
            hi: n.div(&d, w.prec, RoundingMode::Up),
        }
    }

    pub fn from_quadratic(x: &QuadraticValue, w: &mut Working) -> Result<Self> {
        let a = Interval::from_rat(x.a(), w);
        if x.is_rational() {
            return Ok(a);
        }
        let b = Interval::from_rat(x.b(), w);
        let s = Interval::from_int(&Int::from(x.d()), w).sqrt(w)?;
        Ok(a.add(&b.mul(&s, w), w))
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn lo_rat(&self) -> Result<Rat> {
        bf_to_rat(&self.lo)
    }

    pub fn hi_rat(&self) -> Result<Rat> {
        bf_to_rat(&self.hi)
    }

    pub fn add(&self, o: &Interval, w: &Working) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo, w.prec, RoundingMode::Down),
            hi: self.hi.add(&o.hi, w.prec, RoundingMode::Up),
        }
    }

    pub fn sub(&self, o: &Interval, w: &Working) -> Interval {
        Interval {
            lo: self.lo.sub(&o.hi, w.prec, RoundingMode::Down),
            hi: self.hi.sub(&o.lo, w.prec, RoundingMode::Up),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    fn hull<F>(&self, o: &Interval, f: F) -> Interval
    where
        F: Fn(&BigFloat, &BigFloat, RoundingMode) -> BigFloat,
    {
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for (x, y) in pairs {
            let l = f(x, y, RoundingMode::Down);
            let h = f(x, y, RoundingMode::Up);
            if lo.as_ref().is_none_or(|c| bf_cmp(&l, c) == Ordering::Less) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|c| bf_cmp(&h, c) == Ordering::Greater) {
                hi = Some(h);
            }
        }
        Interval { lo: lo.expect("four candidates"), hi: hi.expect("four candidates") }
    }

    pub fn mul(&self, o: &Interval, w: &Working) -> Interval {
        let p = w.prec;
        self.hull(o, |x, y, rm| x.mul(y, p, rm))
    }

    pub fn div(&self, o: &Interval, w: &Working) -> Result<Interval> {
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return Err(Error::Internal("interval division by an interval containing 0".into()));
        }
        let p = w.prec;
        Ok(self.hull(o, |x, y, rm| x.div(y, p, rm)))
    }

    pub fn powi(&self, e: u64, w: &Working) -> Interval {
        let mut acc = Interval::from_int(&Int::one(), w);
        for _ in 0..e {
            acc = acc.mul(self, w);
        }
        acc
    }

    pub fn sqrt(&self, w: &Working) -> Result<Interval> {
        if self.lo.is_negative() {
            return Err(Error::Internal("square root of a negative interval".into()));
        }
        Ok(Interval {
            lo: check(self.lo.sqrt(w.prec, RoundingMode::Down))?,
            hi: check(self.hi.sqrt(w.prec, RoundingMode::Up))?,
        })
    }

    fn widen(&self, w: &Working) -> Interval {
        let rel = BigFloat::from_word(1, w.prec);
        let mut eps = rel.clone();
        eps.set_exponent(1 - (w.prec - TRANSCENDENTAL_SLACK_BITS) as i32);
        let down = rel.sub(&eps, w.prec, RoundingMode::Down);
        let up = rel.add(&eps, w.prec, RoundingMode::Up);
        let scale = |x: &BigFloat, f: &BigFloat, rm| x.mul(f, w.prec, rm);
        let lo = if self.lo.is_negative() {
            scale(&self.lo, &up, RoundingMode::Down)
        } else {
            scale(&self.lo, &down, RoundingMode::Down)
        };
        let hi = if self.hi.is_negative() {
            scale(&self.hi, &down, RoundingMode::Up)
        } else {
            scale(&self.hi, &up, RoundingMode::Up)
        };
        Interval { lo, hi }
    }

    pub fn exp(&self, w: &mut Working) -> Result<Interval> {
        let p = w.prec;
        let lo = check(self.lo.exp(p, RoundingMode::Down, &mut w.cc))?;
        let hi = check(self.hi.exp(p, RoundingMode::Up, &mut w.cc))?;
        Ok(Interval { lo, hi }.widen(w))
    }

    pub fn ln(&self, w: &mut Working) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(Error::Internal("logarithm of a non-positive interval".into()));
        }
        let p = w.prec;
        let lo = check(self.lo.ln(p, RoundingMode::Down, &mut w.cc))?;
        let hi = check(self.hi.ln(p, RoundingMode::Up, &mut w.cc))?;
        Ok(Interval { lo, hi }.widen(w))
    }

    /// `self^y` for a positive base.
    pub fn pow(&self, y: &Interval, w: &mut Working) -> Result<Interval> {
        self.ln(w)?.mul(y, w).exp(w)
    }

    /// The safe endpoint for a bound of the given direction.
    pub fn directed(&self, direction: Direction, w: &Working) -> Result<DirectedFloat> {
        let end = match direction {
            Direction::Lower => &self.lo,
            Direction::Upper => &self.hi,
        };
        Ok(DirectedFloat {
            value: bf_to_rat(end)?,
            direction,
            precision: w.prec,
        })
    }

    pub fn contains_rat(&self, r: &Rat) -> Result<bool> {
        Ok(&self.lo_rat()? <= r && r <= &self.hi_rat()?)
    }
}

/// A float rounded toward the safe side of a bound, held as its exact dyadic value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedFloat {
    value: Rat,
    direction: Direction,
    precision: usize,
}

impl DirectedFloat {
    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Nearest `f64` on the safe side of the exact value.
    pub fn to_f64(&self) -> f64 {
        let mut f = self.value.to_f64().unwrap_or(match self.direction {
            Direction::Lower => f64::NEG_INFINITY,
            Direction::Upper => f64::INFINITY,
        });
        if !f.is_finite() {
            return f;
        }
        loop {
            let Some(fr) = Rat::from_float(f) else { return f };
            match (self.direction, fr.cmp(&self.value)) {
                (Direction::Lower, Ordering::Greater) => f = f.next_down(),
                (Direction::Upper, Ordering::Less) => f = f.next_up(),
                _ => return f,
            }
        }
    }
}

impl Serialize for DirectedFloat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn rational_round_trip_is_exact_for_dyadics() {
        let w = Working::new(96).unwrap();
        for r in [rat(3, 8), rat(-5, 1), rat(0, 1), rat(1i64 << 40, 1)] {
            let i = Interval::from_rat(&r, &w);
            assert_eq!(i.lo_rat().unwrap(), r);
            assert_eq!(i.hi_rat().unwrap(), r);
        }
    }

    #[test]
    fn third_is_enclosed() {
        let w = Working::new(64).unwrap();
        let i = Interval::from_rat(&rat(1, 3), &w);
        assert!(i.lo_rat().unwrap() < rat(1, 3));
        assert!(i.hi_rat().unwrap() > rat(1, 3));
        assert!(i.hi_rat().unwrap() - i.lo_rat().unwrap() < rat(1, 1i64 << 60));
    }

    #[test]
    fn big_integers_round_outward() {
        let w = Working::new(64).unwrap();
        let n = (Int::one() << 200) + 1;
        let i = Interval::from_int(&n, &w);
        assert!(i.lo_rat().unwrap() < Rat::from_integer(n.clone()));
        assert!(i.hi_rat().unwrap() > Rat::from_integer(n));
    }

    #[test]
    fn sqrt_two_encloses() {
        let mut w = Working::new(96).unwrap();
        let i = Interval::from_quadratic(&QuadraticValue::sqrt_of(2), &mut w).unwrap();
        let lo = i.lo_rat().unwrap();
        let hi = i.hi_rat().unwrap();
        assert!(&lo * &lo < rat(2, 1));
        assert!(&hi * &hi > rat(2, 1));
    }

    #[test]
    fn exp_ln_enclose() {
        let mut w = Working::new(96).unwrap();
        let one = Interval::from_int(&Int::one(), &w);
        let e = one.exp(&mut w).unwrap();
        // e lies in (2.718281828, 2.718281829).
        assert!(e.lo_rat().unwrap() > rat(2_718_281_828i64, 1_000_000_000));
        assert!(e.hi_rat().unwrap() < rat(2_718_281_829i64, 1_000_000_000));
        let back = e.ln(&mut w).unwrap();
        assert!(back.contains_rat(&rat(1, 1)).unwrap());
    }

    #[test]
    fn directed_f64_is_safe() {
        let w = Working::new(96).unwrap();
        let i = Interval::from_rat(&rat(1, 10), &w);
        let lo = i.directed(Direction::Lower, &w).unwrap();
        let hi = i.directed(Direction::Upper, &w).unwrap();
        assert!(Rat::from_float(lo.to_f64()).unwrap() <= rat(1, 10));
        assert!(Rat::from_float(hi.to_f64()).unwrap() >= rat(1, 10));
        assert_eq!(lo.to_f64().next_up(), hi.to_f64());
    }

    #[test]
    fn precision_floor() {
        assert!(Working::new(32).is_err());
    }
}
