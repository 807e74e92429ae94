//! Upper and lower bounds on `#A(F_q)`, and the lower bounds for Jacobians.
//!
//! Every bound is returned as a [`BoundEntry`] inside a [`BoundReport`].
//! Values stay exact (integer, rational or an element of `Q(√q)`) wherever
//! the formula allows; the transcendental ones (Specht's ratio, Perret's
//! power of `(√q+1)/(√q-1)`) are enclosed in intervals and rounded toward
//! the safe side.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{
    binomial_int, floor_over_2sqrtq, pow_rat, quad_compare, DirectedFloat, Direction, Interval,
    PrimePower, QuadraticValue, Working,
};
use crate::weil::{family_product, WeilPolynomial};
use crate::zeta::{exp_partial_sum, x_k};
use crate::{Error, Int, Rat, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Surd(QuadraticValue),
    Rational(Rat),
    Float(DirectedFloat),
}

impl BoundValue {
    /// Rational surds are stored as [`BoundValue::Rational`].
    pub fn from_quadratic(x: QuadraticValue) -> Self {
        match x.as_rational() {
            Some(r) => BoundValue::Rational(r.clone()),
            None => BoundValue::Surd(x),
        }
    }

    pub fn integer(n: Int) -> Self {
        BoundValue::Rational(Rat::from_integer(n))
    }

    /// The exact value; a directed float is the dyadic rational it rounded to.
    pub fn as_quadratic(&self) -> QuadraticValue {
        match self {
            BoundValue::Surd(x) => x.clone(),
            BoundValue::Rational(r) => QuadraticValue::rational(r.clone()),
            BoundValue::Float(f) => QuadraticValue::rational(f.value().clone()),
        }
    }

    pub fn cmp_value(&self, other: &BoundValue) -> Result<Ordering> {
        quad_compare(&self.as_quadratic(), &other.as_quadratic())
    }

    pub fn cmp_int(&self, n: &Int) -> Result<Ordering> {
        quad_compare(&self.as_quadratic(), &QuadraticValue::integer(n.clone()))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, BoundValue::Float(_))
    }

    /// Nearest double for exact values, the outward-rounded double for floats.
    pub fn to_f64(&self) -> f64 {
        match self {
            BoundValue::Surd(x) => x.to_f64(),
            BoundValue::Rational(r) => num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            BoundValue::Float(f) => f.to_f64(),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Surd(x) => write!(f, "{x}"),
            BoundValue::Rational(r) => write!(f, "{r}"),
            BoundValue::Float(x) => write!(f, "{}", x.to_f64()),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundValue::Surd(x) => x.serialize(s),
            BoundValue::Rational(r) => s.serialize_str(&r.to_string()),
            BoundValue::Float(x) => x.serialize(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundEntry {
    pub bound: String,
    pub direction: Direction,
    pub value: Option<BoundValue>,
    pub applicable: bool,
    pub reason: String,
}

impl BoundEntry {
    fn new(bound: &str, direction: Direction, value: BoundValue, reason: impl Into<String>) -> Self {
        if let BoundValue::Float(f) = &value {
            assert_eq!(f.direction(), direction, "float for {bound} rounded the wrong way");
        }
        BoundEntry {
            bound: bound.to_string(),
            direction,
            value: Some(value),
            applicable: true,
            reason: reason.into(),
        }
    }

    fn lower(bound: &str, value: BoundValue, reason: impl Into<String>) -> Self {
        Self::new(bound, Direction::Lower, value, reason)
    }

    fn upper(bound: &str, value: BoundValue, reason: impl Into<String>) -> Self {
        Self::new(bound, Direction::Upper, value, reason)
    }

    fn inapplicable(bound: &str, direction: Direction, reason: impl Into<String>) -> Self {
        BoundEntry {
            bound: bound.to_string(),
            direction,
            value: None,
            applicable: false,
            reason: reason.into(),
        }
    }

    /// Keeps the value but records that a hypothesis is not met.
    fn unmet(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.reason = reason.into();
        self
    }

    pub fn exact(&self) -> bool {
        self.value.as_ref().is_none_or(BoundValue::is_exact)
    }
}

impl Serialize for BoundEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundEntry", 6)?;
        st.serialize_field("bound", &self.bound)?;
        st.serialize_field("direction", &self.direction)?;
        st.serialize_field("exact", &self.exact())?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("applicable", &self.applicable)?;
        st.serialize_field("reason", &self.reason)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub g: usize,
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub tau: Int,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    fn new(q: &PrimePower, g: usize, tau: &Int) -> Self {
        BoundReport { q: q.q(), g, tau: tau.clone(), entries: Vec::new() }
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.bound == name)
    }

    /// Value of an applicable entry.
    pub fn value(&self, name: &str) -> Option<&BoundValue> {
        self.get(name).filter(|e| e.applicable).and_then(|e| e.value.as_ref())
    }

    pub fn applicable(&self) -> impl Iterator<Item = (&BoundEntry, &BoundValue)> {
        self.entries
            .iter()
            .filter(|e| e.applicable)
            .filter_map(|e| e.value.as_ref().map(|v| (e, v)))
    }

    /// Entries of `self` and `other` in one report.
    pub fn merged(mut self, other: BoundReport) -> BoundReport {
        self.entries.extend(other.entries);
        self
    }

    /// Names of applicable entries on the wrong side of `x`.
    pub fn violations(&self, x: &QuadraticValue) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (e, v) in self.applicable() {
            let c = quad_compare(&v.as_quadratic(), x)?;
            let bad = match e.direction {
                Direction::Lower => c == Ordering::Greater,
                Direction::Upper => c == Ordering::Less,
            };
            if bad {
                out.push(format!("{} = {v} ({})", e.bound, e.direction.as_str()));
            }
        }
        Ok(out)
    }

    /// Pairs (lower, upper) of applicable entries that cross.
    pub fn crossings(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (lo, lv) in self.applicable().filter(|(e, _)| e.direction == Direction::Lower) {
            for (hi, hv) in self.applicable().filter(|(e, _)| e.direction == Direction::Upper) {
                if lv.cmp_value(hv)? == Ordering::Greater {
                    out.push((lo.bound.clone(), hi.bound.clone()));
                }
            }
        }
        Ok(out)
    }
}

fn rat_of(n: impl Into<Int>) -> Rat {
    Rat::from_integer(n.into())
}

fn serre_check(q: &PrimePower, g: usize, tau: &Int) -> Result<()> {
    let limit = Int::from(g) * q.m_int();
    if tau.abs() > limit {
        return Err(Error::SerreViolation { tau: tau.clone(), limit });
    }
    Ok(())
}

fn require_genus(g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::Domain("the bounds need g ≥ 1".into()));
    }
    Ok(())
}

/// `q + 1 + τ/g`.
fn mean_factor(q: &PrimePower, g: usize, tau: &Int) -> Rat {
    rat_of(q.q_int() + 1) + Rat::new(tau.clone(), Int::from(g))
}

fn upow(x: &QuadraticValue, e: i64) -> QuadraticValue {
    if e >= 0 {
        x.pow(e as u32)
    } else {
        x.pow((-e) as u32).inv().expect("non-zero base")
    }
}

/// Specht's constant for the interval `[(√q-1)², (√q+1)²]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpechtParams {
    /// `((√q+1)/(√q-1))²`.
    pub h: QuadraticValue,
    /// `S(h)`, rounded up.
    pub s: DirectedFloat,
    /// `M = 1/S(h)`, rounded down.
    pub m: DirectedFloat,
    /// `1 - 2/q`, or `0.261` when `q = 2`.
    #[serde(serialize_with = "serialize_rat")]
    pub m_rational: Rat,
}

fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn sqrt_q_plus_minus(q: &PrimePower) -> (QuadraticValue, QuadraticValue) {
    let one = QuadraticValue::one();
    let sq = q.sqrt_q();
    (&sq + &one, &sq - &one)
}

impl SpechtParams {
    pub fn new(q: &PrimePower, prec: usize) -> Result<Self> {
        let (sp, sm) = sqrt_q_plus_minus(q);
        let ratio = &sp * &sm.inv().expect("q > 1");
        let h = &ratio * &ratio;

        let mut w = Working::new(prec)?;
        let hi = Interval::from_quadratic(&h, &mut w)?;
        let one = Interval::from_int(&Int::one(), &w);
        // S(h) = e^{z-1}/z and M = z e^{1-z} with z = ln h/(h-1).
        let z = hi.ln(&mut w)?.div(&hi.sub(&one, &w), &w)?;
        let m = z.mul(&one.sub(&z, &w).exp(&mut w)?, &w);
        let s = z.sub(&one, &w).exp(&mut w)?.div(&z, &w)?;

        let m_rational = if q.q() == 2 {
            Rat::new(Int::from(261), Int::from(1000))
        } else {
            Rat::one() - Rat::new(Int::from(2), q.q_int())
        };
        Ok(SpechtParams {
            h,
            s: s.directed(Direction::Upper, &w)?,
            m: m.directed(Direction::Lower, &w)?,
            m_rational,
        })
    }
}

/// `(q+m)^d (q+1+m)^{g-d}` for defect `d ∈ {1, 2}`.
pub fn defect_upper(q: &PrimePower, g: usize, d: usize) -> Result<Int> {
    if !(1..=2).contains(&d) || g < d {
        return Err(Error::NotApplicable(format!(
            "the defect bound covers d ∈ {{1, 2}} with g ≥ d, got d = {d}, g = {g}"
        )));
    }
    let b = q.q_int() + q.m_int() + 1;
    Ok(num_traits::pow(&b - 1, d) * num_traits::pow(b, g - d))
}

/// `(q+1+⌊τ/g⌋)^{g-r} (q+2+⌊τ/g⌋)^r` for `r = τ mod g ∈ {1, g-1}`.
pub fn remainder_upper(q: &PrimePower, g: usize, tau: &Int) -> Result<Rat> {
    if g < 2 {
        return Err(Error::NotApplicable("the remainder bound needs g ≥ 2".into()));
    }
    let gi = Int::from(g);
    let (fl, r) = tau.div_mod_floor(&gi);
    let r = r.to_string().parse::<usize>().expect("0 ≤ r < g");
    if r != 1 && r != g - 1 {
        return Err(Error::NotApplicable(format!(
            "remainder r = {r} is neither 1 nor g-1 = {}",
            g - 1
        )));
    }
    let base: Int = q.q_int() + 1u32 + fl;
    Ok(rat_of(num_traits::pow(base.clone(), g - r) * num_traits::pow(base + 1, r)))
}

/// The Weil, trace, Serre, defect and remainder upper bounds.
pub fn upper_bounds(q: &PrimePower, g: usize, tau: &Int) -> Result<BoundReport> {
    require_genus(g)?;
    serre_check(q, g, tau)?;
    let mut rep = BoundReport::new(q, g, tau);
    let (sp, _) = sqrt_q_plus_minus(q);
    let weil = (&sp * &sp).pow(g as u32);
    rep.entries.push(BoundEntry::upper(
        "weil_upper",
        BoundValue::from_quadratic(weil),
        "(q+1+2√q)^g",
    ));
    let trace = pow_rat(&mean_factor(q, g, tau), g as u64);
    rep.entries.push(BoundEntry::upper("trace_upper", BoundValue::Rational(trace), "(q+1+τ/g)^g"));
    let serre = num_traits::pow(q.q_int() + q.m_int() + 1, g);
    rep.entries.push(BoundEntry::upper("serre_upper", BoundValue::integer(serre), "(q+1+m)^g"));

    let d = Int::from(g) * q.m_int() - tau;
    let defect = d.to_string().parse::<usize>().ok();
    rep.entries.push(match defect.map(|d| (d, defect_upper(q, g, d))) {
        Some((d, Ok(v))) => {
            BoundEntry::upper("defect_upper", BoundValue::integer(v), format!("defect d = {d}"))
        }
        _ => BoundEntry::inapplicable("defect_upper", Direction::Upper, format!("defect {d} ∉ {{1, 2}}")),
    });
    rep.entries.push(match remainder_upper(q, g, tau) {
        Ok(v) => BoundEntry::upper("remainder_upper", BoundValue::Rational(v), "τ mod g ∈ {1, g-1}"),
        Err(e) => BoundEntry::inapplicable("remainder_upper", Direction::Upper, e.to_string()),
    });
    Ok(rep)
}

/// `(q+1+τ-2(r-s)√q)(q+1+2√q)^r(q+1-2√q)^s` with `r`, `s` from `⌊τ/(2√q)⌋`.
pub fn perret_refined(q: &PrimePower, g: usize, tau: &Int) -> QuadraticValue {
    let k = floor_over_2sqrtq(tau, q);
    let gi = Int::from(g);
    let two = Int::from(2);
    let r = (&gi + &k).div_floor(&two);
    let s = (&gi - 1u32 - &k).div_floor(&two);
    let to_i64 = |x: &Int| x.to_string().parse::<i64>().expect("small exponent");
    let (ri, si) = (to_i64(&r), to_i64(&s));
    let (sp, sm) = sqrt_q_plus_minus(q);
    let first = &QuadraticValue::integer(q.q_int() + 1 + tau)
        - &q.sqrt_q().scale(&rat_of((&r - &s) * 2));
    &(&first * &upow(&(&sp * &sp), ri)) * &upow(&(&sm * &sm), si)
}

/// `(q-1)^g ((√q+1)/(√q-1))^{ω-2δ}` with `ω = τ/(2√q)`, rounded down.
pub fn perret(q: &PrimePower, g: usize, tau: &Int, prec: usize) -> Result<DirectedFloat> {
    let omega = q
        .sqrt_q_pow(-1)
        .scale(&Rat::new(tau.clone(), Int::from(2)));
    let delta = match omega.as_rational() {
        Some(w) if w.is_integer() && (w.to_integer() + Int::from(g)).is_even() => 0,
        _ => 1,
    };
    let exponent = &omega - &QuadraticValue::integer(2 * delta);
    let (sp, sm) = sqrt_q_plus_minus(q);
    let ratio = &sp * &sm.inv().expect("q > 1");

    let mut w = Working::new(prec)?;
    let base = Interval::from_quadratic(&ratio, &mut w)?;
    let e = Interval::from_quadratic(&exponent, &mut w)?;
    let v = base
        .pow(&e, &mut w)?
        .mul(&Interval::from_int(&num_traits::pow(q.q_int() - 1, g), &w), &w);
    v.directed(Direction::Lower, &w)
}

/// Inputs to [`lower_bounds`].
#[derive(Debug, Clone, Copy)]
pub enum LowerInput<'a> {
    Polynomial(&'a WeilPolynomial),
    Data { q: PrimePower, g: usize, tau: &'a Int },
}

/// The Specht, Serre–Weil, η and Perret lower bounds.
pub fn lower_bounds(input: LowerInput<'_>, prec: usize) -> Result<BoundReport> {
    let (q, g, tau, poly) = match input {
        LowerInput::Polynomial(p) => (*p.q(), p.g(), p.tau(), Some(p)),
        LowerInput::Data { q, g, tau } => (q, g, tau.clone(), None),
    };
    require_genus(g)?;
    serre_check(&q, g, &tau)?;
    let mut rep = BoundReport::new(&q, g, &tau);
    let sp = SpechtParams::new(&q, prec)?;
    let mean = mean_factor(&q, g, &tau);
    let mean_g = pow_rat(&mean, g as u64);

    let w = Working::new(prec)?;
    let specht = Interval::from_rat(sp.m.value(), &w)
        .powi(g as u64, &w)
        .mul(&Interval::from_rat(&mean_g, &w), &w);
    rep.entries.push(BoundEntry::lower(
        "specht_float",
        BoundValue::Float(specht.directed(Direction::Lower, &w)?),
        "M(q)^g (q+1+τ/g)^g",
    ));
    rep.entries.push(BoundEntry::lower(
        "specht_rational",
        BoundValue::Rational(pow_rat(&sp.m_rational, g as u64) * &mean_g),
        if q.q() == 2 { "0.261^g (q+1+τ/g)^g" } else { "(1-2/q)^g (q+1+τ/g)^g" },
    ));

    let qi = q.q_int();
    let low: Int = &qi + 1u32 - q.m_int();
    let gap = &qi - q.m_int();
    let gm_tau = Int::from(g) * q.m_int() + &tau;
    let swt = num_traits::pow(low.clone(), g) + num_traits::pow(gap.clone(), g - 1) * &gm_tau;
    rep.entries.push(BoundEntry::lower(
        "serre_weil_trace",
        BoundValue::integer(swt),
        "(q+1-m)^g + (q-m)^(g-1) (gm+τ)",
    ));
    rep.entries.push(BoundEntry::lower(
        "serre_weil",
        BoundValue::integer(num_traits::pow(low.clone(), g)),
        "(q+1-m)^g",
    ));

    let eta = match poly {
        None => Err("needs the full Weil polynomial".to_string()),
        Some(p) => p.eta().map_err(|e| e.to_string()),
    };
    match eta {
        Ok(eta) => {
            rep.entries.push(BoundEntry::lower(
                "eta_pure",
                BoundValue::Rational(pow_rat(&eta, g as u64)),
                format!("η^g with η = {eta}"),
            ));
            let mut mixed = &eta * rat_of(num_traits::pow(low, g - 1));
            if g >= 2 {
                mixed += &eta * Rat::new(Int::from(g - 1), Int::from(g))
                    * rat_of(num_traits::pow(gap, g - 2) * &gm_tau);
            }
            rep.entries.push(BoundEntry::lower(
                "eta_mixed",
                BoundValue::Rational(mixed),
                "η(q+1-m)^(g-1) + η((g-1)/g)(q-m)^(g-2)(gm+τ)",
            ));
        }
        Err(reason) => {
            rep.entries.push(BoundEntry::inapplicable("eta_pure", Direction::Lower, reason.clone()));
            rep.entries.push(BoundEntry::inapplicable("eta_mixed", Direction::Lower, reason));
        }
    }

    rep.entries.push(BoundEntry::lower(
        "perret",
        BoundValue::Float(perret(&q, g, &tau, prec)?),
        "(q-1)^g ((√q+1)/(√q-1))^(ω-2δ)",
    ));
    rep.entries.push(BoundEntry::lower(
        "perret_refined",
        BoundValue::from_quadratic(perret_refined(&q, g, &tau)),
        "(q+1+τ-2(r-s)√q)(q+1+2√q)^r(q+1-2√q)^s",
    ));
    Ok(rep)
}

/// `g(q-1)²/((g+1)(q+1)-N)` when the denominator is positive.
pub fn sigma2(q: &PrimePower, g: usize, n: &Int) -> Option<Rat> {
    let qi = q.q_int();
    let den: Int = Int::from(g + 1) * (&qi + 1u32) - n;
    den.is_positive()
        .then(|| Rat::new(Int::from(g) * num_traits::pow(&qi - 1, 2), den))
}

/// Lower bounds on the harmonic mean η (not on `#A(F_q)`).
pub fn eta_lower_estimates(q: &PrimePower, g: usize, n: Option<&Int>) -> Result<BoundReport> {
    require_genus(g)?;
    let tau = n.map(|n| n - q.q_int() - 1).unwrap_or_default();
    let mut rep = BoundReport::new(q, g, &tau);
    let (_, sm) = sqrt_q_plus_minus(q);
    rep.entries.push(BoundEntry::lower("sigma1", BoundValue::from_quadratic(&sm * &sm), "(√q-1)²"));
    rep.entries.push(match n {
        None => BoundEntry::inapplicable("sigma2", Direction::Lower, "needs N"),
        Some(n) => match sigma2(q, g, n) {
            Some(v) => BoundEntry::lower("sigma2", BoundValue::Rational(v), "g(q-1)²/((g+1)(q+1)-N)"),
            None => BoundEntry::inapplicable("sigma2", Direction::Lower, "(g+1)(q+1) - N ≤ 0"),
        },
    });
    let harmonic = BoundEntry::lower(
        "harmonic",
        BoundValue::integer(q.q_int() + 1 - q.m_int()),
        "q+1-m, valid for q ≥ 8",
    );
    rep.entries.push(if q.q() >= 8 {
        harmonic
    } else {
        harmonic.unmet("q+1-m needs q ≥ 8; η = 4/5 < 1 occurs for q = 2")
    });
    Ok(rep)
}

/// Which of the conditions (B) and (N) the variety is known to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub b: bool,
    pub n: bool,
}

impl Conditions {
    /// What a Jacobian satisfies.
    pub const JACOBIAN: Conditions = Conditions { b: true, n: true };
}

/// Inputs to [`jacobian_lower_bounds`]; `N = N_1`.
#[derive(Debug, Clone)]
pub struct JacobianInput {
    pub q: PrimePower,
    pub g: usize,
    pub n: Int,
    /// `B_1, B_2, ...` with at least `2g - 1` terms.
    pub b: Option<Vec<Int>>,
    pub eta: Option<Rat>,
    /// `(N_g, N_{g-1})`.
    pub extra: Option<(Int, Int)>,
    pub conditions: Conditions,
}

impl JacobianInput {
    pub fn new(q: PrimePower, g: usize, n: Int) -> Self {
        JacobianInput { q, g, n, b: None, eta: None, extra: None, conditions: Conditions::JACOBIAN }
    }
}

fn cbin(n: &Int, k: usize) -> Int {
    binomial_int(n, k as u64)
}

/// Lower bounds (I)-(V), (Borne-lmd) style and the `e_n` series bound.
pub fn jacobian_lower_bounds(input: &JacobianInput, prec: usize) -> Result<BoundReport> {
    let JacobianInput { q, g, n, .. } = input;
    let (g, n) = (*g, n);
    if g < 2 {
        return Err(Error::Domain("Jacobian bounds need g ≥ 2".into()));
    }
    if n.is_negative() {
        return Err(Error::Domain(format!("N = {n} is negative")));
    }
    let qi = q.q_int();
    let tau = n - &qi - 1;
    serre_check(q, g, &tau)?;
    let mut rep = BoundReport::new(q, g, &tau);
    let needs_n = |e: BoundEntry| {
        if input.conditions.n {
            e
        } else {
            e.unmet("condition (N) is not satisfied")
        }
    };

    let sp = SpechtParams::new(q, prec)?;
    let mean_g = pow_rat(&mean_factor(q, g, &tau), g as u64);
    rep.entries.push(BoundEntry::lower(
        "I",
        BoundValue::Rational(pow_rat(&sp.m_rational, g as u64) * &mean_g),
        "M_rational^g (q+1+(N-q-1)/g)^g",
    ));
    let w = Working::new(prec)?;
    let i_float = Interval::from_rat(sp.m.value(), &w)
        .powi(g as u64, &w)
        .mul(&Interval::from_rat(&mean_g, &w), &w);
    rep.entries.push(BoundEntry::lower(
        "I_float",
        BoundValue::Float(i_float.directed(Direction::Lower, &w)?),
        "M(q)^g (q+1+(N-q-1)/g)^g",
    ));
    rep.entries.push(BoundEntry::lower(
        "II",
        BoundValue::from_quadratic(perret_refined(q, g, &tau)),
        "(N-2(r-s)√q)(q+1+2√q)^r(q+1-2√q)^s",
    ));

    let scale = Rat::new(&qi - 1, num_traits::pow(qi.clone(), g) - 1);
    let mut iii = cbin(&(n + Int::from(2 * g - 2)), 2 * g - 1);
    let mut iii_reason = "(q-1)/(q^g-1) C(N+2g-2, 2g-1)".to_string();
    if let Some(b) = &input.b {
        if b.len() < 2 * g - 1 {
            return Err(Error::Domain(format!("B needs {} terms, got {}", 2 * g - 1, b.len())));
        }
        for i in 2..=2 * g - 1 {
            iii += &b[i - 1] * cbin(&(n + Int::from(2 * g - 2) - Int::from(i)), 2 * g - 1 - i);
        }
        iii_reason = "(q-1)/(q^g-1)[C(N+2g-2, 2g-1) + Σ B_i C(N+2g-2-i, 2g-1-i)]".into();
    }
    let iii = BoundEntry::lower("III", BoundValue::Rational(&scale * rat_of(iii)), iii_reason);
    rep.entries.push(if input.conditions.b { iii } else { iii.unmet("condition (B) is not satisfied") });

    let gi = Int::from(g);
    let cond = (Rat::new(n - 1u32, gi.clone()) + Rat::one()) * (Rat::new(n - 1u32, &gi - 1u32) + Rat::one())
        - rat_of(qi.clone());
    let x_g = x_k(q, n, g);
    let cond_ok = cond.is_positive();
    let gate = |e: BoundEntry| {
        if cond_ok {
            needs_n(e)
        } else {
            e.unmet(format!("((N-1)/g+1)((N-1)/(g-1)+1) - q = {cond} ≤ 0"))
        }
    };
    rep.entries.push(gate(BoundEntry::lower(
        "IV",
        BoundValue::integer(x_g.clone()),
        "C(N+g-1, g) - q C(N+g-3, g-2)",
    )));
    rep.entries.push(match &input.extra {
        None => BoundEntry::inapplicable("IV_refined", Direction::Lower, "needs N_g and N_(g-1)"),
        Some((ng, ng1)) => {
            let v = Rat::new(ng - n, gi.clone()) + rat_of(n.clone()) * Rat::new(ng1 - n, &gi - 1) + rat_of(x_g);
            gate(BoundEntry::lower("IV_refined", BoundValue::Rational(v), "(N_g-N)/g + N(N_(g-1)-N)/(g-1) + IV"))
        }
    });

    let bracket = cbin(&(n + Int::from(g) - 2), g - 2)
        + (0..g)
            .map(|k| num_traits::pow(qi.clone(), g - 1 - k) * cbin(&(n + Int::from(k) - 1), k))
            .sum::<Int>();
    let (eta, eta_reason) = match &input.eta {
        Some(e) => (e.clone(), format!("η = {e}")),
        None => {
            let mut best = sigma2(q, g, n).expect("denominator is positive under the Serre bound");
            let mut which = "sigma2";
            let harmonic = rat_of(&qi + 1 - q.m_int());
            if q.q() >= 8 && harmonic > best {
                best = harmonic;
                which = "harmonic";
            }
            (best.clone(), format!("η estimated from below by {which} = {best}"))
        }
    };
    rep.entries.push(needs_n(BoundEntry::lower(
        "V",
        BoundValue::Rational(&eta / rat_of(gi.clone()) * rat_of(bracket)),
        eta_reason,
    )));

    let (_, sm) = sqrt_q_plus_minus(q);
    let lmd = (&sm * &sm).scale(
        &(Rat::new(num_traits::pow(qi.clone(), g - 1) - 1, gi.clone()) * Rat::new(n + &qi - 1, &qi - 1)),
    );
    rep.entries.push(needs_n(BoundEntry::lower(
        "lmd",
        BoundValue::from_quadratic(lmd),
        "(√q-1)² (q^(g-1)-1)/g (N+q-1)/(q-1)",
    )));

    let es = rat_of(cbin(&(n + Int::from(g) - 2), g - 2))
        + rat_of(num_traits::pow(qi.clone(), g - 1)) * exp_partial_sum(&Rat::new(n.clone(), qi.clone()), g - 1);
    let den: Int = Int::from(g + 1) * (&qi + 1u32) - n;
    rep.entries.push(needs_n(BoundEntry::lower(
        "exp_series",
        BoundValue::Rational(es * Rat::new(num_traits::pow(&qi - 1, 2), den)),
        "[C(N+g-2, g-2) + q^(g-1) e_(g-1)(N/q)] (q-1)²/((g+1)(q+1)-N)",
    )));
    Ok(rep)
}

/// One type of defect 1 or 2: `[m, ..., m]` followed by the listed families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectTypeRow {
    pub d: usize,
    pub label: &'static str,
    /// `β_d - #A` recomputed from the type.
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub computed: Int,
    /// The closed form in `b = q + 1 + m`.
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub expected: Int,
    /// The non-`m` entries sum to `-d`.
    pub defect_ok: bool,
}

/// The defect-1/2 types for `(q, g)` that fit in dimension `g`.
pub fn defect_table(q: &PrimePower, g: usize) -> Result<Vec<DefectTypeRow>> {
    use crate::arith::ConjugateFamily as F;
    let b = q.q_int() + 1u32 + q.m_int();
    if g < 2 {
        return Err(Error::Domain("the defect table needs g ≥ 2".into()));
    }
    let bp = |e: usize| num_traits::pow(b.clone(), e);
    // (d, label, families as offsets from m, column without its power of b)
    type Closed = fn(&Int) -> Int;
    let rows: [(usize, &'static str, Vec<F>, Closed); 9] = [
        (1, "(m,...,m,m-1)", vec![F::rational(-1)], |_| Int::from(0)),
        (1, "(m,...,m,m+φ1,m+φ2)", vec![F::golden()], |_| Int::one()),
        (2, "(m,...,m,m-1,m-1)", vec![F::rational(-1), F::rational(-1)], |_| Int::from(0)),
        (2, "(m,...,m,m-2)", vec![F::rational(-2)], |_| Int::one()),
        (2, "(m,...,m,m+√2-1,m-√2-1)", vec![F::sqrt2_pair()], |_| Int::from(2)),
        (2, "(m,...,m,m+√3-1,m-√3-1)", vec![F::sqrt3_pair()], |_| Int::from(3)),
        (2, "(m,...,m,m-1,m+φ1,m+φ2)", vec![F::rational(-1), F::golden()], |b| b - 1u32),
        (2, "(m,...,m,m+φ1,m+φ2,m+φ1,m+φ2)", vec![F::golden(), F::golden()], |b| {
            Int::from(2) * b * b - Int::from(2) * b - 1u32
        }),
        (2, "(m,...,m,m+ω1,m+ω2,m+ω3)", vec![F::heptagonal()], |b| Int::from(2) * b - 1u32),
    ];
    let mut out = Vec::new();
    for (d, label, fams, closed) in rows {
        let k: usize = fams.iter().map(F::degree).sum();
        if k > g {
            continue;
        }
        let tail: Int = fams.iter().map(|f| family_product(f, &b)).product();
        let count = bp(g - k) * tail;
        let computed = defect_upper(q, g, d)? - count;
        let expected = bp(g - k.max(2)) * closed(&b);
        let trace: Int = fams.iter().map(F::trace).sum();
        out.push(DefectTypeRow { d, label, computed, expected, defect_ok: trace == -Int::from(d) });
    }
    Ok(out)
}

/// `(1 - 2/q)(q+1+τ/g) ≤ #A^{1/g} ≤ q+1+τ/g`, as `g`-th powers in exact arithmetic.
pub fn trace_sandwich_holds(q: &PrimePower, g: usize, tau: &Int, count: &Int) -> bool {
    let mean_g = pow_rat(&mean_factor(q, g, tau), g as u64);
    let m = Rat::one() - Rat::new(Int::from(2), q.q_int());
    let c = rat_of(count.clone());
    pow_rat(&m, g as u64) * &mean_g <= c && c <= mean_g
}
