//! Weil polynomials, real Weil polynomials and the quantities derived from them.
//!
//! The canonical form is the reciprocal polynomial `P(t) = Σ a_n tⁿ` with
//! `a_0 = 1` and `a_{2g-n} = q^{g-n} a_n`.  The characteristic polynomial
//! `f(t) = t^{2g} P(1/t)` is accepted as input and recovered on demand.

mod sturm;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{binomial_int, ConjugateFamily, PrimePower, QuadraticValue};
use crate::{Error, Int, Rat, Result};

pub(crate) use sturm::RatPoly;

/// Which coefficient convention an input list was recognised as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputForm {
    /// Already the reciprocal polynomial `P` (`a_0 = 1`).
    Reciprocal,
    /// The monic characteristic polynomial `f`, reversed into `P`.
    Characteristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeilPolynomial {
    q: PrimePower,
    g: usize,
    coeffs: Vec<Int>,
}

fn eval_int(c: &[Int], x: &Int) -> Int {
    c.iter().rev().fold(Int::zero(), |acc, a| acc * x + a)
}

fn poly_mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn check_functional_equation(q: &PrimePower, g: usize, p: &[Int]) -> Result<()> {
    let qi = q.q_int();
    // Walk from the outside in so that the reported index is the higher
    // partner of the outermost failing pair.
    for n in 0..g {
        let expected = num_traits::pow(qi.clone(), g - n) * &p[n];
        if p[2 * g - n] != expected {
            return Err(Error::FunctionalEquation { index: 2 * g - n });
        }
    }
    Ok(())
}

impl WeilPolynomial {
    /// Validates `coeffs` (low degree first) as either `P` or `f`.
    pub fn from_coeffs(q: PrimePower, g: usize, coeffs: &[Int]) -> Result<(Self, InputForm)> {
        if coeffs.len() != 2 * g + 1 {
            return Err(Error::Domain(format!(
                "expected {} coefficients for g = {g}, got {}",
                2 * g + 1,
                coeffs.len()
            )));
        }
        let (p, form) = if coeffs[0].is_one() {
            (coeffs.to_vec(), InputForm::Reciprocal)
        } else if coeffs[2 * g].is_one() {
            (coeffs.iter().rev().cloned().collect(), InputForm::Characteristic)
        } else {
            return Err(Error::NotNormalized);
        };
        check_functional_equation(&q, g, &p)?;
        let w = WeilPolynomial { q, g, coeffs: p };
        if w.point_count().is_zero() {
            return Err(Error::DegenerateAtOne);
        }
        Ok((w, form))
    }

    /// The `g = 0` unit `P(t) = 1`.
    pub fn unit(q: PrimePower) -> Self {
        WeilPolynomial { q, g: 0, coeffs: vec![Int::one()] }
    }

    /// The elliptic factor `1 + x t + q t²`, i.e. type `[x]`.
    pub fn elliptic(q: PrimePower, x: i64) -> Result<Self> {
        make_weil(q, 1, &[Int::one(), Int::from(x), q.q_int()])
    }

    /// The abelian-surface polynomial with characteristic `t⁴ + a1 t³ + a2 t² + q a1 t + q²`.
    pub fn surface(q: PrimePower, a1: i64, a2: i64) -> Result<Self> {
        let qi = q.q_int();
        make_weil(
            q,
            2,
            &[Int::one(), Int::from(a1), Int::from(a2), &qi * a1, &qi * &qi],
        )
    }

    /// Rebuilds `P` from a real Weil polynomial via `f(t) = t^g h(t + q/t)`.
    pub fn from_real(h: &RealWeilPolynomial) -> Result<Self> {
        let f = h.expand_characteristic();
        let p: Vec<Int> = f.into_iter().rev().collect();
        make_weil(h.q, h.g, &p)
    }

    pub fn q(&self) -> &PrimePower {
        &self.q
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// `a_0, ..., a_{2g}`.
    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    /// `τ = a_1`, the sum of the `x_i`.
    pub fn tau(&self) -> Int {
        self.coeffs.get(1).cloned().filter(|_| self.g > 0).unwrap_or_default()
    }

    /// `f(t) = t^{2g} P(1/t)`, low degree first.
    pub fn characteristic(&self) -> Vec<Int> {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// `#A(F_q) = P(1)`.
    pub fn point_count(&self) -> Int {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, t: &Int) -> Int {
        eval_int(&self.coeffs, t)
    }

    /// Solves `f(t) = Σ b_j t^{g-j} (t² + q)^j` from the top coefficient down.
    pub fn real_weil(&self) -> Result<RealWeilPolynomial> {
        let g = self.g;
        let f = self.characteristic();
        let qi = self.q.q_int();
        let mut b = vec![Int::zero(); g + 1];
        for k in (0..=g).rev() {
            let mut v = f[g + k].clone();
            let mut j = k + 2;
            while j <= g {
                let i = (j + k) / 2;
                v -= binomial_int(&Int::from(j), i as u64)
                    * num_traits::pow(qi.clone(), (j - k) / 2)
                    * &b[j];
                j += 2;
            }
            b[k] = v;
        }
        let h = RealWeilPolynomial { q: self.q, g, coeffs: b };
        if h.expand_characteristic() != f {
            return Err(Error::Internal(format!(
                "real Weil polynomial of {:?} does not re-expand to f",
                self.coeffs
            )));
        }
        Ok(h)
    }

    /// Whether every root of `P` has modulus `q^{-1/2}`.
    pub fn is_weil_valid(&self) -> bool {
        let Ok(h) = self.real_weil() else { return false };
        let c = self.q.sqrt_q().scale(&Rat::from_integer(Int::from(2)));
        sturm::roots_real_within(&RatPoly::from_ints(&h.coeffs), &c)
    }

    /// The harmonic mean `η` of the numbers `q + 1 + x_i`.
    pub fn eta(&self) -> Result<Rat> {
        let h = self.real_weil()?;
        let at = self.q.q_int() + 1;
        let hv = h.eval(&at);
        let dv = h.eval_derivative(&at);
        if dv.is_zero() {
            return Err(Error::DegenerateHarmonicMean);
        }
        Ok(Rat::new(Int::from(self.g) * hv, dv))
    }

    /// `P1 · P2`: the polynomial of `A1 × A2`.
    pub fn product(&self, other: &WeilPolynomial) -> Result<WeilPolynomial> {
        if self.q != other.q {
            return Err(Error::Domain(format!(
                "cannot multiply Weil polynomials over q = {} and q = {}",
                self.q.q(),
                other.q.q()
            )));
        }
        Ok(WeilPolynomial {
            q: self.q,
            g: self.g + other.g,
            coeffs: poly_mul(&self.coeffs, &other.coeffs),
        })
    }
}

/// Validates and canonicalizes; see [`WeilPolynomial::from_coeffs`].
pub fn make_weil(q: PrimePower, g: usize, coeffs: &[Int]) -> Result<WeilPolynomial> {
    WeilPolynomial::from_coeffs(q, g, coeffs).map(|(w, _)| w)
}

/// Validity of a raw coefficient list; a polynomial vanishing at 1 is reported invalid.
pub fn is_weil_valid_coeffs(q: PrimePower, g: usize, coeffs: &[Int]) -> Result<bool> {
    match make_weil(q, g, coeffs) {
        Ok(w) => Ok(w.is_weil_valid()),
        Err(Error::DegenerateAtOne) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `h(t) = ∏ (t + x_i)`, low degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealWeilPolynomial {
    q: PrimePower,
    g: usize,
    coeffs: Vec<Int>,
}

impl RealWeilPolynomial {
    pub fn new(q: PrimePower, coeffs: Vec<Int>) -> Result<Self> {
        if !coeffs.last().is_some_and(|c| c.is_one()) {
            return Err(Error::Domain("real Weil polynomial must be monic".into()));
        }
        Ok(RealWeilPolynomial { q, g: coeffs.len() - 1, coeffs })
    }

    /// `∏ (t + x_i)` for integer `x_i`.
    pub fn from_types(q: PrimePower, xs: &[i64]) -> Self {
        let coeffs = xs
            .iter()
            .fold(vec![Int::one()], |acc, &x| poly_mul(&acc, &[Int::from(x), Int::one()]));
        RealWeilPolynomial { q, g: xs.len(), coeffs }
    }

    pub fn q(&self) -> &PrimePower {
        &self.q
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Int) -> Int {
        eval_int(&self.coeffs, x)
    }

    pub fn eval_derivative(&self, x: &Int) -> Int {
        let d: Vec<Int> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i)
            .collect();
        eval_int(&d, x)
    }

    /// `Σ b_j t^{g-j} (t² + q)^j`, low degree first.
    fn expand_characteristic(&self) -> Vec<Int> {
        let g = self.g;
        let mut out = vec![Int::zero(); 2 * g + 1];
        let base = [self.q.q_int(), Int::zero(), Int::one()];
        let mut pw = vec![Int::one()];
        for (j, bj) in self.coeffs.iter().enumerate() {
            for (i, c) in pw.iter().enumerate() {
                out[g - j + i] += bj * c;
            }
            pw = poly_mul(&pw, &base);
        }
        out
    }
}

/// `∏ (c + root)` over the members of the family.
pub fn family_product(f: &ConjugateFamily, c: &Int) -> Int {
    let v = f.eval(&-c);
    if f.degree() % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Exact `∏ (c + x)` for a family written as surds; used by tests on small types.
pub fn surd_product(values: &[QuadraticValue], c: &Int) -> QuadraticValue {
    let c = QuadraticValue::integer(c.clone());
    values
        .iter()
        .fold(QuadraticValue::one(), |acc, x| &acc * &(&c + x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{phi1, phi2, rat};
    use proptest::prelude::*;

    fn q(n: u64) -> PrimePower {
        PrimePower::new(n).unwrap()
    }

    fn ints(c: &[i64]) -> Vec<Int> {
        c.iter().map(|&x| Int::from(x)).collect()
    }

    /// `t⁴ - t³ - 2t + 4`, low degree first.
    fn counterexample() -> WeilPolynomial {
        make_weil(q(2), 2, &ints(&[4, -2, 0, -1, 1])).unwrap()
    }

    #[test]
    fn make_weil_detects_forms() {
        let (w, form) = WeilPolynomial::from_coeffs(q(2), 2, &ints(&[4, -2, 0, -1, 1])).unwrap();
        assert_eq!(form, InputForm::Characteristic);
        assert_eq!(w.coeffs(), ints(&[1, -1, 0, -2, 4]).as_slice());
        assert_eq!(w.point_count(), Int::from(2));
        let (_, form) = WeilPolynomial::from_coeffs(q(2), 1, &ints(&[1, 2, 2])).unwrap();
        assert_eq!(form, InputForm::Reciprocal);
    }

    #[test]
    fn make_weil_errors() {
        assert_eq!(
            make_weil(q(2), 2, &ints(&[4, 1, 0, 1, 1])),
            Err(Error::FunctionalEquation { index: 3 })
        );
        assert_eq!(make_weil(q(2), 1, &ints(&[2, -3, 1])), Err(Error::DegenerateAtOne));
        assert_eq!(make_weil(q(2), 1, &ints(&[3, 1, 3])), Err(Error::NotNormalized));
        assert!(matches!(make_weil(q(2), 1, &ints(&[1, 2])), Err(Error::Domain(_))));
    }

    #[test]
    fn validity_examples() {
        assert!(is_weil_valid_coeffs(q(2), 1, &ints(&[2, 2, 1])).unwrap());
        assert!(!is_weil_valid_coeffs(q(2), 1, &ints(&[2, -3, 1])).unwrap());
        assert!(WeilPolynomial::surface(q(2), 4, 8).unwrap().is_weil_valid());
        assert!(!WeilPolynomial::surface(q(2), 4, 9).unwrap().is_weil_valid());
        assert!(counterexample().is_weil_valid());
        // (t² - 2)²: x = ±2√2 on the boundary.
        assert!(WeilPolynomial::surface(q(2), 0, -4).unwrap().is_weil_valid());
    }

    #[test]
    fn point_counts() {
        let e1 = WeilPolynomial::elliptic(q(2), 0).unwrap();
        let e2 = WeilPolynomial::elliptic(q(2), -1).unwrap();
        assert_eq!(e1.product(&e2).unwrap().point_count(), Int::from(6));
        assert_eq!(WeilPolynomial::elliptic(q(2), 2).unwrap().point_count(), Int::from(5));
    }

    #[test]
    fn real_weil_examples() {
        assert_eq!(counterexample().real_weil().unwrap().coeffs(), ints(&[-4, -1, 1]).as_slice());
        let e1 = WeilPolynomial::elliptic(q(2), 0).unwrap();
        let e2 = WeilPolynomial::elliptic(q(2), -1).unwrap();
        let p = e1.product(&e2).unwrap();
        assert_eq!(p.real_weil().unwrap().coeffs(), ints(&[0, -1, 1]).as_slice());
        assert_eq!(
            WeilPolynomial::elliptic(q(2), 2).unwrap().real_weil().unwrap().coeffs(),
            ints(&[2, 1]).as_slice()
        );
    }

    #[test]
    fn eta_examples() {
        assert_eq!(counterexample().eta().unwrap(), rat(4, 5));
        let e1 = WeilPolynomial::elliptic(q(2), 0).unwrap();
        let e2 = WeilPolynomial::elliptic(q(2), -1).unwrap();
        assert_eq!(e1.product(&e2).unwrap().eta().unwrap(), rat(12, 5));
        let e = WeilPolynomial::elliptic(q(2), 2).unwrap();
        assert_eq!(e.product(&e).unwrap().eta().unwrap(), rat(5, 1));
    }

    #[test]
    fn products() {
        let e2 = WeilPolynomial::elliptic(q(2), -1).unwrap();
        let cube = e2.product(&e2).unwrap().product(&e2).unwrap();
        assert_eq!(cube.g(), 3);
        assert!(cube.is_weil_valid());
        assert_eq!(e2.product(&WeilPolynomial::unit(q(2))).unwrap(), e2);
        assert!(e2.product(&WeilPolynomial::unit(q(3))).is_err());
    }

    #[test]
    fn family_products() {
        assert_eq!(family_product(&ConjugateFamily::golden(), &Int::from(5)), Int::from(19));
        assert_eq!(family_product(&ConjugateFamily::rational(-1), &Int::from(7)), Int::from(6));
        assert_eq!(
            surd_product(&[phi1(), phi2()], &Int::from(5)).as_integer(),
            Some(Int::from(19))
        );
        let hept = ConjugateFamily::heptagonal();
        for c in -5i64..=30 {
            let x = c as f64;
            let closed = (x - 1.0).powi(3) + (x - 1.0).powi(2) - 2.0 * (x - 1.0) - 1.0;
            let v = family_product(&hept, &Int::from(c));
            assert_eq!(v, Int::from(closed.round() as i64));
        }
    }

    fn elliptic_factor(qv: u64) -> impl Strategy<Value = i64> {
        let m = q(qv).m() as i64;
        -m..=m
    }

    proptest! {
        #[test]
        fn count_is_h_at_q_plus_1(
            (qv, xs) in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])
                .prop_flat_map(|qv| (Just(qv), prop::collection::vec(elliptic_factor(qv), 1..=4)))
        ) {
            let qq = q(qv);
            let p = xs.iter().fold(WeilPolynomial::unit(qq), |acc, &x| {
                acc.product(&WeilPolynomial::elliptic(qq, x).unwrap()).unwrap()
            });
            prop_assert!(p.is_weil_valid());
            let h = p.real_weil().unwrap();
            prop_assert_eq!(h.eval(&(qq.q_int() + 1)), p.point_count());
            prop_assert_eq!(&h, &RealWeilPolynomial::from_types(qq, &xs));
            // Reversal involution through f.
            let (back, form) = WeilPolynomial::from_coeffs(qq, p.g(), &p.characteristic()).unwrap();
            prop_assert_eq!(form, InputForm::Characteristic);
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(WeilPolynomial::from_real(&h).unwrap(), p.clone());
            // η = g / Σ 1/(q+1+x_i).
            let s: Rat = xs.iter().map(|&x| Rat::new(Int::one(), Int::from(qv as i64 + 1 + x))).sum();
            prop_assert_eq!(p.eta().unwrap(), Rat::from_integer(Int::from(xs.len())) / s);
        }
    }
}
