//! Sturm chains over the rationals, evaluated exactly at surd points.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::arith::QuadraticValue;
use crate::{Int, Rat};

/// Rational polynomial, low degree first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatPoly(Vec<Rat>);

impl RatPoly {
    pub fn from_ints(c: &[Int]) -> Self {
        Self::new(c.iter().cloned().map(Rat::from_integer).collect())
    }

    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rat {
        self.0.last().expect("non-zero polynomial")
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(Int::from(i)))
                .collect(),
        )
    }

    /// `p(-t)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn div_rem(&self, b: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!b.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let db = b.degree();
        if r.len() <= db {
            return (RatPoly(Vec::new()), self.clone());
        }
        let mut quo = vec![Rat::zero(); r.len() - db];
        let lb = b.lead().clone();
        for k in (0..quo.len()).rev() {
            let c = &r[k + db] / &lb;
            for (j, bj) in b.0.iter().enumerate() {
                r[k + j] -= &c * bj;
            }
            quo[k] = c;
        }
        (RatPoly::new(quo), RatPoly::new(r))
    }

    pub fn monic(&self) -> Self {
        let l = self.lead().clone();
        RatPoly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn square_free(&self) -> RatPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    pub fn eval_sign(&self, x: &QuadraticValue) -> Ordering {
        let mut acc = QuadraticValue::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + &QuadraticValue::rational(c.clone());
        }
        acc.signum()
    }

    fn sign_at_pos_inf(&self) -> Ordering {
        self.lead().cmp(&Rat::zero())
    }

    fn sign_at_neg_inf(&self) -> Ordering {
        let s = self.sign_at_pos_inf();
        if self.degree() % 2 == 1 {
            s.reverse()
        } else {
            s
        }
    }
}

fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for s in signs.filter(|s| *s != Ordering::Equal) {
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

pub(crate) struct SturmChain(Vec<RatPoly>);

impl SturmChain {
    pub fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.clone()];
        if p.is_zero() {
            return SturmChain(chain);
        }
        let mut next = p.derivative();
        while !next.is_zero() {
            let prev = chain.last().expect("non-empty");
            let r = prev.div_rem(&next).1;
            chain.push(next);
            next = RatPoly::new(r.0.into_iter().map(|c| -c).collect());
        }
        SturmChain(chain)
    }

    /// Number of distinct real roots.
    pub fn real_roots(&self) -> usize {
        let lo = variations(self.0.iter().map(RatPoly::sign_at_neg_inf));
        let hi = variations(self.0.iter().map(RatPoly::sign_at_pos_inf));
        lo - hi
    }

    /// Number of distinct real roots in `(c, ∞)`.
    pub fn roots_above(&self, c: &QuadraticValue) -> usize {
        let at_c = variations(self.0.iter().map(|p| p.eval_sign(c)));
        let hi = variations(self.0.iter().map(RatPoly::sign_at_pos_inf));
        at_c - hi
    }
}

/// Whether every root of `p` is real and lies in `[-c, c]`.
pub(crate) fn roots_real_within(p: &RatPoly, c: &QuadraticValue) -> bool {
    if p.degree() == 0 {
        return true;
    }
    let sf = p.square_free();
    if SturmChain::new(&sf).real_roots() != sf.degree() {
        return false;
    }
    SturmChain::new(&sf).roots_above(c) == 0 && SturmChain::new(&sf.reflect()).roots_above(c) == 0
}
