//! Exact integer, rational and surd primitives.

mod directed;
mod quadratic;

pub use directed::{DirectedFloat, Direction, Interval, Working};
pub use quadratic::{
    floor_over_2sqrtq, frac_2sqrtq_cmp, phi1, phi2, quad_compare, sqrt2_minus_1, sqrt3_minus_1,
    QuadraticValue,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Int, Rat, Result};

/// `⌊√n⌋` by Newton iteration.
pub fn isqrt(n: &Int) -> Result<Int> {
    if n.is_negative() {
        return Err(Error::Domain(format!("isqrt of negative integer {n}")));
    }
    if n.is_zero() {
        return Ok(Int::zero());
    }
    // Start above the root: 2^ceil(bits/2) > √n.
    let mut x = Int::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return Ok(x);
        }
        x = y;
    }
}

pub fn isqrt_u64(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let n = n as u128;
    let mut x: u128 = 1 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) >> 1;
        if y >= x {
            return x as u64;
        }
        x = y;
    }
}

/// Writes `n = k² · d` with `d` square-free; returns `(k, d)`.
pub fn square_free_decomposition(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut k = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    (k, d * n)
}

/// A prime power `q = p^n` with cached `m = ⌊2√q⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    q: u64,
    p: u64,
    n: u32,
    m: u64,
}

impl PrimePower {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("{q} is not a prime power")));
        }
        let mut p = q;
        let mut d = 2u64;
        while d * d <= q {
            if q.is_multiple_of(d) {
                p = d;
                break;
            }
            d += 1;
        }
        let mut rest = q;
        let mut n = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            n += 1;
        }
        if rest != 1 {
            return Err(Error::Domain(format!("{q} is not a prime power")));
        }
        let m = isqrt_u64(
            q.checked_mul(4)
                .ok_or_else(|| Error::Domain(format!("q = {q} is too large")))?,
        );
        Ok(PrimePower { q, p, n, m })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `⌊2√q⌋`.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn is_square(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    pub fn q_int(&self) -> Int {
        Int::from(self.q)
    }

    pub fn m_int(&self) -> Int {
        Int::from(self.m)
    }

    /// `√q` as an exact surd.
    pub fn sqrt_q(&self) -> QuadraticValue {
        QuadraticValue::sqrt_of(self.q)
    }

    /// `q^(k/2)` as an exact surd; `k` may be negative.
    pub fn sqrt_q_pow(&self, k: i64) -> QuadraticValue {
        let base = self.sqrt_q();
        if k >= 0 {
            base.pow(k as u32)
        } else {
            base.pow((-k) as u32)
                .inv()
                .expect("q^(k/2) is never zero")
        }
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// `π_n = (q^(n+1) - 1)/(q - 1)`, with `π_n = 0` for every `n ≤ -1`.
pub fn pi_n(q: &PrimePower, n: i64) -> Int {
    if n < 0 {
        return Int::zero();
    }
    let qi = q.q_int();
    let mut acc = Int::zero();
    for _ in 0..=n {
        acc = acc * &qi + 1;
    }
    acc
}

/// `π_n = (q^(n+1) - 1)/(q - 1)` for every integer `n`, rational when `n < -1`.
pub fn pi_n_rational(q: &PrimePower, n: i64) -> Rat {
    let qr = Rat::from_integer(q.q_int());
    let qpow = if n + 1 >= 0 {
        pow_rat(&qr, (n + 1) as u64)
    } else {
        pow_rat(&qr.recip(), (-(n + 1)) as u64)
    };
    (qpow - Rat::one()) / (qr - Rat::one())
}

/// All `b = (b_1, ..., b_n)` with `Σ i·b_i = n`, in decreasing lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn fill(i: usize, n: usize, remaining: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i > n {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for b in (0..=remaining / i).rev() {
            cur.push(b as u32);
            fill(i + 1, n, remaining - i * b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    fill(1, n, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Generalized binomial `r(r-1)...(r-k+1)/k!` for rational `r`.
pub fn binomial(r: &Rat, k: u64) -> Rat {
    if r.is_integer() && !r.is_negative() {
        return Rat::from_integer(binomial_int(&r.to_integer(), k));
    }
    let mut acc = Rat::one();
    let mut top = r.clone();
    for j in 1..=k {
        acc = acc * &top / Rat::from_integer(Int::from(j));
        top -= Rat::one();
    }
    acc
}

/// Binomial `C(n, k)` for any integer `n`, generalized when `n < 0`.
pub fn binomial_int(n: &Int, k: u64) -> Int {
    if n.is_negative() {
        // C(-a, k) = (-1)^k C(a + k - 1, k)
        let a = -n;
        let c = binomial_int(&(a + k - 1u32), k);
        return if k % 2 == 1 { -c } else { c };
    }
    if Int::from(k) > *n {
        return Int::zero();
    }
    let k = {
        let nk = n - Int::from(k);
        if nk < Int::from(k) {
            nk.to_u64().expect("k fits")
        } else {
            k
        }
    };
    let mut acc = Int::one();
    for j in 0..k {
        acc *= n - Int::from(j);
        acc /= Int::from(j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> Int {
    (1..=n).fold(Int::one(), |acc, j| acc * j)
}

/// Möbius function.
pub fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `num / den` as an exact rational.
pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
    Rat::new(num.into(), den.into())
}

pub fn rat_int(v: impl Into<BigInt>) -> Rat {
    Rat::from_integer(v.into())
}

/// `x^e` for a non-negative exponent with `0^0 = 1`.
pub fn pow_rat(x: &Rat, e: u64) -> Rat {
    num_traits::pow(x.clone(), e as usize)
}

/// `⌊a / b⌋` for integers with `b > 0`.
pub fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

/// The monic minimal polynomial of a Galois-stable set of totally real values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateFamily {
    /// Coefficients, low degree first; the last entry is 1.
    minpoly: Vec<Int>,
}

impl ConjugateFamily {
    pub fn new(minpoly: Vec<Int>) -> Result<Self> {
        match minpoly.last() {
            Some(lead) if lead.is_one() => Ok(ConjugateFamily { minpoly }),
            _ => Err(Error::Domain(
                "conjugate family minimal polynomial must be monic".into(),
            )),
        }
    }

    fn from_i64(coeffs: &[i64]) -> Self {
        ConjugateFamily {
            minpoly: coeffs.iter().map(|&c| Int::from(c)).collect(),
        }
    }

    /// The single rational value `x`.
    pub fn rational(x: i64) -> Self {
        Self::from_i64(&[-x, 1])
    }

    /// `{φ₁, φ₂} = {(-1 ± √5)/2}`, roots of `t² + t - 1`.
    pub fn golden() -> Self {
        Self::from_i64(&[-1, 1, 1])
    }

    /// `{-1 ± √2}`, roots of `t² + 2t - 1`.
    pub fn sqrt2_pair() -> Self {
        Self::from_i64(&[-1, 2, 1])
    }

    /// `{-1 ± √3}`, roots of `t² + 2t - 2`.
    pub fn sqrt3_pair() -> Self {
        Self::from_i64(&[-2, 2, 1])
    }

    /// `ω_i = 1 - 4cos²(iπ/7)`, `i = 1, 2, 3`, roots of `t³ + 2t² - t - 1`.
    pub fn heptagonal() -> Self {
        Self::from_i64(&[-1, -1, 2, 1])
    }

    pub fn minpoly(&self) -> &[Int] {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    /// Sum of the family members (minus the subleading coefficient).
    pub fn trace(&self) -> Int {
        let d = self.degree();
        if d == 0 {
            Int::zero()
        } else {
            -self.minpoly[d - 1].clone()
        }
    }

    pub fn eval(&self, x: &Int) -> Int {
        self.minpoly
            .iter()
            .rev()
            .fold(Int::zero(), |acc, c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&Int::from(8)).unwrap(), Int::from(2));
        assert_eq!(isqrt(&Int::from(0)).unwrap(), Int::from(0));
        assert_eq!(isqrt(&Int::from(1372)).unwrap(), Int::from(37));
        assert!(isqrt(&Int::from(-1)).is_err());
        assert_eq!(isqrt_u64(1372), 37);
        assert_eq!(isqrt_u64(u64::MAX), 4294967295);
    }

    #[test]
    fn prime_power_validation() {
        let q = PrimePower::new(343).unwrap();
        assert_eq!((q.p(), q.n(), q.m()), (7, 3, 37));
        assert!(!q.is_square());
        let q = PrimePower::new(9).unwrap();
        assert!(q.is_square());
        assert_eq!(q.m() * q.m(), 4 * q.q());
        assert!(PrimePower::new(12).is_err());
        assert!(PrimePower::new(1).is_err());
        assert!(PrimePower::new(0).is_err());
    }

    #[test]
    fn pi_n_examples() {
        let q = PrimePower::new(2).unwrap();
        assert_eq!(pi_n(&q, -1), Int::from(0));
        assert_eq!(pi_n(&q, -5), Int::from(0));
        assert_eq!(pi_n(&q, 0), Int::from(1));
        assert_eq!(pi_n(&q, 2), Int::from(7));
    }

    #[test]
    fn partitions_examples() {
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
        assert_eq!(
            partitions(3),
            vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(partitions(5).len(), 7);
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binomial_int(&Int::from(5), 2), Int::from(10));
        assert_eq!(binomial_int(&Int::from(1), 2), Int::from(0));
        assert_eq!(binomial_int(&Int::from(-1), 0), Int::from(1));
        // C(-1, k) = (-1)^k
        assert_eq!(binomial_int(&Int::from(-1), 3), Int::from(-1));
        assert_eq!(binomial_int(&Int::from(-3), 2), Int::from(6));
        assert_eq!(binomial(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(binomial(&rat_int(-3), 2), rat_int(6));
    }

    #[test]
    fn mobius_and_divisors() {
        let mu: Vec<i32> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_decomposition(8), (2, 2));
        assert_eq!(square_free_decomposition(343), (7, 7));
        assert_eq!(square_free_decomposition(9), (3, 1));
        assert_eq!(square_free_decomposition(13), (1, 13));
    }

    #[test]
    fn heptagonal_family_matches_cosines() {
        let fam = ConjugateFamily::heptagonal();
        for i in 1..=3 {
            let c = (i as f64 * std::f64::consts::PI / 7.0).cos();
            let w = 1.0 - 4.0 * c * c;
            let v: f64 = fam
                .minpoly()
                .iter()
                .rev()
                .fold(0.0, |acc, a| acc * w + a.to_f64().unwrap());
            assert!(v.abs() < 1e-10, "ω_{i} = {w} gives {v}");
        }
        assert_eq!(fam.trace(), Int::from(-2));
    }
}
