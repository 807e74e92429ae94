//! Tiny finite fields `F_{p^n}` given by explicit tables.

use crate::arith::PrimePower;
use crate::{Error, Result};

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    // f monic, low degree first
    let mut r = a.to_vec();
    let df = f.len() - 1;
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        for (i, &c) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - lead * c % p) % p;
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn monic_polys(p: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..p.pow(d as u32)).map(move |mut k| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(k % p);
            k /= p;
        }
        c.push(1);
        c
    })
}

/// No monic factor of degree `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    (1..=d / 2).all(|k| monic_polys(p, k).all(|g| !poly_rem(f, &g, p).is_empty()))
}

/// `F_q` with elements `0..q`, read as base-`p` digit vectors.
#[derive(Debug, Clone)]
pub struct SmallField {
    q: usize,
    p: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl SmallField {
    pub const MAX_ORDER: u64 = 32;

    pub fn new(q: &PrimePower) -> Result<Self> {
        if q.q() > Self::MAX_ORDER {
            return Err(Error::Domain(format!(
                "explicit field tables are limited to q ≤ {}",
                Self::MAX_ORDER
            )));
        }
        let (p, n) = (q.p() as u32, q.n() as usize);
        let modulus = monic_polys(p, n)
            .find(|f| is_irreducible(f, p))
            .ok_or_else(|| Error::Internal(format!("no irreducible polynomial of degree {n} mod {p}")))?;
        let qq = q.q() as usize;
        let digits = |mut k: usize| {
            let mut c = Vec::with_capacity(n);
            for _ in 0..n {
                c.push((k % p as usize) as u32);
                k /= p as usize;
            }
            c
        };
        let index = |c: &[u32]| c.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize);
        let mut add = vec![0u16; qq * qq];
        let mut mul = vec![0u16; qq * qq];
        let mut neg = vec![0u16; qq];
        for x in 0..qq {
            let dx = digits(x);
            neg[x] = index(&dx.iter().map(|&d| (p - d) % p).collect::<Vec<_>>()) as u16;
            for y in 0..qq {
                let dy = digits(y);
                let s: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * qq + y] = index(&s) as u16;
                let mut prod = vec![0u32; 2 * n - 1];
                for (i, a) in dx.iter().enumerate() {
                    for (j, b) in dy.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(n, 0);
                mul[x * qq + y] = index(&r) as u16;
            }
        }
        let field = SmallField { q: qq, p, modulus, add, mul, neg };
        field.self_check()?;
        Ok(field)
    }

    fn self_check(&self) -> Result<()> {
        for x in 1..self.q {
            if !(1..self.q).any(|y| self.mul(x, y) == 1) {
                return Err(Error::Internal(format!("element {x} has no inverse")));
            }
        }
        for x in 0..self.q {
            let mut y = 1;
            for _ in 0..self.q {
                y = self.mul(y, x);
            }
            if y != x {
                return Err(Error::Internal(format!("x^q ≠ x at {x}")));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// The defining polynomial, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.q + y] as usize
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg[y] as usize)
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.q + y] as usize
    }

    /// The image of the integer `k`.
    pub fn from_int(&self, k: i64) -> usize {
        k.rem_euclid(self.p as i64) as usize
    }
}
