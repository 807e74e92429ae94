//! Brute-force cross-checks: power series by long division, the formal
//! exponential, explicit elliptic curves over small fields, and exhaustive
//! search of the Rück region. [`verify`] runs them all for one `q`.

mod field;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

pub use field::{is_irreducible, SmallField};

use crate::arith::{PrimePower, QuadraticValue};
use crate::bounds::{lower_bounds, upper_bounds, LowerInput};
use crate::genus12::{
    extremal_elliptic, extremal_surface, extremal_tables, jacobian_exclusion, ruck_enumerate,
    witnesses_hold, EllipticExtremes,
};
use crate::weil::WeilPolynomial;
use crate::zeta::{expand, verify_identities};
use crate::{Error, Int, Rat, Result};

/// `A_0..=A_{n_max}` of `P(t) / ((1-t)(1-qt))` by long division.
pub fn series_divide(p: &WeilPolynomial, n_max: usize) -> Vec<Int> {
    let q = p.q().q_int();
    let c = p.coeffs();
    let mut a: Vec<Int> = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let mut v = c.get(k).cloned().unwrap_or_else(Int::zero);
        if k >= 1 {
            v += (&q + 1) * &a[k - 1];
        }
        if k >= 2 {
            v -= &q * &a[k - 2];
        }
        a.push(v);
    }
    a
}

/// `exp(Σ N_k t^k / k)` up to `t^n_max`, via `n E_n = Σ N_k E_{n-k}`.
/// `n[0]` is `N_1`.
pub fn formal_exp_oracle(n: &[Int], n_max: usize) -> Vec<Rat> {
    assert!(n.len() >= n_max, "need N_1..N_{n_max}");
    let mut e = vec![Rat::one()];
    for i in 1..=n_max {
        let s: Rat = (1..=i).map(|k| Rat::from_integer(n[k - 1].clone()) * &e[i - k]).sum();
        e.push(s / Rat::from_integer(Int::from(i)));
    }
    e
}

/// Frobenius traces `t` (with `#E = q + 1 - t`) that occur over `F_q`.
pub fn waterhouse_traces(q: &PrimePower) -> BTreeSet<i64> {
    let (p, n) = (q.p() as i64, q.n());
    let m = q.m() as i64;
    let mut out: BTreeSet<i64> = (-m..=m).filter(|t| t % p != 0).collect();
    let mut both = |t: i64| {
        out.insert(t);
        out.insert(-t);
    };
    if n % 2 == 0 {
        let r = p.pow(n / 2);
        both(2 * r);
        if p % 3 != 1 {
            both(r);
        }
        if p % 4 != 1 {
            both(0);
        }
    } else {
        both(0);
        if p == 2 || p == 3 {
            both(p.pow(n.div_ceil(2)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllipticEnumeration {
    pub q: u64,
    pub curves: usize,
    pub traces: BTreeSet<i64>,
    #[serde(rename = "J")]
    pub max: i64,
    #[serde(rename = "j")]
    pub min: i64,
}

impl EllipticEnumeration {
    pub fn extremes(&self) -> EllipticExtremes {
        EllipticExtremes { max: self.max, min: self.min }
    }
}

/// Largest `q` accepted by [`enumerate_elliptic`].
pub const ENUMERATE_MAX_Q: u64 = 16;

/// Every smooth long Weierstrass equation over `F_q`.
pub fn enumerate_elliptic(q: &PrimePower) -> Result<EllipticEnumeration> {
    if q.q() > ENUMERATE_MAX_Q {
        return Err(Error::Domain(format!("curve enumeration is limited to q ≤ {ENUMERATE_MAX_Q}")));
    }
    let f = SmallField::new(q)?;
    let qq = f.order();
    let c = |k: i64| f.from_int(k);
    let mul = |xs: &[usize]| xs.iter().fold(1usize, |acc, &x| f.mul(acc, x));
    let sum = |xs: &[usize]| xs.iter().fold(0usize, |acc, &x| f.add(acc, x));

    // hist[(a1*q + a3)*q + x][r] = #{y : y² + a1 x y + a3 y = r}
    let mut hist = vec![0u32; qq * qq * qq * qq];
    for a1 in 0..qq {
        for a3 in 0..qq {
            for x in 0..qq {
                let base = ((a1 * qq + a3) * qq + x) * qq;
                for y in 0..qq {
                    let l = sum(&[mul(&[y, y]), mul(&[a1, x, y]), mul(&[a3, y])]);
                    hist[base + l] += 1;
                }
            }
        }
    }
    let cubes: Vec<usize> = (0..qq).map(|x| mul(&[x, x, x])).collect();
    let squares: Vec<usize> = (0..qq).map(|x| mul(&[x, x])).collect();

    let mut traces = BTreeSet::new();
    let mut curves = 0usize;
    for a1 in 0..qq {
        for a2 in 0..qq {
            for a3 in 0..qq {
                for a4 in 0..qq {
                    for a6 in 0..qq {
                        let b2 = f.add(squares[a1], mul(&[c(4), a2]));
                        let b4 = f.add(mul(&[c(2), a4]), mul(&[a1, a3]));
                        let b6 = f.add(squares[a3], mul(&[c(4), a6]));
                        let b8 = f.sub(
                            sum(&[mul(&[a1, a1, a6]), mul(&[c(4), a2, a6]), mul(&[a2, a3, a3])]),
                            f.add(mul(&[a1, a3, a4]), squares[a4]),
                        );
                        let disc = f.sub(
                            mul(&[c(9), b2, b4, b6]),
                            sum(&[
                                mul(&[b2, b2, b8]),
                                mul(&[c(8), b4, b4, b4]),
                                mul(&[c(27), b6, b6]),
                            ]),
                        );
                        if disc == 0 {
                            continue;
                        }
                        curves += 1;
                        let mut count = 1i64;
                        for x in 0..qq {
                            let rhs = sum(&[cubes[x], mul(&[a2, squares[x]]), mul(&[a4, x]), a6]);
                            count += hist[((a1 * qq + a3) * qq + x) * qq + rhs] as i64;
                        }
                        traces.insert(qq as i64 + 1 - count);
                    }
                }
            }
        }
    }
    let tmax = *traces.last().expect("some smooth curve exists");
    let tmin = *traces.first().expect("some smooth curve exists");
    Ok(EllipticEnumeration {
        q: q.q(),
        curves,
        traces,
        max: qq as i64 + 1 - tmin,
        min: qq as i64 + 1 - tmax,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionExtrema {
    pub q: u64,
    pub filtered: bool,
    pub points: usize,
    pub excluded: usize,
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub max: Int,
    pub max_at: (i64, i64),
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub min: Int,
    pub min_at: (i64, i64),
}

/// Exhaustive max/min of `#A(F_q)` over the Rück region, optionally
/// dropping the points ruled out by the Jacobian fact table.
pub fn region_extrema(q: &PrimePower, filter: bool) -> RegionExtrema {
    let mut points = 0;
    let mut excluded = 0;
    let mut best: Option<(Int, (i64, i64), Int, (i64, i64))> = None;
    for s in ruck_enumerate(q) {
        points += 1;
        if filter && jacobian_exclusion(q, s.a1, s.a2).is_some() {
            excluded += 1;
            continue;
        }
        let c = s.count();
        let at = (s.a1, s.a2);
        best = Some(match best {
            None => (c.clone(), at, c, at),
            Some((mx, mxa, mn, mna)) => {
                let (mx, mxa) = if c > mx { (c.clone(), at) } else { (mx, mxa) };
                let (mn, mna) = if c < mn { (c, at) } else { (mn, mna) };
                (mx, mxa, mn, mna)
            }
        });
    }
    let (max, max_at, min, min_at) = best.expect("the region contains (0, 0)");
    RegionExtrema { q: q.q(), filtered: filter, points, excluded, max, max_at, min, min_at }
}

/// Products of elliptic factors `1 + x t + q t²` with `|x| ≤ m`.
pub fn elliptic_products(q: &PrimePower, g: usize) -> Vec<WeilPolynomial> {
    let m = q.m() as i64;
    let mut out = Vec::new();
    let mut xs = vec![-m; g];
    loop {
        let p = xs.iter().try_fold(WeilPolynomial::unit(*q), |acc, &x| {
            WeilPolynomial::elliptic(*q, x).and_then(|e| acc.product(&e))
        });
        if let Ok(p) = p {
            out.push(p);
        }
        // non-decreasing tuples only
        let Some(i) = (0..g).rev().find(|&i| xs[i] < m) else { break };
        let v = xs[i] + 1;
        for x in &mut xs[i..] {
            *x = v;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyLine {
    pub check: String,
    pub status: &'static str,
    pub detail: String,
}

impl VerifyLine {
    fn new(check: &str, ok: bool, detail: String) -> Self {
        VerifyLine { check: check.into(), status: if ok { "pass" } else { "fail" }, detail }
    }

    fn skip(check: &str, detail: String) -> Self {
        VerifyLine { check: check.into(), status: "skip", detail }
    }
}

/// Cap on the polynomials fed to the identity and sandwich checks.
const CORPUS_LIMIT: usize = 60;

fn corpus(q: &PrimePower) -> Vec<WeilPolynomial> {
    let mut out = Vec::new();
    for g in 1..=3 {
        out.extend(elliptic_products(q, g).into_iter().take(CORPUS_LIMIT / 3));
    }
    let region = ruck_enumerate(q);
    let step = (region.len() / (CORPUS_LIMIT / 3)).max(1);
    out.extend(region.iter().step_by(step).filter_map(|s| s.weil().ok()));
    out
}

/// The whole suite for one `q`; the last line is the summary.
pub fn verify(q: &PrimePower, prec: usize) -> Result<Vec<VerifyLine>> {
    let mut lines = Vec::new();

    if q.q() <= SmallField::MAX_ORDER {
        let ok = SmallField::new(q).is_ok();
        lines.push(VerifyLine::new("field_tables", ok, format!("F_{} by explicit tables", q.q())));
    } else {
        lines.push(VerifyLine::skip("field_tables", format!("q > {}", SmallField::MAX_ORDER)));
    }

    let closed = extremal_elliptic(q);
    if q.q() <= ENUMERATE_MAX_Q {
        let e = enumerate_elliptic(q)?;
        let w = waterhouse_traces(q);
        lines.push(VerifyLine::new(
            "elliptic_traces",
            e.traces == w,
            format!("{} curves, traces {:?}", e.curves, e.traces),
        ));
        lines.push(VerifyLine::new(
            "elliptic_extremes",
            e.extremes() == closed,
            format!("observed J = {}, j = {}; closed form J = {}, j = {}", e.max, e.min, closed.max, closed.min),
        ));
    } else {
        let w = waterhouse_traces(q);
        let ok = q.q() as i64 + 1 - w.first().unwrap() == closed.max
            && q.q() as i64 + 1 - w.last().unwrap() == closed.min;
        lines.push(VerifyLine::new(
            "elliptic_extremes",
            ok,
            format!("closed form against admissible traces: J = {}, j = {}", closed.max, closed.min),
        ));
    }

    let ext = extremal_surface(q)?;
    let open = region_extrema(q, false);
    let filtered = region_extrema(q, true);
    lines.push(VerifyLine::new(
        "surface_witnesses",
        witnesses_hold(q, &ext),
        format!("J = {} ({}) at {:?}, j = {} ({}) at {:?}", ext.max, ext.max_case, ext.max_witness, ext.min, ext.min_case, ext.min_witness),
    ));
    lines.push(VerifyLine::new(
        "surface_region_bounds",
        open.max >= ext.max && open.min <= ext.min,
        format!("region max {} at {:?}, min {} at {:?}", open.max, open.max_at, open.min, open.min_at),
    ));
    lines.push(VerifyLine::new(
        "surface_filtered_extremes",
        filtered.max == ext.max && filtered.min == ext.min,
        format!(
            "{} of {} points excluded; max {} at {:?}, min {} at {:?}",
            filtered.excluded, filtered.points, filtered.max, filtered.max_at, filtered.min, filtered.min_at
        ),
    ));

    let t = extremal_tables(q);
    let bp = Int::from(q.q() as i64 + 1 - q.m() as i64);
    let rows_ok = t.max_rows.iter().all(|r| r.count == r.printed)
        && t.min_rows.iter().enumerate().all(|(i, r)| {
            if i == 1 { r.count == &bp * &bp + &bp - 1u32 } else { r.count == r.printed }
        });
    lines.push(VerifyLine::new(
        "extremal_tables",
        rows_ok && t.max_decreasing,
        format!(
            "rows match (min φ row recomputed), max decreasing {}, min increasing {}",
            t.max_decreasing, t.min_increasing
        ),
    ));

    let polys = corpus(q);
    let mut id_fail = Vec::new();
    let mut sandwich_fail = Vec::new();
    for p in &polys {
        let z = expand(p, 2 * p.g() + 4)?;
        if series_divide(p, z.n_max()) != z.a() {
            id_fail.push(format!("{:?}: long division", p.coeffs()));
        }
        let r = verify_identities(&z)?;
        for f in r.failures() {
            id_fail.push(format!("{:?}: {}", p.coeffs(), f.name));
        }
        let x = QuadraticValue::integer(p.point_count());
        let rep = upper_bounds(q, p.g(), &p.tau())?.merged(lower_bounds(LowerInput::Polynomial(p), prec)?);
        let v = rep.violations(&x)?;
        if !v.is_empty() {
            sandwich_fail.push(format!("{:?}: {}", p.coeffs(), v.join(", ")));
        }
    }
    lines.push(VerifyLine::new(
        "zeta_identities",
        id_fail.is_empty(),
        if id_fail.is_empty() { format!("{} polynomials", polys.len()) } else { id_fail.join("; ") },
    ));
    lines.push(VerifyLine::new(
        "bound_sandwich",
        sandwich_fail.is_empty(),
        if sandwich_fail.is_empty() { format!("{} polynomials", polys.len()) } else { sandwich_fail.join("; ") },
    ));

    let ok = lines.iter().all(|l| l.status != "fail");
    let failed = lines.iter().filter(|l| l.status == "fail").count();
    lines.push(VerifyLine::new("summary", ok, format!("{} checks, {failed} failed", lines.len())));
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil::make_weil;

    fn q(n: u64) -> PrimePower {
        PrimePower::new(n).unwrap()
    }

    #[test]
    fn long_division() {
        let p = make_weil(q(2), 1, &[Int::from(1), Int::from(0), Int::from(2)]).unwrap();
        let a = series_divide(&p, 4);
        assert_eq!(a, [1, 3, 9, 21, 45].map(Int::from));
    }

    #[test]
    fn formal_exp() {
        let n = [2, 12, 14, 8].map(Int::from);
        let e = formal_exp_oracle(&n, 4);
        let want = [1, 2, 8, 18, 42].map(|x| Rat::from_integer(Int::from(x)));
        assert_eq!(e, want);
    }

    #[test]
    fn elliptic_oracle() {
        let cases = [(2, 5, 1), (3, 7, 1), (4, 9, 1), (5, 10, 2), (7, 13, 3), (8, 14, 4), (9, 16, 4)];
        for (qq, jmax, jmin) in cases {
            let e = enumerate_elliptic(&q(qq)).unwrap();
            assert_eq!((e.max, e.min), (jmax, jmin), "q = {qq}");
            assert_eq!(e.extremes(), extremal_elliptic(&q(qq)));
            assert_eq!(e.traces, waterhouse_traces(&q(qq)), "q = {qq}");
        }
    }

    #[test]
    fn smooth_curve_counts() {
        // (q-1) q^4 smooth long Weierstrass equations over F_q
        for qq in [2u64, 3, 4, 5] {
            let e = enumerate_elliptic(&q(qq)).unwrap();
            assert_eq!(e.curves as u64, (qq - 1) * qq.pow(4));
        }
    }

    #[test]
    fn admissible_traces() {
        assert_eq!(waterhouse_traces(&q(2)), (-2..=2).collect());
        assert_eq!(waterhouse_traces(&q(8)), [-5, -4, -3, -1, 0, 1, 3, 4, 5].into_iter().collect());
        let t = waterhouse_traces(&q(128));
        assert!(!t.contains(&22) && t.contains(&21) && !t.contains(&20) && t.contains(&16));
    }

    #[test]
    fn region_search() {
        let r = region_extrema(&q(4), true);
        assert_eq!((r.max.clone(), r.max_at), (Int::from(55), (5, 13)));
        let open = region_extrema(&q(4), false);
        assert_eq!(open.max, Int::from(81));
        for qq in (2..=50).filter_map(|n| PrimePower::new(n).ok()) {
            let e = extremal_surface(&qq).unwrap();
            let r = region_extrema(&qq, true);
            assert_eq!((r.max, r.min), (e.max, e.min), "q = {}", qq.q());
        }
    }

    #[test]
    fn products_enumerated() {
        assert_eq!(elliptic_products(&q(2), 2).len(), 15);
    }

    #[test]
    fn suite_passes() {
        for qq in [2u64, 3, 4, 8] {
            let lines = verify(&q(qq), 96).unwrap();
            let last = lines.last().unwrap();
            assert_eq!(last.check, "summary");
            assert_eq!(last.status, "pass", "{lines:#?}");
        }
    }
}
