//! Elliptic curves and abelian surfaces: special prime powers, the extremal
//! values `J_q(1)`, `j_q(1)`, `J_q(2)`, `j_q(2)`, the Rück region of
//! characteristic polynomials `t⁴ + a1 t³ + a2 t² + q a1 t + q²`, and the
//! tables of pairs `(a1, a2)` that maximize or minimize `#A(F_q)`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::{
    frac_2sqrtq_cmp, isqrt_u64, phi1, phi2, sqrt2_minus_1, PrimePower, QuadraticValue,
};
use crate::weil::WeilPolynomial;
use crate::{Error, Int, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceParams {
    #[serde(skip)]
    pub q: PrimePower,
    pub a1: i64,
    pub a2: i64,
}

/// `|a1| ≤ 2m` and `2|a1|√q - 2q ≤ a2 ≤ a1²/4 + 2q`, decided in integers.
pub fn in_ruck_region(q: &PrimePower, a1: i64, a2: i64) -> bool {
    let (a1, a2) = (a1 as i128, a2 as i128);
    let qq = q.q() as i128;
    let m = q.m() as i128;
    if a1.abs() > 2 * m || 4 * a2 > a1 * a1 + 8 * qq {
        return false;
    }
    // 2|a1|√q ≤ a2 + 2q
    let rhs = a2 + 2 * qq;
    rhs >= 0 && 4 * a1 * a1 * qq <= rhs * rhs
}

impl SurfaceParams {
    pub fn new(q: PrimePower, a1: i64, a2: i64) -> Result<Self> {
        if !in_ruck_region(&q, a1, a2) {
            return Err(Error::Domain(format!(
                "(a1, a2) = ({a1}, {a2}) is outside the Rück region for q = {}",
                q.q()
            )));
        }
        Ok(SurfaceParams { q, a1, a2 })
    }

    /// `q² + 1 + (q+1) a1 + a2`.
    pub fn count(&self) -> Int {
        surface_count_raw(&self.q, self.a1, self.a2)
    }

    pub fn weil(&self) -> Result<WeilPolynomial> {
        WeilPolynomial::surface(self.q, self.a1, self.a2)
    }

    /// `[x1, x2]` when both are integers, `x1 ≥ x2`.
    pub fn split_type(&self) -> Option<(i64, i64)> {
        split_type(&self.q, self.a1, self.a2)
    }
}

fn surface_count_raw(q: &PrimePower, a1: i64, a2: i64) -> Int {
    let qi = q.q_int();
    &qi * &qi + 1 + (&qi + 1) * a1 + a2
}

/// `x1, x2` are the roots of `x² - a1 x + (a2 - 2q)`.
fn split_type(q: &PrimePower, a1: i64, a2: i64) -> Option<(i64, i64)> {
    let disc = a1 * a1 - 4 * (a2 - 2 * q.q() as i64);
    if disc < 0 {
        return None;
    }
    let s = isqrt_u64(disc as u64) as i64;
    if s * s != disc || (a1 + s) % 2 != 0 {
        return None;
    }
    Some(((a1 + s) / 2, (a1 - s) / 2))
}

pub fn surface_count(s: &SurfaceParams) -> Result<Int> {
    if !in_ruck_region(&s.q, s.a1, s.a2) {
        return Err(Error::Domain(format!("({}, {}) is outside the Rück region", s.a1, s.a2)));
    }
    Ok(s.count())
}

/// All region points, `a1` descending then `a2` descending.
pub fn ruck_enumerate(q: &PrimePower) -> Vec<SurfaceParams> {
    let m = q.m() as i64;
    let qq = q.q() as i64;
    let mut out = Vec::new();
    for a1 in (-2 * m..=2 * m).rev() {
        let hi = (a1 * a1 + 8 * qq).div_euclid(4);
        let mut a2 = hi;
        while in_ruck_region(q, a1, a2) {
            out.push(SurfaceParams { q: *q, a1, a2 });
            a2 -= 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialityReport {
    pub special: bool,
    pub reasons: Vec<&'static str>,
    pub m2_minus_4q: i64,
    pub note: Option<String>,
}

/// Serre's special odd prime powers: `p | m` or `m² - 4q ∈ {-4, -3, -7}`.
pub fn is_special(q: &PrimePower) -> SpecialityReport {
    let m = q.m() as i64;
    let m2_minus_4q = m * m - 4 * q.q() as i64;
    if q.is_square() {
        return SpecialityReport {
            special: false,
            reasons: Vec::new(),
            m2_minus_4q,
            note: Some("speciality is defined for odd powers of p only".into()),
        };
    }
    let mut reasons = Vec::new();
    if m % q.p() as i64 == 0 {
        reasons.push("p_divides_m");
    }
    match m2_minus_4q {
        -4 => reasons.push("disc_minus4"),
        -3 => reasons.push("disc_minus3"),
        -7 => reasons.push("disc_minus7"),
        _ => {}
    }
    SpecialityReport { special: !reasons.is_empty(), reasons, m2_minus_4q, note: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EllipticExtremes {
    #[serde(rename = "J")]
    pub max: i64,
    #[serde(rename = "j")]
    pub min: i64,
}

/// `J_q(1)` and `j_q(1)` from the Deuring–Waterhouse classification.
pub fn extremal_elliptic(q: &PrimePower) -> EllipticExtremes {
    let qq = q.q() as i64;
    let m = q.m() as i64;
    if q.n() == 1 || q.n().is_multiple_of(2) || m % q.p() as i64 != 0 {
        EllipticExtremes { max: qq + 1 + m, min: qq + 1 - m }
    } else {
        EllipticExtremes { max: qq + m, min: qq + 2 - m }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceExtremes {
    #[serde(rename = "J", serialize_with = "crate::serial::serialize_int")]
    pub max: Int,
    #[serde(rename = "j", serialize_with = "crate::serial::serialize_int")]
    pub min: Int,
    #[serde(rename = "J_case")]
    pub max_case: &'static str,
    #[serde(rename = "j_case")]
    pub min_case: &'static str,
    /// A region point of the type the closed form names for `J`.
    #[serde(rename = "J_witness")]
    pub max_witness: (i64, i64),
    #[serde(rename = "j_witness")]
    pub min_witness: (i64, i64),
}

/// `∏ (c + x)` over the conjugates `x`, which must be an integer.
fn conj_product(c: i64, xs: &[QuadraticValue]) -> Int {
    let ci = QuadraticValue::integer(c);
    xs.iter()
        .fold(QuadraticValue::one(), |acc, x| &acc * &(&ci + x))
        .as_integer()
        .expect("products over a full conjugate set are rational integers")
}

/// `J_q(2)` and `j_q(2)` with the branch that produced each.
pub fn extremal_surface(q: &PrimePower) -> Result<SurfaceExtremes> {
    let qq = q.q() as i64;
    let m = q.m() as i64;
    let b = qq + 1 + m;
    let b2 = qq + 1 - m;
    let sq = |x: i64| Int::from(x) * Int::from(x);
    // a2 of the table rows by offset: m² - k·m - c + 2q.
    let a2 = |k: i64, c: i64| m * m - k * m - c + 2 * qq;

    if q.is_square() {
        return Ok(match qq {
            4 => SurfaceExtremes {
                max: Int::from(55),
                min: Int::from(5),
                max_case: "square_q4",
                min_case: "square_q4",
                max_witness: (5, 13),
                min_witness: (-5, 13),
            },
            9 => SurfaceExtremes {
                max: Int::from(225),
                min: Int::from(25),
                max_case: "square_q9",
                min_case: "square_q9",
                max_witness: (2 * m - 2, a2(2, -1)),
                min_witness: (-2 * m + 2, a2(2, -1)),
            },
            _ => SurfaceExtremes {
                max: sq(b),
                min: sq(b2),
                max_case: "square",
                min_case: "square",
                max_witness: (2 * m, a2(0, 0)),
                min_witness: (-2 * m, a2(0, 0)),
            },
        });
    }

    let spec = is_special(q);
    if !spec.special {
        return Ok(SurfaceExtremes {
            max: sq(b),
            min: sq(b2),
            max_case: "not_special",
            min_case: "not_special",
            max_witness: (2 * m, a2(0, 0)),
            min_witness: (-2 * m, a2(0, 0)),
        });
    }

    let frac_ge_phi = frac_2sqrtq_cmp(q, &phi1())? != Ordering::Less;
    let frac_ge_sqrt2 = frac_2sqrtq_cmp(q, &sqrt2_minus_1())? != Ordering::Less;
    let p = q.p() as i64;
    let p_divides_m = m % p == 0;
    let phis = [phi1(), phi2()];
    let neg_phis = [-phi1(), -phi2()];

    let (max, max_case, max_witness) = if frac_ge_phi {
        (conj_product(b, &phis), "special_phi", (2 * m - 1, a2(1, 1)))
    } else if p != 2 || p_divides_m {
        (sq(qq + m), "special_m_minus_1_squared", (2 * m - 2, a2(2, -1)))
    } else {
        (Int::from(b) * Int::from(qq - 1 + m), "special_m_m_minus_2", (2 * m - 2, a2(2, 0)))
    };

    let r2 = QuadraticValue::sqrt_of(2);
    let (min, min_case, min_witness) = if frac_ge_phi {
        (conj_product(b2, &neg_phis), "special_phi", (-2 * m + 1, a2(1, 1)))
    } else if frac_ge_sqrt2 {
        (conj_product(qq + 2 - m, &[r2.clone(), -r2]), "special_sqrt2", (-2 * m + 2, a2(2, 1)))
    } else if !p_divides_m && qq != 343 {
        (Int::from(b2) * Int::from(qq + 3 - m), "special_m_m_minus_2", (-2 * m + 2, a2(2, 0)))
    } else {
        (sq(qq + 2 - m), "special_otherwise", (-2 * m + 2, a2(2, -1)))
    };
    Ok(SurfaceExtremes { max, min, max_case, min_case, max_witness, min_witness })
}

/// An exclusion from the Jacobian surfaces, taken from the literature rather
/// than derived here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JacobianFact {
    pub key: &'static str,
    pub statement: &'static str,
}

pub const JACOBIAN_FACTS: &[JacobianFact] = &[
    JacobianFact {
        key: "hyperelliptic",
        statement: "a genus-2 curve is hyperelliptic, so #C(F_q) ≤ 2(q+1) and |a1| ≤ q+1",
    },
    JacobianFact {
        key: "trace_difference_one",
        statement: "a surface of split type [x1, x2] with |x1 - x2| = 1 is never a Jacobian",
    },
    JacobianFact {
        key: "special_mm",
        statement: "for non-square q, type [m, m] (or [-m, -m]) is a Jacobian iff q is not special",
    },
    JacobianFact {
        key: "dimension_multiple",
        statement: "for q = 2^5, 2^13 an abelian variety with all x_i = m-1 has dimension divisible by 5, 13",
    },
    JacobianFact {
        key: "almost_ordinary_q9",
        statement: "for q = 9, type [-m, -m+2] (and its twist) is almost ordinary and not a Jacobian",
    },
    JacobianFact {
        key: "no_trace_m",
        statement: "for non-square q with p | m, no elliptic curve has trace ±m",
    },
    JacobianFact {
        key: "no_trace_35",
        statement: "for q = 7^3, no elliptic curve has trace ±(m-2) = ±35",
    },
    JacobianFact {
        key: "q4_type_4_1",
        statement: "for q = 4, (a1, a2) = (±5, 12) is never a Jacobian",
    },
];

fn fact(key: &str) -> &'static JacobianFact {
    JACOBIAN_FACTS.iter().find(|f| f.key == key).expect("known fact key")
}

/// The first fact that rules out a Jacobian at `(a1, a2)`, if any.
pub fn jacobian_exclusion(q: &PrimePower, a1: i64, a2: i64) -> Option<&'static JacobianFact> {
    let qq = q.q() as i64;
    let m = q.m() as i64;
    if a1.abs() > qq + 1 {
        return Some(fact("hyperelliptic"));
    }
    if qq == 4 && a1.abs() == 5 && a2 == 12 {
        return Some(fact("q4_type_4_1"));
    }
    let (x1, x2) = split_type(q, a1, a2)?;
    // Normalize to the twist with a1 ≥ 0.
    let (u, v) = if a1 < 0 { (-x2, -x1) } else { (x1, x2) };
    if (x1 - x2).abs() == 1 {
        return Some(fact("trace_difference_one"));
    }
    if !q.is_square() && u == m && v == m && is_special(q).special {
        return Some(fact("special_mm"));
    }
    if (qq == 32 || qq == 8192) && u == m - 1 && v == m - 1 {
        return Some(fact("dimension_multiple"));
    }
    if qq == 9 && u == m && v == m - 2 {
        return Some(fact("almost_ordinary_q9"));
    }
    if !q.is_square() && m % q.p() as i64 == 0 && x1 != x2 && (x1.abs() == m || x2.abs() == m) {
        return Some(fact("no_trace_m"));
    }
    if qq == 343 && u == m && v == m - 2 {
        return Some(fact("no_trace_35"));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub a1: i64,
    pub a2: i64,
    pub label: &'static str,
    /// `q² + 1 + (q+1) a1 + a2`.
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub count: Int,
    /// The count column as printed, evaluated at `b` or `b'`.
    #[serde(serialize_with = "crate::serial::serialize_int")]
    pub printed: Int,
    pub in_region: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalTables {
    pub max_rows: Vec<TableRow>,
    pub min_rows: Vec<TableRow>,
    pub max_decreasing: bool,
    pub min_increasing: bool,
    /// Region points with `-2m ≤ a1 < 2m-2` all count less than the last max row.
    pub max_chain: bool,
    /// Region points with `-2m+2 < a1 ≤ 2m` all count more than the last min row.
    pub min_chain: bool,
    /// Region points breaking either chain.
    pub chain_counterexamples: Vec<(i64, i64)>,
}

/// Recomputes both tables for `q`; counts come from `(a1, a2)`.
pub fn extremal_tables(q: &PrimePower) -> ExtremalTables {
    let qq = q.q() as i64;
    let m = q.m() as i64;
    let b = Int::from(qq + 1 + m);
    let bp = Int::from(qq + 1 - m);
    let a2 = |k: i64, c: i64| m * m - k * m - c + 2 * qq;
    let row = |a1: i64, a2: i64, label: &'static str, printed: Int| TableRow {
        a1,
        a2,
        label,
        count: surface_count_raw(q, a1, a2),
        printed,
        in_region: in_ruck_region(q, a1, a2),
    };
    let max_rows = vec![
        row(2 * m, a2(0, 0), "[m,m]", &b * &b),
        row(2 * m - 1, a2(1, 0), "[m,m-1]", &b * (&b - 1)),
        row(2 * m - 1, a2(1, 1), "[m+φ1,m+φ2]", &b * &b - &b - 1),
        row(2 * m - 2, a2(2, -1), "[m-1,m-1]", (&b - 1) * (&b - 1)),
        row(2 * m - 2, a2(2, 0), "[m,m-2]", &b * (&b - 2)),
        row(2 * m - 2, a2(2, 1), "[m-1+√2,m-1-√2]", (&b - 1) * (&b - 1) - 2),
        row(2 * m - 2, a2(2, 2), "[m-1+√3,m-1-√3]", (&b - 1) * (&b - 1) - 3),
    ];
    let min_rows = vec![
        row(-2 * m, a2(0, 0), "[-m,-m]", &bp * &bp),
        row(-2 * m + 1, a2(1, 1), "[-m+φ1,-m+φ2]", &bp * &bp - &bp - 1),
        row(-2 * m + 1, a2(1, 0), "[-m,-m+1]", &bp * (&bp + 1)),
        row(-2 * m + 2, a2(2, 2), "[-m+1+√3,-m+1-√3]", (&bp + 1) * (&bp + 1) - 3),
        row(-2 * m + 2, a2(2, 1), "[-m+1+√2,-m+1-√2]", (&bp + 1) * (&bp + 1) - 2),
        row(-2 * m + 2, a2(2, 0), "[-m,-m+2]", &bp * (&bp + 2)),
        row(-2 * m + 2, a2(2, -1), "[-m+1,-m+1]", (&bp + 1) * (&bp + 1)),
    ];
    let max_decreasing = max_rows.windows(2).all(|w| w[0].count > w[1].count);
    let min_increasing = min_rows.windows(2).all(|w| w[0].count < w[1].count);

    let region = ruck_enumerate(q);
    let max_floor = (qq + 1) * (2 * m - 2) + a2(2, 2);
    let min_ceiling = (qq + 1) * (-2 * m + 2) + a2(2, -1);
    let max_bad: Vec<(i64, i64)> = region
        .iter()
        .filter(|s| s.a1 < 2 * m - 2 && (qq + 1) * s.a1 + s.a2 >= max_floor)
        .map(|s| (s.a1, s.a2))
        .collect();
    let min_bad: Vec<(i64, i64)> = region
        .iter()
        .filter(|s| s.a1 > -2 * m + 2 && (qq + 1) * s.a1 + s.a2 <= min_ceiling)
        .map(|s| (s.a1, s.a2))
        .collect();
    ExtremalTables {
        max_rows,
        min_rows,
        max_decreasing,
        min_increasing,
        max_chain: max_bad.is_empty(),
        min_chain: min_bad.is_empty(),
        chain_counterexamples: max_bad.into_iter().chain(min_bad).collect(),
    }
}

/// Whether the `J` and `j` witnesses are region points of the stated counts.
pub fn witnesses_hold(q: &PrimePower, e: &SurfaceExtremes) -> bool {
    let ok = |(a1, a2): (i64, i64), v: &Int| {
        in_ruck_region(q, a1, a2) && &surface_count_raw(q, a1, a2) == v
    };
    ok(e.max_witness, &e.max) && ok(e.min_witness, &e.min)
}
