use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};
use weilbound::bounds::{
    eta_lower_estimates, jacobian_lower_bounds, lower_bounds, upper_bounds, Conditions,
    JacobianInput, LowerInput,
};
use weilbound::genus12::{
    extremal_elliptic, extremal_surface, extremal_tables, is_special, jacobian_exclusion,
    ruck_enumerate, TableRow,
};
use weilbound::oracle::{self, region_extrema, waterhouse_traces};
use weilbound::serial::int_value;
use weilbound::zeta::{check_conditions, expand, verify_identities};
use weilbound::{BoundReport, BoundValue, Int, PrimePower, QuadraticValue, Rat, WeilPolynomial};

use crate::render::Report;

/// Extra bits used to re-derive every float-valued bound.
const CROSS_CHECK_BITS: usize = 32;

#[derive(Debug)]
pub enum Failure {
    /// Bad input or a hypothesis that does not hold (exit 1).
    Input(String),
    /// A broken invariant (exit 2).
    Internal(String),
}

impl From<weilbound::Error> for Failure {
    fn from(e: weilbound::Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Internal(e.to_string()))
}

fn ints(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

#[derive(Debug, Clone)]
pub enum BoundsInput {
    Tau(Int),
    Count(Int),
    Coeffs(Vec<Int>),
}

struct BoundsRun {
    report: BoundReport,
    eta: Option<BoundReport>,
}

fn bound_reports(
    q: &PrimePower,
    g: usize,
    input: &BoundsInput,
    poly: Option<&WeilPolynomial>,
    prec: usize,
) -> Result<BoundsRun, Failure> {
    let qi = q.q_int();
    let jacobian = |n: &Int, fill: &dyn Fn(&mut JacobianInput) -> Result<(), Failure>| {
        if g < 2 || n.is_negative() {
            return Ok(None);
        }
        let mut ji = JacobianInput::new(*q, g, n.clone());
        fill(&mut ji)?;
        Ok::<_, Failure>(Some(jacobian_lower_bounds(&ji, prec)?))
    };
    let run = match (input, poly) {
        (BoundsInput::Tau(tau), _) => BoundsRun {
            report: upper_bounds(q, g, tau)?.merged(lower_bounds(LowerInput::Data { q: *q, g, tau }, prec)?),
            eta: None,
        },
        (BoundsInput::Count(n), _) => {
            let tau = n - &qi - 1u32;
            let mut report =
                upper_bounds(q, g, &tau)?.merged(lower_bounds(LowerInput::Data { q: *q, g, tau: &tau }, prec)?);
            if let Some(j) = jacobian(n, &|_| Ok(()))? {
                report = report.merged(j);
            }
            BoundsRun { report, eta: Some(eta_lower_estimates(q, g, Some(n))?) }
        }
        (BoundsInput::Coeffs(_), Some(p)) => {
            let mut report = upper_bounds(q, g, &p.tau())?.merged(lower_bounds(LowerInput::Polynomial(p), prec)?);
            let n1 = &qi + 1u32 + p.tau();
            let fill = |ji: &mut JacobianInput| {
                let z = expand(p, 2 * g)?;
                let c = check_conditions(&z)?;
                ji.b = Some(z.b().to_vec());
                ji.eta = p.eta().ok();
                ji.extra = Some((z.n_at(g).clone(), z.n_at(g - 1).clone()));
                ji.conditions = Conditions { b: c.b_holds, n: c.n_holds };
                Ok(())
            };
            if let Some(j) = jacobian(&n1, &fill)? {
                report = report.merged(j);
            }
            BoundsRun { report, eta: Some(eta_lower_estimates(q, g, Some(&n1))?) }
        }
        (BoundsInput::Coeffs(_), None) => unreachable!("coefficients are parsed before bounding"),
    };
    Ok(run)
}

/// Float entries recomputed with more bits must agree to `prec - 32` bits.
fn cross_check(lo: &BoundReport, hi: &BoundReport, prec: usize) -> Result<(), Failure> {
    if lo.entries.len() != hi.entries.len() {
        return Err(Failure::Internal("bound reports differ in shape across precisions".into()));
    }
    let tol = Rat::new(1.into(), Int::from(1) << (prec - CROSS_CHECK_BITS));
    for (a, b) in lo.entries.iter().zip(&hi.entries) {
        if a.bound != b.bound || a.applicable != b.applicable {
            return Err(Failure::Internal(format!("{} changes across precisions", a.bound)));
        }
        match (&a.value, &b.value) {
            (Some(BoundValue::Float(x)), Some(BoundValue::Float(y))) => {
                let scale = y.value().abs().max(Rat::from_integer(1.into()));
                if (x.value() - y.value()).abs() > &tol * scale {
                    return Err(Failure::Internal(format!(
                        "{} disagrees at {prec} and {} bits: {} vs {}",
                        a.bound,
                        prec + CROSS_CHECK_BITS,
                        x.to_f64(),
                        y.to_f64()
                    )));
                }
            }
            (Some(x), Some(y)) if x.is_exact() && x != y => {
                return Err(Failure::Internal(format!("exact value of {} depends on precision", a.bound)));
            }
            (None, None) | (Some(_), Some(_)) => {}
            _ => return Err(Failure::Internal(format!("{} changes across precisions", a.bound))),
        }
    }
    Ok(())
}

pub fn bounds(q: u64, g: usize, input: BoundsInput, prec: usize) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    let parsed = match &input {
        BoundsInput::Coeffs(c) => {
            let (p, form) = WeilPolynomial::from_coeffs(q, g, c)?;
            if !p.is_weil_valid() {
                return Err(Failure::Input("coefficients do not define a q-Weil polynomial".into()));
            }
            Some((p, form))
        }
        _ => None,
    };
    let poly = parsed.as_ref().map(|(p, _)| p);
    let run = bound_reports(&q, g, &input, poly, prec)?;
    let check = bound_reports(&q, g, &input, poly, prec + CROSS_CHECK_BITS)?;
    cross_check(&run.report, &check.report, prec)?;

    let (mode, count) = match &input {
        BoundsInput::Tau(_) => ("tau", None),
        BoundsInput::Count(_) => ("N", None),
        BoundsInput::Coeffs(_) => ("coeffs", poly.map(WeilPolynomial::point_count)),
    };
    let violations = match &count {
        Some(n) => run.report.violations(&QuadraticValue::integer(n.clone()))?,
        None => Vec::new(),
    };
    let canonicalization = parsed.as_ref().map(|(_, f)| *f);
    let mut doc = json!({
        "command": "bounds",
        "q": q.q(),
        "g": g,
        "input": mode,
        "tau": int_value(&run.report.tau),
        "N": match &input {
            BoundsInput::Count(n) => Some(int_value(n)),
            _ => None,
        },
        "canonicalization": to_value(&canonicalization)?,
        "P": poly.map(|p| ints(p.coeffs())),
        "point_count": count.as_ref().map(int_value),
        "eta": poly.and_then(|p| p.eta().ok()).map(|e| e.to_string()),
        "precision_bits": prec,
        "entries": to_value(&run.report.entries)?,
        "eta_estimates": run.eta.as_ref().map(|r| to_value(&r.entries)).transpose()?,
        "violations": violations,
    });
    doc.as_object_mut().expect("object").retain(|_, v| !v.is_null());
    let mut header = format!("q = {}  g = {g}  tau = {}", q.q(), run.report.tau);
    if let BoundsInput::Count(n) = &input {
        header.push_str(&format!("  N = {n}"));
    }
    if let Some(n) = &count {
        header.push_str(&format!("  #A(F_q) = {n}"));
    }
    if let Some(f) = canonicalization {
        header.push_str(&format!("  input read as {}", cell_str(&to_value(&f)?)));
    }
    let mut rep = Report::new(doc, Some("entries"));
    rep.header = Some(header);
    if !violations.is_empty() {
        eprintln!("bound violations: {}", violations.join("; "));
        rep.failed = true;
    }
    Ok(rep)
}

fn cell_str(v: &Value) -> String {
    crate::render::cell(v)
}

pub fn zeta(q: u64, g: usize, coeffs: &[Int], n_max: usize) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    if n_max == 0 {
        return Err(Failure::Input("--n-max must be at least 1".into()));
    }
    let (p, form) = WeilPolynomial::from_coeffs(q, g, coeffs)?;
    let z = expand(&p, n_max)?;
    let identities = verify_identities(&z)?;
    let conditions = check_conditions(&z)?;
    let rows: Vec<Value> = (0..=n_max)
        .map(|n| {
            json!({
                "n": n,
                "A": int_value(&z.a()[n]),
                "N": (n >= 1).then(|| int_value(z.n_at(n))),
                "B": (n >= 1).then(|| int_value(z.b_at(n))),
            })
        })
        .collect();
    let doc = json!({
        "command": "zeta",
        "q": q.q(),
        "g": g,
        "canonicalization": to_value(&form)?,
        "P": ints(p.coeffs()),
        "weil_valid": p.is_weil_valid(),
        "point_count": int_value(&p.point_count()),
        "n_max": n_max,
        "coefficients": rows,
        "identities": to_value(&identities.checks)?,
        "conditions": to_value(&conditions)?,
    });
    let mut rep = Report::new(doc, Some("coefficients"));
    rep.header = Some(format!(
        "q = {}  g = {g}  input read as {}  (B) {}  (N) {}",
        q.q(),
        cell_str(&to_value(&form)?),
        if conditions.b_holds { "holds" } else { "fails" },
        if conditions.n_holds { "holds" } else { "fails" },
    ));
    if !identities.all_hold() {
        let names: Vec<&str> = identities.failures().map(|c| c.name).collect();
        eprintln!("identities failed: {}", names.join(", "));
        rep.failed = true;
    }
    Ok(rep)
}

fn table_rows(which: &str, rows: &[TableRow]) -> Result<Vec<Value>, Failure> {
    rows.iter()
        .map(|r| {
            let mut v = json!({"table": which});
            let m = v.as_object_mut().expect("object");
            if let Value::Object(fields) = to_value(r)? {
                m.extend(fields);
            }
            Ok(v)
        })
        .collect()
}

pub fn extremal(q: u64) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    let e1 = extremal_elliptic(&q);
    let e2 = extremal_surface(&q)?;
    let sp = is_special(&q);
    let tables = extremal_tables(&q);
    let mut table = table_rows("max", &tables.max_rows)?;
    table.extend(table_rows("min", &tables.min_rows)?);
    let doc = json!({
        "command": "extremal",
        "q": q.q(),
        "J1": e1.max,
        "j1": e1.min,
        "J2": int_value(&e2.max),
        "j2": int_value(&e2.min),
        "special": sp.special,
        "speciality": to_value(&sp)?,
        "cases": {"J2": e2.max_case, "j2": e2.min_case},
        "witnesses": {"J2": [e2.max_witness.0, e2.max_witness.1], "j2": [e2.min_witness.0, e2.min_witness.1]},
        "table": table,
        "table_checks": {
            "max_decreasing": tables.max_decreasing,
            "min_increasing": tables.min_increasing,
            "max_chain": tables.max_chain,
            "min_chain": tables.min_chain,
        },
    });
    let mut rep = Report::new(doc, Some("table"));
    rep.header = Some(format!(
        "q = {}  J1 = {}  j1 = {}  J2 = {} ({})  j2 = {} ({})  special = {}",
        q.q(),
        e1.max,
        e1.min,
        e2.max,
        e2.max_case,
        e2.min,
        e2.min_case,
        sp.special
    ));
    if !weilbound::genus12::witnesses_hold(&q, &e2) {
        eprintln!("extremal witnesses do not attain the stated values");
        rep.failed = true;
    }
    Ok(rep)
}

pub fn enumerate_elliptic(q: u64) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    let en = oracle::enumerate_elliptic(&q)?;
    let admissible = waterhouse_traces(&q);
    let rows: Vec<Value> = admissible
        .union(&en.traces)
        .map(|&t| json!({"trace": t, "admissible": admissible.contains(&t), "realized": en.traces.contains(&t)}))
        .collect();
    let matches = en.extremes() == extremal_elliptic(&q) && en.traces == admissible;
    let doc = json!({
        "command": "enumerate",
        "kind": "elliptic",
        "q": q.q(),
        "curves": en.curves,
        "J": en.max,
        "j": en.min,
        "matches_closed_form": matches,
        "traces": rows,
    });
    let mut rep = Report::new(doc, Some("traces"));
    rep.header = Some(format!("q = {}  curves = {}  J = {}  j = {}", q.q(), en.curves, en.max, en.min));
    rep.failed = !matches;
    Ok(rep)
}

pub fn enumerate_region(q: u64) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    let rows: Vec<Value> = ruck_enumerate(&q)
        .iter()
        .map(|s| {
            json!({
                "a1": s.a1,
                "a2": s.a2,
                "count": int_value(&s.count()),
                "jacobian_exclusion": jacobian_exclusion(&q, s.a1, s.a2).map(|f| f.key),
            })
        })
        .collect();
    let all = region_extrema(&q, false);
    let filtered = region_extrema(&q, true);
    let doc = json!({
        "command": "enumerate",
        "kind": "region",
        "q": q.q(),
        "extrema": to_value(&all)?,
        "filtered_extrema": to_value(&filtered)?,
        "points": rows,
    });
    let mut rep = Report::new(doc, Some("points"));
    rep.header = Some(format!(
        "q = {}  points = {}  max = {}  min = {}  after exclusions: max = {}  min = {}",
        q.q(),
        all.points,
        all.max,
        all.min,
        filtered.max,
        filtered.min
    ));
    Ok(rep)
}

pub fn verify(q: u64, prec: usize) -> Result<Report, Failure> {
    let q = PrimePower::new(q)?;
    let lines = oracle::verify(&q, prec)?;
    let passed = lines.last().is_some_and(|l| l.check == "summary" && l.status == "pass");
    let mut rep = Report::new(json!({"lines": to_value(&lines)?}), Some("lines"));
    rep.json_lines = true;
    rep.failed = !passed;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precisions_agree() {
        let q = PrimePower::new(5).unwrap();
        let input = BoundsInput::Tau(Int::from(3));
        let a = bound_reports(&q, 3, &input, None, 64).unwrap();
        let b = bound_reports(&q, 3, &input, None, 96).unwrap();
        assert!(cross_check(&a.report, &b.report, 64).is_ok());
        let mut c = bound_reports(&q, 2, &input, None, 96).unwrap();
        c.report.entries.pop();
        assert!(matches!(cross_check(&a.report, &c.report, 64), Err(Failure::Internal(_))));
    }

    #[test]
    fn domain_errors_are_input_failures() {
        assert!(matches!(bounds(6, 2, BoundsInput::Tau(Int::from(0)), 96), Err(Failure::Input(_))));
        assert!(matches!(zeta(2, 1, &[Int::from(1)], 4), Err(Failure::Input(_))));
        assert!(matches!(enumerate_elliptic(64), Err(Failure::Input(_))));
    }

    #[test]
    fn extremal_document() {
        let rep = extremal(9).unwrap();
        assert_eq!(rep.doc["J2"], 225);
        assert_eq!(rep.doc["j2"], 25);
        assert!(!rep.failed);
    }
}
