//! The acceptance criteria, one PASS/FAIL line each.

use std::cmp::Ordering;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use weilbound::bounds::{
    defect_table, eta_lower_estimates, jacobian_lower_bounds, lower_bounds, trace_sandwich_holds,
    upper_bounds, Conditions, JacobianInput, LowerInput,
};
use weilbound::genus12::{
    extremal_elliptic, extremal_surface, extremal_tables, in_ruck_region, ruck_enumerate,
    surface_count, SurfaceParams,
};
use weilbound::oracle::enumerate_elliptic;
use weilbound::weil::{make_weil, InputForm};
use weilbound::zeta::{an_bound, an_lower, bn_envelope, check_conditions, expand, verify_identities};
use weilbound::{Int, PrimePower, QuadraticValue, Rat, WeilPolynomial};

const PREC: usize = 96;
const CORPUS_QS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];
const RANDOM_CORPUS: usize = 200;
const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn q(n: u64) -> PrimePower {
    PrimePower::new(n).unwrap()
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn product(q: PrimePower, xs: &[i64]) -> WeilPolynomial {
    xs.iter().fold(WeilPolynomial::unit(q), |acc, &x| {
        acc.product(&WeilPolynomial::elliptic(q, x).unwrap()).unwrap()
    })
}

/// 200 seeded products of elliptic factors plus the full q = 2, 3 regions.
fn corpus() -> Vec<WeilPolynomial> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for _ in 0..RANDOM_CORPUS {
        let qq = q(CORPUS_QS[rng.gen_range(0..CORPUS_QS.len())]);
        let m = qq.m() as i64;
        let g = rng.gen_range(1..=4);
        let xs: Vec<i64> = (0..g).map(|_| rng.gen_range(-m..=m)).collect();
        out.push(product(qq, &xs));
    }
    for qq in [2, 3] {
        out.extend(ruck_enumerate(&q(qq)).iter().map(|s| s.weil().unwrap()));
    }
    out
}

fn label(p: &WeilPolynomial) -> String {
    format!("q = {} P = {:?}", p.q().q(), p.coeffs().iter().map(Int::to_string).collect::<Vec<_>>())
}

fn exact_values() -> Outcome {
    let (p, form) = WeilPolynomial::from_coeffs(q(2), 2, &ints(&[4, -2, 0, -1, 1])).map_err(|e| e.to_string())?;
    ensure(form == InputForm::Characteristic, || "f not recognised".into())?;
    ensure(p.point_count() == Int::from(2), || format!("count {}", p.point_count()))?;
    let eta = p.eta().map_err(|e| e.to_string())?;
    ensure(eta == Rat::new(4.into(), 5.into()), || format!("eta {eta}"))?;

    let e1 = make_weil(q(2), 1, &ints(&[1, 0, 2])).unwrap();
    let e2 = make_weil(q(2), 1, &ints(&[1, -1, 2])).unwrap();
    let z = expand(&e1.product(&e2).unwrap(), 6).unwrap();
    ensure(z.b_at(4) == &Int::from(-1), || format!("B_4 = {}", z.b_at(4)))?;
    ensure(z.n_at(4) - z.n_at(1) == Int::from(6), || "N_4 - N_1".into())?;
    let cube = e2.product(&e2).unwrap().product(&e2).unwrap();
    let z = expand(&cube, 6).unwrap();
    ensure(z.b_at(6) == &Int::from(0), || format!("B_6 = {}", z.b_at(6)))?;
    ensure(z.n_at(6) - z.n_at(1) == Int::from(38), || "N_6 - N_1".into())?;
    let c = surface_count(&SurfaceParams::new(q(4), 5, 13).unwrap()).unwrap();
    ensure(c == Int::from(55), || format!("surface count {c}"))?;
    Ok("8 values".into())
}

fn extremal_values() -> Outcome {
    let want = [
        (2, 19, 1),
        (3, 36, 2),
        (4, 55, 5),
        (5, 81, 7),
        (8, 181, 19),
        (9, 225, 25),
        (13, 400, 63),
        (343, 144400, 94864),
    ];
    for (qq, jmax, jmin) in want {
        let qp = q(qq);
        let e = extremal_surface(&qp).map_err(|e| e.to_string())?;
        ensure(e.max == Int::from(jmax) && e.min == Int::from(jmin), || {
            format!("q = {qq}: ({}, {})", e.max, e.min)
        })?;
        for ((a1, a2), v) in [(e.max_witness, &e.max), (e.min_witness, &e.min)] {
            ensure(in_ruck_region(&qp, a1, a2), || format!("q = {qq}: ({a1}, {a2}) outside the region"))?;
            let c = surface_count(&SurfaceParams::new(qp, a1, a2).unwrap()).unwrap();
            ensure(&c == v, || format!("q = {qq}: witness ({a1}, {a2}) counts {c}"))?;
        }
    }
    Ok(format!("{} fields, witnesses attained", want.len()))
}

fn elliptic_oracle() -> Outcome {
    let mut q9 = Duration::ZERO;
    for qq in CORPUS_QS {
        let t = Instant::now();
        let en = enumerate_elliptic(&q(qq)).map_err(|e| e.to_string())?;
        if qq == 9 {
            q9 = t.elapsed();
        }
        let closed = extremal_elliptic(&q(qq));
        ensure(en.extremes() == closed, || format!("q = {qq}: {:?} vs {closed:?}", en.extremes()))?;
    }
    ensure(q9 <= Duration::from_secs(10), || format!("q = 9 took {q9:?}"))?;
    Ok(format!("7 fields, q = 9 in {:.2}s", q9.as_secs_f64()))
}

const IDENTITIES: [&str; 7] =
    ["gm1", "gm2", "formule_jac1", "formule_jac3", "a_2g_minus_2", "gm3", "three_way_agreement"];

fn identity_suite(corpus: &[WeilPolynomial]) -> Outcome {
    let mut applied = [0usize; IDENTITIES.len()];
    for p in corpus {
        let z = expand(p, 2 * p.g() + 2).map_err(|e| e.to_string())?;
        let r = verify_identities(&z).map_err(|e| e.to_string())?;
        if let Some(f) = r.failures().next() {
            return Err(format!("{}: {} fails ({})", label(p), f.name, f.detail));
        }
        for (i, name) in IDENTITIES.iter().enumerate() {
            if r.get(name).is_some_and(|c| c.applicable) {
                applied[i] += 1;
            }
        }
    }
    let missing: Vec<&str> = IDENTITIES.iter().zip(&applied).filter(|(_, &n)| n == 0).map(|(s, _)| *s).collect();
    ensure(missing.is_empty(), || format!("never applied: {missing:?}"))?;
    Ok(format!("{} polynomials", corpus.len()))
}

fn jacobian_input(p: &WeilPolynomial) -> Option<JacobianInput> {
    let g = p.g();
    if g < 2 {
        return None;
    }
    let z = expand(p, 2 * g).unwrap();
    let n = z.n_at(1).clone();
    if n < Int::from(0) {
        return None;
    }
    let c = check_conditions(&z).unwrap();
    let mut input = JacobianInput::new(*p.q(), g, n);
    input.b = Some(z.b().to_vec());
    input.eta = p.eta().ok();
    input.extra = Some((z.n_at(g).clone(), z.n_at(g - 1).clone()));
    input.conditions = Conditions { b: c.b_holds, n: c.n_holds };
    Some(input)
}

fn sandwich(corpus: &[WeilPolynomial]) -> Outcome {
    let mut entries = 0;
    for p in corpus {
        let count = QuadraticValue::integer(p.point_count());
        let mut rep = upper_bounds(p.q(), p.g(), &p.tau())
            .and_then(|u| Ok(u.merged(lower_bounds(LowerInput::Polynomial(p), PREC)?)))
            .map_err(|e| e.to_string())?;
        if let Some(input) = jacobian_input(p) {
            rep = rep.merged(jacobian_lower_bounds(&input, PREC).map_err(|e| e.to_string())?);
        }
        entries += rep.applicable().count();
        let v = rep.violations(&count).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("{}: {v:?}", label(p)))?;
    }
    Ok(format!("{} polynomials, {entries} applicable bounds, 0 violations", corpus.len()))
}

fn harmonic() -> Outcome {
    let mut scanned = 0;
    for qq in [8, 9, 11, 13] {
        let qp = q(qq);
        let floor = Rat::from_integer(Int::from(qq + 1 - qp.m()));
        for s in ruck_enumerate(&qp) {
            let eta = s.weil().unwrap().eta().map_err(|e| e.to_string())?;
            ensure(eta >= floor, || format!("q = {qq} ({}, {}): η = {eta}", s.a1, s.a2))?;
            scanned += 1;
        }
    }
    let (p, _) = WeilPolynomial::from_coeffs(q(2), 2, &ints(&[4, -2, 0, -1, 1])).unwrap();
    let eta = p.eta().unwrap();
    ensure(eta < Rat::from_integer(1.into()), || format!("η = {eta}"))?;
    let est = eta_lower_estimates(&q(2), 2, Some(&p.point_count())).unwrap();
    let h = est.get("harmonic").ok_or("no harmonic entry")?;
    ensure(!h.applicable, || "harmonic bound applied at q = 2".into())?;
    Ok(format!("{scanned} surfaces, q = 2 counterexample flagged"))
}

fn prime_powers(lo: u64, hi: u64) -> Vec<PrimePower> {
    (lo..=hi).filter_map(|n| PrimePower::new(n).ok()).collect()
}

fn tables() -> Outcome {
    let mut chain_failures = Vec::new();
    let mut min_unordered = Vec::new();
    for qp in prime_powers(2, 32) {
        let t = extremal_tables(&qp);
        let b2 = Int::from(qp.q() + 1 - qp.m());
        for (i, r) in t.max_rows.iter().enumerate() {
            ensure(r.count == r.printed, || format!("q = {} max row {i} {}", qp.q(), r.label))?;
        }
        for (i, r) in t.min_rows.iter().enumerate() {
            if i == 1 {
                let recomputed = &b2 * &b2 + &b2 - 1u32;
                let printed = &b2 * &b2 - &b2 - 1u32;
                ensure(r.count == recomputed && r.printed == printed, || format!("q = {} φ row", qp.q()))?;
            } else {
                ensure(r.count == r.printed, || format!("q = {} min row {i} {}", qp.q(), r.label))?;
            }
        }
        ensure(t.max_decreasing, || format!("q = {}: max rows not decreasing", qp.q()))?;
        if !t.min_increasing {
            min_unordered.push(qp.q());
        }
        if !(t.max_chain && t.min_chain) {
            let sides: Vec<&str> = [(t.max_chain, "max"), (t.min_chain, "min")]
                .iter()
                .filter(|(ok, _)| !ok)
                .map(|(_, s)| *s)
                .collect();
            let ex = t.chain_counterexamples.first().copied();
            chain_failures.push(format!("q = {} ({} chain, e.g. {ex:?})", qp.q(), sides.join("+")));
        }
    }
    ensure(chain_failures.is_empty(), || {
        format!("rows match; ordering chain fails for {}", chain_failures.join(", "))
    })?;
    Ok(format!("rows match for q ≤ 32; min rows unordered for q in {min_unordered:?}"))
}

fn defect_types() -> Outcome {
    let mut rows = 0;
    for qp in prime_powers(2, 25) {
        for g in 2..=5 {
            for r in defect_table(&qp, g).map_err(|e| e.to_string())? {
                ensure(r.computed == r.expected && r.defect_ok, || {
                    format!("q = {} g = {g} {}: {} vs {}", qp.q(), r.label, r.computed, r.expected)
                })?;
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} rows"))
}

fn inequalities(corpus: &[WeilPolynomial]) -> Outcome {
    let mut checked = 0usize;
    for p in corpus {
        let g = p.g();
        let z = expand(p, 2 * g + 2).unwrap();
        let c = check_conditions(&z).unwrap();
        let n1 = z.n_at(1).clone();
        for n in 1..=2 * g {
            if c.n_holds {
                ensure(z.a()[n] >= an_bound(&n1, n), || format!("{}: AnBound n = {n}", label(p)))?;
            }
            if c.b_holds {
                ensure(z.a()[n] >= an_lower(&n1, Some(z.b()), n), || format!("{}: minoration n = {n}", label(p)))?;
            }
            checked += 1;
        }
        for n in 2..=2 * g + 2 {
            let env = bn_envelope(p.q(), g, n).unwrap();
            ensure(env.contains(z.b_at(n)).unwrap(), || format!("{}: B_{n} outside envelope", label(p)))?;
        }
        let low = lower_bounds(LowerInput::Polynomial(p), PREC).unwrap();
        let (refined, plain) = (low.value("perret_refined").unwrap(), low.value("perret").unwrap());
        ensure(refined.cmp_value(plain).unwrap() != Ordering::Less, || format!("{}: perret", label(p)))?;
        ensure(trace_sandwich_holds(p.q(), g, &p.tau(), &p.point_count()), || format!("{}: trace bounds", label(p)))?;
        if let Some(input) = jacobian_input(p) {
            if input.n >= Int::from(1) {
                let rep = jacobian_lower_bounds(&input, PREC).unwrap();
                if let (Some(v), Some(lmd)) = (rep.value("V"), rep.value("lmd")) {
                    ensure(v.cmp_value(lmd).unwrap() != Ordering::Less, || format!("{}: V < lmd", label(p)))?;
                }
            }
        }
    }
    Ok(format!("{} polynomials, {checked} coefficient checks", corpus.len()))
}

const CLI_RUNS: &[&[&str]] = &[
    &["bounds", "--q", "2", "--g", "2", "--coeffs", "4,-2,0,-1,1", "--format", "json"],
    &["bounds", "--q", "2", "--g", "2", "--coeffs", "4,-2,0,-1,1", "--format", "csv"],
    &["bounds", "--q", "3", "--g", "3", "--tau", "2", "--format", "table"],
    &["bounds", "--q", "4", "--g", "2", "--n", "9", "--format", "json"],
    &["zeta", "--q", "2", "--g", "2", "--coeffs", "1,1,2,2,4", "--format", "json"],
    &["zeta", "--q", "2", "--g", "2", "--coeffs", "1,1,2,2,4", "--format", "csv"],
    &["extremal", "--q", "4", "--format", "json"],
    &["extremal", "--q", "13", "--format", "table"],
    &["enumerate", "--q", "5", "--format", "json"],
    &["enumerate", "--q", "3", "--kind", "region", "--format", "csv"],
    &["verify", "--q", "2", "--format", "json"],
];

fn determinism() -> Outcome {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_weilbound"))
            .args(args)
            .env_remove("WEILBOUND_PRECISION")
            .output()
            .map_err(|e| e.to_string())
    };
    for args in CLI_RUNS {
        let (a, b) = (run(args)?, run(args)?);
        ensure(a.status.success(), || format!("{args:?} exited with {}", a.status))?;
        ensure(a.stdout == b.stdout && a.status == b.status, || format!("{args:?} differs across runs"))?;
    }
    Ok(format!("{} commands", CLI_RUNS.len()))
}

fn main() {
    let start = Instant::now();
    let corpus = corpus();
    let criteria: [(&str, &dyn Fn() -> Outcome); 10] = [
        ("exact values", &exact_values),
        ("extremal values", &extremal_values),
        ("elliptic oracle equivalence", &elliptic_oracle),
        ("identity suite", &|| identity_suite(&corpus)),
        ("sandwich property", &|| sandwich(&corpus)),
        ("harmonic-mean lower bound", &harmonic),
        ("table regeneration", &tables),
        ("defect-type table", &defect_types),
        ("inequality suite", &|| inequalities(&corpus)),
        ("determinism", &determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
