//! Acceptance suite: one PASS/FAIL line per criterion, with every tolerance
//! and time budget pinned below. Runs without the libtest harness so the
//! lines are always printed; the process fails if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tvalue_core::genfun::{intro_identity_check, shuffle_check, theorem_coefficient_report, weighted_sum_check};
use tvalue_core::harness::{gauss_grid_check, run_named, RunConfig};
use tvalue_core::numerics::{zeta, BigReal};
use tvalue_core::ode::{height_one_check, theorem_numeric_check};
use tvalue_core::tvalues::t_value;
use tvalue_core::{Index, VerificationReport};

const PREC: u32 = 256;

const EXACT_RECURRENCE_BUDGET: Duration = Duration::from_secs(10);
const EXACT_ODE_BUDGET: Duration = Duration::from_secs(10);
const DEPTH_ONE_TOL: f64 = 1e-10;
const DEPTH_ONE_BUDGET: Duration = Duration::from_secs(30);
const DUALITY_TOL: f64 = 1e-8;
const THEOREM_TOL_DEGREE_6: f64 = 1e-8;
const THEOREM_TOL_DEGREE_8: f64 = 1e-6;
const THEOREM_BUDGET: Duration = Duration::from_secs(300);
const IDENTITY_TOL: f64 = 1e-8;
const GAUSS_GRID_LOG2_TOL: i64 = -120;
const NUMERIC_TOL: f64 = 1e-6;
const NUMERIC_KMAX: u32 = 10;
const HEIGHT_ONE_TOL: f64 = 1e-6;
const FAILING_TOL: &str = "1e-30";

/// A criterion: its name, the check and an optional time budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn dev(s: &str) -> f64 {
    s.parse().unwrap_or(f64::INFINITY)
}

fn tol(v: f64) -> BigReal {
    BigReal::from_f64(v, 64)
}

fn real(s: &str) -> BigReal {
    BigReal::parse(s, PREC).expect("literal")
}

/// Passes when every report passes and its largest deviation is below `bound`.
fn reports_below(reports: &[VerificationReport], bound: f64) -> (bool, f64) {
    let worst = reports.iter().map(|r| dev(&r.max_deviation)).fold(0.0, f64::max);
    (reports.iter().all(|r| r.pass) && worst < bound, worst)
}

fn exact_recurrences() -> Outcome {
    let cfg = RunConfig::default();
    let mut reports = Vec::new();
    for name in ["Ath derivative", "diffG"] {
        match run_named(name, &cfg) {
            Ok(r) => reports.extend(r.reports),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let zero = reports.iter().all(|r| r.pass && dev(&r.max_deviation) == 0.0);
    outcome(
        zero,
        format!("{} reports, all deviations exactly 0: {zero}", reports.len()),
    )
}

fn exact_ode() -> Outcome {
    let cfg = RunConfig::default();
    let mut reports = Vec::new();
    for name in ["ode residual", "v hypergeometric", "v at z = 0"] {
        match run_named(name, &cfg) {
            Ok(r) => reports.extend(r.reports),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let zero = reports.len() == 5 && reports.iter().all(|r| r.pass && dev(&r.max_deviation) == 0.0);
    outcome(
        zero,
        format!("{} reports, all deviations exactly 0: {zero}", reports.len()),
    )
}

fn depth_one() -> Outcome {
    let mut worst = 0.0f64;
    for k in 2..=10u32 {
        let idx = Index::new(vec![k]).expect("index");
        let (t, z) = match (t_value(&idx, PREC), zeta(k, PREC)) {
            (Ok(t), Ok(z)) => (t, z),
            _ => return outcome(false, format!("evaluation failed at k = {k}")),
        };
        let factor = BigReal::one(PREC) - BigReal::one(PREC).mul_pow2(-(k as i64));
        let oracle = (&factor * &z).mul_int(2);
        worst = worst.max((&t.value - &oracle).abs().to_f64());
    }
    outcome(
        worst < DEPTH_ONE_TOL,
        format!("max |T(k) - 2(1-2^-k)zeta(k)| = {worst:.3e}, k = 2..10"),
    )
}

fn duality() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=5usize {
        let lhs = Index::ones_then(n - 1, 2).and_then(|i| t_value(&i, PREC));
        let rhs = Index::new(vec![n as u32 + 1]).and_then(|i| t_value(&i, PREC));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => worst = worst.max((&l.value - &r.value).abs().to_f64()),
            _ => return outcome(false, format!("evaluation failed at n = {n}")),
        }
    }
    outcome(
        worst < DUALITY_TOL,
        format!("max |T(1,...,1,2) - T(n+1)| = {worst:.3e}, n = 1..5"),
    )
}

fn theorem_coefficients() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (d, bound) in [(6, THEOREM_TOL_DEGREE_6), (8, THEOREM_TOL_DEGREE_8)] {
        match theorem_coefficient_report(d, PREC, &tol(bound)) {
            Ok(r) => {
                let (ok, worst) = reports_below(std::slice::from_ref(&r), bound);
                pass &= ok;
                parts.push(format!("D={d}: {worst:.3e} (< {bound:e})"));
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(pass, parts.join(", "))
}

fn identities() -> Outcome {
    let t = tol(IDENTITY_TOL);
    let mut reports = Vec::new();
    for k in 3..=8 {
        reports.push(weighted_sum_check(k, PREC, &t));
        reports.push(intro_identity_check(k, PREC, &t));
    }
    for k in 4..=8 {
        reports.push(shuffle_check(k, PREC, &t));
    }
    let reports: Result<Vec<_>, _> = reports.into_iter().collect();
    match reports {
        Ok(r) => {
            let (ok, worst) = reports_below(&r, IDENTITY_TOL);
            outcome(ok, format!("{} identity reports, max deviation {worst:.3e}", r.len()))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn gauss_grid() -> Outcome {
    let bound = BigReal::one(64).mul_pow2(GAUSS_GRID_LOG2_TOL);
    match gauss_grid_check(PREC, &bound) {
        Ok(r) => {
            let (ok, worst) = reports_below(std::slice::from_ref(&r), bound.to_f64());
            let ok = ok && r.entries.len() == 25;
            outcome(
                ok,
                format!(
                    "{} grid points, max deviation {worst:.3e} (< 2^{GAUSS_GRID_LOG2_TOL})",
                    r.entries.len()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn theorem_numeric() -> Outcome {
    match theorem_numeric_check(&real("-0.2"), &real("0.2"), PREC, NUMERIC_KMAX, &tol(NUMERIC_TOL)) {
        Ok(r) => {
            let (ok, worst) = reports_below(std::slice::from_ref(&r), NUMERIC_TOL);
            let bound = r.parameters.get("truncation_bound").cloned();
            let ok = ok && bound.is_some();
            outcome(
                ok,
                format!(
                    "{} entries, max deviation {worst:.3e}, reported truncation bound {}",
                    r.entries.len(),
                    bound.unwrap_or_else(|| "missing".into())
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn height_one() -> Outcome {
    match height_one_check(&real("-0.2"), &real("0.2"), PREC, NUMERIC_KMAX, &tol(HEIGHT_ONE_TOL)) {
        Ok(r) => {
            let (ok, worst) = reports_below(std::slice::from_ref(&r), HEIGHT_ONE_TOL);
            outcome(ok, format!("max deviation {worst:.3e}"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("runtime_ms");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn run_cli(args: &[&str]) -> Result<(i32, serde_json::Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tvalue"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let mut json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    strip_timing(&mut json);
    Ok((code, json))
}

fn determinism() -> Outcome {
    let first = run_cli(&["verify", "all"]);
    let second = run_cli(&["verify", "all"]);
    let failing = run_cli(&["verify", "all", "--tol", FAILING_TOL]);
    let usage = Command::new(env!("CARGO_BIN_EXE_tvalue"))
        .args(["tvalue", "--index", "(2,1)"])
        .output()
        .map(|o| o.status.code());
    match (first, second, failing) {
        (Ok((c1, j1)), Ok((c2, j2)), Ok((c3, _))) => {
            let same = j1 == j2;
            let usage_code = usage.ok().flatten();
            let ok = same && c1 == 0 && c2 == 0 && c3 == 1 && usage_code == Some(2);
            outcome(
                ok,
                format!(
                    "identical JSON: {same}; exit codes: default {c1}, {c2}; tol {FAILING_TOL} -> {c3}; domain error -> {}",
                    usage_code.map_or("none".into(), |c| c.to_string())
                ),
            )
        }
        (a, b, c) => outcome(false, format!("{:?}", [a.err(), b.err(), c.err()])),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "exact recurrence suite",
            exact_recurrences,
            Some(EXACT_RECURRENCE_BUDGET),
        ),
        ("exact ODE suite", exact_ode, Some(EXACT_ODE_BUDGET)),
        ("depth-one oracle", depth_one, Some(DEPTH_ONE_BUDGET)),
        ("duality", duality, None),
        (
            "generating function coefficients",
            theorem_coefficients,
            Some(THEOREM_BUDGET),
        ),
        ("weighted sum, shuffle and x^(k-2) y^2 identities", identities, None),
        ("Gauss summation grid", gauss_grid, None),
        ("four-way numeric check", theorem_numeric, None),
        ("height-one check", height_one, None),
        ("harness determinism and exit codes", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed < b);
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "{} {:>2}. {name}: {} [{:.2}s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
