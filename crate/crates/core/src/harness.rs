//! The verification suite as a fixed schedule of checks, run concurrently
//! and reported in schedule order, plus table export.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::genfun::{
    intro_identity_check, lhs_series_with_errors, rhs_series, shuffle_check, theorem_coefficient_report,
    weighted_sum_check,
};
use crate::indices::{admissible_up_to, classify, count_all_heights, enumerate, enumerate_all_heights, Index};
use crate::numerics::{parse_rational, t_depth1, BigReal};
use crate::ode::{
    closed_form_log_check, height_one_check, ode_residual, theorem_numeric_check, u_closed_form, u_limit_series,
    u_series, v_check, v_check_z0, ParamPoint,
};
use crate::report::{fmt_small, ReportBuilder, VerificationReport};
use crate::tvalues::{check_ath_recursion, check_diffg, t_value};

/// Exact checks run through this weight.
pub const EXACT_MAX_WEIGHT: u32 = 6;
/// Series order of the exact checks.
pub const EXACT_ORDER: usize = 64;
/// Series order of the exact ODE checks.
pub const ODE_ORDER: usize = 60;
/// Rational parameter points of the exact ODE checks.
pub const ODE_POINTS: [(&str, &str); 2] = [("-1/4", "1/3"), ("-1/3", "1/4")];
/// Parameter points of the numeric identity checks.
pub const NUMERIC_POINTS: [(&str, &str); 2] = [("-0.2", "0.2"), ("-0.1", "0.1")];
/// Point of the height-one check.
pub const HEIGHT_ONE_POINT: (&str, &str) = ("-0.2", "0.2");
/// Grid of the Gauss-summation comparison: `x` in `(-0.45, -0.05)`,
/// `y` in `(0.05, 0.45)`, five equally spaced points each.
pub const GRID_X: [&str; 5] = ["-0.45", "-0.35", "-0.25", "-0.15", "-0.05"];
pub const GRID_Y: [&str; 5] = ["0.05", "0.15", "0.25", "0.35", "0.45"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Parse(format!(
                "unknown output format {other:?} (json, csv or text)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prec_bits: u32,
    pub max_degree: usize,
    pub kmax: u32,
    /// Decimal or `p/q` string, kept verbatim for reproducible output.
    pub tol: String,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prec_bits: 256,
            max_degree: 8,
            kmax: 10,
            tol: "1e-6".into(),
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prec_bits < 64 {
            return Err(domain(format!("prec_bits must be at least 64, got {}", self.prec_bits)));
        }
        if self.max_degree < 2 {
            return Err(domain(format!(
                "max_degree must be at least 2, got {}",
                self.max_degree
            )));
        }
        if self.kmax < 2 {
            return Err(domain(format!("kmax must be at least 2, got {}", self.kmax)));
        }
        self.tolerance().map(|_| ())
    }

    pub fn tolerance(&self) -> Result<BigReal> {
        let r = parse_rational(&self.tol)?;
        if r < BigRational::from_integer(0.into()) {
            return Err(domain("tolerance must be non-negative"));
        }
        Ok(BigReal::from_ratio(&r, 128))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub reports: Vec<VerificationReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Process exit code: 0 when every report passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&report_line(r));
            out.push('\n');
        }
        out.push_str(&format!(
            "{} checks: {} passed, {} failed\n",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "identity",
            "parameters",
            "max_deviation",
            "tolerance",
            "error_estimate",
            "pass",
            "error",
        ])
        .expect("in-memory write");
        for r in &self.reports {
            w.write_record([
                r.identity_name.as_str(),
                &params_text(&r.parameters),
                &r.max_deviation,
                &r.tolerance,
                &r.error_estimate,
                if r.pass { "true" } else { "false" },
                r.error.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json() + "\n",
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        }
    }
}

fn params_text(p: &BTreeMap<String, String>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// One human-readable line per report.
pub fn report_line(r: &VerificationReport) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    match &r.error {
        Some(e) => format!(
            "{verdict} {} [{}] error: {e}",
            r.identity_name,
            params_text(&r.parameters)
        ),
        None => format!(
            "{verdict} {} [{}] max deviation {} (tol {}, estimate {})",
            r.identity_name,
            params_text(&r.parameters),
            r.max_deviation,
            r.tolerance,
            r.error_estimate
        ),
    }
}

type Job = Box<dyn Fn() -> Result<VerificationReport> + Send + Sync>;

struct Scheduled {
    name: String,
    params: BTreeMap<String, String>,
    job: Job,
}

fn job(
    name: &str,
    params: &[(&str, String)],
    f: impl Fn() -> Result<VerificationReport> + Send + Sync + 'static,
) -> Scheduled {
    Scheduled {
        name: name.to_string(),
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        job: Box::new(f),
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

/// Runs one scheduled check; errors and panics become failed reports.
fn execute(s: &Scheduled) -> VerificationReport {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (s.job)()));
    let elapsed = started.elapsed().as_millis() as u64;
    match outcome {
        Ok(Ok(report)) => report,
        Ok(Err(e)) => VerificationReport::failed(&s.name, s.params.clone(), e.to_string(), elapsed),
        Err(p) => VerificationReport::failed(
            &s.name,
            s.params.clone(),
            format!("panic: {}", panic_message(p)),
            elapsed,
        ),
    }
}

/// Concatenates reports into one, prefixing entry labels with the
/// parameters of the report they came from.
fn merge(name: &str, parts: Vec<VerificationReport>, tol: &BigReal) -> VerificationReport {
    let started = Instant::now();
    let mut builder = ReportBuilder::new(name);
    let mut failed_parts = Vec::new();
    for part in parts {
        let tag = params_text(&part.parameters);
        if let Some(e) = &part.error {
            failed_parts.push(format!("{tag}: {e}"));
            continue;
        }
        for e in part.entries {
            let dev = BigReal::parse(&e.deviation, 96).unwrap_or_else(|_| BigReal::one(96));
            let est = BigReal::parse(&e.error_estimate, 96).unwrap_or_else(|_| BigReal::one(96));
            builder.raw(format!("{tag}: {}", e.label), e.lhs, e.rhs, &dev, &est);
        }
    }
    let mut report = builder.finish(tol);
    report.runtime_ms = started.elapsed().as_millis() as u64;
    if !failed_parts.is_empty() {
        report.pass = false;
        report.error = Some(failed_parts.join("; "));
    }
    report
}

fn indices_invariants(max_weight: u32) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("indices invariants").param("max_weight", max_weight);
    let zero = BigReal::zero(64);
    for k in 1..=max_weight {
        for n in 1..=k {
            let all = enumerate_all_heights(k, n, false);
            let want = count_all_heights(k, n)?;
            let consistent = all.iter().all(|i| {
                let c = classify(i);
                c.weight == k && c.depth == n
            }) && (0..=n).all(|s| enumerate(k, n, s, false).iter().all(|i| i.height() == s));
            let dev = BigReal::from_i64((all.len() as i64 - want as i64).abs() + i64::from(!consistent), 64);
            b.raw(
                format!("|I({k},{n})| = C({},{})", k - 1, n - 1),
                all.len().to_string(),
                want.to_string(),
                &dev,
                &zero,
            );
        }
    }
    Ok(b.finish(&zero))
}

fn ath_recursion_suite() -> Result<VerificationReport> {
    let zero = BigReal::zero(64);
    let mut parts = Vec::new();
    for k in 1..=EXACT_MAX_WEIGHT {
        for n in 1..=k {
            for idx in enumerate_all_heights(k, n, false) {
                parts.push(check_ath_recursion(&idx, EXACT_ORDER)?);
            }
        }
    }
    let mut r = merge("Ath derivative", parts, &zero);
    r.parameters.insert("max_weight".into(), EXACT_MAX_WEIGHT.to_string());
    r.parameters.insert("M".into(), EXACT_ORDER.to_string());
    Ok(r)
}

fn diffg_suite() -> Result<VerificationReport> {
    let zero = BigReal::zero(64);
    let mut parts = Vec::new();
    for k in 1..=EXACT_MAX_WEIGHT as i64 {
        for n in 1..=k {
            for s in 0..=n {
                parts.push(check_diffg(k, n, s, EXACT_ORDER)?);
            }
        }
    }
    let mut r = merge("diffG", parts, &zero);
    r.parameters.insert("max_weight".into(), EXACT_MAX_WEIGHT.to_string());
    r.parameters.insert("M".into(), EXACT_ORDER.to_string());
    Ok(r)
}

/// `T(1, ..., 1, 2) = T(n + 1)` for `n = 1..=5`.
pub fn duality_check(prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("duality").param("prec_bits", prec);
    for n in 1..=5usize {
        let idx = Index::ones_then(n - 1, 2)?;
        let tv = t_value(&idx, prec)?;
        let depth1 = t_value(&Index::new(vec![n as u32 + 1])?, prec)?;
        let closed = t_depth1(n as u32 + 1, prec)?;
        let est = &tv.error_estimate + &depth1.error_estimate;
        b.real(format!("T{idx} = T({})", n + 1), &tv.value, &depth1.value, &est);
        b.real(
            format!("T{idx} = 2(1-2^-{0})zeta({0})", n + 1),
            &tv.value,
            &closed,
            &tv.error_estimate,
        );
    }
    Ok(b.finish(tol))
}

fn ode_residual_suite() -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("ode residual").param("M", ODE_ORDER);
    let zero = BigReal::zero(64);
    for (x, y) in ODE_POINTS {
        let (xq, yq) = (parse_rational(x)?, parse_rational(y)?);
        for (locus, p) in [
            ("z^2 = xy/2", ParamPoint::half_xy(xq.clone(), yq.clone())),
            ("z = 0", ParamPoint::z_zero(xq.clone(), yq.clone())),
        ] {
            let res = ode_residual(&u_series(&p, ODE_ORDER)?);
            b.raw(
                format!("x = {x}, y = {y}, {locus}"),
                crate::report::fmt_rational(&res),
                "0".into(),
                &BigReal::from_ratio(&res, 96),
                &zero,
            );
        }
    }
    Ok(b.finish(&zero))
}

fn ode_v_checks() -> Vec<Scheduled> {
    let mut out = Vec::new();
    for (x, y) in ODE_POINTS {
        let params = [("x", x.to_string()), ("y", y.to_string()), ("M", ODE_ORDER.to_string())];
        out.push(job("v hypergeometric", &params, move || {
            v_check(&ParamPoint::half_xy(parse_rational(x)?, parse_rational(y)?), ODE_ORDER)
        }));
        out.push(job("v at z = 0", &params, move || {
            v_check_z0(&ParamPoint::z_zero(parse_rational(x)?, parse_rational(y)?), ODE_ORDER)
        }));
    }
    out
}

/// `u_limit_series = u_closed_form` on the 5x5 grid; each deviation must
/// be below `min(tol, 2^-(prec/2))`.
pub fn gauss_grid_check(prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("Gauss summation grid").param("prec_bits", prec);
    let points: Vec<(&str, &str)> = GRID_X
        .iter()
        .flat_map(|x| GRID_Y.iter().map(move |y| (*x, *y)))
        .collect();
    let values: Vec<Result<(BigReal, BigReal)>> = points
        .par_iter()
        .map(|(x, y)| {
            let (x, y) = (BigReal::parse(x, prec)?, BigReal::parse(y, prec)?);
            Ok((u_limit_series(&x, &y, prec)?.0, u_closed_form(&x, &y, prec)?))
        })
        .collect();
    for ((x, y), v) in points.iter().zip(values) {
        let (lim, closed) = v?;
        b.real(format!("x = {x}, y = {y}"), &lim, &closed, &BigReal::zero(64));
    }
    let cap = BigReal::one(64).mul_pow2(-(prec as i64 / 2));
    let limit = if *tol < cap { tol.clone() } else { cap };
    Ok(b.finish(&limit))
}

fn schedule(config: &RunConfig, tol: &BigReal) -> Vec<Scheduled> {
    let prec = config.prec_bits;
    fn p(k: &str, v: String) -> (&str, String) {
        (k, v)
    }
    let mut s = Vec::new();
    s.push(job("indices invariants", &[p("max_weight", "12".into())], || {
        indices_invariants(12)
    }));
    s.push(job("Ath derivative", &[], ath_recursion_suite));
    s.push(job("diffG", &[], diffg_suite));
    {
        let tol = tol.clone();
        s.push(job("duality", &[p("prec_bits", prec.to_string())], move || {
            duality_check(prec, &tol)
        }));
    }
    for k in 3..=8 {
        let tol = tol.clone();
        s.push(job("weighted sum", &[p("k", k.to_string())], move || {
            weighted_sum_check(k, prec, &tol)
        }));
    }
    for k in 4..=8 {
        let tol = tol.clone();
        s.push(job("shuffle", &[p("k", k.to_string())], move || {
            shuffle_check(k, prec, &tol)
        }));
    }
    for k in 3..=8 {
        let tol = tol.clone();
        s.push(job("x^(k-2) y^2 coefficient", &[p("k", k.to_string())], move || {
            intro_identity_check(k, prec, &tol)
        }));
    }
    {
        let (tol, d) = (tol.clone(), config.max_degree);
        s.push(job(
            "theorem coefficients",
            &[p("max_degree", d.to_string())],
            move || theorem_coefficient_report(d, prec, &tol),
        ));
    }
    s.push(job("ode residual", &[], ode_residual_suite));
    s.extend(ode_v_checks());
    {
        let tol = tol.clone();
        s.push(job("Gauss summation grid", &[], move || gauss_grid_check(prec, &tol)));
    }
    s.push(job("log closed form", &[], move || {
        let (x, y) = NUMERIC_POINTS[0];
        closed_form_log_check(&BigReal::parse(x, prec)?, &BigReal::parse(y, prec)?, prec, 60)
    }));
    for (x, y) in NUMERIC_POINTS {
        let (tol, kmax) = (tol.clone(), config.kmax);
        s.push(job(
            "theorem numeric",
            &[p("x", x.into()), p("y", y.into())],
            move || theorem_numeric_check(&BigReal::parse(x, prec)?, &BigReal::parse(y, prec)?, prec, kmax, &tol),
        ));
    }
    {
        let (tol, kmax) = (tol.clone(), config.kmax);
        let (x, y) = HEIGHT_ONE_POINT;
        s.push(job("height one", &[p("x", x.into()), p("y", y.into())], move || {
            height_one_check(&BigReal::parse(x, prec)?, &BigReal::parse(y, prec)?, prec, kmax, &tol)
        }));
    }
    s
}

/// Runs the full suite. Checks run concurrently; the report order is the
/// fixed schedule order.
pub fn run_all(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let tol = config.tolerance()?;
    let jobs = schedule(config, &tol);
    let reports: Vec<VerificationReport> = jobs.par_iter().map(execute).collect();
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(RunReport {
        config: config.clone(),
        summary: Summary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
        },
        reports,
    })
}

/// Runs a single check by name (as used by `verify <name>`), capturing
/// errors and panics like [`run_all`].
pub fn run_named(name: &str, config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let tol = config.tolerance()?;
    let all = schedule(config, &tol);
    let wanted: Vec<&Scheduled> = all.iter().filter(|s| s.name == name).collect();
    if wanted.is_empty() {
        return Err(Error::Parse(format!("unknown check {name:?}")));
    }
    let reports: Vec<VerificationReport> = wanted.par_iter().map(|s| execute(s)).collect();
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(RunReport {
        config: config.clone(),
        summary: Summary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
        },
        reports,
    })
}

/// Names of every check in the schedule, in order, without duplicates.
pub fn check_names() -> Vec<String> {
    let config = RunConfig::default();
    let mut names: Vec<String> = Vec::new();
    for s in schedule(&config, &BigReal::zero(64)) {
        if !names.contains(&s.name) {
            names.push(s.name);
        }
    }
    names
}

/// Wraps a report computed outside the schedule, for single checks with
/// custom parameters; errors and panics become failed reports.
pub fn run_single(
    name: &str,
    params: &[(&str, String)],
    config: &RunConfig,
    f: impl Fn() -> Result<VerificationReport> + Send + Sync + 'static,
) -> RunReport {
    let report = execute(&job(name, params, f));
    let passed = usize::from(report.pass);
    RunReport {
        config: config.clone(),
        summary: Summary {
            total: 1,
            passed,
            failed: 1 - passed,
        },
        reports: vec![report],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Tvalues,
    Coeffs,
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tvalues" => Ok(TableKind::Tvalues),
            "coeffs" => Ok(TableKind::Coeffs),
            other => Err(Error::Parse(format!("unknown table {other:?} (tvalues or coeffs)"))),
        }
    }
}

/// One exported row; `key` is the index or the monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub key: String,
    pub weight: u32,
    pub depth: u32,
    pub value: String,
    pub error_estimate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_value: Option<String>,
}

/// All admissible T-values of weight `<= kmax`, ordered by weight, depth
/// and then lexicographically.
pub fn tvalue_table(kmax: u32, prec: u32) -> Result<Vec<TableRow>> {
    let indices = admissible_up_to(kmax);
    let values: Vec<Result<_>> = indices.par_iter().map(|i| t_value(i, prec)).collect();
    let digits = BigReal::zero(prec).default_digits();
    indices
        .iter()
        .zip(values)
        .map(|(idx, v)| {
            let v = v?;
            Ok(TableRow {
                key: idx.to_string(),
                weight: idx.weight(),
                depth: idx.depth(),
                value: v.value.to_decimal(digits),
                error_estimate: fmt_small(&v.error_estimate),
                rhs_value: None,
            })
        })
        .collect()
}

/// All coefficients `x^a y^b` with `1 <= a + b <= D` of both sides of the
/// generating-function identity. `weight` is the total degree and `depth`
/// the power of `y`.
pub fn coefficient_table(degree: usize, prec: u32) -> Result<Vec<TableRow>> {
    let (lhs, err) = lhs_series_with_errors(degree, prec)?;
    let rhs = rhs_series(degree, prec)?;
    let digits = BigReal::zero(prec).default_digits();
    Ok(lhs
        .iter()
        .filter(|(a, b, _)| a + b >= 1)
        .map(|(a, b, c)| TableRow {
            key: format!("x^{a} y^{b}"),
            weight: (a + b) as u32,
            depth: b as u32,
            value: c.with_prec(prec).to_decimal(digits),
            error_estimate: fmt_small(&err.get(a, b)),
            rhs_value: Some(rhs.get(a, b).with_prec(prec).to_decimal(digits)),
        })
        .collect())
}

pub fn export_table(kind: TableKind, config: &RunConfig) -> Result<Vec<TableRow>> {
    config.validate()?;
    match kind {
        TableKind::Tvalues => tvalue_table(config.kmax, config.prec_bits),
        TableKind::Coeffs => coefficient_table(config.max_degree, config.prec_bits),
    }
}

/// CSV (with header even when empty), JSON array, or aligned text.
pub fn render_table(kind: TableKind, rows: &[TableRow], format: OutputFormat) -> String {
    let header: &[&str] = match kind {
        TableKind::Tvalues => &["index", "weight", "depth", "value", "error_estimate"],
        TableKind::Coeffs => &["monomial", "degree", "y_power", "lhs", "lhs_error_estimate", "rhs"],
    };
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize") + "\n",
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for r in rows {
                let mut rec = vec![
                    r.key.clone(),
                    r.weight.to_string(),
                    r.depth.to_string(),
                    r.value.clone(),
                    r.error_estimate.clone(),
                ];
                if let Some(rhs) = &r.rhs_value {
                    rec.push(rhs.clone());
                }
                w.write_record(&rec).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
        OutputFormat::Text => {
            let mut out = header.join("\t") + "\n";
            for r in rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}",
                    r.key, r.weight, r.depth, r.value, r.error_estimate
                ));
                if let Some(rhs) = &r.rhs_value {
                    out.push('\t');
                    out.push_str(rhs);
                }
                out.push('\n');
            }
            out
        }
    }
}
