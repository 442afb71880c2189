//! `tvalue`: multiple T-values, special functions and the verification
//! suite from the command line.
//!
//! Exit codes: 0 success (all checks pass), 1 a verification failed,
//! 2 usage, parse, domain or I/O error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use tvalue_core::genfun::{intro_identity_check, shuffle_check, theorem_coefficient_report, weighted_sum_check};
use tvalue_core::harness::{
    duality_check, export_table, render_table, run_all, run_named, run_single, OutputFormat, RunConfig, RunReport,
    TableKind,
};
use tvalue_core::indices::{enumerate, enumerate_all_heights};
use tvalue_core::numerics::{gamma, hyp2f1, parse_rational, zeta, BigReal};
use tvalue_core::ode::{
    height_one_check, ode_residual, theorem_numeric_check, u_series, v_check, v_check_z0, ParamPoint,
};
use tvalue_core::report::{fmt_rational, fmt_small, ReportBuilder};
use tvalue_core::tvalues::{ath_eval, check_diffg, t_value};
use tvalue_core::{Error, Index};

#[derive(Parser, Debug)]
#[command(name = "tvalue", version, about = "Multiple T-values and their generating function")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Working precision in bits
    #[arg(long, global = true, default_value_t = 256)]
    prec_bits: u32,
    /// Tolerance for numeric checks (decimal or p/q)
    #[arg(long, global = true, default_value = "1e-6")]
    tol: String,
    /// Total degree of the coefficient comparison
    #[arg(long, global = true, default_value_t = 8)]
    max_degree: usize,
    /// Weight cutoff of the numeric sums and tables
    #[arg(long, global = true, default_value_t = 10)]
    kmax: u32,
    /// Output format of reports and tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One multiple T-value with its error estimate
    Tvalue {
        /// Index such as "(1,2)"
        #[arg(long)]
        index: String,
    },
    /// All admissible T-values up to a weight
    TvalueTable {
        #[arg(long)]
        max_weight: Option<u32>,
    },
    /// Riemann zeta at an integer n >= 2
    Zeta { n: u32 },
    /// Gamma at a real argument
    Gamma {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Gauss hypergeometric F(a, b; c; t), -1 <= t <= 1
    Hyp2f1 {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        c: String,
        #[arg(allow_hyphen_values = true)]
        t: String,
    },
    /// Ath(k; t) for |t| <= 0.9
    Ath {
        #[arg(long)]
        index: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// List I(k, n, s), or all heights when s is omitted
    Enum {
        k: u32,
        n: u32,
        s: Option<u32>,
        /// Admissible indices only (I_0)
        #[arg(long)]
        admissible: bool,
    },
    /// Run verification checks
    Verify(VerifyArgs),
    /// Export a table of T-values or theorem coefficients
    Export {
        #[arg(long, value_enum, default_value_t = Kind::Tvalues)]
        kind: Kind,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Tvalues,
    Coeffs,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Check {
    TheoremCoeffs,
    TheoremNumeric,
    WeightedSum,
    Shuffle,
    IntroIdentity,
    Duality,
    Diffg,
    AthRecursion,
    Ode,
    V,
    GaussGrid,
    HeightOne,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Weight parameter of the identity checks (all weights when omitted)
    #[arg(long)]
    k: Option<u32>,
    /// Depth parameter of diffg
    #[arg(long)]
    n: Option<i64>,
    /// Height parameter of diffg
    #[arg(long)]
    s: Option<i64>,
    /// Series order of the exact checks
    #[arg(long, default_value_t = 60)]
    order: usize,
    /// Exact rational arithmetic for the ODE residual
    #[arg(long)]
    exact: bool,
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("I/O error: {e}"))
    }
}

type Outcome = Result<(String, bool), Failure>;

fn config(g: &Global) -> RunConfig {
    RunConfig {
        prec_bits: g.prec_bits,
        max_degree: g.max_degree,
        kmax: g.kmax,
        tol: g.tol.clone(),
        format: g.format.into(),
    }
}

fn real(s: &str, prec: u32) -> Result<BigReal, Error> {
    BigReal::parse(s, prec + 32)
}

fn emit_report(report: RunReport, format: OutputFormat) -> Outcome {
    let ok = report.all_passed();
    Ok((report.render(format), ok))
}

fn value_line(label: &str, v: &BigReal) -> String {
    format!("{label} = {}\n", v.to_decimal(v.default_digits()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((text, ok)) => {
            if let Some(path) = &cli.global.out {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let prec = g.prec_bits;
    let cfg = config(g);
    cfg.validate()?;
    match &cli.command {
        Command::Tvalue { index } => {
            let idx: Index = index.parse()?;
            let tv = t_value(&idx, prec)?;
            Ok((
                format!(
                    "T{idx} = {}\nerror estimate = {}\n",
                    tv.value.to_decimal(tv.value.default_digits()),
                    fmt_small(&tv.error_estimate)
                ),
                true,
            ))
        }
        Command::TvalueTable { max_weight } => {
            let cfg = RunConfig {
                kmax: max_weight.unwrap_or(g.kmax),
                ..cfg
            };
            let rows = export_table(TableKind::Tvalues, &cfg)?;
            Ok((render_table(TableKind::Tvalues, &rows, g.format.into()), true))
        }
        Command::Zeta { n } => Ok((value_line(&format!("zeta({n})"), &zeta(*n, prec)?), true)),
        Command::Gamma { z } => Ok((value_line(&format!("Gamma({z})"), &gamma(&real(z, prec)?, prec)?), true)),
        Command::Hyp2f1 { a, b, c, t } => {
            let v = hyp2f1(&real(a, prec)?, &real(b, prec)?, &real(c, prec)?, &real(t, prec)?, prec)?;
            Ok((value_line(&format!("F({a}, {b}; {c}; {t})"), &v), true))
        }
        Command::Ath { index, t } => {
            let idx: Index = index.parse()?;
            let v = ath_eval(&idx, &real(t, prec)?, prec)?;
            Ok((value_line(&format!("Ath{idx} at t = {t}"), &v), true))
        }
        Command::Enum { k, n, s, admissible } => {
            let list = match s {
                Some(s) => enumerate(*k, *n, *s, *admissible),
                None => enumerate_all_heights(*k, *n, *admissible),
            };
            let text: String = list.iter().map(|i| format!("{i}\n")).collect();
            Ok((text, true))
        }
        Command::Export { kind } => {
            let kind = match kind {
                Kind::Tvalues => TableKind::Tvalues,
                Kind::Coeffs => TableKind::Coeffs,
            };
            let rows = export_table(kind, &cfg)?;
            Ok((render_table(kind, &rows, g.format.into()), true))
        }
        Command::Verify(args) => verify(args, &cfg),
    }
}

fn point(args: &VerifyArgs, default: (&str, &str)) -> (String, String) {
    (
        args.x.clone().unwrap_or_else(|| default.0.to_string()),
        args.y.clone().unwrap_or_else(|| default.1.to_string()),
    )
}

fn rational_point(args: &VerifyArgs) -> Result<(BigRational, BigRational), Error> {
    let (x, y) = point(args, ("-1/4", "1/3"));
    Ok((parse_rational(&x)?, parse_rational(&y)?))
}

fn verify(args: &VerifyArgs, cfg: &RunConfig) -> Outcome {
    let prec = cfg.prec_bits;
    let tol = cfg.tolerance()?;
    let format = cfg.format;
    let by_k =
        |name: &str, f: fn(u32, u32, &BigReal) -> tvalue_core::Result<tvalue_core::VerificationReport>| match args.k {
            Some(k) => {
                let tol = tol.clone();
                Ok(run_single(name, &[("k", k.to_string())], cfg, move || f(k, prec, &tol)))
            }
            None => run_named(name, cfg),
        };
    let report = match args.check {
        Check::All => run_all(cfg)?,
        Check::TheoremCoeffs => {
            let (d, tol) = (cfg.max_degree, tol.clone());
            run_single(
                "theorem coefficients",
                &[("max_degree", d.to_string())],
                cfg,
                move || theorem_coefficient_report(d, prec, &tol),
            )
        }
        Check::TheoremNumeric | Check::HeightOne => {
            let (x, y) = point(args, ("-0.2", "0.2"));
            let (xr, yr) = (real(&x, prec)?, real(&y, prec)?);
            let (kmax, tol) = (cfg.kmax, tol.clone());
            let params = [("x", x), ("y", y)];
            if args.check == Check::HeightOne {
                run_single("height one", &params, cfg, move || {
                    height_one_check(&xr, &yr, prec, kmax, &tol)
                })
            } else {
                run_single("theorem numeric", &params, cfg, move || {
                    theorem_numeric_check(&xr, &yr, prec, kmax, &tol)
                })
            }
        }
        Check::WeightedSum => by_k("weighted sum", weighted_sum_check)?,
        Check::Shuffle => by_k("shuffle", shuffle_check)?,
        Check::IntroIdentity => by_k("x^(k-2) y^2 coefficient", intro_identity_check)?,
        Check::Duality => {
            let tol = tol.clone();
            run_single("duality", &[], cfg, move || duality_check(prec, &tol))
        }
        Check::Diffg => match (args.k, args.n, args.s) {
            (Some(k), Some(n), Some(s)) => {
                let order = args.order;
                let params = [("k", k.to_string()), ("n", n.to_string()), ("s", s.to_string())];
                run_single("diffG", &params, cfg, move || check_diffg(k as i64, n, s, order))
            }
            (None, None, None) => run_named("diffG", cfg)?,
            _ => return Err(Failure::Usage("diffg needs all of --k, --n, --s or none".into())),
        },
        Check::AthRecursion => run_named("Ath derivative", cfg)?,
        Check::GaussGrid => run_named("Gauss summation grid", cfg)?,
        Check::Ode => {
            let (x, y) = point(args, ("-1/4", "1/3"));
            let (order, exact, tol) = (args.order, args.exact, tol.clone());
            let params = [("x", x.clone()), ("y", y.clone())];
            run_single("ode residual", &params, cfg, move || {
                let mut b = ReportBuilder::new("ode residual")
                    .param("x", &x)
                    .param("y", &y)
                    .param("M", order)
                    .param("exact", exact);
                if exact {
                    let (xq, yq) = (parse_rational(&x)?, parse_rational(&y)?);
                    for (locus, p) in [
                        ("z^2 = xy/2", ParamPoint::half_xy(xq.clone(), yq.clone())),
                        ("z = 0", ParamPoint::z_zero(xq, yq)),
                    ] {
                        let res = ode_residual(&u_series(&p, order)?);
                        let dev = BigReal::from_ratio(&res, 96);
                        b.raw(locus, fmt_rational(&res), "0".into(), &dev, &BigReal::zero(64));
                    }
                    Ok(b.finish(&BigReal::zero(64)))
                } else {
                    let (xr, yr) = (real(&x, prec)?, real(&y, prec)?);
                    for (locus, p) in [
                        ("z^2 = xy/2", ParamPoint::half_xy(xr.clone(), yr.clone())),
                        ("z = 0", ParamPoint::z_zero(xr, yr)),
                    ] {
                        let res = ode_residual(&u_series(&p, order)?);
                        b.raw(locus, fmt_small(&res), "0".into(), &res, &BigReal::zero(64));
                    }
                    Ok(b.finish(&tol))
                }
            })
        }
        Check::V => {
            let (xq, yq) = rational_point(args)?;
            let order = args.order;
            let half = run_single("v hypergeometric", &[], cfg, {
                let (xq, yq) = (xq.clone(), yq.clone());
                move || v_check(&ParamPoint::half_xy(xq.clone(), yq.clone()), order)
            });
            let zero = run_single("v at z = 0", &[], cfg, move || {
                v_check_z0(&ParamPoint::z_zero(xq.clone(), yq.clone()), order)
            });
            let reports: Vec<_> = half.reports.into_iter().chain(zero.reports).collect();
            let passed = reports.iter().filter(|r| r.pass).count();
            RunReport {
                config: cfg.clone(),
                summary: tvalue_core::harness::Summary {
                    total: reports.len(),
                    passed,
                    failed: reports.len() - passed,
                },
                reports,
            }
        }
    };
    emit_report(report, format)
}
