//! Verification reports: one identity check with both sides, deviations,
//! tolerance and verdict. Numbers are carried as decimal strings.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::numerics::BigReal;

/// Precision used for deviations and tolerances inside reports.
const REPORT_BITS: u32 = 96;
const DEVIATION_DIGITS: usize = 6;
const RATIONAL_DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub deviation: String,
    pub error_estimate: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_name: String,
    pub parameters: BTreeMap<String, String>,
    pub entries: Vec<ReportEntry>,
    pub max_deviation: String,
    pub tolerance: String,
    pub error_estimate: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    /// A failed report for a check that raised an error or panicked.
    pub fn failed(name: &str, parameters: BTreeMap<String, String>, message: String, runtime_ms: u64) -> Self {
        VerificationReport {
            identity_name: name.to_string(),
            parameters,
            entries: Vec::new(),
            max_deviation: "n/a".into(),
            tolerance: "n/a".into(),
            error_estimate: "n/a".into(),
            pass: false,
            error: Some(message),
            runtime_ms,
        }
    }
}

/// Short decimal rendering of a deviation-like quantity.
pub fn fmt_small(x: &BigReal) -> String {
    x.to_scientific(DEVIATION_DIGITS)
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom() == &1.into() {
        return r.numer().to_string();
    }
    BigReal::from_ratio(r, REPORT_BITS + 32).to_decimal(RATIONAL_DIGITS)
}

pub struct ReportBuilder {
    name: String,
    parameters: BTreeMap<String, String>,
    entries: Vec<(ReportEntry, BigReal, BigReal)>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ReportBuilder {
            name: name.into(),
            parameters: BTreeMap::new(),
            entries: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn parameters(&self) -> &BTreeMap<String, String> {
        &self.parameters
    }

    /// Compares two real values; `estimate` is the propagated numerical
    /// uncertainty of the comparison.
    pub fn real(&mut self, label: impl Into<String>, lhs: &BigReal, rhs: &BigReal, estimate: &BigReal) {
        let dev = (lhs - rhs).abs().with_prec(REPORT_BITS);
        let digits = lhs.default_digits().min(rhs.default_digits());
        self.push(
            label.into(),
            lhs.to_decimal(digits),
            rhs.to_decimal(digits),
            dev,
            estimate.abs().with_prec(REPORT_BITS),
        );
    }

    /// Records a deviation computed elsewhere, with display values.
    pub fn raw(&mut self, label: impl Into<String>, lhs: String, rhs: String, deviation: &BigReal, estimate: &BigReal) {
        self.push(
            label.into(),
            lhs,
            rhs,
            deviation.abs().with_prec(REPORT_BITS),
            estimate.abs().with_prec(REPORT_BITS),
        );
    }

    /// Compares two exact series coefficientwise. The entry shows the
    /// highest-order nonzero coefficient of each side and the largest
    /// coefficient difference.
    pub fn exact_series(&mut self, label: impl Into<String>, lhs: &[BigRational], rhs: &[BigRational]) {
        let len = lhs.len().max(rhs.len());
        let zero = BigRational::from_integer(0.into());
        let at = |v: &[BigRational], i: usize| v.get(i).cloned().unwrap_or_else(|| zero.clone());
        let mut worst = zero.clone();
        for i in 0..len {
            let d = (at(lhs, i) - at(rhs, i)).abs();
            if d > worst {
                worst = d;
            }
        }
        let spot = |v: &[BigRational]| {
            v.iter()
                .enumerate()
                .rev()
                .find(|(_, c)| **c != zero)
                .map_or_else(|| "0".to_string(), |(i, c)| format!("t^{i}: {}", fmt_rational(c)))
        };
        let dev = BigReal::from_ratio(&worst, REPORT_BITS);
        let label = format!("{} [orders 0..{}]", label.into(), len.saturating_sub(1));
        self.push(label, spot(lhs), spot(rhs), dev, BigReal::zero(REPORT_BITS));
    }

    fn push(&mut self, label: String, lhs: String, rhs: String, dev: BigReal, est: BigReal) {
        let entry = ReportEntry {
            label,
            lhs,
            rhs,
            deviation: fmt_small(&dev),
            error_estimate: fmt_small(&est),
            pass: false,
        };
        self.entries.push((entry, dev, est));
    }

    /// Each entry passes when its deviation is at most
    /// `max(tolerance, its error estimate)`; the report passes when all do.
    pub fn finish(self, tolerance: &BigReal) -> VerificationReport {
        let tol = tolerance.abs().with_prec(REPORT_BITS);
        let mut max_dev = BigReal::zero(REPORT_BITS);
        let mut max_est = BigReal::zero(REPORT_BITS);
        let mut all_pass = true;
        let mut entries = Vec::with_capacity(self.entries.len());
        for (mut entry, dev, est) in self.entries {
            let allowed = tol.clone().max(est.clone());
            entry.pass = dev <= allowed;
            all_pass &= entry.pass;
            max_dev = max_dev.max(dev);
            max_est = max_est.max(est);
            entries.push(entry);
        }
        VerificationReport {
            identity_name: self.name,
            parameters: self.parameters,
            entries,
            max_deviation: fmt_small(&max_dev),
            tolerance: fmt_small(&tol),
            error_estimate: fmt_small(&max_est),
            pass: all_pass,
            error: None,
            runtime_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_uses_larger_of_tolerance_and_estimate() {
        let p = 64;
        let one = BigReal::one(p);
        let near = &one + &BigReal::parse("1e-7", p).unwrap();
        let mut b = ReportBuilder::new("demo").param("k", 3);
        b.real("a", &one, &near, &BigReal::zero(p));
        let r = b.finish(&BigReal::parse("1e-6", p).unwrap());
        assert!(r.pass);

        let mut b = ReportBuilder::new("demo");
        b.real("a", &one, &near, &BigReal::parse("1e-6", p).unwrap());
        assert!(b.finish(&BigReal::parse("1e-9", p).unwrap()).pass);

        let mut b = ReportBuilder::new("demo");
        b.real("a", &one, &near, &BigReal::zero(p));
        let r = b.finish(&BigReal::parse("1e-9", p).unwrap());
        assert!(!r.pass);
        assert_eq!(r.max_deviation, "1.00000e-7");
    }

    #[test]
    fn exact_series_entry() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let mut b = ReportBuilder::new("series");
        b.exact_series("same", &[q(0, 1), q(1, 3)], &[q(0, 1), q(1, 3)]);
        b.exact_series("differs", &[q(1, 1)], &[q(1, 1), q(1, 2)]);
        let r = b.finish(&BigReal::zero(64));
        assert!(r.entries[0].pass);
        assert!(!r.entries[1].pass);
        assert_eq!(r.entries[0].lhs, "t^1: 0.333333333333333333333333333333");
        assert!(!r.pass);
    }
}
