//! Truncated bivariate power series in `x, y` and the coefficientwise
//! comparison of both sides of the generating-function identity
//!
//! ```text
//! 1 - sum_{k>n>=1} (sum_s 2^-s sum_{I_0(k,n,s)} T) x^(k-n) y^n
//!     = exp( sum_{n>=2} T(n)/(2n) (x^n + y^n - (x+y)^n) ),
//! ```
//!
//! plus three identities among T-values read off its coefficients.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::indices::{enumerate_all_heights, Index};
use crate::numerics::{t_depth1, working_prec, BigReal};
use crate::report::{ReportBuilder, VerificationReport};
use crate::tvalues::t_value;

/// Dense truncated series `sum_{a+b <= D} c_(a,b) x^a y^b`, stored in
/// graded order: by total degree, then by increasing power of `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    degree: usize,
    prec: u32,
    coeffs: Vec<BigReal>,
}

fn slot(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

impl BiSeries {
    pub fn zero(degree: usize, prec: u32) -> Self {
        let len = slot(0, degree) + 1;
        BiSeries {
            degree,
            prec,
            coeffs: vec![BigReal::zero(prec); len],
        }
    }

    pub fn one(degree: usize, prec: u32) -> Self {
        Self::monomial(degree, prec, 0, 0, BigReal::one(prec))
    }

    /// `c x^a y^b`, or zero when `a + b > degree`.
    pub fn monomial(degree: usize, prec: u32, a: usize, b: usize, c: BigReal) -> Self {
        let mut s = Self::zero(degree, prec);
        if a + b <= degree {
            s.set(a, b, c);
        }
        s
    }

    pub fn x(degree: usize, prec: u32) -> Self {
        Self::monomial(degree, prec, 1, 0, BigReal::one(prec))
    }

    pub fn y(degree: usize, prec: u32) -> Self {
        Self::monomial(degree, prec, 0, 1, BigReal::one(prec))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Coefficient of `x^a y^b`; zero above the truncation degree.
    pub fn get(&self, a: usize, b: usize) -> BigReal {
        if a + b > self.degree {
            return BigReal::zero(self.prec);
        }
        self.coeffs[slot(a, b)].clone()
    }

    /// Sets the coefficient of `x^a y^b`. Panics above the truncation degree.
    pub fn set(&mut self, a: usize, b: usize, c: BigReal) {
        assert!(
            a + b <= self.degree,
            "x^{a} y^{b} is above the truncation degree {}",
            self.degree
        );
        self.coeffs[slot(a, b)] = c.with_prec(self.prec);
    }

    /// `(a, b, coefficient)` in graded order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigReal)> + '_ {
        (0..=self.degree).flat_map(move |d| (0..=d).map(move |b| (d - b, b, &self.coeffs[slot(d - b, b)])))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigReal, &BigReal) -> BigReal) -> Self {
        let degree = self.degree.min(other.degree);
        let mut out = Self::zero(degree, self.prec.max(other.prec));
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            *c = f(&self.coeffs[i], &other.coeffs[i]);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigReal) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v = &*v * c);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        let mut out = Self::zero(degree, self.prec.max(other.prec));
        for (a1, b1, c1) in self.iter().filter(|(a, b, c)| a + b <= degree && !c.is_zero()) {
            for (a2, b2, c2) in other.iter() {
                if a1 + a2 + b1 + b2 > degree {
                    break;
                }
                if !c2.is_zero() {
                    let s = slot(a1 + a2, b1 + b2);
                    out.coeffs[s] = &out.coeffs[s] + &(c1 * c2);
                }
            }
        }
        out
    }

    /// `sum_{j=0}^{D} A^j / j!`; the constant term of `A` must vanish.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(domain("exp of a series needs a zero constant term"));
        }
        let mut out = Self::one(self.degree, self.prec);
        let mut power = Self::one(self.degree, self.prec);
        for j in 1..=self.degree as i64 {
            power = power.mul(self);
            power.coeffs.iter_mut().for_each(|v| *v = v.div_int(j));
            out = out.add(&power);
        }
        Ok(out)
    }
}

pub fn bi_add(a: &BiSeries, b: &BiSeries) -> BiSeries {
    a.add(b)
}

pub fn bi_mul(a: &BiSeries, b: &BiSeries) -> BiSeries {
    a.mul(b)
}

pub fn bi_exp(a: &BiSeries) -> Result<BiSeries> {
    a.exp()
}

/// A value with an absolute error bound, propagated through sums and
/// products to first order plus the product of the errors.
#[derive(Clone, Debug)]
struct Approx {
    v: BigReal,
    e: BigReal,
}

impl Approx {
    fn exact(v: BigReal) -> Self {
        let e = BigReal::zero(64);
        Approx { v, e }
    }

    fn t(idx: &[u32], prec: u32) -> Result<Self> {
        let tv = t_value(&Index::new(idx.to_vec())?, prec)?;
        Ok(Approx {
            v: tv.value,
            e: tv.error_estimate,
        })
    }

    fn add(&self, o: &Self) -> Self {
        Approx {
            v: &self.v + &o.v,
            e: &self.e + &o.e,
        }
    }

    fn scale(&self, c: &BigReal) -> Self {
        Approx {
            v: &self.v * c,
            e: &self.e * &c.abs().with_prec(64),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let lo = |x: &BigReal| x.abs().with_prec(64);
        let e = &(&(&lo(&self.v) * &o.e) + &(&lo(&o.v) * &self.e)) + &(&self.e * &o.e);
        Approx { v: &self.v * &o.v, e }
    }
}

fn int(n: i64, prec: u32) -> BigReal {
    BigReal::from_i64(n, prec)
}

fn sum<I: IntoIterator<Item = Approx>>(items: I, prec: u32) -> Approx {
    items
        .into_iter()
        .fold(Approx::exact(BigReal::zero(prec)), |acc, x| acc.add(&x))
}

/// Left side of the identity together with per-coefficient error bounds.
pub fn lhs_series_with_errors(degree: usize, prec: u32) -> Result<(BiSeries, BiSeries)> {
    if degree < 2 {
        return Err(domain("series degree must be at least 2"));
    }
    let wp = working_prec(prec);
    let mut jobs = Vec::new();
    for k in 2..=degree as u32 {
        for n in 1..k {
            for idx in enumerate_all_heights(k, n, true) {
                jobs.push((k, n, idx));
            }
        }
    }
    let values: Vec<Result<_>> = jobs.par_iter().map(|(_, _, idx)| t_value(idx, prec)).collect();
    let mut series = BiSeries::one(degree, wp);
    let mut errors = BiSeries::zero(degree, 64);
    for ((k, n, idx), tv) in jobs.iter().zip(values) {
        let tv = tv?;
        let (a, b) = ((k - n) as usize, *n as usize);
        let s = -(idx.height() as i64);
        series.set(a, b, &series.get(a, b) - &tv.value.with_prec(wp).mul_pow2(s));
        errors.set(a, b, &errors.get(a, b) + &tv.error_estimate.mul_pow2(s));
    }
    let rounding = BigReal::one(64).mul_pow2(-(prec as i64));
    for (i, c) in errors.coeffs.iter_mut().enumerate() {
        *c = &*c + &(&series.coeffs[i].abs().with_prec(64) * &rounding);
    }
    Ok((series, errors))
}

/// `1 - sum_{k>n>=1} (sum_s 2^-s sum_{I_0(k,n,s)} T) x^(k-n) y^n` through
/// total degree `D`.
pub fn lhs_series(degree: usize, prec: u32) -> Result<BiSeries> {
    lhs_series_with_errors(degree, prec).map(|(s, _)| s)
}

/// The exponent `sum_{n=2}^{D} T(n)/(2n) (x^n + y^n - (x+y)^n)`, whose
/// pure powers cancel exactly and are never formed.
pub fn rhs_exponent(degree: usize, prec: u32) -> Result<BiSeries> {
    if degree < 2 {
        return Err(domain("series degree must be at least 2"));
    }
    let wp = working_prec(prec);
    let mut arg = BiSeries::zero(degree, wp);
    for n in 2..=degree {
        let t = t_depth1(n as u32, wp)?;
        let base = -(t.div_int(2 * n as i64));
        let mut binom = BigReal::one(wp);
        for a in 1..n {
            binom = binom.mul_int((n - a + 1) as i64).div_int(a as i64);
            arg.set(a, n - a, &base * &binom);
        }
    }
    Ok(arg)
}

/// Right side of the identity through total degree `D`.
pub fn rhs_series(degree: usize, prec: u32) -> Result<BiSeries> {
    rhs_exponent(degree, prec)?.exp()
}

/// Coefficientwise comparison of both sides through total degree `D`.
pub fn theorem_coefficient_report(degree: usize, prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    let mut report = ReportBuilder::new("theorem coefficients")
        .param("max_degree", degree)
        .param("prec_bits", prec);
    let (lhs, lhs_err) = lhs_series_with_errors(degree, prec)?;
    let rhs = rhs_series(degree, prec)?;
    // the right side is built from zeta values at working precision; its
    // rounding grows mildly with the number of products in exp
    let rhs_rounding = BigReal::one(64).mul_pow2(16 - prec as i64);
    for (a, b, l) in lhs.iter() {
        let r = rhs.get(a, b);
        let est = &lhs_err.get(a, b) + &(&rhs_rounding * &(&r.abs().with_prec(64) + &BigReal::one(64)));
        report.real(format!("x^{a} y^{b}"), &l.with_prec(prec), &r.with_prec(prec), &est);
    }
    Ok(report.finish(tol))
}

fn identity_report(name: &str, k: u32, prec: u32, lhs: Approx, rhs: Approx, tol: &BigReal) -> VerificationReport {
    let mut report = ReportBuilder::new(name).param("k", k).param("prec_bits", prec);
    let est = &lhs.e + &rhs.e;
    report.real(format!("k = {k}"), &lhs.v.with_prec(prec), &rhs.v.with_prec(prec), &est);
    report.finish(tol)
}

/// `sum_{j=2}^{k-1} 2^(j-1) T(k-j, j) = (k-1) T(k)`.
pub fn weighted_sum_check(k: u32, prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    if k < 3 {
        return Err(domain(format!("weighted sum formula needs k >= 3, got {k}")));
    }
    let wp = working_prec(prec);
    let lhs = sum(
        (2..k)
            .map(|j| Approx::t(&[k - j, j], prec).map(|t| t.scale(&int(1 << (j - 1), wp))))
            .collect::<Result<Vec<_>>>()?,
        wp,
    );
    let rhs = Approx::t(&[k], prec)?.scale(&int(k as i64 - 1, wp));
    Ok(identity_report("weighted sum", k, prec, lhs, rhs, tol))
}

fn depth_one_products(k: u32, prec: u32) -> Result<Approx> {
    let wp = working_prec(prec);
    let terms = (2..=k.saturating_sub(2))
        .map(|j| Ok(Approx::t(&[j], prec)?.mul(&Approx::t(&[k - j], prec)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(terms, wp))
}

/// `(1/2) sum_{j=2}^{k-2} T(j) T(k-j)
///   = (2^(k-2) - 2) T(1, k-1) + sum_{j=2}^{k-2} (2^(j-1) - 1) T(k-j, j)`.
pub fn shuffle_check(k: u32, prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    if k < 4 {
        return Err(domain(format!("shuffle relation needs k >= 4, got {k}")));
    }
    let wp = working_prec(prec);
    let lhs = depth_one_products(k, prec)?.scale(&BigReal::one(wp).mul_pow2(-1));
    let head = Approx::t(&[1, k - 1], prec)?.scale(&int((1i64 << (k - 2)) - 2, wp));
    let rest = (2..=k - 2)
        .map(|j| Approx::t(&[k - j, j], prec).map(|t| t.scale(&int((1i64 << (j - 1)) - 1, wp))))
        .collect::<Result<Vec<_>>>()?;
    let rhs = head.add(&sum(rest, wp));
    Ok(identity_report("shuffle", k, prec, lhs, rhs, tol))
}

/// The coefficient of `x^(k-2) y^2` on both sides:
/// `-(T(1,k-1)/2 + sum_{j=2}^{k-2} T(k-j,j)/4)
///   = -(k-1)/4 T(k) + sum_{j=2}^{k-2} T(j) T(k-j)/8`.
pub fn intro_identity_check(k: u32, prec: u32, tol: &BigReal) -> Result<VerificationReport> {
    if k < 3 {
        return Err(domain(format!("the x^(k-2) y^2 identity needs k >= 3, got {k}")));
    }
    let wp = working_prec(prec);
    let half = BigReal::one(wp).mul_pow2(-1);
    let quarter = BigReal::one(wp).mul_pow2(-2);
    let mixed = (2..=k.saturating_sub(2))
        .map(|j| Approx::t(&[k - j, j], prec))
        .collect::<Result<Vec<_>>>()?;
    let lhs = Approx::t(&[1, k - 1], prec)?
        .scale(&half)
        .add(&sum(mixed, wp).scale(&quarter))
        .scale(&int(-1, wp));
    let rhs = Approx::t(&[k], prec)?
        .scale(&(-(int(k as i64 - 1, wp).mul_pow2(-2))))
        .add(&depth_one_products(k, prec)?.scale(&BigReal::one(wp).mul_pow2(-3)));
    Ok(identity_report("x^(k-2) y^2 coefficient", k, prec, lhs, rhs, tol))
}
