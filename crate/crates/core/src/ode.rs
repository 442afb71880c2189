//! The Heun-type equation
//!
//! ```text
//! t(1-t^2) u'' + {(1-x)(1-t^2) - 2ty} u' + 2(xy - z^2) u = 0,   u(0) = 1,
//! ```
//!
//! satisfied by `u = 1 - (xy - z^2) Phi_0`, its reduction
//! `v = (1-t)^y (t u' - x u)` to a Gauss equation in `t^2` when
//! `z^2 = xy/2` (and to `(1+t)^y` when `z = 0`), the limit of `u` at `t = 1`
//! and its Gamma-function closed form, and numeric checks of the full
//! generating-function identity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, range, Error, Result};
use crate::indices::{enumerate_all_heights, Index};
use crate::numerics::{gamma, gamma_one_minus, hyp2f1, sum_accelerated, t_depth1, working_prec, BigReal, Scalar};
use crate::report::{fmt_rational, ReportBuilder, VerificationReport};
use crate::tvalues::t_value;

/// Upper bound for every admissible T-value of any depth: `T(k) <= T(1,...,1,2)
/// = T(n+1) <= T(2) = pi^2/4 < 5/2`.
const T_BOUND: f64 = 2.5;

/// Terms of the limit series handed to the accelerator.
const LIMIT_TERMS: usize = 240;

/// Which of the two solvable loci `z^2` lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZLocus {
    /// `z^2 = xy/2`, the case of the generating-function identity.
    HalfXY,
    /// `z = 0`.
    Zero,
    /// Any other value: the equation is still defined, but no closed-form
    /// solution path exists.
    Other,
}

/// Parameters `(x, y, z^2)` over exact rationals or `BigReal`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint<S> {
    pub x: S,
    pub y: S,
    pub z2: S,
}

impl<S: Scalar> ParamPoint<S> {
    /// The point on the locus `z^2 = xy/2`.
    pub fn half_xy(x: S, y: S) -> Self {
        let z2 = x.clone() * y.clone() / x.int_like(2);
        ParamPoint { x, y, z2 }
    }

    /// The point with `z = 0`.
    pub fn z_zero(x: S, y: S) -> Self {
        let z2 = x.zero_like();
        ParamPoint { x, y, z2 }
    }

    pub fn with_z2(x: S, y: S, z2: S) -> Self {
        ParamPoint { x, y, z2 }
    }

    pub fn locus(&self) -> ZLocus {
        let half = self.x.clone() * self.y.clone() / self.x.int_like(2);
        if self.z2 == half {
            ZLocus::HalfXY
        } else if self.z2.is_zero_value() {
            ZLocus::Zero
        } else {
            ZLocus::Other
        }
    }

    /// `w = 2(xy - z^2)`, the zeroth-order coefficient of the equation.
    fn w(&self) -> S {
        (self.x.clone() * self.y.clone() - self.z2.clone()) * self.x.int_like(2)
    }
}

/// Coefficients `a_0..=a_M` of the regular solution with `u(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct USeries<S> {
    pub params: ParamPoint<S>,
    pub coeffs: Vec<S>,
}

/// Regular solution of the equation through order `M`, from
/// `(j+1)(j+1-x) a_(j+1) = (j-1)(j-1-x) a_(j-1) + (2yj - w) a_j`.
pub fn u_series<S: Scalar>(p: &ParamPoint<S>, m_max: usize) -> Result<USeries<S>> {
    let one = p.x.one_like();
    if p.x == one {
        return Err(domain("x = 1 is a singular parameter of the equation"));
    }
    if m_max < 2 {
        return Err(domain("series order must be at least 2"));
    }
    let n = |j: usize| p.x.int_like(j as i64);
    let w = p.w();
    let mut a = vec![one.clone()];
    for j in 0..m_max {
        let denom = n(j + 1) * (n(j + 1) - p.x.clone());
        // a pole (x a positive integer) leaves no regular solution
        if denom.is_zero_value() {
            return Err(domain(format!("x = {} makes the recurrence singular", j + 1)));
        }
        let mut rhs = (n(2) * p.y.clone() * n(j) - w.clone()) * a[j].clone();
        if j >= 1 {
            rhs = rhs + n(j - 1) * (n(j - 1) - p.x.clone()) * a[j - 1].clone();
        }
        a.push(rhs / denom);
    }
    Ok(USeries {
        params: p.clone(),
        coeffs: a,
    })
}

fn deriv<S: Scalar>(c: &[S]) -> Vec<S> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(m, v)| v.clone() * v.int_like(m as i64))
        .collect()
}

/// Multiplies a series by a polynomial `sum p_i t^i`, truncated to `len`.
fn times_poly<S: Scalar>(c: &[S], poly: &[(usize, S)], len: usize) -> Vec<S> {
    let mut out = vec![c[0].zero_like(); len];
    for (shift, coef) in poly {
        for (m, v) in c.iter().enumerate() {
            if m + shift < len {
                out[m + shift] = out[m + shift].clone() + v.clone() * coef.clone();
            }
        }
    }
    out
}

/// Applies the differential operator to the truncated series and returns
/// the largest coefficient magnitude over orders `0..=M-2`.
pub fn ode_residual<S: Scalar>(u: &USeries<S>) -> S {
    let p = &u.params;
    let len = u.coeffs.len() - 1;
    let one = p.x.one_like();
    let d1 = deriv(&u.coeffs);
    let d2 = deriv(&d1);
    let one_minus_x = one.clone() - p.x.clone();
    let t2 = times_poly(&d2, &[(1, one.clone()), (3, -one.clone())], len);
    let t1 = times_poly(
        &d1,
        &[
            (0, one_minus_x.clone()),
            (1, -(p.y.clone() * p.x.int_like(2))),
            (2, -one_minus_x),
        ],
        len,
    );
    let t0 = times_poly(&u.coeffs, &[(0, p.w())], len);
    (0..len - 1)
        .map(|m| (t2[m].clone() + t1[m].clone() + t0[m].clone()).abs_value())
        .fold(p.x.zero_like(), |acc, v| if v > acc { v } else { acc })
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(1 - t)^y` or `(1 + t)^y` to order `M` (`sign` = -1 or +1).
fn binomial_series(y: &BigRational, sign: i64, m_max: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    for m in 0..m_max as i64 {
        // C(y, m+1) = C(y, m) (y - m)/(m + 1)
        let next = &c[m as usize] * (y - rational(m)) / rational(m + 1) * rational(sign);
        c.push(next);
    }
    c
}

/// `v = (1-t)^y (t u' - x u)` through order `M`.
pub fn v_series(p: &ParamPoint<BigRational>, m_max: usize) -> Result<Vec<BigRational>> {
    let u = u_series(p, m_max)?;
    let tu: Vec<BigRational> = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, a)| a * (rational(m as i64) - &p.x))
        .collect();
    let b = binomial_series(&p.y, -1, m_max);
    Ok((0..=m_max)
        .map(|m| {
            (0..=m)
                .map(|i| &b[i] * &tu[m - i])
                .fold(BigRational::zero(), |s, v| s + v)
        })
        .collect())
}

fn is_nonpositive_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// Compares `v` with `-x F(-y/2, (1-x-y)/2; (1-x)/2; t^2)` exactly through
/// order `M`, on the locus `z^2 = xy/2`.
pub fn v_check(p: &ParamPoint<BigRational>, m_max: usize) -> Result<VerificationReport> {
    if p.locus() != ZLocus::HalfXY {
        return Err(Error::Unsupported(
            "the hypergeometric form of v needs z^2 = xy/2".into(),
        ));
    }
    let half = BigRational::new(1.into(), 2.into());
    let (a, b, c) = (
        -&p.y * &half,
        (BigRational::one() - &p.x - &p.y) * &half,
        (BigRational::one() - &p.x) * &half,
    );
    if is_nonpositive_integer(&c) {
        return Err(domain(format!("(1-x)/2 = {c} is a pole of the hypergeometric series")));
    }
    let mut report = ReportBuilder::new("v hypergeometric")
        .param("x", &p.x)
        .param("y", &p.y)
        .param("M", m_max);
    let v = v_series(p, m_max)?;
    let mut f = vec![BigRational::zero(); m_max + 1];
    let mut term = -&p.x;
    for j in 0..=m_max / 2 {
        f[2 * j] = term.clone();
        let jj = rational(j as i64);
        term = term * (&a + &jj) * (&b + &jj) / ((&c + &jj) * (&jj + BigRational::one()));
    }
    report.raw(
        "v(0) = -x",
        fmt_rational(&v[0]),
        fmt_rational(&-&p.x),
        &BigReal::from_ratio(&(&v[0] + &p.x).abs(), 64),
        &BigReal::zero(64),
    );
    report.exact_series("(1-t)^y (t u' - x u) = -x F(t^2)", &v, &f);
    Ok(report.finish(&BigReal::zero(64)))
}

/// Compares `v / (-x)` with `(1 + t)^y` exactly through order `M`, for
/// `z = 0`.
pub fn v_check_z0(p: &ParamPoint<BigRational>, m_max: usize) -> Result<VerificationReport> {
    if p.locus() != ZLocus::Zero {
        return Err(Error::Unsupported("the binomial form of v needs z = 0".into()));
    }
    if p.x.is_zero() {
        return Err(domain("x = 0 leaves v identically zero"));
    }
    let mut report = ReportBuilder::new("v at z = 0")
        .param("x", &p.x)
        .param("y", &p.y)
        .param("M", m_max);
    let scale = -BigRational::one() / &p.x;
    let v: Vec<BigRational> = v_series(p, m_max)?.iter().map(|c| c * &scale).collect();
    report.exact_series(
        "(1-t)^y (t u' - x u) / (-x) = (1+t)^y",
        &v,
        &binomial_series(&p.y, 1, m_max),
    );
    Ok(report.finish(&BigReal::zero(64)))
}

fn check_limit_region(x: &BigReal, y: &BigReal) -> Result<()> {
    if !(x.is_negative() && y.is_positive() && *y < BigReal::one(y.prec())) {
        return Err(domain(format!(
            "the limit at t = 1 needs x < 0 and 0 < y < 1, got x = {}, y = {}",
            x.to_decimal(8),
            y.to_decimal(8)
        )));
    }
    Ok(())
}

/// `Gamma(1 - t)` through the primitive series when `|t| <= 3/4`.
fn gamma_1m(t: &BigReal, prec: u32) -> Result<BigReal> {
    if t.abs().to_f64() <= 0.75 {
        gamma_one_minus(t, prec)
    } else {
        gamma(&(&BigReal::one(t.prec()) - t), prec)
    }
}

/// Limit of `u(t)` at `t = 1` from the series
/// `-x sum_m (-y/2)_m ((1-x-y)/2)_m / (m! ((1-x)/2)_m) Gamma(2m-x) Gamma(1-y) / Gamma(2m+1-x-y)`,
/// with the Gamma ratio carried as `Gamma(-x) Gamma(1-y)/Gamma(1-x-y)` times
/// `(-x)_(2m) / (1-x-y)_(2m)`. Terms decay like `m^-2`, so the sum is
/// Levin-accelerated; returns the value and the accelerator's last step.
pub fn u_limit_series(x: &BigReal, y: &BigReal, prec: u32) -> Result<(BigReal, BigReal)> {
    check_limit_region(x, y)?;
    let wp = working_prec(prec);
    let ip = 2 * prec + 64;
    let (xi, yi) = (x.with_prec(ip), y.with_prec(ip));
    let one = BigReal::one(ip);
    let half = one.mul_pow2(-1);
    let a = -(&yi * &half);
    let b = (&(&one - &xi) - &yi).mul_pow2(-1);
    let c = (&one - &xi).mul_pow2(-1);
    let s = &(&one - &xi) - &yi;
    let mut terms = Vec::with_capacity(LIMIT_TERMS);
    let mut term = one.clone();
    for m in 0..LIMIT_TERMS as i64 {
        terms.push(term.clone());
        let mm = BigReal::from_i64(m, ip);
        let two_m = BigReal::from_i64(2 * m, ip);
        let hyper = &(&(&a + &mm) * &(&b + &mm)) / &(&BigReal::from_i64(m + 1, ip) * &(&c + &mm));
        let gam = &(&(&two_m - &xi) * &(&(&two_m + &one) - &xi)) / &(&(&s + &two_m) * &(&(&s + &two_m) + &one));
        term = &(&term * &hyper) * &gam;
    }
    let (sum, step) = sum_accelerated(&terms, prec + 8)?;
    // Gamma(-x) (-x) = Gamma(1-x)
    let prefactor =
        &(&gamma_1m(&x.with_prec(wp), wp)? * &gamma_1m(&y.with_prec(wp), wp)?) / &gamma_1m(&(x + y).with_prec(wp), wp)?;
    let value = &prefactor * &sum.with_prec(wp);
    let err = &step.with_prec(64) * &prefactor.abs().with_prec(64);
    Ok((value.with_prec(prec), err))
}

/// `Gamma(1-x) Gamma(1-y) / Gamma(1-x-y) * Gamma(1-(x+y)/2) / (Gamma(1-x/2) Gamma(1-y/2))`.
pub fn u_closed_form(x: &BigReal, y: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = working_prec(prec) + 8;
    let (x, y) = (x.with_prec(wp), y.with_prec(wp));
    let g = |t: &BigReal| gamma_1m(t, wp);
    let s = &x + &y;
    let num = &(&(&g(&x)? * &g(&y)?) * &g(&s.mul_pow2(-1))?) / &g(&s)?;
    let den = &g(&x.mul_pow2(-1))? * &g(&y.mul_pow2(-1))?;
    Ok((&num / &den).with_prec(prec))
}

/// `exp( sum_{n>=2} T(n)/(2n) (x^n + y^n - (x+y)^n) )` summed until the
/// geometric tail drops below `2^-prec`; requires `max(|x|, |y|, |x+y|) < 1`.
pub fn exp_formula(x: &BigReal, y: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = working_prec(prec) + 8;
    let (x, y) = (x.with_prec(wp), y.with_prec(wp));
    let s = &x + &y;
    let q = x.abs().to_f64().max(y.abs().to_f64()).max(s.abs().to_f64());
    if q >= 1.0 {
        return Err(range("the exponent series needs max(|x|, |y|, |x+y|) < 1"));
    }
    let mut arg = BigReal::zero(wp);
    let (mut px, mut py, mut ps) = (x.clone(), y.clone(), s.clone());
    let mut n = 1u32;
    loop {
        n += 1;
        px = &px * &x;
        py = &py * &y;
        ps = &ps * &s;
        if q == 0.0 {
            break;
        }
        let tn = t_depth1(n, wp)?;
        arg += (&tn * &(&(&px + &py) - &ps)).div_int(2 * n as i64);
        // remaining terms are at most 3 T_BOUND q^m / (2m) each
        let tail = (3.0 * T_BOUND / (2.0 * n as f64)).log2() + (n + 1) as f64 * q.log2() - (1.0 - q).log2();
        if tail < -(wp as f64) {
            break;
        }
    }
    Ok(arg.exp().with_prec(prec))
}

/// `1 - sum_{k>n>=1, k<=Kmax} (sum_s 2^-s sum_{I_0(k,n,s)} T) x^(k-n) y^n`
/// with the accumulated T-value error bound.
fn truncated_lhs(x: &BigReal, y: &BigReal, prec: u32, kmax: u32) -> Result<(BigReal, BigReal)> {
    let wp = working_prec(prec);
    let (x, y) = (x.with_prec(wp), y.with_prec(wp));
    let mut total = BigReal::one(wp);
    let mut err = BigReal::zero(64);
    for k in 2..=kmax {
        for n in 1..k {
            let mono = &x.powi((k - n) as i64) * &y.powi(n as i64);
            let mut coef = BigReal::zero(wp);
            for idx in enumerate_all_heights(k, n, true) {
                let tv = t_value(&idx, prec)?;
                let s = -(idx.height() as i64);
                coef += tv.value.with_prec(wp).mul_pow2(s);
                err += (&tv.error_estimate * &mono.abs().with_prec(64)).mul_pow2(s);
            }
            total -= &(&coef * &mono);
        }
    }
    Ok((total.with_prec(prec), err))
}

/// `1 - sum_{k>n>=1, k<=Kmax} T(1,...,1,k-n+1) x^(k-n) y^n`.
fn truncated_height_one(x: &BigReal, y: &BigReal, prec: u32, kmax: u32) -> Result<(BigReal, BigReal)> {
    let wp = working_prec(prec);
    let (x, y) = (x.with_prec(wp), y.with_prec(wp));
    let mut total = BigReal::one(wp);
    let mut err = BigReal::zero(64);
    for k in 2..=kmax {
        for n in 1..k {
            let mono = &x.powi((k - n) as i64) * &y.powi(n as i64);
            let tv = t_value(&Index::ones_then(n as usize - 1, k - n + 1)?, prec)?;
            total -= &(&tv.value.with_prec(wp) * &mono);
            err += &tv.error_estimate * &mono.abs().with_prec(64);
        }
    }
    Ok((total.with_prec(prec), err))
}

fn check_convergence_region(x: &BigReal, y: &BigReal) -> Result<()> {
    check_limit_region(x, y)?;
    if x.abs().to_f64() >= 0.5 || y.abs().to_f64() >= 0.25 {
        return Err(domain(format!(
            "the numeric identity check needs |x| < 1/2 and |y| < 1/4, got x = {}, y = {}",
            x.to_decimal(8),
            y.to_decimal(8)
        )));
    }
    Ok(())
}

fn bound(v: f64) -> BigReal {
    BigReal::from_f64(v, 64)
}

/// Tail of the generating-function series beyond weight `Kmax`, bounded
/// with `|T| <= 5/2` and `|I_0(k, n)| = C(k-2, n-1)`, `2^-s <= 1/2`:
/// `5/4 |x| |y| r^(Kmax-1) / (1 - r)`, `r = |x| + |y|`.
pub fn direct_truncation_bound(x: f64, y: f64, kmax: u32) -> f64 {
    let r = x.abs() + y.abs();
    T_BOUND / 2.0 * (x * y).abs() * r.powi(kmax as i32 - 1) / (1.0 - r)
}

/// The generic bound on the series of the generating function,
/// `4|y| r^Kmax / ((1 - r)(1 - |x| - 2|y|))`, `r = |x| + 2|y|`.
pub fn majorant_truncation_bound(x: f64, y: f64, kmax: u32) -> f64 {
    let r = x.abs() + 2.0 * y.abs();
    4.0 * y.abs() * r.powi(kmax as i32) / ((1.0 - r) * (1.0 - x.abs() - 2.0 * y.abs()))
}

/// Tail of the height-one series beyond weight `Kmax`: with `|T| <= 5/2`
/// and `q = max(|x|, |y|)`, at most `5/2 q^(K+1) (K - (K-1) q) / (1-q)^2`.
pub fn height_one_truncation_bound(x: f64, y: f64, kmax: u32) -> f64 {
    let q = x.abs().max(y.abs());
    let k = kmax as f64;
    T_BOUND * q.powi(kmax as i32 + 1) * (k - (k - 1.0) * q) / (1.0 - q).powi(2)
}

fn add_truncation_entry(report: &mut ReportBuilder, deviation: &BigReal, limit: f64) {
    // passes when the deviation stays within the rigorous bound
    let lim = bound(limit);
    let excess = if *deviation <= lim {
        BigReal::zero(64)
    } else {
        deviation - &lim
    };
    report.raw(
        "direct sum within truncation bound",
        fmt_small_real(deviation),
        format!("<= {}", fmt_small_real(&lim)),
        &excess,
        &BigReal::zero(64),
    );
}

fn fmt_small_real(x: &BigReal) -> String {
    crate::report::fmt_small(x)
}

/// Four-way numeric check of the generating-function identity at `(x, y)`:
/// the direct T-value sum through weight `Kmax`, the limit series of `u`,
/// the Gamma closed form and the exponential formula.
pub fn theorem_numeric_check(
    x: &BigReal,
    y: &BigReal,
    prec: u32,
    kmax: u32,
    tol: &BigReal,
) -> Result<VerificationReport> {
    check_convergence_region(x, y)?;
    let mut report = ReportBuilder::new("theorem numeric")
        .param("x", x.to_decimal(12))
        .param("y", y.to_decimal(12))
        .param("kmax", kmax)
        .param("prec_bits", prec);
    let (direct, direct_err) = truncated_lhs(x, y, prec, kmax)?;
    let (limit, limit_err) = u_limit_series(x, y, prec)?;
    let closed = u_closed_form(x, y, prec)?;
    let expf = exp_formula(x, y, prec)?;
    let rounding = BigReal::one(64).mul_pow2(8 - prec as i64);
    let (xf, yf) = (x.to_f64(), y.to_f64());
    let trunc = direct_truncation_bound(xf, yf, kmax);
    report.set_param("truncation_bound", format!("{trunc:.6e}"));
    report.set_param(
        "majorant_bound",
        format!("{:.6e}", majorant_truncation_bound(xf, yf, kmax)),
    );
    let legs = [
        ("direct", &direct, &direct_err),
        ("limit", &limit, &limit_err),
        ("closed", &closed, &rounding),
        ("exp", &expf, &rounding),
    ];
    for i in 0..legs.len() {
        for j in i + 1..legs.len() {
            let (ni, vi, ei) = legs[i];
            let (nj, vj, ej) = legs[j];
            let est = &(ei + ej) + &rounding;
            report.real(format!("{ni} vs {nj}"), vi, vj, &est);
        }
    }
    add_truncation_entry(&mut report, &(&direct - &closed).abs(), trunc);
    Ok(report.finish(tol))
}

/// `1 - sum T(1,...,1,k-n+1) x^(k-n) y^n` against
/// `2 Gamma(1-x) Gamma(1-y) / Gamma(1-x-y) * F(1-x, 1-y; 1-x-y; -1)`.
pub fn height_one_check(x: &BigReal, y: &BigReal, prec: u32, kmax: u32, tol: &BigReal) -> Result<VerificationReport> {
    check_convergence_region(x, y)?;
    let mut report = ReportBuilder::new("height one")
        .param("x", x.to_decimal(12))
        .param("y", y.to_decimal(12))
        .param("kmax", kmax)
        .param("prec_bits", prec);
    let (lhs, lhs_err) = truncated_height_one(x, y, prec, kmax)?;
    let rhs = height_one_rhs(x, y, prec)?;
    let trunc = height_one_truncation_bound(x.to_f64(), y.to_f64(), kmax);
    report.set_param("truncation_bound", format!("{trunc:.6e}"));
    let est = &lhs_err + &BigReal::one(64).mul_pow2(8 - prec as i64);
    report.real("series vs Gamma-hypergeometric form", &lhs, &rhs, &est);
    add_truncation_entry(&mut report, &(&lhs - &rhs).abs(), trunc);
    Ok(report.finish(tol))
}

/// `2 Gamma(1-x) Gamma(1-y) / Gamma(1-x-y) * F(1-x, 1-y; 1-x-y; -1)`.
pub fn height_one_rhs(x: &BigReal, y: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = working_prec(prec) + 8;
    let (x, y) = (x.with_prec(wp), y.with_prec(wp));
    let one = BigReal::one(wp);
    let s = &x + &y;
    let ratio = &(&gamma_1m(&x, wp)? * &gamma_1m(&y, wp)?) / &gamma_1m(&s, wp)?;
    let f = hyp2f1(&(&one - &x), &(&one - &y), &(&one - &s), &-&one, wp)?;
    Ok((&ratio * &f).mul_pow2(1).with_prec(prec))
}

/// `log u_closed_form(x, y)` against `sum_{n=2}^{N} T(n)/(2n) (x^n + y^n - (x+y)^n)`
/// with the remainder bounded by `2 max(|x|, |y|, |x+y|)^(N+1)` (plus the
/// geometric factor of the remaining terms).
pub fn closed_form_log_check(x: &BigReal, y: &BigReal, prec: u32, n_max: u32) -> Result<VerificationReport> {
    check_limit_region(x, y)?;
    let wp = working_prec(prec);
    let (xw, yw) = (x.with_prec(wp), y.with_prec(wp));
    let s = &xw + &yw;
    let q = xw.abs().to_f64().max(yw.abs().to_f64()).max(s.abs().to_f64());
    if q >= 1.0 {
        return Err(range("needs max(|x|, |y|, |x+y|) < 1"));
    }
    let mut report = ReportBuilder::new("log closed form")
        .param("x", x.to_decimal(12))
        .param("y", y.to_decimal(12))
        .param("N", n_max)
        .param("prec_bits", prec);
    let lhs = u_closed_form(x, y, wp)?.ln()?;
    let mut rhs = BigReal::zero(wp);
    for n in 2..=n_max {
        let p = &(&xw.powi(n as i64) + &yw.powi(n as i64)) - &s.powi(n as i64);
        rhs += (&t_depth1(n, wp)? * &p).div_int(2 * n as i64);
    }
    let tail = 2.0 * q.powi(n_max as i32 + 1) / (1.0 - q);
    report.set_param("tail_bound", format!("{tail:.6e}"));
    let est = bound(tail);
    report.real(
        format!("log Gamma ratio vs exponent through n = {n_max}"),
        &lhs.with_prec(prec),
        &rhs.with_prec(prec),
        &est,
    );
    Ok(report.finish(&BigReal::zero(64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        crate::numerics::parse_rational(s).unwrap()
    }

    fn r(s: &str, prec: u32) -> BigReal {
        BigReal::parse(s, prec).unwrap()
    }

    #[test]
    fn leading_coefficients() {
        let p = ParamPoint::half_xy(q("-1/4"), q("1/3"));
        let u = u_series(&p, 10).unwrap();
        assert_eq!(u.coeffs[0], BigRational::one());
        // a_1 = -2(xy - z^2)/(1-x) = -xy/(1-x)
        let want = -(&p.x * &p.y) / (BigRational::one() - &p.x);
        assert_eq!(u.coeffs[1], want);
    }

    #[test]
    fn constant_solution_when_xy_equals_z2() {
        let p = ParamPoint::with_z2(q("-1/5"), q("2/7"), q("-2/35"));
        let u = u_series(&p, 20).unwrap();
        assert!(u.coeffs[1..].iter().all(Zero::is_zero));
        assert!(ode_residual(&u).is_zero());
        assert_eq!(p.locus(), ZLocus::Other);
    }

    #[test]
    fn exact_residual_vanishes() {
        for (x, y) in [("-1/4", "1/3"), ("-1/3", "1/4"), ("3/7", "-5/2")] {
            for p in [ParamPoint::half_xy(q(x), q(y)), ParamPoint::z_zero(q(x), q(y))] {
                let u = u_series(&p, 60).unwrap();
                assert!(ode_residual(&u).is_zero(), "{x} {y}");
            }
        }
    }

    #[test]
    fn numeric_residual_is_tiny() {
        let prec = 256;
        let p = ParamPoint::half_xy(r("-0.2", prec), r("0.3", prec));
        let u = u_series(&p, 60).unwrap();
        assert!(ode_residual(&u).log2_abs() < -200.0);
    }

    #[test]
    fn singular_parameter() {
        assert!(u_series(&ParamPoint::half_xy(q("1"), q("1/3")), 10).is_err());
        assert!(u_series(&ParamPoint::half_xy(q("2"), q("1/3")), 10).is_err());
        assert!(u_series(&ParamPoint::half_xy(q("-1/2"), q("1/3")), 1).is_err());
    }

    #[test]
    fn v_reductions_are_exact() {
        for (x, y) in [("-1/4", "1/3"), ("-1/3", "1/4")] {
            let rep = v_check(&ParamPoint::half_xy(q(x), q(y)), 40).unwrap();
            assert!(rep.pass, "{rep:?}");
            let rep = v_check_z0(&ParamPoint::z_zero(q(x), q(y)), 40).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
        let v = v_series(&ParamPoint::half_xy(q("-1/4"), q("1/3")), 9).unwrap();
        assert_eq!(v[0], q("1/4"));
        assert!(v.iter().skip(1).step_by(2).all(Zero::is_zero));
        assert_eq!(binomial_series(&q("1/3"), 1, 3)[1], q("1/3"));
    }

    #[test]
    fn v_check_rejects_wrong_locus() {
        let half = ParamPoint::half_xy(q("-1/4"), q("1/3"));
        let zero = ParamPoint::z_zero(q("-1/4"), q("1/3"));
        assert!(matches!(v_check(&zero, 10), Err(Error::Unsupported(_))));
        assert!(matches!(v_check_z0(&half, 10), Err(Error::Unsupported(_))));
        // (1-x)/2 = -1
        assert!(matches!(
            v_check(&ParamPoint::half_xy(q("3"), q("1/3")), 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn limit_matches_closed_form() {
        let prec = 256;
        for (x, y) in [("-0.2", "0.3"), ("-0.4", "0.45"), ("-0.05", "0.05")] {
            let (x, y) = (r(x, prec), r(y, prec));
            let (lim, _) = u_limit_series(&x, &y, prec).unwrap();
            let closed = u_closed_form(&x, &y, prec).unwrap();
            assert!((&lim - &closed).abs().log2_abs() < -128.0);
        }
    }

    #[test]
    fn closed_form_properties() {
        let prec = 192;
        let (x, y) = (r("-0.2", prec), r("0.3", prec));
        let c = u_closed_form(&x, &y, prec).unwrap();
        assert!((&c - &u_closed_form(&y, &x, prec).unwrap()).abs().log2_abs() < -180.0);
        assert_eq!(
            u_closed_form(&BigReal::zero(prec), &y, prec).unwrap(),
            BigReal::one(prec)
        );
        let e = exp_formula(&x, &y, prec).unwrap();
        assert!((&c - &e).abs().log2_abs() < -(prec as f64) / 2.0);
    }

    #[test]
    fn limit_region_is_enforced() {
        let p = 128;
        assert!(u_limit_series(&r("0.1", p), &r("0.2", p), p).is_err());
        assert!(u_limit_series(&r("-0.1", p), &r("1.2", p), p).is_err());
        assert!(theorem_numeric_check(&r("-0.2", p), &r("0.3", p), p, 6, &r("1e-6", 64)).is_err());
    }

    #[test]
    fn numeric_identity_small_parameters() {
        let prec = 192;
        let rep = theorem_numeric_check(&r("-0.1", prec), &r("0.1", prec), prec, 10, &r("1e-8", 64)).unwrap();
        assert!(rep.pass, "{rep:#?}");
        // the leading behaviour 1 - xy T(2)/2
        let (x, y) = (r("-1e-6", prec), r("1e-6", prec));
        let c = u_closed_form(&x, &y, prec).unwrap();
        let lead = &BigReal::one(prec) - &(&(&x * &y) * &t_depth1(2, prec).unwrap()).mul_pow2(-1);
        assert!((&c - &lead).abs().to_f64() < 1e-17);
    }

    #[test]
    fn height_one_at_zero_x() {
        let prec = 128;
        let y = r("0.2", prec);
        let rhs = height_one_rhs(&BigReal::zero(prec), &y, prec).unwrap();
        // Gamma ratio is 1 and F(1, 1-y; 1-y; -1) = 1/2
        assert!((&rhs - &BigReal::one(prec)).abs().log2_abs() < -120.0);
    }

    #[test]
    fn log_closed_form_within_tail() {
        let prec = 192;
        let rep = closed_form_log_check(&r("-0.3", prec), &r("0.2", prec), prec, 40).unwrap();
        assert!(rep.pass, "{rep:#?}");
    }
}
