//! Gauss hypergeometric function `F(a, b; c; t)` for real arguments with
//! `-1 <= t <= 1`.
//!
//! * terminating series (`a` or `b` a non-positive integer): summed exactly;
//! * `-1 <= t < -1/2`: Pfaff transform `(1-t)^-a F(a, c-b; c; t/(t-1))`,
//!   which also gives the analytic value at `t = -1` when the series itself
//!   oscillates without converging;
//! * `-1/2 <= t < 1`: direct summation with a ratio-based tail bound;
//! * `t = 1`: requires `c - a - b >= 1/4`; the series is summed with the
//!   adaptive Levin accelerator.

use super::{sum_accelerated, working_prec, BigReal};
use crate::error::{domain, range, Result};

const MAX_DIRECT_TERMS: usize = 2_000_000;
const UNIT_TERMS: usize = 180;

fn nonpositive_integer(v: &BigReal) -> Option<u64> {
    let f = v.to_f64();
    if f > 0.5 || f.abs() > 1e12 {
        return None;
    }
    let r = f.round();
    (BigReal::from_i64(r as i64, v.prec()) == *v).then_some((-r) as u64)
}

fn term_ratio(a: &BigReal, b: &BigReal, c: &BigReal, n: i64) -> BigReal {
    let wp = a.prec();
    let nn = BigReal::from_i64(n, wp);
    (&(a + &nn) * &(b + &nn)) / (&(c + &nn) * &BigReal::from_i64(n + 1, wp))
}

fn terminating(a: &BigReal, b: &BigReal, c: &BigReal, t: &BigReal, degree: u64) -> BigReal {
    let mut term = BigReal::one(a.prec());
    let mut sum = term.clone();
    for n in 0..degree as i64 {
        term = &(&term * &term_ratio(a, b, c, n)) * t;
        sum += &term;
    }
    sum
}

fn direct(a: &BigReal, b: &BigReal, c: &BigReal, t: &BigReal, wp: u32) -> Result<BigReal> {
    let t_abs = t.abs().to_f64();
    let size = a.abs().to_f64() + b.abs().to_f64() + c.abs().to_f64();
    let mut term = BigReal::one(wp);
    let mut sum = term.clone();
    for n in 0..MAX_DIRECT_TERMS as i64 {
        term = &(&term * &term_ratio(a, b, c, n)) * t;
        sum += &term;
        let nf = (n + 1) as f64;
        if nf > 2.0 * size + 4.0 {
            // for later terms |ratio| <= |t| (1 + |a|/n)(1 + |b|/n) / (1 - |c|/n)
            let q =
                t_abs * (1.0 + a.abs().to_f64() / nf) * (1.0 + b.abs().to_f64() / nf) / (1.0 - c.abs().to_f64() / nf);
            if q < 1.0 {
                let tail = term.log2_abs() + q.log2() - (1.0 - q).log2();
                if term.is_zero() || tail < -(wp as f64) - 4.0 {
                    return Ok(sum);
                }
            }
        }
    }
    Err(range("hypergeometric series converges too slowly at this argument"))
}

/// `F(a, b; c; t)` at precision `prec`.
pub fn hyp2f1(a: &BigReal, b: &BigReal, c: &BigReal, t: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = working_prec(prec);
    let (a, b, c, t) = (a.with_prec(wp), b.with_prec(wp), c.with_prec(wp), t.with_prec(wp));
    let one = BigReal::one(wp);
    let term_a = nonpositive_integer(&a);
    let term_b = nonpositive_integer(&b);
    let degree = match (term_a, term_b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    if let Some(cd) = nonpositive_integer(&c) {
        if degree.is_none_or(|d| d > cd) {
            return Err(domain(format!(
                "c = {} is a non-positive integer (pole of F)",
                c.to_decimal(10)
            )));
        }
    }
    if t.is_zero() {
        return Ok(BigReal::one(prec));
    }
    if let Some(d) = degree {
        return Ok(terminating(&a, &b, &c, &t, d).with_prec(prec));
    }
    if t.abs() > one {
        return Err(range("|t| > 1 needs analytic continuation, which is not implemented"));
    }
    if t == one {
        let excess = &(&c - &a) - &b;
        if !excess.is_positive() {
            return Err(range(format!(
                "F(a, b; c; 1) diverges: c - a - b = {} <= 0",
                excess.to_decimal(10)
            )));
        }
        if excess < one.mul_pow2(-2) {
            return Err(range(format!(
                "F(a, b; c; 1) with c - a - b = {} < 1/4 converges too slowly",
                excess.to_decimal(10)
            )));
        }
        return unit_argument(&a, &b, &c, prec);
    }
    if t < -one.mul_pow2(-1) {
        // Pfaff: F(a,b;c;t) = (1-t)^-a F(a, c-b; c; t/(t-1))
        let s = &one - &t;
        let z = &t / &(&t - &one);
        let cb = &c - &b;
        let inner = match nonpositive_integer(&cb) {
            Some(d) => terminating(&a, &cb, &c, &z, d),
            None => direct(&a, &cb, &c, &z, wp)?,
        };
        let prefactor = (-&a * &s.ln()?).exp();
        return Ok((&prefactor * &inner).with_prec(prec));
    }
    Ok(direct(&a, &b, &c, &t, wp)?.with_prec(prec))
}

fn unit_argument(a: &BigReal, b: &BigReal, c: &BigReal, prec: u32) -> Result<BigReal> {
    // Levin loses bits to cancellation; carry a generous internal margin
    let ip = 2 * prec + 64;
    let (a, b, c) = (a.with_prec(ip), b.with_prec(ip), c.with_prec(ip));
    let mut terms = Vec::with_capacity(UNIT_TERMS);
    let mut term = BigReal::one(ip);
    for n in 0..UNIT_TERMS as i64 {
        terms.push(term.clone());
        term = &term * &term_ratio(&a, &b, &c, n);
    }
    let (sum, _) = sum_accelerated(&terms, prec + 8)?;
    Ok(sum.with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{atanh_series, gamma};

    fn r(s: &str, prec: u32) -> BigReal {
        BigReal::parse(s, prec).unwrap()
    }

    #[test]
    fn zero_argument() {
        let v = hyp2f1(&r("0.3", 64), &r("-0.7", 64), &r("1.5", 64), &r("0", 64), 64).unwrap();
        assert_eq!(v, BigReal::one(64));
    }

    #[test]
    fn log_case_at_one_half() {
        // F(1,1;2;t) = -ln(1-t)/t, so F(1,1;2;1/2) = 2 ln 2
        let prec = 256;
        let v = hyp2f1(&r("1", prec), &r("1", prec), &r("2", prec), &r("1/2", prec), prec).unwrap();
        let one = BigReal::one(prec + 40);
        let ln2 = atanh_series(&(&one / &BigReal::from_i64(3, prec + 40))).mul_pow2(1);
        assert!((&v - &ln2.mul_int(2)).abs().log2_abs() < -245.0);
    }

    #[test]
    fn gauss_summation_point() {
        let prec = 192;
        let (a, b, c) = (r("-0.15", prec), r("-0.1", prec), r("1.125", prec));
        let v = hyp2f1(&a, &b, &c, &BigReal::one(prec), prec).unwrap();
        let g = |x: &BigReal| gamma(x, prec).unwrap();
        let want = &(&g(&c) * &g(&(&(&c - &a) - &b))) / &(&g(&(&c - &a)) * &g(&(&c - &b)));
        assert!((&v - &want).abs().log2_abs() < -(prec as f64) / 2.0);
    }

    #[test]
    fn terminating_polynomial() {
        // F(-2, b; c; t) = 1 - 2bt/c + b(b+1)t^2/(c(c+1))
        let prec = 128;
        let v = hyp2f1(&r("-2", prec), &r("3", prec), &r("4", prec), &r("1", prec), prec).unwrap();
        // 1 - 6/4 + 12/20 = 0.1
        assert!((&v - &r("0.1", prec)).abs().log2_abs() < -120.0);
    }

    #[test]
    fn minus_one_via_pfaff() {
        // F(1, b; b; t) = 1/(1-t); at t = -1 this is 1/2 though the series oscillates
        let prec = 128;
        let v = hyp2f1(&r("1", prec), &r("0.3", prec), &r("0.3", prec), &r("-1", prec), prec).unwrap();
        assert!((&v - &r("0.5", prec)).abs().log2_abs() < -120.0);
    }

    #[test]
    fn errors() {
        let p = 64;
        let one = BigReal::one(p);
        assert!(matches!(
            hyp2f1(&r("0.5", p), &r("0.5", p), &r("-2", p), &r("0.5", p), p),
            Err(crate::Error::Domain(_))
        ));
        assert!(matches!(
            hyp2f1(&r("0.5", p), &r("0.5", p), &r("1", p), &one, p),
            Err(crate::Error::Range(_))
        ));
        assert!(matches!(
            hyp2f1(&r("0.5", p), &r("0.5", p), &r("1.1", p), &one, p),
            Err(crate::Error::Range(_))
        ));
        assert!(hyp2f1(&one, &one, &one, &r("1.5", p), p).is_err());
    }
}
