//! Gamma function built on the single primitive
//! `Gamma(1 - t) = exp(gamma_E t + sum_{n>=2} zeta(n) t^n / n)`, `|t| <= 3/4`,
//! with other real arguments reduced to it through `Gamma(z + 1) = z Gamma(z)`.

use super::{euler_gamma, working_prec, zeta_table, BigReal};
use crate::error::{domain, range, Result};

const MAX_REDUCTION: i64 = 100_000;

/// Smallest `N` with `2 |t|^(N+1) / ((N+1)(1-|t|)) < 2^-bits`.
fn series_length(t_abs: f64, bits: u32) -> u32 {
    if t_abs == 0.0 {
        return 1;
    }
    let lt = t_abs.log2();
    let mut n = 2u32;
    loop {
        let bound = 1.0 + (n + 1) as f64 * lt - ((n + 1) as f64).log2() - (1.0 - t_abs).log2();
        if bound < -(bits as f64) {
            return n;
        }
        n += 1;
    }
}

/// `Gamma(1 - t)` for `|t| <= 3/4`.
pub fn gamma_one_minus(t: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = working_prec(prec);
    let limit = BigReal::from_i64(3, wp).mul_pow2(-2);
    if t.abs() > limit {
        return Err(range(format!(
            "Gamma(1 - t) series needs |t| <= 0.75, got t = {}; shift the argument with Gamma(z+1) = z Gamma(z)",
            t.to_decimal(10)
        )));
    }
    if t.is_zero() {
        return Ok(BigReal::one(prec));
    }
    let t = t.with_prec(wp);
    let n_max = series_length(t.abs().to_f64(), wp + 4);
    let zetas = zeta_table(n_max, prec);
    let mut exponent = &euler_gamma(wp)? * &t;
    let mut power = t.clone();
    for n in 2..=n_max {
        power = &power * &t;
        exponent += (&zetas[n as usize] * &power).div_int(n as i64);
    }
    Ok(exponent.exp().with_prec(prec))
}

/// Rising factorial `(a)_m = a (a+1) ... (a+m-1)`.
pub fn pochhammer(a: &BigReal, m: u64) -> BigReal {
    let mut acc = BigReal::one(a.prec());
    let mut x = a.clone();
    for _ in 0..m {
        acc = &acc * &x;
        x += BigReal::one(a.prec());
    }
    acc
}

fn nearest_integer(z: &BigReal) -> Option<i64> {
    let f = z.to_f64();
    if !f.is_finite() || f.abs() > 1e15 {
        return None;
    }
    let r = f.round();
    (BigReal::from_i64(r as i64, z.prec()) == *z).then_some(r as i64)
}

/// Real Gamma function away from its poles.
pub fn gamma(z: &BigReal, prec: u32) -> Result<BigReal> {
    if let Some(n) = nearest_integer(z) {
        if n <= 0 {
            return Err(domain(format!("Gamma has a pole at {n}")));
        }
    }
    let wp = working_prec(prec) + 16;
    let z = z.with_prec(wp);
    // shift so that w = z - shift lies in [1/2, 3/2), i.e. t = 1 - w in (-1/2, 1/2]
    let shift = (z.to_f64() - 0.5).floor() as i64;
    if shift.abs() > MAX_REDUCTION {
        return Err(range(format!(
            "Gamma argument {} too far from the origin",
            z.to_decimal(10)
        )));
    }
    let one = BigReal::one(wp);
    let w = &z - &BigReal::from_i64(shift, wp);
    let base = gamma_one_minus(&(&one - &w), wp)?;
    let mut factor = BigReal::one(wp);
    if shift > 0 {
        for j in 1..=shift {
            factor = &factor * &(&z - &BigReal::from_i64(j, wp));
        }
        Ok((&base * &factor).with_prec(prec))
    } else {
        for j in 0..-shift {
            factor = &factor * &(&z + &BigReal::from_i64(j, wp));
        }
        Ok((&base / &factor).with_prec(prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pi;

    fn close(a: &BigReal, b: &BigReal, bits: f64) -> bool {
        (a - b).abs().log2_abs() < -bits
    }

    #[test]
    fn gamma_one_at_zero() {
        assert_eq!(gamma_one_minus(&BigReal::zero(128), 128).unwrap(), BigReal::one(128));
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let prec = 256;
        let half = BigReal::one(prec).mul_pow2(-1);
        let g = gamma_one_minus(&half, prec).unwrap();
        let want = pi(prec + 40).unwrap().sqrt().unwrap();
        assert!(close(&g, &want, 245.0));
    }

    #[test]
    fn out_of_range_points_to_recurrence() {
        let err = gamma_one_minus(&BigReal::from_i64(-1, 64), 64).unwrap_err();
        assert!(err.to_string().contains("Gamma(z+1)"));
        // Gamma(2) = 1 through the recurrence
        let g2 = gamma(&BigReal::from_i64(2, 128), 128).unwrap();
        assert!(close(&g2, &BigReal::one(128), 120.0));
    }

    #[test]
    fn recurrence_consistency() {
        let prec = 192;
        for k in -10..=10 {
            let t = BigReal::from_i64(k, prec).div_int(20);
            let one = BigReal::one(prec);
            let lhs = gamma(&(&BigReal::from_i64(2, prec) - &t), prec).unwrap();
            let rhs = &(&one - &t) * &gamma_one_minus(&t, prec).unwrap();
            assert!(close(&lhs, &rhs, 180.0), "t = {k}/20");
        }
    }

    #[test]
    fn gamma_values() {
        let prec = 128;
        let g5 = gamma(&BigReal::from_i64(5, prec), prec).unwrap();
        assert!(close(&g5, &BigReal::from_i64(24, prec), 118.0));
        let mhalf = BigReal::from_i64(-1, prec).mul_pow2(-1);
        // Gamma(-1/2) = -2 sqrt(pi)
        let want = -pi(prec + 40).unwrap().sqrt().unwrap().mul_int(2);
        assert!(close(&gamma(&mhalf, prec).unwrap(), &want, 120.0));
        assert!(gamma(&BigReal::from_i64(-3, prec), prec).is_err());
        assert!(gamma(&BigReal::zero(prec), prec).is_err());
    }

    #[test]
    fn pochhammer_cases() {
        let a = BigReal::from_i64(7, 64);
        assert_eq!(pochhammer(&a, 0), BigReal::one(64));
        assert_eq!(pochhammer(&BigReal::one(64), 5), BigReal::from_i64(120, 64));
        let half = BigReal::one(64).mul_pow2(-1);
        assert_eq!(pochhammer(&half, 2), BigReal::from_i64(3, 64).mul_pow2(-2));
    }
}
