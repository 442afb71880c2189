//! Riemann zeta at integers `n >= 2`.
//!
//! `zeta(n)` comes from the alternating series `eta(n) = sum (-1)^(m-1) m^-n`
//! summed with the Cohen, Rodriguez Villegas and Zagier weights, then
//! `zeta = eta / (1 - 2^(1-n))`. The weights do not depend on `n`, so a
//! whole table `zeta(2..=N)` costs one pass per `n` over the same `K` terms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{working_prec, BigReal};
use crate::error::{domain, Result};

/// Integer weights `c_k` and normaliser `d` with
/// `sum (-1)^k a_k ~= sum_k c_k a_k / d`, error below `2 * a_0 / 5.828^K`.
fn cvz_weights(terms: usize) -> (Vec<BigInt>, BigInt) {
    let n = terms as i64;
    // d = ((3 + sqrt 8)^n + (3 - sqrt 8)^n) / 2, an integer
    let (mut d_prev, mut d) = (BigInt::one(), BigInt::from(3));
    if n == 0 {
        d = BigInt::one();
    }
    for _ in 1..n {
        let next = &d * 6 - &d_prev;
        d_prev = std::mem::replace(&mut d, next);
    }
    let mut b = BigInt::from(-1);
    let mut c = -d.clone();
    let mut weights = Vec::with_capacity(terms);
    for k in 0..n {
        c = &b - &c;
        weights.push(c.clone());
        // b <- b (k+n)(k-n) / ((k+1/2)(k+1)), exact in integers
        let num = &b * (2 * (k + n) * (k - n));
        let den = BigInt::from((2 * k + 1) * (k + 1));
        let (q, r) = num.div_rem(&den);
        debug_assert!(r.is_zero());
        b = q;
    }
    (weights, d)
}

fn cvz_terms(wp: u32) -> usize {
    // log2(3 + sqrt 8) = 2.543
    ((wp as f64 + 4.0) / 2.543).ceil() as usize + 1
}

fn compute_table(max_n: u32, wp: u32) -> Vec<BigReal> {
    let terms = cvz_terms(wp);
    let (weights, d) = cvz_weights(terms);
    let d = BigReal::from_bigint(&d, wp);
    let weights: Vec<BigReal> = weights.iter().map(|c| BigReal::from_bigint(c, wp)).collect();
    let one = BigReal::one(wp);
    let inv: Vec<BigReal> = (1..=terms as i64).map(|m| &one / &BigReal::from_i64(m, wp)).collect();
    let mut powers: Vec<BigReal> = inv.iter().map(|x| x * x).collect();
    let mut table = vec![BigReal::zero(wp), BigReal::zero(wp)];
    for n in 2..=max_n {
        if n > 2 {
            for (p, x) in powers.iter_mut().zip(&inv) {
                *p = &*p * x;
            }
        }
        let mut s = BigReal::zero(wp);
        for (c, p) in weights.iter().zip(&powers) {
            s += c * p;
        }
        let eta = &s / &d;
        let scale = &one - &one.mul_pow2(1 - n as i64);
        table.push(&eta / &scale);
    }
    table
}

/// `zeta(0..=max_n)` at working precision `prec + GUARD_BITS`; entries 0 and
/// 1 are placeholders (zero). Tables are cached per precision.
pub fn zeta_table(max_n: u32, prec: u32) -> Arc<Vec<BigReal>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigReal>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let wp = working_prec(prec);
    if let Some(t) = cache.lock().expect("zeta cache poisoned").get(&prec) {
        if t.len() > max_n as usize {
            return Arc::clone(t);
        }
    }
    let table = Arc::new(compute_table(max_n.max(2), wp));
    let mut guard = cache.lock().expect("zeta cache poisoned");
    let entry = guard.entry(prec).or_insert_with(|| Arc::clone(&table));
    if entry.len() < table.len() {
        *entry = Arc::clone(&table);
    }
    Arc::clone(entry)
}

pub fn zeta(n: u32, prec: u32) -> Result<BigReal> {
    if n < 2 {
        return Err(domain(format!("zeta({n}) diverges; need n >= 2")));
    }
    Ok(zeta_table(n, prec)[n as usize].with_prec(prec))
}

/// Depth-one multiple T-value `T(n) = 2 (1 - 2^-n) zeta(n)`.
pub fn t_depth1(n: u32, prec: u32) -> Result<BigReal> {
    if n < 2 {
        return Err(domain(format!("T({n}) diverges; need n >= 2")));
    }
    let wp = working_prec(prec);
    let z = &zeta_table(n, prec)[n as usize];
    let one = BigReal::one(wp);
    let factor = (&one - &one.mul_pow2(-(n as i64))).mul_pow2(1);
    Ok((&factor * z).with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pi;

    #[test]
    fn weights_reproduce_known_eta() {
        // eta(1) = ln 2 through the same weights
        let wp = 128;
        let terms = cvz_terms(wp);
        let (w, d) = cvz_weights(terms);
        let d = BigReal::from_bigint(&d, wp);
        let mut s = BigReal::zero(wp);
        for (k, c) in w.iter().enumerate() {
            s += BigReal::from_bigint(c, wp) / BigReal::from_i64(k as i64 + 1, wp);
        }
        let eta1 = s / d;
        assert!((eta1.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn zeta_even_values_against_pi() {
        let prec = 256;
        let p = pi(prec + 40).unwrap();
        let z2 = zeta(2, prec).unwrap();
        let want = p.powi(2).div_int(6);
        assert!((&z2 - &want).abs().log2_abs() < -250.0);
        let z4 = zeta(4, prec).unwrap();
        let want = p.powi(4).div_int(90);
        assert!((&z4 - &want).abs().log2_abs() < -250.0);
    }

    #[test]
    fn zeta_large_argument() {
        let z = zeta(64, 128).unwrap();
        let one = BigReal::one(128);
        assert!(z > one);
        assert!(z < &one + &one.mul_pow2(-63));
    }

    #[test]
    fn zeta_decreases_to_one() {
        let prec = 128;
        let mut prev = zeta(2, prec).unwrap();
        for n in 3..=32 {
            let z = zeta(n, prec).unwrap();
            assert!(z < prev, "zeta({n}) not below zeta({})", n - 1);
            assert!(z > BigReal::one(prec));
            prev = z;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(zeta(1, 64).is_err());
        assert!(t_depth1(0, 64).is_err());
    }

    #[test]
    fn t_two_is_pi_squared_over_four() {
        let prec = 256;
        let t2 = t_depth1(2, prec).unwrap();
        let want = pi(prec + 40).unwrap().powi(2).div_int(4);
        assert!((&t2 - &want).abs().log2_abs() < -250.0);
        assert_eq!(t2.to_decimal(17), "2.4674011002723397");
    }
}
