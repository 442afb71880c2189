//! Numeric evaluation of `Ath(k; t)` inside the unit disk and of multiple
//! T-values.
//!
//! T-values use the involution `t -> (1-t)/(1+t)`, which fixes
//! `t0 = sqrt(2) - 1` and pulls `dt/t` back to `2 dt/(1-t^2)` and
//! `dt/(1-t^2)` back to `dt/(2t)` (signs cancel against the path reversal).
//! Splitting the iterated integral over `[0, 1]` at `t0` gives
//!
//! ```text
//! T(k) = 2^n sum_j I(w_1..w_j; t0) * 2^(#0 - #1 in w_(j+1)..w_r) * I(w*_1..w*_(r-j); t0)
//! ```
//!
//! where `w*` is `w` reversed with letters swapped. Every factor is a power
//! series at `t0 ~ 0.414`, so the value carries a rigorous truncation bound
//! rather than a heuristic extrapolation error.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use super::{apply_letter, word_of, Letter};
use crate::error::{domain, range, Error, Result};
use crate::indices::Index;
use crate::numerics::{accelerate_tail, working_prec, BigReal};

/// Largest weight the T-value engine accepts; it fixes the coefficient
/// bound `c_m <= m^(MAX_WEIGHT - 2)` used for the truncation order.
pub const MAX_WEIGHT: u32 = 32;

/// Largest `|t|` accepted by [`ath_eval`].
pub const MAX_RADIUS: f64 = 0.9;

/// Terms of the direct series used by [`t_value_tail_accelerated`].
const TAIL_TERMS: usize = 4096;
const TAIL_CANCELLATION_BITS: u32 = 192;

#[derive(Clone, Debug, PartialEq)]
pub struct TValue {
    pub value: BigReal,
    pub error_estimate: BigReal,
}

/// `log2` of an upper bound for `sum_{m > M} m^e rho^m`, or `None` while the
/// term ratio is not yet below one.
fn tail_log2(e: u32, log2_rho: f64, m: usize) -> Option<f64> {
    let next = (m + 1) as f64;
    let ratio_log2 = log2_rho + e as f64 * ((next + 1.0) / next).log2();
    if ratio_log2 >= -1e-3 {
        return None;
    }
    let ratio = ratio_log2.exp2();
    Some(e as f64 * next.log2() + next * log2_rho - (1.0 - ratio).log2())
}

/// Smallest order `M` whose truncation tail is below `2^-bits`.
fn truncation_order(depth: u32, log2_rho: f64, bits: u32) -> usize {
    let e = depth.saturating_sub(1);
    let mut m = depth.max(1) as usize;
    loop {
        if let Some(t) = tail_log2(e, log2_rho, m) {
            if t < -(bits as f64) {
                return m;
            }
        }
        m += if m < 64 { 1 } else { m / 32 };
    }
}

fn horner(coeffs: &[BigReal], t: &BigReal) -> BigReal {
    let mut acc = BigReal::zero(t.prec());
    for c in coeffs.iter().rev() {
        acc = &(&acc * t) + c;
    }
    acc
}

fn unit_series(len: usize, prec: u32) -> Vec<BigReal> {
    let mut c = vec![BigReal::zero(prec); len];
    c[0] = BigReal::one(prec);
    c
}

fn coefficients_of(word: &[Letter], len: usize, prec: u32) -> Vec<BigReal> {
    word.iter().fold(unit_series(len, prec), |c, &l| apply_letter(&c, l))
}

/// `Ath(idx; t)` for `|t| <= 0.9`, truncated where the bound
/// `sum_{m > M} m^(n-1) |t|^m` drops below `2^-prec`.
pub fn ath_eval(idx: &Index, t: &BigReal, prec: u32) -> Result<BigReal> {
    let radius = t.abs().to_f64();
    if radius > MAX_RADIUS {
        return Err(range(format!(
            "Ath evaluation needs |t| <= {MAX_RADIUS}, got {}",
            t.to_decimal(10)
        )));
    }
    if idx.is_empty() {
        return Ok(BigReal::one(prec));
    }
    if t.is_zero() {
        return Ok(BigReal::zero(prec));
    }
    let wp = working_prec(prec) + 16;
    let m = truncation_order(idx.depth(), radius.log2(), wp);
    let coeffs = coefficients_of(&word_of(idx), m + 1, wp);
    Ok(horner(&coeffs, &t.with_prec(wp)).with_prec(prec))
}

/// T-value evaluator at a fixed precision, memoizing the value of every word
/// prefix at the split point.
pub struct TValueEngine {
    prec: u32,
    wp: u32,
    order: usize,
    point: BigReal,
    /// bound on the absolute error of any memoized word value
    value_error: BigReal,
    words: RwLock<HashMap<Vec<Letter>, BigReal>>,
}

impl TValueEngine {
    pub fn new(prec: u32) -> Result<Self> {
        let wp = working_prec(prec) + 2 * MAX_WEIGHT;
        let one = BigReal::one(wp);
        let point = &BigReal::from_i64(2, wp).sqrt()? - &one;
        let tail_bits = wp + 8;
        let order = truncation_order(MAX_WEIGHT - 1, point.to_f64().log2(), tail_bits);
        // truncation plus accumulated rounding over (MAX_WEIGHT + 2) passes of
        // `order` operations, each a few ulps relative to coefficients <= 1
        let rounding = ((order as f64 + 1.0) * (MAX_WEIGHT as f64 + 2.0) * 4.0).log2();
        let err_bits = (wp as f64 - rounding).floor() as i64;
        let value_error = one.mul_pow2(-(tail_bits as i64)) + one.mul_pow2(-err_bits);
        Ok(TValueEngine {
            prec,
            wp,
            order,
            point,
            value_error: value_error.with_prec(64),
            words: RwLock::new(HashMap::new()),
        })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Series order used for every word.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cached_words(&self) -> usize {
        self.words.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    /// Values at the split point of all prefixes `w[..0], ..., w[..len]`.
    fn prefix_values(&self, word: &[Letter]) -> Vec<BigReal> {
        {
            let map = self.words.read().unwrap_or_else(|e| e.into_inner());
            let hits: Vec<BigReal> = (1..=word.len()).map_while(|j| map.get(&word[..j]).cloned()).collect();
            if hits.len() == word.len() {
                let mut out = vec![BigReal::one(self.wp)];
                out.extend(hits);
                return out;
            }
        }
        let mut out = vec![BigReal::one(self.wp)];
        let mut coeffs = unit_series(self.order + 1, self.wp);
        for &letter in word {
            coeffs = apply_letter(&coeffs, letter);
            out.push(horner(&coeffs, &self.point));
        }
        let mut map = self.words.write().unwrap_or_else(|e| e.into_inner());
        for j in 1..=word.len() {
            map.entry(word[..j].to_vec()).or_insert_with(|| out[j].clone());
        }
        out
    }

    pub fn t_value(&self, idx: &Index) -> Result<TValue> {
        if idx.is_empty() {
            return Err(domain("T-values are defined for non-empty admissible indices only"));
        }
        if !idx.is_admissible() {
            return Err(domain(format!(
                "{idx} is not admissible (last entry 1): the series diverges"
            )));
        }
        if idx.weight() > MAX_WEIGHT {
            return Err(Error::Unsupported(format!(
                "weight {} exceeds the supported maximum {MAX_WEIGHT}",
                idx.weight()
            )));
        }
        let word = word_of(idx);
        let dual: Vec<Letter> = word.iter().rev().map(|l| l.swapped()).collect();
        let fwd = self.prefix_values(&word);
        let bwd = self.prefix_values(&dual);
        let r = word.len();
        let mut sum = BigReal::zero(self.wp);
        let mut spread = BigReal::zero(64);
        let mut balance: i64 = 0; // #Zero - #One in word[j..]
        for j in (0..=r).rev() {
            if j < r {
                balance += if word[j] == Letter::Zero { 1 } else { -1 };
            }
            let term = (&fwd[j] * &bwd[r - j]).mul_pow2(balance);
            sum += &term;
            let weight = &(&fwd[j].abs() + &bwd[r - j].abs()).with_prec(64) + &self.value_error;
            spread += weight.mul_pow2(balance);
        }
        let depth = idx.depth() as i64;
        let error = (&spread * &self.value_error).mul_pow2(depth + 1);
        let rounding = BigReal::one(64).mul_pow2(-(self.prec as i64));
        let value = sum.mul_pow2(depth).with_prec(self.prec);
        let error_estimate = &error + &(&value.abs().with_prec(64) * &rounding);
        Ok(TValue { value, error_estimate })
    }
}

fn engine(prec: u32) -> Result<Arc<TValueEngine>> {
    static ENGINES: OnceLock<Mutex<HashMap<u32, Arc<TValueEngine>>>> = OnceLock::new();
    let engines = ENGINES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = engines.lock().unwrap_or_else(|e| e.into_inner()).get(&prec) {
        return Ok(e.clone());
    }
    let fresh = Arc::new(TValueEngine::new(prec)?);
    let mut map = engines.lock().unwrap_or_else(|e| e.into_inner());
    Ok(map.entry(prec).or_insert(fresh).clone())
}

/// `T(idx)` at `prec` bits with an error estimate, through the shared
/// engine for that precision.
pub fn t_value(idx: &Index, prec: u32) -> Result<TValue> {
    engine(prec)?.t_value(idx)
}

/// `T(idx)` by Levin-accelerating the partial sums of the series at `t = 1`
/// (terms up to `t^4096`). Kept as a cross-check: logarithmic factors in
/// the tail of higher-depth series limit it to roughly five to ten digits,
/// and its error estimate is heuristic.
pub fn t_value_tail_accelerated(idx: &Index, prec: u32) -> Result<TValue> {
    if idx.is_empty() || !idx.is_admissible() {
        return Err(domain(format!("{idx} is not a non-empty admissible index")));
    }
    // a high-order transform this far out cancels about 2^160 in magnitude
    let wp = working_prec(prec) + TAIL_CANCELLATION_BITS;
    let coeffs = coefficients_of(&word_of(idx), TAIL_TERMS + 1, wp);
    let parity = idx.depth() as usize % 2;
    let mut acc = BigReal::zero(wp);
    let mut sums = Vec::with_capacity(TAIL_TERMS / 2);
    for (m, c) in coeffs.iter().enumerate().skip(idx.depth() as usize) {
        if m % 2 == parity {
            acc += c;
            sums.push(acc.clone());
        }
    }
    let (limit, err) = accelerate_tail(&sums)?;
    let depth = idx.depth() as i64;
    Ok(TValue {
        value: limit.mul_pow2(depth).with_prec(prec),
        error_estimate: err.mul_pow2(depth).with_prec(64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ln2, pi, t_depth1};

    fn idx(s: &str) -> Index {
        s.parse().unwrap()
    }

    #[test]
    fn truncation_orders_grow_with_depth() {
        let a = truncation_order(1, -1.0, 256);
        let b = truncation_order(6, -1.0, 256);
        assert!((256..270).contains(&a), "{a}");
        assert!(b > a);
    }

    #[test]
    fn arctanh_one_half() {
        let prec = 256;
        let half = BigReal::one(prec).mul_pow2(-1);
        let v = ath_eval(&idx("(1)"), &half, prec).unwrap();
        // arctanh(1/2) = ln(3)/2 = (ln 2 + ln(3/2))/2, ln(3/2) = 2 atanh(1/5)
        let wp = prec + 40;
        let fifth = &BigReal::one(wp) / &BigReal::from_i64(5, wp);
        let want = (&ln2(wp).unwrap() + &crate::numerics::atanh_series(&fifth).mul_pow2(1)).mul_pow2(-1);
        assert!((&v - &want).abs().log2_abs() < -250.0);
    }

    #[test]
    fn depth_one_weight_two_at_half() {
        let prec = 200;
        let half = BigReal::one(prec).mul_pow2(-1);
        let v = ath_eval(&idx("(2)"), &half, prec).unwrap();
        let mut want = BigReal::zero(prec + 40);
        for m in (1..400i64).step_by(2) {
            want += BigReal::one(prec + 40).mul_pow2(-m).div_int(m * m);
        }
        assert!((&v - &want).abs().log2_abs() < -195.0);
    }

    #[test]
    fn ath_eval_edge_cases() {
        let t = BigReal::parse("0.3", 64).unwrap();
        assert_eq!(ath_eval(&Index::empty(), &t, 64).unwrap(), BigReal::one(64));
        let far = BigReal::parse("0.95", 64).unwrap();
        assert!(matches!(ath_eval(&idx("(2)"), &far, 64), Err(Error::Range(_))));
        let neg = BigReal::parse("-0.5", 128).unwrap();
        let pos = BigReal::parse("0.5", 128).unwrap();
        // depth 2: only even powers, so the function is even
        assert_eq!(
            ath_eval(&idx("(1,2)"), &neg, 128).unwrap(),
            ath_eval(&idx("(1,2)"), &pos, 128).unwrap()
        );
    }

    #[test]
    fn t_of_two_is_pi_squared_over_four() {
        let prec = 256;
        let tv = t_value(&idx("(2)"), prec).unwrap();
        let want = pi(prec).unwrap().powi(2).mul_pow2(-2);
        let dev = (&tv.value - &want).abs();
        assert!(dev.log2_abs() < -250.0);
        assert!(tv.error_estimate.log2_abs() < -200.0);
    }

    #[test]
    fn depth_one_agrees_with_zeta() {
        let prec = 256;
        for k in 2..=10 {
            let tv = t_value(&Index::new(vec![k]).unwrap(), prec).unwrap();
            let want = t_depth1(k, prec).unwrap();
            let dev = (&tv.value - &want).abs();
            assert!(dev.log2_abs() < -240.0, "k = {k}: {dev:?}");
            assert!(dev <= tv.error_estimate.clone().max(BigReal::one(64).mul_pow2(-250)));
        }
    }

    #[test]
    fn duality_special_case() {
        let prec = 192;
        for n in 1..=5usize {
            let tv = t_value(&Index::ones_then(n - 1, 2).unwrap(), prec).unwrap();
            let want = t_depth1(n as u32 + 1, prec).unwrap();
            assert!((&tv.value - &want).abs().log2_abs() < -180.0, "n = {n}");
        }
    }

    #[test]
    fn t_value_rejects_bad_indices() {
        assert!(matches!(t_value(&Index::empty(), 64), Err(Error::Domain(_))));
        assert!(matches!(t_value(&idx("(2,1)"), 64), Err(Error::Domain(_))));
        let heavy = Index::new(vec![MAX_WEIGHT + 1]).unwrap();
        assert!(matches!(t_value(&heavy, 64), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tail_acceleration_is_a_rough_cross_check() {
        let prec = 128;
        for s in ["(2)", "(3)", "(1,2)", "(2,3)"] {
            let i = idx(s);
            let split = t_value(&i, prec).unwrap().value;
            let tail = t_value_tail_accelerated(&i, prec).unwrap().value;
            assert!((&split - &tail).abs().to_f64() < 1e-4, "{s}");
        }
    }

    #[test]
    fn ath_is_bounded_on_the_half_disk() {
        let prec = 96;
        let two = BigReal::from_i64(2, prec);
        for t in ["0.5", "-0.5", "0.3"] {
            let t = BigReal::parse(t, prec).unwrap();
            for n in 1..=4u32 {
                let bound = t_value(&Index::new(vec![n + 1]).unwrap(), prec).unwrap().value;
                for k in n..=6 {
                    for i in crate::indices::enumerate_all_heights(k, n, false) {
                        let v = ath_eval(&i, &t, prec).unwrap().abs();
                        assert!(v <= bound && v <= two, "{i}");
                    }
                }
            }
        }
    }

    #[test]
    fn engine_memoizes_prefixes() {
        let e = TValueEngine::new(96).unwrap();
        let a = e.t_value(&idx("(1,3,2)")).unwrap();
        let n = e.cached_words();
        let b = e.t_value(&idx("(1,3,2)")).unwrap();
        assert_eq!(a, b);
        assert_eq!(n, e.cached_words());
    }
}
