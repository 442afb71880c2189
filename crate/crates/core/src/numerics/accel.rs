//! Levin u-transform for slowly convergent sequences of partial sums.
//!
//! With terms `a_n = s_n - s_(n-1)` and remainder estimates
//! `w_n = (n + 1) a_n`, the order-`k` transform started at `n` is
//!
//! ```text
//!          sum_j (-1)^j C(k,j) (n+j+1)^(k-1) s_(n+j) / w_(n+j)
//! L_k(n) = ---------------------------------------------------
//!          sum_j (-1)^j C(k,j) (n+j+1)^(k-1)         / w_(n+j)
//! ```
//!
//! The common factor `(n+k+1)^(k-1)` cancels, so the weights are exact
//! integers. The transform is exact for remainders of the form
//! `w_n * P_(k-1)(1/(n+1))`, which covers power-law tails with an asymptotic
//! expansion in `1/n` (hypergeometric series at unit argument). It does not
//! handle logarithmically decorated tails well.

use num_bigint::BigInt;
use num_traits::One;

use super::BigReal;
use crate::error::{domain, range, Result};

/// Minimum number of partial sums [`accelerate_tail`] accepts.
pub const MIN_PARTIAL_SUMS: usize = 8;

/// Cap on the transform order used by [`accelerate_tail`].
pub const MAX_TAIL_ORDER: usize = 24;

fn binomial_row(k: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for j in 0..k {
        let next = &row[j] * (k - j) / (j + 1);
        row.push(next);
    }
    row
}

/// Order-`k` Levin u-transform of `sums[start..=start+k]`, where `terms[i]`
/// is the increment that produced `sums[i]`. `None` when a remainder
/// estimate in the window vanishes.
pub fn levin_u(sums: &[BigReal], terms: &[BigReal], start: usize, k: usize) -> Option<BigReal> {
    if start + k >= sums.len() || start + k >= terms.len() {
        return None;
    }
    let prec = sums[start + k].prec();
    let binom = binomial_row(k);
    let mut num = BigReal::zero(prec);
    let mut den = BigReal::zero(prec);
    for (j, c) in binom.iter().enumerate() {
        let n = start + j;
        if terms[n].is_zero() {
            return None;
        }
        let base = BigInt::from(n as u64 + 1);
        let mut w = c * num_traits::pow(base, k.saturating_sub(1));
        if j % 2 == 1 {
            w = -w;
        }
        let omega = terms[n].mul_int(n as i64 + 1);
        let weight = &BigReal::from_bigint(&w, prec) / &omega;
        num += &weight * &sums[n];
        den += &weight;
    }
    if den.is_zero() {
        return None;
    }
    Some(&num / &den)
}

/// Extrapolates the limit of a convergent sequence of partial sums.
///
/// Uses the order `min(24, len / 3)` transform over the last entries. The
/// returned error estimate is `|L_k - L_(k-1)|`, a heuristic, not a bound.
pub fn accelerate_tail(partial_sums: &[BigReal]) -> Result<(BigReal, BigReal)> {
    let len = partial_sums.len();
    if len < MIN_PARTIAL_SUMS {
        return Err(domain(format!(
            "accelerate_tail needs at least {MIN_PARTIAL_SUMS} partial sums, got {len}"
        )));
    }
    let prec = partial_sums.iter().map(BigReal::prec).max().unwrap_or(64);
    let sums: Vec<BigReal> = partial_sums.iter().map(|s| s.with_prec(prec)).collect();
    let mut terms = Vec::with_capacity(len);
    terms.push(sums[0].clone());
    for w in sums.windows(2) {
        terms.push(&w[1] - &w[0]);
    }
    let k = MAX_TAIL_ORDER.min(len / 3);
    let start = len - 1 - k;
    if terms[start..].iter().all(BigReal::is_zero) {
        return Ok((sums[len - 1].clone(), BigReal::zero(prec)));
    }
    let hi = levin_u(&sums, &terms, start, k);
    let lo = levin_u(&sums, &terms, start, k - 1);
    match (hi, lo) {
        (Some(hi), Some(lo)) => {
            let err = (&hi - &lo).abs();
            Ok((hi, err))
        }
        _ => Err(range("vanishing term inside the acceleration window")),
    }
}

/// Sums `terms` (already computed at a working precision comfortably above
/// `target_bits`) by raising the Levin order until two consecutive order
/// steps agree to `2^-target_bits` relative. Returns the estimate and the
/// last step difference.
pub fn sum_accelerated(terms: &[BigReal], target_bits: u32) -> Result<(BigReal, BigReal)> {
    const START: usize = 8;
    const STEP: usize = 4;
    if terms.len() < START + 2 * STEP + 2 {
        return Err(domain("too few terms for accelerated summation"));
    }
    let mut sums = Vec::with_capacity(terms.len());
    let mut acc = BigReal::zero(terms[0].prec());
    for t in terms {
        acc += t;
        sums.push(acc.clone());
    }
    let max_order = terms.len() - START - 1;
    let mut prev: Option<BigReal> = None;
    let mut agreed = 0;
    let mut last_diff = None;
    let mut k = STEP;
    while k <= max_order {
        let est =
            levin_u(&sums, terms, START, k).ok_or_else(|| range("vanishing term inside the acceleration window"))?;
        if let Some(p) = &prev {
            let diff = (&est - p).abs();
            let scale = est.abs().log2_abs().max(0.0);
            if diff.is_zero() || diff.log2_abs() < scale - target_bits as f64 {
                agreed += 1;
                if agreed >= 2 {
                    return Ok((est, diff));
                }
            } else {
                agreed = 0;
            }
            last_diff = Some(diff);
        }
        prev = Some(est);
        k += STEP;
    }
    Err(range(format!(
        "accelerated summation did not settle to 2^-{target_bits} (last step {})",
        last_diff.map_or_else(|| "n/a".into(), |d| d.to_scientific(3))
    )))
}
