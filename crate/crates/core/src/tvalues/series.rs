//! Exact power series of `Ath`, `G` and `G_0`, and the derivative checks.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{apply_letter, Letter};
use crate::error::{domain, Result};
use crate::indices::{enumerate, Index};
use crate::numerics::BigReal;
use crate::report::{ReportBuilder, VerificationReport};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Truncated series `sum_{m <= M} c_m t^m` of `Ath(index; t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AthSeries {
    pub index: Index,
    pub coeffs: Vec<BigRational>,
}

impl AthSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Memo of exact series keyed by `(index, M)`. Lookups and inserts are
/// thread safe; an entry, once inserted, never changes.
#[derive(Default)]
pub struct AthCache {
    map: RwLock<HashMap<(Index, usize), Arc<AthSeries>>>,
}

impl AthCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lookup(&self, key: &(Index, usize)) -> Option<Arc<AthSeries>> {
        self.map.read().unwrap_or_else(|e| e.into_inner()).get(key).cloned()
    }

    fn insert(&self, key: (Index, usize), value: AthSeries) -> Arc<AthSeries> {
        let mut map = self.map.write().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_insert_with(|| Arc::new(value)).clone()
    }

    /// Exact coefficients `c_0..=c_M` from the derivative recurrences.
    pub fn series(&self, idx: &Index, m_max: usize) -> Result<Arc<AthSeries>> {
        if m_max < idx.depth() as usize {
            return Err(domain(format!(
                "series order {m_max} is below the depth {} of {idx}",
                idx.depth()
            )));
        }
        self.series_unchecked(idx, m_max)
    }

    fn series_unchecked(&self, idx: &Index, m_max: usize) -> Result<Arc<AthSeries>> {
        let key = (idx.clone(), m_max);
        if let Some(hit) = self.lookup(&key) {
            return Ok(hit);
        }
        let coeffs = if idx.is_empty() {
            let mut c = vec![BigRational::zero(); m_max + 1];
            c[0] = BigRational::one();
            c
        } else if let Some(lower) = idx.lowered() {
            // k_n >= 2: m c_m(k) = c_m(k_1, ..., k_n - 1)
            apply_letter(&self.series_unchecked(&lower, m_max)?.coeffs, Letter::Zero)
        } else {
            // k_n = 1: m c_m(k) = sum over j <= m-1 of the parity of m-1
            apply_letter(&self.series_unchecked(&idx.prefix(), m_max)?.coeffs, Letter::One)
        };
        Ok(self.insert(
            key,
            AthSeries {
                index: idx.clone(),
                coeffs,
            },
        ))
    }
}

fn global_cache() -> &'static AthCache {
    static CACHE: OnceLock<AthCache> = OnceLock::new();
    CACHE.get_or_init(AthCache::new)
}

/// Exact `Ath` series to order `M`, memoized process-wide.
pub fn ath_series(idx: &Index, m_max: usize) -> Result<Arc<AthSeries>> {
    global_cache().series(idx, m_max)
}

/// Exact `Ath` series straight from the nested-sum definition
/// `sum_{m_1 < ... < m_n, m_i = i mod 2} t^(m_n) / prod m_i^(k_i)`,
/// independent of the recurrences.
pub fn ath_series_nested(idx: &Index, m_max: usize) -> Result<AthSeries> {
    if m_max < idx.depth() as usize {
        return Err(domain(format!(
            "series order {m_max} is below the depth {} of {idx}",
            idx.depth()
        )));
    }
    let mut level = vec![BigRational::zero(); m_max + 1];
    level[0] = BigRational::one();
    for (i, &k) in idx.parts().iter().enumerate() {
        // level[m] = [m = i+1 mod 2] / m^k * sum_{m' < m} previous[m']
        let parity = (i + 1) % 2;
        let mut below = BigRational::zero();
        let mut next = vec![BigRational::zero(); m_max + 1];
        for m in 0..=m_max {
            if m >= 1 && m % 2 == parity && !below.is_zero() {
                let denom = BigInt::from(m as u64).pow(k);
                next[m] = &below / BigRational::from_integer(denom);
            }
            below += &level[m];
        }
        level = next;
    }
    Ok(AthSeries {
        index: idx.clone(),
        coeffs: level,
    })
}

/// Series of `G(k, n, s; t)` (all indices) or `G_0(k, n, s; t)`
/// (admissible only).
#[derive(Clone, Debug, PartialEq)]
pub struct GSeries {
    pub k: i64,
    pub n: i64,
    pub s: i64,
    pub admissible_only: bool,
    pub coeffs: Vec<BigRational>,
}

/// `2^n` times the sum of the member `Ath` series; for `n = 0` the
/// convention `G(k, 0, s; t) = 1` if `(k, s) = (0, 0)` and `0` otherwise.
/// Negative parameters give the zero series.
pub fn g_series(k: i64, n: i64, s: i64, admissible_only: bool, m_max: usize) -> Result<GSeries> {
    let mut coeffs = vec![BigRational::zero(); m_max + 1];
    if n == 0 {
        if k == 0 && s == 0 {
            coeffs[0] = BigRational::one();
        }
    } else if k >= 0 && n > 0 && s >= 0 {
        if m_max < n as usize {
            return Err(domain(format!("series order {m_max} is below n = {n}")));
        }
        let scale = q(1 << n.min(62));
        for idx in enumerate(k as u32, n as u32, s as u32, admissible_only) {
            let series = ath_series(&idx, m_max)?;
            for (acc, c) in coeffs.iter_mut().zip(&series.coeffs) {
                *acc += c * &scale;
            }
        }
    }
    Ok(GSeries {
        k,
        n,
        s,
        admissible_only,
        coeffs,
    })
}

fn derivative(c: &[BigRational]) -> Vec<BigRational> {
    c.iter().enumerate().skip(1).map(|(m, v)| v * q(m as i64)).collect()
}

fn add(a: &[BigRational], b: &[BigRational], sign: i64) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x + y * q(sign)).collect()
}

/// Multiplies by `1/(1 - t^2) = sum_i t^(2i)`, keeping the input length.
fn over_one_minus_t2(c: &[BigRational]) -> Vec<BigRational> {
    let mut out = c.to_vec();
    for m in 2..out.len() {
        let prev = out[m - 2].clone();
        out[m] += prev;
    }
    out
}

/// Divides by `t`; the constant term must vanish.
fn over_t(c: &[BigRational]) -> Option<Vec<BigRational>> {
    c[0].is_zero().then(|| c[1..].to_vec())
}

/// Checks both derivative identities for `G_0` and `G - G_0`, exactly and
/// coefficientwise through order `M - 2`.
pub fn check_diffg(k: i64, n: i64, s: i64, m_max: usize) -> Result<VerificationReport> {
    if m_max < (n.max(0) as usize) + 2 {
        return Err(domain(format!("order {m_max} must be at least n + 2 = {}", n + 2)));
    }
    let mut report = ReportBuilder::new("diffG")
        .param("k", k)
        .param("n", n)
        .param("s", s)
        .param("M", m_max);
    let upto = m_max - 1; // compare orders 0..=M-2
    let g = |k, n, s, adm| g_series(k, n, s, adm, m_max).map(|g| g.coeffs);

    // d/dt G_0(k,n,s) = (G_0(k-1,n,s) + G(k-1,n,s-1) - G_0(k-1,n,s-1)) / t
    let lhs = derivative(&g(k, n, s, true)?);
    let inner = add(
        &add(&g(k - 1, n, s, true)?, &g(k - 1, n, s - 1, false)?, 1),
        &g(k - 1, n, s - 1, true)?,
        -1,
    );
    match over_t(&inner) {
        Some(rhs) => report.exact_series("d/dt G0 = (G0 + G - G0)/t", &lhs[..upto], &rhs[..upto]),
        None => report.raw(
            "d/dt G0 = (G0 + G - G0)/t",
            "regular at t = 0".into(),
            format!("nonzero constant term {}", inner[0]),
            &BigReal::one(64),
            &BigReal::zero(64),
        ),
    }

    // d/dt (G - G_0)(k,n,s) = 2/(1-t^2) G(k-1,n-1,s)
    let lhs = derivative(&add(&g(k, n, s, false)?, &g(k, n, s, true)?, -1));
    let rhs: Vec<BigRational> = over_one_minus_t2(&g(k - 1, n - 1, s, false)?)
        .into_iter()
        .map(|c| c * q(2))
        .collect();
    report.exact_series("d/dt (G - G0) = 2 G/(1-t^2)", &lhs[..upto], &rhs[..upto]);
    Ok(report.finish(&BigReal::zero(64)))
}

/// Checks the derivative identity of `Ath(idx)` with both sides built from
/// the nested-sum definition, and the recurrence series against the
/// definition, through order `M - 1`.
pub fn check_ath_recursion(idx: &Index, m_max: usize) -> Result<VerificationReport> {
    if idx.is_empty() {
        return Err(domain("the derivative identity needs a non-empty index"));
    }
    let mut report = ReportBuilder::new("Ath derivative")
        .param("index", idx)
        .param("M", m_max);
    let own = ath_series_nested(idx, m_max)?;
    let lhs = derivative(&own.coeffs);
    let (label, rhs) = match idx.lowered() {
        Some(lower) => {
            let below = ath_series_nested(&lower, m_max)?;
            let rhs = over_t(&below.coeffs).ok_or_else(|| domain("lowered series has a constant term"))?;
            ("d/dt Ath(k) = Ath(k_n - 1)/t", rhs)
        }
        None => {
            let prefix = ath_series_nested(&idx.prefix(), m_max)?;
            let mut rhs = over_one_minus_t2(&prefix.coeffs);
            rhs.pop();
            ("d/dt Ath(k) = Ath(prefix)/(1-t^2)", rhs)
        }
    };
    report.exact_series(label, &lhs, &rhs);
    let recurrence = ath_series(idx, m_max)?;
    report.exact_series("recurrence vs nested sums", &recurrence.coeffs, &own.coeffs);
    Ok(report.finish(&BigReal::zero(64)))
}
