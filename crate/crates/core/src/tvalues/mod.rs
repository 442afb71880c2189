//! Level-two multiple polylogarithms `Ath(k; t)` as power series, the
//! sums `G(k, n, s; t)` and `G_0(k, n, s; t)` over index sets, their
//! derivative identities, and multiple T-values.
//!
//! Coefficients satisfy, for `c_m = [t^m] Ath(k; t)`:
//!
//! * `k_n >= 2`: `m c_m(k) = c_m(k_1, ..., k_n - 1)`;
//! * `k_n = 1`:  `m c_m(k) = sum_{j <= m-1, j = m-1 mod 2} c_j(k_1, ..., k_(n-1))`;
//! * `Ath(empty; t) = 1`.

mod eval;
mod series;

pub use eval::{ath_eval, t_value, t_value_tail_accelerated, TValue, TValueEngine, MAX_RADIUS, MAX_WEIGHT};
pub use series::{
    ath_series, ath_series_nested, check_ath_recursion, check_diffg, g_series, AthCache, AthSeries, GSeries,
};

/// One letter of the iterated-integral word of an index: `Zero` integrates
/// against `dt/t`, `One` against `dt/(1-t^2)`. An index `(k_1, ..., k_n)`
/// reads, from the lower integration limit upward,
/// `One Zero^(k_1-1) One Zero^(k_2-1) ... One Zero^(k_n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Zero,
    One,
}

impl Letter {
    pub fn swapped(self) -> Letter {
        match self {
            Letter::Zero => Letter::One,
            Letter::One => Letter::Zero,
        }
    }
}

pub fn word_of(idx: &crate::indices::Index) -> Vec<Letter> {
    let mut w = Vec::with_capacity(idx.weight() as usize);
    for &k in idx.parts() {
        w.push(Letter::One);
        w.extend(std::iter::repeat_n(Letter::Zero, k as usize - 1));
    }
    w
}

/// Applies one integration letter to a coefficient vector (same length out).
pub(crate) fn apply_letter<S: crate::numerics::Scalar>(coeffs: &[S], letter: Letter) -> Vec<S> {
    let zero = coeffs[0].zero_like();
    let mut out = Vec::with_capacity(coeffs.len());
    out.push(zero.clone());
    match letter {
        Letter::Zero => {
            for (m, c) in coeffs.iter().enumerate().skip(1) {
                out.push(c.clone() / c.int_like(m as i64));
            }
        }
        Letter::One => {
            // running sums over even / odd positions
            let mut run = [zero.clone(), zero];
            for m in 1..coeffs.len() {
                let slot = (m - 1) % 2;
                run[slot] = run[slot].clone() + coeffs[m - 1].clone();
                out.push(run[slot].clone() / run[slot].int_like(m as i64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::Index;

    #[test]
    fn words() {
        let idx: Index = "(1,3,2)".parse().unwrap();
        use Letter::*;
        assert_eq!(word_of(&idx), vec![One, One, Zero, Zero, One, Zero]);
        assert!(word_of(&Index::empty()).is_empty());
    }
}
