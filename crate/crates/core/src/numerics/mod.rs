//! Arbitrary-precision scalars and the special functions behind the analytic
//! side of the identities: zeta values, `Gamma(1 - t)`, the Gauss
//! hypergeometric series, Pochhammer symbols and a Levin-type accelerator.

mod accel;
mod bigreal;
mod constants;
mod gamma;
mod hyper;
mod scalar;
mod zeta;

pub use accel::{accelerate_tail, levin_u, sum_accelerated};
pub use bigreal::{euler_gamma, ln2, parse_rational, pi, BigReal, GUARD_BITS, MIN_PREC_BITS};
pub use constants::MAX_CONSTANT_BITS;
pub use gamma::{gamma, gamma_one_minus, pochhammer};
pub use hyper::hyp2f1;
pub use scalar::Scalar;
pub use zeta::{t_depth1, zeta, zeta_table};

#[cfg(test)]
pub(crate) use bigreal::atanh_series;

/// Working precision used internally for a caller precision.
pub fn working_prec(prec: u32) -> u32 {
    prec + GUARD_BITS
}
