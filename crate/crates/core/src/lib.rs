pub mod error;
pub mod genfun;
pub mod harness;
pub mod indices;
pub mod numerics;
pub mod ode;
pub mod report;
pub mod tvalues;

pub use error::{Error, Result};
pub use indices::Index;
pub use report::VerificationReport;
