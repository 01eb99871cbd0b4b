//! Continued-fraction convergents modulo `m`.
//!
//! Exact `SL(2, Z_m)` combinatorics, rigorous continued-fraction expansion of
//! sampled reals, Gauss-Kuzmin brackets and transfer-operator iteration,
//! Monte Carlo limit statistics for `P_n`, Kesten's normalising constants and
//! local discrepancy of Kronecker sequences.

pub mod arith;
pub mod cf;
pub mod discrepancy;
pub mod error;
pub mod gauss_kuzmin;
pub mod hp;
pub mod kesten;
pub mod limit_stats;
pub mod seeding;
pub mod stats;
pub mod zmod;

pub use error::{Error, Result};
