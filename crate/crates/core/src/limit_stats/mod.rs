//! Monte Carlo checks of the limit laws for `P_n`: frequencies, the variance
//! series for `sigma_f^2`, the central limit theorem, iterated-logarithm
//! traces and restricted mixing coefficients.

mod clt;
mod mixing;
mod sampler;
mod sigma;
mod szusz;
mod test_function;

pub use clt::{
    clt_check, clt_from_sums, cross_ks, empirical_variance, lil_checkpoints, lil_trace, normalized,
    pn_sums, variance_from_sums, CltMode, CltReport, LilRow, VarianceEstimate,
};
pub use mixing::{mixing_lower_bound, MixingEstimate};
pub use sampler::{MonteCarlo, StatReport};
pub use sigma::{sigma_f, SeriesTerm, SigmaConfig, SigmaEstimate, TermMethod, SIGMA_GROUP_CAP};
pub use szusz::{szusz_frequencies, SzuszCell, SzuszReport, SzuszTarget, SZUSZ_BUDGET, SZUSZ_THRESHOLD};
pub use test_function::{e_f, TestFunction};
