//! Birkhoff sums of the rotation by `alpha`, their extremes, the
//! Rocadas-Schoissengeier formula, extreme discrepancy and the stable and
//! Cauchy limit laws.

mod birkhoff;
mod extreme;
mod rs;
mod sim;
mod stable;

use num_rational::BigRational;
use num_traits::ToPrimitive;

pub use birkhoff::{
    birkhoff_sum, brute_maxmin, brute_maxmin_prefixes, brute_maxmin_words, BirkhoffConfig, LocalSum, MaxMin, RationalR, Scan,
    BRUTE_BUDGET,
};
pub use extreme::extreme_discrepancy;
pub use rs::{rs_maxmin, RsEstimate};
pub use sim::{
    cauchy_limit_sim, centering, dn_ratio_trend, maxmin_limit_sim, rs_check, CauchyReport, CauchyRow, CauchySample,
    DnRow, DnTrend, MaxMinReport, MaxMinSample, RsCheckReport, RsRow, PURPOSE_CAUCHY, PURPOSE_DN, PURPOSE_MAXMIN,
    PURPOSE_RS, PURPOSE_STABLE, SIGMA_KESTEN,
};
pub use stable::{stable_cdf, stable_cdf_with, stable_sample, Resolution, StableLaw, X_ASYMPTOTIC};

pub(crate) fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
