//! Continued-fraction expansion of sampled reals, with only provably valid
//! partial quotients, and the convergent recursions in full precision and
//! modulo `m`.

mod convergents;
mod dyadic;
mod euclid;
mod expand;
mod sample;

pub use convergents::{convergent_stream, pn_stream, ConvergentState, PnState};
pub use dyadic::DyadicInterval;
pub use euclid::QuotientStream;
pub use expand::{
    expand_interval, expand_interval_limited, expand_rational, expand_rational_u64, CFExpansion,
};
pub use sample::{
    bits_for_quotients, gauss_trial, law_by_name, sample_alpha, trusted_sample, DensityLaw, Gauss,
    SamplingLaw, TrustedSample, Uniform, DEFAULT_BITS, LAW_NAMES, MIN_BITS,
};
