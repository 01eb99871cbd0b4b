//! Kesten's kernel and the constants of the ergodic-sum limit theorems.

mod constants;
mod kernel;

pub use constants::{
    constants_table, f_exact, identity_sixth, sigma_kesten, sigma_prime, sigma_prime_integral, theta_and_c,
    ConstantRow, KestenR, KestenSigma, SigmaPrime, ThetaValue,
};
pub use kernel::{
    bernoulli_b, bernoulli_series, f_of_u, frac, inner_abs_integral, v_kernel, FMode, KernelMode,
    MIN_QUADRATURE_PANELS,
};
