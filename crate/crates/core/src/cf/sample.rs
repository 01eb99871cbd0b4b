//! Sampling laws for the random real `alpha`, selectable by name.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, RngCore};

use super::{expand_interval_limited, CFExpansion, DyadicInterval};
use crate::error::{Error, Result};

/// Smallest precision accepted by [`sample_alpha`].
pub const MIN_BITS: u32 = 64;

/// Default sampling precision.
pub const DEFAULT_BITS: u32 = 4096;

/// A probability law on `[0, 1]` that can produce dyadic samples.
pub trait SamplingLaw: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Lipschitz constant `L` of the density, when known.
    fn lipschitz(&self) -> Option<f64>;

    fn sample(&self, rng: &mut dyn RngCore, bits: u32) -> DyadicInterval;
}

/// Lebesgue measure.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uniform;

impl SamplingLaw for Uniform {
    fn name(&self) -> &str {
        "uniform"
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore, bits: u32) -> DyadicInterval {
        DyadicInterval::random(rng, bits)
    }
}

/// The Gauss measure with density `1 / (log 2 (1 + x))`.
///
/// Exact rejection sampling: a uniform dyadic `x = X / 2^B` is accepted when
/// an independent uniform `Y / 2^B` falls below `1 / (1 + x)`, decided in
/// integer arithmetic as `Y (2^B + X) < 2^{2B}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gauss;

impl SamplingLaw for Gauss {
    fn name(&self) -> &str {
        "gauss"
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0 / std::f64::consts::LN_2)
    }

    fn sample(&self, rng: &mut dyn RngCore, bits: u32) -> DyadicInterval {
        loop {
            let (iv, accepted) = gauss_trial(rng, bits);
            if accepted {
                return iv;
            }
        }
    }
}

/// One rejection trial of [`Gauss`]; exposed for acceptance-rate checks.
pub fn gauss_trial(rng: &mut dyn RngCore, bits: u32) -> (DyadicInterval, bool) {
    let x = rng.gen_biguint(bits as u64);
    let y = rng.gen_biguint(bits as u64);
    let one = BigUint::from(1u32) << bits;
    let accepted = &y * (&one + &x) < (&one << bits);
    (DyadicInterval::new(x, bits).expect("sized numerator"), accepted)
}

/// A user-supplied density evaluated in floating point, sampled by rejection
/// against `bound >= sup density`.
#[derive(Clone)]
pub struct DensityLaw {
    name: String,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
    lipschitz: Option<f64>,
}

impl DensityLaw {
    pub fn new<F>(name: &str, density: F, bound: f64, lipschitz: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidParameter(format!("density bound {bound}")));
        }
        Ok(DensityLaw {
            name: name.to_string(),
            density: Arc::new(density),
            bound,
            lipschitz,
        })
    }
}

impl fmt::Debug for DensityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityLaw")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

impl SamplingLaw for DensityLaw {
    fn name(&self) -> &str {
        &self.name
    }

    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    fn sample(&self, rng: &mut dyn RngCore, bits: u32) -> DyadicInterval {
        loop {
            let iv = DyadicInterval::random(rng, bits);
            let u: f64 = rng.gen();
            if u * self.bound < (self.density)(iv.lo_f64()) {
                return iv;
            }
        }
    }
}

/// Names accepted by [`law_by_name`].
pub const LAW_NAMES: [&str; 2] = ["uniform", "gauss"];

pub fn law_by_name(name: &str) -> Option<Arc<dyn SamplingLaw>> {
    match name {
        "uniform" => Some(Arc::new(Uniform)),
        "gauss" => Some(Arc::new(Gauss)),
        _ => None,
    }
}

pub fn sample_alpha(rng: &mut dyn RngCore, bits: u32, law: &dyn SamplingLaw) -> Result<DyadicInterval> {
    if bits < MIN_BITS {
        return Err(Error::InvalidParameter(format!(
            "sampling precision {bits} below {MIN_BITS} bits"
        )));
    }
    Ok(law.sample(rng, bits))
}

/// Precision that typically yields `n` trusted partial quotients (about
/// 0.29 quotients per bit) with a safety margin.
pub fn bits_for_quotients(n: usize) -> u32 {
    (n as u32).saturating_mul(7) / 2 + 512
}

/// A sample with at least `need` trusted partial quotients (exactly `need`
/// are returned). Short expansions are extended by refining the same
/// interval with fresh random low bits, which keeps the sample's law.
#[derive(Debug, Clone)]
pub struct TrustedSample {
    pub interval: DyadicInterval,
    pub expansion: CFExpansion,
    pub refinements: u32,
}

pub fn trusted_sample(
    rng: &mut dyn RngCore,
    law: &dyn SamplingLaw,
    bits: u32,
    need: usize,
) -> Result<TrustedSample> {
    let mut interval = sample_alpha(rng, bits, law)?;
    let mut refinements = 0;
    loop {
        let expansion = expand_interval_limited(&interval, Some(need));
        if expansion.len() >= need {
            return Ok(TrustedSample {
                interval,
                expansion,
                refinements,
            });
        }
        log::debug!(
            "{} trusted quotients at {} bits, need {need}; refining",
            expansion.len(),
            interval.bits()
        );
        let extra = interval.bits();
        interval.refine(rng, extra);
        refinements += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, sorted};
    use rand::SeedableRng;

    #[test]
    fn uniform_is_reproducible() {
        let a = sample_alpha(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), 128, &Uniform).unwrap();
        let b = sample_alpha(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), 128, &Uniform).unwrap();
        assert_eq!(a, b);
        assert!(sample_alpha(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), 32, &Uniform).is_err());
    }

    #[test]
    fn gauss_acceptance_rate_is_log2() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let acc = (0..n).filter(|_| gauss_trial(&mut rng, 64).1).count();
        let rate = acc as f64 / n as f64;
        assert!((rate - std::f64::consts::LN_2).abs() < 0.01, "{rate}");
    }

    #[test]
    fn gauss_cdf_at_half() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let n = 20_000;
        let below = (0..n)
            .filter(|_| Gauss.sample(&mut rng, 64).lo_f64() < 0.5)
            .count() as f64
            / n as f64;
        let expect = 1.5f64.log2();
        assert!((below - expect).abs() < 4.0 * (expect * (1.0 - expect) / n as f64).sqrt());
    }

    #[test]
    fn density_law_reproduces_gauss_roughly() {
        let law = DensityLaw::new(
            "gauss-float",
            |x| 1.0 / (std::f64::consts::LN_2 * (1.0 + x)),
            1.0 / std::f64::consts::LN_2,
            None,
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let xs = sorted((0..5000).map(|_| law.sample(&mut rng, 64).lo_f64()).collect());
        assert!(ks_one_sample(&xs, |x| (1.0 + x).log2()) < 0.03);
    }

    #[test]
    fn registry() {
        for name in LAW_NAMES {
            assert_eq!(law_by_name(name).unwrap().name(), name);
        }
        assert!(law_by_name("cauchy").is_none());
    }

    #[test]
    fn trusted_sample_refines_when_short() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let s = trusted_sample(&mut rng, &Uniform, 64, 200).unwrap();
        assert_eq!(s.expansion.len(), 200);
        assert!(s.refinements >= 1);
    }
}
