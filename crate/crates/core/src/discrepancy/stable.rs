use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

/// `Stab(1, ±1)`: characteristic function
/// `exp(-|t| (1 ± (2i/pi) sgn(t) log|t|))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StableLaw {
    Plus,
    Minus,
}

impl StableLaw {
    pub fn skewness(self) -> f64 {
        match self {
            StableLaw::Plus => 1.0,
            StableLaw::Minus => -1.0,
        }
    }

    pub fn reflect(self) -> Self {
        match self {
            StableLaw::Plus => StableLaw::Minus,
            StableLaw::Minus => StableLaw::Plus,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn rule(order: usize) -> &'static [(f64, f64)] {
    static R10: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R20: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R40: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    match order {
        10 => R10.get_or_init(|| gauss_legendre(10)),
        20 => R20.get_or_init(|| gauss_legendre(20)),
        _ => R40.get_or_init(|| gauss_legendre(40)),
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[(f64, f64)]) -> f64 {
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    h * nodes.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Upper integration limit: the tail is below `e^{-T}/T`.
const T_MAX: f64 = 24.0;
/// Below this the integrand is replaced by its first-order expansion.
const T_MIN: f64 = 1.0 / (1u64 << 40) as f64;
/// Beyond this the tail asymptotics are used.
pub const X_ASYMPTOTIC: f64 = 1e4;

/// Resolution of the Gil-Pelaez quadrature: Gauss-Legendre order per panel
/// (10, 20 or 40).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution(pub usize);

impl Default for Resolution {
    fn default() -> Self {
        Resolution(20)
    }
}

/// `P(X <= x)` for `X ~ Stab(1, ±1)`.
pub fn stable_cdf(law: StableLaw, x: f64) -> f64 {
    stable_cdf_with(law, x, Resolution::default())
}

/// Gil-Pelaez inversion
/// `F(x) = 1/2 + (1/pi) int_0^inf e^{-t} sin(t x + (2 beta/pi) t log t) / t dt`,
/// on geometric panels towards `0` (where the integrand has a logarithmic
/// singularity) and panels of bounded phase change up to `T`.
pub fn stable_cdf_with(law: StableLaw, x: f64, res: Resolution) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let beta = law.skewness();
    if x.abs() > X_ASYMPTOTIC {
        // Heavy tail on the skewed side: P(X > x) ~ 2/(pi x); the other tail
        // decays faster than any power.
        let heavy = 2.0 / (PI * x.abs());
        return match (x > 0.0, beta > 0.0) {
            (true, true) => 1.0 - heavy,
            (false, false) => heavy,
            (true, false) => 1.0,
            (false, true) => 0.0,
        };
    }
    let c = 2.0 * beta / PI;
    let f = |t: f64| (-t).exp() * (t * x + c * t * t.ln()).sin() / t;
    let nodes = rule(res.0);
    // int_0^eps (x + c log t) dt
    let mut acc = T_MIN * x + c * (T_MIN * T_MIN.ln() - T_MIN);
    // Phase speed on [a, b] is at most |x| + |c| (max |log t| + 1); panels
    // are split so that the phase moves by at most about 2 per piece.
    let pieces = |a: f64, b: f64| {
        let speed = x.abs() + c.abs() * (a.ln().abs().max(b.ln().abs()) + 1.0);
        ((b - a) * speed / 2.0).ceil().max(1.0) as usize
    };
    let mut split = |a: f64, b: f64, k: usize| {
        let h = (b - a) / k as f64;
        for i in 0..k {
            acc += panel(&f, a + i as f64 * h, a + (i + 1) as f64 * h, nodes);
        }
    };
    let mut a = T_MIN;
    while a < 1.0 {
        let b = (2.0 * a).min(1.0);
        split(a, b, pieces(a, b));
        a = b;
    }
    split(1.0, T_MAX, pieces(1.0, T_MAX).max(8));
    (0.5 + acc / PI).clamp(0.0, 1.0)
}

/// One draw from `Stab(1, ±1)` by the Chambers-Mallows-Stuck method.
pub fn stable_sample<R: Rng + ?Sized>(rng: &mut R, law: StableLaw) -> f64 {
    let beta = law.skewness();
    let v = PI * (rng.gen::<f64>() - 0.5);
    let w = -(1.0 - rng.gen::<f64>()).ln();
    let s = FRAC_PI_2 + beta * v;
    (2.0 / PI) * (s * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / s).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, sorted};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let r = gauss_legendre(10);
        let s: f64 = r.iter().map(|&(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((r.iter().map(|p| p.1).sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reflection_symmetry() {
        for i in -40..=40 {
            let x = i as f64 * 0.37;
            let s = stable_cdf(StableLaw::Plus, x) + stable_cdf(StableLaw::Minus, -x);
            assert!((s - 1.0).abs() < 1e-6, "x = {x}: {s}");
        }
    }

    #[test]
    fn monotone_on_grid() {
        let xs: Vec<f64> = (0..1000).map(|i| -20.0 + 60.0 * i as f64 / 999.0).collect();
        let f: Vec<f64> = xs.iter().map(|&x| stable_cdf(StableLaw::Plus, x)).collect();
        assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(f[0] < 1e-6 && f[999] > 0.97);
    }

    #[test]
    fn two_resolutions_agree() {
        for x in [-3.0, -1.0, 0.0, 0.5, 2.0, 7.5, 40.0, 800.0, 5000.0] {
            let a = stable_cdf_with(StableLaw::Plus, x, Resolution(20));
            let b = stable_cdf_with(StableLaw::Plus, x, Resolution(40));
            assert!((a - b).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn matches_chambers_mallows_stuck_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for law in [StableLaw::Plus, StableLaw::Minus] {
            let xs = sorted((0..20_000).map(|_| stable_sample(&mut rng, law)).collect());
            let d = ks_one_sample(&xs, |x| stable_cdf(law, x));
            assert!(d < 0.015, "{law:?}: {d}");
        }
    }

    #[test]
    fn tails_join_the_asymptotics() {
        let x = X_ASYMPTOTIC * 0.999;
        let near = stable_cdf(StableLaw::Plus, x);
        assert!((near - (1.0 - 2.0 / (PI * x))).abs() < 1e-6);
    }
}
