use std::f64::consts::PI;

/// Fractional part `{x} = x - floor(x)`.
pub fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Second Bernoulli polynomial made 1-periodic: `{x}^2/2 - {x}/2 + 1/12`.
pub fn bernoulli_b(x: f64) -> f64 {
    let t = frac(x);
    t * t / 2.0 - t / 2.0 + 1.0 / 12.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Partial sum of the Fourier series with `K` terms.
    Series(usize),
    Closed,
}

/// `V(x, u, y)` either as a truncated Fourier series
/// `(2/pi^2) sum_k sin(2 pi k x) sin(pi k u) cos(2 pi k y) / k^2` or via
/// `B(x+y-u/2) + B(x-y-u/2) - B(x+y+u/2) - B(x-y+u/2)`.
pub fn v_kernel(x: f64, u: f64, y: f64, mode: KernelMode) -> f64 {
    match mode {
        KernelMode::Closed => {
            bernoulli_b(x + y - u / 2.0) + bernoulli_b(x - y - u / 2.0)
                - bernoulli_b(x + y + u / 2.0)
                - bernoulli_b(x - y + u / 2.0)
        }
        KernelMode::Series(k) => {
            let s: f64 = (1..=k)
                .map(|k| {
                    let kf = k as f64;
                    (2.0 * PI * kf * x).sin() * (PI * kf * u).sin() * (2.0 * PI * kf * y).cos() / (kf * kf)
                })
                .sum();
            2.0 / (PI * PI) * s
        }
    }
}

/// `sum_{k=1}^K cos(2 pi k x) / (2 pi^2 k^2)`, the series side of the
/// Fourier identity for `B`.
pub fn bernoulli_series(x: f64, k: usize) -> f64 {
    (1..=k)
        .map(|k| {
            let kf = k as f64;
            (2.0 * PI * kf * x).cos() / (2.0 * PI * PI * kf * kf)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FMode {
    /// Composite Simpson rule in `y` with `n` panels; the `x`-integral is
    /// exact because `V` is piecewise linear in `x`.
    Quadrature(usize),
    Closed,
}

pub const MIN_QUADRATURE_PANELS: usize = 64;

/// `F(u) = int_0^1 int_0^1 |V(x, u, y)| dx dy = {u}(1 - {u}) / 3`.
pub fn f_of_u(u: f64, mode: FMode) -> f64 {
    match mode {
        FMode::Closed => {
            let t = frac(u);
            t * (1.0 - t) / 3.0
        }
        FMode::Quadrature(n) => {
            let n = n.max(MIN_QUADRATURE_PANELS);
            let n = n + n % 2;
            let h = 1.0 / n as f64;
            let mut acc = 0.0;
            for j in 0..=n {
                let w = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * inner_abs_integral(u, j as f64 * h);
            }
            acc * h / 3.0
        }
    }
}

/// `int_0^1 |V(x, u, y)| dx`, exact up to rounding.
///
/// The `x^2` terms of the four Bernoulli pieces cancel, so `V` is
/// continuous and linear in `x` between the points where one of
/// `x ± y ± u/2` crosses an integer.
pub fn inner_abs_integral(u: f64, y: f64) -> f64 {
    let mut cuts = vec![0.0, 1.0];
    for s in [y - u / 2.0, -y - u / 2.0, y + u / 2.0, -y + u / 2.0] {
        // x + s is an integer at x = {-s}.
        cuts.push(frac(-s));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let v = |x: f64| v_kernel(x, u, y, KernelMode::Closed);
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                return 0.0;
            }
            // One-sided values avoid the jump of {.} at the cut itself.
            let eps = (b - a) * 1e-9;
            let (va, vb) = extrapolate(&v, a, b, eps);
            abs_linear_integral(va, vb, b - a)
        })
        .sum()
}

/// Endpoint values of the linear piece on `[a, b]`, read just inside the
/// interval and extrapolated.
fn extrapolate(v: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> (f64, f64) {
    let (xa, xb) = (a + eps, b - eps);
    let (fa, fb) = (v(xa), v(xb));
    let slope = (fb - fa) / (xb - xa);
    (fa - slope * eps, fb + slope * eps)
}

/// `int |l|` over an interval of length `len` for the linear `l` with end
/// values `va`, `vb`.
fn abs_linear_integral(va: f64, vb: f64, len: f64) -> f64 {
    if va * vb >= 0.0 {
        len * (va.abs() + vb.abs()) / 2.0
    } else {
        len * (va * va + vb * vb) / (2.0 * (va.abs() + vb.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_is_periodic_with_zero_mean() {
        for x in [0.0, 0.1, 0.37, 0.99] {
            assert!((bernoulli_b(x) - bernoulli_b(x + 3.0)).abs() < 1e-12);
            assert!((bernoulli_b(x) - bernoulli_b(x - 2.0)).abs() < 1e-12);
        }
        let n = 10_000;
        let mean: f64 = (0..n).map(|i| bernoulli_b((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn fourier_identity_for_b() {
        let k = 20_000;
        for x in [0.0, 0.13, 0.5, 0.77] {
            // Tail of sum 1/(2 pi^2 k^2) beyond K is below 1/(2 pi^2 K).
            let tail = 1.0 / (2.0 * PI * PI * k as f64);
            assert!((bernoulli_series(x, k) - bernoulli_b(x)).abs() <= tail * 1.01 + 1e-12);
        }
    }

    #[test]
    fn kernel_vanishes_at_u_zero_and_x_zero() {
        for (x, y) in [(0.3, 0.7), (0.9, 0.1), (0.5, 0.5)] {
            assert!(v_kernel(x, 0.0, y, KernelMode::Closed).abs() < 1e-15);
            assert!(v_kernel(x, 0.0, y, KernelMode::Series(50)).abs() < 1e-15);
        }
        for (u, y) in [(0.3, 0.7), (0.5, 0.2)] {
            assert!(v_kernel(0.0, u, y, KernelMode::Closed).abs() < 1e-15);
        }
    }

    #[test]
    fn series_matches_closed_form() {
        let k = 10_000;
        let bound = 10.0 * 2.0 / (PI * PI * k as f64);
        for (x, u, y) in [(0.3, 0.5, 0.7), (0.12, 0.33, 0.9), (0.61, 0.8, 0.05)] {
            let d = (v_kernel(x, u, y, KernelMode::Series(k)) - v_kernel(x, u, y, KernelMode::Closed)).abs();
            assert!(d < 1e-4 && d < bound, "{d}");
        }
    }

    #[test]
    fn f_closed_values() {
        assert_eq!(f_of_u(0.0, FMode::Closed), 0.0);
        assert!((f_of_u(0.5, FMode::Closed) - 1.0 / 12.0).abs() < 1e-16);
        assert!((f_of_u(1.25, FMode::Closed) - f_of_u(0.25, FMode::Closed)).abs() < 1e-16);
    }

    #[test]
    fn inner_integral_against_fine_midpoint_rule() {
        let (u, y) = (0.37, 0.21);
        let n = 200_000;
        let brute: f64 = (0..n)
            .map(|i| v_kernel((i as f64 + 0.5) / n as f64, u, y, KernelMode::Closed).abs())
            .sum::<f64>()
            / n as f64;
        assert!((inner_abs_integral(u, y) - brute).abs() < 1e-8);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for i in 1..10 {
            let u = i as f64 / 10.0;
            let q = f_of_u(u, FMode::Quadrature(512));
            assert!((q - f_of_u(u, FMode::Closed)).abs() < 1e-4, "u = {u}: {q}");
        }
    }
}
