use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zmod::{Group, ModMatrix, Modulus};

pub const DEFAULT_GRID_SIZE: usize = 512;
pub const DEFAULT_B_CUT: u64 = 10_000;
pub const MIN_GRID_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferConfig {
    pub grid_size: usize,
    pub b_cut: u64,
    /// Rescale after each step so the discrete Gauss mass stays 1.
    pub renormalize: bool,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            grid_size: DEFAULT_GRID_SIZE,
            b_cut: DEFAULT_B_CUT,
            renormalize: true,
        }
    }
}

/// `F_{n,g}` sampled on a uniform grid of `[0, 1]`, for every `g` in `G`;
/// only the class `G_{(-1)^n}` carries mass.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub n: usize,
    nodes: Vec<f64>,
    values: Vec<Vec<f64>>,
    class: std::ops::Range<usize>,
    g1_len: usize,
    /// `mass()` of the raw step before any rescaling.
    pub raw_mass: f64,
}

impl DensityGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self, g: usize) -> &[f64] {
        &self.values[g]
    }

    pub fn active_class(&self) -> std::ops::Range<usize> {
        self.class.clone()
    }

    pub fn target(&self) -> f64 {
        1.0 / self.g1_len as f64
    }

    /// `max_{g, x} |F_{n,g}(x) - 1/|G_1||` over the active class.
    pub fn sup_distance(&self) -> f64 {
        let t = self.target();
        self.class
            .clone()
            .flat_map(|g| self.values[g].iter())
            .fold(0.0f64, |acc, &v| acc.max((v - t).abs()))
    }

    /// `max_g |mu(P_n = g) - 1/|G_1||` with `mu(P_n = g) = int F_{n,g} dmu_Gauss`.
    pub fn measure_distance(&self) -> f64 {
        let w = gauss_hat_weights(self.nodes.len());
        let t = self.target();
        self.class
            .clone()
            .map(|g| (dot(&w, &self.values[g]) - t).abs())
            .fold(0.0, f64::max)
    }

    /// `(g, mu(P_n = g))` over the active class.
    pub fn class_masses(&self) -> Vec<(usize, f64)> {
        let w = gauss_hat_weights(self.nodes.len());
        self.class.clone().map(|g| (g, dot(&w, &self.values[g]))).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.class
            .clone()
            .flat_map(|g| self.values[g].iter())
            .fold(f64::INFINITY, |acc, &v| acc.min(v))
    }

    /// `sum_g int F_{n,g} dmu_Gauss` for the piecewise linear interpolant.
    pub fn mass(&self) -> f64 {
        let w = gauss_hat_weights(self.nodes.len());
        self.class.clone().map(|g| dot(&w, &self.values[g])).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `w_j = int hat_j dmu_Gauss` for the hat functions of a uniform grid.
pub(crate) fn gauss_hat_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let mut w = vec![0.0; n];
    for j in 0..n - 1 {
        let a = j as f64 * h;
        let l = (h / (1.0 + a)).ln_1p();
        // int_a^{a+h} (x - a) / (1 + x) dx and int_a^{a+h} (a + h - x) / (1 + x) dx.
        let rising = h - (1.0 + a) * l;
        let falling = (1.0 + a + h) * l - h;
        w[j] += falling / h;
        w[j + 1] += rising / h;
    }
    // The weights of `1 / (1 + x)` sum to `ln 2`; dividing by the computed
    // total turns them into Gauss weights and removes accumulated rounding.
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

struct DirectTerm {
    cell: u32,
    left: f64,
    right: f64,
}

/// The discretised operator: direct interpolation for small `b`, per-residue
/// aggregated weights on the first cell for the rest up to `b_cut`, and the
/// closed-form tail `(1 + x) / (b_cut + 1 + x)` applied to `F(0)`.
pub struct TransferOperator {
    group: Group,
    config: TransferConfig,
    nodes: Vec<f64>,
    /// `pred[g][rho]` is the index of `g h(rho)^{-1}`.
    pred: Vec<Vec<u32>>,
    /// `direct[rho][j]`: terms for `b <= b_direct`, `b = rho mod m`.
    direct: Vec<Vec<Vec<DirectTerm>>>,
    /// `(A_0, A_1)[rho][j]` for `b_direct < b <= b_cut`.
    first_cell: Vec<Vec<(f64, f64)>>,
    tail: Vec<f64>,
    weights: Vec<f64>,
}

impl TransferOperator {
    pub fn new(m: &Modulus, config: TransferConfig) -> Result<Self> {
        if config.grid_size < MIN_GRID_SIZE {
            return Err(Error::InvalidParameter(format!(
                "grid size {} below {MIN_GRID_SIZE}",
                config.grid_size
            )));
        }
        if config.b_cut < 1 {
            return Err(Error::InvalidParameter("b_cut must be positive".into()));
        }
        let group = Group::new(m)?;
        let mm = m.m();
        let n = config.grid_size;
        let h = 1.0 / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
        let pred = group
            .elements()
            .iter()
            .map(|g| {
                (0..mm)
                    .map(|rho| {
                        let inv = ModMatrix::h(rho as u64, mm).inverse().expect("h is invertible");
                        group.index_of(&g.mul(&inv)).expect("closed") as u32
                    })
                    .collect()
            })
            .collect();
        let b_direct = config.b_cut.min(n as u64);
        let weight = |b: f64, x: f64| (1.0 + x) / ((b + x) * (b + 1.0 + x));
        let mut direct: Vec<Vec<Vec<DirectTerm>>> = (0..mm)
            .map(|_| (0..n).map(|_| Vec::new()).collect())
            .collect();
        for b in 1..=b_direct {
            let rho = (b % mm as u64) as usize;
            for (j, &x) in nodes.iter().enumerate() {
                let w = weight(b as f64, x);
                let t = 1.0 / (b as f64 + x);
                let pos = t / h;
                let cell = (pos.floor() as usize).min(n - 2);
                let frac = pos - cell as f64;
                direct[rho][j].push(DirectTerm {
                    cell: cell as u32,
                    left: w * (1.0 - frac),
                    right: w * frac,
                });
            }
        }
        let mut first_cell = vec![vec![(0.0, 0.0); n]; mm as usize];
        for b in b_direct + 1..=config.b_cut {
            let rho = (b % mm as u64) as usize;
            for (j, &x) in nodes.iter().enumerate() {
                let w = weight(b as f64, x);
                let frac = 1.0 / (b as f64 + x) / h;
                let e = &mut first_cell[rho][j];
                e.0 += w * (1.0 - frac);
                e.1 += w * frac;
            }
        }
        let tail = nodes
            .iter()
            .map(|&x| (1.0 + x) / (config.b_cut as f64 + 1.0 + x))
            .collect();
        Ok(TransferOperator {
            group,
            config,
            weights: gauss_hat_weights(n),
            nodes,
            pred,
            direct,
            first_cell,
            tail,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn config(&self) -> &TransferConfig {
        &self.config
    }

    /// `F_0` for an initial Lebesgue density `rho0`: `F_{0,I} = log 2 (1 + x) rho0(x)`.
    pub fn initial(&self, density0: &dyn Fn(f64) -> f64) -> DensityGrid {
        let id = self
            .group
            .index_of(&ModMatrix::identity(self.group.modulus().m()))
            .expect("identity");
        let mut values = vec![vec![0.0; self.nodes.len()]; self.group.len()];
        values[id] = self
            .nodes
            .iter()
            .map(|&x| std::f64::consts::LN_2 * (1.0 + x) * density0(x))
            .collect();
        let mut grid = DensityGrid {
            n: 0,
            nodes: self.nodes.clone(),
            values,
            class: self.group.class_range(0),
            g1_len: self.group.g1_len(),
            raw_mass: 0.0,
        };
        grid.raw_mass = grid.mass();
        grid
    }

    pub fn step(&self, prev: &DensityGrid) -> DensityGrid {
        let n = prev.n + 1;
        let class = self.group.class_range(n % 2);
        let m = self.group.modulus().m() as usize;
        let size = self.nodes.len();
        let mut values = vec![vec![0.0; size]; self.group.len()];
        let fresh: Vec<(usize, Vec<f64>)> = class
            .clone()
            .into_par_iter()
            .map(|g| {
                let srcs: Vec<&[f64]> = self.pred[g].iter().map(|&p| prev.values[p as usize].as_slice()).collect();
                let avg0 = srcs.iter().map(|s| s[0]).sum::<f64>() / m as f64;
                let out = (0..size)
                    .map(|j| {
                        let mut acc = self.tail[j] * avg0;
                        for (rho, src) in srcs.iter().enumerate() {
                            for t in &self.direct[rho][j] {
                                let c = t.cell as usize;
                                acc += src[c] * t.left + src[c + 1] * t.right;
                            }
                            let (a0, a1) = self.first_cell[rho][j];
                            acc += src[0] * a0 + src[1] * a1;
                        }
                        acc
                    })
                    .collect();
                (g, out)
            })
            .collect();
        for (g, v) in fresh {
            values[g] = v;
        }
        let mut grid = DensityGrid {
            n,
            nodes: self.nodes.clone(),
            values,
            class,
            g1_len: self.group.g1_len(),
            raw_mass: 0.0,
        };
        grid.raw_mass = grid.class.clone().map(|g| dot(&self.weights, &grid.values[g])).sum();
        if self.config.renormalize && grid.raw_mass > 0.0 {
            let s = 1.0 / grid.raw_mass;
            for g in grid.class.clone() {
                grid.values[g].iter_mut().for_each(|v| *v *= s);
            }
        }
        grid
    }
}

/// Iterates the density recursion `steps` times from the Lebesgue density
/// `density0` and returns every intermediate grid (`n = 0..=steps`).
pub fn transfer_iterate(
    m: &Modulus,
    density0: &dyn Fn(f64) -> f64,
    steps: usize,
    config: TransferConfig,
) -> Result<Vec<DensityGrid>> {
    let op = TransferOperator::new(m, config)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(op.initial(density0));
    for _ in 0..steps {
        let next = op.step(out.last().expect("nonempty"));
        out.push(next);
    }
    Ok(out)
}

/// `C = 4L + 3` and `tau = phi(m') / (12 (m+1)^6 (m'+1) (m' - phi(m') + 1))`.
pub fn mixing_constants(m: &Modulus, lipschitz: f64) -> (f64, f64) {
    let mp = m.m_prime() as f64;
    let phi = m.phi_m_prime() as f64;
    let m1 = m.m() as f64 + 1.0;
    let tau = phi / (12.0 * m1.powi(6) * (mp + 1.0) * (mp - phi + 1.0));
    (4.0 * lipschitz + 3.0, tau)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub sup_distance: f64,
    pub measure_distance: f64,
    pub proven_bound: f64,
    /// The grid iteration is a numerical approximation, never a proof.
    pub rigorous: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub m: u32,
    pub lipschitz: f64,
    pub c: f64,
    pub tau: f64,
    /// `-log` of the geometric-mean contraction per step over the second
    /// half of the run (where the distance is still above round-off).
    pub tau_observed: Option<f64>,
    pub max_raw_mass_defect: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Distance of the iterated density to uniformity against `C e^{-tau n}`.
pub fn mixing_decay_report(
    m: &Modulus,
    n_max: usize,
    density0: &dyn Fn(f64) -> f64,
    lipschitz: f64,
    config: TransferConfig,
) -> Result<DecayReport> {
    let (c, tau) = mixing_constants(m, lipschitz);
    let op = TransferOperator::new(m, config)?;
    let mut grid = op.initial(density0);
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut defect = 0.0f64;
    loop {
        let d = grid.sup_distance();
        let bound = c * (-tau * grid.n as f64).exp();
        defect = defect.max((grid.raw_mass - 1.0).abs());
        rows.push(DecayRow {
            n: grid.n,
            sup_distance: d,
            measure_distance: grid.measure_distance(),
            proven_bound: bound,
            rigorous: false,
            pass: d <= bound,
        });
        if grid.n == n_max {
            break;
        }
        grid = op.step(&grid);
    }
    Ok(DecayReport {
        m: m.m(),
        lipschitz,
        c,
        tau,
        tau_observed: observed_rate(&rows),
        max_raw_mass_defect: defect,
        rows,
    })
}

fn observed_rate(rows: &[DecayRow]) -> Option<f64> {
    let usable: Vec<&DecayRow> = rows
        .iter()
        .skip(1)
        .take_while(|r| r.sup_distance > 1e-13)
        .collect();
    if usable.len() < 4 {
        return None;
    }
    let a = usable[usable.len() / 2];
    let b = usable[usable.len() - 1];
    Some((a.sup_distance / b.sup_distance).ln() / (b.n - a.n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    fn small() -> TransferConfig {
        TransferConfig {
            grid_size: 128,
            b_cut: 2000,
            renormalize: true,
        }
    }

    #[test]
    fn hat_weights_integrate_gauss_density() {
        let w = gauss_hat_weights(65);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // Linear functions are integrated exactly: int x dmu_Gauss = 1/ln2 - 1.
        let h = 1.0 / 64.0;
        let ix: f64 = w.iter().enumerate().map(|(j, w)| w * j as f64 * h).sum();
        assert!((ix - (1.0 / std::f64::consts::LN_2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn constants_are_fixed() {
        let op = TransferOperator::new(&modulus(2), small()).unwrap();
        let mut g = op.initial(&|_| 1.0);
        for gi in g.active_class() {
            g.values[gi].iter_mut().for_each(|v| *v = 1.0 / 6.0);
        }
        let next = op.step(&g);
        assert!(next.sup_distance() < 1e-14, "{}", next.sup_distance());
        assert!((next.raw_mass - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_start_is_uniform_after_one_class_average() {
        // Starting from the Gauss density, F_{0,I} = 1; the single-digit
        // law of P_1 is then exactly mu_Gauss(a_1 = b mod m).
        let op = TransferOperator::new(&modulus(2), small()).unwrap();
        let g0 = op.initial(&|x| 1.0 / (std::f64::consts::LN_2 * (1.0 + x)));
        let g1 = op.step(&g0);
        let w = gauss_hat_weights(128);
        let odd: f64 = (1..200_000u64)
            .step_by(2)
            .map(|b| ((1.0 + 1.0 / b as f64) / (1.0 + 1.0 / (b + 1) as f64)).log2())
            .sum();
        let hodd = op.group().index_of(&ModMatrix::h(1, 2)).unwrap();
        let got = dot(&w, g1.values(hodd));
        assert!((got - odd).abs() < 1e-4, "{got} {odd}");
    }

    #[test]
    fn mass_is_conserved_without_rescaling() {
        let cfg = TransferConfig {
            renormalize: false,
            ..small()
        };
        let grids = transfer_iterate(&modulus(3), &|_| 1.0, 15, cfg).unwrap();
        for g in &grids {
            assert!((g.mass() - 1.0).abs() < 1e-4, "n = {} mass {}", g.n, g.mass());
            assert!(g.min_value() >= -1e-12);
        }
    }

    #[test]
    fn uniform_start_converges_for_m2() {
        let grids = transfer_iterate(&modulus(2), &|_| 1.0, 24, small()).unwrap();
        let d0 = grids[0].sup_distance();
        assert!((d0 - (2.0 * std::f64::consts::LN_2 - 1.0 / 6.0)).abs() < 1e-12);
        // The slowest mode contracts by about e^{-0.63} per step.
        assert!(grids[20].sup_distance() < 1e-5);
        assert!(grids[24].sup_distance() < 1e-6);
    }

    #[test]
    fn gauss_start_agrees_with_cylinder_brackets() {
        let m = modulus(3);
        let grids = transfer_iterate(&m, &|x| 1.0 / (std::f64::consts::LN_2 * (1.0 + x)), 2, TransferConfig::default()).unwrap();
        let br = crate::gauss_kuzmin::pl_distribution_bracket(&m, 2, 200).unwrap();
        let w = gauss_hat_weights(DEFAULT_GRID_SIZE);
        let group = Group::new(&m).unwrap();
        for e in &br.brackets {
            let g = group.index_of(&e.element).unwrap();
            let v = dot(&w, grids[2].values(g));
            assert!(e.bound.lower - 1e-6 <= v && v <= e.bound.upper + 1e-6, "{:?} {v}", e.bound);
        }
    }

    #[test]
    fn constants_formula() {
        let (c, tau) = mixing_constants(&modulus(2), 0.0);
        assert_eq!(c, 3.0);
        // phi(2) = 1: 1 / (12 * 729 * 3 * 2).
        assert!((tau - 1.0 / (12.0 * 729.0 * 6.0)).abs() < 1e-18);
        for m in 2..30 {
            let (_, t) = mixing_constants(&modulus(m), 0.0);
            assert!(t >= 1.0 / (12.0 * ((m + 1) as f64).powi(8)));
        }
    }

    #[test]
    fn decay_report_passes_for_m2() {
        let r = mixing_decay_report(&modulus(2), 30, &|_| 1.0, 0.0, small()).unwrap();
        assert!(r.passed());
        assert!(r.rows[0].sup_distance <= r.c);
        assert!(r.tau_observed.unwrap() >= r.tau);
    }
}
