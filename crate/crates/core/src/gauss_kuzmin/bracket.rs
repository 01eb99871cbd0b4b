use rayon::prelude::*;
use serde::Serialize;

use super::cylinder::{gauss_units, lambda_units, units_to_f64, CylinderBound};
use crate::error::{Error, Result};
use crate::zmod::{Group, ModMatrix, Modulus};

/// Default cap on the number of enumerated cylinders.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Which measure a bracket refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Lebesgue,
    Gauss,
}

/// Per-element sums over cylinders `b_1..b_l` with all `b_i <= b_max`, in
/// units of `2^-64` (lower and upper roundings).
#[derive(Debug, Clone)]
pub(crate) struct Enumeration {
    pub lower: Vec<u128>,
    pub upper: Vec<u128>,
}

pub(crate) fn enumerate(
    group: &Group,
    ell: usize,
    b_max: u64,
    measure: Measure,
    budget: u128,
) -> Result<Enumeration> {
    if ell == 0 || b_max == 0 {
        return Err(Error::InvalidParameter("need l >= 1 and B_max >= 1".into()));
    }
    let required = (b_max as u128).checked_pow(ell as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let table = group.h_table();
    let m = group.modulus().m() as u64;
    let id = group.identity_index();
    let n = group.len();
    let zero = || Enumeration {
        lower: vec![0; n],
        upper: vec![0; n],
    };
    let out = (1..=b_max)
        .into_par_iter()
        .map(|b1| {
            let mut acc = zero();
            let g = table[id][(b1 % m) as usize] as usize;
            let ctx = Walk {
                table: &table,
                m,
                ell,
                b_max,
                measure,
            };
            // (p_{k-1}, p_k, q_{k-1}, q_k) after b_1.
            ctx.descend(1, g, (0, 1, 1, b1 as u128), &mut acc);
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.lower.iter_mut().zip(&b.lower) {
                *x += y;
            }
            for (x, y) in a.upper.iter_mut().zip(&b.upper) {
                *x += y;
            }
            a
        });
    Ok(out)
}

struct Walk<'a> {
    table: &'a [Vec<u32>],
    m: u64,
    ell: usize,
    b_max: u64,
    measure: Measure,
}

impl Walk<'_> {
    fn descend(&self, k: usize, g: usize, c: (u128, u128, u128, u128), acc: &mut Enumeration) {
        let (pp, p, qp, q) = c;
        if k == self.ell {
            let (lo, hi) = match self.measure {
                Measure::Lebesgue => lambda_units(q, qp),
                Measure::Gauss => gauss_units(k, p, pp, q, qp),
            };
            acc.lower[g] += lo;
            acc.upper[g] += hi;
            return;
        }
        for b in 1..=self.b_max {
            let ng = self.table[g][(b % self.m) as usize] as usize;
            let bb = b as u128;
            self.descend(k + 1, ng, (p, bb * p + pp, q, bb * q + qp), acc);
        }
    }
}

/// Bracket on the measure of `{P_l = g}` for one element.
#[derive(Debug, Clone, Serialize)]
pub struct ElementBracket {
    pub element: ModMatrix,
    pub bound: CylinderBound,
    #[serde(skip)]
    pub lower_units: u128,
    #[serde(skip)]
    pub upper_units: u128,
}

/// Brackets on `mu(P_l = g)` for every `g` in `G_{(-1)^l}`.
#[derive(Debug, Clone, Serialize)]
pub struct PlBracket {
    pub m: u32,
    pub ell: usize,
    pub b_max: u64,
    pub measure: Measure,
    /// Mass not covered by the enumerated cylinders (upper bound).
    pub leftover: f64,
    #[serde(skip)]
    pub leftover_units: u128,
    pub brackets: Vec<ElementBracket>,
}

impl PlBracket {
    pub fn get(&self, g: &ModMatrix) -> Option<&CylinderBound> {
        self.brackets.iter().find(|b| &b.element == g).map(|b| &b.bound)
    }

    pub fn total_lower(&self) -> f64 {
        self.brackets.iter().map(|b| b.bound.lower).sum()
    }

    pub fn total_upper(&self) -> f64 {
        self.brackets.iter().map(|b| b.bound.upper).sum()
    }
}

const ONE_UNIT: u128 = 1 << 64;

fn lower_f64(u: u128) -> f64 {
    let v = units_to_f64(u);
    if v == 0.0 {
        0.0
    } else {
        v.next_down()
    }
}

fn upper_f64(u: u128) -> f64 {
    units_to_f64(u).next_up()
}

/// Brackets on `mu_Gauss(P_l = g)` from all cylinders with quotients at
/// most `b_max`.
///
/// The lower bound of `g` is the enumerated mass mapping to `g`; the mass
/// not covered by any enumerated cylinder is added to every upper bound.
/// With rounded cylinder measures the uncovered mass is taken as
/// `1 - sum of lower bounds`, so every width equals that leftover.
pub fn pl_distribution_bracket(m: &Modulus, ell: usize, b_max: u64) -> Result<PlBracket> {
    pl_distribution_bracket_with(m, ell, b_max, Measure::Gauss, DEFAULT_BUDGET)
}

pub fn pl_distribution_bracket_with(
    m: &Modulus,
    ell: usize,
    b_max: u64,
    measure: Measure,
    budget: u128,
) -> Result<PlBracket> {
    let group = Group::new(m)?;
    let e = enumerate(&group, ell, b_max, measure, budget)?;
    let total: u128 = e.lower.iter().sum();
    let leftover_units = ONE_UNIT.saturating_sub(total);
    let brackets = group
        .class_range(ell % 2)
        .map(|i| {
            let lower_units = e.lower[i];
            let upper_units = lower_units + leftover_units;
            ElementBracket {
                element: group.get(i),
                bound: CylinderBound {
                    lower: lower_f64(lower_units),
                    upper: upper_f64(upper_units),
                },
                lower_units,
                upper_units,
            }
        })
        .collect();
    Ok(PlBracket {
        m: m.m(),
        ell,
        b_max,
        measure,
        leftover: upper_f64(leftover_units),
        leftover_units,
        brackets,
    })
}

/// Outcome for one element in [`lambda_positivity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityStatus {
    /// No cylinder maps to the element: `lambda(P_n = g) = 0`.
    Zero,
    /// The enumerated lower bound reaches `1/(m+1)^6`.
    Certified,
    /// Positive measure but the enumeration did not reach the threshold.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityEntry {
    pub element: ModMatrix,
    pub lower: f64,
    pub upper: f64,
    pub status: PositivityStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub m: u32,
    pub n: usize,
    pub b_max: u64,
    pub threshold: f64,
    pub entries: Vec<PositivityEntry>,
}

impl PositivityReport {
    pub fn count(&self, status: PositivityStatus) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    /// No element has a positive lower bound below the threshold.
    pub fn passed(&self) -> bool {
        self.count(PositivityStatus::Inconclusive) == 0
    }
}

/// Quotient bound used by [`lambda_positivity_check`] for depth `n`.
pub fn default_positivity_b_max(m: u32, n: usize) -> u64 {
    let base = match n {
        1 => 100,
        2 => 60,
        _ => 24,
    };
    base.max(2 * m as u64)
}

/// Checks that `lambda(P_n = g)` is either zero or at least `1/(m+1)^6`.
///
/// Elements outside `{h(x_1) ... h(x_n)}` are exactly zero. For the others
/// the enumerated Lebesgue mass is compared against the threshold.
pub fn lambda_positivity_check(m: &Modulus, n: usize, b_max: Option<u64>) -> Result<PositivityReport> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("positivity check needs n in 1..=3, got {n}")));
    }
    let b_max = b_max.unwrap_or_else(|| default_positivity_b_max(m.m(), n));
    if b_max < m.m() as u64 {
        return Err(Error::InvalidParameter(format!(
            "B_max = {b_max} does not cover every residue mod {}",
            m.m()
        )));
    }
    let group = Group::new(m)?;
    let table = group.h_table();
    let id = group.identity_index();
    let mut reach = vec![false; group.len()];
    let mut frontier = vec![id];
    for _ in 0..n {
        let mut next: Vec<usize> = frontier
            .iter()
            .flat_map(|&g| table[g].iter().map(|&x| x as usize))
            .collect();
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    for g in frontier {
        reach[g] = true;
    }
    let e = enumerate(&group, n, b_max, Measure::Lebesgue, DEFAULT_BUDGET)?;
    let total: u128 = e.lower.iter().sum();
    let leftover = ONE_UNIT.saturating_sub(total);
    let mm = (m.m() as u128 + 1).pow(6);
    // Smallest unit count certifying `>= 1/(m+1)^6`.
    let need = ONE_UNIT.div_ceil(mm);
    let entries = group
        .class_range(n % 2)
        .map(|i| {
            let (lower, upper, status) = if !reach[i] {
                (0.0, 0.0, PositivityStatus::Zero)
            } else if e.lower[i] >= need {
                (lower_f64(e.lower[i]), upper_f64(e.lower[i] + leftover), PositivityStatus::Certified)
            } else {
                (lower_f64(e.lower[i]), upper_f64(e.lower[i] + leftover), PositivityStatus::Inconclusive)
            };
            PositivityEntry {
                element: group.get(i),
                lower,
                upper,
                status,
            }
        })
        .collect();
    Ok(PositivityReport {
        m: m.m(),
        n,
        b_max,
        threshold: 1.0 / mm as f64,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_kuzmin::{cylinder_gauss, Cylinder};

    fn modulus(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    #[test]
    fn first_quotient_bracket_width() {
        let br = pl_distribution_bracket(&modulus(2), 1, 200).unwrap();
        assert!(br.leftover < 0.01);
        for b in &br.brackets {
            assert!(b.bound.width() <= br.leftover * (1.0 + 1e-12));
        }
        assert!(br.total_lower() <= 1.0 && 1.0 <= br.total_upper());
    }

    #[test]
    fn widths_sum_to_class_size_times_leftover() {
        for (m, ell, b) in [(2, 1, 50), (3, 2, 20), (4, 3, 8)] {
            let br = pl_distribution_bracket(&modulus(m), ell, b).unwrap();
            let widths: u128 = br.brackets.iter().map(|e| e.upper_units - e.lower_units).sum();
            let g1 = Group::new(&modulus(m)).unwrap().g1_len() as u128;
            assert_eq!(widths, g1 * br.leftover_units);
        }
    }

    #[test]
    fn closed_forms_inside_first_level_brackets() {
        // mu(a_1 = b) summed over b = x mod 2 is bracketed by the l = 1 bracket.
        let br = pl_distribution_bracket(&modulus(2), 1, 40).unwrap();
        for x in 0..2u64 {
            // Sum far beyond B_max approximates the true value from below.
            let s: f64 = (1..=20_000u64)
                .filter(|b| b % 2 == x)
                .map(|b| ((1.0 + 1.0 / b as f64) / (1.0 + 1.0 / (b + 1) as f64)).log2())
                .sum();
            let g = ModMatrix::h(x, 2);
            let bound = br.get(&g).unwrap();
            assert!(bound.lower <= s && s <= bound.upper, "{bound:?} {s}");
        }
        // Enumerated single cylinders agree with the high-precision path.
        let exact: f64 = (1..=40u64)
            .map(|b| cylinder_gauss(&Cylinder::new(vec![b]).unwrap()).lower)
            .sum();
        assert!((br.total_lower() - exact).abs() < 1e-14);
    }

    #[test]
    fn brackets_tighten_in_b_max() {
        let mut prev: Option<PlBracket> = None;
        for b in [5, 10, 20, 40] {
            let br = pl_distribution_bracket(&modulus(3), 2, b).unwrap();
            if let Some(p) = &prev {
                assert!(br.leftover_units < p.leftover_units);
                for (x, y) in br.brackets.iter().zip(&p.brackets) {
                    assert!(x.lower_units >= y.lower_units && x.upper_units <= y.upper_units);
                }
            }
            prev = Some(br);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = pl_distribution_bracket_with(&modulus(2), 3, 1000, Measure::Gauss, 1_000_000).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                required: 1_000_000_000,
                budget: 1_000_000
            }
        );
    }

    #[test]
    fn positivity_first_level() {
        let r = lambda_positivity_check(&modulus(2), 1, Some(100)).unwrap();
        assert_eq!(r.count(PositivityStatus::Certified), 2);
        assert_eq!(r.count(PositivityStatus::Zero), 4);
        for e in &r.entries {
            if e.status == PositivityStatus::Certified {
                assert!(e.lower >= 1.0 / 729.0);
            } else {
                assert_eq!(e.upper, 0.0);
            }
        }
    }

    #[test]
    fn positivity_m3_depth2() {
        let r = lambda_positivity_check(&modulus(3), 2, None).unwrap();
        assert!(r.passed());
        assert_eq!(r.count(PositivityStatus::Certified), 9);
        assert!(lambda_positivity_check(&modulus(3), 4, None).is_err());
    }
}
