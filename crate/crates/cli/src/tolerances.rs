use serde::{Deserialize, Serialize};

/// Bumped whenever a default gate changes.
pub const TOLERANCES_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub name: String,
    pub value: f64,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceTable {
    pub version: u32,
    pub entries: Vec<Tolerance>,
}

const DEFAULTS: &[(&str, f64, &str)] = &[
    ("exact", 0.0, "estimate and expected are equal integers or rationals"),
    ("szusz_std_errors", 4.0, "every cell within this many standard errors (Bonferroni level)"),
    ("variance_std_errors", 3.0, "series sigma_f^2 vs empirical variance, combined standard errors"),
    ("clt_ks", 0.02, "KS distance of normalised sums to N(0, sigma_f^2)"),
    ("clt_cross_ks", 0.02, "two-sample KS between uniform- and Gauss-density runs"),
    ("kesten_constant", 1e-10, "absolute error of 1/(3 pi), 1/(4 pi)"),
    ("f_quadrature", 1e-4, "F(u) by quadrature vs closed form"),
    ("double_evaluation", 1e-12, "high-precision constants vs a direct double evaluation"),
    ("closed_form", 1e-15, "double evaluation of a closed form"),
    ("decay_n20", 1e-6, "sup distance to uniform after 20 transfer steps"),
    ("rs_c_emp", 5.0, "largest |alternating sum - brute force| over all alpha, k, r"),
    ("cauchy_ks", 0.08, "continuity-corrected KS to Cauchy at the largest N"),
    ("reflection_ks", 0.1, "two-sample KS between normalised max and -min"),
    ("maxmin_correlation", 0.1, "|corr(normalised max, normalised min)|"),
    ("stable_reflection", 1e-6, "F_{+1}(x) + F_{-1}(-x) - 1 on a grid"),
];

impl ToleranceTable {
    pub fn defaults() -> Self {
        ToleranceTable {
            version: TOLERANCES_VERSION,
            entries: DEFAULTS
                .iter()
                .map(|&(name, value, rule)| Tolerance {
                    name: name.into(),
                    value,
                    rule: rule.into(),
                })
                .collect(),
        }
    }
}

/// Value of a default gate.
pub fn tol(name: &str) -> f64 {
    DEFAULTS
        .iter()
        .find(|d| d.0 == name)
        .unwrap_or_else(|| panic!("no default tolerance {name:?}"))
        .1
}
