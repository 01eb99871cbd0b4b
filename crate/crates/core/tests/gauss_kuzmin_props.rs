use cfmod_core::gauss_kuzmin::pl_distribution_bracket;
use cfmod_core::zmod::{Group, ModMatrix, Modulus};
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

/// `sum_{b = x mod m, b >= 1} log2((b+1)^2 / (b (b+2)))` as the infinite
/// product `Gamma(s) Gamma(s + 2/m) / Gamma(s + 1/m)^2`, `s = b_0 / m`.
fn class_mass(x: u64, m: u64) -> f64 {
    let b0 = if x == 0 { m } else { x };
    let s = b0 as f64 / m as f64;
    let h = 1.0 / m as f64;
    (ln_gamma(s) + ln_gamma(s + 2.0 * h) - 2.0 * ln_gamma(s + h)) / std::f64::consts::LN_2
}

#[test]
fn first_level_brackets_contain_gamma_closed_forms() {
    for m in 2..=6u64 {
        let br = pl_distribution_bracket(&Modulus::new(m).unwrap(), 1, 500).unwrap();
        let total: f64 = (0..m).map(|x| class_mass(x, m)).sum();
        assert!((total - 1.0).abs() < 1e-12, "m={m} {total}");
        for x in 0..m {
            let bound = br.get(&ModMatrix::h(x, m as u32)).unwrap();
            let v = class_mass(x, m);
            assert!(bound.contains(v), "m={m} x={x} {bound:?} {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn widths_equal_class_size_times_leftover(m in 2u64..=5, ell in 1usize..=2, b in 2u64..40) {
        let modulus = Modulus::new(m).unwrap();
        let br = pl_distribution_bracket(&modulus, ell, b).unwrap();
        let widths: u128 = br.brackets.iter().map(|e| e.upper_units - e.lower_units).sum();
        let g1 = Group::new(&modulus).unwrap().g1_len() as u128;
        prop_assert_eq!(widths, g1 * br.leftover_units);
    }

    #[test]
    fn brackets_nest_as_b_max_grows(m in 2u64..=4, ell in 1usize..=2, b in 2u64..30, extra in 1u64..30) {
        let modulus = Modulus::new(m).unwrap();
        let coarse = pl_distribution_bracket(&modulus, ell, b).unwrap();
        let fine = pl_distribution_bracket(&modulus, ell, b + extra).unwrap();
        prop_assert!(fine.leftover_units < coarse.leftover_units);
        for (f, c) in fine.brackets.iter().zip(&coarse.brackets) {
            prop_assert_eq!(f.element, c.element);
            prop_assert!(f.lower_units >= c.lower_units && f.upper_units <= c.upper_units);
        }
    }
}
