use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{enumerate_det_class, nu_table, DetClass, ModMatrix, Modulus, VSet};
use crate::error::{Error, Result};

/// Exact marginal counts of a determinant class.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalAudit {
    pub m: u32,
    pub det: u32,
    pub class_size: u64,
    pub class_size_formula: u64,
    pub v_size: u64,
    /// Rows `(u1,u2)`, `(u3,u4)` and columns `(u1,u3)`, `(u2,u4)`: whether each
    /// pair hits every element of `V` exactly `|G_D| / |V|` times and nothing
    /// outside `V`.
    pub pairs_uniform_on_v: [bool; 4],
    /// Per entry position, the count of each residue.
    pub entry_counts: [Vec<u64>; 4],
    pub entries_match_nu: [bool; 4],
    pub entries_identical: bool,
    pub violations: Vec<String>,
}

impl MarginalAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn marginal_audit(cls: &DetClass) -> MarginalAudit {
    let modulus = cls.modulus();
    let m = modulus.m() as usize;
    let v = VSet::new(modulus);
    let nu = nu_table(modulus);
    let size = cls.len() as u64;
    let mut violations = Vec::new();

    if size != modulus.det_class_size() {
        violations.push(format!(
            "class size {} differs from m^3 prod(1 - 1/p^2) = {}",
            size,
            modulus.det_class_size()
        ));
    }

    let per_pair = size / v.len() as u64;
    let pair_of = |g: &ModMatrix, k: usize| {
        let [a, b, c, d] = g.entries();
        match k {
            0 => (a, b),
            1 => (c, d),
            2 => (a, c),
            _ => (b, d),
        }
    };
    let pair_names = ["row (u1,u2)", "row (u3,u4)", "column (u1,u3)", "column (u2,u4)"];
    let mut pairs_uniform_on_v = [true; 4];
    for (k, uniform) in pairs_uniform_on_v.iter_mut().enumerate() {
        let mut counts = vec![0u64; m * m];
        for g in cls.elements() {
            let (x, y) = pair_of(g, k);
            counts[x as usize * m + y as usize] += 1;
        }
        for x in 0..m {
            for y in 0..m {
                let expect = if v.contains(x as u32, y as u32) { per_pair } else { 0 };
                if counts[x * m + y] != expect {
                    *uniform = false;
                }
            }
        }
        if !*uniform {
            violations.push(format!("{} is not uniform on V", pair_names[k]));
        }
    }

    let mut entry_counts: [Vec<u64>; 4] = Default::default();
    for (k, counts) in entry_counts.iter_mut().enumerate() {
        *counts = vec![0; m];
        for g in cls.elements() {
            counts[g.entries()[k] as usize] += 1;
        }
    }
    let scale = BigRational::from_integer(BigInt::from(size));
    let mut entries_match_nu = [true; 4];
    for (k, counts) in entry_counts.iter().enumerate() {
        entries_match_nu[k] = counts
            .iter()
            .enumerate()
            .all(|(a, &c)| BigRational::from_integer(BigInt::from(c)) == nu.weight(a as u32) * &scale);
        if !entries_match_nu[k] {
            violations.push(format!("entry u{} does not follow nu", k + 1));
        }
    }
    let entries_identical = entry_counts.iter().all(|c| c == &entry_counts[0]);
    if !entries_identical {
        violations.push("entry histograms differ".into());
    }

    MarginalAudit {
        m: modulus.m(),
        det: cls.det(),
        class_size: size,
        class_size_formula: modulus.det_class_size(),
        v_size: v.len() as u64,
        pairs_uniform_on_v,
        entry_counts,
        entries_match_nu,
        entries_identical,
        violations,
    }
}

/// Brute-force check of which products of `h(x_i)` generate `G_1` and `G_{-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCover {
    pub m: u32,
    pub phi_m_prime: u32,
    pub four_factor_image_is_g1: bool,
    pub five_factor_image_is_g_minus1: bool,
    /// For every prescribed `x_5`, the remaining four factors still reach all
    /// of `G_{-1}`.
    pub five_factor_with_fixed_last: bool,
    /// Smallest number of admissible `y in Z_{m'}` over `g in G_1`.
    pub min_admissible_y: u64,
    /// `m > 2`: two factors do not reach `G_1`; `None` for `m = 2`.
    pub two_factor_image_differs: Option<bool>,
    /// `m > 2`: three factors do not reach `G_{-1}`; `None` for `m = 2`.
    pub three_factor_image_differs: Option<bool>,
    /// `m = 2`: three factors already generate the group.
    pub three_factor_generates_for_m2: Option<bool>,
    pub violations: Vec<String>,
}

impl GeneratorCover {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every product `h(x_1) ... h(x_k)`, with the last factor reported.
fn products(m: u32, k: usize) -> Vec<(ModMatrix, u32)> {
    let mut layer = vec![(ModMatrix::identity(m), 0u32)];
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|(g, _)| (0..m).map(move |x| (g.mul_h(x), x)))
            .collect();
    }
    layer
}

fn image_equals(m: u32, prods: &[(ModMatrix, u32)], target: &DetClass) -> bool {
    let size = (m as usize).pow(4);
    let mut hit = vec![false; size];
    for (g, _) in prods {
        hit[g.code()] = true;
    }
    let mut want = vec![false; size];
    for g in target.elements() {
        want[g.code()] = true;
    }
    hit == want
}

/// Largest modulus accepted by [`generator_cover`] (5-fold products cost `m^5`).
pub const COVER_CAP: u32 = 24;

pub fn generator_cover(modulus: &Modulus) -> Result<GeneratorCover> {
    let m = modulus.m();
    if m > COVER_CAP {
        return Err(Error::ModulusTooLarge { m, cap: COVER_CAP });
    }
    let mm = m as usize;
    let g1 = enumerate_det_class(modulus, 1)?;
    let gm1 = enumerate_det_class(modulus, modulus.minus_one())?;
    let mut violations = Vec::new();

    let four = products(m, 4);
    let four_ok = image_equals(m, &four, &g1);
    if !four_ok {
        violations.push("4-fold products do not equal G_1".into());
    }

    // Bit x4 of reach[g] is set when some x1..x3 complete the product to g.
    let mut reach = vec![0u128; mm.pow(4)];
    for (g, x4) in &four {
        reach[g.code()] |= 1u128 << x4;
    }
    let mp = modulus.m_prime();
    let mut min_admissible = u64::MAX;
    for g in g1.elements() {
        let bits = reach[g.code()];
        let admissible = (0..mp)
            .filter(|&y| (y..m).step_by(mp as usize).all(|x4| bits >> x4 & 1 == 1))
            .count() as u64;
        min_admissible = min_admissible.min(admissible);
    }
    if min_admissible < modulus.phi_m_prime() as u64 {
        violations.push(format!(
            "some g in G_1 has only {} admissible y, fewer than phi(m') = {}",
            min_admissible,
            modulus.phi_m_prime()
        ));
    }

    let five: Vec<(ModMatrix, u32)> = four
        .iter()
        .flat_map(|(g, _)| (0..m).map(move |x| (g.mul_h(x), x)))
        .collect();
    let five_ok = image_equals(m, &five, &gm1);
    if !five_ok {
        violations.push("5-fold products do not equal G_{-1}".into());
    }
    let fixed_last_ok = (0..m).all(|x5| {
        let sub: Vec<(ModMatrix, u32)> = five.iter().filter(|(_, x)| *x == x5).copied().collect();
        image_equals(m, &sub, &gm1)
    });
    if !fixed_last_ok {
        violations.push("some prescribed x_5 does not reach all of G_{-1}".into());
    }

    let (two_differs, three_differs, three_m2) = if m > 2 {
        let two = !image_equals(m, &products(m, 2), &g1);
        let three = !image_equals(m, &products(m, 3), &gm1);
        if !two {
            violations.push("2-fold products already equal G_1".into());
        }
        if !three {
            violations.push("3-fold products already equal G_{-1}".into());
        }
        (Some(two), Some(three), None)
    } else {
        let three = image_equals(m, &products(m, 3), &g1);
        if !three {
            violations.push("3-fold products do not generate the group for m = 2".into());
        }
        (None, None, Some(three))
    };

    Ok(GeneratorCover {
        m,
        phi_m_prime: modulus.phi_m_prime(),
        four_factor_image_is_g1: four_ok,
        five_factor_image_is_g_minus1: five_ok,
        five_factor_with_fixed_last: fixed_last_ok,
        min_admissible_y: min_admissible,
        two_factor_image_differs: two_differs,
        three_factor_image_differs: three_differs,
        three_factor_generates_for_m2: three_m2,
        violations,
    })
}
