use serde::Serialize;

use super::sampler::{map_samples, MonteCarlo, PnWalker, OP_MIXING};
use crate::error::{Error, Result};
use crate::zmod::{Group, Modulus};

/// `max_{g,h} |mu(P_k = g, P_{k+l} = h) - mu(P_k = g) mu(P_{k+l} = h)|`.
#[derive(Debug, Clone, Serialize)]
pub struct MixingEstimate {
    pub m: u32,
    pub k: usize,
    pub ell: usize,
    pub samples: usize,
    pub estimate: f64,
    /// Standard error of the cell attaining the maximum.
    pub std_error: f64,
    /// Typical size of the estimate under independence: the expected
    /// maximum of the cell noise, `sqrt(2 log cells) * max cell s.e.`.
    pub noise_floor: f64,
}

/// Lower-bound estimate of the alpha-mixing coefficient at lag `l`, over the
/// events `{P_k = g}` and `{P_{k+l} = h}` only.
pub fn mixing_lower_bound(m: &Modulus, k: usize, ell: usize, mc: &MonteCarlo) -> Result<MixingEstimate> {
    if k == 0 || ell == 0 {
        return Err(Error::InvalidParameter("k and l must be at least 1".into()));
    }
    let group = Group::new(m)?;
    let walker = PnWalker::new(&group);
    let pairs = map_samples(mc, OP_MIXING, k + ell, |q| {
        let idx: Vec<usize> = walker.walk(q).collect();
        (idx[k - 1], idx[k + ell - 1])
    })?;
    let n = group.len();
    let s = pairs.len() as f64;
    let mut joint = vec![0u64; n * n];
    let mut left = vec![0u64; n];
    let mut right = vec![0u64; n];
    for &(a, b) in &pairs {
        joint[a * n + b] += 1;
        left[a] += 1;
        right[b] += 1;
    }
    let (mut best, mut best_se, mut max_se) = (0.0f64, 0.0f64, 0.0f64);
    let mut cells = 0usize;
    for a in (0..n).filter(|&a| left[a] > 0) {
        for b in (0..n).filter(|&b| right[b] > 0) {
            cells += 1;
            let pj = joint[a * n + b] as f64 / s;
            let pa = left[a] as f64 / s;
            let pb = right[b] as f64 / s;
            let d = (pj - pa * pb).abs();
            let se = (pa * pb * (1.0 - pa * pb) / s).sqrt();
            max_se = max_se.max(se);
            if d > best {
                best = d;
                best_se = se;
            }
        }
    }
    let noise_floor = (2.0 * (cells.max(2) as f64).ln()).sqrt() * max_se;
    Ok(MixingEstimate {
        m: m.m(),
        k,
        ell,
        samples: pairs.len(),
        estimate: best,
        std_error: best_se,
        noise_floor,
    })
}
