use std::sync::Arc;

use serde::Serialize;

use crate::cf::{bits_for_quotients, trusted_sample, Gauss, SamplingLaw};
use crate::error::{Error, Result};
use crate::seeding::{par_map_indexed, stream_rng, Purpose};
use crate::zmod::Group;

/// Shared Monte Carlo settings: how many independent `alpha`, from which
/// law, and the master seed.
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub law: Arc<dyn SamplingLaw>,
    /// Initial sampling precision; `None` picks one from the quotient count.
    pub bits: Option<u32>,
}

impl MonteCarlo {
    pub fn new(samples: usize, seed: u64, law: Arc<dyn SamplingLaw>) -> Self {
        MonteCarlo {
            samples,
            seed,
            law,
            bits: None,
        }
    }

    pub fn gauss(samples: usize, seed: u64) -> Self {
        Self::new(samples, seed, Arc::new(Gauss))
    }

    pub fn with_bits(mut self, bits: Option<u32>) -> Self {
        self.bits = bits;
        self
    }
}

/// Stream family of an operation, separated per law so that runs of the same
/// seed under different laws use independent randomness.
pub(crate) fn purpose(op: u8, law: &dyn SamplingLaw) -> Purpose {
    let law_code: u16 = match law.name() {
        "uniform" => 1,
        "gauss" => 2,
        other => 3 + (other.bytes().fold(0u16, |h, b| h.wrapping_mul(31).wrapping_add(b as u16)) % 200),
    };
    Purpose(((op as u16) << 8) | law_code)
}

pub(crate) const OP_SUMS: u8 = 1;
pub(crate) const OP_SZUSZ: u8 = 2;
pub(crate) const OP_SIGMA: u8 = 3;
pub(crate) const OP_MIXING: u8 = 4;
pub(crate) const OP_LIL: u8 = 5;

/// Evaluates `f` on the first `need` partial quotients of each sample, in
/// sample order.
pub(crate) fn map_samples<T, F>(mc: &MonteCarlo, op: u8, need: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[u64]) -> T + Sync + Send,
{
    if mc.samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let p = purpose(op, mc.law.as_ref());
    let bits = mc.bits.unwrap_or_else(|| bits_for_quotients(need));
    par_map_indexed(mc.samples, |i| {
        let mut rng = stream_rng(mc.seed, p, i as u64);
        let s = trusted_sample(&mut rng, mc.law.as_ref(), bits, need)?;
        Ok(f(s.expansion.quotients()))
    })
    .into_iter()
    .collect()
}

/// Group indices of `P_1, ..., P_N` along the quotient sequence.
pub(crate) struct PnWalker {
    table: Vec<Vec<u32>>,
    id: usize,
    m: u64,
}

impl PnWalker {
    pub fn new(group: &Group) -> Self {
        PnWalker {
            table: group.h_table(),
            id: group.identity_index(),
            m: group.modulus().m() as u64,
        }
    }

    pub fn walk<'a>(&'a self, quotients: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
        let mut g = self.id;
        quotients.iter().map(move |&a| {
            g = self.table[g][(a % self.m) as usize] as usize;
            g
        })
    }
}

/// Summary of one Monte Carlo statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub statistic: String,
    pub n: usize,
    pub samples: usize,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Uniform;
    use crate::zmod::{ModMatrix, Modulus};

    #[test]
    fn purposes_differ_by_law_and_op() {
        assert_ne!(purpose(OP_SUMS, &Uniform), purpose(OP_SUMS, &Gauss));
        assert_ne!(purpose(OP_SUMS, &Gauss), purpose(OP_SZUSZ, &Gauss));
    }

    #[test]
    fn walker_matches_matrix_products() {
        let m = Modulus::new(5).unwrap();
        let g = Group::new(&m).unwrap();
        let w = PnWalker::new(&g);
        let qs = [3u64, 1, 4, 1, 5, 9, 2, 6];
        let mut p = ModMatrix::identity(5);
        for (i, a) in w.walk(&qs).zip(qs) {
            p = p.mul(&ModMatrix::h(a, 5));
            assert_eq!(g.get(i), p);
        }
    }

    #[test]
    fn map_samples_is_ordered_and_reproducible() {
        let mc = MonteCarlo::gauss(16, 9);
        let a = map_samples(&mc, OP_SUMS, 20, |q| q.to_vec()).unwrap();
        let b = map_samples(&mc, OP_SUMS, 20, |q| q.to_vec()).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|q| q.len() == 20));
        assert_ne!(a[0], a[1]);
    }
}
