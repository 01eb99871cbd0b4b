use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::zmod::{Group, ModMatrix};

/// A real function on `G = G_1 ∪ G_{-1}` with exact rational values.
#[derive(Debug, Clone)]
pub struct TestFunction {
    label: String,
    group: Arc<Group>,
    values: Vec<BigRational>,
    values_f64: Vec<f64>,
    /// Coset means of `G_1` and `G_{-1}`.
    means: [BigRational; 2],
    fbar_f64: Vec<f64>,
}

impl TestFunction {
    pub fn from_rationals(label: &str, group: Arc<Group>, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != group.len() {
            return Err(Error::InvalidParameter(format!(
                "test function has {} values for a group of order {}",
                values.len(),
                group.len()
            )));
        }
        let mean = |parity: usize| {
            let r = group.class_range(parity);
            let len = r.len();
            r.map(|i| values[i].clone()).sum::<BigRational>() / BigInt::from(len)
        };
        let means = [mean(0), mean(1)];
        let values_f64: Vec<f64> = values.iter().map(to_f64).collect();
        let fbar_f64 = (0..values.len())
            .map(|i| to_f64(&(&values[i] - &means[group.class_of(i)])))
            .collect();
        Ok(TestFunction {
            label: label.to_string(),
            group,
            values,
            values_f64,
            means,
            fbar_f64,
        })
    }

    pub fn constant(group: Arc<Group>, c: BigRational) -> Self {
        let values = vec![c.clone(); group.len()];
        Self::from_rationals(&format!("constant {c}"), group, values).expect("sized")
    }

    pub fn indicator(group: Arc<Group>, g: &ModMatrix) -> Result<Self> {
        let i = group
            .index_of(g)
            .ok_or_else(|| Error::InvalidParameter(format!("{g} is not in G")))?;
        let mut values = vec![BigRational::zero(); group.len()];
        values[i] = BigRational::from_integer(1.into());
        Self::from_rationals(&format!("indicator {g}"), group, values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values_f64[i]
    }

    pub fn values_f64(&self) -> &[f64] {
        &self.values_f64
    }

    pub fn exact_value(&self, i: usize) -> &BigRational {
        &self.values[i]
    }

    /// `f - (mean of f on the coset of g)`.
    pub fn fbar(&self, i: usize) -> f64 {
        self.fbar_f64[i]
    }

    pub fn fbar_exact(&self, i: usize) -> BigRational {
        &self.values[i] - &self.means[self.group.class_of(i)]
    }

    pub fn coset_mean(&self, parity: usize) -> &BigRational {
        &self.means[self.group.class_of(self.group.class_range(parity).start)]
    }

    /// True when `fbar` vanishes identically.
    pub fn is_coset_constant(&self) -> bool {
        (0..self.values.len()).all(|i| self.fbar_exact(i).is_zero())
    }

    /// The largest `d > 0` with every value in `d Z`, if any value is nonzero.
    pub fn lattice_step(&self) -> Option<BigRational> {
        let nonzero: Vec<&BigRational> = self.values.iter().filter(|v| !v.is_zero()).collect();
        if nonzero.is_empty() {
            return None;
        }
        let num = nonzero.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v.numer()));
        let den = nonzero.iter().fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        Some(BigRational::new(num.abs(), den))
    }
}

/// `E_f`: the mean of `f` over all of `G`.
pub fn e_f(f: &TestFunction) -> BigRational {
    let n = f.values.len();
    f.values.iter().cloned().sum::<BigRational>() / BigInt::from(n)
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
