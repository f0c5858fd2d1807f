use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Packing data shared by the continuous LP and the 0/1 multidimensional
/// knapsack: maximize `values · x` subject to `usage[j][r]` summed over chosen
/// items staying within `capacities[r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPacking")]
pub struct PackingInstance {
    pub values: Vec<f64>,
    /// `usage[item][resource]`.
    pub usage: Vec<Vec<f64>>,
    pub capacities: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPacking {
    values: Vec<f64>,
    usage: Vec<Vec<f64>>,
    capacities: Vec<f64>,
}

impl TryFrom<RawPacking> for PackingInstance {
    type Error = Error;

    fn try_from(raw: RawPacking) -> Result<Self> {
        PackingInstance::new(raw.values, raw.usage, raw.capacities)
    }
}

impl PackingInstance {
    pub fn new(values: Vec<f64>, usage: Vec<Vec<f64>>, capacities: Vec<f64>) -> Result<Self> {
        if usage.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} usage rows for {} items",
                usage.len(),
                values.len()
            )));
        }
        let r = capacities.len();
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !values.iter().all(|&v| finite_nonneg(v)) {
            return Err(Error::InvalidParameter("values must be finite and nonnegative".into()));
        }
        for (j, row) in usage.iter().enumerate() {
            if row.len() != r {
                return Err(Error::InvalidParameter(format!(
                    "item {j} has {} usage entries, expected {r}",
                    row.len()
                )));
            }
            if !row.iter().all(|&u| finite_nonneg(u)) {
                return Err(Error::InvalidParameter(format!(
                    "item {j} usage must be finite and nonnegative"
                )));
            }
        }
        if !capacities.iter().all(|&c| c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter("capacities must be strictly positive".into()));
        }
        Ok(PackingInstance {
            values,
            usage,
            capacities,
        })
    }

    pub fn num_items(&self) -> usize {
        self.values.len()
    }

    pub fn num_resources(&self) -> usize {
        self.capacities.len()
    }

    /// Resource consumption of a (possibly fractional) item vector.
    pub fn load(&self, amounts: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut load = vec![0.0; self.num_resources()];
        for (j, row) in self.usage.iter().enumerate() {
            let a = amounts(j);
            if a != 0.0 {
                for (l, &u) in load.iter_mut().zip(row) {
                    *l += a * u;
                }
            }
        }
        load
    }

    pub fn objective(&self, amounts: impl Fn(usize) -> f64) -> f64 {
        self.values.iter().enumerate().map(|(j, &v)| v * amounts(j)).sum()
    }
}
