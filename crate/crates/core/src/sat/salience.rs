use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{var_of, CnfFormula};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SalienceProfile {
    pub sigma_hat: Vec<f64>,
    pub m: usize,
}

fn is_non_horn(c: &[i32]) -> bool {
    c.iter().filter(|&&l| l > 0).count() >= 2
}

/// Fraction of clauses that are non-Horn and contain `x_i` positively.
pub fn salience(f: &CnfFormula, i: usize) -> Result<f64> {
    if i >= f.num_vars {
        return Err(Error::InvalidParameter(format!(
            "variable {i} out of range for {} variables",
            f.num_vars
        )));
    }
    Ok(salience_vector(f)?[i])
}

/// Salience of every variable in one scan over the clauses.
pub fn salience_vector(f: &CnfFormula) -> Result<Vec<f64>> {
    let m = f.num_clauses();
    if m == 0 {
        return Err(Error::EmptyInput("formula has no clauses"));
    }
    let mut counts = vec![0usize; f.num_vars];
    for c in &f.clauses {
        if is_non_horn(c) {
            for &lit in c {
                if lit > 0 {
                    counts[var_of(lit)] += 1;
                }
            }
        }
    }
    Ok(counts.into_iter().map(|k| k as f64 / m as f64).collect())
}

/// Mean salience over a sample. Per-formula vectors are computed in parallel
/// and summed in sample order.
pub fn estimate_salience(sample: &[CnfFormula]) -> Result<SalienceProfile> {
    let first = sample.first().ok_or(Error::EmptyInput("salience sample"))?;
    let d = first.num_vars;
    if let Some(bad) = sample.iter().find(|f| f.num_vars != d) {
        return Err(Error::ShapeMismatch(format!(
            "sample mixes {d} and {} variables",
            bad.num_vars
        )));
    }
    let vectors: Vec<Vec<f64>> = sample.par_iter().map(salience_vector).collect::<Result<_>>()?;
    let mut sum = vec![0.0; d];
    for v in &vectors {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
    }
    let m = sample.len();
    Ok(SalienceProfile {
        sigma_hat: sum.into_iter().map(|s| s / m as f64).collect(),
        m,
    })
}

/// Indices of the `k` largest entries, ties to the smaller index; sorted.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Top-k variables by mean salience over the sample.
pub fn recover_backdoor(sample: &[CnfFormula], k: usize) -> Result<Vec<usize>> {
    let profile = estimate_salience(sample)?;
    let d = profile.sigma_hat.len();
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("k={k} must lie in 1..={d}")));
    }
    Ok(top_k(&profile.sigma_hat, k))
}

/// Sample size m = ceil(8 gamma^-2 ln(2d/delta)) with gamma = rho(1/k - 1/(d-k)).
pub fn theorem3_samples(d: usize, k: usize, rho: f64, delta: f64) -> Result<usize> {
    if k == 0 || 2 * k >= d {
        return Err(Error::InvalidParameter(format!(
            "margin vanishes unless 1 <= k < d/2 (k={k}, d={d})"
        )));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!("rho {rho} must lie in (0,1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} must lie in (0,1)")));
    }
    let gamma = crate::generators::horn_backdoor_margin(d, k, rho);
    Ok((8.0 / (gamma * gamma) * (2.0 * d as f64 / delta).ln()).ceil() as usize)
}
