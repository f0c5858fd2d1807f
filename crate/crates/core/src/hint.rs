//! Margin-based hint identification: score every hypothesis on a sample and
//! keep the empirical-mean maximizer.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::PublicInstance;
use crate::sat::salience_vector;

type ScoreFn<'a> = dyn Fn(usize, &PublicInstance) -> f64 + Send + Sync + 'a;

/// Finite family of hypotheses with scores in [0,1].
pub struct ScoreFamily<'a> {
    pub hypotheses: Vec<String>,
    score: Box<ScoreFn<'a>>,
}

impl<'a> ScoreFamily<'a> {
    /// `score(h, x)` receives the hypothesis index into `hypotheses`.
    pub fn new(hypotheses: Vec<String>, score: impl Fn(usize, &PublicInstance) -> f64 + Send + Sync + 'a) -> Self {
        ScoreFamily {
            hypotheses,
            score: Box::new(score),
        }
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RecoveryResult {
    pub chosen_id: String,
    pub chosen_index: usize,
    /// One mean per hypothesis, in family order.
    pub empirical_means: Vec<f64>,
    /// Best mean minus runner-up (0 with a single hypothesis).
    pub margin_observed: f64,
    /// Scores that fell outside [0,1] and were clamped.
    pub clamped: usize,
}

/// Sum by recursive halving; the split points depend only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Empirical-mean maximizer over `sample`; ties go to the smallest id.
pub fn recover_hint(fam: &ScoreFamily<'_>, sample: &[PublicInstance]) -> Result<RecoveryResult> {
    if fam.is_empty() {
        return Err(Error::EmptyInput("score family"));
    }
    if sample.is_empty() {
        return Err(Error::EmptyInput("hint sample"));
    }
    let clamped = AtomicUsize::new(0);
    let means: Vec<f64> = (0..fam.len())
        .into_par_iter()
        .map(|h| {
            let scores: Vec<f64> = sample
                .par_iter()
                .map(|x| {
                    let s = (fam.score)(h, x);
                    if (0.0..=1.0).contains(&s) {
                        s
                    } else {
                        clamped.fetch_add(1, Ordering::Relaxed);
                        if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) }
                    }
                })
                .collect();
            pairwise_sum(&scores) / sample.len() as f64
        })
        .collect();
    let clamped = clamped.into_inner();
    if clamped > 0 {
        log::warn!("clamped {clamped} scores into [0,1]");
    }
    let best = (0..fam.len())
        .max_by(|&a, &b| {
            means[a]
                .total_cmp(&means[b])
                .then_with(|| fam.hypotheses[b].cmp(&fam.hypotheses[a]))
        })
        .unwrap();
    let runner_up = (0..fam.len())
        .filter(|&h| h != best)
        .map(|h| means[h])
        .max_by(f64::total_cmp);
    Ok(RecoveryResult {
        chosen_id: fam.hypotheses[best].clone(),
        chosen_index: best,
        margin_observed: runner_up.map_or(0.0, |r| means[best] - r),
        empirical_means: means,
        clamped,
    })
}

/// n = ceil((2/gamma^2) ln(2N/delta)).
pub fn sufficient_samples(gamma: f64, n: usize, delta: f64) -> Result<usize> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("margin {gamma} must be positive")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one hypothesis".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} must lie in (0,1)")));
    }
    Ok(sufficient_samples_real(gamma, n, delta).ceil() as usize)
}

/// The bound before rounding up.
pub fn sufficient_samples_real(gamma: f64, n: usize, delta: f64) -> f64 {
    2.0 / (gamma * gamma) * (2.0 * n as f64 / delta).ln()
}

/// All k-subsets of 0..d in lexicographic order.
pub fn k_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..d {
            if d - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Hypotheses are k-subsets B of the variables; the score of B on a formula
/// is the mean salience of its members. Ids are zero-padded so that string
/// order matches subset order.
pub fn backdoor_score_family(d: usize, k: usize) -> ScoreFamily<'static> {
    let subsets = k_subsets(d, k);
    let width = d.saturating_sub(1).to_string().len();
    let ids = subsets
        .iter()
        .map(|s| s.iter().map(|v| format!("{v:0width$}")).collect::<Vec<_>>().join(","))
        .collect();
    ScoreFamily::new(ids, move |h, x| {
        let Ok(f) = x.cnf() else { return 0.0 };
        let Ok(sal) = salience_vector(f) else { return 0.0 };
        subsets[h].iter().map(|&v| sal[v]).sum::<f64>() / subsets[h].len() as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CnfFormula, Payload, ProblemClass};

    fn dummy(n: usize) -> Vec<PublicInstance> {
        (0..n)
            .map(|i| {
                PublicInstance::new(
                    format!("x{i}"),
                    ProblemClass::MaxSat,
                    Payload::Cnf(CnfFormula::new(1, vec![vec![1]]).unwrap()),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn argmax_and_margin() {
        let means = [0.7, 0.5, 0.2];
        let fam = ScoreFamily::new(vec!["a".into(), "b".into(), "c".into()], move |h, _| means[h]);
        let r = recover_hint(&fam, &dummy(4)).unwrap();
        assert_eq!(r.chosen_id, "a");
        assert!((r.margin_observed - 0.2).abs() < 1e-12);
    }

    #[test]
    fn single_hypothesis() {
        let fam = ScoreFamily::new(vec!["only".into()], |_, _| 0.0);
        let r = recover_hint(&fam, &dummy(2)).unwrap();
        assert_eq!(r.chosen_id, "only");
        assert_eq!(r.margin_observed, 0.0);
    }

    #[test]
    fn ties_go_to_smallest_id() {
        let fam = ScoreFamily::new(vec!["b".into(), "a".into()], |_, _| 0.5);
        assert_eq!(recover_hint(&fam, &dummy(3)).unwrap().chosen_id, "a");
    }

    #[test]
    fn out_of_range_scores_clamped() {
        let fam = ScoreFamily::new(vec!["a".into(), "b".into()], |h, _| if h == 0 { 1.5 } else { -0.2 });
        let r = recover_hint(&fam, &dummy(3)).unwrap();
        assert_eq!(r.empirical_means, vec![1.0, 0.0]);
        assert_eq!(r.clamped, 6);
    }

    #[test]
    fn empty_inputs_rejected() {
        let fam = ScoreFamily::new(vec![], |_, _| 0.0);
        assert!(recover_hint(&fam, &dummy(1)).is_err());
        let fam = ScoreFamily::new(vec!["a".into()], |_, _| 0.0);
        assert!(recover_hint(&fam, &[]).is_err());
    }

    #[test]
    fn sample_bound() {
        assert_eq!(sufficient_samples(0.2, 100, 0.05).unwrap(), 415);
        assert_eq!(sufficient_samples(1.0, 1, 0.5).unwrap(), 3);
        let a = sufficient_samples_real(0.1, 10, 0.1);
        let b = sufficient_samples_real(0.2, 10, 0.1);
        assert!((a / b - 4.0).abs() < 1e-12);
        assert!(sufficient_samples(0.0, 3, 0.1).is_err());
    }

    #[test]
    fn subsets_enumerated_in_order() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[0], vec![0, 1]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        let fam = backdoor_score_family(12, 2);
        assert_eq!(fam.hypotheses[0], "00,01");
        assert_eq!(fam.len(), 66);
    }
}
