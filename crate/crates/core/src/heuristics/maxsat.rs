use rand::Rng as _;

use crate::instance::{var_of, CnfFormula};
use crate::rng;

/// Sets each variable to the polarity it occurs with most often (ties: true).
pub fn literal_majority(f: &CnfFormula) -> Vec<bool> {
    let mut balance = vec![0i64; f.num_vars];
    for &l in f.clauses.iter().flatten() {
        balance[var_of(l)] += if l > 0 { 1 } else { -1 };
    }
    balance.into_iter().map(|b| b >= 0).collect()
}

pub fn random_assignment(f: &CnfFormula, rng: &mut rng::Rng) -> Vec<bool> {
    (0..f.num_vars).map(|_| rng.gen_bool(0.5)).collect()
}

struct FlipState<'a> {
    f: &'a CnfFormula,
    occurs: Vec<Vec<usize>>,
    true_count: Vec<u32>,
    assignment: Vec<bool>,
}

impl<'a> FlipState<'a> {
    fn new(f: &'a CnfFormula, occurs: Vec<Vec<usize>>, assignment: Vec<bool>) -> Self {
        let true_count = f
            .clauses
            .iter()
            .map(|c| c.iter().filter(|&&l| assignment[var_of(l)] == (l > 0)).count() as u32)
            .collect();
        FlipState { f, occurs, true_count, assignment }
    }

    /// Satisfied-clause change if `v` were flipped.
    fn gain(&self, v: usize) -> i64 {
        let mut g = 0;
        for &c in &self.occurs[v] {
            let lit_true = self.f.clauses[c]
                .iter()
                .filter(|&&l| var_of(l) == v)
                .any(|&l| self.assignment[v] == (l > 0));
            if lit_true && self.true_count[c] == 1 {
                g -= 1;
            } else if !lit_true && self.true_count[c] == 0 {
                g += 1;
            }
        }
        g
    }

    fn flip(&mut self, v: usize) {
        for &c in &self.occurs[v] {
            let before = self.f.clauses[c]
                .iter()
                .filter(|&&l| var_of(l) == v)
                .any(|&l| self.assignment[v] == (l > 0));
            if before {
                self.true_count[c] -= 1;
            } else {
                self.true_count[c] += 1;
            }
        }
        self.assignment[v] = !self.assignment[v];
    }
}

/// Best-improvement flip hill climbing from the literal-majority assignment,
/// then from `restarts - 1` random assignments. Returns the best assignment
/// and the total number of flips performed.
pub fn greedy_flip_counted(f: &CnfFormula, seed: u64, restarts: usize) -> (Vec<bool>, u64) {
    let mut occurs = vec![Vec::new(); f.num_vars];
    for (ci, clause) in f.clauses.iter().enumerate() {
        for &l in clause {
            let v = var_of(l);
            if occurs[v].last() != Some(&ci) {
                occurs[v].push(ci);
            }
        }
    }
    let mut r = rng::stream(seed, &[0x6F11]);
    let mut best = literal_majority(f);
    let mut best_sat = f.count_satisfied(&best);
    let mut flips = 0u64;
    for restart in 0..restarts.max(1) {
        let start = if restart == 0 { literal_majority(f) } else { random_assignment(f, &mut r) };
        let mut state = FlipState::new(f, occurs.clone(), start);
        for _ in 0..10 * f.num_vars.max(1) {
            let best_move = (0..f.num_vars)
                .map(|v| (state.gain(v), std::cmp::Reverse(v)))
                .max();
            match best_move {
                Some((g, std::cmp::Reverse(v))) if g > 0 => {
                    state.flip(v);
                    flips += 1;
                }
                _ => break,
            }
        }
        let sat = f.count_satisfied(&state.assignment);
        if sat > best_sat {
            best_sat = sat;
            best = state.assignment;
        }
    }
    (best, flips)
}

pub fn greedy_flip(f: &CnfFormula, seed: u64, restarts: usize) -> Vec<bool> {
    greedy_flip_counted(f, seed, restarts).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_polarity() {
        let f = CnfFormula::new(2, vec![vec![1, -2], vec![1], vec![-2]]).unwrap();
        assert_eq!(literal_majority(&f), vec![true, false]);
    }

    #[test]
    fn flip_never_worse_than_majority() {
        let f = CnfFormula::new(
            3,
            vec![vec![-1], vec![-1, 2], vec![1, 3], vec![-3], vec![1, -2], vec![2]],
        )
        .unwrap();
        let a = greedy_flip(&f, 1, 3);
        assert!(f.count_satisfied(&a) >= f.count_satisfied(&literal_majority(&f)));
    }

    #[test]
    fn gain_matches_recount() {
        let f = CnfFormula::new(3, vec![vec![1, 2], vec![-1, 3], vec![-2, -3], vec![1]]).unwrap();
        let occurs = vec![vec![0, 1, 3], vec![0, 2], vec![1, 2]];
        let a = vec![false, true, false];
        let state = FlipState::new(&f, occurs, a.clone());
        for v in 0..3 {
            let mut b = a.clone();
            b[v] = !b[v];
            let delta = f.count_satisfied(&b) as i64 - f.count_satisfied(&a) as i64;
            assert_eq!(state.gain(v), delta);
        }
    }
}
