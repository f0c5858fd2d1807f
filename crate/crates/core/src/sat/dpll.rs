use crate::instance::{var_of, CnfFormula};

use super::SatResult;

/// Complete DPLL with unit propagation and pure-literal elimination. Branches
/// on the lowest-index variable still occurring in the formula, true first.
/// Variables left unconstrained are set false.
pub fn dpll(f: &CnfFormula) -> SatResult {
    dpll_clauses(f.num_vars, f.clauses.clone())
}

pub(crate) fn dpll_clauses(num_vars: usize, clauses: Vec<Vec<i32>>) -> SatResult {
    if clauses.iter().any(|c| c.is_empty()) {
        return SatResult::Unsat;
    }
    let mut assign = vec![None; num_vars];
    if search(clauses, &mut assign) {
        SatResult::Sat(assign.into_iter().map(|a| a.unwrap_or(false)).collect())
    } else {
        SatResult::Unsat
    }
}

/// Drops clauses satisfied under `val` and removes falsified literals.
/// Returns None when a clause empties.
fn simplify(clauses: &[Vec<i32>], val: &[Option<bool>]) -> Option<Vec<Vec<i32>>> {
    let mut out = Vec::with_capacity(clauses.len());
    'clause: for c in clauses {
        let mut kept = Vec::with_capacity(c.len());
        for &lit in c {
            match val[var_of(lit)] {
                Some(b) if b == (lit > 0) => continue 'clause,
                Some(_) => {}
                None => kept.push(lit),
            }
        }
        if kept.is_empty() {
            return None;
        }
        out.push(kept);
    }
    Some(out)
}

fn search(mut clauses: Vec<Vec<i32>>, assign: &mut [Option<bool>]) -> bool {
    let mut trail: Vec<usize> = Vec::new();
    let undo = |assign: &mut [Option<bool>], trail: &[usize]| {
        for &v in trail {
            assign[v] = None;
        }
    };
    let n = assign.len();
    loop {
        if clauses.is_empty() {
            return true;
        }
        let mut forced = false;
        let mut conflict = false;
        for c in &clauses {
            if c.len() == 1 {
                let (v, b) = (var_of(c[0]), c[0] > 0);
                match assign[v] {
                    None => {
                        assign[v] = Some(b);
                        trail.push(v);
                        forced = true;
                    }
                    Some(x) if x != b => {
                        conflict = true;
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        if !conflict && !forced {
            // polarity bits: 1 = positive seen, 2 = negative seen
            let mut seen = vec![0u8; n];
            for c in &clauses {
                for &lit in c {
                    seen[var_of(lit)] |= if lit > 0 { 1 } else { 2 };
                }
            }
            for v in 0..n {
                if seen[v] == 1 || seen[v] == 2 {
                    assign[v] = Some(seen[v] == 1);
                    trail.push(v);
                    forced = true;
                }
            }
        }
        if conflict {
            undo(assign, &trail);
            return false;
        }
        if !forced {
            break;
        }
        match simplify(&clauses, assign) {
            Some(c) => clauses = c,
            None => {
                undo(assign, &trail);
                return false;
            }
        }
    }
    let v = clauses.iter().flatten().map(|&l| var_of(l)).min().expect("nonempty clauses");
    for b in [true, false] {
        assign[v] = Some(b);
        if let Some(next) = simplify(&clauses, assign) {
            if search(next, assign) {
                return true;
            }
        }
    }
    assign[v] = None;
    undo(assign, &trail);
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn brute(f: &CnfFormula) -> bool {
        (0..1u32 << f.num_vars).any(|m| {
            let a: Vec<bool> = (0..f.num_vars).map(|i| m >> i & 1 == 1).collect();
            f.is_satisfied_by(&a)
        })
    }

    #[test]
    fn trivial_cases() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(dpll(&f), SatResult::Unsat);
        let e = CnfFormula::new(0, vec![]).unwrap();
        assert_eq!(dpll(&e), SatResult::Sat(vec![]));
    }

    #[test]
    fn agrees_with_enumeration() {
        let mut r = crate::rng::from_seed(21);
        for _ in 0..150 {
            let d = r.gen_range(1..=12);
            let m = r.gen_range(1..=6 * d);
            let clauses: Vec<Vec<i32>> = (0..m)
                .map(|_| {
                    let w = r.gen_range(1..=3.min(d));
                    rand::seq::index::sample(&mut r, d, w)
                        .into_iter()
                        .map(|v| crate::instance::lit_of(v, r.gen_bool(0.5)))
                        .collect()
                })
                .collect();
            let f = CnfFormula::new(d, clauses).unwrap();
            let got = dpll(&f);
            assert_eq!(got.is_sat(), brute(&f));
            if let SatResult::Sat(a) = got {
                assert!(f.is_satisfied_by(&a));
            }
        }
    }
}
