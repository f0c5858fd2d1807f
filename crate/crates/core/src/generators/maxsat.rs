//! MaxSAT families. A hidden assignment is drawn from anchor bits and
//! family-fixed rules; every clause is satisfied by it, so the optimum is M.

use rand::seq::{index::sample, SliceRandom};
use rand::Rng as _;
use serde_json::json;

use super::{meta, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{lit_of, CnfFormula, Payload, Solution};
use crate::rng::Rng;

struct Builder {
    x: Vec<bool>,
    clauses: Vec<Vec<i32>>,
}

impl Builder {
    /// Literal that is true under the hidden assignment iff `want` is true.
    fn lit(&self, v: usize, want: bool) -> i32 {
        lit_of(v, self.x[v] == want)
    }

    /// Forbids the tuple `vals` over `vars` (one clause negating it).
    fn forbid(&mut self, vars: &[usize], vals: &[bool]) {
        self.clauses
            .push(vars.iter().zip(vals).map(|(&v, &b)| lit_of(v, !b)).collect());
    }

    /// Encodes `y == f(inputs)` by forbidding every violating row of the truth table.
    fn define(&mut self, y: usize, inputs: &[usize], f: impl Fn(&[bool]) -> bool) {
        let k = inputs.len();
        let mut vars = inputs.to_vec();
        vars.push(y);
        for mask in 0..1u32 << k {
            let row: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            let mut vals = row.clone();
            vals.push(!f(&row));
            self.forbid(&vars, &vals);
        }
    }

    /// Random 3-clause over `pool` made true under the hidden assignment by
    /// flipping one literal if needed.
    fn random_clause(&mut self, pool: &[usize], rng: &mut Rng) {
        let w = pool.len().min(3);
        let vars: Vec<usize> = sample(rng, pool.len(), w).into_iter().map(|i| pool[i]).collect();
        let mut clause: Vec<i32> = vars.iter().map(|&v| lit_of(v, rng.gen_bool(0.5))).collect();
        if !CnfFormula::clause_satisfied(&clause, &self.x) {
            let i = rng.gen_range(0..w);
            clause[i] = -clause[i];
        }
        self.clauses.push(clause);
    }

    fn finish(self, d: usize, m: usize, metadata: std::collections::BTreeMap<String, serde_json::Value>) -> Result<Planted> {
        if self.clauses.len() != m {
            return Err(Error::InvalidParameter(format!(
                "built {} clauses, expected {m}",
                self.clauses.len()
            )));
        }
        let f = CnfFormula::new(d, self.clauses)?;
        debug_assert!(f.is_satisfied_by(&self.x));
        Ok(Planted {
            payload: Payload::Cnf(f),
            optimum_value: m as f64,
            optimum_solution: Solution::Assignment(self.x),
            metadata,
        })
    }
}

fn check(d: usize, m: usize, min_vars: usize) -> Result<()> {
    if d < min_vars.max(3) || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} variables and one clause",
            min_vars.max(3)
        )));
    }
    Ok(())
}

/// Communities of variables; each non-anchor bit is the parity of two anchor
/// bits of its community plus a fixed offset.
pub(super) fn community_parity(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (d, m, c, a) = (p.u("vars")?, p.u("clauses")?, p.u("communities")?, p.u("anchorsPerCommunity")?);
    check(d, m, c * (a + 1))?;
    if a < 2 || c == 0 {
        return Err(Error::InvalidParameter("community-parity needs >= 2 anchors per community".into()));
    }
    let mut layout: Vec<usize> = (0..d).collect();
    layout.shuffle(fam);
    let communities: Vec<Vec<usize>> = (0..c)
        .map(|i| layout[i * d / c..(i + 1) * d / c].to_vec())
        .collect();
    // Family rules: (var, anchor a, anchor b, offset).
    let mut rules = Vec::new();
    for com in &communities {
        for &v in &com[a..] {
            let pick = sample(fam, a, 2);
            rules.push((v, com[pick.index(0)], com[pick.index(1)], fam.gen_bool(0.5)));
        }
    }
    let mut x = vec![false; d];
    for com in &communities {
        for &v in &com[..a] {
            x[v] = rng.gen_bool(0.5);
        }
    }
    for &(v, s, t, off) in &rules {
        x[v] = x[s] ^ x[t] ^ off;
    }
    let mut b = Builder { x, clauses: Vec::new() };
    let encoded = rules.len().min(m * 85 / 100 / 4);
    for &(v, s, t, off) in &rules[..encoded] {
        b.define(v, &[s, t], |r| r[0] ^ r[1] ^ off);
    }
    while b.clauses.len() < m {
        let com = &communities[rng.gen_range(0..c)];
        b.random_clause(com, rng);
    }
    b.clauses.shuffle(rng);
    let anchors: Vec<Vec<usize>> = communities.iter().map(|com| com[..a].to_vec()).collect();
    let metadata = meta(vec![
        ("communities", json!(communities)),
        ("anchors", json!(anchors)),
        ("encodedRules", json!(encoded)),
    ]);
    b.finish(d, m, metadata)
}

/// Non-anchor bits copy or negate an anchor; the final clause lists the
/// anchors with their hidden polarity.
pub(super) fn last_clause_signal(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (d, m, a) = (p.u("vars")?, p.u("clauses")?, p.u("anchors")?);
    check(d, m, a + 1)?;
    if a == 0 || m < 2 {
        return Err(Error::InvalidParameter("last-clause-signal needs anchors and >= 2 clauses".into()));
    }
    let mut layout: Vec<usize> = (0..d).collect();
    layout.shuffle(fam);
    let anchors = layout[..a].to_vec();
    let table: Vec<(usize, usize, bool)> = layout[a..]
        .iter()
        .map(|&v| (v, anchors[fam.gen_range(0..a)], fam.gen_bool(0.5)))
        .collect();
    let mut x = vec![false; d];
    for &v in &anchors {
        x[v] = rng.gen_bool(0.5);
    }
    for &(v, src, neg) in &table {
        x[v] = x[src] ^ neg;
    }
    let mut b = Builder { x, clauses: Vec::new() };
    let encoded = table.len().min((m - 1) * 2 / 3 / 2);
    for &(v, src, neg) in &table[..encoded] {
        b.define(v, &[src], |r| r[0] ^ neg);
    }
    let all: Vec<usize> = (0..d).collect();
    while b.clauses.len() < m - 1 {
        b.random_clause(&all, rng);
    }
    b.clauses.shuffle(rng);
    let signal: Vec<i32> = anchors.iter().map(|&v| b.lit(v, true)).collect();
    b.clauses.push(signal);
    let metadata = meta(vec![
        ("anchors", json!(anchors)),
        ("copyTable", json!(table)),
        ("encodedRules", json!(encoded)),
    ]);
    b.finish(d, m, metadata)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
enum Gate {
    And,
    Or,
    Xor,
    Copy,
}

impl Gate {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Gate::And => a && b,
            Gate::Or => a || b,
            Gate::Xor => a ^ b,
            Gate::Copy => a,
        }
    }
}

/// Blocks of variables follow anchor-dependent gates whose type depends on a
/// latent regime; the rest of the budget is noise and cross-block bridges.
pub(super) fn latent_backdoor(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let (d, m) = (p.u("vars")?, p.u("clauses")?);
    let (blocks, a, regimes) = (p.u("blocks")?, p.u("anchors")?, p.u("regimes")?);
    let noise = p.prob("noise")?;
    check(d, m, a + blocks * 3)?;
    if a < 2 || blocks == 0 || regimes == 0 {
        return Err(Error::InvalidParameter("latent-backdoor needs >= 2 anchors, blocks and regimes".into()));
    }
    let mut layout: Vec<usize> = (0..d).collect();
    layout.shuffle(fam);
    let anchors = layout[..a].to_vec();
    let rest = &layout[a..];
    let block_vars: Vec<Vec<usize>> = (0..blocks)
        .map(|i| rest[i * rest.len() / blocks..(i + 1) * rest.len() / blocks].to_vec())
        .collect();
    const GATES: [Gate; 4] = [Gate::And, Gate::Or, Gate::Xor, Gate::Copy];
    let gate_table: Vec<Vec<Gate>> = (0..regimes)
        .map(|_| (0..blocks).map(|_| GATES[fam.gen_range(0..4)]).collect())
        .collect();
    // Per variable: (var, block, anchor a, anchor b, negate)
    let wiring: Vec<(usize, usize, usize, usize, bool)> = block_vars
        .iter()
        .enumerate()
        .flat_map(|(bi, vars)| vars.iter().map(move |&v| (v, bi)))
        .map(|(v, bi)| {
            let pick = sample(fam, a, 2);
            (v, bi, anchors[pick.index(0)], anchors[pick.index(1)], fam.gen_bool(0.5))
        })
        .collect();
    let regime = rng.gen_range(0..regimes);
    let mut x = vec![false; d];
    for &v in &anchors {
        x[v] = rng.gen_bool(0.5);
    }
    for &(v, bi, s, t, neg) in &wiring {
        x[v] = gate_table[regime][bi].eval(x[s], x[t]) ^ neg;
    }
    let mut b = Builder { x, clauses: Vec::new() };
    let rule_budget = ((m as f64) * (1.0 - noise)).floor() as usize;
    let mut encoded = 0;
    for &(v, bi, s, t, neg) in &wiring {
        let gate = gate_table[regime][bi];
        let cost = match gate {
            Gate::Copy => 2,
            _ => 4,
        };
        if b.clauses.len() + cost > rule_budget {
            break;
        }
        match gate {
            Gate::Copy => b.define(v, &[s], |r| r[0] ^ neg),
            g => b.define(v, &[s, t], |r| g.eval(r[0], r[1]) ^ neg),
        }
        encoded += 1;
    }
    let all: Vec<usize> = (0..d).collect();
    let mut bridge = true;
    while b.clauses.len() < m {
        if bridge && blocks > 1 {
            let i = rng.gen_range(0..blocks);
            let j = (i + 1) % blocks;
            let pool: Vec<usize> = block_vars[i].iter().chain(&block_vars[j]).copied().collect();
            b.random_clause(&pool, rng);
        } else {
            b.random_clause(&all, rng);
        }
        bridge = !bridge;
    }
    b.clauses.shuffle(rng);
    let metadata = meta(vec![
        ("anchors", json!(anchors)),
        ("regime", json!(regime)),
        ("gates", json!(gate_table[regime])),
        ("blocks", json!(block_vars)),
        ("encodedRules", json!(encoded)),
    ]);
    b.finish(d, m, metadata)
}
