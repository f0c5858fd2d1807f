//! Registered analysis and solver templates. Proposals name a template by
//! id and pass parameters; no program text is generated at run time.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::heuristics::{by_id, two_opt_solver, DiagnosticTrace, TwoOptStart, TWO_OPT_MAX_PASSES, TWO_OPT_STARTS};
use crate::instance::{CnfFormula, PublicInstance, Solution};
use crate::sat::{estimate_salience, top_k, BackdoorMaxSatSolver, CompiledBackdoorSolver};
use crate::generators::payload_size;
use crate::heuristics::MeasuredSolver;

pub type AnalysisFn = fn(&Value, &[PublicInstance]) -> Result<Value>;
pub type SolverFn = fn(&Value, &PublicInstance, &Value, u64) -> Result<(Solution, DiagnosticTrace)>;

pub const ANALYSIS_TEMPLATES: &[&str] = &["none", "size-profile", "backdoor-salience", "fail", "panic", "sleep"];
pub const SOLVER_TEMPLATES: &[&str] = &["catalog", "backdoor", "two-opt"];

pub fn analysis_template(id: &str) -> Option<AnalysisFn> {
    Some(match id {
        "none" => |_, train| Ok(json!({ "instances": train.len() })),
        "size-profile" => size_profile,
        "backdoor-salience" => backdoor_salience,
        "fail" => |_, _| Err(Error::Evaluation("analysis template `fail` always fails".into())),
        "panic" => |_, _| panic!("analysis template `panic` invoked"),
        "sleep" => |p, train| {
            let ms = p.get("ms").and_then(Value::as_u64).unwrap_or(0);
            std::thread::sleep(std::time::Duration::from_millis(ms));
            Ok(json!({ "instances": train.len() }))
        },
        _ => return None,
    })
}

pub fn solver_template(id: &str) -> Option<SolverFn> {
    Some(match id {
        "catalog" => catalog_solver,
        "backdoor" => backdoor_solver,
        "two-opt" => two_opt,
        _ => return None,
    })
}

fn size_profile(_: &Value, train: &[PublicInstance]) -> Result<Value> {
    let sizes: Vec<usize> = train.iter().map(|x| payload_size(&x.payload).0).collect();
    let mean = if sizes.is_empty() {
        0.0
    } else {
        sizes.iter().sum::<usize>() as f64 / sizes.len() as f64
    };
    Ok(json!({
        "instances": train.len(),
        "meanSize": mean,
        "maxSize": sizes.iter().copied().max().unwrap_or(0),
    }))
}

fn param_usize(p: &Value, key: &str, default: usize) -> Result<usize> {
    match p.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::InvalidParameter(format!("template parameter `{key}` must be a nonnegative integer"))),
    }
}

/// Top-k variables by mean salience over the training formulas.
fn backdoor_salience(p: &Value, train: &[PublicInstance]) -> Result<Value> {
    let k = param_usize(p, "k", 2)?;
    let formulas: Vec<CnfFormula> = train.iter().map(|x| x.cnf().cloned()).collect::<Result<_>>()?;
    if formulas.is_empty() {
        return Ok(json!({ "backdoor": [], "m": 0 }));
    }
    let profile = estimate_salience(&formulas)?;
    let k = k.min(profile.sigma_hat.len());
    Ok(json!({
        "backdoor": top_k(&profile.sigma_hat, k),
        "m": profile.m,
        "salience": profile.sigma_hat,
    }))
}

fn catalog_solver(p: &Value, x: &PublicInstance, _: &Value, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
    let id = p
        .get("solverId")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidParameter("catalog template needs `solverId`".into()))?;
    by_id(x.class, id)?.solve(x, seed)
}

fn backdoor_solver(_: &Value, x: &PublicInstance, summary: &Value, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
    let backdoor: Vec<usize> = serde_json::from_value(summary.get("backdoor").cloned().unwrap_or(json!([])))?;
    let f = x.cnf()?;
    let solver = CompiledBackdoorSolver::new(f.num_vars, &backdoor)?;
    BackdoorMaxSatSolver::new("backdoor", solver).solve(x, seed)
}

fn two_opt(p: &Value, x: &PublicInstance, _: &Value, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
    let passes = param_usize(p, "maxPasses", TWO_OPT_MAX_PASSES)?;
    let start = match p.get("start").and_then(Value::as_str).unwrap_or("random") {
        "random" => TwoOptStart::Random(param_usize(p, "starts", TWO_OPT_STARTS)?),
        "nearest-neighbor" => TwoOptStart::NearestNeighbor,
        "farthest-insertion" => TwoOptStart::FarthestInsertion,
        other => return Err(Error::InvalidParameter(format!("unknown 2-opt start `{other}`"))),
    };
    two_opt_solver("two-opt", start, passes).solve(x, seed)
}
