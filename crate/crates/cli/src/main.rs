use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hintforge::erm::{select_erm, ErmConfig};
use hintforge::generators::{benchmark_targets, generate_target, FamilySpec, SizeProfile, SplitSpec};
use hintforge::harness::dataset_io::{read_selection_splits, write_dataset};
use hintforge::harness::{
    aggregate_perturbations, run_benchmark, run_perturbation_ablation, write_report, BenchConfig, ErmMethod,
    FixedSolverMethod, Method, SynthesisMethod,
};
use hintforge::heuristics::{by_id, catalog, guarded_solve, Clock, RunConfig};
use hintforge::instance::{Instance, ProblemClass};
use hintforge::oracles::{solve_exact, OracleBudget};
use hintforge::sat::{estimate_salience, measure_speedup, top_k};
use hintforge::synthesis::{
    run_synthesis, BackdoorProposer, CatalogProposer, Proposer, SubprocessProposer, SynthesisConfig, TwoOptRefiner,
};
use hintforge::verify::quality;

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "hintforge", version, about = "Generate structured optimization targets and learn solvers from samples")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "HINTFORGE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a train/val/test dataset for one target.
    Generate(GenerateArgs),
    /// Solve one instance file exactly.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        budget_s: f64,
    },
    /// Run one solver on one instance file and score it.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solver: String,
    },
    /// Runtime-aware selection over the class catalog on the training split.
    Select {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Recover a Horn backdoor from training formulas.
    LearnBackdoor {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        /// Also time the compiled solver against plain DPLL on the validation split.
        #[arg(long)]
        speedup: bool,
    },
    #[command(subcommand)]
    Bench(BenchCmd),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    class: ProblemClass,
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "desk")]
    profile: SizeProfile,
    #[arg(long, default_value_t = 64)]
    n_train: usize,
    #[arg(long, default_value_t = 32)]
    n_val: usize,
    #[arg(long, default_value_t = 500)]
    n_test: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value = "desk")]
    profile: SizeProfile,
    #[arg(long, default_value_t = 64)]
    n_train: usize,
    #[arg(long, default_value_t = 32)]
    n_val: usize,
    #[arg(long, default_value_t = 500)]
    n_test: usize,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Evaluate a method against the heuristic pool on held-out test splits.
    Run {
        /// `all` or a comma-separated list like `mis/core-fringe,tsp/paired-ribbon`.
        #[arg(long, default_value = "all")]
        targets: String,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// `erm`, `synthesis-catalog`, or a catalog solver id.
        #[arg(long, default_value = "erm")]
        method: String,
        #[arg(long)]
        include_exact: bool,
        #[arg(long)]
        serial_timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relabeling ablation for one graph target (or `all` graph targets).
    Perturb {
        #[arg(long)]
        target: String,
        #[arg(long)]
        solver: String,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beam-search synthesis on a dataset directory.
    Synthesize {
        /// `catalog`, `backdoor`, `two-opt`, or `cmd:<program>` for an external proposer.
        #[arg(long, default_value = "catalog")]
        proposer: String,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(short = 'R', default_value_t = 4)]
        rounds: usize,
        #[arg(short = 'B', default_value_t = 4)]
        beam: usize,
        #[arg(short = 'K', default_value_t = 8)]
        budget: usize,
        /// Charge every successful call this many ms, for reproducible runs.
        #[arg(long)]
        fixed_clock_ms: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&text)?)
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_targets(spec: &str) -> Result<Vec<(ProblemClass, String)>> {
    if spec == "all" {
        return Ok(benchmark_targets().into_iter().map(|(c, f)| (c, f.to_string())).collect());
    }
    spec.split(',')
        .map(|t| {
            let (c, f) = t.trim().split_once('/').with_context(|| format!("target `{t}` is not class/family"))?;
            Ok((c.parse()?, f.to_string()))
        })
        .collect()
}

fn proposer(name: &str, class: ProblemClass) -> Result<Box<dyn Proposer>> {
    Ok(match name {
        "catalog" => Box::new(CatalogProposer::new(class)),
        "backdoor" => Box::new(BackdoorProposer::new(2, 6)),
        "two-opt" => Box::new(TwoOptRefiner),
        other => match other.strip_prefix("cmd:") {
            Some(cmd) => {
                let mut parts = cmd.split_whitespace().map(str::to_string);
                let prog = parts.next().context("empty proposer command")?;
                Box::new(SubprocessProposer::spawn(&prog, &parts.collect::<Vec<_>>())?)
            }
            None => bail!("unknown proposer `{other}`"),
        },
    })
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Generate(a) => {
            let spec = FamilySpec::new(a.class, &a.family, a.profile, seed)?;
            let split = SplitSpec {
                n_train: a.n_train,
                n_val: a.n_val,
                n_test: a.n_test,
            };
            let d = generate_target(&spec, split)?;
            let m = write_dataset(&a.out, &d)?;
            log::info!("wrote {} instances to {}", m.files.len(), a.out.display());
        }
        Cmd::Oracle { instance, budget_s } => {
            let inst = read_instance(&instance)?;
            let budget = OracleBudget {
                max_seconds: budget_s,
                ..OracleBudget::default()
            };
            let (value, solution) = solve_exact(&inst.public, budget)?;
            emit(&json!({ "instance": inst.id(), "optimum": value, "solution": solution }), None)?;
        }
        Cmd::Solve { instance, solver } => {
            let inst = read_instance(&instance)?;
            let s = by_id(inst.class(), &solver)?;
            let (sol, trace) = guarded_solve(s.as_ref(), &inst.public, seed).map_err(anyhow::Error::msg)?;
            let scored = quality(&inst, &sol)?;
            emit(&json!({ "instance": inst.id(), "solver": solver, "score": scored, "trace": trace, "solution": sol }), None)?;
        }
        Cmd::Select { dataset, delta } => {
            let (m, train, _) = read_selection_splits(&dataset)?;
            let lib = catalog(m.spec.problem_class);
            let mut cfg = ErmConfig::for_library(&lib, delta);
            cfg.dataset_seed = seed;
            let sel = select_erm(&lib, &train, &cfg)?;
            emit(&serde_json::to_value(&sel)?, None)?;
        }
        Cmd::LearnBackdoor { dataset, k, speedup } => {
            let (_, train, val) = read_selection_splits(&dataset)?;
            let formulas = train.iter().map(|i| i.public.cnf().cloned()).collect::<Result<Vec<_>, _>>()?;
            let profile = estimate_salience(&formulas)?;
            let backdoor = top_k(&profile.sigma_hat, k);
            let mut out = json!({ "backdoor": backdoor, "m": profile.m, "salience": profile.sigma_hat });
            if speedup {
                let vf = val.iter().map(|i| i.public.cnf().cloned()).collect::<Result<Vec<_>, _>>()?;
                out["speedup"] = serde_json::to_value(measure_speedup(&vf, &backdoor, 3)?)?;
            }
            emit(&out, None)?;
        }
        Cmd::Bench(BenchCmd::Run {
            targets,
            split,
            repeats,
            method,
            include_exact,
            serial_timing,
            out,
        }) => {
            let sizes = SplitSpec {
                n_train: split.n_train,
                n_val: split.n_val,
                n_test: split.n_test,
            };
            let datasets = parse_targets(&targets)?
                .into_iter()
                .map(|(c, f)| generate_target(&FamilySpec::new(c, &f, split.profile, seed)?, sizes))
                .collect::<hintforge::Result<Vec<_>>>()?;
            let cfg = BenchConfig {
                repeats,
                seed,
                serial_timing,
                include_exact,
                ..BenchConfig::default()
            };
            let m: Box<dyn Method> = match method.as_str() {
                "erm" => Box::new(ErmMethod {
                    delta: 0.05,
                    dataset_seed: seed,
                }),
                "synthesis-catalog" => Box::new(SynthesisMethod::catalog(SynthesisConfig {
                    dataset_seed: seed,
                    ..SynthesisConfig::default()
                })),
                id => Box::new(FixedSolverMethod(id.to_string())),
            };
            let report = run_benchmark(&datasets, m.as_ref(), &cfg)?;
            write_report(&report, &out)?;
            let a = &report.aggregates;
            println!(
                "targets {}  Q {:.3}  dQ_avg {:+.3}  dQ_best {:+.3}  speedup vs best {:.2}x  vs avg {:.2}x",
                a.targets, a.mean_quality, a.delta_q_avg, a.delta_q_best, a.geo_speedup_vs_best, a.geo_speedup_vs_avg
            );
            if report.targets.iter().any(|t| !(0.0..=1.0).contains(&t.method.mean_quality)) {
                bail!("quality outside [0,1] in report");
            }
        }
        Cmd::Bench(BenchCmd::Perturb { target, solver, split, out }) => {
            let targets: Vec<(ProblemClass, String)> = if target == "all" {
                parse_targets("all")?.into_iter().filter(|(c, _)| c.is_graph()).collect()
            } else {
                parse_targets(&target)?
            };
            let sizes = SplitSpec {
                n_train: 0,
                n_val: 0,
                n_test: split.n_test,
            };
            let mut reports = Vec::new();
            for (c, f) in targets {
                let d = generate_target(&FamilySpec::new(c, &f, split.profile, seed)?, sizes)?;
                let s = by_id(c, &solver)?;
                let cfg = RunConfig {
                    dataset_seed: seed,
                    ..RunConfig::default()
                };
                reports.push(run_perturbation_ablation(&d.target_name(), &d.test, s.as_ref(), seed, &cfg)?);
            }
            let summary = aggregate_perturbations(&reports)?;
            emit(&json!({ "targets": reports, "summary": summary }), out.as_deref())?;
            if reports.iter().any(|r| !(0.0..=1.0).contains(&r.feasibility_changed)) {
                bail!("feasibility-changed fraction outside [0,1]");
            }
        }
        Cmd::Bench(BenchCmd::Synthesize {
            proposer: name,
            dataset,
            rounds,
            beam,
            budget,
            fixed_clock_ms,
            out,
        }) => {
            let (m, train, val) = read_selection_splits(&dataset)?;
            let mut p = proposer(&name, m.spec.problem_class)?;
            let cfg = SynthesisConfig {
                rounds,
                beam_width: beam,
                budget_per_round: budget,
                clock: fixed_clock_ms.map_or(Clock::Wall, Clock::Fixed),
                dataset_seed: seed,
                ..SynthesisConfig::default()
            };
            let res = run_synthesis(p.as_mut(), &train, &val, &cfg)?;
            log::info!("best candidate {} ({})", res.best.id, res.best.proposal.hypothesis.title);
            emit(&serde_json::to_value(&res)?, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
