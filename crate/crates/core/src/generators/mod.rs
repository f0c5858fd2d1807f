//! Seeded generators for the 21 target distributions and the planted Horn
//! backdoor family.
//!
//! Every family plants a solution together with a matching bound, so the
//! stored optimum is proved by construction. Desk-profile instances are
//! additionally re-solved by the exact oracles, and any disagreement or
//! oracle timeout aborts generation.

mod coloring;
mod horn;
mod maxsat;
mod mds;
mod mis;
mod packing;
mod tsp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use horn::{generate_horn_backdoor_formula, horn_backdoor_margin, sample_backdoor, HornParams};

use crate::error::{Error, Result};
use crate::instance::{
    Certification, EvaluatorData, Graph, Instance, Payload, ProblemClass, PublicInstance, Solution,
};
use crate::oracles::{solve_exact, OracleBudget};
use crate::rng::{self, Rng};
use crate::verify::{raw_objective, verify, RELATIVE_OPT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeProfile {
    Paper,
    Desk,
}

impl fmt::Display for SizeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeProfile::Paper => "paper",
            SizeProfile::Desk => "desk",
        })
    }
}

impl FromStr for SizeProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(SizeProfile::Paper),
            "desk" => Ok(SizeProfile::Desk),
            _ => Err(Error::Parse(format!("unknown size profile `{s}`"))),
        }
    }
}

/// Numeric family parameters, keyed by name.
pub type FamilyParams = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilySpec {
    pub problem_class: ProblemClass,
    pub family_name: String,
    pub size_profile: SizeProfile,
    pub family_params: FamilyParams,
    pub seed: u64,
}

impl FamilySpec {
    /// Spec with the family's default parameters for `profile`.
    pub fn new(class: ProblemClass, family: &str, profile: SizeProfile, seed: u64) -> Result<Self> {
        let family_params = default_params(class, family, profile)?;
        Ok(FamilySpec {
            problem_class: class,
            family_name: family.to_string(),
            size_profile: profile,
            family_params,
            seed,
        })
    }

    /// `class/family`, the evaluator's family id.
    pub fn family_id(&self) -> String {
        format!("{}/{}", self.problem_class, self.family_name)
    }

    /// Overrides parameters; sizes cannot change under the paper profile.
    pub fn with_params(mut self, overrides: &FamilyParams) -> Result<Self> {
        for (k, v) in overrides {
            if !self.family_params.contains_key(k) {
                return Err(Error::InvalidParameter(format!(
                    "family {} has no parameter `{k}`",
                    self.family_id()
                )));
            }
            self.family_params.insert(k.clone(), *v);
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitSpec {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            n_train: 64,
            n_val: 32,
            n_test: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetDataset {
    pub spec: FamilySpec,
    pub split: SplitSpec,
    pub train: Vec<Instance>,
    pub val: Vec<Instance>,
    pub test: Vec<Instance>,
}

impl TargetDataset {
    pub fn part(&self, split: Split) -> &[Instance] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    /// `class/family`, used as the target name in reports.
    pub fn target_name(&self) -> String {
        self.spec.family_id()
    }
}

/// What a family constructor returns before certification.
pub(crate) struct Planted {
    pub payload: Payload,
    pub optimum_value: f64,
    pub optimum_solution: Solution,
    pub metadata: BTreeMap<String, Value>,
}

/// Parameter lookup with family-aware errors.
pub(crate) struct Params<'a> {
    family: &'a str,
    map: &'a FamilyParams,
}

impl Params<'_> {
    pub fn f(&self, key: &str) -> Result<f64> {
        self.map.get(key).copied().ok_or_else(|| {
            Error::InvalidParameter(format!("family {} is missing parameter `{key}`", self.family))
        })
    }

    pub fn u(&self, key: &str) -> Result<usize> {
        let v = self.f(key)?;
        if v < 0.0 || v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "parameter `{key}` of {} must be a nonnegative integer, got {v}",
                self.family
            )));
        }
        Ok(v as usize)
    }

    pub fn prob(&self, key: &str) -> Result<f64> {
        let v = self.f(key)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "parameter `{key}` of {} must lie in [0,1], got {v}",
                self.family
            )));
        }
        Ok(v)
    }
}

/// The three families of each class, plus `horn-backdoor` for MaxSAT.
pub fn families(class: ProblemClass) -> &'static [&'static str] {
    match class {
        ProblemClass::Coloring => &["ring-template", "overlapping-palette", "separator-trap"],
        ProblemClass::MaxSat => &["community-parity", "last-clause-signal", "latent-backdoor", "horn-backdoor"],
        ProblemClass::Mis => &["clique-path", "core-fringe", "motif-bridge"],
        ProblemClass::Mds => &["gateway-hub", "geometric-anchor", "star-kernel"],
        ProblemClass::PackingLp => &["block-coupled", "active-resource", "single-bottleneck"],
        ProblemClass::Mdkp => &["decoy-complement", "latent-class", "single-resource"],
        ProblemClass::Tsp => &["clustered-euclidean", "latent-metric", "paired-ribbon"],
    }
}

/// The 21 benchmark targets (the Horn backdoor family is extra).
pub fn benchmark_targets() -> Vec<(ProblemClass, &'static str)> {
    ProblemClass::ALL
        .iter()
        .flat_map(|&c| families(c).iter().filter(|f| **f != "horn-backdoor").map(move |&f| (c, f)))
        .collect()
}

fn unknown(class: ProblemClass, family: &str) -> Error {
    Error::UnknownFamily {
        class,
        family: family.to_string(),
    }
}

fn params(pairs: &[(&str, f64)]) -> FamilyParams {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Default parameters. Size keys under the paper profile reproduce the
/// benchmark's published instance sizes.
pub fn default_params(class: ProblemClass, family: &str, profile: SizeProfile) -> Result<FamilyParams> {
    use ProblemClass::*;
    use SizeProfile::*;
    let p = match (class, family, profile) {
        (Coloring, "ring-template", Paper) => params(&[("blocks", 13.0), ("blockSize", 13.0), ("colors", 5.0), ("pIn", 0.55), ("pBridge", 0.12)]),
        (Coloring, "ring-template", Desk) => params(&[("blocks", 4.0), ("blockSize", 8.0), ("colors", 4.0), ("pIn", 0.55), ("pBridge", 0.15)]),
        (Coloring, "overlapping-palette", Paper) => params(&[("blocks", 20.0), ("blockSize", 17.0), ("palette", 8.0), ("window", 4.0), ("shift", 2.0), ("pIn", 0.6), ("pBridge", 0.1)]),
        (Coloring, "overlapping-palette", Desk) => params(&[("blocks", 4.0), ("blockSize", 9.0), ("palette", 5.0), ("window", 3.0), ("shift", 2.0), ("pIn", 0.6), ("pBridge", 0.15)]),
        (Coloring, "separator-trap", Paper) => params(&[("blocks", 14.0), ("blockSize", 15.0), ("separators", 28.0), ("colors", 5.0), ("pIn", 0.5), ("pSep", 0.08)]),
        (Coloring, "separator-trap", Desk) => params(&[("blocks", 4.0), ("blockSize", 8.0), ("separators", 6.0), ("colors", 4.0), ("pIn", 0.5), ("pSep", 0.15)]),

        (MaxSat, "community-parity", Paper) => params(&[("vars", 240.0), ("clauses", 960.0), ("communities", 12.0), ("anchorsPerCommunity", 3.0)]),
        (MaxSat, "community-parity", Desk) => params(&[("vars", 20.0), ("clauses", 80.0), ("communities", 2.0), ("anchorsPerCommunity", 3.0)]),
        (MaxSat, "last-clause-signal", Paper) => params(&[("vars", 280.0), ("clauses", 1120.0), ("anchors", 8.0)]),
        (MaxSat, "last-clause-signal", Desk) => params(&[("vars", 20.0), ("clauses", 80.0), ("anchors", 4.0)]),
        (MaxSat, "latent-backdoor", Paper) => params(&[("vars", 128.0), ("clauses", 512.0), ("blocks", 8.0), ("anchors", 6.0), ("regimes", 4.0), ("noise", 0.15)]),
        (MaxSat, "latent-backdoor", Desk) => params(&[("vars", 20.0), ("clauses", 80.0), ("blocks", 2.0), ("anchors", 4.0), ("regimes", 3.0), ("noise", 0.15)]),
        (MaxSat, "horn-backdoor", Paper) => params(&[("vars", 40.0), ("backdoorSize", 3.0), ("clauses", 240.0), ("rho", 0.5), ("hornWidth", 3.0), ("tailSize", 1.0)]),
        (MaxSat, "horn-backdoor", Desk) => params(&[("vars", 16.0), ("backdoorSize", 2.0), ("clauses", 64.0), ("rho", 0.5), ("hornWidth", 3.0), ("tailSize", 1.0)]),

        (Mis, "clique-path", Paper) => params(&[("blockPairs", 10.0), ("cliqueSize", 7.0), ("pathSize", 12.0), ("pBridge", 0.08)]),
        (Mis, "clique-path", Desk) => params(&[("blockPairs", 2.0), ("cliqueSize", 5.0), ("pathSize", 8.0), ("pBridge", 0.15)]),
        (Mis, "core-fringe", Paper) => params(&[("gadgets", 200.0), ("crossPerGadget", 3.0)]),
        (Mis, "core-fringe", Desk) => params(&[("gadgets", 8.0), ("crossPerGadget", 2.0)]),
        (Mis, "motif-bridge", Paper) => params(&[("vertices", 195.0), ("bridgesPerJoin", 2.0)]),
        (Mis, "motif-bridge", Desk) => params(&[("vertices", 40.0), ("bridgesPerJoin", 2.0)]),

        (Mds, "gateway-hub", Paper) => params(&[("clusters", 140.0), ("clusterSize", 20.0), ("gatewaysPerCluster", 3.0), ("gatewayReach", 4.0), ("pLocal", 0.1)]),
        (Mds, "gateway-hub", Desk) => params(&[("clusters", 4.0), ("clusterSize", 10.0), ("gatewaysPerCluster", 2.0), ("gatewayReach", 3.0), ("pLocal", 0.15)]),
        (Mds, "geometric-anchor", Paper) => params(&[("vertices", 1600.0), ("clusters", 80.0), ("radius", 0.35), ("connectors", 2.0)]),
        (Mds, "geometric-anchor", Desk) => params(&[("vertices", 40.0), ("clusters", 4.0), ("radius", 0.45), ("connectors", 2.0)]),
        (Mds, "star-kernel", Paper) => params(&[("clusters", 100.0), ("clusterSize", 28.0), ("hubConnectors", 2.0), ("pLeaf", 0.03)]),
        (Mds, "star-kernel", Desk) => params(&[("clusters", 4.0), ("clusterSize", 10.0), ("hubConnectors", 1.0), ("pLeaf", 0.05)]),

        (PackingLp, "block-coupled", Paper) => params(&[("items", 1200.0), ("resources", 40.0), ("blocks", 8.0), ("fractionalItems", 6.0)]),
        (PackingLp, "block-coupled", Desk) => params(&[("items", 60.0), ("resources", 6.0), ("blocks", 2.0), ("fractionalItems", 2.0)]),
        (PackingLp, "active-resource", Paper) => params(&[("items", 1200.0), ("resources", 40.0), ("patterns", 4.0), ("activePerPattern", 5.0), ("density", 0.25), ("fractionalItems", 4.0)]),
        (PackingLp, "active-resource", Desk) => params(&[("items", 60.0), ("resources", 6.0), ("patterns", 3.0), ("activePerPattern", 2.0), ("density", 0.5), ("fractionalItems", 2.0)]),
        (PackingLp, "single-bottleneck", Paper) => params(&[("items", 1200.0), ("resources", 40.0), ("fractionalItems", 1.0)]),
        (PackingLp, "single-bottleneck", Desk) => params(&[("items", 60.0), ("resources", 6.0), ("fractionalItems", 1.0)]),

        (Mdkp, "decoy-complement", Paper) => params(&[("items", 1040.0), ("resources", 48.0), ("decoyFraction", 0.15)]),
        (Mdkp, "decoy-complement", Desk) => params(&[("items", 24.0), ("resources", 4.0), ("decoyFraction", 0.2)]),
        (Mdkp, "latent-class", Paper) => params(&[("items", 520.0), ("resources", 32.0), ("classes", 6.0)]),
        (Mdkp, "latent-class", Desk) => params(&[("items", 24.0), ("resources", 4.0), ("classes", 3.0)]),
        (Mdkp, "single-resource", Paper) => params(&[("items", 1040.0), ("resources", 48.0)]),
        (Mdkp, "single-resource", Desk) => params(&[("items", 24.0), ("resources", 4.0)]),

        (Tsp, "clustered-euclidean", Paper) => params(&[("cities", 120.0), ("clusters", 8.0)]),
        (Tsp, "clustered-euclidean", Desk) => params(&[("cities", 11.0), ("clusters", 3.0)]),
        (Tsp, "latent-metric", Paper) => params(&[("cities", 120.0)]),
        (Tsp, "latent-metric", Desk) => params(&[("cities", 11.0)]),
        (Tsp, "paired-ribbon", Paper) => params(&[("cities", 320.0), ("gap", 0.15)]),
        (Tsp, "paired-ribbon", Desk) => params(&[("cities", 12.0), ("gap", 0.15)]),
        _ => return Err(unknown(class, family)),
    };
    Ok(p)
}

/// Published instance size for each paper-profile target: (primary, secondary).
pub fn paper_size(class: ProblemClass, family: &str) -> Option<(usize, Option<usize>)> {
    use ProblemClass::*;
    Some(match (class, family) {
        (Coloring, "ring-template") => (169, None),
        (Coloring, "overlapping-palette") => (340, None),
        (Coloring, "separator-trap") => (238, None),
        (MaxSat, "community-parity") => (240, Some(960)),
        (MaxSat, "last-clause-signal") => (280, Some(1120)),
        (MaxSat, "latent-backdoor") => (128, Some(512)),
        (Mis, "clique-path") => (190, None),
        (Mis, "core-fringe") => (1000, None),
        (Mis, "motif-bridge") => (195, None),
        (Mds, "gateway-hub") => (2800, None),
        (Mds, "geometric-anchor") => (1600, None),
        (Mds, "star-kernel") => (2800, None),
        (PackingLp, _) if families(PackingLp).contains(&family) => (1200, Some(40)),
        (Mdkp, "decoy-complement") => (1040, Some(48)),
        (Mdkp, "latent-class") => (520, Some(32)),
        (Mdkp, "single-resource") => (1040, Some(48)),
        (Tsp, "clustered-euclidean") => (120, None),
        (Tsp, "latent-metric") => (120, None),
        (Tsp, "paired-ribbon") => (320, None),
        _ => return None,
    })
}

/// (primary, secondary) size of a payload: vertices, variables/clauses,
/// items/resources, or cities.
pub fn payload_size(p: &Payload) -> (usize, Option<usize>) {
    match p {
        Payload::Graph(g) => (g.n, None),
        Payload::Cnf(f) => (f.num_vars, Some(f.num_clauses())),
        Payload::Packing(p) => (p.num_items(), Some(p.num_resources())),
        Payload::Tsp(t) => (t.n, None),
    }
}

/// Per-family stream shared by all instances, for structure that must stay
/// fixed across the distribution (anchor sets, backdoors, bottlenecks).
pub(crate) fn family_rng(spec: &FamilySpec) -> Rng {
    rng::stream(spec.seed, &[rng::hash_str(&spec.family_id()), 0xFA417])
}

fn instance_rng(spec: &FamilySpec, split: Split, index: usize) -> Rng {
    rng::stream(
        spec.seed,
        &[
            rng::hash_str(&spec.family_id()),
            rng::hash_str(&spec.size_profile.to_string()),
            split as u64,
            index as u64,
        ],
    )
}

pub fn instance_id(spec: &FamilySpec, split: Split, index: usize) -> String {
    format!("{}-{}-{index:04}", spec.family_name, split.name())
}

fn plant(spec: &FamilySpec, rng: &mut Rng) -> Result<Planted> {
    let p = Params {
        family: &spec.family_name,
        map: &spec.family_params,
    };
    let fam_rng = || family_rng(spec);
    use ProblemClass::*;
    match (spec.problem_class, spec.family_name.as_str()) {
        (Coloring, "ring-template") => coloring::ring_template(&p, rng),
        (Coloring, "overlapping-palette") => coloring::overlapping_palette(&p, rng),
        (Coloring, "separator-trap") => coloring::separator_trap(&p, rng),
        (MaxSat, "community-parity") => maxsat::community_parity(&p, &mut fam_rng(), rng),
        (MaxSat, "last-clause-signal") => maxsat::last_clause_signal(&p, &mut fam_rng(), rng),
        (MaxSat, "latent-backdoor") => maxsat::latent_backdoor(&p, &mut fam_rng(), rng),
        (MaxSat, "horn-backdoor") => horn::horn_backdoor_family(&p, &mut fam_rng(), rng),
        (Mis, "clique-path") => mis::clique_path(&p, rng),
        (Mis, "core-fringe") => mis::core_fringe(&p, rng),
        (Mis, "motif-bridge") => mis::motif_bridge(&p, rng),
        (Mds, "gateway-hub") => mds::gateway_hub(&p, rng),
        (Mds, "geometric-anchor") => mds::geometric_anchor(&p, rng),
        (Mds, "star-kernel") => mds::star_kernel(&p, rng),
        (PackingLp, "block-coupled") => packing::block_coupled(&p, rng),
        (PackingLp, "active-resource") => packing::active_resource(&p, &mut fam_rng(), rng),
        (PackingLp, "single-bottleneck") => packing::single_bottleneck(&p, &mut fam_rng(), rng),
        (Mdkp, "decoy-complement") => packing::decoy_complement(&p, &mut fam_rng(), rng),
        (Mdkp, "latent-class") => packing::latent_class(&p, &mut fam_rng(), rng),
        (Mdkp, "single-resource") => packing::single_resource(&p, &mut fam_rng(), rng),
        (Tsp, "clustered-euclidean") => tsp::clustered_euclidean(&p, rng),
        (Tsp, "latent-metric") => tsp::latent_metric(&p, rng),
        (Tsp, "paired-ribbon") => tsp::paired_ribbon(&p, rng),
        (class, family) => Err(unknown(class, family)),
    }
}

fn cert_err(id: &str, reason: impl Into<String>) -> Error {
    Error::Certification {
        instance: id.to_string(),
        reason: reason.into(),
    }
}

fn values_agree(class: ProblemClass, a: f64, b: f64) -> bool {
    if class.has_continuous_objective() {
        (a - b).abs() <= RELATIVE_OPT_TOL * a.abs().max(b.abs()).max(1.0)
    } else {
        a == b
    }
}

/// Generates one instance. Deterministic in `(spec, split, index)`.
pub fn generate_instance(spec: &FamilySpec, split: Split, index: usize) -> Result<Instance> {
    generate_instance_with_budget(spec, split, index, OracleBudget::default())
}

pub fn generate_instance_with_budget(
    spec: &FamilySpec,
    split: Split,
    index: usize,
    budget: OracleBudget,
) -> Result<Instance> {
    let id = instance_id(spec, split, index);
    let mut r = instance_rng(spec, split, index);
    let planted = plant(spec, &mut r)?;
    let class = spec.problem_class;
    if spec.size_profile == SizeProfile::Paper {
        if let Some(expected) = paper_size(class, &spec.family_name) {
            let got = payload_size(&planted.payload);
            if got != expected {
                return Err(Error::InvalidParameter(format!(
                    "paper profile of {} must produce size {expected:?}, parameters give {got:?}",
                    spec.family_id()
                )));
            }
        }
    }
    let public = PublicInstance::new(id.clone(), class, planted.payload)?;
    if !verify(&public, &planted.optimum_solution)? {
        return Err(cert_err(&id, "planted solution is infeasible"));
    }
    let planted_value = raw_objective(&public, &planted.optimum_solution);
    if !values_agree(class, planted_value, planted.optimum_value) {
        return Err(cert_err(
            &id,
            format!("planted solution has value {planted_value}, claimed {}", planted.optimum_value),
        ));
    }
    if !(planted.optimum_value > 0.0) {
        return Err(cert_err(&id, "optimum must be positive"));
    }
    let certification = match spec.size_profile {
        SizeProfile::Paper => Certification::Planted,
        SizeProfile::Desk => {
            let (oracle_value, _) = solve_exact(&public, budget).map_err(|e| cert_err(&id, e.to_string()))?;
            if !values_agree(class, oracle_value, planted.optimum_value) {
                return Err(cert_err(
                    &id,
                    format!("oracle optimum {oracle_value} refutes planted {}", planted.optimum_value),
                ));
            }
            Certification::Oracle
        }
    };
    Ok(Instance {
        public,
        evaluator: EvaluatorData {
            family_id: spec.family_id(),
            hidden_rule_metadata: planted.metadata,
            optimum_value: planted.optimum_value,
            optimum_solution: Some(planted.optimum_solution),
            certification,
        },
    })
}

/// Generates all three splits in parallel; output order is fixed.
pub fn generate_target(spec: &FamilySpec, split: SplitSpec) -> Result<TargetDataset> {
    let make = |s: Split, n: usize| -> Result<Vec<Instance>> {
        (0..n)
            .into_par_iter()
            .map(|i| generate_instance(spec, s, i))
            .collect()
    };
    Ok(TargetDataset {
        spec: spec.clone(),
        split,
        train: make(Split::Train, split.n_train)?,
        val: make(Split::Val, split.n_val)?,
        test: make(Split::Test, split.n_test)?,
    })
}

/// Relabels vertices uniformly at random and maps the planted solution along.
pub(crate) fn shuffle_graph(g: &Graph, sol: &Solution, rng: &mut Rng) -> (Graph, Solution, Vec<usize>) {
    let mut perm: Vec<usize> = (0..g.n).collect();
    perm.shuffle(rng);
    (g.permuted(&perm), sol.relabeled(&perm), perm)
}

pub(crate) fn meta(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_has_defaults_for_both_profiles() {
        for c in ProblemClass::ALL {
            for f in families(c) {
                for p in [SizeProfile::Paper, SizeProfile::Desk] {
                    assert!(default_params(c, f, p).is_ok(), "{c}/{f}/{p}");
                }
            }
        }
        assert_eq!(benchmark_targets().len(), 21);
    }

    #[test]
    fn unknown_family_rejected() {
        assert!(matches!(
            FamilySpec::new(ProblemClass::Mis, "ring-template", SizeProfile::Desk, 0),
            Err(Error::UnknownFamily { .. })
        ));
    }

    #[test]
    fn desk_instances_certify_for_all_families() {
        for c in ProblemClass::ALL {
            for f in families(c) {
                let spec = FamilySpec::new(c, f, SizeProfile::Desk, 11).unwrap();
                for i in 0..3 {
                    let inst = generate_instance(&spec, Split::Train, i)
                        .unwrap_or_else(|e| panic!("{c}/{f}: {e}"));
                    assert_eq!(inst.evaluator.certification, Certification::Oracle);
                }
            }
        }
    }

    #[test]
    fn ids_distinct_and_deterministic() {
        let spec = FamilySpec::new(ProblemClass::Tsp, "paired-ribbon", SizeProfile::Desk, 3).unwrap();
        let split = SplitSpec { n_train: 3, n_val: 2, n_test: 2 };
        let a = generate_target(&spec, split).unwrap();
        let b = generate_target(&spec, split).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<&str> = a.train.iter().chain(&a.val).chain(&a.test).map(|i| i.id()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 7);
    }

    #[test]
    fn paper_sizes_are_enforced() {
        let spec = FamilySpec::new(ProblemClass::Tsp, "paired-ribbon", SizeProfile::Paper, 0)
            .unwrap()
            .with_params(&params(&[("cities", 100.0)]))
            .unwrap();
        assert!(generate_instance(&spec, Split::Train, 0).is_err());
    }
}
