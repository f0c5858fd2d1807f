//! Problem classes, instances, and solutions.
//!
//! An [`Instance`] pairs the [`PublicInstance`] that solvers may read with the
//! [`EvaluatorData`] that only generators and scorers touch. Solver-facing APIs
//! take `&PublicInstance`, so evaluator fields cannot reach solver code.

mod cnf;
mod graph;
mod packing;
mod tsp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use cnf::{lit_of, var_of, CnfFormula};
pub use graph::Graph;
pub use packing::PackingInstance;
pub use tsp::TspInstance;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    Coloring,
    #[serde(rename = "maxsat")]
    MaxSat,
    Mis,
    Mds,
    PackingLp,
    Mdkp,
    Tsp,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 7] = [
        ProblemClass::Coloring,
        ProblemClass::MaxSat,
        ProblemClass::Mis,
        ProblemClass::Mds,
        ProblemClass::PackingLp,
        ProblemClass::Mdkp,
        ProblemClass::Tsp,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ProblemClass::Coloring => "coloring",
            ProblemClass::MaxSat => "maxsat",
            ProblemClass::Mis => "mis",
            ProblemClass::Mds => "mds",
            ProblemClass::PackingLp => "packing-lp",
            ProblemClass::Mdkp => "mdkp",
            ProblemClass::Tsp => "tsp",
        }
    }

    pub fn is_graph(self) -> bool {
        matches!(
            self,
            ProblemClass::Coloring | ProblemClass::Mis | ProblemClass::Mds
        )
    }

    pub fn is_maximization(self) -> bool {
        matches!(
            self,
            ProblemClass::MaxSat | ProblemClass::Mis | ProblemClass::PackingLp | ProblemClass::Mdkp
        )
    }

    /// Continuous objectives are compared with a relative tolerance; the rest exactly.
    pub fn has_continuous_objective(self) -> bool {
        matches!(self, ProblemClass::PackingLp | ProblemClass::Tsp)
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ProblemClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        ProblemClass::ALL
            .into_iter()
            .find(|c| c.slug() == norm || (norm == "packing" && *c == ProblemClass::PackingLp))
            .ok_or_else(|| Error::Parse(format!("unknown problem class `{s}`")))
    }
}

/// Class-specific public data.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Graph(Graph),
    Cnf(CnfFormula),
    Packing(PackingInstance),
    Tsp(TspInstance),
}

impl Payload {
    fn fits(&self, class: ProblemClass) -> bool {
        matches!(
            (self, class),
            (Payload::Graph(_), ProblemClass::Coloring | ProblemClass::Mis | ProblemClass::Mds)
                | (Payload::Cnf(_), ProblemClass::MaxSat)
                | (Payload::Packing(_), ProblemClass::PackingLp | ProblemClass::Mdkp)
                | (Payload::Tsp(_), ProblemClass::Tsp)
        )
    }

    fn to_value(&self) -> Value {
        let v = match self {
            Payload::Graph(g) => serde_json::to_value(g),
            Payload::Cnf(f) => serde_json::to_value(f),
            Payload::Packing(p) => serde_json::to_value(p),
            Payload::Tsp(t) => serde_json::to_value(t),
        };
        v.expect("payload types serialize infallibly")
    }

    fn from_value(class: ProblemClass, v: Value) -> Result<Self> {
        Ok(match class {
            ProblemClass::Coloring | ProblemClass::Mis | ProblemClass::Mds => {
                Payload::Graph(serde_json::from_value(v)?)
            }
            ProblemClass::MaxSat => Payload::Cnf(serde_json::from_value(v)?),
            ProblemClass::PackingLp | ProblemClass::Mdkp => {
                Payload::Packing(serde_json::from_value(v)?)
            }
            ProblemClass::Tsp => Payload::Tsp(serde_json::from_value(v)?),
        })
    }
}

/// The part of an instance a solver is allowed to see.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicInstance {
    pub id: String,
    pub class: ProblemClass,
    pub payload: Payload,
}

impl PublicInstance {
    pub fn new(id: impl Into<String>, class: ProblemClass, payload: Payload) -> Result<Self> {
        if !payload.fits(class) {
            return Err(Error::ShapeMismatch(format!(
                "payload does not match class {class}"
            )));
        }
        Ok(PublicInstance {
            id: id.into(),
            class,
            payload,
        })
    }

    pub fn graph(&self) -> Result<&Graph> {
        match &self.payload {
            Payload::Graph(g) => Ok(g),
            _ => Err(Error::UnsupportedClass(self.class)),
        }
    }

    pub fn cnf(&self) -> Result<&CnfFormula> {
        match &self.payload {
            Payload::Cnf(f) => Ok(f),
            _ => Err(Error::UnsupportedClass(self.class)),
        }
    }

    pub fn packing(&self) -> Result<&PackingInstance> {
        match &self.payload {
            Payload::Packing(p) => Ok(p),
            _ => Err(Error::UnsupportedClass(self.class)),
        }
    }

    pub fn tsp(&self) -> Result<&TspInstance> {
        match &self.payload {
            Payload::Tsp(t) => Ok(t),
            _ => Err(Error::UnsupportedClass(self.class)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("public instance serializes")
    }
}

/// How the stored optimum was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// The generator's construction proves optimality (matching bound).
    Planted,
    /// An exact oracle confirmed the planted value.
    Oracle,
    /// Planted value without a proof of optimality.
    PlantedUncertified,
}

/// Fields retained only by the evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluatorData {
    pub family_id: String,
    #[serde(default)]
    pub hidden_rule_metadata: BTreeMap<String, Value>,
    pub optimum_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum_solution: Option<Solution>,
    pub certification: Certification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub public: PublicInstance,
    pub evaluator: EvaluatorData,
}

impl Instance {
    pub fn id(&self) -> &str {
        &self.public.id
    }

    pub fn class(&self) -> ProblemClass {
        self.public.class
    }

    /// Drops every evaluator-only field.
    pub fn strip_to_public(&self) -> PublicInstance {
        self.public.clone()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct InstanceFile {
    id: String,
    problem_class: ProblemClass,
    public: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    evaluator: Option<EvaluatorData>,
}

impl Serialize for PublicInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile {
            id: self.id.clone(),
            problem_class: self.class,
            public: self.payload.to_value(),
            evaluator: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PublicInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = InstanceFile::deserialize(d)?;
        let payload =
            Payload::from_value(file.problem_class, file.public).map_err(serde::de::Error::custom)?;
        PublicInstance::new(file.id, file.problem_class, payload).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile {
            id: self.public.id.clone(),
            problem_class: self.public.class,
            public: self.public.payload.to_value(),
            evaluator: Some(self.evaluator.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = InstanceFile::deserialize(d)?;
        let evaluator = file
            .evaluator
            .ok_or_else(|| serde::de::Error::missing_field("evaluator"))?;
        let payload =
            Payload::from_value(file.problem_class, file.public).map_err(serde::de::Error::custom)?;
        let public = PublicInstance::new(file.id, file.problem_class, payload)
            .map_err(serde::de::Error::custom)?;
        Ok(Instance { public, evaluator })
    }
}

/// A candidate output for an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Solution {
    /// Color id per vertex.
    Coloring(Vec<usize>),
    /// Truth value per variable.
    Assignment(Vec<bool>),
    VertexSet(Vec<usize>),
    ItemFractions(Vec<f64>),
    ItemPicks(Vec<bool>),
    /// Visiting order of all cities.
    Tour(Vec<usize>),
}

impl Solution {
    pub fn kind(&self) -> &'static str {
        match self {
            Solution::Coloring(_) => "coloring",
            Solution::Assignment(_) => "assignment",
            Solution::VertexSet(_) => "vertex-set",
            Solution::ItemFractions(_) => "item-fractions",
            Solution::ItemPicks(_) => "item-picks",
            Solution::Tour(_) => "tour",
        }
    }

    /// Maps vertex labels through `perm` (old -> new); non-graph solutions are unchanged.
    pub fn relabeled(&self, perm: &[usize]) -> Solution {
        match self {
            Solution::Coloring(colors) => {
                let mut out = vec![0; colors.len()];
                for (v, &c) in colors.iter().enumerate() {
                    out[perm[v]] = c;
                }
                Solution::Coloring(out)
            }
            Solution::VertexSet(set) => {
                let mut out: Vec<usize> = set.iter().map(|&v| perm[v]).collect();
                out.sort_unstable();
                Solution::VertexSet(out)
            }
            other => other.clone(),
        }
    }
}

/// Randomly relabels the vertices of a graph-class instance.
///
/// Returns the relabeled instance and the permutation used, in the form
/// accepted by [`apply_permutation`]. The optimum value is untouched; a stored
/// optimum solution is relabeled along with the graph.
pub fn relabel_graph(inst: &Instance, seed: u64) -> Result<(Instance, Vec<usize>)> {
    let g = inst.public.graph()?;
    let mut perm: Vec<usize> = (0..g.n).collect();
    let mut r = rng::stream(seed, &[rng::hash_str(&inst.public.id), 0x5E1A_BE1]);
    perm.shuffle(&mut r);
    let relabeled = apply_permutation(inst, &perm)?;
    Ok((relabeled, perm))
}

/// Relabels a graph-class instance so that new vertex `i` is old vertex
/// `perm[i]`.
pub fn apply_permutation(inst: &Instance, perm: &[usize]) -> Result<Instance> {
    let g = inst.public.graph()?;
    if perm.len() != g.n {
        return Err(Error::InvalidParameter(format!(
            "permutation has length {} for {} vertices",
            perm.len(),
            g.n
        )));
    }
    let mut seen = vec![false; g.n];
    for &p in perm {
        if p >= g.n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
    }
    let mut old_to_new = vec![0; g.n];
    for (new, &old) in perm.iter().enumerate() {
        old_to_new[old] = new;
    }
    let public = PublicInstance {
        id: inst.public.id.clone(),
        class: inst.public.class,
        payload: Payload::Graph(g.permuted(&old_to_new)),
    };
    let mut evaluator = inst.evaluator.clone();
    evaluator.optimum_solution = evaluator.optimum_solution.map(|s| s.relabeled(&old_to_new));
    Ok(Instance { public, evaluator })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_instance(g: Graph, opt: f64) -> Instance {
        Instance {
            public: PublicInstance::new("g0", ProblemClass::Mis, Payload::Graph(g)).unwrap(),
            evaluator: EvaluatorData {
                family_id: "mis/test".into(),
                hidden_rule_metadata: BTreeMap::from([("k".into(), Value::from(3))]),
                optimum_value: opt,
                optimum_solution: Some(Solution::VertexSet(vec![0, 2])),
                certification: Certification::Planted,
            },
        }
    }

    #[test]
    fn strip_drops_evaluator_fields() {
        let inst = graph_instance(Graph::new(3, [(0, 1), (1, 2)]).unwrap(), 7.0);
        let public = inst.strip_to_public();
        let text = public.to_json();
        for key in ["evaluator", "optimumValue", "familyId", "hiddenRuleMetadata", "optimumSolution"] {
            assert!(!text.contains(key), "public record leaks {key}: {text}");
        }
        assert_eq!(public.graph().unwrap(), inst.public.graph().unwrap());
        let reparsed: PublicInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(reparsed, public);
        assert_eq!(inst.strip_to_public().to_json(), text);
    }

    #[test]
    fn full_round_trip() {
        let inst = graph_instance(Graph::new(4, [(0, 1), (2, 3)]).unwrap(), 2.0);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn public_file_is_not_a_full_instance() {
        let inst = graph_instance(Graph::empty(2), 2.0);
        assert!(Instance::from_json(&inst.strip_to_public().to_json()).is_err());
    }

    #[test]
    fn relabel_path_with_given_permutation() {
        let inst = graph_instance(Graph::new(3, [(0, 1), (1, 2)]).unwrap(), 2.0);
        let out = apply_permutation(&inst, &[2, 0, 1]).unwrap();
        assert_eq!(out.public.graph().unwrap().edges, vec![(0, 2), (1, 2)]);
        assert_eq!(out.evaluator.optimum_value, 2.0);
        assert_eq!(
            out.evaluator.optimum_solution,
            Some(Solution::VertexSet(vec![0, 1]))
        );
    }

    #[test]
    fn identity_permutation_is_identity() {
        let inst = graph_instance(Graph::new(3, [(0, 1), (1, 2)]).unwrap(), 2.0);
        assert_eq!(apply_permutation(&inst, &[0, 1, 2]).unwrap(), inst);
    }

    #[test]
    fn relabel_rejects_non_graph() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let inst = Instance {
            public: PublicInstance::new("f", ProblemClass::MaxSat, Payload::Cnf(f)).unwrap(),
            evaluator: EvaluatorData {
                family_id: "x".into(),
                hidden_rule_metadata: BTreeMap::new(),
                optimum_value: 1.0,
                optimum_solution: None,
                certification: Certification::Planted,
            },
        };
        assert!(matches!(
            relabel_graph(&inst, 1),
            Err(Error::UnsupportedClass(ProblemClass::MaxSat))
        ));
    }

    #[test]
    fn class_parsing() {
        assert_eq!("packing-lp".parse::<ProblemClass>().unwrap(), ProblemClass::PackingLp);
        assert_eq!("MaxSat".parse::<ProblemClass>().unwrap(), ProblemClass::MaxSat);
        assert!("knapsack".parse::<ProblemClass>().is_err());
    }
}
