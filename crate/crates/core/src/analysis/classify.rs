use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dependency::{chase_with, ChaseOptions, FunctionPolicy, SchemaMapping};
use crate::error::{Error, Result};
use crate::provenance::ProvenanceMode;
use crate::relational::{check_same_schema, instances_equal, Instance, NullLabel, RunState};
use crate::smo::FunctionRegistry;

use super::homomorphism::{find_homomorphism, find_homomorphism_with, is_isomorphic, SearchOptions};

/// Strength of a reconstruction, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseType {
    None,
    ResultEquivalent,
    Relaxed,
    TpRelaxed,
    Classical,
    Exact,
}

impl InverseType {
    pub const ALL: [InverseType; 6] = [
        InverseType::None,
        InverseType::ResultEquivalent,
        InverseType::Relaxed,
        InverseType::TpRelaxed,
        InverseType::Classical,
        InverseType::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InverseType::None => "none",
            InverseType::ResultEquivalent => "result_equivalent",
            InverseType::Relaxed => "relaxed",
            InverseType::TpRelaxed => "tp_relaxed",
            InverseType::Classical => "classical",
            InverseType::Exact => "exact",
        }
    }
}

impl fmt::Display for InverseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InverseType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InverseType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Json(format!("unknown inverse type {s:?}")))
    }
}

/// Chases `instance` through `mappings` in order with Skolem function terms. Returns the
/// result and the nulls that stand for unknown function results.
fn chase_chain(
    instance: &Instance,
    mappings: &[&SchemaMapping],
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<(Instance, BTreeSet<NullLabel>)> {
    let options = ChaseOptions {
        mode: ProvenanceMode::None,
        functions: FunctionPolicy::Skolem,
    };
    let mut current = instance.clone();
    let mut unknowns = BTreeSet::new();
    for m in mappings {
        let out = chase_with(&current, m, options, registry, state)?;
        unknowns.extend(out.unknowns);
        current = out.instance;
    }
    let present = current.nulls();
    unknowns.retain(|l| present.contains(l));
    Ok((current, unknowns))
}

/// Data-exchange equivalence: the chase results of `a` and `b` map into each other.
pub fn data_exchange_equivalent(
    a: &Instance,
    b: &Instance,
    mapping: &SchemaMapping,
    registry: &FunctionRegistry,
) -> Result<bool> {
    data_exchange_equivalent_chain(a, b, &[mapping], registry)
}

/// The same test for a composition of mappings, applied left to right.
pub fn data_exchange_equivalent_chain(
    a: &Instance,
    b: &Instance,
    mappings: &[&SchemaMapping],
    registry: &FunctionRegistry,
) -> Result<bool> {
    check_same_schema(a, b)?;
    let mut state = RunState::seeded_from([a, b]);
    let (ja, wa) = chase_chain(a, mappings, registry, &mut state)?;
    let (jb, wb) = chase_chain(b, mappings, registry, &mut state)?;
    let forward = SearchOptions {
        wildcards: wb,
        isomorphism: false,
    };
    if find_homomorphism_with(&ja, &jb, &forward)?.is_none() {
        return Ok(false);
    }
    let backward = SearchOptions {
        wildcards: wa,
        isomorphism: false,
    };
    Ok(find_homomorphism_with(&jb, &ja, &backward)?.is_some())
}

/// The conditions behind the type of one (original, reconstructed) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(rename = "type")]
    pub inverse_type: InverseType,
    /// A homomorphism from the reconstruction into the original.
    pub hom_forward: bool,
    /// A homomorphism from the original into the reconstruction.
    pub hom_backward: bool,
    pub cardinality_equal: bool,
    pub de_equivalent: bool,
    pub isomorphic: bool,
    pub equal: bool,
}

impl Classification {
    /// Whether the condition of `t` holds, independently of the reported type.
    pub fn holds(&self, t: InverseType) -> bool {
        match t {
            InverseType::Exact => self.equal,
            InverseType::Classical => self.isomorphic,
            InverseType::TpRelaxed => self.hom_forward && self.cardinality_equal && self.de_equivalent,
            InverseType::Relaxed => self.hom_forward && self.de_equivalent,
            InverseType::ResultEquivalent => self.de_equivalent,
            InverseType::None => true,
        }
    }

    fn strongest(mut self) -> Self {
        self.inverse_type = InverseType::ALL
            .into_iter()
            .rev()
            .find(|&t| self.holds(t))
            .expect("none always holds");
        self
    }
}

pub fn classify(
    original: &Instance,
    reconstructed: &Instance,
    mapping: &SchemaMapping,
    registry: &FunctionRegistry,
) -> Result<Classification> {
    classify_chain(original, reconstructed, &[mapping], registry)
}

/// Classification against a composed mapping; used for end-to-end checks of scripts.
pub fn classify_chain(
    original: &Instance,
    reconstructed: &Instance,
    mappings: &[&SchemaMapping],
    registry: &FunctionRegistry,
) -> Result<Classification> {
    check_same_schema(original, reconstructed)?;
    let c = Classification {
        inverse_type: InverseType::None,
        hom_forward: find_homomorphism(reconstructed, original)?.is_some(),
        hom_backward: find_homomorphism(original, reconstructed)?.is_some(),
        cardinality_equal: original.len() == reconstructed.len(),
        de_equivalent: data_exchange_equivalent_chain(original, reconstructed, mappings, registry)?,
        isomorphic: is_isomorphic(reconstructed, original)?,
        equal: instances_equal(original, reconstructed)?,
    };
    Ok(c.strongest())
}

/// The classification plus what was predicted for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(rename = "type")]
    pub inverse_type: InverseType,
    pub hom_forward: bool,
    pub hom_backward: bool,
    pub cardinality_equal: bool,
    pub de_equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<InverseType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meets_prediction: Option<bool>,
}

impl ClassificationReport {
    pub fn new(c: &Classification, predicted: Option<InverseType>) -> Self {
        ClassificationReport {
            inverse_type: c.inverse_type,
            hom_forward: c.hom_forward,
            hom_backward: c.hom_backward,
            cardinality_equal: c.cardinality_equal,
            de_equivalent: c.de_equivalent,
            predicted,
            meets_prediction: predicted.map(|p| c.inverse_type >= p),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
