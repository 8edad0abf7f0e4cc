use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::analysis::InverseType;
use crate::dependency::{chase_with, ChaseOptions, FunctionPolicy, SchemaMapping};
use crate::error::Result;
use crate::provenance::ProvenanceMode;
use crate::relational::{Instance, RunState, Value};

use super::compile::Resources;
use super::functions::FunctionRegistry;
use super::spec::{SmoKind, SmoSpec};

/// What the forward chase of one step did to its source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFeatures {
    /// Some source tuple takes part in no trigger.
    pub has_dangling: bool,
    /// Some target fact has more than one derivation.
    pub has_duplicates: bool,
    /// The source itself holds two facts with equal values in one relation.
    pub source_duplicates: bool,
}

impl InstanceFeatures {
    pub fn compute(source: &Instance, forward: &SchemaMapping, registry: &FunctionRegistry) -> Result<Self> {
        let options = ChaseOptions {
            mode: ProvenanceMode::None,
            functions: FunctionPolicy::Skolem,
        };
        let out = chase_with(source, forward, options, registry, &mut RunState::seeded_from([source]))?;
        let mut used = BTreeSet::new();
        let mut has_duplicates = false;
        for p in out.how.values() {
            has_duplicates |= p.monomial_count() > 1 || p.terms().any(|(_, k)| k > 1);
            used.extend(p.support());
        }
        let mut seen: HashSet<(&str, &[Value])> = HashSet::new();
        let source_duplicates = !source
            .facts()
            .all(|f| seen.insert((f.relation.as_str(), f.values.as_slice())));
        Ok(InstanceFeatures {
            has_dangling: source.facts().any(|f| !used.contains(&f.id)),
            has_duplicates,
            source_duplicates,
        })
    }
}

/// The type the inverse plan for these resources is expected to reach at least.
pub fn predicted_inverse_type(spec: &SmoSpec, resources: Resources, features: &InstanceFeatures) -> InverseType {
    use InverseType::*;
    let side = resources.side_tables_usable();
    let tuple_level = resources.provenance.identifies_tuples();
    let any_provenance = resources.provenance > ProvenanceMode::None;
    let by_duplicates = if tuple_level || !features.has_duplicates {
        TpRelaxed
    } else {
        Relaxed
    };
    let predicted = match spec.kind {
        SmoKind::JoinTable if side => Exact,
        SmoKind::JoinTable => {
            if features.has_dangling {
                Relaxed
            } else {
                Exact
            }
        }
        SmoKind::MergeTable => {
            if any_provenance {
                Exact
            } else {
                ResultEquivalent
            }
        }
        SmoKind::DropTable if side => Exact,
        SmoKind::DropTable => {
            if any_provenance {
                TpRelaxed
            } else {
                Relaxed
            }
        }
        SmoKind::DecomposeTable => {
            if tuple_level {
                Exact
            } else {
                Relaxed
            }
        }
        SmoKind::DropColumn if side => Exact,
        SmoKind::MergeColumn if side && resources.inverse_functions => Exact,
        SmoKind::SplitColumn if resources.inverse_functions => Exact,
        SmoKind::DropColumn | SmoKind::MergeColumn | SmoKind::SplitColumn => by_duplicates,
        SmoKind::MoveColumn if side => Exact,
        SmoKind::MoveColumn => None,
        _ => {
            if features.has_dangling {
                Relaxed
            } else {
                Exact
            }
        }
    };
    // Value-equal source facts merge in every chase; only their values come back.
    if features.source_duplicates {
        predicted.min(Relaxed)
    } else {
        predicted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(has_dangling: bool, has_duplicates: bool) -> InstanceFeatures {
        InstanceFeatures {
            has_dangling,
            has_duplicates,
            source_duplicates: false,
        }
    }

    #[test]
    fn representative_predictions() {
        let join = SmoSpec::join_table("R", "V", "T");
        let none = Resources::default();
        assert_eq!(predicted_inverse_type(&join, none, &features(true, false)), InverseType::Relaxed);
        let how_side = Resources::new(ProvenanceMode::How).with_side_tables();
        assert_eq!(predicted_inverse_type(&join, how_side, &features(true, false)), InverseType::Exact);

        let mc = SmoSpec::merge_column("R", ["b", "c"], "g", "dec_add");
        let all = how_side.with_inverse_functions();
        assert_eq!(predicted_inverse_type(&mc, all, &features(false, true)), InverseType::Exact);
        assert_eq!(predicted_inverse_type(&mc, none, &features(false, true)), InverseType::Relaxed);
        let why = Resources::new(ProvenanceMode::Why);
        assert_eq!(predicted_inverse_type(&mc, why, &features(false, true)), InverseType::TpRelaxed);

        let mt = SmoSpec::merge_table("R", "V", "T");
        assert_eq!(predicted_inverse_type(&mt, none, &features(false, true)), InverseType::ResultEquivalent);
        assert_eq!(
            predicted_inverse_type(&mt, Resources::new(ProvenanceMode::How), &features(false, true)),
            InverseType::Exact
        );

        let rt = SmoSpec::rename_table("R", "T");
        assert_eq!(predicted_inverse_type(&rt, none, &features(false, false)), InverseType::Exact);
        let dt = SmoSpec::drop_table("R");
        assert_eq!(predicted_inverse_type(&dt, none, &features(true, false)), InverseType::Relaxed);
        assert_eq!(
            predicted_inverse_type(&dt, Resources::new(ProvenanceMode::Where), &features(true, false)),
            InverseType::TpRelaxed
        );
    }

    #[test]
    fn features_of_merge_column() {
        use crate::relational::{RelationSchema, Schema};
        let s = Schema::from_relations([RelationSchema::new("R", &["name", "mod1", "mod2"])]).unwrap();
        let i = Instance::with_facts(
            s.clone(),
            &[
                ("R", "r1", &["Alice", "1.7", "3.3"]),
                ("R", "r2", &["Bob", "2.0", "2.7"]),
                ("R", "r3", &["Alice", "3.0", "2.0"]),
            ],
        )
        .unwrap();
        let spec = SmoSpec::merge_column("R", ["mod1", "mod2"], "sum", "dec_add");
        let fw = super::super::compile_forward(&spec, &s).unwrap();
        let f = InstanceFeatures::compute(&i, &fw, &FunctionRegistry::builtin()).unwrap();
        assert_eq!(f, features(false, true));
    }
}
