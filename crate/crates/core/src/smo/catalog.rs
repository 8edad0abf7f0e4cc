use serde::Serialize;

use crate::provenance::ProvenanceMode;
use crate::relational::{RelationSchema, Schema};

use super::compile::{compile_forward, compile_inverse_of, Resources};
use super::spec::{SmoClass, SmoKind, SmoSpec};

/// One operator with sample tgds over a small schema.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub kind: SmoKind,
    pub classes: Vec<SmoClass>,
    pub inverse_operator: &'static str,
    pub description: &'static str,
    pub sample: SmoSpec,
    pub forward: Vec<String>,
    /// Inverse tgds without provenance, then with how-provenance and side tables.
    pub inverse: Vec<String>,
    pub inverse_with_provenance: Vec<String>,
}

/// `R(a,b,c)` and `S(a,k)`, the schema the samples are written against.
pub fn sample_schema() -> Schema {
    Schema::from_relations([
        RelationSchema::new("R", &["a", "b", "c"]),
        RelationSchema::new("S", &["a", "k"]),
    ])
    .expect("distinct names")
}

pub fn sample_spec(kind: SmoKind) -> SmoSpec {
    match kind {
        SmoKind::CopyTable => SmoSpec::copy_table("R", "R1", "R2"),
        SmoKind::CreateTable => SmoSpec::create_table("T", &["x", "y"]),
        SmoKind::DecomposeTable => SmoSpec::decompose_table("R", ["R1", "R2"], [&["a", "b"], &["a", "c"]]),
        SmoKind::DropTable => SmoSpec::drop_table("S"),
        SmoKind::JoinTable => SmoSpec::join_table("R", "S", "T"),
        SmoKind::MergeTable => SmoSpec::merge_table("R1", "R2", "T"),
        SmoKind::PartitionTable => SmoSpec::partition_table("R", "R1", "R2", "b = 'x'"),
        SmoKind::RenameTable => SmoSpec::rename_table("R", "T"),
        SmoKind::AddColumn => SmoSpec::add_column_value("R", "d", "0"),
        SmoKind::CopyColumn => SmoSpec::copy_column("R", "S", "b", "R.a = S.a", "b"),
        SmoKind::DropColumn => SmoSpec::drop_column("R", &["c"]),
        SmoKind::MergeColumn => SmoSpec::merge_column("R", ["b", "c"], "g", "concat"),
        SmoKind::MoveColumn => SmoSpec::move_column("R", "S", "b", "R.a = S.a", "b"),
        SmoKind::RenameColumn => SmoSpec::rename_column("R", "c", "d"),
        SmoKind::SplitColumn => SmoSpec::split_column("R", "c", ["c1", "c2"], "concat"),
        SmoKind::Nop => SmoSpec::nop(),
    }
}

fn schema_for(kind: SmoKind) -> Schema {
    match kind {
        SmoKind::MergeTable => Schema::from_relations([
            RelationSchema::new("R1", &["a", "b", "c"]),
            RelationSchema::new("R2", &["a", "b", "c"]),
        ])
        .expect("distinct names"),
        _ => sample_schema(),
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    SmoKind::ALL
        .into_iter()
        .map(|kind| {
            let sample = sample_spec(kind);
            let schema = schema_for(kind);
            let forward = compile_forward(&sample, &schema).expect("samples compile");
            let print = |r: Resources| -> Vec<String> {
                compile_inverse_of(&sample, &schema, &forward, r)
                    .expect("samples invert")
                    .inverse_sigma()
                    .iter()
                    .map(ToString::to_string)
                    .collect()
            };
            CatalogEntry {
                kind,
                classes: kind.classes().to_vec(),
                inverse_operator: kind.inverse_operator(),
                description: kind.description(),
                forward: forward.sigma.iter().map(ToString::to_string).collect(),
                inverse: print(Resources::default()),
                inverse_with_provenance: print(
                    Resources::new(ProvenanceMode::How)
                        .with_side_tables()
                        .with_inverse_functions(),
                ),
                sample,
            }
        })
        .collect()
}
