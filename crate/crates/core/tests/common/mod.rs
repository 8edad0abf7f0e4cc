//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use backchase::analysis::Homomorphism;
use backchase::provenance::ProvenanceMode;
use backchase::relational::json::instance_from_json;
use backchase::relational::{Instance, NullLabel, RelationSchema, Schema, TupleId, Value};
use backchase::smo::{compile_forward, Resources, Script, SmoKind, SmoSpec};
use rand::seq::SliceRandom;
use rand::Rng;

pub const POOL: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
/// For SPLIT_COLUMN inputs: every value splits at its first space.
pub const SPLIT_POOL: [&str; 6] = ["p q", "p r", "q r", "q p", "r p", "r q"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_instance(name: &str) -> Instance {
    instance_from_json(&fixture(name)).unwrap()
}

pub fn fixture_script(name: &str) -> Script {
    Script::from_json(&fixture(name)).unwrap()
}

pub fn schema(rels: &[(&str, &[&str])]) -> Schema {
    Schema::from_relations(rels.iter().map(|(n, a)| RelationSchema::new(*n, a))).unwrap()
}

pub fn c(s: &str) -> Value {
    Value::constant(s)
}

fn tag(relation: &str) -> String {
    relation.to_lowercase()
}

/// A ground instance without value duplicates, at most `max_tuples` tuples overall.
/// `split_columns` names (relation, attribute) cells drawn from [`SPLIT_POOL`].
pub fn random_instance(
    rng: &mut impl Rng,
    schema: &Schema,
    max_tuples: usize,
    split_columns: &[(&str, &str)],
) -> Instance {
    let mut out = Instance::empty(schema.clone());
    let rels: Vec<&RelationSchema> = schema.relations().collect();
    let total = rng.gen_range(1..=max_tuples);
    let mut seen = HashSet::new();
    let mut ordinal = vec![0u64; rels.len()];
    for _ in 0..total * 2 {
        if out.len() >= total {
            break;
        }
        let k = rng.gen_range(0..rels.len());
        let rs = rels[k];
        let values: Vec<Value> = rs
            .attributes
            .iter()
            .map(|a| {
                let pool: &[&str] = if split_columns.contains(&(rs.name.as_str(), a.as_str())) {
                    &SPLIT_POOL
                } else {
                    &POOL
                };
                c(pool.choose(rng).unwrap())
            })
            .collect();
        if !seen.insert((rs.name.clone(), values.clone())) {
            continue;
        }
        ordinal[k] += 1;
        out.insert(&rs.name, TupleId::new(tag(&rs.name), ordinal[k]), values)
            .unwrap();
    }
    out
}

fn attrs(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn rel(name: &str, attributes: Vec<String>) -> RelationSchema {
    RelationSchema {
        name: name.to_string(),
        attributes,
    }
}

/// One catalog case: an operator, a source schema that fits it, and the cells that need
/// [`SPLIT_POOL`] values.
#[derive(Debug, Clone)]
pub struct Case {
    pub spec: SmoSpec,
    pub schema: Schema,
    pub split_columns: Vec<(String, String)>,
}

impl Case {
    pub fn instance(&self, rng: &mut impl Rng, max_tuples: usize) -> Instance {
        let cols: Vec<(&str, &str)> = self
            .split_columns
            .iter()
            .map(|(r, a)| (r.as_str(), a.as_str()))
            .collect();
        random_instance(rng, &self.schema, max_tuples, &cols)
    }
}

/// A random parameterization of `kind` over relations `R` (2 to 4 attributes) and `S`.
pub fn catalog_case(kind: SmoKind, rng: &mut impl Rng) -> Case {
    let n = rng.gen_range(2..=4);
    let r_attrs = attrs("a", n);
    let r = rel("R", r_attrs.clone());
    let s_other = rel("S", vec!["a0".into(), "k".into()]);
    let ra: Vec<&str> = r_attrs.iter().map(String::as_str).collect();
    let mut split_columns = Vec::new();
    let variant = if kind.has_variants() { rng.gen_range(1..=2) } else { 1 };
    let (spec, relations) = match kind {
        SmoKind::CopyTable => (SmoSpec::copy_table("R", "T", "U"), vec![r, s_other]),
        SmoKind::CreateTable => (SmoSpec::create_table("T", &["x", "y"]), vec![r]),
        SmoKind::DecomposeTable => {
            let cut = rng.gen_range(1..n);
            let first: Vec<&str> = ra[..=cut.min(n - 1)].to_vec();
            let mut second = vec![ra[0]];
            second.extend(&ra[cut..]);
            second.dedup();
            (SmoSpec::decompose_table("R", ["T", "U"], [&first, &second]), vec![r])
        }
        SmoKind::DropTable => (SmoSpec::drop_table("S"), vec![r, s_other]),
        SmoKind::JoinTable => (SmoSpec::join_table("R", "S", "T"), vec![r, s_other]),
        SmoKind::MergeTable => (SmoSpec::merge_table("R", "S", "T"), vec![r, rel("S", r_attrs.clone())]),
        SmoKind::PartitionTable => {
            let cond = format!("{} = '{}'", ra[rng.gen_range(0..n)], POOL.choose(rng).unwrap());
            (SmoSpec::partition_table("R", "T", "U", &cond), vec![r])
        }
        SmoKind::RenameTable => (SmoSpec::rename_table("R", "T"), vec![r]),
        SmoKind::AddColumn => {
            let spec = if rng.gen_bool(0.5) {
                SmoSpec::add_column_value("R", "z", POOL.choose(rng).unwrap())
            } else {
                SmoSpec::add_column_function("R", "z", "concat", &[ra[0], ra[n - 1]])
            };
            (spec, vec![r])
        }
        SmoKind::CopyColumn => (
            SmoSpec::copy_column("R", "S", ra[n - 1], "a0 = k", "moved"),
            vec![r, rel("S", vec!["k".into(), "w".into()])],
        ),
        SmoKind::MoveColumn => (
            SmoSpec::move_column("R", "S", ra[n - 1], "a0 = k", "moved"),
            vec![r, rel("S", vec!["k".into(), "w".into()])],
        ),
        SmoKind::DropColumn => {
            let col = ra[rng.gen_range(1..n)];
            (SmoSpec::drop_column("R", &[col]), vec![r])
        }
        SmoKind::MergeColumn => {
            let i = rng.gen_range(0..n - 1);
            (SmoSpec::merge_column("R", [ra[i], ra[i + 1]], "g", "concat"), vec![r])
        }
        SmoKind::RenameColumn => (SmoSpec::rename_column("R", ra[n - 1], "renamed"), vec![r]),
        SmoKind::SplitColumn => {
            let col = ra[n - 1];
            split_columns.push(("R".to_string(), col.to_string()));
            (SmoSpec::split_column("R", col, ["left", "right"], "concat"), vec![r])
        }
        SmoKind::Nop => (SmoSpec::nop(), vec![r]),
    };
    let schema = Schema::from_relations(relations).unwrap();
    let spec = spec.with_variant(variant);
    assert!(compile_forward(&spec, &schema).is_ok(), "{spec:?} over {schema}");
    Case {
        spec,
        schema,
        split_columns,
    }
}

/// Every combination the predictor distinguishes.
pub fn resource_settings() -> Vec<Resources> {
    let mut out = Vec::new();
    for mode in ProvenanceMode::ALL {
        for side in [false, true] {
            for inv in [false, true] {
                let mut r = Resources::new(mode);
                r.side_tables = side;
                r.inverse_functions = inv;
                out.push(r);
            }
        }
    }
    out
}

/// Existence of a homomorphism by enumerating every assignment of the domain's nulls to
/// values of the codomain.
pub fn brute_force_homomorphism(from: &Instance, to: &Instance) -> bool {
    let nulls: Vec<NullLabel> = from.nulls().into_iter().collect();
    let adom: Vec<Value> = to
        .facts()
        .flat_map(|f| f.values.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if nulls.is_empty() {
        return Homomorphism::default().maps_into(from, to);
    }
    if adom.is_empty() {
        return from.is_empty();
    }
    let mut choice = vec![0usize; nulls.len()];
    loop {
        let h = Homomorphism {
            nulls: nulls
                .iter()
                .zip(&choice)
                .map(|(l, &i)| (*l, adom[i].clone()))
                .collect(),
        };
        if h.maps_into(from, to) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return false;
            }
            choice[k] += 1;
            if choice[k] < adom.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}
