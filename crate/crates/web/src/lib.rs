//! Browser bindings: run a script and invert it, chase hand-written tgds, list the operators.
//!
//! Every function takes and returns JSON text so the page needs no glue beyond `JSON.parse`.

use std::collections::BTreeMap;

use backchase::dependency::{chase, SchemaMapping, StTgd, Term};
use backchase::pipeline::roundtrip as run_roundtrip;
use backchase::provenance::ProvenanceMode;
use backchase::relational::json::{instance_from_json, instance_to_json};
use backchase::relational::{RelationSchema, RunState, Schema};
use backchase::smo::{catalog as entries, FunctionRegistry, Resources, Script};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn parse(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// Evolves `instance` through `script`, inverts the run and returns
/// `{target, reconstructed, report}`.
#[wasm_bindgen]
pub fn roundtrip(instance: &str, script: &str, resources: &str) -> Result<String, String> {
    let i = instance_from_json(instance).map_err(|e| e.to_string())?;
    let s = Script::from_json(script).map_err(|e| e.to_string())?;
    let r: Resources = serde_json::from_str(resources).map_err(|e| e.to_string())?;
    let (run, b) = run_roundtrip(&i, &s, r, &FunctionRegistry::builtin()).map_err(|e| e.to_string())?;
    let out = json!({
        "target": parse(&instance_to_json(run.target()))?,
        "reconstructed": parse(&instance_to_json(&b.reconstructed))?,
        "report": parse(&b.report().to_json())?,
    });
    Ok(out.to_string())
}

/// Target relations read off the tgd heads; a column is named after its
/// variable when that name is free, else `c1`, `c2`, ...
fn head_schema(tgds: &[StTgd]) -> Result<Schema, String> {
    let mut relations: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for t in tgds {
        for a in t.head() {
            if let Some(existing) = relations.get(&a.relation) {
                if existing.len() != a.terms.len() {
                    return Err(format!("{} is used with two arities", a.relation));
                }
                continue;
            }
            let mut names: Vec<String> = Vec::new();
            for (k, term) in a.terms.iter().enumerate() {
                let name = match term {
                    Term::Var(v) if !names.contains(v) => v.clone(),
                    _ => format!("c{}", k + 1),
                };
                names.push(name);
            }
            relations.insert(a.relation.clone(), names);
        }
    }
    Schema::from_relations(relations.into_iter().map(|(r, attrs)| {
        let attrs: Vec<&str> = attrs.iter().map(String::as_str).collect();
        RelationSchema::new(r, &attrs)
    }))
    .map_err(|e| e.to_string())
}

/// Chases `instance` with one tgd per non-empty line of `tgds` and returns
/// `{target, provenance}` annotated at `mode` (`none`, `where`, `why`, `how`).
#[wasm_bindgen]
pub fn chase_tgds(instance: &str, tgds: &str, mode: &str) -> Result<String, String> {
    let i = instance_from_json(instance).map_err(|e| e.to_string())?;
    let mode: ProvenanceMode = mode.parse().map_err(|e: backchase::Error| e.to_string())?;
    let sigma = tgds
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<StTgd>().map_err(|e| format!("{l}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let target = head_schema(&sigma)?;
    let m = SchemaMapping::new(i.schema().clone(), target, sigma).map_err(|e| e.to_string())?;
    let mut state = RunState::new();
    let (j, store) = chase(&i, &m, mode, &FunctionRegistry::builtin(), &mut state).map_err(|e| e.to_string())?;
    let out = json!({
        "target": parse(&instance_to_json(&j))?,
        "provenance": parse(&store.to_json())?,
    });
    Ok(out.to_string())
}

/// The operator catalog with sample tgds.
#[wasm_bindgen]
pub fn catalog() -> String {
    serde_json::to_string(&entries()).expect("catalog serializes")
}
