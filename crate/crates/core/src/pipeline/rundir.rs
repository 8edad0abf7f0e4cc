use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dependency::SchemaMapping;
use crate::error::{Error, Result};
use crate::provenance::{side_tables_from_json, side_tables_to_json, ProvenanceStore};
use crate::relational::json::{instance_from_json, instance_to_json};
use crate::smo::{FunctionRegistry, Resources, Script};

use super::evolve::{run_from_parts, EvolutionRun};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    resources: Resources,
    steps: usize,
}

/// Layout: `source.json`, `script.json`, `run.json`, `target.json` (J), and per step
/// `stepK/` with `target.json`, `mapping.json`, `provenance.json` and, when any were kept,
/// `side_tables.json`.
pub fn write_run(run: &EvolutionRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("source.json"), instance_to_json(&run.initial))?;
    fs::write(dir.join("script.json"), run.script.to_json())?;
    let manifest = Manifest {
        resources: run.resources,
        steps: run.steps.len(),
    };
    fs::write(dir.join("run.json"), serde_json::to_string_pretty(&manifest)?)?;
    fs::write(dir.join("target.json"), instance_to_json(run.target()))?;
    for (i, step) in run.steps.iter().enumerate() {
        let sd = dir.join(format!("step{}", i + 1));
        fs::create_dir_all(&sd)?;
        fs::write(sd.join("target.json"), instance_to_json(&step.target))?;
        fs::write(sd.join("mapping.json"), step.forward.to_json())?;
        fs::write(sd.join("provenance.json"), step.store.to_json())?;
        if !step.side_tables.is_empty() {
            fs::write(sd.join("side_tables.json"), side_tables_to_json(&step.side_tables))?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads a directory written by [`write_run`]. Stored mappings must match the ones the
/// script compiles to.
pub fn read_run(dir: &Path, registry: &FunctionRegistry) -> Result<EvolutionRun> {
    let initial = instance_from_json(&read(&dir.join("source.json"))?)?;
    let script = Script::from_json(&read(&dir.join("script.json"))?)?;
    let manifest: Manifest = serde_json::from_str(&read(&dir.join("run.json"))?)?;
    if manifest.steps != script.steps.len() {
        return Err(Error::Schema(format!(
            "run.json lists {} steps, the script has {}",
            manifest.steps,
            script.steps.len()
        )));
    }
    let mut parts = Vec::with_capacity(manifest.steps);
    let mut mappings = Vec::with_capacity(manifest.steps);
    for i in 1..=manifest.steps {
        let sd = dir.join(format!("step{i}"));
        let target = instance_from_json(&read(&sd.join("target.json"))?)?;
        let store = ProvenanceStore::from_json(&read(&sd.join("provenance.json"))?)?;
        let tables_path = sd.join("side_tables.json");
        let tables = if tables_path.exists() {
            side_tables_from_json(&read(&tables_path)?)?
        } else {
            Vec::new()
        };
        mappings.push(SchemaMapping::from_json(&read(&sd.join("mapping.json"))?)?);
        parts.push((target, store, tables));
    }
    let run = run_from_parts(initial, script, manifest.resources, parts, registry)?;
    for (i, (step, stored)) in run.steps.iter().zip(&mappings).enumerate() {
        if step.forward.to_json() != stored.to_json() {
            return Err(Error::Schema(format!(
                "step{}/mapping.json differs from the compiled operator",
                i + 1
            )));
        }
    }
    Ok(run)
}
