use crate::dependency::{chase, SchemaMapping};
use crate::error::{Error, Result};
use crate::provenance::{build_side_table, ProvenanceMode, ProvenanceStore, SideTable};
use crate::relational::{Instance, RunState};
use crate::smo::{compile_forward, compile_inverse_of, FunctionRegistry, InstanceFeatures, Resources, Script, SmoSpec};

/// Everything one forward step produced.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub spec: SmoSpec,
    pub source: Instance,
    pub forward: SchemaMapping,
    pub target: Instance,
    pub store: ProvenanceStore,
    pub side_tables: Vec<SideTable>,
    pub features: InstanceFeatures,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub script: Script,
    pub resources: Resources,
    pub initial: Instance,
    pub steps: Vec<StepRecord>,
}

impl EvolutionRun {
    /// The final target J; the source itself for an empty script.
    pub fn target(&self) -> &Instance {
        self.steps.last().map_or(&self.initial, |s| &s.target)
    }

    pub fn mode(&self) -> ProvenanceMode {
        self.resources.provenance
    }
}

pub(crate) fn step_error(index: usize, spec: &SmoSpec, e: Error) -> Error {
    match e {
        Error::Step { .. } => e,
        other => Error::Step {
            step: index + 1,
            kind: spec.kind.to_string(),
            message: other.to_string(),
        },
    }
}

/// Chases every step of `script` in order, keeping per step the store and the side tables
/// its inverse plan asks for under `resources`.
pub fn evolve(
    instance: &Instance,
    script: &Script,
    resources: Resources,
    registry: &FunctionRegistry,
) -> Result<EvolutionRun> {
    let mut state = RunState::seeded_from([instance]);
    let mut current = instance.clone();
    let mut steps = Vec::with_capacity(script.steps.len());
    for (i, spec) in script.steps.iter().enumerate() {
        let record = evolve_step(&current, spec, resources, registry, &mut state)
            .map_err(|e| step_error(i, spec, e))?;
        current = record.target.clone();
        steps.push(record);
    }
    Ok(EvolutionRun {
        script: script.clone(),
        resources,
        initial: instance.clone(),
        steps,
    })
}

fn evolve_step(
    source: &Instance,
    spec: &SmoSpec,
    resources: Resources,
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<StepRecord> {
    let forward = compile_forward(spec, source.schema())?;
    let (target, store) = chase(source, &forward, resources.provenance, registry, state)?;
    let plan = compile_inverse_of(spec, source.schema(), &forward, resources)?;
    let side_tables = plan
        .required_side_tables
        .iter()
        .map(|s| build_side_table(source, s, &forward))
        .collect::<Result<Vec<_>>>()?;
    let features = InstanceFeatures::compute(source, &forward, registry)?;
    Ok(StepRecord {
        spec: spec.clone(),
        source: source.clone(),
        forward,
        target,
        store,
        side_tables,
        features,
    })
}

/// Rebuilds a run from stored parts: per step its target, store and side tables.
pub fn run_from_parts(
    initial: Instance,
    script: Script,
    resources: Resources,
    parts: Vec<(Instance, ProvenanceStore, Vec<SideTable>)>,
    registry: &FunctionRegistry,
) -> Result<EvolutionRun> {
    if parts.len() != script.steps.len() {
        return Err(Error::Schema(format!(
            "the script has {} steps but {} were stored",
            script.steps.len(),
            parts.len()
        )));
    }
    let mut source = initial.clone();
    let mut steps = Vec::new();
    for (i, (spec, (target, store, side_tables))) in script.steps.iter().zip(parts).enumerate() {
        let rebuild = || -> Result<StepRecord> {
            let forward = compile_forward(spec, source.schema())?;
            if target.schema() != &forward.target {
                return Err(Error::Schema(format!(
                    "stored target has schema [{}], the operator gives [{}]",
                    target.schema(),
                    forward.target
                )));
            }
            let features = InstanceFeatures::compute(&source, &forward, registry)?;
            Ok(StepRecord {
                spec: spec.clone(),
                source: source.clone(),
                forward,
                target,
                store,
                side_tables,
                features,
            })
        };
        let record = rebuild().map_err(|e| step_error(i, spec, e))?;
        source = record.target.clone();
        steps.push(record);
    }
    Ok(EvolutionRun {
        script,
        resources,
        initial,
        steps,
    })
}
