use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::analysis::{classify, classify_chain, Classification, ClassificationReport, InverseType};
use crate::dependency::{chase_with, expand_duplicates, single_witness, ChaseOptions, FunctionPolicy, SchemaMapping};
use crate::error::{Error, Result};
use crate::provenance::{Annotation, ProvenanceMode, ProvenanceStore, SideTable};
use crate::relational::{Constant, Instance, RunState, TupleId, Value};
use crate::smo::{
    compile_inverse_of, inverse_name, predicted_inverse_type, FunctionRegistry, InversePlan, PostStep,
    Resources, SmoKind, SmoSpec,
};

use super::evolve::{step_error, EvolutionRun, StepRecord};

/// Runs an inverse plan on a step target: expansion, witness columns, side-table relations,
/// the inverse chase, then the remaining post-steps in order.
pub fn execute_plan(
    plan: &InversePlan,
    target: &Instance,
    store: &ProvenanceStore,
    side_tables: &[SideTable],
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<Instance> {
    state.observe(target);
    let (j, st) = if plan.expands() {
        expand_duplicates(target, store, state)?
    } else {
        (target.clone(), store.clone())
    };

    let mut input = Instance::empty(plan.mapping.source.clone());
    for f in j.facts() {
        let mut values = f.values.clone();
        if plan.keyed.contains(&f.relation) {
            let witness = st
                .resolve(&f.id, &f.relation, &f.values)
                .and_then(single_witness)
                .map(|m| Value::Const(Constant::text(m.to_string())));
            values.push(witness.unwrap_or_else(|| state.nulls.fresh()));
        }
        input.insert(&f.relation, f.id.clone(), values)?;
    }
    for rs in plan.mapping.source.relations() {
        if j.schema().contains(&rs.name) {
            continue;
        }
        let table = find_table(side_tables, &rs.name)?;
        for t in table.tuples() {
            let id = state.ids.fresh_for(&rs.name);
            input.insert(&rs.name, id, t)?;
        }
    }

    let options = ChaseOptions {
        mode: ProvenanceMode::How,
        functions: FunctionPolicy::Skolem,
    };
    let out = chase_with(&input, &plan.mapping, options, registry, state)?;
    let mut result = out.instance;
    for step in &plan.post_steps {
        match step {
            PostStep::ExpandDuplicates => {}
            PostStep::AppendSideTableRows { table } => {
                let table = find_table(side_tables, table)?;
                let rs = plan.mapping.target.require(&table.spec.relation)?;
                if !table.spec.is_complete_for(rs) {
                    return Err(Error::Schema(format!(
                        "side table {} does not hold every attribute of {}",
                        table.name(),
                        rs.name
                    )));
                }
                for row in &table.rows {
                    let id = if result.fact(&row.reference).is_none() {
                        row.reference.clone()
                    } else {
                        state.ids.fresh_for(&rs.name)
                    };
                    result.insert(&rs.name, id, row.values.clone())?;
                }
            }
            PostStep::RestrictByOrigin { relations } => {
                let how = &out.how;
                result.retain(|f| {
                    if !relations.contains(&f.relation) {
                        return true;
                    }
                    let Some(p) = how.get(&f.id) else { return true };
                    p.support().iter().any(|jid| {
                        j.fact(jid)
                            .and_then(|jf| st.resolve(jid, &jf.relation, &jf.values))
                            .is_some_and(|a| points_to(&st, a, &f.relation))
                    })
                });
            }
        }
    }
    Ok(result)
}

fn find_table<'a>(tables: &'a [SideTable], name: &str) -> Result<&'a SideTable> {
    tables
        .iter()
        .find(|t| t.name() == name)
        .ok_or_else(|| Error::InsufficientProvenance(format!("side table {name} is not available")))
}

/// The annotation names `relation` as a source: by name (where) or through a witness made
/// only of tuples from it.
fn points_to(store: &ProvenanceStore, a: &Annotation, relation: &str) -> bool {
    match a {
        Annotation::Where(rels) => rels.contains(relation),
        other => other.witnesses().is_some_and(|w| {
            w.witnesses()
                .any(|w| !w.is_empty() && w.iter().all(|id| store.origin(id) == Some(relation)))
        }),
    }
}

fn function_available(spec: &SmoSpec, registry: &FunctionRegistry) -> Option<String> {
    let f = spec.function.as_deref()?;
    let needed = match spec.kind {
        SmoKind::MergeColumn => inverse_name(f),
        SmoKind::SplitColumn => f.to_string(),
        _ => return None,
    };
    (!registry.contains(&needed)).then_some(needed)
}

/// The strongest plan the step's stored material supports, weakening the requested
/// resources where something is missing.
pub fn plan_for_step(
    step: &StepRecord,
    requested: Resources,
    registry: &FunctionRegistry,
) -> Result<(InversePlan, Resources, Vec<String>)> {
    let mut r = requested;
    let mut notes = Vec::new();
    if step.store.mode() < r.provenance {
        notes.push(format!(
            "the stored provenance is {}, not {}",
            step.store.mode(),
            r.provenance
        ));
        r.provenance = step.store.mode();
    }
    loop {
        let plan = compile_inverse_of(&step.spec, step.source.schema(), &step.forward, r)?;
        if plan.required_inverse_function {
            if let Some(missing) = function_available(&step.spec, registry) {
                notes.push(format!("function {missing} is not registered; inverse functions dropped"));
                r.inverse_functions = false;
                continue;
            }
        }
        let missing = plan
            .required_side_tables
            .iter()
            .find(|s| !step.side_tables.iter().any(|t| &t.spec == *s));
        if let Some(s) = missing {
            notes.push(format!("side table {} is missing", s.name()));
            if r.side_tables_usable() {
                r.side_tables = false;
            } else {
                r.provenance = ProvenanceMode::None;
            }
            continue;
        }
        return Ok((plan, r, notes));
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub index: usize,
    pub spec: SmoSpec,
    pub plan: InversePlan,
    pub resources: Resources,
    pub downgrades: Vec<String>,
    /// The step's inverse run on its own target.
    pub reconstructed: Instance,
    pub classification: Classification,
    pub predicted: InverseType,
    /// The classified type, or `none` for a plan flagged non-invertible.
    pub step_type: InverseType,
}

#[derive(Debug, Clone)]
pub struct Backchase {
    pub resources: Resources,
    pub steps: Vec<StepOutcome>,
    /// Inverse plans applied from the last step to the first, starting at J.
    pub reconstructed: Instance,
    pub composed: InverseType,
    pub end_to_end: Classification,
    pub restricted: bool,
}

/// Keeps only the facts of `instance` whose id is listed.
pub fn restrict_to(instance: &Instance, ids: &BTreeSet<TupleId>) -> Instance {
    let mut out = instance.clone();
    out.retain(|f| ids.contains(&f.id));
    out
}

fn collapse_value_duplicates(instance: &Instance) -> Instance {
    let mut seen: HashSet<(String, Vec<Value>)> = HashSet::new();
    let mut out = instance.clone();
    out.retain(|f| seen.insert((f.relation.clone(), f.values.clone())));
    out
}

/// Inverts a run step by step. Each step is classified on its own target against its own
/// source; the composed type is the weakest step type.
pub fn backchase(run: &EvolutionRun, registry: &FunctionRegistry) -> Result<Backchase> {
    backchase_restricted(run, registry, None)
}

/// As [`backchase`], with the chained reconstruction starting from the facts of J whose
/// ids are in `restrict`. Per-step classifications do not depend on the restriction.
pub fn backchase_restricted(
    run: &EvolutionRun,
    registry: &FunctionRegistry,
    restrict: Option<&BTreeSet<TupleId>>,
) -> Result<Backchase> {
    let mut state = RunState::seeded_from(
        std::iter::once(&run.initial).chain(run.steps.iter().map(|s| &s.target)),
    );
    let mut outcomes = Vec::with_capacity(run.steps.len());
    for (i, step) in run.steps.iter().enumerate() {
        let outcome = backchase_step(i, step, run.resources, registry, &mut state)
            .map_err(|e| step_error(i, &step.spec, e))?;
        outcomes.push(outcome);
    }

    let mut current = match restrict {
        Some(ids) => restrict_to(run.target(), ids),
        None => run.target().clone(),
    };
    for (i, (step, outcome)) in run.steps.iter().zip(&outcomes).enumerate().rev() {
        let input = if outcome.plan.expands() {
            collapse_value_duplicates(&current)
        } else {
            current
        };
        current = execute_plan(&outcome.plan, &input, &step.store, &step.side_tables, registry, &mut state)
            .map_err(|e| step_error(i, &step.spec, e))?;
    }
    let forwards: Vec<&SchemaMapping> = run.steps.iter().map(|s| &s.forward).collect();
    let end_to_end = classify_chain(&run.initial, &current, &forwards, registry)?;
    let composed = composed_type(outcomes.iter().map(|o| o.step_type));
    Ok(Backchase {
        resources: run.resources,
        steps: outcomes,
        reconstructed: current,
        composed,
        end_to_end,
        restricted: restrict.is_some(),
    })
}

/// The weakest of the step types; `exact` for no steps.
pub fn composed_type(types: impl IntoIterator<Item = InverseType>) -> InverseType {
    types.into_iter().min().unwrap_or(InverseType::Exact)
}

fn backchase_step(
    index: usize,
    step: &StepRecord,
    requested: Resources,
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<StepOutcome> {
    let (plan, resources, downgrades) = plan_for_step(step, requested, registry)?;
    let reconstructed = execute_plan(&plan, &step.target, &step.store, &step.side_tables, registry, state)?;
    let classification = classify(&step.source, &reconstructed, &step.forward, registry)?;
    let predicted = predicted_inverse_type(&step.spec, resources, &step.features);
    let step_type = if plan.non_invertible {
        InverseType::None
    } else {
        classification.inverse_type
    };
    Ok(StepOutcome {
        index: index + 1,
        spec: step.spec.clone(),
        plan,
        resources,
        downgrades,
        reconstructed,
        classification,
        predicted,
        step_type,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub kind: SmoKind,
    pub variant: u8,
    pub resources: Resources,
    pub inverse_sigma: Vec<String>,
    pub post_steps: Vec<PostStep>,
    pub non_invertible: bool,
    pub downgrades: Vec<String>,
    pub classification: ClassificationReport,
    pub step_type: InverseType,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub resources: Resources,
    pub steps: Vec<StepReport>,
    pub composed: InverseType,
    pub end_to_end: ClassificationReport,
    pub meets_prediction: bool,
    pub restricted: bool,
}

impl RoundtripReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Backchase {
    pub fn meets_prediction(&self) -> bool {
        self.steps.iter().all(|s| s.classification.inverse_type >= s.predicted)
    }

    pub fn report(&self) -> RoundtripReport {
        RoundtripReport {
            resources: self.resources,
            steps: self
                .steps
                .iter()
                .map(|s| StepReport {
                    index: s.index,
                    kind: s.spec.kind,
                    variant: s.spec.variant,
                    resources: s.resources,
                    inverse_sigma: s.plan.inverse_sigma().iter().map(ToString::to_string).collect(),
                    post_steps: s.plan.post_steps.clone(),
                    non_invertible: s.plan.non_invertible,
                    downgrades: s.downgrades.clone(),
                    classification: ClassificationReport::new(&s.classification, Some(s.predicted)),
                    step_type: s.step_type,
                })
                .collect(),
            composed: self.composed,
            end_to_end: ClassificationReport::new(&self.end_to_end, None),
            meets_prediction: self.meets_prediction(),
            restricted: self.restricted,
        }
    }
}
