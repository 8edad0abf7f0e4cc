//! Forward runs over a script and their inversion.

mod backchase;
mod evolve;
mod rundir;

pub use backchase::{
    backchase, backchase_restricted, composed_type, execute_plan, plan_for_step, restrict_to, Backchase,
    RoundtripReport, StepOutcome, StepReport,
};
pub use evolve::{evolve, run_from_parts, EvolutionRun, StepRecord};
pub use rundir::{read_run, write_run};

use crate::error::Result;
use crate::relational::Instance;
use crate::smo::{FunctionRegistry, Resources, Script};

/// Evolves `instance` and inverts the run in one go.
pub fn roundtrip(
    instance: &Instance,
    script: &Script,
    resources: Resources,
    registry: &FunctionRegistry,
) -> Result<(EvolutionRun, Backchase)> {
    let run = evolve(instance, script, resources, registry)?;
    let back = backchase(&run, registry)?;
    Ok((run, back))
}
