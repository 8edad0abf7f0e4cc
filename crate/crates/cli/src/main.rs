//! `backchase`: evolve an instance through a script, invert the run, classify the result.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 invalid input, 3 a step below its prediction.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use backchase::analysis::{classify, ClassificationReport};
use backchase::dependency::SchemaMapping;
use backchase::pipeline::{backchase_restricted, evolve, read_run, write_run, Backchase};
use backchase::provenance::ProvenanceMode;
use backchase::relational::json::{instance_from_json, instance_to_json};
use backchase::relational::TupleId;
use backchase::smo::{catalog, FunctionRegistry, Resources, Script};
use backchase::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "backchase", version, about = "Schema evolution by chase, inversion by backchase")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ResourceArgs {
    #[arg(long, default_value = "none", value_parser = parse_mode)]
    provenance: ProvenanceMode,
    /// Keep side tables for the values the forward step drops.
    #[arg(long)]
    side_tables: bool,
    /// Allow inverse functions such as `dec_add.inv` in the inverse tgds.
    #[arg(long)]
    inverse_functions: bool,
}

impl ResourceArgs {
    fn resources(&self) -> Resources {
        Resources {
            provenance: self.provenance,
            side_tables: self.side_tables,
            inverse_functions: self.inverse_functions,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Chase an instance through a script and store the run in a directory.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[command(flatten)]
        resources: ResourceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Invert a stored run; writes I* and prints the report.
    Invert {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated ids of J to start the inversion from.
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Classify a reconstruction against the original under a mapping.
    Classify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        reconstructed: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
    },
    /// Evolve and invert in one go; writes the report.
    Roundtrip {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[command(flatten)]
        resources: ResourceArgs,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        restrict: Option<String>,
        /// Also write the reconstructed instance here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the operators with their class, inverse and sample tgds.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

fn parse_mode(s: &str) -> Result<ProvenanceMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Io(String),
    Invalid(String),
    BelowPrediction,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_ids(list: Option<&str>) -> Result<Option<BTreeSet<TupleId>>, Failure> {
    list.map(|l| {
        l.split(',')
            .map(|s| s.trim().parse::<TupleId>().map_err(Failure::from))
            .collect()
    })
    .transpose()
}

fn summarize(b: &Backchase) {
    for s in &b.steps {
        eprintln!(
            "step {} {}: {} (predicted {}{})",
            s.index,
            s.spec.kind,
            s.step_type,
            s.predicted,
            if s.downgrades.is_empty() { "" } else { ", downgraded" }
        );
    }
    eprintln!("composed: {}, end to end: {}", b.composed, b.end_to_end.inverse_type);
}

fn finish(b: &Backchase) -> Result<(), Failure> {
    summarize(b);
    if b.meets_prediction() {
        Ok(())
    } else {
        Err(Failure::BelowPrediction)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let registry = FunctionRegistry::builtin();
    match cli.command {
        Command::Evolve {
            input,
            script,
            resources,
            out,
        } => {
            let instance = instance_from_json(&read(&input)?)?;
            let script = Script::from_json(&read(&script)?)?;
            let run = evolve(&instance, &script, resources.resources(), &registry)?;
            write_run(&run, &out)?;
            eprintln!("{} steps, J has {} facts, written to {}", run.steps.len(), run.target().len(), out.display());
            Ok(())
        }
        Command::Invert { run, out, restrict } => {
            let stored = read_run(&run, &registry)?;
            let ids = parse_ids(restrict.as_deref())?;
            let b = backchase_restricted(&stored, &registry, ids.as_ref())?;
            write(&out, &(instance_to_json(&b.reconstructed) + "\n"))?;
            println!("{}", b.report().to_json());
            finish(&b)
        }
        Command::Classify {
            original,
            reconstructed,
            mapping,
        } => {
            let i = instance_from_json(&read(&original)?)?;
            let star = instance_from_json(&read(&reconstructed)?)?;
            let m = SchemaMapping::from_json(&read(&mapping)?)?;
            let c = classify(&i, &star, &m, &registry)?;
            println!("{}", ClassificationReport::new(&c, None).to_json());
            Ok(())
        }
        Command::Roundtrip {
            input,
            script,
            resources,
            report,
            restrict,
            out,
        } => {
            let instance = instance_from_json(&read(&input)?)?;
            let script = Script::from_json(&read(&script)?)?;
            let ids = parse_ids(restrict.as_deref())?;
            let run = evolve(&instance, &script, resources.resources(), &registry)?;
            let b = backchase_restricted(&run, &registry, ids.as_ref())?;
            write(&report, &(b.report().to_json() + "\n"))?;
            if let Some(out) = out {
                write(&out, &(instance_to_json(&b.reconstructed) + "\n"))?;
            }
            finish(&b)
        }
        Command::Catalog { json } => {
            let entries = catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
                return Ok(());
            }
            for e in entries {
                let classes: Vec<String> = e.classes.iter().map(ToString::to_string).collect();
                println!("{} (class {}): {}", e.kind, classes.join("/"), e.description);
                println!("  inverse: {}", e.inverse_operator);
                for t in &e.forward {
                    println!("  forward  {t}");
                }
                for t in &e.inverse {
                    println!("  inverse  {t}");
                }
                for t in &e.inverse_with_provenance {
                    println!("  with provenance  {t}");
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::BelowPrediction) => {
            eprintln!("a step classified below its prediction");
            ExitCode::from(3)
        }
    }
}
