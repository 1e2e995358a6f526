//! Batch driver: a JSON run spec in, reproducible JSON, CSV and DOT
//! artifacts out.
//!
//! Exit codes are 0 on success, 2 for spec and validation errors and 3 for
//! computation or output errors.

pub mod artifact;
pub mod commands;
pub mod spec;

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use artifact::{write_atomic, Artifact, Format};
use commands::{Builtin, LatticeSource, Output};
use spec::{RunSpec, PARTITION_PLACEHOLDER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Compute(#[from] coarsegrain::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn spec(msg: impl Display) -> Self {
        CliError::Spec(msg.to_string())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Compute(_) | CliError::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coarsegrain", version, about = "Coarse-grained dynamics: refinement, classification, partition logics and entropy")]
pub struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true, env = "COARSEGRAIN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Override the spec's horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for artifacts; relative spec output paths resolve against it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact format printed to standard output when nothing is written to
    /// files.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-horizon refinement of one partition and its generating verdict.
    Refine(RunArgs),
    /// Compatibility classification of two partitions.
    Classify(RunArgs),
    /// Partition logic or fixture lattice with its Hasse diagram and law report.
    Lattice {
        #[arg(long, value_enum, conflicts_with = "spec", required_unless_present = "spec")]
        builtin: Option<Builtin>,
        /// Spec with one partition (Boolean algebra) or two (partition logic).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dynamical entropy per partition and the family maximum.
    Entropy(RunArgs),
    /// List the built-in maps.
    Systems {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

pub fn load_spec(path: &Path, horizon: Option<usize>) -> Result<RunSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
    let mut spec = RunSpec::parse(&text)?;
    if let Some(h) = horizon {
        spec.horizon = h;
        spec.validate()?;
    }
    Ok(spec)
}

/// Where an artifact goes: a spec-listed path (resolved against `out`), else
/// `out/<default name>`, else nowhere (standard output).
fn destination(a: &Artifact, spec: Option<&RunSpec>, out: Option<&Path>) -> Option<PathBuf> {
    let listed = spec.and_then(|s| s.outputs.iter().find(|o| o.artifact == a.kind));
    match (listed, out) {
        (Some(o), _) => {
            let path = match &a.partition {
                Some(p) => o.path.replace(PARTITION_PLACEHOLDER, &commands::file_safe(p)),
                None => o.path.clone(),
            };
            let path = PathBuf::from(path);
            Some(match out {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path,
            })
        }
        (None, Some(dir)) => Some(dir.join(&a.file)),
        (None, None) => None,
    }
}

/// Write or print the artifacts and report warnings on standard error.
///
/// JSON artifacts bound for standard output are merged into one document;
/// they share the provenance keys.
pub fn emit(result: &Output, spec: Option<&RunSpec>, args: &OutputArgs) -> Result<(), CliError> {
    let mut printed = Vec::new();
    for a in &result.artifacts {
        match destination(a, spec, args.out.as_deref()) {
            Some(path) => write_atomic(&path, &a.text)?,
            None if a.format == args.format => printed.push(a),
            None => {}
        }
    }
    let text = if args.format == Format::Json && printed.len() > 1 {
        let mut merged = serde_json::Map::new();
        for a in printed {
            let doc: serde_json::Map<String, serde_json::Value> =
                serde_json::from_str(&a.text).expect("artifact is a JSON object");
            merged.extend(doc);
        }
        let mut t = serde_json::to_string_pretty(&merged).expect("json");
        t.push('\n');
        t
    } else {
        printed.iter().map(|a| a.text.as_str()).collect()
    };
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::spec("--threads must be >= 1"));
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Refine(a) => {
            let spec = load_spec(&a.spec, a.horizon)?;
            emit(&commands::refine(&spec)?, Some(&spec), &a.output)
        }
        Command::Classify(a) => {
            let spec = load_spec(&a.spec, a.horizon)?;
            emit(&commands::classify_cmd(&spec)?, Some(&spec), &a.output)
        }
        Command::Entropy(a) => {
            let spec = load_spec(&a.spec, a.horizon)?;
            emit(&commands::entropy_cmd(&spec)?, Some(&spec), &a.output)
        }
        Command::Lattice { builtin, spec, output } => match (builtin, spec) {
            (Some(b), _) => emit(&commands::lattice_cmd(LatticeSource::Builtin(b))?, None, &output),
            (None, Some(path)) => {
                let spec = load_spec(&path, None)?;
                emit(&commands::lattice_cmd(LatticeSource::Spec(&spec))?, Some(&spec), &output)
            }
            (None, None) => Err(CliError::spec("`lattice` needs --builtin or --spec")),
        },
        Command::Systems { format } => {
            print!("{}", commands::systems(format));
            Ok(())
        }
    }
}
