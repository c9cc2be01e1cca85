use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qgroup::format::{emit_quantum_group, parse_quantum_group};
use qgroup::groups::{builtin, function_algebra, group_algebra, CayleyTable, BUILTIN_NAMES};
use qgroup::report::{render_text, run_pipeline, Stage, DEFAULT_SEED};
use qgroup::{QgError, QuantumGroup, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "qg",
    version,
    about = "Harmonic analysis on finite quantum groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Quantum-group file
    file: PathBuf,
    /// Absolute tolerance for every residual check
    #[arg(long, env = "QG_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Emit the JSON report instead of tables
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the quantum-group axioms
    Validate(Common),
    /// Haar state and GNS construction
    Haar(Common),
    /// Decompose the right regular representation
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Orthogonality relations for matrix coefficients
    Orthogonality {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the full pipeline
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write a built-in quantum group, or one built from a Cayley table
    Example {
        /// Built-in name (omit with --cayley)
        #[arg(required_unless_present_any = ["cayley", "list"])]
        name: Option<String>,
        /// Build from a Cayley-table file instead
        #[arg(long, conflicts_with = "name", requires = "kind")]
        cayley: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Output file; stdout if omitted
        #[arg(long)]
        emit: Option<PathBuf>,
        /// List built-in names
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Functions on the group
    Function,
    /// Group algebra
    Group,
}

fn load(path: &Path) -> Result<QuantumGroup, QgError> {
    let text = std::fs::read_to_string(path)?;
    parse_quantum_group(&text)
}

fn analyse(common: &Common, seed: u64, stage: Stage) -> Result<bool, QgError> {
    let g = load(&common.file)?;
    let report = run_pipeline(&g, common.tol, seed, stage);
    if common.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", render_text(&report));
    }
    Ok(report.pass)
}

fn example(
    name: Option<String>,
    cayley: Option<PathBuf>,
    kind: Option<Kind>,
    emit: Option<PathBuf>,
) -> Result<bool, QgError> {
    let g = match (name, cayley) {
        (Some(name), _) => builtin(&name).ok_or_else(|| {
            QgError::Parse(format!(
                "unknown example '{name}'; expected one of {}",
                BUILTIN_NAMES.join(", ")
            ))
        })?,
        (None, Some(path)) => {
            let table = CayleyTable::from_json(&std::fs::read_to_string(&path)?)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            match kind.expect("clap requires --kind with --cayley") {
                Kind::Function => function_algebra(&table)?.with_name(format!("c_{stem}")),
                Kind::Group => group_algebra(&table)?.with_name(format!("cstar_{stem}")),
            }
        }
        (None, None) => unreachable!("clap requires a name or --cayley"),
    };
    let text = emit_quantum_group(&g);
    match emit {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(c) => analyse(&c, DEFAULT_SEED, Stage::Validate),
        Command::Haar(c) => analyse(&c, DEFAULT_SEED, Stage::Haar),
        Command::Decompose { common, seed } => analyse(&common, seed, Stage::Decompose),
        Command::Orthogonality { common, seed } => analyse(&common, seed, Stage::Orthogonality),
        Command::Report { common, seed } => analyse(&common, seed, Stage::Full),
        Command::Example { list: true, .. } => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Example {
            name,
            cayley,
            kind,
            emit,
            ..
        } => example(name, cayley, kind, emit),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qg: {e}");
            ExitCode::from(2)
        }
    }
}
