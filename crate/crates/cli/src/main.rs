use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oruga_cli::commands::{
    cmd_check, cmd_closure, cmd_export_dot, cmd_match, cmd_transfer, TransferOptions,
};

#[derive(Parser)]
#[command(
    name = "oruga",
    version,
    about = "Declare representational spaces, validate constructions, match patterns, and run structure transfer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate declaration files
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the reflexive-transitive subtype closure of a type system
    Closure {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long = "type-system")]
        type_system: String,
    },
    /// Match a construction against a pattern
    Match {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        construction: String,
        #[arg(long)]
        pattern: String,
        /// Prefix mode: pattern leaves may cut off whole sub-trees
        #[arg(long)]
        prefix: bool,
        /// Pre-bound pairs PATTERN=TOKEN; may be repeated
        #[arg(long = "anchor")]
        anchor: Vec<String>,
    },
    /// Build a target-space construction standing in a relation to a source construction
    Transfer {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        construction: String,
        #[arg(long)]
        relation: String,
        #[arg(long = "sought-type")]
        sought_type: String,
        #[arg(long = "target-space")]
        target_space: String,
        #[arg(long = "max-depth", default_value_t = 10)]
        max_depth: usize,
        #[arg(long = "max-results", default_value_t = 5)]
        max_results: usize,
        #[arg(long = "max-expansions", default_value_t = 10_000)]
        max_expansions: usize,
        /// Relations that may be discharged by assumption; may be repeated
        #[arg(long = "assume")]
        assume: Vec<String>,
        /// Refuse a second construction of an already-constructed variable
        #[arg(long = "single-construction")]
        single_construction: bool,
    },
    /// Emit a construction as Graphviz DOT
    ExportDot {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        construction: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = match &cli.command {
        Command::Check { files } => cmd_check(files, &mut out, &mut err),
        Command::Closure { files, type_system } => {
            cmd_closure(files, type_system, &mut out, &mut err)
        }
        Command::Match {
            files,
            construction,
            pattern,
            prefix,
            anchor,
        } => cmd_match(
            files,
            construction,
            pattern,
            *prefix,
            anchor,
            &mut out,
            &mut err,
        ),
        Command::Transfer {
            files,
            construction,
            relation,
            sought_type,
            target_space,
            max_depth,
            max_results,
            max_expansions,
            assume,
            single_construction,
        } => cmd_transfer(
            files,
            &TransferOptions {
                construction: construction.clone(),
                relation: relation.clone(),
                sought_type: sought_type.clone(),
                target_space: target_space.clone(),
                max_depth: *max_depth,
                max_results: *max_results,
                max_expansions: *max_expansions,
                assume: assume.clone(),
                single_construction: *single_construction,
            },
            &mut out,
            &mut err,
        ),
        Command::ExportDot {
            files,
            construction,
            output,
        } => cmd_export_dot(files, construction, output.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
