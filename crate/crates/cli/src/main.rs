//! `bilform` — exact computations with bilinear forms over modules.
//!
//! Verbs read a problem file (see the format description in [`problem`]),
//! resolve and validate every declared object, and report on one of them.
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 the
//! input did not parse or resolve, 3 a search ended inconclusively.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod examples;
mod problem;
mod report;

use commands::{CliError, Opts};

const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Parser)]
#[command(
    name = "bilform",
    version,
    about = "Exact computations with bilinear forms over modules",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit the report as JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Step budget for enumerations and invertibility searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for the randomized phase of invertibility searches.
    #[arg(long, global = true, default_value_t = bilform::scalars::DEFAULT_SEARCH_SEED)]
    seed: u64,
    /// Reinterpret the file over another field: a prime, or Q.
    #[arg(long, global = true)]
    field: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a problem file and validate every declared object.
    Check { file: PathBuf },
    /// Adjoint, regularity and symmetry report for a declared form.
    FormReport {
        file: PathBuf,
        /// Name of the form to inspect.
        #[arg(long)]
        form: String,
    },
    /// Build a reversal's value space on a module and compare declared
    /// forms against its tautological pairing.
    Correspond {
        file: PathBuf,
        /// Module carrying the forms.
        #[arg(long)]
        module: String,
        /// Reversal of (an identified copy of) its endomorphism algebra.
        #[arg(long)]
        reversal: String,
    },
    /// Involution type and the semisimple trichotomy for a reversal.
    Classify {
        file: PathBuf,
        /// Algebra the reversal lives on.
        #[arg(long)]
        algebra: String,
        /// The reversal; must be an involution.
        #[arg(long)]
        reversal: String,
        /// Trust the invariant-idempotent hypothesis when the scan cannot
        /// certify it within budget.
        #[arg(long)]
        assume_hypothesis: bool,
    },
    /// Enumerate the anti-endomorphisms of a declared algebra.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        algebra: String,
    },
    /// Run a bundled worked example end to end (omit the name to list them).
    Example { name: Option<String> },
}

fn parse_file(
    path: &PathBuf,
    field: Option<bilform::FieldSpec>,
) -> Result<problem::Problem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    problem::parse(&text, field).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    let field = match &cli.field {
        Some(tok) => Some(problem::parse_field_token(tok).map_err(CliError)?),
        None => None,
    };
    let opts = Opts {
        budget: cli.budget,
        seed: cli.seed,
    };
    match &cli.cmd {
        Cmd::Check { file } => {
            let p = parse_file(file, field)?;
            commands::cmd_check(&p, &file.display().to_string())
        }
        Cmd::FormReport { file, form } => {
            let p = parse_file(file, field)?;
            commands::cmd_form_report(&p, form, opts)
        }
        Cmd::Correspond {
            file,
            module,
            reversal,
        } => {
            let p = parse_file(file, field)?;
            commands::cmd_correspond(&p, module, reversal, opts)
        }
        Cmd::Classify {
            file,
            algebra,
            reversal,
            assume_hypothesis,
        } => {
            let p = parse_file(file, field)?;
            commands::cmd_classify(&p, algebra, reversal, *assume_hypothesis, opts)
        }
        Cmd::Enumerate { file, algebra } => {
            let p = parse_file(file, field)?;
            commands::cmd_enumerate(&p, algebra, opts)
        }
        Cmd::Example { name } => examples::run(name.as_deref(), field, opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            if cli.json {
                println!("{}", rep.render_json());
            } else {
                print!("{}", rep.render_text());
            }
            ExitCode::from(rep.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "result": "invalid-input" })
                );
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
