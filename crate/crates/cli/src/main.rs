use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cartan_cli::{document, run, Command, HolonomyArgs, InputError, Pipeline, Report, Settings};

/// Verify Lie algebroid and Cartan connection documents on a coordinate chart.
#[derive(Parser)]
#[command(name = "cartan", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Seed for zero-test sampling and random test data (default: the document's, else 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample points per probabilistic zero test.
    #[arg(long, default_value_t = 32, global = true)]
    samples: usize,
    /// Absolute and relative tolerance of the zero test.
    #[arg(long, default_value_t = 1e-9, global = true)]
    tol: f64,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Record elapsed_ms per check. Makes reports non-reproducible.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build every object in the document and check the algebroid axioms.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification pipeline, or the document's run list.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        pipeline: Option<Pipeline>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the holonomy of a small coordinate square with the curvature.
    Holonomy {
        file: PathBuf,
        /// Base point, one value per coordinate.
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        point: Vec<f64>,
        /// The two coordinate directions spanning the loop.
        #[arg(long, num_args = 2, required = true, value_names = ["I", "J"])]
        plane: Vec<usize>,
        /// Side length of the square.
        #[arg(long, default_value_t = 0.01)]
        side: f64,
        /// Named connection; defaults to the Levi-Civita connection of the metric.
        #[arg(long)]
        connection: Option<String>,
        /// RK4 steps per side.
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Largest accepted relative error.
        #[arg(long, default_value_t = 1e-2)]
        max_rel_error: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the duality, invariant calculus and self-test battery.
    Identities {
        file: PathBuf,
        /// Random one-forms per Cartan instance.
        #[arg(long, default_value_t = 10)]
        forms: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print the JSON schema of the document format.
    Schema,
}

fn settings(c: &Common) -> Settings {
    Settings { seed: c.seed, samples: c.samples, tol: c.tol, timings: c.timings, ..Settings::default() }
}

fn emit(report: &Report, pretty: bool) -> ExitCode {
    // a closed pipe (`| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json(pretty));
    if let Some(e) = &report.error {
        eprintln!("error: {}", e);
    }
    ExitCode::from(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (file, command, common, forms) = match cli.command {
        Cmd::Schema => {
            let _ = write!(std::io::stdout().lock(), "{}", document::schema());
            return ExitCode::SUCCESS;
        }
        Cmd::Validate { file, common } => (file, Command::Validate, common, None),
        Cmd::Check { file, pipeline, common } => (file, Command::Check(pipeline), common, None),
        Cmd::Holonomy { file, point, plane, side, connection, steps, max_rel_error, common } => {
            let args = HolonomyArgs { point, plane: (plane[0], plane[1]), side, connection, steps, max_rel_error };
            (file, Command::Holonomy(args), common, None)
        }
        Cmd::Identities { file, forms, common } => (file, Command::Identities, common, Some(forms)),
    };
    let mut s = settings(&common);
    if let Some(f) = forms {
        s.forms = f;
    }
    let report = match std::fs::read_to_string(&file) {
        Ok(text) => run(&command, &text, &s),
        Err(e) => {
            let err = InputError::new(file.display().to_string(), e.to_string());
            Report::new("read", s.seed.unwrap_or(0), s.samples, s.tol).finish(Err(err))
        }
    };
    emit(&report, common.pretty)
}
