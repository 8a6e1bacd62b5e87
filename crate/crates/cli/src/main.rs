use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chowcheck::commands::{self, ReportFormat, VerifyOptions};

/// Exact-rational verification of characteristic-class identities,
/// boundary cancellation ledgers, and lattice cone fixed points.
#[derive(Parser)]
#[command(name = "chowcheck", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Bernoulli numbers and Euler polynomial values at zero, one
    /// exact rational per line.
    Numbers {
        /// Index of a Bernoulli number to print; repeatable.
        #[arg(long = "bernoulli", value_name = "N")]
        bernoulli: Vec<usize>,
        /// Index of an Euler value to print; repeatable.
        #[arg(long = "euler", value_name = "N")]
        euler: Vec<usize>,
    },
    /// Verify the universal characteristic-class identities.
    Identities {
        /// Check the top-Chern-class identity.
        #[arg(long)]
        cg: bool,
        /// Check the exterior-power product identity by two routes.
        #[arg(long = "lambda-product")]
        lambda_product: bool,
        #[arg(short, value_parser = clap::value_parser!(u64).range(1..=6))]
        g: u64,
        /// Truncation degree; defaults to 2g+2.
        #[arg(short = 'D', value_parser = clap::value_parser!(u64).range(1..=14))]
        degree: Option<u64>,
    },
    /// Certify, degree by degree, that the wedge assumptions force the
    /// Chern character of the weight-one bundle into degree zero.
    Lemma21 {
        #[arg(short, value_parser = clap::value_parser!(u64).range(1..=6))]
        g: u64,
        /// Truncation degree; defaults to 2g+2.
        #[arg(short = 'D', value_parser = clap::value_parser!(u64).range(2..=14))]
        degree: Option<u64>,
        /// Emit the report as JSON with exact rationals as strings.
        #[arg(long)]
        json: bool,
    },
    /// Boundary-ledger operations on a configuration file.
    Grr {
        #[command(subcommand)]
        action: GrrAction,
    },
    /// Lattice-cone checks: smoothness, involution witness, fixed stratum.
    Cone {
        #[command(subcommand)]
        action: ConeAction,
    },
    /// Run the whole registered check suite; exit 0 iff everything passes.
    VerifyAll(VerifyArgs),
    /// Run the suite and emit a machine-readable (or text) report.
    Report {
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(long, value_parser = ["text", "json"], default_value = "json")]
        format: String,
        /// Output path; relative paths honor CHOWCHECK_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GrrAction {
    /// Validate the configuration and certify the cancellation ledger.
    Certify { config: PathBuf },
    /// Print the delta invariant of a component set.
    Delta {
        config: PathBuf,
        /// Comma-separated component names, e.g. Y1,Y2.
        #[arg(long)]
        set: String,
    },
    /// Rewrite a cycle expression to normal form, printing each step.
    Reduce {
        config: PathBuf,
        /// Expression such as "cg*Y1*Y1" or "cg*f*(1/2 T1)*Y2".
        #[arg(long)]
        expr: String,
    },
}

#[derive(Subcommand)]
enum ConeAction {
    /// Report smoothness, an involution witness, and the fixed-stratum
    /// verdict for a cone file.
    Check {
        file: PathBuf,
        /// Assume an even level structure and run the fixed-stratum check.
        #[arg(long = "even-level")]
        even_level: bool,
        /// Bound for the translation search (default scales with the
        /// covector entries).
        #[arg(long)]
        bound: Option<i64>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "g-max", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=6))]
    g_max: u64,
    #[arg(long = "d-max", default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..=14))]
    d_max: u64,
    /// Directory replacing the bundled fixture corpus (same file names).
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Run only the named check; repeatable. See --list.
    #[arg(long = "check")]
    only: Vec<String>,
    /// List registered checks and exit.
    #[arg(long)]
    list: bool,
    /// Also write the JSON report to this path.
    #[arg(long = "report")]
    report_path: Option<PathBuf>,
    /// Suppress the text rendering.
    #[arg(long)]
    quiet: bool,
}

impl From<&VerifyArgs> for VerifyOptions {
    fn from(args: &VerifyArgs) -> Self {
        VerifyOptions {
            g_max: args.g_max as usize,
            d_max: args.d_max as usize,
            fixtures_dir: args.fixtures.clone(),
            only: args.only.clone(),
            list: args.list,
            report_path: args.report_path.clone(),
            quiet: args.quiet,
        }
    }
}

// Default truncation covers every graded piece the weight-one argument
// needs at rank g, plus one sanity degree.
fn default_trunc(g: u64) -> u64 {
    (2 * g + 2).min(14)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Numbers { bernoulli, euler } => commands::cmd_numbers(bernoulli, euler),
        Command::Identities {
            cg,
            lambda_product,
            g,
            degree,
        } => {
            let trunc = degree.unwrap_or_else(|| default_trunc(*g));
            commands::cmd_identities(*cg, *lambda_product, *g as usize, trunc as usize)
        }
        Command::Lemma21 { g, degree, json } => {
            let trunc = degree.unwrap_or_else(|| default_trunc(*g));
            commands::cmd_lemma21(*g as usize, trunc as usize, *json)
        }
        Command::Grr { action } => match action {
            GrrAction::Certify { config } => commands::cmd_grr_certify(config),
            GrrAction::Delta { config, set } => commands::cmd_grr_delta(config, set),
            GrrAction::Reduce { config, expr } => commands::cmd_grr_reduce(config, expr),
        },
        Command::Cone { action } => match action {
            ConeAction::Check {
                file,
                even_level,
                bound,
            } => commands::cmd_cone_check(file, *even_level, *bound),
        },
        Command::VerifyAll(args) => commands::cmd_verify_all(&args.into()),
        Command::Report {
            verify,
            format,
            out,
        } => {
            let fmt = if format == "text" {
                ReportFormat::Text
            } else {
                ReportFormat::Json
            };
            commands::cmd_report(&verify.into(), fmt, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
