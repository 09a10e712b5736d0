use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dualrank_core::report::{
    cmd_analyze, cmd_foci, cmd_table, table_csv, table_exit_status, table_json, ExitStatus,
    FociRequest, DEFAULT_SEED,
};
use dualrank_core::{GhMode, RunConfig};

#[derive(Parser)]
#[command(name = "dualrank", version, about = "Gauss maps and dual varieties of parametrized projective varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Probabilistic,
    Interpolated,
    Auto,
}

impl From<Mode> for GhMode {
    fn from(m: Mode) -> GhMode {
        match m {
            Mode::Probabilistic => GhMode::Probabilistic,
            Mode::Interpolated => GhMode::Interpolated,
            Mode::Auto => GhMode::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Master seed for all sampling.
    #[arg(long, env = "DUALRANK_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Relative singular-value tolerance for rank decisions.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Generic sample points per variety.
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Run samples one after another instead of on the thread pool.
    #[arg(long)]
    serial: bool,
}

impl Common {
    fn config(&self, spec: &str, gh_mode: GhMode) -> RunConfig {
        RunConfig {
            spec: spec.to_string(),
            seed: self.seed,
            rank_tol: self.tol,
            gh_mode,
            samples: self.samples,
            parallel: !self.serial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gauss-map and duality invariants of one variety.
    Analyze {
        /// Variety spec, e.g. `segre:1,2` or `torse:twisted_cubic,l=1`.
        #[arg(long)]
        variety: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        gh_mode: Mode,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        #[command(flatten)]
        common: Common,
    },
    /// Measure every row of the dimension table.
    Table {
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[command(flatten)]
        common: Common,
    },
    /// Focal points on a leaf of a ruled variety.
    Foci {
        #[arg(long)]
        variety: String,
        /// Full parameter point, comma separated (base parameters first).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<f64>,
        /// Direction in leaf coordinates, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        dir: Vec<f64>,
        /// Probe interval for the line parameter.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 2, default_values_t = [-5.0, 5.0])]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

/// Write to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            variety,
            gh_mode,
            format,
            common,
        } => {
            let outcome = cmd_analyze(&common.config(&variety, gh_mode.into()));
            match format {
                ReportFormat::Json => emit(&(outcome.to_json() + "\n")),
                ReportFormat::Text => emit(&outcome.to_text()),
            }
            exit(outcome.exit_status())
        }
        Command::Table { format, common } => {
            let rows = match cmd_table(&common.config("", GhMode::Auto)) {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit(ExitStatus::BadSpec);
                }
            };
            match format {
                TableFormat::Csv => emit(&table_csv(&rows)),
                TableFormat::Json => emit(&(table_json(&rows) + "\n")),
            }
            exit(table_exit_status(&rows))
        }
        Command::Foci {
            variety,
            at,
            dir,
            interval,
            tol,
            format,
        } => {
            let req = FociRequest {
                spec: variety,
                at,
                dir,
                interval: (interval[0], interval[1]),
                rank_tol: tol,
            };
            match cmd_foci(&req) {
                Ok(report) => {
                    match format {
                        ReportFormat::Json => emit(&(report.to_json() + "\n")),
                        ReportFormat::Text => emit(&report.to_text()),
                    }
                    exit(report.exit_status())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit(if e.is_ambiguity() {
                        ExitStatus::Ambiguous
                    } else {
                        ExitStatus::BadSpec
                    })
                }
            }
        }
    }
}
