//! `qgraph`: spectra, zero modes, index and randomized identity checks for
//! quantum graphs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qgraph_cli::error::{EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_PASS};
use qgraph_cli::{emit_report, parse_config, run_command, CliError, Command, Format};
use qgraph_core::campaign;
use qgraph_core::random::{GraphParams, Topology};

#[derive(Debug, Parser)]
#[command(name = "qgraph", version, about = "Spectral and index computations on quantum graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TopologyArg {
    Any,
    Compact,
    NonCompact,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Positive eigenvalues `k²` up to `k_max²`, optionally negative ones.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        grid: Option<f64>,
        /// Also scan the imaginary axis `k = iκ`.
        #[arg(long)]
        negative: bool,
        #[arg(long)]
        kappa_max: Option<f64>,
    },
    /// Zero modes from all three solvers and the multiplicities of zero.
    ZeroModes {
        #[arg(long)]
        config: PathBuf,
    },
    /// Kernels of the Dirac operator and its index.
    Index {
        #[arg(long)]
        config: PathBuf,
    },
    /// Seeded campaign of identity checks on random instances.
    Verify {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        instances: usize,
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_internal_edges: usize,
        #[arg(long, default_value_t = 0.3)]
        external_prob: f64,
        #[arg(long, value_enum, default_value = "any")]
        topology: TopologyArg,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QGRAPH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QGRAPH_THREADS must be a positive integer, got `{raw}`")))?;
    campaign::configure_threads(n).map_err(CliError::Usage)
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (config, command) = match cli.command {
        Cmd::Spectrum {
            config,
            k_max,
            grid,
            negative,
            kappa_max,
        } => (
            Some(config),
            Command::Spectrum {
                k_max,
                grid,
                negative,
                kappa_max,
            },
        ),
        Cmd::ZeroModes { config } => (Some(config), Command::ZeroModes),
        Cmd::Index { config } => (Some(config), Command::Index),
        Cmd::Verify {
            seed,
            instances,
            max_vertices,
            max_internal_edges,
            external_prob,
            topology,
        } => {
            if max_vertices == 0 {
                return Err(CliError::Usage("--max-vertices must be at least 1".into()));
            }
            if !(0.0..=1.0).contains(&external_prob) {
                return Err(CliError::Usage("--external-prob must lie in [0, 1]".into()));
            }
            let topology = match topology {
                TopologyArg::Any => Topology::Any,
                TopologyArg::Compact => Topology::Compact,
                TopologyArg::NonCompact => Topology::NonCompact,
            };
            let params = GraphParams {
                max_vertices,
                max_internal_edges,
                external_prob,
                topology,
                ..GraphParams::default()
            };
            (
                None,
                Command::Verify {
                    seed,
                    instances,
                    params,
                },
            )
        }
    };
    let cfg = config.map(|p| read(&p).and_then(|doc| parse_config(&doc))).transpose()?;
    let report = run_command(cfg.as_ref(), &command)?;
    let doc = emit_report(&report, cli.format);
    match &cli.report {
        Some(path) => std::fs::write(path, doc).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{doc}"),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("qgraph: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
