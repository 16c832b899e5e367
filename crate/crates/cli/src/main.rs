use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qedc::analysis::SelectionConfig;
use qedc::driver::{
    self, CodeRequest, CompileOptions, CouplingSpec, DriverError, PostselectOutput,
};
use qedc::meta::CompilationMeta;
use qedc::pcs::Strategy;
use qedc::postprocess::SeriesPoint;
use qedc::sim::{Counts, NoiseModel};

#[derive(Parser)]
#[command(name = "qedc", version, about = "Quantum error detection compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeArg {
    Auto,
    Pcs,
    Iceberg,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    GreedyCoverage,
    RandomZ,
}

#[derive(Subcommand)]
enum Command {
    /// Report Clifford regions, the interaction graph and the selected code.
    Analyze {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        clifford_min: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Insert a detection code, then lay out, route and schedule.
    Compile {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        code: CodeArg,
        /// Checks for PCS, syndrome cycles for Iceberg.
        #[arg(long, default_value_t = 2)]
        checks: usize,
        #[arg(long, value_enum, default_value = "greedy-coverage")]
        strategy: StrategyArg,
        /// Coupling graph JSON file, or one of heavy-hex-127, all-to-all, path-N, grid-RxC.
        #[arg(long, default_value = "all-to-all")]
        coupling: String,
        #[arg(long, default_value_t = 0.5)]
        clifford_min: f64,
        #[arg(long, env = "QED_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        meta_out: PathBuf,
    },
    /// Sample a compiled circuit under depolarizing noise.
    Run {
        compiled: PathBuf,
        /// Noise model JSON file, or `default` / `noiseless`.
        #[arg(long, default_value = "noiseless")]
        noise: String,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, env = "QED_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discard flagged shots and decode logical results.
    Postselect {
        counts: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        /// Compiled circuit; with --noise adds the predicted keep rate.
        #[arg(long, requires = "noise")]
        circuit: Option<PathBuf>,
        #[arg(long, requires = "circuit")]
        noise: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit value(m) = E_inf + A r^m and report E_inf.
    Extrapolate {
        series: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_noise(arg: &str) -> Result<NoiseModel, DriverError> {
    let path = Path::new(arg);
    if path.is_file() {
        let noise: NoiseModel = driver::read_json(path)?;
        noise.validate()?;
        return Ok(noise);
    }
    match arg {
        "default" => Ok(NoiseModel::default()),
        "noiseless" => Ok(NoiseModel::noiseless()),
        _ => Err(DriverError::Io {
            path: arg.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such noise file"),
        }),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), DriverError> {
    match out {
        Some(path) => driver::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), DriverError> {
    match cli.command {
        Command::Analyze {
            input,
            clifford_min,
            out,
        } => {
            let circ = driver::read_circuit(&input)?;
            let cfg = SelectionConfig {
                clifford_min,
                ..SelectionConfig::default()
            };
            emit(
                out.as_deref(),
                &driver::to_json_text(&driver::analyze(&circ, &cfg)),
            )
        }
        Command::Compile {
            input,
            code,
            checks,
            strategy,
            coupling,
            clifford_min,
            seed,
            out,
            meta_out,
        } => {
            let circ = driver::read_circuit(&input)?;
            let opts = CompileOptions {
                code: match code {
                    CodeArg::Auto => CodeRequest::Auto,
                    CodeArg::Pcs => CodeRequest::Pcs,
                    CodeArg::Iceberg => CodeRequest::Iceberg,
                    CodeArg::None => CodeRequest::None,
                },
                checks,
                strategy: match strategy {
                    StrategyArg::GreedyCoverage => Strategy::GreedyCoverage,
                    StrategyArg::RandomZ => Strategy::RandomZ,
                },
                seed,
                coupling: CouplingSpec::resolve(&coupling)?,
                selection: SelectionConfig {
                    clifford_min,
                    ..SelectionConfig::default()
                },
            };
            let (qasm, meta) = driver::compile_to_text(&circ, &opts)?;
            driver::write_text(&out, &qasm)?;
            driver::write_text(&meta_out, &meta)
        }
        Command::Run {
            compiled,
            noise,
            shots,
            seed,
            out,
        } => {
            let circ = driver::read_circuit(&compiled)?;
            let noise = load_noise(&noise)?;
            let counts = driver::run(&circ, &noise, shots, seed)?;
            emit(out.as_deref(), &driver::to_json_text(&counts))
        }
        Command::Postselect {
            counts,
            meta,
            circuit,
            noise,
            out,
        } => {
            let counts: Counts = driver::read_json(&counts)?;
            let meta: CompilationMeta = driver::read_json(&meta)?;
            let report = driver::postselect(&counts, &meta)?;
            let predicted = match (circuit, noise) {
                (Some(c), Some(n)) => Some(driver::estimate_keep_rate(
                    &driver::read_circuit(&c)?,
                    &meta,
                    &load_noise(&n)?,
                )?),
                _ => None,
            };
            emit(
                out.as_deref(),
                &driver::to_json_text(&PostselectOutput { report, predicted }),
            )
        }
        Command::Extrapolate { series, out } => {
            let series: Vec<SeriesPoint> = driver::read_json(&series)?;
            emit(
                out.as_deref(),
                &driver::to_json_text(&driver::extrapolate(&series)?),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
