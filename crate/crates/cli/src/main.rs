//! Command line driver: injected-energy series, one-shot measure sets,
//! figure sweeps, transition detection, and parallelism reports.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 for numerical
//! failures in one-shot evaluation, 4 for i/o failures.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use qcorr_core::measures::{measure_all, DiscordOptimizerConfig, MeasureSet};
use qcorr_core::noise::{epsilon_series, NoiseKernel, QuadratureConfig};
use qcorr_core::state::rho_normalized;
use qcorr_core::sweep::{
    detect_transitions, epsilon_series_to_csv, format_significant, parallelism_stats, parse_csv,
    report_to_string, run_sweep, table_to_string, transitions_to_string, GridSpec, OutputFormat,
    Preset, SweepConfig, TRANSITION_TOL,
};
use qcorr_core::Error;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation measures for two noise-driven oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PresetArg {
    White,
    Partial,
    Colored,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::White => Preset::White,
            PresetArg::Partial => Preset::Partial,
            PresetArg::Colored => Preset::Colored,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the injected-energy series for a noise kernel
    Epsilon {
        /// Named noise regime (sets gamma and lambda from omega)
        #[arg(long, value_enum, conflicts_with_all = ["gamma", "lambda"])]
        preset: Option<PresetArg>,
        /// Noise power of an explicit kernel
        #[arg(long)]
        gamma: Option<f64>,
        /// Inverse correlation time of an explicit kernel (omit for white)
        #[arg(long, requires = "gamma")]
        lambda: Option<f64>,
        /// Oscillator frequency
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// End of the time grid (defaults to the preset horizon)
        #[arg(long)]
        t_max: Option<f64>,
        /// Number of grid points
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Quadrature panels
        #[arg(long, default_value_t = 64)]
        panels: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate all six measures at one injected energy
    Measures {
        /// Injected energy
        #[arg(long)]
        epsilon: f64,
        /// Simplex iterations for the discord refinement
        #[arg(long, default_value_t = 200)]
        refine_iters: usize,
        /// Convergence tolerance for the discord refinement
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a sweep from a config file or a named preset
    Sweep {
        /// JSON sweep configuration
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Named figure regime with its default grids
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        /// Override the quadrature panel count
        #[arg(long)]
        panels: Option<usize>,
        /// Suppress the timestamp so identical configs give identical bytes
        #[arg(long)]
        reproducible: bool,
        /// Output format (overrides the config)
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Write to this file (overrides the config)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Detect measure deaths and revivals in a sweep CSV
    Transitions {
        /// Sweep table to scan
        #[arg(long)]
        input: PathBuf,
        /// Threshold below which a measure counts as dead
        #[arg(long, default_value_t = TRANSITION_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pairwise correlation statistics across measures in a sweep CSV
    Compare {
        /// Sweep table to analyze
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        Error::Config(_) | Error::Domain(_) => 2,
        _ => 3,
    }
}

fn write_out(path: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => {
            fs::write(p, content)?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Epsilon {
            preset,
            gamma,
            lambda,
            omega,
            t_max,
            points,
            panels,
            out,
        } => {
            let kernel = match (preset, gamma) {
                (Some(p), None) => Preset::from(p).kernel_for(omega)?,
                (None, Some(g)) => match lambda {
                    Some(l) => NoiseKernel::exponential(g, l)?,
                    None => NoiseKernel::white(g)?,
                },
                (None, None) => Preset::White.kernel_for(omega)?,
                (Some(_), Some(_)) => unreachable!("clap forbids preset with gamma"),
            };
            let horizon =
                t_max.unwrap_or_else(|| preset.map(|p| Preset::from(p).horizon()).unwrap_or(10.0));
            if points == 0 {
                return Err(Error::Config("points must be positive".into()));
            }
            let grid = GridSpec::Linspace {
                start: 0.0,
                stop: horizon,
                points,
            }
            .values()
            .map_err(|e| Error::Config(format!("time grid: {e}")))?;
            let quad = QuadratureConfig::new(panels)?;
            let series = epsilon_series(&kernel, omega, &grid, &quad)?;
            let text = match OutputFormat::from(out.format) {
                OutputFormat::Csv => epsilon_series_to_csv(&series),
                OutputFormat::Json => serde_json::to_string_pretty(&series)
                    .map_err(|e| Error::Config(e.to_string()))?,
            };
            write_out(out.output.as_ref(), &text)
        }
        Command::Measures {
            epsilon,
            refine_iters,
            tol,
            out,
        } => {
            let state = rho_normalized(epsilon)?;
            let cfg = DiscordOptimizerConfig {
                refine_iters,
                tol,
                ..Default::default()
            };
            let ms = measure_all(&state, &cfg)?;
            let text = match OutputFormat::from(out.format) {
                OutputFormat::Csv => measures_csv(epsilon, &ms),
                OutputFormat::Json => {
                    let value = serde_json::json!({ "epsilon": epsilon, "measures": ms });
                    let mut s = serde_json::to_string_pretty(&value)
                        .map_err(|e| Error::Config(e.to_string()))?;
                    s.push('\n');
                    s
                }
            };
            write_out(out.output.as_ref(), &text)
        }
        Command::Sweep {
            config,
            preset,
            panels,
            reproducible,
            format,
            output,
        } => {
            let mut cfg: SweepConfig = match (config, preset) {
                (Some(path), None) => SweepConfig::from_json(&read_input(&path)?)?,
                (None, Some(p)) => Preset::from(p).sweep_config(),
                (None, None) => {
                    return Err(Error::Config(
                        "sweep needs either --config or --preset".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap forbids config with preset"),
            };
            if let Some(p) = panels {
                cfg.quadrature = QuadratureConfig::new(p)?;
            }
            // delivery options stay out of the config echo so identical
            // configs give identical bytes wherever they are written
            let effective_format = format.map(OutputFormat::from).unwrap_or(cfg.format);
            let path = output.or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
            let mut table = run_sweep(&cfg)?;
            if !reproducible {
                table.metadata.timestamp = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .ok()
                    .map(|d| d.as_secs());
            }
            let text = table_to_string(&table, effective_format)?;
            write_out(path.as_ref(), &text)
        }
        Command::Transitions { input, tol, out } => {
            let table = parse_csv(&read_input(&input)?)?;
            let events = detect_transitions(&table, tol);
            let text = transitions_to_string(&events, out.format.into())?;
            write_out(out.output.as_ref(), &text)
        }
        Command::Compare { input, out } => {
            let table = parse_csv(&read_input(&input)?)?;
            let report = parallelism_stats(&table)?;
            let text = report_to_string(&report, out.format.into())?;
            write_out(out.output.as_ref(), &text)
        }
    }
}

fn measures_csv(epsilon: f64, ms: &MeasureSet) -> String {
    let mut out = String::from(
        "epsilon,concurrence,eof,negativity,log_negativity,discord,geometric_discord\n",
    );
    out.push_str(&format_significant(epsilon));
    for v in ms.as_array() {
        out.push(',');
        out.push_str(&format_significant(v));
    }
    out.push('\n');
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
