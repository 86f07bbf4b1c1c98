use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use compound_sr::cli::{self, Format, Preset, RateNormalization, ScenarioConfig};
use compound_sr::dynamics::TraceMode;
use compound_sr::Error;

#[derive(Parser)]
#[command(
    name = "compound-sr",
    version,
    about = "Superradiant cascades of interacting atomic samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dressed-state energies and amplitudes.
    Dressed(Common),
    /// Transition rates between dressed states.
    Rates {
        #[command(flatten)]
        common: Common,
        /// Also list transitions below the forbidden threshold.
        #[arg(long)]
        include_forbidden: bool,
    },
    /// Emitted intensity versus time.
    Intensity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        rate_normalization: Option<RateNormalization>,
        /// Report ∫I dt per curve over a long window instead of the traces.
        #[arg(long)]
        integral_check: bool,
    },
    /// Photon frequency schedule of each cascade branch.
    Chirp(Common),
    /// Coupling and chirp excursion over a range of separations.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "N")]
        n_samples: Option<usize>,
        #[arg(long)]
        kr_min: Option<f64>,
        #[arg(long)]
        kr_max: Option<f64>,
        #[arg(long)]
        kr_steps: Option<usize>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Chain,
    Network,
}

#[derive(Args)]
struct Common {
    /// JSON scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for interface compatibility; every computation is deterministic.
    #[arg(long)]
    seedless: bool,
}

impl Common {
    fn load(&self) -> compound_sr::Result<ScenarioConfig> {
        let mut config = match (&self.config, self.preset) {
            (Some(path), _) => ScenarioConfig::from_json(&std::fs::read_to_string(path)?)?,
            (None, Some(p)) => p.config(),
            (None, None) => Preset::PaperDefault.config(),
        };
        if let Some(f) = self.format {
            config.output.format = Some(f);
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> compound_sr::Result<()> {
    let common = match &cli.command {
        Command::Dressed(c) | Command::Chirp(c) => c,
        Command::Rates { common, .. }
        | Command::Intensity { common, .. }
        | Command::Sweep { common, .. } => common,
    };
    let mut config = common.load()?;
    match &cli.command {
        Command::Intensity {
            mode,
            rate_normalization,
            ..
        } => {
            if let Some(m) = mode {
                config.run.mode = Some(match m {
                    ModeArg::Chain => TraceMode::Chain,
                    ModeArg::Network => TraceMode::Network,
                });
            }
            if let Some(n) = rate_normalization {
                config.run.rate_normalization = Some(*n);
            }
        }
        Command::Sweep {
            n_samples,
            kr_min,
            kr_max,
            kr_steps,
            ..
        } => {
            config.run.n_samples = n_samples.or(config.run.n_samples);
            config.run.kr_min = kr_min.or(config.run.kr_min);
            config.run.kr_max = kr_max.or(config.run.kr_max);
            config.run.kr_steps = kr_steps.or(config.run.kr_steps);
        }
        _ => {}
    }
    let resolved = config.resolve()?;
    let text = match &cli.command {
        Command::Dressed(_) => cli::cmd_dressed(&resolved)?,
        Command::Rates {
            include_forbidden, ..
        } => cli::cmd_rates(&resolved, *include_forbidden)?,
        Command::Intensity { integral_check, .. } => {
            cli::cmd_intensity(&resolved, *integral_check)?
        }
        Command::Chirp(_) => cli::cmd_chirp(&resolved)?,
        Command::Sweep { .. } => cli::cmd_sweep(&resolved)?,
    };
    let path = common
        .out
        .clone()
        .or_else(|| resolved.path.as_ref().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::SizeCap { .. } => 3,
                Error::Contract(_) => 4,
                _ => 2,
            })
        }
    }
}
