//! `qwalk`: run quantum-walk experiments and write CSV/JSON data plus a
//! manifest.
//!
//! On success the manifest is summarized as JSON on stdout and the exit code
//! is 0. Invalid input prints a JSON error object on stderr and exits with 2;
//! failures during a run exit with 1.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwalk_core::experiments::{read_config, OutputFormat, TopologySpec};
use qwalk_core::{
    preset, run_experiment, CoinChoice, CoinState, Execution, ExperimentConfig, Mode, NoiseSpec, PresetName,
    Protocol, WalkError,
};
use qwalk_core::{BarrierTiming, TunnelingOrder};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Coined quantum walks with decoherence and absorbing barriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for data files and manifest.json.
    #[arg(long, global = true, default_value = "qwalk-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Position distribution of a (possibly noisy) walk.
    Walk(WalkArgs),
    /// Cumulative absorption at one or two barriers.
    Bounded(WalkArgs),
    /// Unbiased classical random walk, free or with barriers.
    Classical(WalkArgs),
    /// Finite-shot position readouts.
    Sample(WalkArgs),
    /// Predefined experiment: fig1, fig2, fig3 or fig4.
    Preset { name: String },
    /// Run a config file, or re-run the config stored in a manifest.
    Run { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Standard,
    Symmetrized,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoinArg {
    Hadamard,
    Halfpi,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialArg {
    Symmetric,
    Plus,
    Zero,
    One,
}

#[derive(Args)]
struct WalkArgs {
    /// Step count, or comma-separated checkpoints.
    #[arg(long, value_delimiter = ',', required = true)]
    steps: Vec<usize>,
    /// `line` or `circle:N`.
    #[arg(long, default_value = "line")]
    topology: TopologySpec,
    #[arg(long, value_enum, default_value = "standard")]
    protocol: ProtocolArg,
    #[arg(long, value_enum, default_value = "hadamard")]
    coin: CoinArg,
    /// Initial coin state; defaults to the coin's paired state.
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    start: i64,
    /// Depolarizing: probability the coin acts ideally.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Dephasing: probability of no phase error.
    #[arg(long = "p-prime", allow_negative_numbers = true)]
    p_prime: Option<f64>,
    /// Tunneling: probability of no extra hop.
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Allow depolarizing and dephasing together.
    #[arg(long)]
    allow_composed: bool,
    /// Barrier positions, X or X,Y.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    barrier: Vec<i64>,
    /// Monte Carlo trajectories instead of exact evolution (0 = exact).
    #[arg(long, default_value_t = 0)]
    trajectories: usize,
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the classical walk.
    #[arg(long)]
    classical_reference: bool,
    #[arg(long)]
    tunneling_before_shift: bool,
    #[arg(long)]
    barrier_before_coin: bool,
}

impl WalkArgs {
    fn into_config(self, mode: Mode) -> ExperimentConfig {
        let name = match mode {
            Mode::Walk => "walk",
            Mode::Bounded => "bounded",
            Mode::Classical => "classical",
            Mode::Sample => "sample",
        };
        let coin = match self.coin {
            CoinArg::Hadamard => CoinChoice::Hadamard,
            CoinArg::Halfpi => CoinChoice::HalfPiPulse,
        };
        let protocol = match self.protocol {
            ProtocolArg::Standard => Protocol::standard(coin),
            ProtocolArg::Symmetrized => Protocol { coin, ..Protocol::symmetrized() },
        };
        let mut noise = NoiseSpec::noiseless();
        if let Some(p) = self.p {
            noise.p = p;
            noise.enabled.depolarizing = true;
        }
        if let Some(pp) = self.p_prime {
            noise.p_prime = pp;
            noise.enabled.dephasing = true;
        }
        if let Some(q) = self.q {
            noise = noise.with_tunneling(q);
        }
        noise.allow_composed = self.allow_composed;
        ExperimentConfig {
            protocol,
            topology: self.topology,
            noise: vec![noise],
            barriers: (!self.barrier.is_empty()).then_some(self.barrier),
            initial_coin: self.initial.map(|i| match i {
                InitialArg::Symmetric => CoinState::symmetric(),
                InitialArg::Plus => CoinState::plus(),
                InitialArg::Zero => CoinState::zero(),
                InitialArg::One => CoinState::one(),
            }),
            start: self.start,
            seed: self.seed,
            trajectories: self.trajectories,
            shots: self.shots,
            classical_reference: self.classical_reference,
            tunneling_order: if self.tunneling_before_shift {
                TunnelingOrder::BeforeShift
            } else {
                TunnelingOrder::AfterShift
            },
            barrier_timing: if self.barrier_before_coin {
                BarrierTiming::BeforeCoin
            } else {
                BarrierTiming::AfterMove
            },
            ..ExperimentConfig::new(name, mode, self.steps)
        }
    }
}

fn fail(code: u8, body: serde_json::Value) -> ExitCode {
    eprintln!("{body}");
    ExitCode::from(code)
}

fn report(err: WalkError) -> ExitCode {
    match err {
        WalkError::Config(c) => fail(2, json!({ "error": "invalid_config", "violations": c.violations })),
        WalkError::UnknownPreset(name) => {
            fail(2, json!({ "error": "unknown_preset", "name": name, "known": ["fig1", "fig2", "fig3", "fig4"] }))
        }
        e @ (WalkError::Io(_) | WalkError::Json(_)) => fail(1, json!({ "error": "io", "message": e.to_string() })),
        e => fail(1, json!({ "error": "runtime", "message": e.to_string() })),
    }
}

fn execute(cfg: ExperimentConfig, out: &Path, exec: Execution) -> Result<serde_json::Value, WalkError> {
    let result = run_experiment(&cfg, exec)?;
    let manifest = result.write(out)?;
    Ok(json!({
        "manifest": qwalk_core::experiments::manifest_path(out),
        "files": manifest.files.iter().map(|f| &f.file).collect::<Vec<_>>(),
        "nonstandard": manifest.nonstandard,
        "wall_time_seconds": manifest.wall_time_seconds,
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(2, json!({ "error": "usage", "message": e.to_string().trim_end() })),
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let cfg = match cli.command {
        Command::Walk(a) => Ok(a.into_config(Mode::Walk)),
        Command::Bounded(a) => Ok(a.into_config(Mode::Bounded)),
        Command::Classical(a) => Ok(a.into_config(Mode::Classical)),
        Command::Sample(a) => Ok(a.into_config(Mode::Sample)),
        Command::Preset { name } => name.parse::<PresetName>().map(preset),
        Command::Run { config } => read_config(&config),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => return report(e),
    };
    if let Some(f) = cli.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    match execute(cfg, &cli.out, exec) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}
