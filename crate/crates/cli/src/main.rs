use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kerrwalk::{InitialState, Sampling, WindowSpec};
use kerrwalk_cli::{
    run_profile, run_sweep_cmd, run_walk, CliError, Format, Mode, ParamText, RangeText, Result,
    RunConfig, SweepConfig, WalkConfig,
};

/// Nonlinear discrete-time quantum walks with a Kerr-like phase.
#[derive(Debug, Parser)]
#[command(name = "kerrwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one walk and write its IPR / survival-probability time series.
    Walk(WalkArgs),
    /// Dump probability profiles at chosen steps.
    Profile(ProfileArgs),
    /// Compute a χ–θ diagram of long-time averages.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitialArg {
    Symmetric,
    Right,
}

impl From<InitialArg> for InitialState {
    fn from(a: InitialArg) -> Self {
        match a {
            InitialArg::Symmetric => InitialState::SymmetricCircular,
            InitialArg::Right => InitialState::RightOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Ndjson,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    Even,
    All,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WindowFlags {
    /// Averaging window starts at this fraction of the run.
    #[arg(long)]
    window_start_frac: Option<f64>,
    /// Steps entering long-time averages.
    #[arg(long, value_enum)]
    sampling: Option<SamplingArg>,
}

#[derive(Debug, Args)]
struct WalkFlags {
    /// Coin angle, e.g. `0.7`, `pi/3`.
    #[arg(long)]
    theta: Option<ParamText>,
    /// Kerr strength.
    #[arg(long)]
    chi: Option<ParamText>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long)]
    margin: Option<usize>,
    #[command(flatten)]
    window: WindowFlags,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    walk: WalkFlags,
    /// Record every k-th step.
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    walk: WalkFlags,
    /// Comma-separated snapshot steps, e.g. `0,500,1000`.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// `min,max,count`, e.g. `0,pi,21`.
    #[arg(long)]
    theta_range: Option<RangeText>,
    /// `min,max,count`, e.g. `0,2,21`.
    #[arg(long)]
    chi_range: Option<RangeText>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long)]
    margin: Option<usize>,
    #[command(flatten)]
    window: WindowFlags,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| CliError::config(field, "missing: give it in --config or as a flag"))
}

fn base_config(common: &Common, mode: Mode) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig {
            mode,
            walk: None,
            sweep: None,
            output_path: PathBuf::new(),
            format: Format::Csv,
            snapshot_times: Vec::new(),
            record_stride: 1,
        },
    };
    if config.mode != mode {
        return Err(CliError::config("mode", format!("config is for `{}`, not `{mode}`", config.mode)));
    }
    if let Some(out) = &common.out {
        config.output_path = out.clone();
    }
    if let Some(f) = common.format {
        config.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Ndjson => Format::Ndjson,
        };
    }
    if config.output_path.as_os_str().is_empty() {
        return Err(CliError::config("output_path", "missing: give it in --config or as --out"));
    }
    Ok(config)
}

fn apply_window(window: &mut WindowSpec, flags: &WindowFlags) {
    if let Some(f) = flags.window_start_frac {
        window.start_frac = f;
    }
    if let Some(s) = flags.sampling {
        window.sampling = match s {
            SamplingArg::Even => Sampling::EvenSteps,
            SamplingArg::All => Sampling::AllSteps,
        };
    }
}

fn merge_walk(existing: Option<WalkConfig>, flags: &WalkFlags) -> Result<WalkConfig> {
    let mut walk = match existing {
        Some(w) => w,
        None => WalkConfig {
            theta: required(flags.theta.clone(), "theta")?,
            chi: required(flags.chi.clone(), "chi")?,
            steps: required(flags.steps, "steps")?,
            initial: InitialState::SymmetricCircular,
            margin: kerrwalk::DEFAULT_MARGIN,
            window: WindowSpec::default(),
        },
    };
    if let Some(t) = &flags.theta {
        walk.theta = t.clone();
    }
    if let Some(c) = &flags.chi {
        walk.chi = c.clone();
    }
    if let Some(s) = flags.steps {
        walk.steps = s;
    }
    if let Some(i) = flags.initial {
        walk.initial = i.into();
    }
    if let Some(m) = flags.margin {
        walk.margin = m;
    }
    apply_window(&mut walk.window, &flags.window);
    Ok(walk)
}

fn merge_sweep(existing: Option<SweepConfig>, args: &SweepArgs) -> Result<SweepConfig> {
    let mut sweep = match existing {
        Some(s) => s,
        None => SweepConfig {
            theta_range: required(args.theta_range.clone(), "theta_range")?,
            chi_range: required(args.chi_range.clone(), "chi_range")?,
            steps: required(args.steps, "steps")?,
            initial: InitialState::SymmetricCircular,
            margin: kerrwalk::DEFAULT_MARGIN,
            window: WindowSpec::default(),
            thresholds: Default::default(),
        },
    };
    if let Some(r) = &args.theta_range {
        sweep.theta_range = r.clone();
    }
    if let Some(r) = &args.chi_range {
        sweep.chi_range = r.clone();
    }
    if let Some(s) = args.steps {
        sweep.steps = s;
    }
    if let Some(i) = args.initial {
        sweep.initial = i.into();
    }
    if let Some(m) = args.margin {
        sweep.margin = m;
    }
    apply_window(&mut sweep.window, &args.window);
    Ok(sweep)
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Walk(args) => {
            let mut config = base_config(&args.common, Mode::Walk)?;
            config.walk = Some(merge_walk(config.walk.take(), &args.walk)?);
            if let Some(k) = args.stride {
                config.record_stride = k;
            }
            let summary = run_walk(&config)?;
            Ok(serde_json::to_string(&summary).expect("summary serializes"))
        }
        Command::Profile(args) => {
            let mut config = base_config(&args.common, Mode::Profile)?;
            config.walk = Some(merge_walk(config.walk.take(), &args.walk)?);
            if let Some(s) = args.snapshots {
                config.snapshot_times = s;
            }
            let rows = run_profile(&config)?;
            Ok(format!("{{\"rows\":{rows}}}"))
        }
        Command::Sweep(args) => {
            let mut config = base_config(&args.common, Mode::Sweep)?;
            config.sweep = Some(merge_sweep(config.sweep.take(), &args)?);
            let workers = args
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let table = run_sweep_cmd(&config, workers)?;
            let trapped = table
                .cells
                .iter()
                .filter(|c| c.regime == kerrwalk::Regime::SelfTrapped)
                .count();
            Ok(format!("{{\"cells\":{},\"self_trapped\":{trapped}}}", table.cells.len()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
