//! Command-line driver: builds graphs, runs Monte Carlo and splitting
//! estimates with checkpoints, fits results and bundles plot data.

mod config;
mod experiment;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use qecsplit::analysis::{AnsatzOptions, Readout};
use qecsplit::geometry::{graph_to_string, ErrorKind};

use config::{AnchorPolicy, ConfigError, ExperimentConfig, MethodChoice};
use experiment::{build_instance, RunError, Runner};

#[derive(Parser)]
#[command(
    name = "qecsplit",
    version,
    about = "Logical error rates of defect-encoded surface codes"
)]
struct Cli {
    /// More log output (-v info, -vv debug); RUST_LOG also works.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a decoding graph in the text graph format.
    BuildGraph(GraphArgs),
    /// Direct Monte Carlo at every rate.
    Mc(ExperimentArgs),
    /// Splitting estimates at every rate.
    Split(ExperimentArgs),
    /// Estimates with the configured method, then fit and report.
    Run(ExperimentArgs),
    /// Fit the results table.
    Fit(FitArgs),
    /// Bundle results, curves and fits for plotting.
    Report(ReportArgs),
}

#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    /// TOML config file; flags given alongside override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    readout: Option<Readout>,
    #[arg(long)]
    error_kind: Option<ErrorKind>,
    /// Defect sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<usize>>,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; relative paths are taken under $QECSPLIT_OUTPUT.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    p_star: Option<f64>,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long, value_enum)]
    anchor: Option<AnchorPolicy>,
    /// Metropolis steps per rate.
    #[arg(long)]
    steps: Option<u64>,
    /// Recorded samples per rate.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    max_doublings: Option<u32>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Stop after this many new walks (resume testing).
    #[arg(long, hide = true)]
    stop_after_rungs: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, default_value = "noiseless")]
    readout: Readout,
    #[arg(long, default_value = "path")]
    error_kind: ErrorKind,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Rate the edge weights are computed for.
    #[arg(long, default_value_t = 0.001)]
    p: f64,
    /// Destination file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitOptionArgs {
    /// Reference size of the fitting formula.
    #[arg(long, default_value_t = qecsplit::analysis::DEFAULT_R0)]
    r0: usize,
    /// Hold c fixed at this value.
    #[arg(long)]
    pin_c: Option<f64>,
    /// Degree of the polynomial y(p).
    #[arg(long, default_value_t = 3)]
    y_degree: usize,
}

impl FitOptionArgs {
    fn options(&self) -> AnsatzOptions {
        AnsatzOptions {
            r0: self.r0,
            pin_c: self.pin_c,
            y_degree: self.y_degree,
            ..AnsatzOptions::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Results table, or a directory holding results.csv.
    input: PathBuf,
    /// Where to write the fits; fit.json next to the input by default.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    fit: FitOptionArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory.
    dir: PathBuf,
    #[command(flatten)]
    fit: FitOptionArgs,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let readout = self
                    .readout
                    .ok_or_else(|| ConfigError::new("readout", "missing (flag or config)"))?;
                let kind = self
                    .error_kind
                    .ok_or_else(|| ConfigError::new("error_kind", "missing (flag or config)"))?;
                ExperimentConfig::new(readout, kind)
            }
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { c.$($field).+ = v.clone(); })*
            };
        }
        macro_rules! set_opt {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { c.$($field).+ = Some(v.clone()); })*
            };
        }
        set!(
            readout => readout, error_kind => error_kind, r => r, rates => rates,
            method => method, seed => seed, workers => workers, output => output,
            steps => splitting.steps, max_doublings => splitting.max_doublings,
            trials => mc.trials,
        );
        set_opt!(
            s => geometry.s, b => geometry.b, t => geometry.t,
            p_star => splitting.p_star, p_start => splitting.p_start,
            anchor => splitting.anchor, samples => splitting.samples,
            tolerance => splitting.tolerance,
        );
        if c.rates.is_empty() {
            return Err(ConfigError::new("rates", "no rates given"));
        }
        Ok(c)
    }
}

fn run_experiment(args: &ExperimentArgs, force: Option<MethodChoice>) -> Result<(), RunError> {
    let mut config = args.resolve()?;
    match force {
        Some(MethodChoice::Mc) => config.method = MethodChoice::Mc,
        Some(_) if matches!(config.method, MethodChoice::Mc | MethodChoice::Auto) => {
            config.method = match config.readout {
                Readout::Noiseless => MethodChoice::SplitUp,
                Readout::Noisy => MethodChoice::SplitDown,
            }
        }
        _ => {}
    }
    let runner = Runner::new(&config, args.stop_after_rungs)?;
    let records = runner.run_all()?;
    info!(
        "{} points written to {}",
        records.len(),
        runner.output().display()
    );
    if force.is_none() {
        report::bundle(runner.output(), &AnsatzOptions::default())?;
    }
    Ok(())
}

fn build_graph(args: &GraphArgs) -> Result<(), RunError> {
    let mut config = ExperimentConfig::new(args.readout, args.error_kind);
    config.geometry.s = args.s;
    config.geometry.b = args.b;
    config.geometry.t = args.t;
    config.r = vec![args.r];
    config.rates = vec![args.p];
    config.validate()?;
    let instance = build_instance(&config, args.r, args.p)?;
    let text = graph_to_string(&instance.graph);
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| RunError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| RunError::Io(e.to_string())),
    }
}

fn fit(args: &FitArgs) -> Result<(), RunError> {
    let input = if args.input.is_dir() {
        args.input.join("results.csv")
    } else {
        args.input.clone()
    };
    let records = report::read_results_file(&input)?;
    let fits = report::fit_records(&records, &args.fit.options());
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| input.with_file_name("fit.json"));
    report::write_fit(&out, &fits)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::BuildGraph(a) => build_graph(a),
        Command::Mc(a) => run_experiment(a, Some(MethodChoice::Mc)),
        Command::Split(a) => run_experiment(a, Some(MethodChoice::SplitUp)),
        Command::Run(a) => run_experiment(a, None),
        Command::Fit(a) => fit(a),
        Command::Report(a) => report::bundle(&a.dir, &a.fit.options()).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qecsplit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
