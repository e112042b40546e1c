use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use predsearch::experiments::{
    emit_plotdata, read_rows, run_sweep, sample_trial, summarize, sweep_metadata, verify_bounds, write_plotdata, write_rows,
    write_summary, ExperimentConfig, Family, Figure, Regime, Suite, SweepStrategy, VerifyOptions,
};
use predsearch::exploration::SearchInstance;
use predsearch::instances::{
    gen_lb_p3, gen_lb_planning_tree, gen_lb_relative_star, gen_lb_star, instance_to_json, load_instance,
};
use predsearch::planning::run_full_info;
use predsearch::predictions::Phi;

#[derive(Parser)]
#[command(name = "predsearch", version, about = "Graph search with noisy distance predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random or adversarial instance as JSON.
    Gen(GenArgs),
    /// Run one strategy on an instance file and print the trace as JSON.
    Run(RunArgs),
    /// Run a parameter sweep and write one CSV row per strategy and trial.
    Sweep(SweepArgs),
    /// Run verification suites; exits with status 1 if any check fails.
    Verify(VerifyArgs),
    /// Aggregate sweep rows into mean and standard deviation per cell.
    Summarize(SummarizeArgs),
    /// Turn sweep rows into `x, mean, std, series` plot data.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family as `name[:params]`, e.g. `erdos_renyi:0.1`.
    #[arg(long, default_value = "random_tree", conflicts_with = "adversarial")]
    family: Family,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value = "absolute")]
    regime: Regime,
    /// `E1` for absolute and admissible errors, `eps` for relative ones.
    #[arg(long, default_value_t = 0.0)]
    magnitude: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Adversarial instance instead of a random one: `p3:W`, `star:N:EINF`,
    /// `relative-star:N:EPS` or `planning-tree:DELTA:W`.
    #[arg(long)]
    adversarial: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// `greedy`, `pruned:EPS`, `beta_weighted[:BETA]`, `smallest_prediction`,
    /// `astar`, `planning:phi0` or `planning:phi1`.
    #[arg(long, default_value = "greedy")]
    strategy: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML or JSON file with any of the fields below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Repeatable; `name[:params]`.
    #[arg(long = "family")]
    families: Vec<Family>,
    /// Repeatable; `name[:param]`.
    #[arg(long = "strategy")]
    strategies: Vec<SweepStrategy>,
    #[arg(long)]
    regime: Option<Regime>,
    #[arg(long, value_delimiter = ',')]
    magnitudes: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Repeatable; all suites when omitted.
    #[arg(long = "suite")]
    suites: Vec<Suite>,
    /// Overrides the per-loop trial counts of every suite.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for counterexample files.
    #[arg(long, default_value = "counterexamples")]
    dump_dir: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Sweep CSV.
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Sweep CSV.
    input: PathBuf,
    /// `fig2_left`, `fig2_right`, `baseline` or `node_scaling`.
    #[arg(long)]
    figure: Figure,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(cfg)
}

fn adversarial(spec: &str) -> Result<SearchInstance<f64>> {
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<f64> = parts
        .map(|a| a.parse::<f64>().with_context(|| format!("bad number {a:?} in {spec:?}")))
        .collect::<Result<_>>()?;
    let inst = match (kind, args.as_slice()) {
        ("p3", [w]) => gen_lb_p3(*w)?.0,
        ("star", [n, einf]) => gen_lb_star(*n as usize, *einf)?,
        ("relative-star", [n, eps]) => gen_lb_relative_star(*n as usize, *eps)?,
        ("planning-tree", [delta, w]) => gen_lb_planning_tree(*delta as usize, *w)?,
        _ => bail!("unknown adversarial instance {spec:?}"),
    };
    Ok(inst)
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = match &args.adversarial {
        Some(spec) => adversarial(spec)?,
        None => {
            let inst = sample_trial(&args.family, args.n, args.regime, args.magnitude, args.seed)?;
            // integer weights give integer distances, which planning with phi1 needs
            let integral = inst.graph().edges().iter().all(|e| e.weight.fract() == 0.0);
            inst.with_integer_distance(integral)?
        }
    };
    let mut out = sink(args.output.as_deref())?;
    writeln!(out, "{}", instance_to_json(&inst))?;
    out.flush()?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let inst: SearchInstance<f64> = load_instance(&args.instance)?;
    let text = match args.strategy.as_str() {
        "planning:phi0" => serde_json::to_string_pretty(&run_full_info(&inst, Phi::Phi0)?)?,
        "planning:phi1" => serde_json::to_string_pretty(&run_full_info(&inst, Phi::Phi1)?)?,
        s => {
            let strategy: SweepStrategy = s.parse()?;
            if let SweepStrategy::Pruned { eps: None } = strategy {
                bail!("pruned search needs its parameter, e.g. pruned:0.1");
            }
            serde_json::to_string_pretty(&predsearch::experiments::run_single(&inst, strategy)?)?
        }
    };
    let mut out = sink(args.output.as_deref())?;
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    if !args.families.is_empty() {
        cfg.families = args.families;
    }
    if !args.strategies.is_empty() {
        cfg.strategies = args.strategies;
    }
    if let Some(r) = args.regime {
        cfg.regime = r;
    }
    if !args.magnitudes.is_empty() {
        cfg.magnitudes = args.magnitudes;
    }
    if !args.sizes.is_empty() {
        cfg.sizes = args.sizes;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.output.is_some() {
        cfg.output = args.output;
    }
    let rows = run_sweep(&cfg)?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the status column", rows.len());
    }
    write_rows(&rows, sink(cfg.output.as_deref())?)?;
    if let Some(out) = &cfg.output {
        let mut meta = out.clone().into_os_string();
        meta.push(".meta.json");
        let text = serde_json::to_string_pretty(&sweep_metadata(&cfg))?;
        std::fs::write(&meta, text + "\n").with_context(|| format!("writing {}", meta.to_string_lossy()))?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let suites = if args.suites.is_empty() { Suite::ALL.to_vec() } else { args.suites };
    let opts = VerifyOptions {
        trials: args.trials,
        seed: args.seed,
        dump_dir: Some(args.dump_dir),
    };
    let mut all_passed = true;
    for suite in suites {
        let report = verify_bounds(suite, &opts)?;
        for c in &report.checks {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            print!(
                "{verdict} {suite} {}: {} trials, {} skipped, {} violations",
                c.name, c.trials, c.skipped, c.violations
            );
            if let Some(first) = &c.first {
                print!(" (first: seed {}, {})", first.seed, first.detail);
            }
            if let Some(p) = &c.dump {
                print!(" [{}]", p.display());
            }
            println!();
        }
        all_passed &= report.passed();
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Run(a) => run(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Summarize(a) => open(&a.input)
            .and_then(|f| Ok(read_rows(f)?))
            .and_then(|rows| Ok(write_summary(&summarize(&rows), sink(a.output.as_deref())?)?))
            .map(|_| true),
        Command::Plotdata(a) => open(&a.input)
            .and_then(|f| Ok(read_rows(f)?))
            .and_then(|rows| Ok(write_plotdata(&emit_plotdata(&rows, a.figure), sink(a.output.as_deref())?)?))
            .map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
