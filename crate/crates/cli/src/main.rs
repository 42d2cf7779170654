//! `graphverify` command-line front end.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use graphverify::distinguish::{qcd_bounds, qsd_bounds, BoundReport, Instance, QcdInstance, QsdInstance};
use graphverify::graphstate::{build_graph_state, syndrome_state, Graph};
use graphverify::protocols::{
    estimate_acceptance, run_trials, setup_for_instance, strategy_by_name, summarize, Overrides, Protocol,
    QChoice, DEFAULT_EPSILON,
};
use graphverify::qcore::random::haar_state;
use graphverify::qcore::StateVector;
use graphverify::stabtest::{batch_report, decompose};

const SEED_ENV: &str = "GRAPHVERIFY_SEED";

#[derive(Parser)]
#[command(name = "graphverify", version, about = "Graph-state verification protocols with single-qubit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the acceptance bounds of a protocol as JSON, or a CSV sweep.
    Bounds(BoundsArgs),
    /// Run a protocol repeatedly from a JSON config.
    Run(RunArgs),
    /// Batch stabilizer test on a graph state or a modification of it.
    Stabtest(StabtestArgs),
    /// Write the demo instance files.
    GenInstance(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Qsd,
    Qcd,
}

#[derive(clap::Args)]
struct BoundsArgs {
    #[arg(value_enum)]
    protocol: ProtocolArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 3)]
    r: u32,
    #[arg(long, default_value_t = 1.5)]
    a: f64,
    #[arg(long, default_value_t = 0.5)]
    b: f64,
    /// `epsilon=START:STOP:logN` or `epsilon=START:STOP:linN`.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run config JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// JSONL transcript file; overrides the config.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(clap::Args)]
struct StabtestArgs {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "lattice")]
    graph: Option<PathBuf>,
    /// Square lattice `WxH` instead of a graph file.
    #[arg(long)]
    lattice: Option<String>,
    /// Comma-separated V₁ vertices.
    #[arg(long, value_delimiter = ',', required = true)]
    v1: Vec<usize>,
    /// `honest`, `syndrome:BITS` (one bit per vertex) or `perturb:DELTA`.
    #[arg(long, default_value = "honest")]
    state: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    Orthogonal,
    Identical,
    IdentityVsX,
    EqualChannels,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Which demo; all four when omitted.
    #[arg(long, value_enum)]
    kind: Option<DemoKind>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
}

/// Protocol run configuration.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    protocol: Protocol,
    instance: PathBuf,
    strategy: String,
    #[serde(default)]
    q: QChoice,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default)]
    r: Option<u32>,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    trials: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    workers: Option<usize>,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => Ok(Some(s.trim().parse().with_context(|| format!("{SEED_ENV}={s} is not a seed"))?)),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Run(a) => cmd_run(a),
        Command::Stabtest(a) => cmd_stabtest(a),
        Command::GenInstance(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn bounds_for(args: &BoundsArgs, epsilon: f64) -> graphverify::Result<BoundReport> {
    match args.protocol {
        ProtocolArg::Qsd => qsd_bounds(epsilon, args.r),
        ProtocolArg::Qcd => qcd_bounds(epsilon, args.a, args.b),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let Some(sweep) = &args.sweep else {
        let report = bounds_for(&args, args.epsilon)?;
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    };
    let values = parse_sweep(sweep)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "epsilon,q_star,alpha,beta1,beta2,delta1,delta2,guaranteed_gap")?;
    for eps in values {
        match bounds_for(&args, eps) {
            Ok(r) => writeln!(
                out,
                "{eps:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.q_star, r.alpha, r.beta1, r.beta2, r.delta1, r.delta2, r.guaranteed_gap
            )?,
            Err(_) => writeln!(out, "{eps:e},,,,,,,")?,
        }
    }
    Ok(())
}

/// Parses `epsilon=START:STOP:logN` (or `linN`) into N points.
fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let Some(range) = spec.strip_prefix("epsilon=") else {
        bail!("sweep must have the form epsilon=START:STOP:logN");
    };
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        bail!("sweep must have the form epsilon=START:STOP:logN");
    };
    let (start, stop): (f64, f64) = (start.parse()?, stop.parse()?);
    let (log, n) = if let Some(n) = steps.strip_prefix("log") {
        (true, n.parse::<usize>()?)
    } else if let Some(n) = steps.strip_prefix("lin") {
        (false, n.parse::<usize>()?)
    } else {
        bail!("sweep spacing must be logN or linN");
    };
    if n < 2 || !(start > 0.0 && stop > start) {
        bail!("sweep needs 0 < START < STOP and at least two points");
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                (start.ln() + t * (stop.ln() - start.ln())).exp()
            } else {
                start + t * (stop - start)
            }
        })
        .collect())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config: RunConfig = serde_json::from_str(&text).context("parsing run config")?;
    if config.trials == 0 {
        bail!("trials must be at least 1");
    }
    let workers = args.workers.or(config.workers);
    if workers == Some(0) {
        bail!("worker count must be at least 1");
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    let instance_path = if config.instance.is_absolute() {
        config.instance.clone()
    } else {
        base.join(&config.instance)
    };
    let instance_text = fs::read_to_string(&instance_path)
        .with_context(|| format!("reading instance {}", instance_path.display()))?;
    let instance = Instance::from_json(&instance_text).context("parsing instance file")?;
    let matches = matches!(
        (&instance, config.protocol),
        (Instance::Qsd(_), Protocol::Qsd) | (Instance::Qcd(_), Protocol::Qcd)
    );
    if !matches {
        bail!("instance file does not match protocol {:?}", config.protocol);
    }
    let strategy = strategy_by_name(&config.strategy)?;
    let seed = args.seed.or(config.seed).or(env_seed()?).unwrap_or(0);
    let overrides = Overrides {
        r: config.r,
        a: config.a,
        b: config.b,
    };
    let setup = setup_for_instance(&instance, config.q, config.epsilon, overrides)?;
    let output = args.output.or(config.output);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build()?;
    let summary = pool.install(|| -> Result<_> {
        match &output {
            Some(path) => {
                let transcripts = run_trials(&setup, strategy.as_ref(), config.trials, seed)?;
                let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                for t in &transcripts {
                    serde_json::to_writer(&mut w, t)?;
                    writeln!(w)?;
                }
                w.flush()?;
                Ok(summarize(&setup, strategy.name(), seed, &transcripts))
            }
            None => Ok(estimate_acceptance(&setup, strategy.as_ref(), config.trials, seed)?),
        }
    })?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn parse_lattice(spec: &str) -> Result<Graph> {
    let Some((w, h)) = spec.split_once('x') else {
        bail!("lattice must be WxH");
    };
    Ok(Graph::lattice(w.parse()?, h.parse()?))
}

fn cmd_stabtest(args: StabtestArgs) -> Result<()> {
    let graph = match (&args.graph, &args.lattice) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading graph {}", path.display()))?;
            Graph::from_json(&text).context("parsing graph file")?
        }
        (None, Some(spec)) => parse_lattice(spec)?,
        _ => bail!("exactly one of --graph and --lattice is required"),
    };
    if args.trials == 0 {
        bail!("trials must be at least 1");
    }
    let seed = args.seed.or(env_seed()?).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = decompose(&graph, &args.v1)?;
    let state = state_from_spec(&graph, &args.state, &mut rng)?;
    let report = batch_report(&state, &d, args.trials, &mut rng)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn state_from_spec(graph: &Graph, spec: &str, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    if spec == "honest" {
        return Ok(build_graph_state(graph)?);
    }
    if let Some(bits) = spec.strip_prefix("syndrome:") {
        let u = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => bail!("syndrome bits must be 0 or 1"),
            })
            .collect::<Result<Vec<_>>>()?;
        if u.len() != graph.n_vertices() {
            bail!("syndrome needs {} bits, got {}", graph.n_vertices(), u.len());
        }
        return Ok(syndrome_state(graph, &u)?);
    }
    if let Some(delta) = spec.strip_prefix("perturb:") {
        let delta: f64 = delta.parse().context("perturbation must be a number")?;
        if !(0.0..=1.0).contains(&delta) {
            bail!("perturbation must lie in [0, 1]");
        }
        let g = build_graph_state(graph)?;
        let noise = haar_state(graph.n_vertices(), rng);
        let amps = g
            .amplitudes()
            .iter()
            .zip(noise.amplitudes())
            .map(|(a, b)| a * (1.0 - delta) + b * delta)
            .collect();
        return Ok(StateVector::from_amplitudes(
            normalize(amps).context("perturbed state vanished")?,
        )?);
    }
    bail!("state must be honest, syndrome:BITS or perturb:DELTA")
}

fn normalize(mut v: Vec<graphverify::qcore::C64>) -> Option<Vec<graphverify::qcore::C64>> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return None;
    }
    v.iter_mut().for_each(|a| *a /= norm);
    Some(v)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let kinds = match args.kind {
        Some(k) => vec![k],
        None => vec![
            DemoKind::Orthogonal,
            DemoKind::Identical,
            DemoKind::IdentityVsX,
            DemoKind::EqualChannels,
        ],
    };
    fs::create_dir_all(&args.dir).with_context(|| format!("creating {}", args.dir.display()))?;
    for k in kinds {
        let (name, inst) = match k {
            DemoKind::Orthogonal => ("qsd_orthogonal_yes.json", Instance::Qsd(QsdInstance::orthogonal_demo())),
            DemoKind::Identical => ("qsd_identical_no.json", Instance::Qsd(QsdInstance::identical_demo())),
            DemoKind::IdentityVsX => ("qcd_identity_vs_x_yes.json", Instance::Qcd(QcdInstance::identity_vs_x_demo())),
            DemoKind::EqualChannels => ("qcd_equal_channels_no.json", Instance::Qcd(QcdInstance::equal_channels_demo())),
        };
        let path = args.dir.join(name);
        fs::write(&path, inst.to_json()? + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}
