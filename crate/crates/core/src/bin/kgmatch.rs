use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kgmatch::matcher::ModelKind;
use kgmatch::pipeline::{self, Direction, GraphRole, PipelineConfig, ScorerChoice};
use kgmatch::synth::SyntheticSpec;
use kgmatch::{Error, Result};

/// Entity matching across two knowledge graphs.
#[derive(Parser)]
#[command(name = "kgmatch", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Pipeline configuration (TOML). Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for all derived artifacts.
    #[arg(long, global = true)]
    work_dir: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Source graph N-Triples files (repeatable).
    #[arg(long, global = true)]
    source: Vec<PathBuf>,
    #[arg(long, global = true)]
    target: Vec<PathBuf>,
    /// Alignment N-Triples files (repeatable).
    #[arg(long, global = true)]
    alignment: Vec<PathBuf>,
    /// Only warnings and errors on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphArg {
    Source,
    Target,
    Both,
}

impl GraphArg {
    fn roles(self) -> Vec<GraphRole> {
        match self {
            GraphArg::Source => vec![GraphRole::Source],
            GraphArg::Target => vec![GraphRole::Target],
            GraphArg::Both => vec![GraphRole::Source, GraphRole::Target],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Reverse,
    Both,
}

impl DirectionArg {
    fn directions(self) -> Vec<Direction> {
        match self {
            DirectionArg::Forward => vec![Direction::Forward],
            DirectionArg::Reverse => vec![Direction::Reverse],
            DirectionArg::Both => vec![Direction::Forward, Direction::Reverse],
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// mlp or logreg
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse N-Triples and write graph snapshots, name indexes and type files.
    Ingest {
        #[arg(long, value_enum, default_value = "both")]
        graph: GraphArg,
    },
    /// Build the ambiguous-entity dataset and its train/valid/test split.
    BuildDataset {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
    },
    /// Random walks plus skip-gram embeddings for a graph.
    TrainEmbeddings {
        #[arg(long, value_enum, default_value = "both")]
        graph: GraphArg,
        #[arg(long)]
        dim: Option<usize>,
        /// Walks per entity.
        #[arg(long)]
        walks: Option<usize>,
        /// Walk depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Train the match classifier.
    TrainMatcher {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Evaluate a split and write the JSON report and CSV tables.
    Evaluate {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        #[arg(long, default_value = "test")]
        split: String,
        /// Rank with the ground truth instead of a model.
        #[arg(long, conflicts_with = "random")]
        oracle: bool,
        /// Rank with uniform random scores.
        #[arg(long)]
        random: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Validation MRR against training-set size, with 95% confidence intervals.
    Sweep {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        /// Training percentages, e.g. 1,10,100.
        #[arg(long, value_delimiter = ',')]
        percents: Option<Vec<f64>>,
        /// Repeats per percentage (one value applies to all).
        #[arg(long, value_delimiter = ',')]
        repeats: Option<Vec<usize>>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Generate synthetic twin graphs and their alignment.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Spec file (TOML); flags override it.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        entities: Option<usize>,
        #[arg(long)]
        mean_out_degree: Option<f64>,
        #[arg(long)]
        predicates: Option<usize>,
        #[arg(long)]
        zipf_exponent: Option<f64>,
        #[arg(long)]
        max_group: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn load_config(g: &Global) -> Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    set(&mut cfg.seed, g.seed);
    set(&mut cfg.paths.work_dir, g.work_dir.clone());
    for (slot, v) in [(&mut cfg.paths.source, &g.source), (&mut cfg.paths.target, &g.target), (&mut cfg.paths.alignment, &g.alignment)] {
        if !v.is_empty() {
            *slot = v.clone();
        }
    }
    Ok(cfg)
}

fn apply_model(cfg: &mut PipelineConfig, m: &ModelArgs) {
    set(&mut cfg.matcher.model, m.model);
    set(&mut cfg.matcher.hidden, m.hidden);
    set(&mut cfg.matcher.train.max_epochs, m.epochs);
    set(&mut cfg.matcher.train.batch_size, m.batch_size);
    set(&mut cfg.matcher.train.learning_rate, m.learning_rate);
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    if let Command::Synth { out, spec, entities, mean_out_degree, predicates, zipf_exponent, max_group, noise } = cli.command {
        let mut s = match spec {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => SyntheticSpec::default(),
        };
        set(&mut s.seed, cli.global.seed);
        set(&mut s.entities, entities);
        set(&mut s.mean_out_degree, mean_out_degree);
        set(&mut s.predicates, predicates);
        set(&mut s.zipf_exponent, zipf_exponent);
        set(&mut s.max_group, max_group);
        set(&mut s.noise, noise);
        let files = pipeline::cmd_synth(&s, &out)?;
        println!("{}\n{}\n{}", files.source.display(), files.target.display(), files.alignment.display());
        return Ok(());
    }

    let mut cfg = load_config(&cli.global)?;
    match &cli.command {
        Command::TrainEmbeddings { dim, walks, depth, .. } => {
            set(&mut cfg.skipgram.dim, *dim);
            set(&mut cfg.walks.walks_per_entity, *walks);
            set(&mut cfg.walks.depth, *depth);
        }
        Command::TrainMatcher { model, .. } | Command::Evaluate { model, .. } | Command::Sweep { model, .. } => {
            apply_model(&mut cfg, model)
        }
        _ => {}
    }
    if let Command::Sweep { percents, repeats, .. } = &cli.command {
        set(&mut cfg.eval.sweep_percents, percents.clone());
        if let Some(r) = repeats {
            cfg.eval.sweep_repeats =
                Some(if r.len() == 1 { vec![r[0]; cfg.eval.sweep_percents.len()] } else { r.clone() });
        }
    }
    cfg.validate()?;

    match cli.command {
        Command::Ingest { graph } => {
            for role in graph.roles() {
                let s = pipeline::cmd_ingest(&cfg, role)?;
                eprintln!(
                    "{}: {} entities, {} triples, {} names, {} malformed lines",
                    role.name(),
                    s.entities,
                    s.triples,
                    s.names,
                    s.malformed
                );
            }
        }
        Command::BuildDataset { direction } => {
            for d in direction.directions() {
                let split = pipeline::cmd_build_dataset(&cfg, d)?;
                eprintln!("{}: train {}, valid {}, test {}", d.label(), split.train.len(), split.valid.len(), split.test.len());
            }
        }
        Command::TrainEmbeddings { graph, .. } => {
            for role in graph.roles() {
                let t = pipeline::cmd_train_embeddings(&cfg, role)?;
                eprintln!("{}: {} vectors of dimension {}", role.name(), t.len(), t.dim());
            }
        }
        Command::TrainMatcher { direction, .. } => {
            for d in direction.directions() {
                let out = pipeline::cmd_train_matcher(&cfg, d)?;
                eprintln!("{}: best epoch {} of {}", d.label(), out.best_epoch, out.log.len());
            }
        }
        Command::Evaluate { direction, split, oracle, random, .. } => {
            let choice = if oracle {
                ScorerChoice::Oracle
            } else if random {
                ScorerChoice::Random
            } else {
                ScorerChoice::Model
            };
            for d in direction.directions() {
                let r = pipeline::cmd_evaluate(&cfg, d, &split, choice)?;
                println!("{}\t{}\t{}\tmrr={:.4}\trandom={:.4}\tqueries={}", d.label(), r.meta.model, split, r.mrr, r.random_baseline, r.queries);
            }
        }
        Command::Sweep { direction, .. } => {
            for d in direction.directions() {
                let curve = pipeline::cmd_sweep(&cfg, d)?;
                for p in &curve.points {
                    println!("{}\t{}%\tmean={:.4}\tci=[{:.4},{:.4}]\tn={}", d.label(), p.percent, p.mean, p.ci_low, p.ci_high, p.values.len());
                }
            }
        }
        Command::Synth { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.global.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
