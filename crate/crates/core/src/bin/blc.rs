//! Command-line front end: dataset generation, training, evaluation,
//! benchmarking and report rendering. Failures print a JSON error object on
//! stderr and exit nonzero.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use branch_learn::bench::{instance_regrets, mean_std, run_benchmark, BenchConfig, Method, Report};
use branch_learn::data::{generate_synthetic, Dataset, FeatureDist, GenSpec, ProblemSpec, ValueMode};
use branch_learn::piecewise::{Interval, PiecewiseFn};
use branch_learn::predictor::{train_observed, LinearModel, TrainConfig, TrainedModel};
use branch_learn::problem::{Correction, PenaltyKind, Scoring};
use branch_learn::{topology, Error, Result};

#[derive(Parser)]
#[command(name = "blc", version, about = "Train linear predictors on post-hoc regret")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a dataset.
    Generate(GenerateArgs),
    /// Train one method on a dataset.
    Train(TrainArgs),
    /// Score a model on a dataset by post-hoc regret.
    Eval(EvalArgs),
    /// Train and score every method over several seeds.
    Bench(BenchArgs),
    /// Re-render the tables of a benchmark report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Maxflow,
    Knapsack,
    Mcvc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueModeArg {
    Uncorrelated,
    Weak,
    AlmostStrong,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Blc,
    Bl,
    Ridge,
}

#[derive(Args, Clone)]
struct GenOpts {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    /// Knapsack capacity.
    #[arg(long, default_value_t = 100.0)]
    capacity: f64,
    /// Knapsack item count.
    #[arg(long, default_value_t = 10)]
    items: usize,
    #[arg(long, value_enum, default_value = "weak")]
    value_mode: ValueModeArg,
    /// Bundled network (maxflow) or graph (mcvc) name.
    #[arg(long)]
    topology: Option<String>,
    /// Network or graph JSON file, instead of a bundled topology.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Number of instances.
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Features per parameter.
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Standard deviation of the additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Standard normal instead of uniform [1, 2) features.
    #[arg(long)]
    normal_features: bool,
}

#[derive(Args, Clone)]
struct ScoringOpts {
    #[arg(long, default_value = "A")]
    correction: String,
    #[arg(long, default_value = "none")]
    penalty: String,
    /// Penalty per wasted path (maxflow) or removed item (knapsack).
    #[arg(long = "K")]
    k: Option<f64>,
    /// Knapsack penalty I fraction.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
}

#[derive(Args, Clone)]
struct TrainOpts {
    /// Initial interval for every coefficient, as `lo,hi`.
    #[arg(long, allow_hyphen_values = true, default_value = "-1000,1000")]
    i0: String,
    #[arg(long, default_value_t = 1000)]
    grid_n: usize,
    #[arg(long, default_value_t = 20)]
    max_passes: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Wall-clock training budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenOpts,
    /// Only the first seed is used.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "blc")]
    method: MethodArg,
    #[command(flatten)]
    scoring: ScoringOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[arg(long)]
    out: PathBuf,
    /// Write every coordinate update's summed loss function here.
    #[arg(long)]
    dump_loss: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    scoring: ScoringOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    gen: GenOpts,
    #[command(flatten)]
    scoring: ScoringOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// A `report.json` written by `bench`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_i0(s: &str) -> Result<Interval> {
    let bad = || Error::InvalidArgument(format!("--i0 expects `lo,hi`, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Interval::bounded(lo, hi)
}

fn problem_spec(g: &GenOpts) -> Result<ProblemSpec> {
    Ok(match g.problem {
        ProblemKind::Knapsack => ProblemSpec::Knapsack { n_items: g.items, capacity: g.capacity, values: None },
        ProblemKind::Maxflow => {
            let network = match &g.fixture {
                Some(p) => branch_learn::maxflow::FlowNetwork::from_json(&fs::read_to_string(p)?)?,
                None => topology::network(g.topology.as_deref().unwrap_or("polska"))?,
            };
            ProblemSpec::Maxflow { network }
        }
        ProblemKind::Mcvc => {
            let graph = match &g.fixture {
                Some(p) => branch_learn::mcvc::VcGraph::from_json(&fs::read_to_string(p)?)?,
                None => topology::graph(g.topology.as_deref().unwrap_or("abilene"))?,
            };
            ProblemSpec::Mcvc { graph }
        }
    })
}

fn gen_spec(g: &GenOpts, seed: u64) -> Result<GenSpec> {
    let mut spec = GenSpec::new(problem_spec(g)?, g.n, seed);
    if g.m != spec.m {
        let scale = spec.alpha_star.iter().sum::<f64>() * 1.5;
        spec.m = g.m;
        spec.alpha_star = branch_learn::data::default_alpha_star(g.m, scale);
    }
    spec.noise_std = g.noise;
    if g.normal_features {
        spec.feature_dist = FeatureDist::StandardNormal;
    }
    if spec.value_mode.is_some() {
        spec.value_mode = Some(match g.value_mode {
            ValueModeArg::Uncorrelated => ValueMode::Uncorrelated,
            ValueModeArg::Weak => ValueMode::Weak,
            ValueModeArg::AlmostStrong => ValueMode::AlmostStrong,
        });
    }
    Ok(spec)
}

fn scoring(s: &ScoringOpts, problem: &ProblemSpec) -> Result<Scoring> {
    let default_k = match problem {
        ProblemSpec::Maxflow { .. } => 10.0,
        _ => 500.0,
    };
    let scoring = Scoring {
        correction: s.correction.parse::<Correction>()?,
        penalty: s.penalty.parse::<PenaltyKind>()?,
        k: s.k.unwrap_or(default_k),
        sigma: s.sigma,
    };
    scoring.validate(problem)?;
    Ok(scoring)
}

fn train_config(t: &TrainOpts) -> Result<TrainConfig> {
    let cfg = TrainConfig {
        i0: parse_i0(&t.i0)?,
        grid_n: t.grid_n,
        max_passes: t.max_passes,
        tol: t.tol,
        time_budget_secs: t.time_budget,
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

#[derive(Serialize)]
struct LossDump<'a> {
    pass: usize,
    k: usize,
    previous: f64,
    chosen: f64,
    mean_loss: f64,
    loss: &'a PiecewiseFn,
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    match cli.command {
        Command::Generate(a) => {
            let seed = *a.seeds.first().ok_or_else(|| Error::InvalidArgument("no seed given".into()))?;
            let ds = generate_synthetic(&gen_spec(&a.gen, seed)?)?;
            ds.save(&a.out)?;
            Ok(json!({ "out": a.out, "instances": ds.len(), "problem": ds.problem.name() }))
        }
        Command::Train(a) => {
            let ds = Dataset::load(&a.data)?;
            let scoring = scoring(&a.scoring, &ds.problem)?;
            let mut cfg = train_config(&a.train)?;
            let mut dumps: Vec<serde_json::Value> = Vec::new();
            let trained = match a.method {
                MethodArg::Ridge => {
                    let model = Method::Ridge.fit(&scoring, &ds, &cfg)?;
                    TrainedModel { alpha: model.alpha, config: cfg, loss_history: Vec::new() }
                }
                MethodArg::Blc | MethodArg::Bl => {
                    if matches!(a.method, MethodArg::Bl) {
                        cfg.loss_mode = branch_learn::adapter::LossMode::PlainRegret;
                    }
                    let dump = a.dump_loss.is_some();
                    train_observed(&scoring, &ds, &cfg, |ev| {
                        if dump {
                            let entry = LossDump {
                                pass: ev.pass,
                                k: ev.k,
                                previous: ev.previous,
                                chosen: ev.chosen,
                                mean_loss: ev.mean_loss,
                                loss: ev.loss,
                            };
                            dumps.push(serde_json::to_value(entry).expect("loss dump serializes"));
                        }
                    })?
                }
            };
            if let Some(p) = &a.dump_loss {
                write_json(p, &dumps)?;
            }
            write_json(&a.out, &trained)?;
            Ok(json!({ "out": a.out, "alpha": trained.alpha, "final_loss": trained.loss_history.last() }))
        }
        Command::Eval(a) => {
            let ds = Dataset::load(&a.data)?;
            let trained = TrainedModel::from_json(&fs::read_to_string(&a.model)?)?;
            let scoring = scoring(&a.scoring, &ds.problem)?;
            let regrets = instance_regrets(&LinearModel::new(trained.alpha)?, &ds, &scoring)?;
            let (mean, std) = mean_std(&regrets);
            let result = json!({ "mean": mean, "std": std, "regrets": regrets });
            if let Some(p) = &a.out {
                write_json(p, &result)?;
            }
            Ok(result)
        }
        Command::Bench(a) => {
            let gen = gen_spec(&a.gen, a.seeds.first().copied().unwrap_or(0))?;
            let scoring = scoring(&a.scoring, &gen.problem)?;
            let mut cfg = BenchConfig::new(gen, scoring, a.seeds.clone());
            cfg.train = train_config(&a.train)?;
            let report = run_benchmark(&cfg)?;
            report.write_artifacts(&a.out)?;
            eprint!("{}", report.to_text(true));
            Ok(json!({ "out": a.out }))
        }
        Command::Report(a) => {
            let report = Report::from_json(&fs::read_to_string(&a.input)?)?;
            let text = report.to_text(false);
            match &a.out {
                Some(p) => fs::write(p, &text)?,
                None => {
                    print!("{text}");
                    return Ok(Value::Null);
                }
            }
            Ok(json!({ "rows": report.rows.len() }))
        }
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string(), 2),
    };
    match run(cli) {
        Ok(summary) => {
            if !summary.is_null() {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}
