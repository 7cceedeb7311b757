//! Benchmark harness: trains the post-hoc trainer, the plain-regret trainer
//! and ridge regression on seeded synthetic data, scores all three by
//! post-hoc regret on held-out instances, and renders report tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapter::LossMode;
use crate::data::{generate_synthetic, split, Dataset, GenSpec};
use crate::error::{Error, Result};
use crate::predictor::{fit_ridge, predict, train, LinearModel, TrainConfig};
use crate::problem::Scoring;

/// Ridge regression baseline.
pub fn train_ridge(train: &Dataset, lambda: f64) -> Result<LinearModel> {
    fit_ridge(train, lambda)
}

/// Post-hoc regret of every test instance under `model`.
pub fn instance_regrets(model: &LinearModel, test: &Dataset, scoring: &Scoring) -> Result<Vec<f64>> {
    test.validate()?;
    let adapters = scoring.adapters(&test.problem, &test.instances)?;
    adapters
        .par_iter()
        .zip(test.instances.par_iter())
        .enumerate()
        .map(|(i, (a, inst))| {
            let run = || {
                let theta_hat = predict(&inst.features, &model.alpha)?;
                let tov = a.true_optimal_value(&inst.theta)?;
                a.posthoc_regret(&theta_hat, &inst.theta, tov)
            };
            run().map_err(|e| e.at_instance(i))
        })
        .collect()
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean and population std of post-hoc regret over `test`.
pub fn evaluate_model(model: &LinearModel, test: &Dataset, scoring: &Scoring) -> Result<(f64, f64)> {
    Ok(mean_std(&instance_regrets(model, test, scoring)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Coordinate descent on post-hoc regret.
    #[serde(rename = "B&L-C")]
    BranchLearnCorrected,
    /// Coordinate descent on plain regret.
    #[serde(rename = "B&L")]
    BranchLearn,
    #[serde(rename = "Ridge")]
    Ridge,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::BranchLearnCorrected, Method::BranchLearn, Method::Ridge];

    pub fn label(&self) -> &'static str {
        match self {
            Method::BranchLearnCorrected => "B&L-C",
            Method::BranchLearn => "B&L",
            Method::Ridge => "Ridge",
        }
    }

    /// Fits this method's model.
    pub fn fit(&self, scoring: &Scoring, train_set: &Dataset, cfg: &TrainConfig) -> Result<LinearModel> {
        match self {
            Method::Ridge => train_ridge(train_set, cfg.ridge_lambda),
            Method::BranchLearnCorrected => Ok(train(scoring, train_set, cfg)?.model()),
            Method::BranchLearn => {
                let cfg = TrainConfig { loss_mode: LossMode::PlainRegret, ..cfg.clone() };
                Ok(train(scoring, train_set, &cfg)?.model())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Generation template; the seed is replaced per run.
    pub gen: GenSpec,
    pub scoring: Scoring,
    pub seeds: Vec<u64>,
    pub train: TrainConfig,
    pub methods: Vec<Method>,
    pub train_frac: f64,
}

impl BenchConfig {
    pub fn new(gen: GenSpec, scoring: Scoring, seeds: Vec<u64>) -> Self {
        BenchConfig {
            gen,
            scoring,
            seeds,
            train: TrainConfig::default(),
            methods: Method::ALL.to_vec(),
            train_frac: 0.7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("at least one method is required".into()));
        }
        self.gen.validate()?;
        self.scoring.validate(&self.gen.problem)?;
        self.train.validate()
    }
}

/// Outcome of one method on one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Training time; kept out of the JSON report so reruns compare equal.
    #[serde(skip)]
    pub train_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    /// Mean over seeds of the per-seed mean test regret.
    pub mean: f64,
    /// Population std over seeds of the per-seed mean test regret.
    pub std: f64,
    #[serde(skip)]
    pub mean_runtime_secs: f64,
    pub per_seed: Vec<SeedResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub problem: String,
    pub scoring: Scoring,
    pub seeds: Vec<u64>,
    pub n_instances: usize,
    pub std_kind: String,
    pub rows: Vec<ReportRow>,
}

fn run_seed(cfg: &BenchConfig, seed: u64) -> Vec<SeedResult> {
    let prepared = (|| -> Result<(Dataset, Dataset)> {
        let ds = generate_synthetic(&GenSpec { seed, ..cfg.gen.clone() })?;
        split(&ds, cfg.train_frac, seed)
    })();
    cfg.methods
        .iter()
        .map(|method| {
            let (train_set, test_set) = match &prepared {
                Ok(p) => p,
                Err(e) => {
                    return SeedResult { seed, mean: None, std: None, error: Some(e.to_string()), train_secs: 0.0 };
                }
            };
            let started = Instant::now();
            let fitted = method.fit(&cfg.scoring, train_set, &cfg.train);
            let train_secs = started.elapsed().as_secs_f64();
            match fitted.and_then(|model| evaluate_model(&model, test_set, &cfg.scoring)) {
                Ok((mean, std)) => SeedResult { seed, mean: Some(mean), std: Some(std), error: None, train_secs },
                Err(e) => SeedResult { seed, mean: None, std: None, error: Some(e.to_string()), train_secs },
            }
        })
        .collect()
}

/// Runs every method on every seed; a failing method is recorded in its row
/// and the run continues.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Report> {
    cfg.validate()?;
    let per_seed: Vec<Vec<SeedResult>> = cfg.seeds.par_iter().map(|&s| run_seed(cfg, s)).collect();
    let rows = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let results: Vec<SeedResult> = per_seed.iter().map(|r| r[mi].clone()).collect();
            let means: Vec<f64> = results.iter().filter_map(|r| r.mean).collect();
            let (mean, std) = mean_std(&means);
            let mean_runtime_secs = results.iter().map(|r| r.train_secs).sum::<f64>() / results.len() as f64;
            ReportRow { method, mean, std, mean_runtime_secs, per_seed: results }
        })
        .collect();
    Ok(Report {
        problem: cfg.gen.problem.name().to_string(),
        scoring: cfg.scoring.clone(),
        seeds: cfg.seeds.clone(),
        n_instances: cfg.gen.n,
        std_kind: "population std over seeds of per-seed mean test regret".into(),
        rows,
    })
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mean,std\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.method.label(), r.mean, r.std);
        }
        out
    }

    pub fn timings_csv(&self) -> String {
        let mut out = String::from("method,seed,train_seconds\n");
        for r in &self.rows {
            for s in &r.per_seed {
                let _ = writeln!(out, "{},{},{}", r.method.label(), s.seed, s.train_secs);
            }
        }
        out
    }

    /// Aligned text table; the runtime column is included when `timings`
    /// is set.
    pub fn to_text(&self, timings: bool) -> String {
        let mut out = format!(
            "{} | correction {} | penalty {} | {} seeds | n = {}\n",
            self.problem,
            self.scoring.correction,
            self.scoring.penalty,
            self.seeds.len(),
            self.n_instances
        );
        let _ = write!(out, "{:<8} {:>20}", "method", "post-hoc regret");
        if timings {
            let _ = write!(out, " {:>12}", "train (s)");
        }
        out.push('\n');
        for r in &self.rows {
            let cell = format!("{:.2} ± {:.2}", r.mean, r.std);
            let _ = write!(out, "{:<8} {:>20}", r.method.label(), cell);
            if timings {
                let _ = write!(out, " {:>12.2}", r.mean_runtime_secs);
            }
            let failed = r.per_seed.iter().filter(|s| s.error.is_some()).count();
            if failed > 0 {
                let _ = write!(out, "  ({failed} failed)");
            }
            out.push('\n');
        }
        out
    }

    /// Writes `report.json`, `report.csv`, `timings.csv` and `report.txt`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        fs::write(dir.join("timings.csv"), self.timings_csv())?;
        fs::write(dir.join("report.txt"), self.to_text(true))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Instance, ProblemSpec};

    #[test]
    fn mean_std_population() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 1.0));
    }

    #[test]
    fn perfect_model_has_zero_regret() {
        let spec = ProblemSpec::Knapsack { n_items: 3, capacity: 4.0, values: Some(vec![3.0, 2.0, 4.0]) };
        let inst = |w: [f64; 3]| Instance {
            features: w.iter().map(|&x| vec![x]).collect(),
            theta: w.to_vec(),
            values: None,
        };
        let ds = Dataset { problem: spec, instances: vec![inst([1.0, 2.0, 3.0]), inst([2.0, 2.0, 2.0])] };
        let model = LinearModel::new(vec![1.0]).unwrap();
        assert_eq!(evaluate_model(&model, &ds, &Scoring::default()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn ridge_shrinks_to_zero() {
        let spec = ProblemSpec::Knapsack { n_items: 2, capacity: 4.0, values: Some(vec![1.0, 1.0]) };
        let ds = Dataset {
            problem: spec,
            instances: vec![Instance { features: vec![vec![1.0, 0.5], vec![0.3, 2.0]], theta: vec![3.0, 1.0], values: None }],
        };
        let exact = train_ridge(&ds, 0.0).unwrap();
        assert!((exact.alpha[0] - 5.5 / 1.85).abs() < 1e-8);
        assert!((exact.alpha[1] - 0.1 / 1.85).abs() < 1e-8);
        let shrunk = train_ridge(&ds, 1e12).unwrap();
        assert!(shrunk.alpha.iter().all(|a| a.abs() < 1e-10));
        let flat = Dataset {
            instances: vec![Instance { features: vec![vec![1.0, 1.0], vec![2.0, 2.0]], theta: vec![1.0, 2.0], values: None }],
            ..ds
        };
        assert!(matches!(train_ridge(&flat, 0.0), Err(Error::SingularNormalMatrix)));
    }
}
