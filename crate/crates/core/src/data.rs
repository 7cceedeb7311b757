//! Datasets of (feature matrix, true parameters) pairs, synthetic generation,
//! Pisinger-style knapsack values, splitting and JSON IO.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::adapter::Sense;
use crate::error::{Error, Result};
use crate::maxflow::FlowNetwork;
use crate::mcvc::VcGraph;

/// The fixed (known) part of every instance of a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemSpec {
    Maxflow {
        network: FlowNetwork,
    },
    Knapsack {
        n_items: usize,
        capacity: f64,
        /// Shared item values; instances may carry their own instead.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
    },
    Mcvc {
        graph: VcGraph,
    },
}

impl ProblemSpec {
    /// Number of unknown parameters per instance.
    pub fn num_params(&self) -> usize {
        match self {
            ProblemSpec::Maxflow { network } => network.num_edges(),
            ProblemSpec::Knapsack { n_items, .. } => *n_items,
            ProblemSpec::Mcvc { graph } => graph.num_params(),
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            ProblemSpec::Mcvc { .. } => Sense::Minimize,
            _ => Sense::Maximize,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Maxflow { .. } => "maxflow",
            ProblemSpec::Knapsack { .. } => "knapsack",
            ProblemSpec::Mcvc { .. } => "mcvc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    /// One row of `m` features per unknown parameter.
    pub features: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    /// Per-instance knapsack item values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Instance {
    pub fn num_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub problem: ProblemSpec,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.instances.first().map_or(0, Instance::num_features)
    }

    /// Checks shapes: `t` feature rows of equal width `m` and `t` finite
    /// parameters per instance.
    pub fn validate(&self) -> Result<()> {
        let t = self.problem.num_params();
        let m = self.num_features();
        for (i, inst) in self.instances.iter().enumerate() {
            let check = || -> Result<()> {
                if inst.features.len() != t || inst.theta.len() != t {
                    return Err(Error::Dimension(format!(
                        "{} feature rows and {} parameters, expected {t}",
                        inst.features.len(),
                        inst.theta.len()
                    )));
                }
                if let Some(row) = inst.features.iter().find(|r| r.len() != m) {
                    return Err(Error::Dimension(format!("feature row of width {}, expected {m}", row.len())));
                }
                if inst.theta.iter().chain(inst.features.iter().flatten()).any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite feature or parameter".into()));
                }
                if let (Some(v), ProblemSpec::Knapsack { n_items, .. }) = (&inst.values, &self.problem) {
                    if v.len() != *n_items {
                        return Err(Error::Dimension(format!("{} item values for {n_items} items", v.len())));
                    }
                }
                Ok(())
            };
            check().map_err(|e| e.at_instance(i))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: Dataset = serde_json::from_str(text)?;
        if ds.instances.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "dataset has no instances".into(),
            });
        }
        ds.validate()?;
        Ok(ds)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            problem: self.problem.clone(),
            instances: idx.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureDist {
    /// Uniform on `[1, 2)`.
    UniformPositive,
    StandardNormal,
}

/// Pisinger's correlation classes for knapsack values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueMode {
    Uncorrelated,
    Weak,
    AlmostStrong,
}

pub const DEFAULT_R: f64 = 500.0;

/// Closed range values are drawn from for an item of weight `w`.
pub fn pisinger_range(w: f64, mode: ValueMode, r: f64) -> (f64, f64) {
    match mode {
        ValueMode::Uncorrelated => (1.0, r),
        ValueMode::Weak => ((w - r / 10.0).max(1.0), w + r / 10.0),
        ValueMode::AlmostStrong => (w + r / 10.0 - r / 500.0, w + r / 10.0 + r / 500.0),
    }
}

pub fn pisinger_values_with(weights: &[f64], mode: ValueMode, r: f64, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {r}")));
    }
    Ok(weights
        .iter()
        .map(|&w| {
            let (lo, hi) = pisinger_range(w, mode, r);
            if lo >= hi {
                lo
            } else {
                rng.random_range(lo..=hi)
            }
        })
        .collect())
}

pub fn pisinger_values(weights: &[f64], mode: ValueMode, r: f64, seed: u64) -> Result<Vec<f64>> {
    pisinger_values_with(weights, mode, r, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub problem: ProblemSpec,
    pub n: usize,
    pub m: usize,
    pub noise_std: f64,
    pub seed: u64,
    pub feature_dist: FeatureDist,
    pub alpha_star: Vec<f64>,
    pub floor: f64,
    /// Knapsack only: draw per-instance values from the true weights.
    pub value_mode: Option<ValueMode>,
    pub r: f64,
}

/// Typical parameter magnitude used for the default generating coefficients.
fn typical_scale(problem: &ProblemSpec) -> f64 {
    match problem {
        ProblemSpec::Knapsack { .. } => 40.0,
        ProblemSpec::Maxflow { .. } => 20.0,
        ProblemSpec::Mcvc { .. } => 10.0,
    }
}

/// Positive, unequal coefficients whose predictions average `scale` on
/// uniform `[1, 2)` features.
pub fn default_alpha_star(m: usize, scale: f64) -> Vec<f64> {
    let base = scale / (1.5 * m as f64);
    (0..m)
        .map(|j| {
            let spread = if m > 1 { j as f64 / (m - 1) as f64 } else { 0.5 };
            base * (0.5 + spread)
        })
        .collect()
}

impl GenSpec {
    /// Noise-free, realizable defaults: 8 uniform positive features.
    pub fn new(problem: ProblemSpec, n: usize, seed: u64) -> Self {
        let m = 8;
        let alpha_star = default_alpha_star(m, typical_scale(&problem));
        let value_mode = matches!(problem, ProblemSpec::Knapsack { values: None, .. }).then_some(ValueMode::Weak);
        GenSpec {
            problem,
            n,
            m,
            noise_std: 0.0,
            seed,
            feature_dist: FeatureDist::UniformPositive,
            alpha_star,
            floor: 1.0,
            value_mode,
            r: DEFAULT_R,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 instances, got {}", self.n)));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise_std must be nonnegative, got {}", self.noise_std)));
        }
        if self.alpha_star.len() != self.m {
            return Err(Error::Dimension(format!("{} generating coefficients for {} features", self.alpha_star.len(), self.m)));
        }
        if let ProblemSpec::Knapsack { values: None, .. } = self.problem {
            if self.value_mode.is_none() {
                return Err(Error::InvalidArgument("knapsack generation needs shared values or a value mode".into()));
            }
        }
        Ok(())
    }
}

/// Draws a dataset: features per `feature_dist`, then
/// `theta_j = max(floor, (A alpha*)_j + eps_j)` with Gaussian noise.
pub fn generate_synthetic(spec: &GenSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_std).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let t = spec.problem.num_params();
    let mut instances = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let features: Vec<Vec<f64>> = (0..t)
            .map(|_| {
                (0..spec.m)
                    .map(|_| match spec.feature_dist {
                        FeatureDist::UniformPositive => rng.random_range(1.0..2.0),
                        FeatureDist::StandardNormal => StandardNormal.sample(&mut rng),
                    })
                    .collect()
            })
            .collect();
        let theta: Vec<f64> = features
            .iter()
            .map(|row| {
                let clean: f64 = row.iter().zip(&spec.alpha_star).map(|(x, a)| x * a).sum();
                let eps = if spec.noise_std > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                (clean + eps).max(spec.floor)
            })
            .collect();
        let values = match (&spec.problem, spec.value_mode) {
            (ProblemSpec::Knapsack { values: None, .. }, Some(mode)) => {
                Some(pisinger_values_with(&theta, mode, spec.r, &mut rng)?)
            }
            _ => None,
        };
        instances.push(Instance { features, theta, values });
    }
    Ok(Dataset {
        problem: spec.problem.clone(),
        instances,
    })
}

/// Seeded shuffle into `round(train_frac * n)` training and the remaining
/// test instances.
pub fn split(ds: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (train_frac * ds.len() as f64).round() as usize;
    let (train, test) = idx.split_at(n_train);
    Ok((ds.subset(train), ds.subset(test)))
}
