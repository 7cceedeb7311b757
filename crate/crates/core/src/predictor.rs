//! Linear predictor `theta_hat = A alpha` and its coordinate-descent trainer.
//!
//! Each coordinate update fixes every coefficient but `alpha_k`, builds the
//! exact per-instance loss as a function of `alpha_k` over the initial
//! interval, sums the losses and moves `alpha_k` to a minimizer (keeping the
//! current value when it is already optimal).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapter::{assemble_loss, construct_coordinate, Adapter, LossMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::piecewise::{Interval, PiecewiseFn};
use crate::problem::Scoring;

/// Tolerance under which the current coefficient counts as optimal.
pub const KEEP_CURRENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub alpha: Vec<f64>,
}

impl LinearModel {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("model coefficients must be finite".into()));
        }
        Ok(LinearModel { alpha })
    }

    pub fn predict(&self, features: &[Vec<f64>]) -> Result<Vec<f64>> {
        predict(features, &self.alpha)
    }
}

/// `A alpha` for a `t x m` feature matrix.
pub fn predict(features: &[Vec<f64>], alpha: &[f64]) -> Result<Vec<f64>> {
    features
        .iter()
        .map(|row| {
            if row.len() != alpha.len() {
                return Err(Error::Dimension(format!("feature row of width {} for {} coefficients", row.len(), alpha.len())));
            }
            Ok(row.iter().zip(alpha).map(|(x, a)| x * a).sum())
        })
        .collect()
}

/// Ridge regression on all feature rows of all instances pooled:
/// `min |X alpha - y|^2 + lambda |alpha|^2`.
pub fn fit_ridge(ds: &Dataset, lambda: f64) -> Result<LinearModel> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("ridge lambda must be nonnegative, got {lambda}")));
    }
    let m = ds.num_features();
    let mut xtx = DMatrix::<f64>::zeros(m, m);
    let mut xty = DVector::<f64>::zeros(m);
    for inst in &ds.instances {
        for (row, &y) in inst.features.iter().zip(&inst.theta) {
            if row.len() != m {
                return Err(Error::Dimension(format!("feature row of width {}, expected {m}", row.len())));
            }
            let x = DVector::from_column_slice(row);
            xtx.ger(1.0, &x, &x, 1.0);
            xty.axpy(y, &x, 1.0);
        }
    }
    for j in 0..m {
        xtx[(j, j)] += lambda;
    }
    let scale = (0..m).map(|j| xtx[(j, j)].abs()).fold(0.0, f64::max);
    let chol = xtx.cholesky().ok_or(Error::SingularNormalMatrix)?;
    let l = chol.l_dirty();
    let min_pivot = (0..m).map(|j| l[(j, j)] * l[(j, j)]).fold(f64::INFINITY, f64::min);
    if m > 0 && !(min_pivot > 1e-12 * scale) {
        return Err(Error::SingularNormalMatrix);
    }
    LinearModel::new(chol.solve(&xty).iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Init {
    Ridge,
    Ones,
    /// Uniform on `[0, 1)`.
    SeededRandom(u64),
    Fixed(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub i0: Interval,
    pub max_passes: usize,
    pub tol: f64,
    pub grid_n: usize,
    pub init: Init,
    pub loss_mode: LossMode,
    pub ridge_lambda: f64,
    /// Stop before the next coordinate update once this many seconds passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_secs: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            i0: Interval { lo: -1000.0, hi: 1000.0 },
            max_passes: 20,
            tol: 1e-6,
            grid_n: 1000,
            init: Init::Ridge,
            loss_mode: LossMode::PostHoc,
            ridge_lambda: 1e-6,
            time_budget_secs: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.i0.ensure_bounded()?;
        if self.grid_n < 2 {
            return Err(Error::InvalidArgument(format!("grid_n must be at least 2, got {}", self.grid_n)));
        }
        if self.max_passes < 1 {
            return Err(Error::InvalidArgument("max_passes must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be nonnegative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// A trained model with its configuration and the mean training loss before
/// training followed by the value after every coordinate update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub alpha: Vec<f64>,
    pub config: TrainConfig,
    pub loss_history: Vec<f64>,
}

impl TrainedModel {
    pub fn model(&self) -> LinearModel {
        LinearModel { alpha: self.alpha.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// What happened in one coordinate update.
#[derive(Debug)]
pub struct UpdateEvent<'a> {
    pub pass: usize,
    pub k: usize,
    /// Summed (not averaged) training loss as a function of `alpha_k`.
    pub loss: &'a PiecewiseFn,
    pub previous: f64,
    pub chosen: f64,
    pub mean_loss: f64,
}

/// Minimizer of `loss`, preferring `current` when it is optimal.
pub fn pick_representative(loss: &PiecewiseFn, current: f64, grid_n: usize) -> Result<f64> {
    let (gamma, best) = loss.argmin(grid_n)?;
    if loss.domain().contains(current) && loss.eval(current)? <= best + KEEP_CURRENT_TOL {
        Ok(current)
    } else {
        Ok(gamma)
    }
}

/// Per-instance loss of a point prediction in the given mode.
pub fn instance_loss(adapter: &dyn Adapter, theta_hat: &[f64], theta: &[f64], tov: f64, mode: LossMode) -> Result<f64> {
    match mode {
        LossMode::PostHoc => adapter.posthoc_regret(theta_hat, theta, tov),
        LossMode::PlainRegret => Ok((adapter.true_optimal_value(theta_hat)? - tov).abs()),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn initial_alpha(train: &Dataset, init: &Init, ridge_lambda: f64) -> Result<Vec<f64>> {
    let m = train.num_features();
    let alpha = match init {
        Init::Ridge => fit_ridge(train, ridge_lambda)?.alpha,
        Init::Ones => vec![1.0; m],
        Init::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..m).map(|_| rng.random::<f64>()).collect()
        }
        Init::Fixed(a) => {
            if a.len() != m {
                return Err(Error::Dimension(format!("{} initial coefficients for {m} features", a.len())));
            }
            a.clone()
        }
    };
    Ok(alpha)
}

pub fn train(scoring: &Scoring, train: &Dataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    train_observed(scoring, train, cfg, |_| {})
}

/// [`train`], reporting every coordinate update to `observe`.
pub fn train_observed(
    scoring: &Scoring,
    train: &Dataset,
    cfg: &TrainConfig,
    mut observe: impl FnMut(&UpdateEvent<'_>),
) -> Result<TrainedModel> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    train.validate()?;
    let started = Instant::now();
    let adapters = scoring.adapters(&train.problem, &train.instances)?;
    let insts = &train.instances;
    let tovs: Vec<f64> = adapters
        .par_iter()
        .zip(insts.par_iter())
        .enumerate()
        .map(|(i, (a, inst))| a.true_optimal_value(&inst.theta).map_err(|e| e.at_instance(i)))
        .collect::<Result<_>>()?;

    let mut alpha = initial_alpha(train, &cfg.init, cfg.ridge_lambda)?;
    let m = alpha.len();
    let n = insts.len() as f64;
    let point_losses = |alpha: &[f64]| -> Result<Vec<f64>> {
        adapters
            .par_iter()
            .zip(insts.par_iter())
            .zip(tovs.par_iter())
            .enumerate()
            .map(|(i, ((a, inst), &tov))| {
                let theta_hat = predict(&inst.features, alpha)?;
                instance_loss(a.as_ref(), &theta_hat, &inst.theta, tov, cfg.loss_mode).map_err(|e| e.at_instance(i))
            })
            .collect()
    };
    let mut current = mean(&point_losses(&alpha)?);
    let mut history = vec![current];

    'passes: for pass in 0..cfg.max_passes {
        let pass_start = current;
        for k in 0..m {
            if let Some(budget) = cfg.time_budget_secs {
                if started.elapsed().as_secs_f64() >= budget {
                    break 'passes;
                }
            }
            let i0 = cfg.i0.hull_with(alpha[k]);
            let losses: Vec<PiecewiseFn> = adapters
                .par_iter()
                .zip(insts.par_iter())
                .zip(tovs.par_iter())
                .enumerate()
                .map(|(i, ((a, inst), &tov))| {
                    let params = construct_coordinate(&inst.features, &alpha, k)?;
                    a.loss(&params, &inst.theta, tov, i0, cfg.loss_mode)
                        .map_err(|e| e.at_instance(i))
                })
                .collect::<Result<_>>()?;
            let total = assemble_loss(&losses, cfg.grid_n)?;
            let previous = alpha[k];
            let chosen = pick_representative(&total, previous, cfg.grid_n)?;
            alpha[k] = chosen;
            current = total.eval(chosen)? / n;
            history.push(current);
            observe(&UpdateEvent {
                pass,
                k,
                loss: &total,
                previous,
                chosen,
                mean_loss: current,
            });
        }
        if pass_start - current <= cfg.tol * pass_start.abs() {
            break;
        }
    }
    Ok(TrainedModel {
        alpha,
        config: cfg.clone(),
        loss_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{Segment, SegmentKind};

    #[test]
    fn predict_examples() {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(predict(&eye, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(predict(&eye, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(predict(&eye, &[1.0]).is_err());
    }

    #[test]
    fn representative_rules() {
        let dom = Interval::new(0.0, 4.0).unwrap();
        let flat = PiecewiseFn::constant(dom, 5.0);
        assert_eq!(pick_representative(&flat, 0.3, 100).unwrap(), 0.3);
        let step = PiecewiseFn::from_segments(vec![
            Segment::new(0.0, 2.0, SegmentKind::Constant(1.0)),
            Segment::new(2.0, 4.0, SegmentKind::Constant(0.0)),
        ])
        .unwrap();
        assert_eq!(pick_representative(&step, 1.0, 100).unwrap(), 3.0);
        assert_eq!(pick_representative(&step, 2.5, 100).unwrap(), 2.5);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig { grid_n: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = TrainConfig { i0: Interval::new(0.0, f64::INFINITY).unwrap(), ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
