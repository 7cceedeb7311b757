//! The per-instance pipeline shared by every problem: build the
//! one-coordinate parameterization, run a problem's Convert and Correct
//! stages, and turn their outputs into a post-hoc regret function of the free
//! coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{sum_all, Interval, LinearForm, PiecewiseFn, Segment, SegmentKind, BREAKPOINT_TOL};

/// Estimated parameters as affine functions of the free coefficient:
/// `theta_hat(x) = a * x + b`, componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ParamVector {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "slope vector has {} entries, intercept vector {}",
                a.len(),
                b.len()
            )));
        }
        Ok(ParamVector { a, b })
    }

    /// A parameter vector that does not depend on the free coefficient.
    pub fn fixed(theta: &[f64]) -> Self {
        ParamVector {
            a: vec![0.0; theta.len()],
            b: theta.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn form(&self, i: usize) -> LinearForm {
        LinearForm::new(self.a[i], self.b[i])
    }

    pub fn forms(&self) -> impl Iterator<Item = LinearForm> + '_ {
        self.a.iter().zip(&self.b).map(|(&a, &b)| LinearForm::new(a, b))
    }

    pub fn at(&self, x: f64) -> Vec<f64> {
        self.forms().map(|f| f.eval(x)).collect()
    }
}

/// Fixes every coefficient except `k` and returns the resulting affine
/// parameterization: `a` is column `k` of the features and `b` the
/// contribution of the other coefficients.
pub fn construct_coordinate(features: &[Vec<f64>], alpha: &[f64], k: usize) -> Result<ParamVector> {
    let m = alpha.len();
    if k >= m {
        return Err(Error::Dimension(format!("coordinate {k} out of range for {m} coefficients")));
    }
    let mut a = Vec::with_capacity(features.len());
    let mut b = Vec::with_capacity(features.len());
    for (row_idx, row) in features.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Dimension(format!(
                "feature row {row_idx} has {} entries, model has {m}",
                row.len()
            )));
        }
        a.push(row[k]);
        b.push(
            row.iter()
                .zip(alpha)
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, (x, w))| x * w)
                .sum(),
        );
    }
    Ok(ParamVector { a, b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One interval of the Convert output: the estimated objective on that
/// interval and the problem-specific estimated solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvertPiece<S> {
    pub interval: Interval,
    pub objective: SegmentKind,
    pub solution: S,
}

/// One interval of the Correct output.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectPiece<C> {
    pub interval: Interval,
    pub corrected_objective: SegmentKind,
    pub corrected_solution: C,
    pub penalty: SegmentKind,
}

/// What the trainer minimizes for each instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossMode {
    /// Corrected objective gap plus correction penalty.
    PostHoc,
    /// `|estimated optimum - true optimum|`, ignoring feasibility.
    PlainRegret,
}

/// Typed Convert/Correct stages of a problem adapter.
pub trait Stages {
    type Solution: Clone + Send + Sync;
    type Corrected: Clone + Send + Sync;

    fn sense(&self) -> Sense;

    fn convert(&self, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<Self::Solution>>>;

    fn correct(
        &self,
        pieces: &[ConvertPiece<Self::Solution>],
        theta: &[f64],
    ) -> Result<Vec<CorrectPiece<Self::Corrected>>>;
}

/// Object-safe view of a problem adapter used by the trainer and evaluator.
pub trait Adapter: Send + Sync {
    fn sense(&self) -> Sense;

    /// Number of unknown parameters.
    fn num_params(&self) -> usize;

    fn true_optimal_value(&self, theta: &[f64]) -> Result<f64>;

    /// Per-instance loss as a function of the free coefficient.
    fn loss(&self, params: &ParamVector, theta: &[f64], tov: f64, i0: Interval, mode: LossMode)
        -> Result<PiecewiseFn>;

    /// Numeric post-hoc regret of a point prediction: solve with `theta_hat`,
    /// correct under `theta`, charge the penalty.
    fn posthoc_regret(&self, theta_hat: &[f64], theta: &[f64], tov: f64) -> Result<f64>;
}

/// Shared implementation of [`Adapter::loss`] for any [`Stages`].
pub fn stage_loss<P: Stages>(
    stages: &P,
    params: &ParamVector,
    theta: &[f64],
    tov: f64,
    i0: Interval,
    mode: LossMode,
) -> Result<PiecewiseFn> {
    let pieces = stages.convert(params, i0)?;
    match mode {
        LossMode::PostHoc => {
            let corrected = stages.correct(&pieces, theta)?;
            evaluate_preg(&pieces, &corrected, tov, stages.sense())
        }
        LossMode::PlainRegret => {
            let gap = estimated_objective(&pieces)?.offset(-tov);
            gap.pointwise_max(&gap.scale(-1.0))
        }
    }
}

/// The estimated objective `E(x)` assembled from Convert pieces.
pub fn estimated_objective<S>(pieces: &[ConvertPiece<S>]) -> Result<PiecewiseFn> {
    PiecewiseFn::from_segments(
        pieces
            .iter()
            .map(|p| Segment::new(p.interval.lo, p.interval.hi, p.objective))
            .collect(),
    )
}

/// Post-hoc regret on every Correct piece.
///
/// For minimization the regret is `corrected - tov + penalty`; for
/// maximization the objective terms swap so the regret stays nonnegative.
/// Every Correct interval must lie inside a single Convert interval and the
/// Correct pieces must tile each Convert interval.
pub fn evaluate_preg<S, C>(
    convert: &[ConvertPiece<S>],
    correct: &[CorrectPiece<C>],
    tov: f64,
    sense: Sense,
) -> Result<PiecewiseFn> {
    check_refinement(convert, correct)?;
    let segments = correct
        .iter()
        .map(|c| {
            let gap = match sense {
                Sense::Minimize => c.corrected_objective.offset(-tov),
                Sense::Maximize => c.corrected_objective.scale(-1.0).offset(tov),
            };
            Ok(Segment::new(c.interval.lo, c.interval.hi, gap.add(&c.penalty)?))
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseFn::from_segments(segments)
}

fn check_refinement<S, C>(convert: &[ConvertPiece<S>], correct: &[CorrectPiece<C>]) -> Result<()> {
    if convert.is_empty() || correct.is_empty() {
        return Err(Error::PartitionMismatch("empty piece list".into()));
    }
    let close = |x: f64, y: f64| (x - y).abs() <= BREAKPOINT_TOL * (1.0 + x.abs().max(y.abs())) * 10.0;
    let mut c = 0;
    for (i, piece) in convert.iter().enumerate() {
        let mut cursor = piece.interval.lo;
        loop {
            let Some(cp) = correct.get(c) else {
                return Err(Error::PartitionMismatch(format!(
                    "convert piece {i} [{}, {}] is not fully covered",
                    piece.interval.lo, piece.interval.hi
                )));
            };
            if !close(cp.interval.lo, cursor) {
                return Err(Error::PartitionMismatch(format!(
                    "correct piece {c} starts at {} but {cursor} was expected",
                    cp.interval.lo
                )));
            }
            if cp.interval.hi > piece.interval.hi && !close(cp.interval.hi, piece.interval.hi) {
                return Err(Error::PartitionMismatch(format!(
                    "correct piece {c} ends at {} beyond convert piece {i} ending at {}",
                    cp.interval.hi, piece.interval.hi
                )));
            }
            cursor = cp.interval.hi;
            c += 1;
            if close(cursor, piece.interval.hi) {
                break;
            }
        }
    }
    if c != correct.len() {
        return Err(Error::PartitionMismatch(format!(
            "{} correct pieces lie beyond the convert partition",
            correct.len() - c
        )));
    }
    Ok(())
}

/// Sums per-instance losses.
///
/// Constant and linear operands are summed exactly. If any operand carries a
/// rational segment the sum is materialized as a step function on `grid_n`
/// equal cells, each holding the exact sum at the cell centre.
pub fn assemble_loss(per_instance: &[PiecewiseFn], grid_n: usize) -> Result<PiecewiseFn> {
    if per_instance.is_empty() {
        return Err(Error::EmptyFunction);
    }
    if !per_instance.iter().any(PiecewiseFn::has_rational) {
        return sum_all(per_instance);
    }
    if grid_n < 1 {
        return Err(Error::InvalidArgument("grid_n must be positive".into()));
    }
    let dom = per_instance[0].domain();
    dom.ensure_bounded()?;
    for f in &per_instance[1..] {
        let d = f.domain();
        if d != dom {
            return Err(Error::DomainMismatch(dom.lo, dom.hi, d.lo, d.hi));
        }
    }
    let width = dom.width() / grid_n as f64;
    let mut segments = Vec::with_capacity(grid_n);
    for j in 0..grid_n {
        let lo = dom.lo + width * j as f64;
        let hi = if j + 1 == grid_n { dom.hi } else { dom.lo + width * (j + 1) as f64 };
        let centre = 0.5 * (lo + hi);
        let mut total = 0.0;
        for f in per_instance {
            total += f.eval(centre)?;
        }
        segments.push(Segment::new(lo, hi, SegmentKind::Constant(total)));
    }
    PiecewiseFn::from_segments(segments)
}

/// Centres of the cells [`assemble_loss`] samples on.
pub fn grid_centres(dom: Interval, grid_n: usize) -> Vec<f64> {
    let width = dom.width() / grid_n as f64;
    (0..grid_n)
        .map(|j| {
            let lo = dom.lo + width * j as f64;
            let hi = if j + 1 == grid_n { dom.hi } else { dom.lo + width * (j + 1) as f64 };
            0.5 * (lo + hi)
        })
        .collect()
}
