//! 0-1 knapsack with known values and unknown item weights.
//!
//! With weights affine in the free coefficient, the total weight of a fixed
//! subset is affine too, so every subset is feasible on a single interval.
//! Convert enumerates subsets by branching (pruned against the best subset
//! that is feasible everywhere) and paints the interval with the most
//! valuable feasible subset, giving a piecewise-constant objective.

use serde::{Deserialize, Serialize};

use crate::adapter::{
    stage_loss, Adapter, ConvertPiece, CorrectPiece, LossMode, ParamVector, Sense, Stages,
};
use crate::error::{Error, Result};
use crate::oracles::knapsack_exhaustive;
use crate::piecewise::{Interval, LinearForm, PiecewiseFn, SegmentKind, BREAKPOINT_TOL};

pub const MAX_ITEMS: usize = 25;

/// Items with known values sharing one knapsack of known capacity. Item `i`
/// has unknown weight `theta[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKnapsack")]
pub struct KnapsackInstance {
    pub values: Vec<f64>,
    pub capacity: f64,
}

#[derive(Deserialize)]
struct RawKnapsack {
    values: Vec<f64>,
    capacity: f64,
}

impl TryFrom<RawKnapsack> for KnapsackInstance {
    type Error = Error;

    fn try_from(r: RawKnapsack) -> Result<Self> {
        KnapsackInstance::new(r.values, r.capacity)
    }
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, capacity: f64) -> Result<Self> {
        if values.len() > MAX_ITEMS {
            return Err(Error::InvalidKnapsack(format!(
                "{} items exceeds the limit of {MAX_ITEMS}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidKnapsack(format!("item value {v} must be finite and nonnegative")));
        }
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(Error::InvalidKnapsack(format!("capacity {capacity} must be positive")));
        }
        Ok(KnapsackInstance { values, capacity })
    }

    pub fn n_items(&self) -> usize {
        self.values.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Value of `mask`, summed in item order.
    pub fn value_of(&self, mask: u32) -> f64 {
        subset_sum(&self.values, mask)
    }
}

/// Sum of `xs[i]` over the bits of `mask`, in index order.
pub(crate) fn subset_sum(xs: &[f64], mask: u32) -> f64 {
    let mut s = 0.0;
    for (i, x) in xs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            s += x;
        }
    }
    s
}

/// Bitset over items; bit `i` selects item `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemSubset(pub u32);

impl ItemSubset {
    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(|&i| self.contains(i))
    }
}

struct Candidate {
    value: f64,
    mask: u32,
    lo: f64,
    hi: f64,
}

struct Search<'a> {
    values: &'a [f64],
    weights: Vec<LinearForm>,
    capacity: f64,
    dom: Interval,
    suffix_value: Vec<f64>,
    suffix_neg: Vec<f64>,
    best_full: f64,
    candidates: Vec<Candidate>,
}

impl Search<'_> {
    fn feasible_interval(&self, w: LinearForm) -> Option<(f64, f64)> {
        let (lo, hi) = (self.dom.lo, self.dom.hi);
        let slack = LinearForm::new(-w.slope, self.capacity - w.intercept);
        let (wl, wh) = (w.eval(lo), w.eval(hi));
        if wl <= self.capacity && wh <= self.capacity {
            return Some((lo, hi));
        }
        if wl > self.capacity && wh > self.capacity {
            return None;
        }
        let r = slack.root()?.clamp(lo, hi);
        if w.slope > 0.0 {
            Some((lo, r))
        } else {
            Some((r, hi))
        }
    }

    fn dfs(&mut self, i: usize, mask: u32, value: f64, weight: LinearForm) {
        if value + self.suffix_value[i] < self.best_full {
            return;
        }
        let min_w = weight.eval(self.dom.lo).min(weight.eval(self.dom.hi));
        if min_w + self.suffix_neg[i] > self.capacity {
            return;
        }
        if i == self.values.len() {
            if let Some((lo, hi)) = self.feasible_interval(weight) {
                if (lo, hi) == (self.dom.lo, self.dom.hi) {
                    self.best_full = self.best_full.max(value);
                }
                if hi - lo >= BREAKPOINT_TOL || (lo, hi) == (self.dom.lo, self.dom.hi) {
                    self.candidates.push(Candidate { value, mask, lo, hi });
                }
            }
            return;
        }
        self.dfs(i + 1, mask | 1 << i, value + self.values[i], weight.add(&self.weights[i]));
        self.dfs(i + 1, mask, value, weight);
    }
}

/// Piecewise-constant best subset under estimated weights `params` over `i0`.
pub fn convert_knapsack(inst: &KnapsackInstance, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<ItemSubset>>> {
    i0.ensure_bounded()?;
    let n = inst.n_items();
    if params.len() != n {
        return Err(Error::Dimension(format!("{} weight parameters for {n} items", params.len())));
    }
    let weights: Vec<LinearForm> = params.forms().collect();
    let mut suffix_value = vec![0.0; n + 1];
    let mut suffix_neg = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix_value[i] = suffix_value[i + 1] + inst.values[i];
        let w = weights[i];
        suffix_neg[i] = suffix_neg[i + 1] + w.eval(i0.lo).min(w.eval(i0.hi)).min(0.0);
    }
    let mut search = Search {
        values: &inst.values,
        weights,
        capacity: inst.capacity,
        dom: i0,
        suffix_value,
        suffix_neg,
        best_full: 0.0,
        candidates: Vec::new(),
    };
    search.dfs(0, 0, 0.0, LinearForm::ZERO);
    let best_full = search.best_full;
    let mut cands = search.candidates;
    cands.retain(|c| c.value >= best_full);
    cands.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.mask.cmp(&b.mask)));

    // cell j is (cuts[j], cuts[j+1]]; the first cell is closed on the left
    let mut cuts: Vec<f64> = vec![i0.lo, i0.hi];
    for c in &cands {
        cuts.push(c.lo);
        cuts.push(c.hi);
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| *a - *b <= BREAKPOINT_TOL * (1.0 + b.abs()));
    *cuts.last_mut().unwrap() = i0.hi;
    let cells = cuts.len() - 1;
    let mut owner: Vec<Option<usize>> = vec![None; cells];
    // next[j]: first unpainted cell at index >= j (path-compressed)
    let mut next: Vec<usize> = (0..=cells).collect();
    fn find(next: &mut [usize], j: usize) -> usize {
        let mut root = j;
        while next[root] != root {
            root = next[root];
        }
        let mut cur = j;
        while next[cur] != root {
            let nx = next[cur];
            next[cur] = root;
            cur = nx;
        }
        root
    }
    let tol = |x: f64| BREAKPOINT_TOL * (1.0 + x.abs());
    let mut painted = 0;
    for (ci, c) in cands.iter().enumerate() {
        if painted == cells {
            break;
        }
        let first = cuts.partition_point(|&x| x < c.lo - tol(c.lo));
        let last = cuts.partition_point(|&x| x <= c.hi + tol(c.hi));
        // cells first..last-1 have both ends inside [lo, hi]
        let mut j = find(&mut next, first);
        while j + 1 < last {
            owner[j] = Some(ci);
            painted += 1;
            next[j] = j + 1;
            j = find(&mut next, j + 1);
        }
    }

    let mut pieces: Vec<ConvertPiece<ItemSubset>> = Vec::new();
    for j in 0..cells {
        let c = &cands[owner[j].expect("a subset feasible on all of i0 paints every cell")];
        match pieces.last_mut() {
            Some(p) if p.solution.0 == c.mask => p.interval.hi = cuts[j + 1],
            _ => pieces.push(ConvertPiece {
                interval: Interval { lo: cuts[j], hi: cuts[j + 1] },
                objective: SegmentKind::Constant(inst.value_of(c.mask)),
                solution: ItemSubset(c.mask),
            }),
        }
    }
    Ok(pieces)
}

/// Correction functions: which selected items are dropped when the estimated
/// subset overflows under the true weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnapsackCorrection {
    /// A: lowest value/weight ratio first.
    RatioAsc,
    /// B: heaviest first.
    WeightDesc,
    /// C: drop everything.
    RemoveAll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum KnapsackPenalty {
    /// I: `sigma_i * v_i` per removed item.
    Proportional(Vec<f64>),
    /// II: `K` per removed item.
    PerItem(f64),
}

impl KnapsackPenalty {
    pub fn validate(&self, n_items: usize) -> Result<()> {
        match self {
            KnapsackPenalty::Proportional(sigma) => {
                if sigma.len() != n_items {
                    return Err(Error::Dimension(format!("{} sigma entries for {n_items} items", sigma.len())));
                }
                if let Some(s) = sigma.iter().find(|s| !(**s >= 0.0)) {
                    return Err(Error::InvalidArgument(format!("sigma must be nonnegative, got {s}")));
                }
            }
            KnapsackPenalty::PerItem(k) => {
                if !(*k >= 0.0) {
                    return Err(Error::InvalidArgument(format!("penalty K must be nonnegative, got {k}")));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of correcting one subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectedSubset {
    pub kept: ItemSubset,
    pub removed: ItemSubset,
    /// Some removed-candidate had a nonpositive true weight, so its ratio
    /// used a clamped denominator.
    pub clamped: bool,
}

/// Drops items from `subset` per `mode` until it fits under `theta`.
pub fn correct_subset(inst: &KnapsackInstance, subset: ItemSubset, theta: &[f64], mode: KnapsackCorrection) -> Result<CorrectedSubset> {
    let n = inst.n_items();
    if theta.len() != n {
        return Err(Error::Dimension(format!("{} true weights for {n} items", theta.len())));
    }
    if subset.0 >> n != 0 {
        return Err(Error::MalformedSolution(format!("subset {:#b} names items beyond {n}", subset.0)));
    }
    let mut kept = subset.0;
    let mut clamped = false;
    if subset_sum(theta, kept) > inst.capacity {
        let mut order: Vec<usize> = subset.items().collect();
        match mode {
            KnapsackCorrection::RatioAsc => {
                clamped = order.iter().any(|&i| theta[i] <= 0.0);
                let ratio = |i: usize| inst.values[i] / theta[i].max(1e-12);
                order.sort_by(|&a, &b| ratio(a).total_cmp(&ratio(b)).then(a.cmp(&b)));
            }
            KnapsackCorrection::WeightDesc => {
                order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]).then(a.cmp(&b)));
            }
            KnapsackCorrection::RemoveAll => {}
        }
        if mode == KnapsackCorrection::RemoveAll {
            kept = 0;
        } else {
            for i in order {
                kept &= !(1 << i);
                if subset_sum(theta, kept) <= inst.capacity {
                    break;
                }
            }
        }
    }
    Ok(CorrectedSubset {
        kept: ItemSubset(kept),
        removed: ItemSubset(subset.0 & !kept),
        clamped,
    })
}

/// Correct stage for one Convert piece.
pub fn correct_knapsack(
    inst: &KnapsackInstance,
    piece: &ConvertPiece<ItemSubset>,
    theta: &[f64],
    mode: KnapsackCorrection,
) -> Result<CorrectPiece<CorrectedSubset>> {
    let c = correct_subset(inst, piece.solution, theta, mode)?;
    Ok(CorrectPiece {
        interval: piece.interval,
        corrected_objective: SegmentKind::Constant(inst.value_of(c.kept.0)),
        corrected_solution: c,
        penalty: SegmentKind::Constant(0.0),
    })
}

/// Penalty for the items a correction removed.
pub fn penalty_knapsack(inst: &KnapsackInstance, corrected: &CorrectedSubset, mode: &KnapsackPenalty) -> Result<SegmentKind> {
    mode.validate(inst.n_items())?;
    let removed = corrected.removed;
    let p = match mode {
        KnapsackPenalty::Proportional(sigma) => removed.items().map(|i| sigma[i] * inst.values[i]).sum(),
        KnapsackPenalty::PerItem(k) => k * removed.len() as f64,
    };
    Ok(SegmentKind::Constant(p))
}

/// Knapsack problem adapter.
#[derive(Clone, Debug)]
pub struct KnapsackAdapter {
    inst: KnapsackInstance,
    correction: KnapsackCorrection,
    penalty: Option<KnapsackPenalty>,
}

impl KnapsackAdapter {
    pub fn new(inst: KnapsackInstance, correction: KnapsackCorrection, penalty: Option<KnapsackPenalty>) -> Result<Self> {
        if let Some(p) = &penalty {
            p.validate(inst.n_items())?;
        }
        Ok(KnapsackAdapter { inst, correction, penalty })
    }

    pub fn instance(&self) -> &KnapsackInstance {
        &self.inst
    }

    fn penalty_of(&self, c: &CorrectedSubset) -> Result<f64> {
        match &self.penalty {
            Some(p) => Ok(penalty_knapsack(&self.inst, c, p)?.eval(0.0)),
            None => Ok(0.0),
        }
    }
}

impl Stages for KnapsackAdapter {
    type Solution = ItemSubset;
    type Corrected = CorrectedSubset;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn convert(&self, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<ItemSubset>>> {
        convert_knapsack(&self.inst, params, i0)
    }

    fn correct(&self, pieces: &[ConvertPiece<ItemSubset>], theta: &[f64]) -> Result<Vec<CorrectPiece<CorrectedSubset>>> {
        pieces
            .iter()
            .map(|piece| {
                let mut c = correct_knapsack(&self.inst, piece, theta, self.correction)?;
                c.penalty = SegmentKind::Constant(self.penalty_of(&c.corrected_solution)?);
                Ok(c)
            })
            .collect()
    }
}

impl Adapter for KnapsackAdapter {
    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn num_params(&self) -> usize {
        self.inst.n_items()
    }

    fn true_optimal_value(&self, theta: &[f64]) -> Result<f64> {
        Ok(knapsack_exhaustive(&self.inst.values, theta, self.inst.capacity)?.optimal_value)
    }

    fn loss(&self, params: &ParamVector, theta: &[f64], tov: f64, i0: Interval, mode: LossMode) -> Result<PiecewiseFn> {
        stage_loss(self, params, theta, tov, i0, mode)
    }

    fn posthoc_regret(&self, theta_hat: &[f64], theta: &[f64], tov: f64) -> Result<f64> {
        let est = knapsack_exhaustive(&self.inst.values, theta_hat, self.inst.capacity)?;
        let c = correct_subset(&self.inst, est.solution, theta, self.correction)?;
        Ok(tov - self.inst.value_of(c.kept.0) + self.penalty_of(&c)?)
    }
}
