//! Maximum flow with unknown edge capacities.
//!
//! Convert runs Edmonds-Karp symbolically: residual capacities are affine in
//! the free coefficient, and the interval is split wherever the set of
//! traversable arcs or the bottleneck arc of an augmenting path changes. On
//! every final piece the sequence of augmenting paths is fixed and each path
//! carries a flow that is affine in the free coefficient.
//!
//! Two corrections are provided. Scaling (`A`) shrinks the estimated flow by
//! the largest factor in `[0, 1]` that fits the true capacities; its
//! corrected objective is rational-linear. Re-augmentation (`B`) pushes the
//! estimated paths again, in augmentation order, through the true residual
//! network; paths that can no longer carry flow are "wasted" and may be
//! charged a penalty of `K` each.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::adapter::{
    stage_loss, Adapter, ConvertPiece, CorrectPiece, LossMode, ParamVector, Sense, Stages,
};
use crate::error::{Error, Result};
use crate::oracles::maxflow_numeric;
use crate::piecewise::{lower_envelope, upper_envelope, Interval, LinearForm, PiecewiseFn, SegmentKind};

/// Arcs whose residual capacity does not exceed this are not traversable.
pub const RESIDUAL_EPS: f64 = 1e-9;

/// Directed network whose edge `i` has unknown capacity `theta[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork")]
pub struct FlowNetwork {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawNetwork {
    n: usize,
    s: usize,
    t: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawNetwork> for FlowNetwork {
    type Error = Error;

    fn try_from(r: RawNetwork) -> Result<Self> {
        FlowNetwork::new(r.n, r.s, r.t, r.edges)
    }
}

impl FlowNetwork {
    pub fn new(n: usize, s: usize, t: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if s >= n || t >= n {
            return Err(Error::InvalidNetwork(format!("terminals {s}, {t} out of range for {n} vertices")));
        }
        if s == t {
            return Err(Error::InvalidNetwork("source equals sink".into()));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidNetwork(format!("edge {i} ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidNetwork(format!("edge {i} is a self-loop on {u}")));
            }
        }
        Ok(FlowNetwork { n, s, t, edges })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Residual arc numbering and the deterministic exploration order shared by
/// the symbolic and numeric Edmonds-Karp: arc `2e` is edge `e` forwards, arc
/// `2e + 1` its reverse; each vertex scans its arcs by head vertex, then arc id.
#[derive(Clone, Debug)]
pub(crate) struct ResidualLayout {
    pub adj: Vec<Vec<usize>>,
    pub head: Vec<usize>,
    pub s: usize,
    pub t: usize,
}

impl ResidualLayout {
    pub fn new(net: &FlowNetwork) -> Self {
        let mut adj = vec![Vec::new(); net.n];
        let mut head = Vec::with_capacity(2 * net.edges.len());
        for (e, &(u, v)) in net.edges.iter().enumerate() {
            adj[u].push(2 * e);
            adj[v].push(2 * e + 1);
            head.push(v);
            head.push(u);
        }
        for arcs in &mut adj {
            arcs.sort_by_key(|&a| (head[a], a));
        }
        ResidualLayout { adj, head, s: net.s, t: net.t }
    }

    /// Shortest augmenting path as a list of arcs, or `None` if the sink is
    /// unreachable through usable arcs.
    pub fn bfs(&self, usable: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let n = self.adj.len();
        let mut parent_arc = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[self.s] = true;
        let mut queue = VecDeque::from([self.s]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let v = self.head[arc];
                if seen[v] || !usable(arc) {
                    continue;
                }
                seen[v] = true;
                parent_arc[v] = arc;
                if v == self.t {
                    let mut path = Vec::new();
                    let mut cur = self.t;
                    while cur != self.s {
                        let a = parent_arc[cur];
                        path.push(a);
                        cur = self.head[a ^ 1];
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }
}

/// Net flow each arc list pushes through each edge, given per-path amounts.
pub(crate) fn net_edge_flows(num_edges: usize, paths: &[Vec<usize>], amounts: &[f64]) -> Vec<f64> {
    let mut flows = vec![0.0; num_edges];
    for (arcs, &amount) in paths.iter().zip(amounts) {
        for &arc in arcs {
            if arc & 1 == 0 {
                flows[arc / 2] += amount;
            } else {
                flows[arc / 2] -= amount;
            }
        }
    }
    flows
}

/// One augmenting path with a flow affine in the free coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PathFlow {
    pub arcs: Vec<usize>,
    pub flow: LinearForm,
}

/// The estimated solution on one Convert piece: augmenting paths in the order
/// Edmonds-Karp found them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathFlowPlan {
    pub paths: Vec<PathFlow>,
}

impl PathFlowPlan {
    /// Total flow value.
    pub fn value(&self) -> LinearForm {
        self.paths
            .iter()
            .fold(LinearForm::ZERO, |acc, p| acc.add(&p.flow))
    }

    /// Net load of every edge as an affine form.
    pub fn edge_loads(&self, num_edges: usize) -> Vec<LinearForm> {
        let mut loads = vec![LinearForm::ZERO; num_edges];
        for p in &self.paths {
            for &arc in &p.arcs {
                let e = arc / 2;
                loads[e] = if arc & 1 == 0 {
                    loads[e].add(&p.flow)
                } else {
                    loads[e].sub(&p.flow)
                };
            }
        }
        loads
    }

    pub fn edge_flows_at(&self, num_edges: usize, x: f64) -> Vec<f64> {
        self.edge_loads(num_edges).iter().map(|l| l.eval(x)).collect()
    }

    pub fn arc_lists(&self) -> Vec<Vec<usize>> {
        self.paths.iter().map(|p| p.arcs.clone()).collect()
    }
}

/// Correction A's scaling factor on a Correct piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowScale {
    /// The estimated flow already fits.
    Unit,
    /// `capacity / load(x)` of the binding edge.
    Ratio { edge: usize, capacity: f64, load: LinearForm },
    /// Some loaded edge has no true capacity at all.
    Zero,
}

impl FlowScale {
    pub fn factor(&self, x: f64) -> f64 {
        match *self {
            FlowScale::Unit => 1.0,
            FlowScale::Ratio { capacity, load, .. } => capacity / load.eval(x),
            FlowScale::Zero => 0.0,
        }
    }
}

/// Result of re-augmenting a plan's paths under the true capacities.
#[derive(Clone, Debug, PartialEq)]
pub struct Reaugmented {
    pub path_flows: Vec<f64>,
    pub edge_flows: Vec<f64>,
    pub value: f64,
    pub wasted: usize,
}

/// Corrected solution descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum CorrectedFlow {
    Scaled { plan: PathFlowPlan, scale: FlowScale },
    Reaugmented(Reaugmented),
}

impl CorrectedFlow {
    /// Concrete edge flows at the free coefficient `x`.
    pub fn edge_flows_at(&self, num_edges: usize, x: f64) -> Vec<f64> {
        match self {
            CorrectedFlow::Scaled { plan, scale } => {
                let lambda = scale.factor(x);
                plan.edge_flows_at(num_edges, x).into_iter().map(|f| f * lambda).collect()
            }
            CorrectedFlow::Reaugmented(r) => r.edge_flows.clone(),
        }
    }

    pub fn scale_at(&self, x: f64) -> Option<f64> {
        match self {
            CorrectedFlow::Scaled { scale, .. } => Some(scale.factor(x)),
            CorrectedFlow::Reaugmented(_) => None,
        }
    }
}

struct Frame {
    interval: Interval,
    residual: Vec<LinearForm>,
    plan: Vec<PathFlow>,
}

/// Symbolic Edmonds-Karp over `i0`.
///
/// Estimated capacities that are nonpositive on part of the interval make
/// the edge absent there.
pub fn convert_maxflow(net: &FlowNetwork, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<PathFlowPlan>>> {
    convert_with_layout(net, &ResidualLayout::new(net), params, i0)
}

pub(crate) fn convert_with_layout(
    net: &FlowNetwork,
    layout: &ResidualLayout,
    params: &ParamVector,
    i0: Interval,
) -> Result<Vec<ConvertPiece<PathFlowPlan>>> {
    i0.ensure_bounded()?;
    if params.len() != net.num_edges() {
        return Err(Error::Dimension(format!(
            "{} capacity parameters for {} edges",
            params.len(),
            net.num_edges()
        )));
    }
    let mut residual = Vec::with_capacity(2 * net.num_edges());
    for form in params.forms() {
        residual.push(form);
        residual.push(LinearForm::ZERO);
    }
    let mut out = Vec::new();
    let mut stack = vec![Frame {
        interval: i0,
        residual,
        plan: Vec::new(),
    }];
    while let Some(frame) = stack.pop() {
        let Frame { interval, residual, plan } = frame;

        let mut roots: Vec<f64> = residual.iter().filter_map(|r| r.interior_root(interval)).collect();
        if !roots.is_empty() {
            roots.sort_by(|a, b| a.total_cmp(b));
            roots.dedup_by(|a, b| (*a - *b).abs() <= crate::piecewise::BREAKPOINT_TOL * (1.0 + b.abs()));
            let mut cuts = vec![interval.lo];
            cuts.extend(roots);
            cuts.push(interval.hi);
            for w in cuts.windows(2).rev() {
                stack.push(Frame {
                    interval: Interval { lo: w[0], hi: w[1] },
                    residual: residual.clone(),
                    plan: plan.clone(),
                });
            }
            continue;
        }

        let mid = interval.midpoint();
        let Some(path) = layout.bfs(|arc| residual[arc].eval(mid) > RESIDUAL_EPS) else {
            let plan = PathFlowPlan { paths: plan };
            out.push(ConvertPiece {
                interval,
                objective: plan.value().to_segment(),
                solution: plan,
            });
            continue;
        };

        let mut by_id = path.clone();
        by_id.sort_unstable();
        let lines: Vec<LinearForm> = by_id.iter().map(|&a| residual[a]).collect();
        let sections = lower_envelope(&lines, interval);
        for &(sub, idx) in sections.iter().rev() {
            let bottleneck_arc = by_id[idx];
            let flow = residual[bottleneck_arc];
            let mut next = residual.clone();
            for &arc in &path {
                next[arc] = next[arc].sub(&flow);
                next[arc ^ 1] = next[arc ^ 1].add(&flow);
            }
            next[bottleneck_arc] = LinearForm::ZERO;
            let mut next_plan = plan.clone();
            next_plan.push(PathFlow {
                arcs: path.clone(),
                flow,
            });
            stack.push(Frame {
                interval: sub,
                residual: next,
                plan: next_plan,
            });
        }
    }
    Ok(out)
}

/// Correction A on one Convert piece: scale the estimated flow by
/// `min(1, min_e theta_e / load_e(x))`.
pub fn correct_scale(piece: &ConvertPiece<PathFlowPlan>, num_edges: usize, theta: &[f64]) -> Result<Vec<CorrectPiece<CorrectedFlow>>> {
    if theta.len() != num_edges {
        return Err(Error::Dimension(format!("{} true capacities for {num_edges} edges", theta.len())));
    }
    let plan = &piece.solution;
    let value = plan.value();
    let iv = piece.interval;
    let loads = plan.edge_loads(num_edges);
    let scale = |l: &LinearForm| l.eval(iv.lo).abs().max(l.eval(iv.hi).abs());
    let loaded: Vec<usize> = (0..num_edges).filter(|&e| scale(&loads[e]) > 1e-12).collect();

    let make = |sub: Interval, kind: SegmentKind, s: FlowScale| CorrectPiece {
        interval: sub,
        corrected_objective: kind,
        corrected_solution: CorrectedFlow::Scaled {
            plan: plan.clone(),
            scale: s,
        },
        penalty: SegmentKind::Constant(0.0),
    };

    if loaded.iter().any(|&e| theta[e] <= 0.0) {
        return Ok(vec![make(iv, SegmentKind::Constant(0.0), FlowScale::Zero)]);
    }

    // utilisation load_e / theta_e; the constant line 1 stands for lambda = 1
    let mut lines = vec![LinearForm::constant(1.0)];
    lines.extend(loaded.iter().map(|&e| loads[e].scale(1.0 / theta[e])));
    Ok(upper_envelope(&lines, iv)
        .into_iter()
        .map(|(sub, idx)| {
            if idx == 0 {
                make(sub, value.to_segment(), FlowScale::Unit)
            } else {
                let e = loaded[idx - 1];
                let kind = SegmentKind::rational(
                    theta[e] * value.slope,
                    theta[e] * value.intercept,
                    loads[e].slope,
                    loads[e].intercept,
                );
                make(
                    sub,
                    kind,
                    FlowScale::Ratio {
                        edge: e,
                        capacity: theta[e],
                        load: loads[e],
                    },
                )
            }
        })
        .collect())
}

/// Pushes `paths` in order through the residual network of `theta`; each path
/// carries its true bottleneck, and paths whose bottleneck is zero count as
/// wasted.
pub fn reaugment(num_edges: usize, paths: &[Vec<usize>], theta: &[f64]) -> Reaugmented {
    let mut residual = vec![0.0; 2 * num_edges];
    for (e, &c) in theta.iter().enumerate() {
        residual[2 * e] = c.max(0.0);
    }
    let mut path_flows = Vec::with_capacity(paths.len());
    let mut wasted = 0;
    for arcs in paths {
        let bottleneck = arcs.iter().map(|&a| residual[a]).fold(f64::INFINITY, f64::min);
        if !(bottleneck > RESIDUAL_EPS) {
            wasted += 1;
            path_flows.push(0.0);
            continue;
        }
        for &a in arcs {
            residual[a] -= bottleneck;
            residual[a ^ 1] += bottleneck;
        }
        path_flows.push(bottleneck);
    }
    let edge_flows = net_edge_flows(num_edges, paths, &path_flows);
    Reaugmented {
        value: path_flows.iter().sum(),
        path_flows,
        edge_flows,
        wasted,
    }
}

/// Correction B on one Convert piece. The result does not depend on the free
/// coefficient, so it yields a single constant piece.
pub fn correct_reaugment(piece: &ConvertPiece<PathFlowPlan>, num_edges: usize, theta: &[f64]) -> Result<CorrectPiece<CorrectedFlow>> {
    if theta.len() != num_edges {
        return Err(Error::Dimension(format!("{} true capacities for {num_edges} edges", theta.len())));
    }
    let r = reaugment(num_edges, &piece.solution.arc_lists(), theta);
    Ok(CorrectPiece {
        interval: piece.interval,
        corrected_objective: SegmentKind::Constant(r.value),
        corrected_solution: CorrectedFlow::Reaugmented(r),
        penalty: SegmentKind::Constant(0.0),
    })
}

/// Penalty I: `k` units of flow per wasted path.
pub fn penalty_wasted(corrected: &Reaugmented, k: f64) -> Result<SegmentKind> {
    if !(k >= 0.0) {
        return Err(Error::InvalidArgument(format!("penalty K must be nonnegative, got {k}")));
    }
    Ok(SegmentKind::Constant(k * corrected.wasted as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlowCorrection {
    /// Correction A.
    Scale,
    /// Correction B, optionally with penalty I of `k` per wasted path.
    Reaugment { k: Option<f64> },
}

/// Max-flow problem adapter.
#[derive(Clone, Debug)]
pub struct MaxFlowAdapter {
    net: FlowNetwork,
    layout: ResidualLayout,
    correction: FlowCorrection,
}

impl MaxFlowAdapter {
    pub fn new(net: FlowNetwork, correction: FlowCorrection) -> Result<Self> {
        if let FlowCorrection::Reaugment { k: Some(k) } = correction {
            if !(k >= 0.0) {
                return Err(Error::InvalidArgument(format!("penalty K must be nonnegative, got {k}")));
            }
        }
        let layout = ResidualLayout::new(&net);
        Ok(MaxFlowAdapter { net, layout, correction })
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.net
    }

    /// Numeric counterpart of Correct for a point estimate: returns the
    /// corrected flow value, the penalty and the corrected edge flows.
    pub fn correct_numeric(&self, theta_hat: &[f64], theta: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
        let m = self.net.num_edges();
        let est = maxflow_numeric(&self.net, theta_hat)?;
        match self.correction {
            FlowCorrection::Scale => {
                let flows = &est.solution.edge_flows;
                let mut lambda: f64 = 1.0;
                for e in 0..m {
                    if flows[e] > 1e-12 {
                        lambda = lambda.min(if theta[e] > 0.0 { theta[e] / flows[e] } else { 0.0 });
                    }
                }
                let corrected: Vec<f64> = flows.iter().map(|f| f * lambda).collect();
                Ok((lambda * est.optimal_value, 0.0, corrected))
            }
            FlowCorrection::Reaugment { k } => {
                let r = reaugment(m, &est.solution.arc_lists(), theta);
                let pen = k.unwrap_or(0.0) * r.wasted as f64;
                Ok((r.value, pen, r.edge_flows))
            }
        }
    }
}

impl Stages for MaxFlowAdapter {
    type Solution = PathFlowPlan;
    type Corrected = CorrectedFlow;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn convert(&self, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<PathFlowPlan>>> {
        convert_with_layout(&self.net, &self.layout, params, i0)
    }

    fn correct(&self, pieces: &[ConvertPiece<PathFlowPlan>], theta: &[f64]) -> Result<Vec<CorrectPiece<CorrectedFlow>>> {
        let m = self.net.num_edges();
        let mut out = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match self.correction {
                FlowCorrection::Scale => out.extend(correct_scale(piece, m, theta)?),
                FlowCorrection::Reaugment { k } => {
                    let mut c = correct_reaugment(piece, m, theta)?;
                    if let (Some(k), CorrectedFlow::Reaugmented(r)) = (k, &c.corrected_solution) {
                        c.penalty = penalty_wasted(r, k)?;
                    }
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}

impl Adapter for MaxFlowAdapter {
    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn num_params(&self) -> usize {
        self.net.num_edges()
    }

    fn true_optimal_value(&self, theta: &[f64]) -> Result<f64> {
        Ok(maxflow_numeric(&self.net, theta)?.optimal_value)
    }

    fn loss(&self, params: &ParamVector, theta: &[f64], tov: f64, i0: Interval, mode: LossMode) -> Result<PiecewiseFn> {
        stage_loss(self, params, theta, tov, i0, mode)
    }

    fn posthoc_regret(&self, theta_hat: &[f64], theta: &[f64], tov: f64) -> Result<f64> {
        let (value, pen, _) = self.correct_numeric(theta_hat, theta)?;
        Ok(tov - value + pen)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::estimated_objective;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn single_edge() -> FlowNetwork {
        FlowNetwork::new(2, 0, 1, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn network_validation() {
        assert!(FlowNetwork::new(2, 0, 0, vec![]).is_err());
        assert!(FlowNetwork::new(2, 0, 1, vec![(1, 1)]).is_err());
        assert!(FlowNetwork::new(2, 0, 1, vec![(0, 2)]).is_err());
        let net = FlowNetwork::from_json(r#"{"n":3,"s":0,"t":2,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(net.edges, vec![(0, 1), (1, 2)]);
        assert!(FlowNetwork::from_json(r#"{"n":3,"s":0,"t":0,"edges":[]}"#).is_err());
    }

    #[test]
    fn single_edge_convert() {
        let p = ParamVector::new(vec![1.0], vec![0.0]).unwrap();
        let pieces = convert_maxflow(&single_edge(), &p, iv(1.0, 5.0)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].objective, SegmentKind::linear(1.0, 0.0));
        assert_eq!(pieces[0].solution.paths.len(), 1);
        assert_eq!(pieces[0].solution.paths[0].arcs, vec![0]);
        assert_eq!(pieces[0].solution.paths[0].flow, LinearForm::new(1.0, 0.0));
    }

    #[test]
    fn parallel_edges_sum() {
        let net = FlowNetwork::new(2, 0, 1, vec![(0, 1), (0, 1)]).unwrap();
        let p = ParamVector::new(vec![1.0, 0.0], vec![0.0, 4.0]).unwrap();
        let pieces = convert_maxflow(&net, &p, iv(0.0, 10.0)).unwrap();
        let e = estimated_objective(&pieces).unwrap();
        assert_eq!(e.segments().len(), 1);
        assert_eq!(e.segments()[0].kind, SegmentKind::linear(1.0, 4.0));
    }

    #[test]
    fn negative_capacity_is_absent() {
        let p = ParamVector::new(vec![1.0], vec![0.0]).unwrap();
        let pieces = convert_maxflow(&single_edge(), &p, iv(-2.0, 3.0)).unwrap();
        let e = estimated_objective(&pieces).unwrap();
        assert_eq!(e.eval(-1.0).unwrap(), 0.0);
        assert_eq!(e.eval(2.0).unwrap(), 2.0);
    }

    #[test]
    fn unbounded_interval_rejected() {
        let p = ParamVector::new(vec![1.0], vec![0.0]).unwrap();
        let r = convert_maxflow(&single_edge(), &p, Interval::new(0.0, f64::INFINITY).unwrap());
        assert!(matches!(r, Err(Error::Unbounded(..))));
    }

    #[test]
    fn scale_correction_single_edge() {
        let p = ParamVector::new(vec![1.0], vec![0.0]).unwrap();
        let pieces = convert_maxflow(&single_edge(), &p, iv(1.0, 5.0)).unwrap();
        let corrected = correct_scale(&pieces[0], 1, &[2.0]).unwrap();
        assert_eq!(corrected.len(), 2);
        assert_eq!(corrected[0].interval, iv(1.0, 2.0));
        assert_eq!(corrected[0].corrected_objective, SegmentKind::linear(1.0, 0.0));
        assert_eq!(corrected[1].interval, iv(2.0, 5.0));
        assert_eq!(corrected[1].corrected_objective, SegmentKind::Constant(2.0));
    }

    #[test]
    fn scale_correction_two_edge_path() {
        let net = FlowNetwork::new(3, 0, 2, vec![(0, 1), (1, 2)]).unwrap();
        let p = ParamVector::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let pieces = convert_maxflow(&net, &p, iv(0.0, 5.0)).unwrap();
        let corrected: Vec<_> = pieces
            .iter()
            .flat_map(|pc| correct_scale(pc, 2, &[3.0, 1.0]).unwrap())
            .collect();
        for j in 0..100 {
            let x = 0.025 + 0.05 * j as f64;
            let c = corrected.iter().find(|c| c.interval.contains(x)).unwrap();
            let brute = x.min(1.0);
            assert!((c.corrected_objective.eval(x) - brute).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn reaugment_wastes_blocked_paths() {
        // two s-t paths share edge 0 -> 1 whose true capacity is zero
        let net = FlowNetwork::new(4, 0, 3, vec![(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let paths = vec![vec![0, 6], vec![0, 2, 4]];
        let r = reaugment(net.num_edges(), &paths, &[0.0, 5.0, 5.0, 5.0]);
        assert_eq!(r.wasted, 2);
        assert_eq!(r.value, 0.0);
        let r = reaugment(net.num_edges(), &paths, &[3.0, 5.0, 5.0, 2.0]);
        assert_eq!(r.path_flows, vec![2.0, 1.0]);
        assert_eq!(r.wasted, 0);
        let r = reaugment(net.num_edges(), &paths, &[2.0, 5.0, 5.0, 2.0]);
        assert_eq!(r.wasted, 1);
        assert_eq!(penalty_wasted(&r, 10.0).unwrap(), SegmentKind::Constant(10.0));
    }

    #[test]
    fn penalty_rejects_negative_k() {
        let r = reaugment(1, &[vec![0]], &[1.0]);
        assert_eq!(penalty_wasted(&r, 0.0).unwrap(), SegmentKind::Constant(0.0));
        assert!(penalty_wasted(&r, -1.0).is_err());
        assert!(MaxFlowAdapter::new(single_edge(), FlowCorrection::Reaugment { k: Some(-2.0) }).is_err());
    }
}
