//! Minimum cost vertex cover where the edge of smallest value need not be
//! covered. Vertex costs and edge values are both unknown: the parameter
//! vector is `costs ++ edge_values`.
//!
//! Convert first splits the interval by which edge is excluded (lower
//! envelope of the edge-value lines), then, on each part, by the signs of the
//! vertex costs, and finally takes the lower envelope of the cost lines of
//! the covers produced by branching on uncovered edges.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adapter::{
    stage_loss, Adapter, ConvertPiece, CorrectPiece, LossMode, ParamVector, Sense, Stages,
};
use crate::error::{Error, Result};
use crate::oracles::{argmin_edge, mcvc_exhaustive};
use crate::piecewise::{lower_envelope, Interval, LinearForm, PiecewiseFn, SegmentKind};

pub const MAX_VERTICES: usize = 20;

/// Undirected graph. Parameter `v < n` is the cost of vertex `v`; parameter
/// `n + e` is the value of edge `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct VcGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for VcGraph {
    type Error = Error;

    fn try_from(r: RawGraph) -> Result<Self> {
        VcGraph::new(r.n, r.edges)
    }
}

impl VcGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {i} ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop on {u}")));
            }
        }
        Ok(VcGraph { n, edges })
    }

    pub fn num_params(&self) -> usize {
        self.n + self.edges.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub(crate) fn edge_masks(&self) -> Vec<u32> {
        self.edges.iter().map(|&(u, v)| 1 << u | 1 << v).collect()
    }

    pub(crate) fn split_theta<'a>(&self, theta: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if theta.len() != self.num_params() {
            return Err(Error::Dimension(format!(
                "{} parameters for {} vertices and {} edges",
                theta.len(),
                self.n,
                self.edges.len()
            )));
        }
        Ok(theta.split_at(self.n))
    }
}

/// Picked vertices plus the edge allowed to stay uncovered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexPick {
    pub mask: u32,
    pub excluded: Option<usize>,
}

impl VertexPick {
    pub fn contains(&self, v: usize) -> bool {
        self.mask >> v & 1 == 1
    }
}

fn cost_line(costs: &[LinearForm], mask: u32) -> LinearForm {
    let mut line = LinearForm::ZERO;
    for (v, c) in costs.iter().enumerate() {
        if mask >> v & 1 == 1 {
            line = line.add(c);
        }
    }
    line
}

/// All covers of `required` edges that extend `forced` using only `free`
/// vertices and are produced by branching on the first uncovered edge:
/// take `u`, or ban `u` and take `v`.
fn branch_covers(edge_masks: &[u32], required: &[usize], forced: u32, free: u32) -> Vec<u32> {
    fn go(edges: &[u32], req: &[usize], mask: u32, banned: u32, free: u32, out: &mut Vec<u32>) {
        let Some(&e) = req.iter().find(|&&e| edges[e] & mask == 0) else {
            out.push(mask);
            return;
        };
        let ends = edges[e];
        let u = ends.trailing_zeros();
        let v = 31 - ends.leading_zeros();
        let allowed = free & !banned;
        if allowed >> u & 1 == 1 {
            go(edges, req, mask | 1 << u, banned, free, out);
        }
        if allowed >> v & 1 == 1 {
            go(edges, req, mask | 1 << v, banned | 1 << u, free, out);
        }
    }
    let mut out = Vec::new();
    go(edge_masks, required, forced, 0, free, &mut out);
    out
}

/// Piecewise-linear minimum cover cost under estimated parameters over `i0`.
pub fn convert_mcvc(g: &VcGraph, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<VertexPick>>> {
    i0.ensure_bounded()?;
    if params.len() != g.num_params() {
        return Err(Error::Dimension(format!(
            "{} parameters for {} vertices and {} edges",
            params.len(),
            g.n,
            g.edges.len()
        )));
    }
    let forms: Vec<LinearForm> = params.forms().collect();
    let (costs, values) = forms.split_at(g.n);
    let edge_masks = g.edge_masks();

    let stage1: Vec<(Interval, Option<usize>)> = if values.is_empty() {
        vec![(i0, None)]
    } else {
        lower_envelope(values, i0).into_iter().map(|(iv, e)| (iv, Some(e))).collect()
    };

    let mut pieces: Vec<ConvertPiece<VertexPick>> = Vec::new();
    for (sub, excluded) in stage1 {
        let required: Vec<usize> = (0..g.edges.len()).filter(|&e| Some(e) != excluded).collect();
        let mut cuts: Vec<f64> = costs.iter().filter_map(|c| c.interior_root(sub)).collect();
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        cuts.insert(0, sub.lo);
        cuts.push(sub.hi);
        for w in cuts.windows(2) {
            let cell = Interval { lo: w[0], hi: w[1] };
            let mid = cell.midpoint();
            let mut forced = 0u32;
            for (v, c) in costs.iter().enumerate() {
                if c.eval(mid) < 0.0 {
                    forced |= 1 << v;
                }
            }
            let free = ((1u64 << g.n) - 1) as u32 & !forced;
            let mut masks = branch_covers(&edge_masks, &required, forced, free);
            masks.sort_unstable();
            masks.dedup();
            let lines: Vec<LinearForm> = masks.iter().map(|&m| cost_line(costs, m)).collect();
            for (iv, idx) in lower_envelope(&lines, cell) {
                let pick = VertexPick { mask: masks[idx], excluded };
                match pieces.last_mut() {
                    Some(p) if p.solution == pick => p.interval.hi = iv.hi,
                    _ => pieces.push(ConvertPiece {
                        interval: iv,
                        objective: lines[idx].to_segment(),
                        solution: pick,
                    }),
                }
            }
        }
    }
    Ok(pieces)
}

/// Result of repairing a pick under the true parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRepair {
    pub picked: u32,
    pub corrected: u32,
    pub true_excluded: Option<usize>,
}

impl CoverRepair {
    pub fn added(&self) -> u32 {
        self.corrected & !self.picked
    }
}

/// Correction A: add both endpoints of every edge that must be covered under
/// the true edge values but is not.
pub fn repair_cover(g: &VcGraph, picked: u32, theta: &[f64]) -> Result<CoverRepair> {
    let (_, values) = g.split_theta(theta)?;
    if g.n < 32 && picked >> g.n != 0 {
        return Err(Error::MalformedSolution(format!("pick {picked:#b} names vertices beyond {}", g.n)));
    }
    let true_excluded = argmin_edge(values);
    let mut corrected = picked;
    for (e, m) in g.edge_masks().into_iter().enumerate() {
        if Some(e) != true_excluded && m & picked == 0 {
            corrected |= m;
        }
    }
    Ok(CoverRepair { picked, corrected, true_excluded })
}

pub fn correct_cover(g: &VcGraph, piece: &ConvertPiece<VertexPick>, theta: &[f64]) -> Result<CorrectPiece<CoverRepair>> {
    let r = repair_cover(g, piece.solution.mask, theta)?;
    let (costs, _) = g.split_theta(theta)?;
    Ok(CorrectPiece {
        interval: piece.interval,
        corrected_objective: SegmentKind::Constant(crate::knapsack::subset_sum(costs, r.corrected)),
        corrected_solution: r,
        penalty: SegmentKind::Constant(0.0),
    })
}

/// Extension point: a penalty on the repair. None is used by default.
pub type CoverPenalty = Arc<dyn Fn(&CoverRepair, &[f64]) -> f64 + Send + Sync>;

/// MCVC problem adapter.
#[derive(Clone)]
pub struct McvcAdapter {
    graph: VcGraph,
    penalty: Option<CoverPenalty>,
}

impl fmt::Debug for McvcAdapter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("McvcAdapter")
            .field("graph", &self.graph)
            .field("penalty", &self.penalty.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl McvcAdapter {
    pub fn new(graph: VcGraph) -> Self {
        McvcAdapter { graph, penalty: None }
    }

    pub fn with_penalty(mut self, penalty: CoverPenalty) -> Self {
        self.penalty = Some(penalty);
        self
    }

    pub fn graph(&self) -> &VcGraph {
        &self.graph
    }

    fn penalty_of(&self, r: &CoverRepair, theta: &[f64]) -> f64 {
        self.penalty.as_ref().map_or(0.0, |p| p(r, theta))
    }
}

impl Stages for McvcAdapter {
    type Solution = VertexPick;
    type Corrected = CoverRepair;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn convert(&self, params: &ParamVector, i0: Interval) -> Result<Vec<ConvertPiece<VertexPick>>> {
        convert_mcvc(&self.graph, params, i0)
    }

    fn correct(&self, pieces: &[ConvertPiece<VertexPick>], theta: &[f64]) -> Result<Vec<CorrectPiece<CoverRepair>>> {
        pieces
            .iter()
            .map(|p| {
                let mut c = correct_cover(&self.graph, p, theta)?;
                c.penalty = SegmentKind::Constant(self.penalty_of(&c.corrected_solution, theta));
                Ok(c)
            })
            .collect()
    }
}

impl Adapter for McvcAdapter {
    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn num_params(&self) -> usize {
        self.graph.num_params()
    }

    fn true_optimal_value(&self, theta: &[f64]) -> Result<f64> {
        let (costs, values) = self.graph.split_theta(theta)?;
        Ok(mcvc_exhaustive(&self.graph, costs, values)?.optimal_value)
    }

    fn loss(&self, params: &ParamVector, theta: &[f64], tov: f64, i0: Interval, mode: LossMode) -> Result<PiecewiseFn> {
        stage_loss(self, params, theta, tov, i0, mode)
    }

    fn posthoc_regret(&self, theta_hat: &[f64], theta: &[f64], tov: f64) -> Result<f64> {
        let (c_hat, v_hat) = self.graph.split_theta(theta_hat)?;
        let est = mcvc_exhaustive(&self.graph, c_hat, v_hat)?;
        let r = repair_cover(&self.graph, est.solution.mask, theta)?;
        let (costs, _) = self.graph.split_theta(theta)?;
        Ok(crate::knapsack::subset_sum(costs, r.corrected) - tov + self.penalty_of(&r, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::estimated_objective;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn triangle() -> VcGraph {
        VcGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn graph_validation() {
        assert!(VcGraph::new(2, vec![(0, 0)]).is_err());
        assert!(VcGraph::new(2, vec![(0, 2)]).is_err());
        assert!(VcGraph::new(21, vec![]).is_err());
        let g = VcGraph::from_json(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(g.num_params(), 5);
    }

    #[test]
    fn triangle_constant_parameters() {
        // edge (0,2) has the smallest value, so only (0,1) and (1,2) need
        // covering; vertex 1 covers both
        let p = ParamVector::fixed(&[1.0, 1.5, 1.0, 5.0, 6.0, 2.0]);
        let pieces = convert_mcvc(&triangle(), &p, iv(0.0, 1.0)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].solution, VertexPick { mask: 0b010, excluded: Some(2) });
        assert_eq!(pieces[0].objective, SegmentKind::Constant(1.5));
    }

    #[test]
    fn excluded_edge_flips() {
        let g = VcGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        // value of edge 0 is x, of edge 1 is 1: edge 0 excluded for x < 1
        let p = ParamVector::new(vec![0.0, 0.0, 0.0, 1.0, 0.0], vec![1.0, 3.0, 2.0, 0.0, 1.0]).unwrap();
        let pieces = convert_mcvc(&g, &p, iv(0.0, 2.0)).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].solution, VertexPick { mask: 0b100, excluded: Some(0) });
        assert_eq!(pieces[1].solution, VertexPick { mask: 0b001, excluded: Some(1) });
        assert_eq!(pieces[0].interval.hi, 1.0);
    }

    #[test]
    fn zero_costs_give_zero() {
        let p = ParamVector::new(vec![0.0; 6], vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        let e = estimated_objective(&convert_mcvc(&triangle(), &p, iv(-1.0, 1.0)).unwrap()).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(e.eval(x).unwrap(), 0.0);
        }
    }

    #[test]
    fn negative_cost_vertex_is_always_picked() {
        let g = VcGraph::new(2, vec![]).unwrap();
        let p = ParamVector::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let pieces = convert_mcvc(&g, &p, iv(-1.0, 1.0)).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].solution.mask, 0b01);
        assert_eq!(pieces[0].objective, SegmentKind::linear(1.0, 0.0));
        assert_eq!(pieces[1].solution.mask, 0);
    }

    #[test]
    fn repair_adds_missing_endpoints() {
        let g = triangle();
        let theta = [1.0, 2.0, 4.0, 5.0, 6.0, 2.0];
        // correct excluded edge and full coverage: unchanged
        let r = repair_cover(&g, 0b010, &theta).unwrap();
        assert_eq!(r.corrected, 0b010);
        // pick {0} misses (1,2)
        let r = repair_cover(&g, 0b001, &theta).unwrap();
        assert_eq!(r.corrected, 0b111);
        assert_eq!(r.added(), 0b110);
        let single = VcGraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let r = repair_cover(&single, 0, &[1.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.true_excluded, Some(1));
        assert_eq!(r.corrected, 0b11);
        assert!(repair_cover(&g, 0b1000, &theta).is_err());
    }
}
