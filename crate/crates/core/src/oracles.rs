//! Reference solvers used for true optimal values, for numeric evaluation of
//! point predictions, and as test oracles for the piecewise stages. They
//! share tie rules with the adapters so results agree exactly.

use crate::error::{Error, Result};
use crate::knapsack::{subset_sum, ItemSubset, MAX_ITEMS};
use crate::maxflow::{net_edge_flows, FlowNetwork, PathFlow, PathFlowPlan, ResidualLayout, RESIDUAL_EPS};
use crate::mcvc::{VcGraph, VertexPick};
use crate::piecewise::LinearForm;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<S> {
    pub optimal_value: f64,
    pub solution: S,
}

/// Numeric flow with its path decomposition, in augmentation order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowDecomposition {
    pub paths: Vec<Vec<usize>>,
    pub path_flows: Vec<f64>,
    pub edge_flows: Vec<f64>,
}

impl FlowDecomposition {
    pub fn arc_lists(&self) -> Vec<Vec<usize>> {
        self.paths.clone()
    }

    /// The same decomposition as a constant path plan.
    pub fn to_plan(&self) -> PathFlowPlan {
        PathFlowPlan {
            paths: self
                .paths
                .iter()
                .zip(&self.path_flows)
                .map(|(arcs, &f)| PathFlow { arcs: arcs.clone(), flow: LinearForm::constant(f) })
                .collect(),
        }
    }
}

/// Edmonds-Karp on concrete capacities. Nonpositive capacities make the
/// edge absent.
pub fn maxflow_numeric(net: &FlowNetwork, caps: &[f64]) -> Result<OracleResult<FlowDecomposition>> {
    let m = net.num_edges();
    if caps.len() != m {
        return Err(Error::Dimension(format!("{} capacities for {m} edges", caps.len())));
    }
    let layout = ResidualLayout::new(net);
    let mut residual = vec![0.0; 2 * m];
    for (e, &c) in caps.iter().enumerate() {
        residual[2 * e] = c;
    }
    let mut paths = Vec::new();
    let mut path_flows = Vec::new();
    while let Some(path) = layout.bfs(|a| residual[a] > RESIDUAL_EPS) {
        let bottleneck = path.iter().map(|&a| residual[a]).fold(f64::INFINITY, f64::min);
        for &a in &path {
            residual[a] -= bottleneck;
            residual[a ^ 1] += bottleneck;
        }
        paths.push(path);
        path_flows.push(bottleneck);
    }
    let edge_flows = net_edge_flows(m, &paths, &path_flows);
    Ok(OracleResult {
        optimal_value: path_flows.iter().sum(),
        solution: FlowDecomposition { paths, path_flows, edge_flows },
    })
}

/// Best subset over all `2^n`; ties go to the smallest bitmask.
pub fn knapsack_exhaustive(values: &[f64], weights: &[f64], capacity: f64) -> Result<OracleResult<ItemSubset>> {
    let n = values.len();
    if weights.len() != n {
        return Err(Error::Dimension(format!("{} weights for {n} items", weights.len())));
    }
    if n > MAX_ITEMS {
        return Err(Error::InvalidKnapsack(format!("{n} items exceeds the limit of {MAX_ITEMS}")));
    }
    let mut best = (0.0, 0u32);
    for mask in 1..(1u32 << n) {
        if subset_sum(weights, mask) <= capacity {
            let v = subset_sum(values, mask);
            if v > best.0 {
                best = (v, mask);
            }
        }
    }
    Ok(OracleResult { optimal_value: best.0, solution: ItemSubset(best.1) })
}

/// Edge with the smallest value; ties go to the smallest id.
pub fn argmin_edge(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (e, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v < values[b]) {
            best = Some(e);
        }
    }
    best
}

pub const MAX_EXHAUSTIVE_VERTICES: usize = 16;

/// Cheapest vertex set covering every edge but the smallest-valued one;
/// ties go to the smallest bitmask.
pub fn mcvc_exhaustive(g: &VcGraph, costs: &[f64], edge_values: &[f64]) -> Result<OracleResult<VertexPick>> {
    if costs.len() != g.n || edge_values.len() != g.edges.len() {
        return Err(Error::Dimension(format!(
            "{} costs and {} edge values for {} vertices and {} edges",
            costs.len(),
            edge_values.len(),
            g.n,
            g.edges.len()
        )));
    }
    if g.n > MAX_EXHAUSTIVE_VERTICES {
        return Err(Error::InvalidGraph(format!(
            "{} vertices exceeds the exhaustive limit of {MAX_EXHAUSTIVE_VERTICES}",
            g.n
        )));
    }
    let excluded = argmin_edge(edge_values);
    let required: Vec<u32> = g
        .edge_masks()
        .into_iter()
        .enumerate()
        .filter(|&(e, _)| Some(e) != excluded)
        .map(|(_, m)| m)
        .collect();
    let mut best: Option<(f64, u32)> = None;
    for mask in 0..(1u32 << g.n) {
        if required.iter().all(|&m| m & mask != 0) {
            let c = subset_sum(costs, mask);
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, mask));
            }
        }
    }
    let (value, mask) = best.expect("the full vertex set covers every edge");
    Ok(OracleResult { optimal_value: value, solution: VertexPick { mask, excluded } })
}

/// A problem whose constraints `feasibility_check` can verify.
#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    MaxFlow(&'a FlowNetwork),
    Knapsack { n_items: usize, capacity: f64 },
    Mcvc(&'a VcGraph),
}

/// A concrete solution descriptor.
#[derive(Clone, Copy, Debug)]
pub enum Solution<'a> {
    /// Net flow on every edge.
    EdgeFlows(&'a [f64]),
    Items(ItemSubset),
    Vertices(u32),
}

const FLOW_TOL: f64 = 1e-9;

/// Whether `solution` satisfies every constraint of `problem` under `theta`:
/// capacities and conservation for flows, the weight limit for item sets,
/// and coverage of all edges but the smallest-valued one for vertex sets.
pub fn feasibility_check(problem: Problem<'_>, solution: Solution<'_>, theta: &[f64]) -> Result<bool> {
    match (problem, solution) {
        (Problem::MaxFlow(net), Solution::EdgeFlows(flows)) => {
            let m = net.num_edges();
            if flows.len() != m {
                return Err(Error::MalformedSolution(format!("{} edge flows for {m} edges", flows.len())));
            }
            if theta.len() != m {
                return Err(Error::Dimension(format!("{} capacities for {m} edges", theta.len())));
            }
            let tol = |x: f64| FLOW_TOL * (1.0 + x.abs());
            let mut balance = vec![0.0; net.n];
            for (e, (&(u, v), &f)) in net.edges.iter().zip(flows).enumerate() {
                if !f.is_finite() || f < -tol(0.0) || f > theta[e].max(0.0) + tol(theta[e]) {
                    return Ok(false);
                }
                balance[u] -= f;
                balance[v] += f;
            }
            let scale: f64 = flows.iter().map(|f| f.abs()).sum();
            Ok((0..net.n)
                .filter(|&x| x != net.s && x != net.t)
                .all(|x| balance[x].abs() <= tol(scale)))
        }
        (Problem::Knapsack { n_items, capacity }, Solution::Items(s)) => {
            if n_items < 32 && s.0 >> n_items != 0 {
                return Err(Error::MalformedSolution(format!("subset {:#b} names items beyond {n_items}", s.0)));
            }
            if theta.len() != n_items {
                return Err(Error::Dimension(format!("{} weights for {n_items} items", theta.len())));
            }
            Ok(subset_sum(theta, s.0) <= capacity)
        }
        (Problem::Mcvc(g), Solution::Vertices(mask)) => {
            if g.n < 32 && mask >> g.n != 0 {
                return Err(Error::MalformedSolution(format!("vertex set {mask:#b} names vertices beyond {}", g.n)));
            }
            let (_, values) = g.split_theta(theta)?;
            let excluded = argmin_edge(values);
            Ok(g
                .edge_masks()
                .into_iter()
                .enumerate()
                .all(|(e, m)| Some(e) == excluded || m & mask != 0))
        }
        (p, s) => Err(Error::MalformedSolution(format!("solution {s:?} does not match problem {p:?}"))),
    }
}
