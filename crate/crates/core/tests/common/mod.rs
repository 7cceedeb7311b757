#![allow(dead_code)]

use branch_learn::adapter::ParamVector;
use branch_learn::knapsack::KnapsackInstance;
use branch_learn::maxflow::FlowNetwork;
use branch_learn::mcvc::VcGraph;
use branch_learn::piecewise::{Interval, PiecewiseFn, Segment, SegmentKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

/// Random constant/linear piecewise function on `dom` with up to `max_segs`
/// segments.
pub fn random_pwl(r: &mut impl Rng, dom: Interval, max_segs: usize) -> PiecewiseFn {
    let k = r.random_range(1..=max_segs);
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| r.random_range(dom.lo..dom.hi)).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.insert(0, dom.lo);
    cuts.push(dom.hi);
    let segs = cuts
        .windows(2)
        .map(|w| {
            let kind = if r.random_bool(0.3) {
                SegmentKind::Constant(r.random_range(-5.0..5.0))
            } else {
                SegmentKind::linear(r.random_range(-3.0..3.0), r.random_range(-5.0..5.0))
            };
            Segment::new(w[0], w[1], kind)
        })
        .collect();
    PiecewiseFn::from_segments(segs).unwrap()
}

pub fn random_params(r: &mut impl Rng, t: usize, a: (f64, f64), b: (f64, f64)) -> ParamVector {
    let av = (0..t).map(|_| r.random_range(a.0..a.1)).collect();
    let bv = (0..t).map(|_| r.random_range(b.0..b.1)).collect();
    ParamVector::new(av, bv).unwrap()
}

pub fn random_network(r: &mut impl Rng, n: usize, m: usize) -> FlowNetwork {
    let edges = (0..m)
        .map(|_| {
            let u = r.random_range(0..n);
            let mut v = r.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    FlowNetwork::new(n, 0, n - 1, edges).unwrap()
}

pub fn random_graph(r: &mut impl Rng, n: usize, m: usize) -> VcGraph {
    let edges = (0..m)
        .map(|_| {
            let u = r.random_range(0..n);
            let mut v = r.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    VcGraph::new(n, edges).unwrap()
}

pub fn random_knapsack(r: &mut impl Rng, n: usize) -> KnapsackInstance {
    let values = (0..n).map(|_| r.random_range(1.0..20.0)).collect();
    KnapsackInstance::new(values, r.random_range(10.0..30.0)).unwrap()
}

pub fn positive_vec(r: &mut impl Rng, t: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..t).map(|_| r.random_range(lo..hi)).collect()
}

pub fn features(r: &mut impl Rng, t: usize, m: usize) -> Vec<Vec<f64>> {
    (0..t).map(|_| (0..m).map(|_| r.random_range(0.0..2.0)).collect()).collect()
}

/// Depth-first augmenting paths (Ford-Fulkerson), independent of the
/// breadth-first implementation in the library.
pub fn maxflow_dfs(net: &FlowNetwork, caps: &[f64]) -> f64 {
    let n = net.n;
    let mut cap = vec![vec![0.0; n]; n];
    for (&(u, v), &c) in net.edges.iter().zip(caps) {
        cap[u][v] += c.max(0.0);
    }
    fn dfs(u: usize, t: usize, f: f64, cap: &mut [Vec<f64>], seen: &mut [bool]) -> f64 {
        if u == t {
            return f;
        }
        seen[u] = true;
        for v in 0..cap.len() {
            if !seen[v] && cap[u][v] > 1e-12 {
                let pushed = dfs(v, t, f.min(cap[u][v]), cap, seen);
                if pushed > 0.0 {
                    cap[u][v] -= pushed;
                    cap[v][u] += pushed;
                    return pushed;
                }
            }
        }
        0.0
    }
    let mut total = 0.0;
    loop {
        let mut seen = vec![false; n];
        let f = dfs(net.s, net.t, f64::INFINITY, &mut cap, &mut seen);
        if f <= 0.0 {
            return total;
        }
        total += f;
    }
}
