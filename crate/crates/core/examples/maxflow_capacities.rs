//! Max-flow value as an exact function of one uncertain capacity, and the
//! post-hoc regret of acting on an estimate.

use branch_learn::adapter::{estimated_objective, Adapter, LossMode, ParamVector};
use branch_learn::maxflow::{convert_maxflow, FlowCorrection, FlowNetwork, MaxFlowAdapter};
use branch_learn::oracles::maxflow_numeric;
use branch_learn::piecewise::Interval;

fn main() -> branch_learn::Result<()> {
    // Diamond: 0 -> {1, 2} -> 3 with a cross edge 1 -> 2.
    let net = FlowNetwork::new(4, 0, 3, vec![(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)])?;
    let theta = vec![4.0, 3.0, 2.0, 5.0, 2.0];

    // Edge 0 has capacity x, the rest are fixed at their estimates.
    let mut a = vec![0.0; 5];
    a[0] = 1.0;
    let mut b = vec![3.0, 2.0, 2.5, 4.0, 1.0];
    b[0] = 0.0;
    let params = ParamVector::new(a, b)?;
    let i0 = Interval::new(0.0, 8.0)?;

    let pieces = convert_maxflow(&net, &params, i0)?;
    let value = estimated_objective(&pieces)?;
    println!("estimated max-flow value over x in [0, 8]:");
    for s in value.segments() {
        println!("  [{:.2}, {:.2}] {:?}", s.lo, s.hi, s.kind);
    }
    println!("true max flow: {}", maxflow_numeric(&net, &theta)?.optimal_value);

    for (name, corr) in [("A (scale)", FlowCorrection::Scale), ("B (reaugment, K=10)", FlowCorrection::Reaugment { k: Some(10.0) })] {
        let adapter = MaxFlowAdapter::new(net.clone(), corr)?;
        let tov = adapter.true_optimal_value(&theta)?;
        let loss = adapter.loss(&params, &theta, tov, i0, LossMode::PostHoc)?;
        let (x, v) = loss.argmin(1000)?;
        println!("correction {name}: regret at x=2 is {:.3}, best x = {x:.3} with regret {v:.3}", loss.eval(2.0)?);
    }
    Ok(())
}
