//! Minimum vertex cover where only edges with a positive value must be
//! covered, under uncertain costs.

use branch_learn::adapter::{Adapter, LossMode, ParamVector};
use branch_learn::mcvc::{convert_mcvc, McvcAdapter, VcGraph};
use branch_learn::oracles::mcvc_exhaustive;
use branch_learn::piecewise::Interval;

fn main() -> branch_learn::Result<()> {
    // A 5-cycle with a chord.
    let g = VcGraph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])?;
    let costs = [2.0, 1.0, 3.0, 1.5, 2.5];
    let values = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0];
    let best = mcvc_exhaustive(&g, &costs, &values)?;
    println!("true cover {:05b}, cost {}", best.solution.mask, best.optimal_value);

    // Vertex 0's cost is x; everything else is estimated exactly.
    let theta: Vec<f64> = costs.iter().chain(&values).copied().collect();
    let mut a = vec![0.0; theta.len()];
    a[0] = 1.0;
    let mut b = theta.clone();
    b[0] = 0.0;
    let params = ParamVector::new(a, b)?;
    let i0 = Interval::new(0.0, 6.0)?;
    for p in convert_mcvc(&g, &params, i0)? {
        println!("x in [{:.2}, {:.2}]: cover {:05b}", p.interval.lo, p.interval.hi, p.solution.mask);
    }

    let adapter = McvcAdapter::new(g);
    let tov = adapter.true_optimal_value(&theta)?;
    let loss = adapter.loss(&params, &theta, tov, i0, LossMode::PostHoc)?;
    for x in [0.5, 2.0, 3.0, 5.0] {
        println!("regret at x = {x}: {:.2}", loss.eval(x)?);
    }
    Ok(())
}
