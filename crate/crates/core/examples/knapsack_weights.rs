//! Knapsack with uncertain weights: the optimal subset as a function of one
//! weight, and how each correction repairs an overweight pick.

use branch_learn::adapter::{Adapter, LossMode, ParamVector};
use branch_learn::knapsack::{convert_knapsack, KnapsackAdapter, KnapsackCorrection, KnapsackInstance, KnapsackPenalty};
use branch_learn::piecewise::Interval;

fn main() -> branch_learn::Result<()> {
    let inst = KnapsackInstance::new(vec![10.0, 7.0, 4.0, 3.0], 10.0)?;
    let theta = vec![6.0, 5.0, 3.0, 2.0];
    // Item 0's weight is x; the others are estimated as 4, 3, 2.
    let params = ParamVector::new(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 4.0, 3.0, 2.0])?;
    let i0 = Interval::new(0.0, 12.0)?;

    for p in convert_knapsack(&inst, &params, i0)? {
        let items: Vec<usize> = p.solution.items().collect();
        println!("x in [{:5.2}, {:5.2}]: items {items:?}", p.interval.lo, p.interval.hi);
    }

    let corrections = [KnapsackCorrection::RatioAsc, KnapsackCorrection::WeightDesc, KnapsackCorrection::RemoveAll];
    for corr in corrections {
        for pen in [None, Some(KnapsackPenalty::PerItem(5.0))] {
            let adapter = KnapsackAdapter::new(inst.clone(), corr, pen.clone())?;
            let tov = adapter.true_optimal_value(&theta)?;
            let loss = adapter.loss(&params, &theta, tov, i0, LossMode::PostHoc)?;
            let at: Vec<String> = [1.0, 4.0, 6.0, 9.0].iter().map(|&x| format!("{:.1}", loss.eval(x).unwrap())).collect();
            println!("{corr:?} {pen:?}: regret at x = 1, 4, 6, 9 -> {}", at.join(", "));
        }
    }
    Ok(())
}
