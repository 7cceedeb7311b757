//! Multi-seed comparison of all three methods on a bundled topology.

use branch_learn::bench::{run_benchmark, BenchConfig};
use branch_learn::data::{GenSpec, ProblemSpec};
use branch_learn::problem::{Correction, PenaltyKind, Scoring};
use branch_learn::topology;

fn main() -> branch_learn::Result<()> {
    let mut gen = GenSpec::new(ProblemSpec::Mcvc { graph: topology::graph("abilene")? }, 100, 0);
    gen.noise_std = 3.0;
    let mut cfg = BenchConfig::new(gen, Scoring::new(Correction::A, PenaltyKind::None), vec![1, 2, 3]);
    cfg.train.max_passes = 5;
    let report = run_benchmark(&cfg)?;
    print!("{}", report.to_text(true));
    println!("{}", report.to_csv());
    Ok(())
}
