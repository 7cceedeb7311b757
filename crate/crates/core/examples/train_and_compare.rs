//! Generate a noisy knapsack dataset, fit ridge regression and the
//! regret-trained model, and compare them on held-out instances.

use branch_learn::bench::evaluate_model;
use branch_learn::data::{generate_synthetic, split, GenSpec, ProblemSpec};
use branch_learn::predictor::{fit_ridge, train_observed, TrainConfig};
use branch_learn::problem::{Correction, PenaltyKind, Scoring};

fn main() -> branch_learn::Result<()> {
    let mut spec = GenSpec::new(ProblemSpec::Knapsack { n_items: 10, capacity: 100.0, values: None }, 200, 7);
    spec.noise_std = 15.0;
    let ds = generate_synthetic(&spec)?;
    let (train, test) = split(&ds, 0.7, 7)?;
    let scoring = Scoring::new(Correction::A, PenaltyKind::I);

    let ridge = fit_ridge(&train, 1e-6)?;
    let model = train_observed(&scoring, &train, &TrainConfig::default(), |ev| {
        if ev.chosen != ev.previous {
            println!("pass {} coord {}: {:.3} -> {:.3}, mean loss {:.3}", ev.pass, ev.k, ev.previous, ev.chosen, ev.mean_loss);
        }
    })?;

    let (rm, rs) = evaluate_model(&ridge, &test, &scoring)?;
    let (bm, bs) = evaluate_model(&model.model(), &test, &scoring)?;
    println!("ridge:         {rm:.2} ± {rs:.2}");
    println!("regret-trained {bm:.2} ± {bs:.2}");
    Ok(())
}
