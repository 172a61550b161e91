//! Nudges the nonbasic point (-1, 0, 1) off its zero-sum hyperplane and
//! watches the interior sum grow by 1 + h until the state leaves the ball.

use clamped_opinion::fixedpoint::{Perturbation, WitnessOptions};
use clamped_opinion::numeric::ratio;
use clamped_opinion::{instability_witness, IterationLimits, ModelParams, OpinionProfile};

fn main() {
    let params = ModelParams::new(ratio(1, 10), ratio(1, 2)).unwrap();
    let point = OpinionProfile::from_sorted(vec![ratio(-1, 1), ratio(0, 1), ratio(1, 1)]).unwrap();
    let options = WitnessOptions {
        perturbation: Perturbation::SingleCoordinate,
        limits: IterationLimits::new(10_000, ratio(1, 1_000_000_000_000)),
        safety: 0.9,
        ratio_tol: 1e-10,
    };
    for delta in [ratio(1, 100), ratio(-1, 10_000)] {
        let w = instability_witness(&point, &params, delta, &options).unwrap();
        println!(
            "delta {:+e}: {} steps at ratio 1.1 (matches: {}), leaves the {:.2}-ball at step {:?}, ends at {}",
            w.delta,
            w.growth_ratios.len(),
            w.growth_matches,
            w.radius,
            w.escape_step,
            w.terminal
        );
    }
}
