//! Certificates that predict the outcome before iterating: the basin ball
//! around a basic point, and a sign split wider than the radius.

use clamped_opinion::{
    iterate, separation_certificate, basin_certificate, IterationLimits, ModelParams, OpinionProfile,
};

fn main() {
    let params = ModelParams::new(0.2, 0.35).unwrap();
    let starts = [
        vec![-0.8, -0.5, 0.4, 0.9, 0.6],
        vec![-0.3, -0.1, 0.3, 0.5],
        vec![-0.2, 0.05, 0.1, 0.6],
    ];
    for raw in starts {
        let start = OpinionProfile::from_raw(raw.clone()).unwrap();
        let basin = basin_certificate(&start, &params);
        let split = separation_certificate(&start, &params);
        let terminal = iterate(&start, &params, &IterationLimits::default()).terminal().clone();
        println!("{raw:?}");
        match basin {
            Some(c) => println!("  basin: within {:.3} of the point with {} at -1", c.distance, c.minus),
            None => println!("  basin: none"),
        }
        match split {
            Some(c) => println!("  split: gap {:.3} after {} negatives", c.gap, c.minus),
            None => println!("  split: none"),
        }
        println!("  result: -1 x {}, +1 x {}", terminal.count_minus_one(), terminal.count_plus_one());
    }
}
