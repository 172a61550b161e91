//! Iterate a small profile to its fixed point and print every state.

use clamped_opinion::{iterate, IterationLimits, ModelParams, OpinionProfile};

fn main() {
    let params = ModelParams::new(0.3, 0.4).unwrap();
    let start = OpinionProfile::from_raw(vec![0.35, -0.2, 0.05, -0.6, 0.7]).unwrap();
    let traj = iterate(&start, &params, &IterationLimits::default().recording());

    for (n, state) in traj.states().iter().enumerate() {
        let row: Vec<String> = state.in_agent_order().iter().map(|v| format!("{v:+.4}")).collect();
        println!("{n:3}  {}", row.join("  "));
    }
    println!("status: {:?}", traj.status());
    println!(
        "-1 x {}, +1 x {}",
        traj.terminal().count_minus_one(),
        traj.terminal().count_plus_one()
    );
}
