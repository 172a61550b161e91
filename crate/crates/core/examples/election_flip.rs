//! The 100-voter election: a wide confidence radius keeps the initial
//! majority for +1, a narrow one hands it to -1.

use clamped_opinion::harness::{election_config, execute};

fn main() {
    for eps in [0.45, 0.05] {
        let outcome = execute(&election_config(eps)).unwrap();
        let s = &outcome.summary;
        println!(
            "eps = {eps:<4}  -1 x {:>2}  +1 x {:>2}  majority {:+}  fixed at step {:?}",
            s.minus_count,
            s.plus_count,
            s.majority,
            s.status.step().unwrap()
        );
    }
}
