//! Outcome of the election profile across confidence radii, as CSV.

use clamped_opinion::harness::{election_config, sweep, write_sweep_csv};

fn main() {
    let mut config = election_config(0.45);
    config.sweep_eps = (1..=19).map(|k| k as f64 / 20.0).collect();
    let rows = sweep(&config).unwrap();
    write_sweep_csv(&rows, std::io::stdout()).unwrap();
}
