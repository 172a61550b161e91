//! Parses a configuration document and runs it, as the CLI does.
//!
//! `cargo run --example config_driven -- configs/random.conf`

use clamped_opinion::config::parse_config;
use clamped_opinion::harness::execute;

const FALLBACK: &str = "\
# 40 agents drawn uniformly from (-1,1)
n = 40
h = 0.15
eps = 0.25
seed = 2024
";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).unwrap(),
        None => FALLBACK.to_string(),
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("{errors}");
            std::process::exit(1);
        }
    };
    let outcome = execute(&config).unwrap();
    print!("{}", outcome.summary.to_json());
}
