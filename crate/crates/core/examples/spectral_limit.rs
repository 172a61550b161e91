//! Influence matrix spectra and the limit predicted from the kernel.

use clamped_opinion::numeric::ratio;
use clamped_opinion::spectral::{build_influence_matrix, frozen_block, predict_limit, spectrum_check};
use clamped_opinion::{InfluenceWindow, ModelParams, OpinionProfile};

fn main() {
    let chain = [
        InfluenceWindow { lo: 0, hi: 1 },
        InfluenceWindow { lo: 0, hi: 2 },
        InfluenceWindow { lo: 1, hi: 2 },
    ];
    let m = build_influence_matrix(&chain).unwrap();
    println!("T =\n{}", m.to_dense_text());
    let report = spectrum_check(&m, 0.1);
    println!("eigenvalues {:?}, all checks pass: {}", report.eigenvalues, report.all_checks_pass());

    let params = ModelParams::new(ratio(1, 10), ratio(3, 10)).unwrap();
    let state = OpinionProfile::from_sorted(vec![
        ratio(-1, 1),
        ratio(-1, 10),
        ratio(1, 20),
        ratio(1, 20),
        ratio(1, 1),
    ])
    .unwrap();
    let block = frozen_block(&state, &params).unwrap();
    let pred = predict_limit(&state, &block, &params).unwrap();
    println!(
        "block of {} agents at offset {}: kernel dimension {}, limit {:?}",
        block.dim(),
        block.offset(),
        pred.kernel_dim,
        pred.limit
    );

    // a positive interior sum is a growing mode, so no limit exists
    let drifting = OpinionProfile::from_sorted(vec![-0.1, 0.2]).unwrap();
    let p = ModelParams::new(0.1, 0.5).unwrap();
    let err = predict_limit(&drifting, &frozen_block(&drifting, &p).unwrap(), &p).unwrap_err();
    println!("drifting state: {err}");
}
