mod common;

use clamped_opinion::dynamics::windows_of;
use clamped_opinion::numeric::ratio;
use clamped_opinion::spectral::{
    build_influence_matrix, frozen_block, predict_limit, spectrum_check, stabilization_step, SpectralError,
};
use clamped_opinion::{iterate, InfluenceWindow, IterationLimits, ModelParams, OpinionProfile, Rational};
use common::det3;
use num_traits::Zero;
use proptest::prelude::*;

fn chain3() -> Vec<InfluenceWindow> {
    vec![
        InfluenceWindow { lo: 0, hi: 1 },
        InfluenceWindow { lo: 0, hi: 2 },
        InfluenceWindow { lo: 1, hi: 2 },
    ]
}

#[test]
fn chain_of_three_has_the_hand_computed_spectrum() {
    // T rows: (1/2, 1/2, 0), (1/3, 1/3, 1/3), (0, 1/2, 1/2)
    let t = [
        [ratio(1, 2), ratio(1, 2), ratio(0, 1)],
        [ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        [ratio(0, 1), ratio(1, 2), ratio(1, 2)],
    ];
    for lambda in [ratio(1, 1), ratio(1, 2), ratio(-1, 6)] {
        let mut shifted = t.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = row[i].clone() - lambda.clone();
        }
        assert!(det3(&shifted).is_zero(), "det(T - {lambda}) != 0");
    }

    let m = build_influence_matrix(&chain3()).unwrap();
    for (i, row) in t.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            assert!((m.matrix()[(i, j)] - num_traits::ToPrimitive::to_f64(entry).unwrap()).abs() < 1e-15);
        }
    }
    let report = spectrum_check(&m, 0.1);
    for (got, want) in report.eigenvalues.iter().zip([1.0, 0.5, -1.0 / 6.0]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert!(report.all_checks_pass());
}

#[test]
fn asymmetric_windows_are_rejected() {
    let windows = vec![InfluenceWindow { lo: 0, hi: 1 }, InfluenceWindow { lo: 1, hi: 1 }];
    assert!(matches!(
        build_influence_matrix(&windows),
        Err(SpectralError::AsymmetricInfluence { .. })
    ));
}

#[test]
fn stabilization_of_a_saturating_run_is_its_last_count_change() {
    let p = ModelParams::new(0.3, 0.2).unwrap();
    let start = OpinionProfile::from_raw(vec![-0.7, -0.6, 0.55, 0.9]).unwrap();
    let traj = iterate(&start, &p, &IterationLimits::default().recording());
    let first = stabilization_step(&traj, &p).unwrap().unwrap();
    let states = traj.states();
    assert_eq!(states[first].values(), traj.terminal().values());
    assert_ne!(states[first - 1].values(), traj.terminal().values());

    let not_recorded = iterate(&start, &p, &IterationLimits::default());
    assert_eq!(stabilization_step(&not_recorded, &p), Err(SpectralError::InsufficientRecord));
}

#[test]
fn exact_mixed_point_predicts_itself() {
    let p = ModelParams::new(ratio(1, 10), ratio(3, 10)).unwrap();
    let values: Vec<Rational> = [(-1, 1), (-1, 10), (1, 20), (1, 20), (1, 1)]
        .iter()
        .map(|&(a, b)| ratio(a, b))
        .collect();
    let point = OpinionProfile::from_sorted(values).unwrap();
    let m = frozen_block(&point, &p).unwrap();
    assert_eq!((m.offset(), m.dim()), (1, 3));
    let pred = predict_limit(&point, &m, &p).unwrap();
    assert_eq!(pred.kernel_dim, 2);
    let expected = [-1.0, -0.1, 0.05, 0.05, 1.0];
    for (a, b) in pred.limit.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn growing_mode_blocks_prediction() {
    let p = ModelParams::new(0.1, 0.5).unwrap();
    let point = OpinionProfile::from_sorted(vec![-0.1, 0.2]).unwrap();
    let m = frozen_block(&point, &p).unwrap();
    assert!(matches!(predict_limit(&point, &m, &p), Err(SpectralError::NotStabilized(_))));
}

proptest! {
    #[test]
    fn window_structures_have_real_bounded_spectra(
        mut values in prop::collection::vec(-1.0f64..=1.0, 1..60),
        eps in 0.01f64..0.99,
        h in 0.01f64..0.99,
    ) {
        values.sort_by(f64::total_cmp);
        let m = build_influence_matrix(&windows_of(&values, &eps)).unwrap();
        for row in m.matrix().row_iter() {
            prop_assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        let report = spectrum_check(&m, h);
        prop_assert!(report.all_checks_pass(), "{:?}", report);
        prop_assert!(report.general_solver_gap < 1e-8);
    }
}
