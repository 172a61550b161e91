//! Builds one fixed point of each kind with exact rationals and classifies
//! it.

use clamped_opinion::numeric::ratio;
use clamped_opinion::{
    classify_fixed_point, construct_nonbasic, ModelParams, NonbasicSpec, OpinionProfile, Rational,
};

fn show(label: &str, point: &OpinionProfile<Rational>, params: &ModelParams<Rational>) {
    let class = classify_fixed_point(point, params).unwrap();
    println!("{label:<10} {point}  ->  {}", class.name());
}

fn main() {
    let params = ModelParams::new(ratio(1, 10), ratio(3, 10)).unwrap();

    show("basic", &OpinionProfile::basic(5, 2), &params);

    let zeros = construct_nonbasic(
        &NonbasicSpec {
            minus_count: 1,
            interior: vec![ratio(0, 1); 3],
            plus_count: 2,
        },
        &params,
    )
    .unwrap();
    show("zero form", &zeros, &params);

    let mixed = construct_nonbasic(
        &NonbasicSpec {
            minus_count: 2,
            interior: vec![ratio(-3, 20), ratio(-1, 20), ratio(1, 10), ratio(1, 10)],
            plus_count: 1,
        },
        &params,
    )
    .unwrap();
    show("mixed", &mixed, &params);

    // the interior must sum to zero
    let err = construct_nonbasic(
        &NonbasicSpec {
            minus_count: 0,
            interior: vec![ratio(-1, 10), ratio(1, 20)],
            plus_count: 0,
        },
        &params,
    )
    .unwrap_err();
    println!("rejected   {err}");
}
