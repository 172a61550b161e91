//! Clamped bounded-confidence opinion dynamics with two voting options.
//!
//! Each of `N` agents holds an opinion in `[-1,1]`. One update adds `h`
//! times the average opinion of the agents within distance `eps`, then cuts
//! the result back to `[-1,1]`. The crate implements that operator exactly
//! (floats or arbitrary-precision rationals), classifies its fixed points,
//! certifies basins and instability, analyses the frozen-regime linear
//! dynamics spectrally, and runs configurable experiments.
//!
//! ```
//! use clamped_opinion::{iterate, IterationLimits, ModelParams, OpinionProfile};
//!
//! let params = ModelParams::new(0.1, 0.5).unwrap();
//! let start = OpinionProfile::from_raw(vec![0.3, -0.7, 0.6]).unwrap();
//! let traj = iterate(&start, &params, &IterationLimits::default());
//! assert_eq!(traj.terminal().values(), &[-1.0, 1.0, 1.0]);
//! ```

pub mod config;
pub mod dynamics;
pub mod fixedpoint;
pub mod harness;
pub mod numeric;
pub mod profile;
pub mod spectral;

pub use dynamics::{
    increments, influence_windows, iterate, phi, ConvergenceStatus, InfluenceWindow, IterationLimits,
    Trajectory,
};
pub use fixedpoint::{
    classify_fixed_point, construct_nonbasic, instability_witness, is_fixed_point, separation_certificate,
    basin_certificate, FixedMode, FixedPointClass, NonbasicSpec,
};
pub use numeric::{Rational, Scalar};
pub use profile::{distance, ModelParams, OpinionProfile};
