//! Frozen-regime linear analysis.
//!
//! Once the ±1 counts and the noninfluence set stop changing, the unclamped
//! block evolves linearly as `V^{n+1} = (E + hT) V^n` where `T` is the
//! row-stochastic influence matrix. `T = S U` with `S` diagonal positive and
//! `U` symmetric, so `T` is similar to the symmetric `S^{1/2} U S^{1/2}` and
//! its spectrum is real.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{influence_windows, phi, ConvergenceStatus, InfluenceWindow, Trajectory};
use crate::numeric::Scalar;
use crate::profile::{ModelParams, OpinionProfile};

/// Eigenvalue magnitude below which a mode counts as part of the kernel.
pub const KERNEL_TOL: f64 = 1e-10;
/// Tolerance for range and unit-eigenvalue checks.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Predicted limit tolerance against direct iteration.
pub const LIMIT_TOL: f64 = 1e-8;
/// Allowed deviation between the linear model and the operator on a probe step.
pub const PROBE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("trajectory record is too short or was not fully recorded")]
    InsufficientRecord,
    #[error("agent {l} is in the window of {k} but not vice versa")]
    AsymmetricInfluence { k: usize, l: usize },
    #[error("profile is not in the frozen linear regime: {0}")]
    NotStabilized(String),
    #[error("predicted limit differs from direct iteration by {distance}")]
    PredictionMismatch { distance: f64 },
}

/// Row-stochastic influence matrix of a block of consecutive agents.
#[derive(Debug, Clone)]
pub struct InfluenceMatrix {
    offset: usize,
    windows: Vec<InfluenceWindow>,
    t: DMatrix<f64>,
    scale: DVector<f64>,
    adjacency: DMatrix<f64>,
}

impl InfluenceMatrix {
    /// `T`, entries `1/I(k)` on mutually influencing pairs.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }

    /// Diagonal of `S`, i.e. `1/I(k)`.
    pub fn scale(&self) -> &DVector<f64> {
        &self.scale
    }

    /// 0/1 symmetric `U`.
    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn windows(&self) -> &[InfluenceWindow] {
        &self.windows
    }

    /// Index of the first agent of the block described by the matrix.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.windows.len()
    }

    /// `S^{1/2} U S^{1/2}`.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let root = self.scale.map(f64::sqrt);
        DMatrix::from_fn(self.dim(), self.dim(), |k, l| {
            root[k] * self.adjacency[(k, l)] * root[l]
        })
    }

    pub fn to_dense_text(&self) -> String {
        dense_text(&self.t)
    }
}

/// One row per line, entries separated by single spaces, shortest
/// round-trip decimal formatting.
pub fn dense_text(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        writeln!(out, "{}", line.join(" ")).expect("write to string");
    }
    out
}

/// Builds `T` from windows given in block-local indices.
pub fn build_influence_matrix(windows: &[InfluenceWindow]) -> Result<InfluenceMatrix, SpectralError> {
    build_block_matrix(windows, 0)
}

fn build_block_matrix(windows: &[InfluenceWindow], offset: usize) -> Result<InfluenceMatrix, SpectralError> {
    let n = windows.len();
    for (k, w) in windows.iter().enumerate() {
        if w.hi >= n || !w.contains(k) {
            return Err(SpectralError::AsymmetricInfluence { k, l: w.hi.min(n) });
        }
        if let Some(l) = (w.lo..=w.hi).find(|&l| !windows[l].contains(k)) {
            return Err(SpectralError::AsymmetricInfluence { k, l });
        }
    }
    let scale = DVector::from_iterator(n, windows.iter().map(|w| 1.0 / w.len() as f64));
    let adjacency = DMatrix::from_fn(n, n, |k, l| if windows[k].contains(l) { 1.0 } else { 0.0 });
    let t = DMatrix::from_fn(n, n, |k, l| scale[k] * adjacency[(k, l)]);
    Ok(InfluenceMatrix {
        offset,
        windows: windows.to_vec(),
        t,
        scale,
        adjacency,
    })
}

/// Influence matrix of the unclamped middle block of `profile`. Errors if
/// an interior agent is influenced by a ±1 component.
pub fn frozen_block<S: Scalar>(
    profile: &OpinionProfile<S>,
    params: &ModelParams<S>,
) -> Result<InfluenceMatrix, SpectralError> {
    let minus = profile.count_minus_one();
    let n = profile.len();
    let plus = if minus == n { 0 } else { profile.count_plus_one() };
    let end = n - plus;
    let windows = influence_windows(profile, params);
    let mut local = Vec::with_capacity(end.saturating_sub(minus));
    for w in &windows[minus..end] {
        if w.lo < minus || w.hi >= end {
            return Err(SpectralError::NotStabilized(
                "an interior agent is influenced by a saturated component".into(),
            ));
        }
        local.push(InfluenceWindow {
            lo: w.lo - minus,
            hi: w.hi - minus,
        });
    }
    build_block_matrix(&local, minus)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Spectrum of `T`, descending.
    pub eigenvalues: Vec<f64>,
    /// Largest imaginary part reported by a general eigensolver on `T`.
    pub max_imag_residual: f64,
    /// Largest gap between sorted real parts from the general solver and the
    /// symmetric spectrum.
    pub general_solver_gap: f64,
    pub has_unit_eigenvalue: bool,
    pub in_range: bool,
    /// All eigenvalues `1 + h*lambda` of `E + hT` are positive.
    pub positivity: bool,
    pub min_shifted_eigenvalue: f64,
    pub limit: Option<Vec<f64>>,
}

impl SpectralReport {
    pub fn all_checks_pass(&self) -> bool {
        self.has_unit_eigenvalue
            && self.in_range
            && self.positivity
            && self.max_imag_residual < SPECTRUM_TOL
    }
}

fn symmetric_spectrum(matrix: &InfluenceMatrix) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(matrix.symmetrized())
}

pub fn spectrum_check(matrix: &InfluenceMatrix, h: f64) -> SpectralReport {
    if matrix.dim() == 0 {
        return SpectralReport {
            eigenvalues: Vec::new(),
            max_imag_residual: 0.0,
            general_solver_gap: 0.0,
            has_unit_eigenvalue: false,
            in_range: true,
            positivity: true,
            min_shifted_eigenvalue: f64::INFINITY,
            limit: None,
        };
    }
    let mut eigenvalues: Vec<f64> = symmetric_spectrum(matrix).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));

    let general = matrix.matrix().complex_eigenvalues();
    let max_imag_residual = general.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut real_parts: Vec<f64> = general.iter().map(|z| z.re).collect();
    real_parts.sort_by(|a, b| b.total_cmp(a));
    let general_solver_gap = real_parts
        .iter()
        .zip(&eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let has_unit_eigenvalue = eigenvalues.iter().any(|l| (l - 1.0).abs() <= SPECTRUM_TOL);
    let in_range = eigenvalues.iter().all(|l| l.abs() <= 1.0 + SPECTRUM_TOL);
    let min_shifted_eigenvalue = eigenvalues
        .iter()
        .map(|l| 1.0 + h * l)
        .fold(f64::INFINITY, f64::min);

    SpectralReport {
        eigenvalues,
        max_imag_residual,
        general_solver_gap,
        has_unit_eigenvalue,
        in_range,
        positivity: min_shifted_eigenvalue > 0.0,
        min_shifted_eigenvalue,
        limit: None,
    }
}

/// First recorded step from which the ±1 counts and the windows stay
/// constant. `None` if the record ends before a constant stretch of at least
/// two states, unless the trajectory ended at an exact fixed point.
pub fn stabilization_step<S: Scalar>(
    trajectory: &Trajectory<S>,
    params: &ModelParams<S>,
) -> Result<Option<usize>, SpectralError> {
    let states = trajectory.states();
    let exact = matches!(trajectory.status(), ConvergenceStatus::ExactFixedPoint(_));
    if !trajectory.recorded_all() || states.is_empty() || (states.len() < 2 && !exact) {
        return Err(SpectralError::InsufficientRecord);
    }
    let signature = |v: &OpinionProfile<S>| {
        (v.count_minus_one(), v.count_plus_one(), influence_windows(v, params))
    };
    let last = states.len() - 1;
    let target = signature(&states[last]);
    let mut first = last;
    while first > 0 && signature(&states[first - 1]) == target {
        first -= 1;
    }
    Ok((exact || first < last).then_some(first))
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitPrediction {
    /// Full-length predicted limit, in canonical order.
    pub limit: Vec<f64>,
    pub kernel_dim: usize,
    /// Slowest contraction factor `max (1 + h*lambda)` over decaying modes.
    pub decay_factor: Option<f64>,
    /// Steps used for the cross-check against direct iteration.
    pub probe_steps: usize,
    /// `rho(V^{probe_steps}, W)` from direct iteration.
    pub probe_distance: f64,
    /// `max |(T W)_k|` on the block.
    pub kernel_residual: f64,
}

/// Predicts the limit of a trajectory in the frozen regime by projecting the
/// unclamped block onto the kernel of `T` along the other eigenvectors.
///
/// The prediction is cross-checked by applying the operator itself for as
/// many steps as the geometric decay bound asks for.
pub fn predict_limit<S: Scalar>(
    profile: &OpinionProfile<S>,
    matrix: &InfluenceMatrix,
    params: &ModelParams<S>,
) -> Result<LimitPrediction, SpectralError> {
    let n = profile.len();
    let (offset, dim) = (matrix.offset(), matrix.dim());
    if offset + dim > n {
        return Err(SpectralError::NotStabilized("matrix does not fit the profile".into()));
    }
    let h = params.h().to_f64();
    let full: Vec<f64> = profile.values().iter().map(Scalar::to_f64).collect();
    if full[..offset].iter().any(|v| *v != -1.0) || full[offset + dim..].iter().any(|v| *v != 1.0) {
        return Err(SpectralError::NotStabilized("components outside the block are not saturated".into()));
    }
    let block = DVector::from_column_slice(&full[offset..offset + dim]);

    let mut limit_block = DVector::zeros(dim);
    let mut kernel_dim = 0;
    let mut decay_factor: Option<f64> = None;
    let mut decay_amplitude = 0.0;
    if dim > 0 {
        let eig = symmetric_spectrum(matrix);
        let root = matrix.scale().map(f64::sqrt);
        let inv_root = root.map(|r| 1.0 / r);
        let scaled = block.component_mul(&inv_root);
        let scale_max = root.max();
        let block_norm = block.amax().max(1.0);
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            let q = eig.eigenvectors.column(i);
            let coeff = q.dot(&scaled);
            let mode = q.component_mul(&root) * coeff;
            if lambda.abs() <= KERNEL_TOL {
                kernel_dim += 1;
                limit_block += mode;
            } else if lambda > 0.0 {
                if coeff.abs() * scale_max > PROBE_TOL * block_norm {
                    return Err(SpectralError::NotStabilized(format!(
                        "component {coeff:e} along growing mode lambda = {lambda}"
                    )));
                }
            } else {
                let factor = 1.0 + h * lambda;
                decay_factor = Some(decay_factor.map_or(factor, |f: f64| f.max(factor)));
                decay_amplitude += coeff.abs() * scale_max;
            }
        }
    }

    let probe_steps = match decay_factor {
        Some(r) if decay_amplitude > 0.0 && r > 0.0 && r < 1.0 => {
            let needed = ((0.1 * LIMIT_TOL / decay_amplitude).ln() / r.ln()).ceil();
            needed.max(1.0) as usize
        }
        _ => 1,
    };

    // direct iteration against the linear model
    let tm = matrix.matrix();
    let mut linear = block.clone();
    let mut state = profile.clone();
    for step in 0..probe_steps {
        linear = &linear + (tm * &linear) * h;
        state = phi(&state, params);
        let actual = state.values();
        let deviation = (0..dim)
            .map(|k| (actual[offset + k].to_f64() - linear[k]).abs())
            .fold(0.0, f64::max);
        let outside_moved = (0..offset)
            .chain(offset + dim..n)
            .any(|k| actual[k].to_f64() != full[k]);
        if deviation > PROBE_TOL || outside_moved {
            return Err(SpectralError::NotStabilized(format!(
                "operator leaves the linear model at probe step {step} (deviation {deviation:e})"
            )));
        }
    }

    let mut limit = full.clone();
    limit[offset..offset + dim].copy_from_slice(limit_block.as_slice());
    let probe_distance = state
        .values()
        .iter()
        .zip(&limit)
        .map(|(a, b)| (a.to_f64() - b).abs())
        .fold(0.0, f64::max);
    if probe_distance >= LIMIT_TOL {
        return Err(SpectralError::PredictionMismatch { distance: probe_distance });
    }
    let kernel_residual = if dim == 0 { 0.0 } else { (tm * &limit_block).amax() };

    Ok(LimitPrediction {
        limit,
        kernel_dim,
        decay_factor,
        probe_steps,
        probe_distance,
        kernel_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{iterate, IterationLimits};

    fn w(lo: usize, hi: usize) -> InfluenceWindow {
        InfluenceWindow { lo, hi }
    }

    fn p(h: f64, eps: f64) -> ModelParams {
        ModelParams::new(h, eps).unwrap()
    }

    fn prof(v: &[f64]) -> OpinionProfile {
        OpinionProfile::from_sorted(v.to_vec()).unwrap()
    }

    #[test]
    fn matrix_examples() {
        let m = build_influence_matrix(&[w(0, 1), w(0, 2), w(1, 2)]).unwrap();
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[0.5, 0.5, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.5, 0.5],
        );
        assert_eq!(m.matrix(), &expected);
        assert_eq!(m.adjacency().transpose(), *m.adjacency());
        let rebuilt = DMatrix::from_diagonal(m.scale()) * m.adjacency();
        assert_eq!(rebuilt, expected);

        let full = build_influence_matrix(&[w(0, 2); 3]).unwrap();
        assert!(full.matrix().iter().all(|x| *x == 1.0 / 3.0));
        let id = build_influence_matrix(&[w(0, 0), w(1, 1), w(2, 2)]).unwrap();
        assert_eq!(id.matrix(), &DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn asymmetric_windows_rejected() {
        assert_eq!(
            build_influence_matrix(&[w(0, 1), w(1, 1)]).unwrap_err(),
            SpectralError::AsymmetricInfluence { k: 0, l: 1 }
        );
    }

    #[test]
    fn dense_text_format() {
        let m = build_influence_matrix(&[w(0, 1), w(0, 1)]).unwrap();
        assert_eq!(m.to_dense_text(), "0.5 0.5\n0.5 0.5\n");
    }

    #[test]
    fn spectrum_examples() {
        let m = build_influence_matrix(&[w(0, 1), w(0, 2), w(1, 2)]).unwrap();
        let r = spectrum_check(&m, 0.1);
        for (a, b) in r.eigenvalues.iter().zip([1.0, 0.5, -1.0 / 6.0]) {
            assert!((a - b).abs() < 1e-12, "{:?}", r.eigenvalues);
        }
        assert!(r.all_checks_pass());

        let id = build_influence_matrix(&[w(0, 0), w(1, 1), w(2, 2)]).unwrap();
        let r = spectrum_check(&id, 0.5);
        assert!(r.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-12));

        let full = build_influence_matrix(&[w(0, 2); 3]).unwrap();
        let r = spectrum_check(&full, 0.5);
        for (a, b) in r.eigenvalues.iter().zip([1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stabilization_examples() {
        let params = p(0.1, 0.3);
        let limits = IterationLimits::default().recording();
        let fixed = iterate(&prof(&[-1.0, 1.0]), &params, &limits);
        assert_eq!(stabilization_step(&fixed, &params), Ok(Some(0)));

        let short = iterate(&prof(&[-0.95, 0.5]), &params, &IterationLimits::new(1, 1e-12).recording());
        assert_eq!(short.states().len(), 2);
        assert_eq!(stabilization_step(&short, &params), Ok(None));

        let unrecorded = iterate(&prof(&[-0.95, 0.5]), &params, &IterationLimits::default());
        assert_eq!(stabilization_step(&unrecorded, &params), Err(SpectralError::InsufficientRecord));
    }

    #[test]
    fn limit_examples() {
        let params = p(0.5, 0.5);
        let fixed = prof(&[-1.0, 0.0, 1.0]);
        let m = frozen_block(&fixed, &params).unwrap();
        let pred = predict_limit(&fixed, &m, &params).unwrap();
        assert_eq!(pred.limit, vec![-1.0, 0.0, 1.0]);

        let pair = prof(&[-0.1, 0.1]);
        let m = frozen_block(&pair, &params).unwrap();
        let pred = predict_limit(&pair, &m, &params).unwrap();
        assert!((pred.limit[0] + 0.1).abs() < 1e-15 && (pred.limit[1] - 0.1).abs() < 1e-15);
        assert_eq!(pred.kernel_dim, 1);

        let drifting = prof(&[-0.1, 0.2]);
        let m = frozen_block(&drifting, &params).unwrap();
        assert!(matches!(
            predict_limit(&drifting, &m, &params),
            Err(SpectralError::NotStabilized(_))
        ));

        let basic = OpinionProfile::<f64>::basic(4, 1);
        let m = frozen_block(&basic, &params).unwrap();
        assert_eq!(m.dim(), 0);
        assert_eq!(predict_limit(&basic, &m, &params).unwrap().limit, basic.values());
    }

    #[test]
    fn frozen_block_rejects_saturated_neighbours() {
        let params = p(0.5, 0.5);
        let touching = prof(&[-1.0, -0.6, 0.6, 1.0]);
        assert!(matches!(frozen_block(&touching, &params), Err(SpectralError::NotStabilized(_))));
    }
}
