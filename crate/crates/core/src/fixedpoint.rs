//! Fixed points of the operator: detection, classification into basic and
//! nonbasic forms, stability certificates and instability witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{influence_windows, iterate, phi, ConvergenceStatus, InfluenceWindow, IterationLimits};
use crate::numeric::Scalar;
use crate::profile::{distance, max_abs_diff, ModelParams, OpinionProfile};

#[derive(Debug, Clone, PartialEq)]
pub enum FixedMode<S = f64> {
    /// Exact equality of every component.
    Exact,
    /// `rho(phi(V), V) <= tol`.
    Tolerance(S),
}

pub fn is_fixed_point<S: Scalar>(
    profile: &OpinionProfile<S>,
    params: &ModelParams<S>,
    mode: &FixedMode<S>,
) -> bool {
    let next = phi(profile, params);
    match mode {
        FixedMode::Exact => next.values() == profile.values(),
        FixedMode::Tolerance(tol) => max_abs_diff(next.values(), profile.values()) <= *tol,
    }
}

/// Interior block of a mixed nonbasic fixed point. Indices are 0-based and
/// inclusive: negatives occupy `start..=last_negative`, positives
/// `first_positive..=end`, zeros (if any) lie between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedForm<S = f64> {
    pub start: usize,
    pub last_negative: usize,
    pub first_positive: usize,
    pub end: usize,
    pub interior: Vec<S>,
    pub interior_sum: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum FixedPointClass<S = f64> {
    /// `minus` entries −1 followed by +1.
    Basic { minus: usize },
    /// −1 block, nonempty 0 block, +1 block.
    NonbasicZeroForm { minus: usize, zero: usize, plus: usize },
    NonbasicMixed(MixedForm<S>),
    NotFixed,
}

impl<S> FixedPointClass<S> {
    pub fn is_nonbasic(&self) -> bool {
        matches!(self, Self::NonbasicZeroForm { .. } | Self::NonbasicMixed(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Basic { .. } => "basic",
            Self::NonbasicZeroForm { .. } => "nonbasic-zero",
            Self::NonbasicMixed(_) => "nonbasic-mixed",
            Self::NotFixed => "not-fixed",
        }
    }
}

/// Which nonbasic condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constraint {
    EmptyInterior,
    UnsortedInterior,
    InteriorOutsideBand,
    InteriorDiameter,
    NonzeroSum,
    TouchesMinusBlock,
    TouchesPlusBlock,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    /// A profile that passes the fixed-point test but matches no known
    /// form. Indicates a bug or a float artifact.
    #[error("fixed point {0:?} matches no classified form")]
    ClassificationGap(Vec<f64>),
    #[error("nonbasic construction violates {0:?}")]
    ConstraintViolation(Constraint),
    #[error("profile is not a nonbasic fixed point")]
    NotNonbasic,
    #[error("|delta| = {delta} must lie in (0, {limit})")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error("perturbed point has zero interior sum")]
    OnHyperplane,
}

/// Classifies an exact fixed point.
pub fn classify_fixed_point<S: Scalar>(
    profile: &OpinionProfile<S>,
    params: &ModelParams<S>,
) -> Result<FixedPointClass<S>, FixedPointError> {
    classify_with_mode(profile, params, &FixedMode::Exact)
}

/// Classification with a choice of fixed-point test. In tolerance mode the
/// interior sum may be as large as `tol * I / h`, and entries that small
/// count as zero.
pub fn classify_with_mode<S: Scalar>(
    profile: &OpinionProfile<S>,
    params: &ModelParams<S>,
    mode: &FixedMode<S>,
) -> Result<FixedPointClass<S>, FixedPointError> {
    if !is_fixed_point(profile, params, mode) {
        return Ok(FixedPointClass::NotFixed);
    }
    let values = profile.values();
    let n = values.len();
    let minus = profile.count_minus_one();
    let plus = profile.count_plus_one();
    if minus + plus == n {
        return Ok(FixedPointClass::Basic { minus });
    }
    let (start, end) = (minus, n - 1 - plus);
    let interior = &values[start..=end];
    let len = S::from_count(interior.len());
    // a step below `tol` only bounds the window sum by `tol * I / h`
    let (sum_tol, zero_tol) = match mode {
        // for floats, prefix-sum rounding can leave a residue of this size
        // on agents that are exactly zero in the real dynamics
        FixedMode::Exact => {
            let t = S::interior_sum_tolerance(interior.len());
            (t.clone(), t)
        }
        FixedMode::Tolerance(tol) => {
            let t = S::interior_sum_tolerance(interior.len()) + tol.clone() * len / params.h().clone();
            (t.clone(), t)
        }
    };
    let is_zero = |v: &S| v.abs() <= zero_tol;

    let gap = || FixedPointError::ClassificationGap(values.iter().map(Scalar::to_f64).collect());

    if interior.iter().all(is_zero) {
        return Ok(FixedPointClass::NonbasicZeroForm {
            minus,
            zero: interior.len(),
            plus,
        });
    }

    let negatives = interior.iter().take_while(|v| **v < S::zero() && !is_zero(v)).count();
    let positives = interior.iter().rev().take_while(|v| **v > S::zero() && !is_zero(v)).count();
    if negatives == 0
        || positives == 0
        || !interior[negatives..interior.len() - positives].iter().all(is_zero)
    {
        return Err(gap());
    }

    let eps = params.eps();
    let neg_eps = -eps.clone();
    if !interior.iter().all(|v| *v > neg_eps && *v < *eps) {
        return Err(gap());
    }
    let windows = influence_windows(profile, params);
    let block = InfluenceWindow { lo: start, hi: end };
    if windows[start..=end].iter().any(|w| *w != block) {
        return Err(gap());
    }
    let interior_sum = interior.iter().cloned().fold(S::zero(), |a, b| a + b);
    if interior_sum.abs() > sum_tol {
        return Err(gap());
    }

    Ok(FixedPointClass::NonbasicMixed(MixedForm {
        start,
        last_negative: start + negatives - 1,
        first_positive: end + 1 - positives,
        end,
        interior: interior.to_vec(),
        interior_sum,
    }))
}

/// Shape of a nonbasic point to construct.
#[derive(Debug, Clone, PartialEq)]
pub struct NonbasicSpec<S = f64> {
    pub minus_count: usize,
    pub interior: Vec<S>,
    pub plus_count: usize,
}

/// Builds `(-1 x minus, interior, +1 x plus)` after checking the nonbasic
/// fixed-point conditions on the interior.
pub fn construct_nonbasic<S: Scalar>(
    spec: &NonbasicSpec<S>,
    params: &ModelParams<S>,
) -> Result<OpinionProfile<S>, FixedPointError> {
    use Constraint::*;
    let violation = |c| Err(FixedPointError::ConstraintViolation(c));
    let interior = &spec.interior;
    let (Some(lowest), Some(highest)) = (interior.first(), interior.last()) else {
        return violation(EmptyInterior);
    };
    if interior.windows(2).any(|w| w[0] > w[1]) {
        return violation(UnsortedInterior);
    }
    let eps = params.eps().clone();
    let radius = params.influence_radius().clone();
    if !(*lowest > -eps.clone() && *highest < eps) {
        return violation(InteriorOutsideBand);
    }
    if highest.clone() - lowest.clone() > radius {
        return violation(InteriorDiameter);
    }
    if interior.iter().cloned().fold(S::zero(), |a, b| a + b) != S::zero() {
        return violation(NonzeroSum);
    }
    if spec.minus_count > 0 && lowest.clone() + S::one() <= radius {
        return violation(TouchesMinusBlock);
    }
    if spec.plus_count > 0 && S::one() - highest.clone() <= radius {
        return violation(TouchesPlusBlock);
    }

    let mut values = vec![-S::one(); spec.minus_count];
    values.extend(interior.iter().cloned());
    values.extend(std::iter::repeat_n(S::one(), spec.plus_count));
    Ok(OpinionProfile::from_sorted(values).expect("checked bounds and order"))
}

/// Basin certificate: `rho(V0, P) <= 1 - eps` for the basic point `P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinCertificate<S = f64> {
    pub minus: usize,
    pub distance: S,
    pub radius: S,
}

impl<S: Scalar> BasinCertificate<S> {
    pub fn target(&self, n: usize) -> OpinionProfile<S> {
        OpinionProfile::basic(n, self.minus)
    }
}

/// Distances to all `N + 1` basic points in O(N).
pub fn basic_distances<S: Scalar>(profile: &OpinionProfile<S>) -> Vec<S> {
    let values = profile.values();
    let n = values.len();
    let max = |a: S, b: S| if b > a { b } else { a };
    // to_minus[L] = max_{k<L} |v_k + 1|, to_plus[L] = max_{k>=L} |v_k - 1|
    let mut to_minus = vec![S::zero(); n + 1];
    for k in 0..n {
        to_minus[k + 1] = max(to_minus[k].clone(), (values[k].clone() + S::one()).abs());
    }
    let mut to_plus = vec![S::zero(); n + 1];
    for k in (0..n).rev() {
        to_plus[k] = max(to_plus[k + 1].clone(), (values[k].clone() - S::one()).abs());
    }
    to_minus.into_iter().zip(to_plus).map(|(a, b)| max(a, b)).collect()
}

/// The basic point whose `(1 - eps)`-ball contains `initial`, if any.
/// Ties go to the smallest `L`.
pub fn basin_certificate<S: Scalar>(
    initial: &OpinionProfile<S>,
    params: &ModelParams<S>,
) -> Option<BasinCertificate<S>> {
    let radius = S::one() - params.eps().clone();
    basic_distances(initial)
        .into_iter()
        .enumerate()
        .find(|(_, d)| *d <= radius)
        .map(|(minus, distance)| BasinCertificate {
            minus,
            distance,
            radius: radius.clone(),
        })
}

/// A sign-separated start: negatives and positives split by a gap above
/// the confidence radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCertificate<S = f64> {
    pub minus: usize,
    pub gap: S,
}

pub fn separation_certificate<S: Scalar>(
    initial: &OpinionProfile<S>,
    params: &ModelParams<S>,
) -> Option<SeparationCertificate<S>> {
    let values = initial.values();
    let split = values.iter().take_while(|v| **v < S::zero()).count();
    if split == 0 || split == values.len() || values[split] <= S::zero() {
        return None;
    }
    let gap = values[split].clone() - values[split - 1].clone();
    (gap > *params.influence_radius()).then_some(SeparationCertificate { minus: split, gap })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// Add `delta` to the last interior entry (`delta > 0`) or the first
    /// (`delta < 0`), so the interior sum becomes exactly `delta`.
    SingleCoordinate,
    /// Independent uniform offsets in `(-|delta|, |delta|)` on every
    /// interior entry.
    Random { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct WitnessOptions<S = f64> {
    pub perturbation: Perturbation,
    pub limits: IterationLimits<S>,
    /// Shrink factor applied to the largest admissible radius of a mixed
    /// point.
    pub safety: f64,
    /// Relative tolerance for the growth ratio check.
    pub ratio_tol: f64,
}

impl Default for WitnessOptions<f64> {
    fn default() -> Self {
        Self {
            perturbation: Perturbation::SingleCoordinate,
            limits: IterationLimits::new(1_000_000, 1e-12),
            safety: 0.9,
            ratio_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstabilityWitness<S = f64> {
    /// Neighborhood radius `d`.
    pub radius: f64,
    pub delta: f64,
    pub perturbed: OpinionProfile<S>,
    /// `s(V^{n+1}) / s(V^n)` for steps in the frozen unclamped regime.
    pub growth_ratios: Vec<f64>,
    /// Whether every recorded ratio is within `ratio_tol` of `1 + h`.
    pub growth_matches: bool,
    /// First `n` with `rho(V^n, P) >= d`.
    pub escape_step: Option<usize>,
    pub terminal: OpinionProfile<S>,
    pub terminal_status: ConvergenceStatus,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum StabilityReport<S = f64> {
    BasinCertificate(BasinCertificate<S>),
    SeparationCertificate(SeparationCertificate<S>),
    InstabilityWitness(InstabilityWitness<S>),
}

/// Largest admissible neighborhood radius for the instability argument.
pub fn witness_radius<S: Scalar>(
    point: &OpinionProfile<S>,
    class: &FixedPointClass<S>,
    params: &ModelParams<S>,
    safety: f64,
) -> Result<f64, FixedPointError> {
    let eps = params.eps().to_f64();
    let h = params.h().to_f64();
    match class {
        FixedPointClass::NonbasicZeroForm { .. } => Ok((eps / 2.0).min((1.0 - eps) / 2.0)),
        FixedPointClass::NonbasicMixed(form) => {
            let n = point.len() as f64;
            let low = form.interior.first().expect("nonempty").to_f64();
            let high = form.interior.last().expect("nonempty").to_f64();
            let mut limit = (low + eps).min(eps - high);
            if form.start > 0 {
                limit = limit.min((low + 1.0 - eps) / 2.0);
            }
            if form.end + 1 < point.len() {
                limit = limit.min((1.0 - high - eps) / 2.0);
            }
            limit = limit.min(h * high / (2.0 * n + h)).min(-h * low / (2.0 * n + h));
            Ok(safety * limit)
        }
        _ => Err(FixedPointError::NotNonbasic),
    }
}

fn interior_bounds<S>(class: &FixedPointClass<S>, n: usize) -> Option<(usize, usize)> {
    match class {
        FixedPointClass::NonbasicZeroForm { minus, plus, .. } => Some((*minus, n - 1 - plus)),
        FixedPointClass::NonbasicMixed(form) => Some((form.start, form.end)),
        _ => None,
    }
}

/// Perturbs a nonbasic fixed point off the zero-sum hyperplane and follows
/// the trajectory: growth of the interior sum by `1 + h` per step, escape
/// from the `d`-ball, and the terminal state.
pub fn instability_witness<S: Scalar>(
    point: &OpinionProfile<S>,
    params: &ModelParams<S>,
    delta: S,
    options: &WitnessOptions<S>,
) -> Result<InstabilityWitness<S>, FixedPointError> {
    let class = classify_fixed_point(point, params)?;
    let n = point.len();
    let (start, end) = interior_bounds(&class, n).ok_or(FixedPointError::NotNonbasic)?;
    let radius = witness_radius(point, &class, params, options.safety)?;
    let delta_f = delta.to_f64();
    if delta.is_zero() {
        return Err(FixedPointError::OnHyperplane);
    }
    if delta_f.abs() >= radius {
        return Err(FixedPointError::DeltaTooLarge {
            delta: delta_f.abs(),
            limit: radius,
        });
    }

    let mut raw = point.values().to_vec();
    match options.perturbation {
        Perturbation::SingleCoordinate => {
            let idx = if delta > S::zero() { end } else { start };
            raw[idx] = raw[idx].clone() + delta.clone();
        }
        Perturbation::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bound = delta_f.abs();
            for v in &mut raw[start..=end] {
                let offset: f64 = rng.gen_range(-bound..bound);
                *v = v.clone() + S::from_f64(offset).expect("finite offset");
            }
        }
    }
    let perturbed = OpinionProfile::from_raw(raw).expect("perturbation stays in range");
    let block_sum = |v: &OpinionProfile<S>| {
        v.values()[start..=end].iter().cloned().fold(S::zero(), |a, b| a + b)
    };
    if block_sum(&perturbed).is_zero() {
        return Err(FixedPointError::OnHyperplane);
    }

    let limits = options.limits.clone().recording();
    let trajectory = iterate(&perturbed, params, &limits);
    let block = InfluenceWindow { lo: start, hi: end };
    let gain = 1.0 + params.h().to_f64();
    let (lower, upper) = (-S::one(), S::one());

    let mut growth_ratios = Vec::new();
    let states = trajectory.states();
    for pair in states.windows(2) {
        let frozen = influence_windows(&pair[0], params)[start..=end]
            .iter()
            .all(|w| *w == block);
        let unclamped = pair[1].values()[start..=end]
            .iter()
            .all(|v| *v > lower && *v < upper);
        if !(frozen && unclamped) {
            break;
        }
        growth_ratios.push(block_sum(&pair[1]).to_f64() / block_sum(&pair[0]).to_f64());
    }
    let growth_matches = growth_ratios
        .iter()
        .all(|r| ((r - gain) / gain).abs() <= options.ratio_tol);

    let escape_step = states.iter().position(|v| {
        distance(v, point).expect("same length").to_f64() >= radius
    });

    Ok(InstabilityWitness {
        radius,
        delta: delta_f,
        perturbed,
        growth_ratios,
        growth_matches,
        escape_step,
        terminal: trajectory.terminal().clone(),
        terminal_status: trajectory.status(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ratio, Rational};
    use num_traits::Zero;

    fn p(h: f64, eps: f64) -> ModelParams {
        ModelParams::new(h, eps).unwrap()
    }

    fn prof(v: &[f64]) -> OpinionProfile {
        OpinionProfile::from_sorted(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_point_examples() {
        for minus in 0..=4 {
            let b = OpinionProfile::<f64>::basic(4, minus);
            assert!(is_fixed_point(&b, &p(0.7, 0.9), &FixedMode::Exact));
        }
        assert!(is_fixed_point(&prof(&[-1.0, 0.0, 1.0]), &p(0.1, 0.5), &FixedMode::Exact));
        assert!(!is_fixed_point(&prof(&[-0.2, 0.0, 0.3]), &p(0.5, 0.25), &FixedMode::Exact));
        assert!(is_fixed_point(
            &prof(&[-1e-14, 1e-14]),
            &p(0.5, 0.25),
            &FixedMode::Tolerance(1e-9)
        ));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_fixed_point(&prof(&[-1.0, -1.0, 1.0]), &p(0.3, 0.3)),
            Ok(FixedPointClass::Basic { minus: 2 })
        );
        assert_eq!(
            classify_fixed_point(&prof(&[1.0, 1.0]), &p(0.3, 0.3)),
            Ok(FixedPointClass::Basic { minus: 0 })
        );
        assert_eq!(
            classify_fixed_point(&prof(&[-1.0, 0.0, 1.0]), &p(0.1, 0.5)),
            Ok(FixedPointClass::NonbasicZeroForm { minus: 1, zero: 1, plus: 1 })
        );
        assert_eq!(
            classify_fixed_point(&prof(&[-0.2, 0.0, 0.3]), &p(0.5, 0.25)),
            Ok(FixedPointClass::NotFixed)
        );
    }

    #[test]
    fn mixed_form_in_both_backends() {
        let class = classify_fixed_point(&prof(&[-1.0, -0.2, 0.0, 0.2, 1.0]), &p(0.3, 0.5)).unwrap();
        let FixedPointClass::NonbasicMixed(form) = class else {
            panic!("expected mixed form, got {class:?}");
        };
        assert_eq!(
            (form.start, form.last_negative, form.first_positive, form.end),
            (1, 1, 3, 3)
        );
        assert_eq!(form.interior_sum, 0.0);

        let params = ModelParams::new(ratio(3, 10), ratio(1, 2)).unwrap();
        let point: OpinionProfile<Rational> = OpinionProfile::from_sorted(vec![
            ratio(-1, 1),
            ratio(-1, 5),
            ratio(0, 1),
            ratio(1, 5),
            ratio(1, 1),
        ])
        .unwrap();
        let class = classify_fixed_point(&point, &params).unwrap();
        assert!(matches!(class, FixedPointClass::NonbasicMixed(ref f) if f.interior_sum.is_zero()));
    }

    #[test]
    fn construction_examples() {
        let built = construct_nonbasic(
            &NonbasicSpec { minus_count: 1, interior: vec![0.0], plus_count: 1 },
            &p(0.1, 0.5),
        )
        .unwrap();
        assert_eq!(built.values(), &[-1.0, 0.0, 1.0]);

        let built = construct_nonbasic(
            &NonbasicSpec { minus_count: 0, interior: vec![-0.1, 0.1], plus_count: 0 },
            &p(0.1, 0.5),
        )
        .unwrap();
        assert!(is_fixed_point(&built, &p(0.1, 0.5), &FixedMode::Exact));

        let err = construct_nonbasic(
            &NonbasicSpec { minus_count: 1, interior: vec![-0.2, 0.0, 0.2], plus_count: 1 },
            &p(0.1, 0.3),
        );
        assert_eq!(err, Err(FixedPointError::ConstraintViolation(Constraint::InteriorDiameter)));
    }

    #[test]
    fn construction_rejects_each_condition() {
        use Constraint::*;
        let params = p(0.1, 0.5);
        let case = |minus, interior: &[f64], plus| {
            construct_nonbasic(
                &NonbasicSpec { minus_count: minus, interior: interior.to_vec(), plus_count: plus },
                &params,
            )
            .unwrap_err()
        };
        let v = FixedPointError::ConstraintViolation;
        assert_eq!(case(1, &[], 1), v(EmptyInterior));
        assert_eq!(case(0, &[0.1, -0.1], 0), v(UnsortedInterior));
        assert_eq!(case(0, &[-0.5, 0.5], 0), v(InteriorOutsideBand));
        assert_eq!(case(0, &[-0.1, 0.2], 0), v(NonzeroSum));
        let params = p(0.1, 0.45);
        let tight = construct_nonbasic(
            &NonbasicSpec { minus_count: 1, interior: vec![-0.44, 0.0, 0.44], plus_count: 0 },
            &params,
        );
        assert_eq!(tight, Err(v(InteriorDiameter)));
        let tight = construct_nonbasic(
            &NonbasicSpec { minus_count: 0, interior: vec![0.0], plus_count: 1 },
            &p(0.1, 0.99),
        );
        assert!(tight.is_ok());
    }

    #[test]
    fn basin_certificate_examples() {
        let params = p(0.1, 0.45);
        let cert = basin_certificate(&prof(&[-0.99, -0.6, 0.55, 1.0]), &params).unwrap();
        assert_eq!(cert.minus, 2);
        assert!((cert.distance - 0.45).abs() < 1e-15);
        assert_eq!(cert.target(4).values(), &[-1.0, -1.0, 1.0, 1.0]);

        let basic = OpinionProfile::<f64>::basic(5, 3);
        let cert = basin_certificate(&basic, &params).unwrap();
        assert_eq!((cert.minus, cert.distance), (3, 0.0));

        assert!(basin_certificate(&prof(&[0.0; 6]), &params).is_none());
    }

    #[test]
    fn separation_examples() {
        let params = p(0.1, 0.5);
        let cert = separation_certificate(&prof(&[-0.3, -0.2, 0.4]), &params).unwrap();
        assert_eq!(cert.minus, 2);
        let traj = iterate(&prof(&[-0.3, -0.2, 0.4]), &params, &IterationLimits::default());
        assert_eq!(traj.terminal().values(), &[-1.0, -1.0, 1.0]);
        assert!(separation_certificate(&prof(&[-0.1, 0.1]), &params).is_none());
        assert!(separation_certificate(&prof(&[0.1, 0.9]), &params).is_none());
        assert!(separation_certificate(&prof(&[-0.6, 0.0, 0.6]), &params).is_none());
    }

    #[test]
    fn witness_on_three_point_example() {
        let params = p(0.1, 0.5);
        let point = prof(&[-1.0, 0.0, 1.0]);
        let report = instability_witness(&point, &params, 0.001, &WitnessOptions::default()).unwrap();
        assert_eq!(report.radius, 0.25);
        assert!(!report.growth_ratios.is_empty());
        assert!(report.growth_matches, "{:?}", report.growth_ratios);
        assert!(report.escape_step.is_some());
        assert_eq!(report.terminal.values(), &[-1.0, 1.0, 1.0]);
    }

    #[test]
    fn witness_on_zero_block() {
        let params = p(0.5, 0.5);
        let point = prof(&[0.0; 4]);
        let report = instability_witness(&point, &params, 0.01, &WitnessOptions::default()).unwrap();
        assert!(report.growth_matches);
        for r in &report.growth_ratios {
            assert!((r - 1.5).abs() < 1e-10);
        }
        assert_eq!(report.terminal.values(), &[1.0; 4]);

        let report = instability_witness(&point, &params, -0.01, &WitnessOptions::default()).unwrap();
        assert_eq!(report.terminal.values(), &[-1.0; 4]);
    }

    #[test]
    fn witness_errors() {
        let params = p(0.1, 0.5);
        let point = prof(&[-1.0, 0.0, 1.0]);
        let opts = WitnessOptions::default();
        assert_eq!(
            instability_witness(&point, &params, 0.0, &opts).unwrap_err(),
            FixedPointError::OnHyperplane
        );
        assert!(matches!(
            instability_witness(&point, &params, 0.3, &opts),
            Err(FixedPointError::DeltaTooLarge { .. })
        ));
        assert_eq!(
            instability_witness(&prof(&[-1.0, 1.0]), &params, 0.01, &opts).unwrap_err(),
            FixedPointError::NotNonbasic
        );
        // absorbed by rounding: 0.25 + 1e-17 == 0.25 leaves the sum at zero
        let shifted = prof(&[-0.25, 0.25]);
        assert_eq!(
            instability_witness(&shifted, &p(0.1, 0.6), 1e-17, &opts).unwrap_err(),
            FixedPointError::OnHyperplane
        );
    }

    #[test]
    fn random_perturbation_is_reproducible() {
        let params = p(0.1, 0.5);
        let point = prof(&[-1.0, 0.0, 0.0, 0.0, 1.0]);
        let opts = WitnessOptions {
            perturbation: Perturbation::Random { seed: 7 },
            ..WitnessOptions::default()
        };
        let a = instability_witness(&point, &params, 0.01, &opts).unwrap();
        let b = instability_witness(&point, &params, 0.01, &opts).unwrap();
        assert_eq!(a.perturbed, b.perturbed);
        assert!(a.growth_matches);
        assert!(a.escape_step.is_some());
    }
}
