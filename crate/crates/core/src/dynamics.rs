//! The update operator and trajectory iteration.
//!
//! For a canonical profile the agents influencing agent `k` form a
//! contiguous index range, so windows come from a two-pointer sweep and window
//! sums from a prefix-sum array. One application of the operator is O(N).

use serde::Serialize;

use crate::numeric::Scalar;
use crate::profile::{max_abs_diff, ModelParams, OpinionProfile};

/// Contiguous 0-based inclusive range `[lo, hi]` of agents within the
/// confidence radius of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct InfluenceWindow {
    pub lo: usize,
    pub hi: usize,
}

impl InfluenceWindow {
    /// Number of influencing agents, `I(k)`.
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, l: usize) -> bool {
        self.lo <= l && l <= self.hi
    }

    /// `mu(k) = k - lo`.
    pub fn below(&self, k: usize) -> usize {
        k - self.lo
    }

    /// `nu(k) = hi - k`.
    pub fn above(&self, k: usize) -> usize {
        self.hi - k
    }

    pub fn is_subset_of(&self, other: &InfluenceWindow) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

pub(crate) fn within<S: Scalar>(a: &S, b: &S, radius: &S) -> bool {
    (a.clone() - b.clone()).abs() <= *radius
}

/// Windows of every agent of a sorted value slice.
///
/// `lo` and `hi` are both nondecreasing in `k`; rounding of the difference
/// is monotone so this holds for floats as well.
pub fn windows_of<S: Scalar>(values: &[S], radius: &S) -> Vec<InfluenceWindow> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, 0usize);
    for k in 0..n {
        while !within(&values[lo], &values[k], radius) {
            lo += 1;
        }
        hi = hi.max(k);
        while hi + 1 < n && within(&values[hi + 1], &values[k], radius) {
            hi += 1;
        }
        out.push(InfluenceWindow { lo, hi });
    }
    out
}

pub fn influence_windows<S: Scalar>(
    profile: &OpinionProfile<S>,
    params: &ModelParams<S>,
) -> Vec<InfluenceWindow> {
    windows_of(profile.values(), params.influence_radius())
}

/// Prefix sums of a value slice; `sum(lo, hi)` covers the inclusive range.
#[derive(Debug, Clone)]
pub struct PrefixSums<S> {
    acc: Vec<S>,
}

impl<S: Scalar> PrefixSums<S> {
    pub fn new(values: &[S]) -> Self {
        let mut acc = Vec::with_capacity(values.len() + 1);
        acc.push(S::zero());
        let mut running = S::zero();
        for v in values {
            running = running + v.clone();
            acc.push(running.clone());
        }
        Self { acc }
    }

    pub fn sum(&self, lo: usize, hi: usize) -> S {
        self.acc[hi + 1].clone() - self.acc[lo].clone()
    }

    pub fn mean(&self, lo: usize, hi: usize) -> S {
        self.sum(lo, hi) / S::from_count(hi - lo + 1)
    }
}

fn increments_with<S: Scalar>(values: &[S], windows: &[InfluenceWindow], h: &S) -> Vec<S> {
    let prefix = PrefixSums::new(values);
    windows
        .iter()
        .map(|w| h.clone() / S::from_count(w.len()) * prefix.sum(w.lo, w.hi))
        .collect()
}

/// `Delta_k = (h / I(k)) * sum of the opinions in window k`.
///
/// Mathematically nondecreasing in `k`; with floats a violation can only be
/// a rounding artifact of the prefix sums.
pub fn increments<S: Scalar>(profile: &OpinionProfile<S>, params: &ModelParams<S>) -> Vec<S> {
    let windows = influence_windows(profile, params);
    increments_with(profile.values(), &windows, params.h())
}

/// Details of one application of the operator.
#[derive(Debug, Clone)]
pub struct Step<S> {
    pub next: OpinionProfile<S>,
    pub windows: Vec<InfluenceWindow>,
    pub increments: Vec<S>,
    /// Number of components whose updated value fell outside [-1,1].
    pub clamped: usize,
    /// Positions where rounding produced `w_k < w_{k-1}` and canonical order
    /// was restored by raising `w_k`. Always zero for exact backends.
    pub order_repairs: usize,
}

pub fn step<S: Scalar>(profile: &OpinionProfile<S>, params: &ModelParams<S>) -> Step<S> {
    let values = profile.values();
    let windows = influence_windows(profile, params);
    let increments = increments_with(values, &windows, params.h());
    let (lower, upper) = (-S::one(), S::one());
    let mut clamped = 0;
    let mut order_repairs = 0;
    let mut next: Vec<S> = Vec::with_capacity(values.len());
    for (v, d) in values.iter().zip(&increments) {
        let w = v.clone() + d.clone();
        let mut w = if w < lower {
            clamped += 1;
            lower.clone()
        } else if w > upper {
            clamped += 1;
            upper.clone()
        } else {
            w
        };
        if let Some(prev) = next.last() {
            if w < *prev {
                order_repairs += 1;
                w = prev.clone();
            }
        }
        next.push(w);
    }
    Step {
        next: profile.with_values(next),
        windows,
        increments,
        clamped,
        order_repairs,
    }
}

/// One synchronous update: add the increments, then cut to [-1,1].
pub fn phi<S: Scalar>(profile: &OpinionProfile<S>, params: &ModelParams<S>) -> OpinionProfile<S> {
    step(profile, params).next
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLimits<S = f64> {
    pub max_steps: usize,
    pub tol: S,
    pub record_all: bool,
    pub record_increments: bool,
}

impl<S: Scalar> IterationLimits<S> {
    pub fn new(max_steps: usize, tol: S) -> Self {
        assert!(max_steps >= 1, "max_steps must be at least 1");
        assert!(tol > S::zero(), "tol must be positive");
        Self {
            max_steps,
            tol,
            record_all: false,
            record_increments: false,
        }
    }

    pub fn recording(mut self) -> Self {
        self.record_all = true;
        self
    }

    pub fn with_increments(mut self) -> Self {
        self.record_increments = true;
        self
    }
}

impl Default for IterationLimits<f64> {
    fn default() -> Self {
        Self::new(1_000_000, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step")]
pub enum ConvergenceStatus {
    /// `phi(V^n) == V^n` exactly.
    ExactFixedPoint(usize),
    /// `rho(V^{n+1}, V^n) < tol`; the retained final state is `V^{n+1}`.
    ToleranceConverged(usize),
    MaxStepsExceeded,
}

impl ConvergenceStatus {
    pub fn step(&self) -> Option<usize> {
        match *self {
            Self::ExactFixedPoint(n) | Self::ToleranceConverged(n) => Some(n),
            Self::MaxStepsExceeded => None,
        }
    }

    pub fn converged(&self) -> bool {
        !matches!(self, Self::MaxStepsExceeded)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<S = f64> {
    states: Vec<OpinionProfile<S>>,
    status: ConvergenceStatus,
    steps_taken: usize,
    recorded_all: bool,
    increments_log: Option<Vec<Vec<S>>>,
    order_repairs: usize,
}

impl<S: Scalar> Trajectory<S> {
    /// Recorded snapshots. With `record_all` this is `V^0, V^1, ...`;
    /// otherwise only the initial and final states.
    pub fn states(&self) -> &[OpinionProfile<S>] {
        &self.states
    }

    pub fn status(&self) -> ConvergenceStatus {
        self.status
    }

    /// Number of operator applications performed.
    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn recorded_all(&self) -> bool {
        self.recorded_all
    }

    pub fn initial(&self) -> &OpinionProfile<S> {
        &self.states[0]
    }

    pub fn terminal(&self) -> &OpinionProfile<S> {
        self.states.last().expect("trajectory has an initial state")
    }

    pub fn increments_log(&self) -> Option<&[Vec<S>]> {
        self.increments_log.as_deref()
    }

    pub fn order_repairs(&self) -> usize {
        self.order_repairs
    }
}

/// Iterates the operator from `initial` until an exact fixed point, a
/// sub-tolerance step, or `max_steps` applications.
pub fn iterate<S: Scalar>(
    initial: &OpinionProfile<S>,
    params: &ModelParams<S>,
    limits: &IterationLimits<S>,
) -> Trajectory<S> {
    let mut states = vec![initial.clone()];
    let mut increments_log = limits.record_increments.then(Vec::new);
    let mut current = initial.clone();
    let mut status = ConvergenceStatus::MaxStepsExceeded;
    let mut order_repairs = 0;
    let mut steps_taken = 0;

    for n in 0..limits.max_steps {
        let Step {
            next,
            increments,
            order_repairs: repairs,
            ..
        } = step(&current, params);
        steps_taken += 1;
        order_repairs += repairs;
        if let Some(log) = increments_log.as_mut() {
            log.push(increments);
        }
        if next.values() == current.values() {
            status = ConvergenceStatus::ExactFixedPoint(n);
            break;
        }
        let moved = max_abs_diff(next.values(), current.values());
        if limits.record_all {
            states.push(next.clone());
        }
        current = next;
        if moved < limits.tol {
            status = ConvergenceStatus::ToleranceConverged(n);
            break;
        }
    }

    if !limits.record_all && states.len() == 1 && status != ConvergenceStatus::ExactFixedPoint(0) {
        states.push(current);
    }

    Trajectory {
        states,
        status,
        steps_taken,
        recorded_all: limits.record_all,
        increments_log,
        order_repairs,
    }
}

/// `N(before) ⊆ N(after)` for noninfluence sets, expressed on windows: every
/// window may only shrink.
pub fn noninfluence_included(before: &[InfluenceWindow], after: &[InfluenceWindow]) -> bool {
    before.len() == after.len() && after.iter().zip(before).all(|(a, b)| a.is_subset_of(b))
}

/// A step at which the noninfluence set lost a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NoninfluenceEvent {
    pub step: usize,
    /// Whether some component was clamped during that step.
    pub clamped: bool,
    /// Whether the ±1 counts had already reached their final values.
    pub after_saturation: bool,
}

/// Scans a fully recorded trajectory for steps `n` with
/// `N(V^n) ⊄ N(V^{n+1})`.
///
/// Inclusion is guaranteed on unclamped steps, and for `eps <= 1/2` once
/// the ±1 counts are final; other events are reported, not treated as
/// errors.
pub fn noninfluence_events<S: Scalar>(
    trajectory: &Trajectory<S>,
    params: &ModelParams<S>,
) -> Vec<NoninfluenceEvent> {
    let states = trajectory.states();
    let last = trajectory.terminal();
    let final_counts = (last.count_minus_one(), last.count_plus_one());
    let mut events = Vec::new();
    for (n, pair) in states.windows(2).enumerate() {
        let before = influence_windows(&pair[0], params);
        let after = influence_windows(&pair[1], params);
        if !noninfluence_included(&before, &after) {
            let counts = (pair[0].count_minus_one(), pair[0].count_plus_one());
            events.push(NoninfluenceEvent {
                step: n,
                clamped: step(&pair[0], params).clamped > 0,
                after_saturation: counts == final_counts,
            });
        }
    }
    events
}

/// Upper bound on the number of steps before a component with `|v| >= eps`
/// is absorbed at ±1: its magnitude grows at least by the factor `1 + h/N`
/// per step until it is cut.
pub fn absorption_step_bound(magnitude: f64, h: f64, n: usize) -> usize {
    assert!(magnitude > 0.0);
    if magnitude >= 1.0 {
        return 0;
    }
    let growth = (1.0 + h / n as f64).ln();
    ((1.0 / magnitude).ln() / growth).ceil() as usize
}
