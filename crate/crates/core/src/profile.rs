//! Model parameters and the canonical opinion profile.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::numeric::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("h must be in (0,1), got {0}")]
    GainOutOfRange(f64),
    #[error("eps must be in (0,1), got {0}")]
    RadiusOutOfRange(f64),
    #[error("band slack must be nonnegative, got {0}")]
    NegativeSlack(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    /// 1-based index of the offending entry.
    #[error("entry {index} = {value} lies outside [-1,1]")]
    EntryOutOfRange { index: usize, value: f64 },
    #[error("profile has no agents")]
    EmptyProfile,
    #[error("profiles have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    /// 1-based index `index` is smaller than its predecessor.
    #[error("values are not nondecreasing at entry {index}")]
    NotSorted { index: usize },
    #[error("agent permutation is not a bijection on 0..{0}")]
    BadPermutation(usize),
}

/// Step gain `h` and confidence radius `eps`, both in the open interval (0,1).
///
/// Agents `k` and `l` influence each other when `|v_k - v_l| <= eps` holds on
/// the stored values. [`with_band_slack`](Self::with_band_slack) widens the
/// band; the default compares against `eps` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<S = f64> {
    h: S,
    eps: S,
    slack: S,
    radius: S,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(h: S, eps: S) -> Result<Self, ParamError> {
        let open_unit = |x: &S| *x > S::zero() && *x < S::one();
        if !open_unit(&h) {
            return Err(ParamError::GainOutOfRange(h.to_f64()));
        }
        if !open_unit(&eps) {
            return Err(ParamError::RadiusOutOfRange(eps.to_f64()));
        }
        Ok(Self {
            radius: eps.clone(),
            h,
            eps,
            slack: S::zero(),
        })
    }

    pub fn with_band_slack(mut self, slack: S) -> Result<Self, ParamError> {
        if slack < S::zero() {
            return Err(ParamError::NegativeSlack(slack.to_f64()));
        }
        self.radius = self.eps.clone() + slack.clone();
        self.slack = slack;
        Ok(self)
    }

    pub fn h(&self) -> &S {
        &self.h
    }

    pub fn eps(&self) -> &S {
        &self.eps
    }

    pub fn band_slack(&self) -> &S {
        &self.slack
    }

    /// Threshold actually used by the influence test (`eps` plus slack).
    pub fn influence_radius(&self) -> &S {
        &self.radius
    }

    /// Converts parameters to another backend (exactly, from `f64`).
    pub fn convert<T: Scalar>(&self) -> ModelParams<T> {
        let conv = |x: &S| T::from_f64(x.to_f64()).expect("finite parameter");
        ModelParams {
            h: conv(&self.h),
            eps: conv(&self.eps),
            slack: conv(&self.slack),
            radius: conv(&self.eps) + conv(&self.slack),
        }
    }
}

/// Opinions of `N` agents in canonical (nondecreasing) order.
///
/// `agent_perm[k]` is the 0-based original index of the agent sitting at
/// canonical position `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpinionProfile<S = f64> {
    values: Vec<S>,
    agent_perm: Vec<usize>,
}

impl<S: Scalar> OpinionProfile<S> {
    /// Canonicalizes raw opinions: stable sort plus the permutation that
    /// recovers the original agent numbering.
    pub fn from_raw(raw: Vec<S>) -> Result<Self, ProfileError> {
        if raw.is_empty() {
            return Err(ProfileError::EmptyProfile);
        }
        check_range(&raw)?;
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).expect("ordered values"));
        let mut slots: Vec<Option<S>> = raw.into_iter().map(Some).collect();
        let values = order
            .iter()
            .map(|&i| slots[i].take().expect("each index used once"))
            .collect();
        Ok(Self {
            values,
            agent_perm: order,
        })
    }

    /// Builds a profile from values that are already nondecreasing; the
    /// agent numbering is the identity.
    pub fn from_sorted(values: Vec<S>) -> Result<Self, ProfileError> {
        if values.is_empty() {
            return Err(ProfileError::EmptyProfile);
        }
        check_range(&values)?;
        if let Some(k) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(ProfileError::NotSorted { index: k + 2 });
        }
        let agent_perm = (0..values.len()).collect();
        Ok(Self { values, agent_perm })
    }

    pub fn with_permutation(self, agent_perm: Vec<usize>) -> Result<Self, ProfileError> {
        let n = self.values.len();
        let mut seen = vec![false; n];
        if agent_perm.len() != n {
            return Err(ProfileError::BadPermutation(n));
        }
        for &i in &agent_perm {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ProfileError::BadPermutation(n));
            }
        }
        Ok(Self {
            values: self.values,
            agent_perm,
        })
    }

    /// `(-1)` repeated `minus` times followed by `(+1)` for the rest.
    pub fn basic(n: usize, minus: usize) -> Self {
        assert!(minus <= n && n > 0, "basic point needs 0 <= L <= N, N >= 1");
        let values = (0..n)
            .map(|k| if k < minus { -S::one() } else { S::one() })
            .collect();
        Self {
            values,
            agent_perm: (0..n).collect(),
        }
    }

    /// Replaces the opinion values, keeping the agent numbering. Callers
    /// guarantee `values` is canonical.
    pub(crate) fn with_values(&self, values: Vec<S>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            agent_perm: self.agent_perm.clone(),
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn agent_perm(&self) -> &[usize] {
        &self.agent_perm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Opinions listed by original agent number.
    pub fn in_agent_order(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.values.len()];
        for (value, &agent) in self.values.iter().zip(&self.agent_perm) {
            out[agent] = value.clone();
        }
        out
    }

    pub fn count_minus_one(&self) -> usize {
        let minus = -S::one();
        self.values.iter().take_while(|v| **v == minus).count()
    }

    pub fn count_plus_one(&self) -> usize {
        let plus = S::one();
        self.values.iter().rev().take_while(|v| **v == plus).count()
    }

    /// Distinct values with multiplicities, in increasing order.
    pub fn clusters(&self) -> Vec<(S, usize)> {
        let mut out: Vec<(S, usize)> = Vec::new();
        for v in &self.values {
            match out.last_mut() {
                Some((last, count)) if last == v => *count += 1,
                _ => out.push((v.clone(), 1)),
            }
        }
        out
    }

    pub fn to_f64(&self) -> OpinionProfile<f64> {
        OpinionProfile {
            values: self.values.iter().map(Scalar::to_f64).collect(),
            agent_perm: self.agent_perm.clone(),
        }
    }

    pub fn convert<T: Scalar>(&self) -> OpinionProfile<T> {
        OpinionProfile {
            values: self
                .values
                .iter()
                .map(|v| T::from_f64(v.to_f64()).expect("finite opinion"))
                .collect(),
            agent_perm: self.agent_perm.clone(),
        }
    }
}

fn check_range<S: Scalar>(values: &[S]) -> Result<(), ProfileError> {
    let bound = S::one();
    for (i, v) in values.iter().enumerate() {
        let within = matches!(v.abs().partial_cmp(&bound), Some(Ordering::Less | Ordering::Equal));
        if !within {
            return Err(ProfileError::EntryOutOfRange {
                index: i + 1,
                value: v.to_f64(),
            });
        }
    }
    Ok(())
}

/// Max-norm distance `max_k |v_k - v'_k|` between canonical value vectors.
pub fn distance<S: Scalar>(
    a: &OpinionProfile<S>,
    b: &OpinionProfile<S>,
) -> Result<S, ProfileError> {
    if a.len() != b.len() {
        return Err(ProfileError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(max_abs_diff(a.values(), b.values()))
}

pub(crate) fn max_abs_diff<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| {
        let d = (x.clone() - y.clone()).abs();
        if d > acc {
            d
        } else {
            acc
        }
    })
}

impl<S: Scalar + fmt::Display> fmt::Display for OpinionProfile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}
