//! Experiment execution and result export.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigErrors, ExperimentConfig, InitialSpec};
use crate::dynamics::{iterate, ConvergenceStatus, IterationLimits, Trajectory};
use crate::fixedpoint::{
    classify_fixed_point, classify_with_mode, separation_certificate, basin_certificate,
    BasinCertificate, FixedMode, FixedPointClass, SeparationCertificate,
};
use crate::profile::{ModelParams, OpinionProfile, ParamError, ProfileError};
use crate::spectral::{
    frozen_block, predict_limit, spectrum_check, stabilization_step, LimitPrediction, SpectralError,
    SpectralReport,
};

/// Fixed-point tolerance used to classify tolerance-converged endpoints.
pub const ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("trajectory export needs record_all")]
    NotRecorded,
}

impl HarnessError {
    /// Process exit code: 1 for invalid input, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Params(_) | Self::Profile(_) => 1,
            _ => 2,
        }
    }
}

pub fn initial_values(spec: &InitialSpec) -> Vec<f64> {
    match spec {
        InitialSpec::Explicit(v) => v.clone(),
        InitialSpec::Blocks(blocks) => blocks
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(v, c))
            .collect(),
        InitialSpec::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    }
}

pub fn initial_profile(config: &ExperimentConfig) -> Result<OpinionProfile, HarnessError> {
    Ok(OpinionProfile::from_raw(initial_values(&config.initial))?)
}

pub fn params_for(config: &ExperimentConfig, eps: f64) -> Result<ModelParams, HarnessError> {
    Ok(ModelParams::new(config.h, eps)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificates {
    pub basin: Option<BasinCertificate>,
    pub separation: Option<SeparationCertificate>,
}

/// Result record of one run. Field order is the serialized key order.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub n: usize,
    pub h: f64,
    pub eps: f64,
    pub status: ConvergenceStatus,
    pub steps_taken: usize,
    pub minus_count: usize,
    pub plus_count: usize,
    /// Sign of the option held by more agents at ±1; 0 on a tie.
    pub majority: i8,
    pub clusters: Vec<Cluster>,
    pub classification: Option<FixedPointClass>,
    pub classification_error: Option<String>,
    pub certificates: Certificates,
    /// Final opinions listed by original agent number.
    pub final_profile: Vec<f64>,
    /// Not serialized so that summaries of identical runs are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
}

fn classify_endpoint(traj: &Trajectory, params: &ModelParams) -> (Option<FixedPointClass>, Option<String>) {
    let terminal = traj.terminal();
    let result = match traj.status() {
        ConvergenceStatus::ExactFixedPoint(_) => classify_fixed_point(terminal, params),
        _ => classify_with_mode(terminal, params, &FixedMode::Tolerance(ENDPOINT_TOL)),
    };
    match result {
        Ok(class) => (Some(class), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn majority(minus: usize, plus: usize) -> i8 {
    match minus.cmp(&plus) {
        std::cmp::Ordering::Greater => -1,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => 0,
    }
}

pub fn summarize(
    initial: &OpinionProfile,
    params: &ModelParams,
    trajectory: &Trajectory,
    wall_time: Duration,
) -> RunSummary {
    let terminal = trajectory.terminal();
    let (classification, classification_error) = classify_endpoint(trajectory, params);
    let (minus_count, plus_count) = (terminal.count_minus_one(), terminal.count_plus_one());
    RunSummary {
        n: terminal.len(),
        h: *params.h(),
        eps: *params.eps(),
        status: trajectory.status(),
        steps_taken: trajectory.steps_taken(),
        minus_count,
        plus_count: if minus_count == terminal.len() { 0 } else { plus_count },
        majority: majority(minus_count, plus_count),
        clusters: terminal
            .clusters()
            .into_iter()
            .map(|(value, count)| Cluster { value, count })
            .collect(),
        classification,
        classification_error,
        certificates: Certificates {
            basin: basin_certificate(initial, params),
            separation: separation_certificate(initial, params),
        },
        final_profile: terminal.in_agent_order(),
        wall_time,
    }
}

fn limits_for(config: &ExperimentConfig, record_all: bool) -> IterationLimits {
    let mut limits = IterationLimits::new(config.max_steps, config.tol);
    limits.record_all = record_all;
    limits
}

/// Runs a single experiment with the configured `eps`, without writing files.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    execute_with_eps(config, config.eps)
}

fn execute_with_eps(config: &ExperimentConfig, eps: f64) -> Result<RunOutcome, HarnessError> {
    let params = params_for(config, eps)?;
    let initial = initial_profile(config)?;
    let record_all = config.record_all || config.trajectory_path.is_some();
    let started = Instant::now();
    let trajectory = iterate(&initial, &params, &limits_for(config, record_all));
    let wall_time = started.elapsed();
    let summary = summarize(&initial, &params, &trajectory, wall_time);
    Ok(RunOutcome { summary, trajectory })
}

/// `simulate`: runs the experiment and writes the configured outputs.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let outcome = execute(config)?;
    if let Some(path) = &config.summary_path {
        std::fs::write(path, outcome.summary.to_json())?;
    }
    if let Some(path) = &config.trajectory_path {
        export_trajectory(&outcome.trajectory, path)?;
    }
    Ok(outcome)
}

/// Writes `step,agent_1,...,agent_N` rows in original agent order.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, out: W) -> Result<(), HarnessError> {
    if !trajectory.recorded_all() {
        return Err(HarnessError::NotRecorded);
    }
    let n = trajectory.initial().len();
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string()];
    header.extend((1..=n).map(|k| format!("agent_{k}")));
    writer.write_record(&header)?;
    for (step, state) in trajectory.states().iter().enumerate() {
        let mut row = vec![step.to_string()];
        row.extend(state.in_agent_order().iter().map(f64::to_string));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn export_trajectory(trajectory: &Trajectory, path: &Path) -> Result<(), HarnessError> {
    let file = BufWriter::new(File::create(path)?);
    write_trajectory_csv(trajectory, file)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub summary: RunSummary,
}

/// `sweep`: one independent run per `sweep_eps` value, same initial profile.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError> {
    let mut quiet = config.clone();
    quiet.trajectory_path = None;
    quiet.record_all = false;
    let values = if config.sweep_eps.is_empty() {
        vec![config.eps]
    } else {
        config.sweep_eps.clone()
    };
    values
        .par_iter()
        .map(|&eps| {
            execute_with_eps(&quiet, eps).map(|outcome| SweepRow {
                eps,
                summary: outcome.summary,
            })
        })
        .collect()
}

fn cluster_text(clusters: &[Cluster]) -> String {
    clusters
        .iter()
        .map(|c| format!("{}:{}", c.value, c.count))
        .collect::<Vec<_>>()
        .join(";")
}

/// CSV columns: `eps,status,step,minus_count,plus_count,majority,clusters`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["eps", "status", "step", "minus_count", "plus_count", "majority", "clusters"])?;
    for row in rows {
        let s = &row.summary;
        let (status, step) = match s.status {
            ConvergenceStatus::ExactFixedPoint(n) => ("exact", n.to_string()),
            ConvergenceStatus::ToleranceConverged(n) => ("tolerance", n.to_string()),
            ConvergenceStatus::MaxStepsExceeded => ("max-steps", String::new()),
        };
        writer.write_record([
            row.eps.to_string(),
            status.to_string(),
            step,
            s.minus_count.to_string(),
            s.plus_count.to_string(),
            s.majority.to_string(),
            cluster_text(&s.clusters),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialClassification {
    pub classification: Option<FixedPointClass>,
    pub classification_error: Option<String>,
    pub certificates: Certificates,
}

/// `classify`: the initial profile as-is.
pub fn classify_initial(config: &ExperimentConfig) -> Result<InitialClassification, HarnessError> {
    let params = params_for(config, config.eps)?;
    let initial = initial_profile(config)?;
    let (classification, classification_error) = match classify_fixed_point(&initial, &params) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(InitialClassification {
        classification,
        classification_error,
        certificates: Certificates {
            basin: basin_certificate(&initial, &params),
            separation: separation_certificate(&initial, &params),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOutcome {
    pub status: ConvergenceStatus,
    pub stabilization_step: Option<usize>,
    /// Range `[offset, offset + dim)` of the unclamped block.
    pub block_offset: usize,
    pub block_dim: usize,
    pub report: SpectralReport,
    pub prediction: Option<LimitPrediction>,
    pub prediction_error: Option<String>,
}

/// `spectrum`: iterate with a full record, find the stabilization step and
/// analyse the frozen block there.
pub fn spectrum_analysis(config: &ExperimentConfig) -> Result<SpectrumOutcome, HarnessError> {
    let params = params_for(config, config.eps)?;
    let initial = initial_profile(config)?;
    let trajectory = iterate(&initial, &params, &limits_for(config, true));
    let stabilization = stabilization_step(&trajectory, &params)?;
    let state = &trajectory.states()[stabilization.unwrap_or(trajectory.states().len() - 1)];
    let matrix = frozen_block(state, &params)?;
    let mut report = spectrum_check(&matrix, config.h);
    let (prediction, prediction_error) = match stabilization.map(|_| predict_limit(state, &matrix, &params)) {
        Some(Ok(p)) => (Some(p), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, Some("trajectory did not stabilize within the record".into())),
    };
    report.limit = prediction.as_ref().map(|p| p.limit.clone());
    Ok(SpectrumOutcome {
        status: trajectory.status(),
        stabilization_step: stabilization,
        block_offset: matrix.offset(),
        block_dim: matrix.dim(),
        report,
        prediction,
        prediction_error,
    })
}

/// Initial profile of the election example: blocks of 20, 28, 12, 30 and
/// 10 agents at -0.6, -0.4, -0.01, 0.1 and 0.2.
///
/// The usual description of this profile mixes half-open and closed index
/// ranges; the sizes here read every range as half-open so they sum to 100.
/// Reading one boundary as closed moves a single agent between neighbouring
/// blocks, hence the one-agent slack in [`reproduce_election`].
pub fn election_blocks() -> Vec<(f64, usize)> {
    vec![(-0.6, 20), (-0.4, 28), (-0.01, 12), (0.1, 30), (0.2, 10)]
}

pub fn election_config(eps: f64) -> ExperimentConfig {
    ExperimentConfig::new(0.1, eps, InitialSpec::Blocks(election_blocks()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionCheck {
    pub eps: f64,
    pub expected_minus: Vec<usize>,
    pub expected_step: usize,
    pub step_slack: usize,
    pub minus_count: usize,
    pub plus_count: usize,
    pub step: Option<usize>,
    pub runtime_ms: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub checks: Vec<ReproductionCheck>,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs both election runs and checks split, step (±2) and runtime (< 1 s).
/// The −1 cluster may be one agent larger than reported because of the mixed
/// block-index conventions of the example.
pub fn reproduce_election() -> Result<ReproductionReport, HarnessError> {
    let cases = [(0.45, vec![47, 48], 27), (0.05, vec![59, 60], 49)];
    let mut checks = Vec::new();
    for (eps, expected_minus, expected_step) in cases {
        let outcome = execute(&election_config(eps))?;
        let s = &outcome.summary;
        let step = match s.status {
            ConvergenceStatus::ExactFixedPoint(n) => Some(n),
            _ => None,
        };
        let runtime = s.wall_time.as_secs_f64();
        let basic = matches!(s.classification, Some(FixedPointClass::Basic { .. }));
        let passed = basic
            && expected_minus.contains(&s.minus_count)
            && s.minus_count + s.plus_count == s.n
            && step.is_some_and(|n| n.abs_diff(expected_step) <= 2)
            && runtime < 1.0;
        checks.push(ReproductionCheck {
            eps,
            expected_minus,
            expected_step,
            step_slack: 2,
            minus_count: s.minus_count,
            plus_count: s.plus_count,
            step,
            runtime_ms: runtime * 1e3,
            passed,
        });
    }
    Ok(ReproductionReport { checks })
}
