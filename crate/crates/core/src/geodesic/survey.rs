use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::integrate::{integrate_geodesic, GeodesicTrajectory, IntegrateOptions, Termination};
use crate::error::{Error, Result};
use crate::point::{pairing, Space};

/// Normalized ambient second difference below which a trajectory is straight.
pub const STRAIGHT_TOL: f64 = 1e-6;

/// Drift below which a run is at the rounding floor and its step-halving
/// ratio carries no information.
pub const DRIFT_FLOOR: f64 = 1e-12;

/// Random chart-2 initial data: `|z| ∈ [0.5, 1.5]`, profile and diagonal
/// coordinates in `[−1, 1]`, velocity components in `[−speed, speed]`.
pub fn random_initial_data(space: Space, n: usize, speed: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let d = space.dim(n);
    let modulus = rng.random_range(0.5..1.5);
    let arg = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let mut q = vec![modulus * arg.cos(), modulus * arg.sin()];
    q.extend((2..d).map(|_| rng.random_range(-1.0..1.0)));
    let v = (0..d).map(|_| speed * rng.random_range(-1.0..1.0)).collect();
    (q, v)
}

/// `max_i ‖F(qᵢ₊₁) − 2F(qᵢ) + F(qᵢ₋₁)‖ / dt²` over a uniformly sampled
/// trajectory.
pub fn max_second_difference(traj: &GeodesicTrajectory) -> f64 {
    if traj.len() < 3 {
        return 0.0;
    }
    let dt = traj.times[1] - traj.times[0];
    let points: Vec<_> = (0..traj.len()).map(|i| traj.ambient_point(i)).collect();
    points
        .windows(3)
        .map(|w| {
            let diff: Vec<_> = (0..w[0].len()).map(|m| w[2][m] - 2.0 * w[1][m] + w[0][m]).collect();
            pairing(&diff, &diff).sqrt() / (dt * dt)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Straight,
    Curved,
}

pub fn classify(traj: &GeodesicTrajectory, tol: f64) -> Classification {
    if max_second_difference(traj) <= tol {
        Classification::Straight
    } else {
        Classification::Curved
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub index: usize,
    /// Seed of the RNG that drew this trial's initial data.
    pub seed: u64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub classification: Classification,
    pub max_second_difference: f64,
    /// Largest drift of the conserved quantities at `dt`.
    pub drift: f64,
    /// Same at `dt/2`.
    pub drift_half_step: f64,
    /// `drift / drift_half_step`; about 16 for a fourth-order scheme.
    pub drift_ratio: f64,
    /// Whether both drifts are above [`DRIFT_FLOOR`], i.e. the ratio measures
    /// truncation error rather than rounding.
    pub ratio_resolved: bool,
    pub termination: Termination,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub space: Space,
    pub n: usize,
    pub seed: u64,
    pub t_final: f64,
    pub dt: f64,
    pub straight_tol: f64,
    pub straight: usize,
    pub curved: usize,
    pub max_drift: f64,
    /// Extremes of the drift ratio over resolved trials; `null` when none is.
    pub min_drift_ratio: Option<f64>,
    pub max_drift_ratio: Option<f64>,
    pub trials: Vec<TrialReport>,
}

impl SurveyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Integrates and classifies one geodesic, also running it at `dt/2`.
pub fn survey_trial(
    space: Space,
    q0: &[f64],
    v0: &[f64],
    opts: &IntegrateOptions,
) -> Result<(GeodesicTrajectory, f64, f64)> {
    let traj = integrate_geodesic(space, q0, v0, opts)?;
    let half = integrate_geodesic(space, q0, v0, &IntegrateOptions { dt: opts.dt / 2.0, ..*opts })?;
    let drift = traj.drift().max_for(space);
    let drift_half = half.drift().max_for(space);
    Ok((traj, drift, drift_half))
}

/// Integrates `trials` geodesics from random initial data and classifies
/// each as straight or curved. Trial `i` draws its data from a generator
/// seeded with the `i`-th output of a generator seeded with `seed`, so any
/// trial can be replayed alone.
pub fn geodesic_survey(
    space: Space,
    n: usize,
    trials: usize,
    t_final: f64,
    dt: f64,
    seed: u64,
) -> Result<SurveyReport> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let opts = IntegrateOptions::new(dt, t_final);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SurveyReport {
        space,
        n,
        seed,
        t_final,
        dt,
        straight_tol: STRAIGHT_TOL,
        straight: 0,
        curved: 0,
        max_drift: 0.0,
        min_drift_ratio: None,
        max_drift_ratio: None,
        trials: Vec::with_capacity(trials),
    };
    for index in 0..trials {
        let trial_seed: u64 = master.random();
        let (q0, v0) = random_initial_data(space, n, 1.0, &mut ChaCha8Rng::seed_from_u64(trial_seed));
        let (traj, drift, drift_half_step) = survey_trial(space, &q0, &v0, &opts)?;
        let max_second_difference = max_second_difference(&traj);
        let classification =
            if max_second_difference <= STRAIGHT_TOL { Classification::Straight } else { Classification::Curved };
        match classification {
            Classification::Straight => report.straight += 1,
            Classification::Curved => report.curved += 1,
        }
        let drift_ratio = drift / drift_half_step;
        let ratio_resolved = drift_half_step > DRIFT_FLOOR;
        report.max_drift = report.max_drift.max(drift);
        if ratio_resolved {
            report.min_drift_ratio = Some(report.min_drift_ratio.map_or(drift_ratio, |m| m.min(drift_ratio)));
            report.max_drift_ratio = Some(report.max_drift_ratio.map_or(drift_ratio, |m| m.max(drift_ratio)));
        }
        report.trials.push(TrialReport {
            index,
            seed: trial_seed,
            position: q0,
            velocity: v0,
            classification,
            max_second_difference,
            drift,
            drift_half_step,
            drift_ratio,
            ratio_resolved,
            termination: traj.termination.clone(),
        });
    }
    Ok(report)
}
