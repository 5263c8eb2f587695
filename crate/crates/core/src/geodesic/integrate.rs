use std::fmt::Write as _;

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::jet::{vertex_count, EmbeddingJet};
use crate::error::{Error, Result};
use crate::point::{pairing, Space};

/// Settings for [`integrate_geodesic`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Halt when the metric condition number exceeds this.
    pub max_condition: f64,
    /// Halt when `|z|` falls below this fraction of its initial value.
    pub min_z_ratio: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { dt: 1e-3, t_final: 1.0, max_condition: 1e12, min_z_ratio: 1e-8 }
    }
}

impl IntegrateOptions {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, ..Self::default() }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// `z` collapsed towards 0 or the state stopped being finite.
    ChartExit {
        t: f64,
        reason: String,
    },
    IllConditioned {
        t: f64,
        condition: f64,
    },
}

/// Quantities constant along geodesics of `M(n)`: squared speed `k₀`, the
/// angular quantity `k₁ = (1 + Σ rⱼ²)(z′·iz)` and `kⱼ = rⱼ′|z|²` for
/// `j = 3, …, n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conserved {
    pub k0: f64,
    pub k1: f64,
    pub k: Vec<f64>,
}

/// A sampled chart-2 curve with velocities and accelerations.
///
/// Accelerations come from whoever produced the curve: the geodesic ODE for
/// integrated trajectories, exact derivatives for explicit curves.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub space: Space,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub accelerations: Vec<Vec<f64>>,
    pub conserved: Vec<Conserved>,
    pub termination: Termination,
}

/// Largest deviation of each conserved quantity from its initial value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    pub k0: f64,
    pub k1: f64,
    pub k: Vec<f64>,
}

impl Drift {
    /// Largest drift among the quantities that are invariants in `space`:
    /// all of them on `M(n)`, only the speed on `L(n)`.
    pub fn max_for(&self, space: Space) -> f64 {
        match space {
            Space::M => self.k.iter().fold(self.k0.max(self.k1), |a, &b| a.max(b)),
            Space::L => self.k0,
        }
    }
}

pub(crate) fn conserved_at(jet: &EmbeddingJet, qdot: &[f64]) -> Conserved {
    let n = jet.n();
    let q = &jet.coords;
    let v = jet.push_forward(qdot);
    let k0 = pairing(&v, &v);
    let rr: f64 = q[2..n].iter().map(|r| r * r).sum();
    let z_dot_iz = -qdot[0] * q[1] + qdot[1] * q[0];
    let zz = q[0] * q[0] + q[1] * q[1];
    Conserved { k0, k1: (1.0 + rr) * z_dot_iz, k: qdot[2..n].iter().map(|rd| rd * zz).collect() }
}

/// Solves `g q̈ = −⟨⟨F″(q̇, q̇), ∂F⟩⟩` at a jet.
pub(crate) fn geodesic_acceleration(jet: &EmbeddingJet, qdot: &[f64]) -> Option<Vec<f64>> {
    let d = jet.dim();
    let g = jet.metric().g;
    let second = jet.second_contracted(qdot);
    let rhs = DVector::from_fn(d, |k, _| -pairing(&second, &jet.first[k]));
    let chol = Cholesky::new(g)?;
    Some(chol.solve(&rhs).iter().copied().collect())
}

fn derivative(space: Space, state: &[f64]) -> Option<Vec<f64>> {
    let d = state.len() / 2;
    let jet = EmbeddingJet::at(space, &state[..d]).ok()?;
    let acc = geodesic_acceleration(&jet, &state[d..])?;
    let mut out = Vec::with_capacity(2 * d);
    out.extend_from_slice(&state[d..]);
    out.extend(acc);
    Some(out)
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

/// One classical fourth-order Runge–Kutta step of the first-order system
/// `(q, q̇)′ = (q̇, q̈(q, q̇))`.
pub fn geodesic_step(space: Space, state: &[f64], dt: f64) -> Option<Vec<f64>> {
    let k1 = derivative(space, state)?;
    let k2 = derivative(space, &axpy(state, dt / 2.0, &k1))?;
    let k3 = derivative(space, &axpy(state, dt / 2.0, &k2))?;
    let k4 = derivative(space, &axpy(state, dt, &k3))?;
    Some((0..state.len()).map(|i| state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Integrates the geodesic with initial chart position `q0` and velocity `v0`
/// on `[0, t_final]` with a fixed step.
///
/// Leaving the chart or hitting an ill-conditioned metric stops the
/// integration; the samples up to that point are returned and the reason is in
/// [`GeodesicTrajectory::termination`].
pub fn integrate_geodesic(space: Space, q0: &[f64], v0: &[f64], opts: &IntegrateOptions) -> Result<GeodesicTrajectory> {
    if q0.len() != v0.len() {
        return Err(Error::DimensionMismatch { expected: q0.len(), got: v0.len() });
    }
    if !(opts.dt > 0.0 && opts.dt.is_finite()) || !(opts.t_final >= 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad time grid dt = {}, T = {}", opts.dt, opts.t_final)));
    }
    let steps = (opts.t_final / opts.dt).round();
    if opts.dt < 1e-12 * opts.t_final.max(1.0) || steps > 1e8 {
        return Err(Error::InvalidArgument(format!("step underflow: dt = {:e}", opts.dt)));
    }
    if v0.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("initial velocity must be nonzero".into()));
    }
    EmbeddingJet::at(space, q0)?;
    let steps = steps as usize;
    let d = q0.len();
    let z0 = Complex64::new(q0[0], q0[1]).norm();

    let mut traj = GeodesicTrajectory {
        space,
        times: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
        accelerations: Vec::with_capacity(steps + 1),
        conserved: Vec::with_capacity(steps + 1),
        termination: Termination::Completed,
    };

    let mut state: Vec<f64> = q0.iter().chain(v0).copied().collect();
    for i in 0..=steps {
        let t = i as f64 * opts.dt;
        if state.iter().any(|v| !v.is_finite()) {
            traj.termination = Termination::ChartExit { t, reason: "state is no longer finite".into() };
            break;
        }
        let zn = Complex64::new(state[0], state[1]).norm();
        if zn <= opts.min_z_ratio * z0 {
            traj.termination = Termination::ChartExit { t, reason: format!("|z| = {zn:e} left the chart U_2") };
            break;
        }
        let jet = EmbeddingJet::at(space, &state[..d])?;
        let condition = jet.metric().condition_number();
        if condition > opts.max_condition {
            traj.termination = Termination::IllConditioned { t, condition };
            break;
        }
        let Some(acc) = geodesic_acceleration(&jet, &state[d..]) else {
            traj.termination = Termination::IllConditioned { t, condition: f64::INFINITY };
            break;
        };
        traj.conserved.push(conserved_at(&jet, &state[d..]));
        traj.times.push(t);
        traj.positions.push(state[..d].to_vec());
        traj.velocities.push(state[d..].to_vec());
        traj.accelerations.push(acc);
        if i == steps {
            break;
        }
        match geodesic_step(space, &state, opts.dt) {
            Some(next) => state = next,
            None => {
                traj.termination =
                    Termination::ChartExit { t, reason: "metric lost positive definiteness within a step".into() };
                break;
            }
        }
    }
    Ok(traj)
}

impl GeodesicTrajectory {
    /// Builds a trajectory from explicit samples; conserved quantities are
    /// evaluated from positions and velocities.
    pub fn from_samples(
        space: Space,
        times: Vec<f64>,
        positions: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        accelerations: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let len = times.len();
        if positions.len() != len || velocities.len() != len || accelerations.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: positions.len() });
        }
        let conserved = positions
            .iter()
            .zip(&velocities)
            .map(|(q, v)| Ok(conserved_at(&EmbeddingJet::at(space, q)?, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, times, positions, velocities, accelerations, conserved, termination: Termination::Completed })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n(&self) -> usize {
        vertex_count(self.space, self.positions[0].len())
    }

    pub fn jet(&self, i: usize) -> EmbeddingJet {
        EmbeddingJet::at(self.space, &self.positions[i]).expect("samples stay in the chart")
    }

    /// Diagonal part `λ(t) = u + iv` on `L(n)`; zero on `M(n)`.
    pub fn lambda(&self, i: usize) -> Complex64 {
        match self.space {
            Space::M => Complex64::new(0.0, 0.0),
            Space::L => {
                let n = self.n();
                Complex64::new(self.positions[i][n], self.positions[i][n + 1])
            }
        }
    }

    /// Ambient curve `F(q(tᵢ))`.
    pub fn ambient_point(&self, i: usize) -> Vec<Complex64> {
        self.jet(i).value
    }

    /// Ambient acceleration at sample `i` from the stored chart acceleration.
    pub fn ambient_acceleration(&self, i: usize) -> Vec<Complex64> {
        self.jet(i).ambient_acceleration(&self.velocities[i], &self.accelerations[i])
    }

    pub fn drift(&self) -> Drift {
        let first = &self.conserved[0];
        let mut drift = Drift { k0: 0.0, k1: 0.0, k: vec![0.0; first.k.len()] };
        for c in &self.conserved {
            drift.k0 = drift.k0.max((c.k0 - first.k0).abs());
            drift.k1 = drift.k1.max((c.k1 - first.k1).abs());
            for (d, (a, b)) in drift.k.iter_mut().zip(c.k.iter().zip(&first.k)) {
                *d = d.max((a - b).abs());
            }
        }
        drift
    }

    /// CSV with header `t,x,y,r3..rn,[u,v,]k0,k1,k3..kn`, shortest round-trip
    /// formatting of every double.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::from("t,x,y");
        for j in 3..=n {
            let _ = write!(out, ",r{j}");
        }
        if self.space == Space::L {
            out.push_str(",u,v");
        }
        out.push_str(",k0,k1");
        for j in 3..=n {
            let _ = write!(out, ",k{j}");
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{}", self.times[i]);
            for v in &self.positions[i] {
                let _ = write!(out, ",{v}");
            }
            let c = &self.conserved[i];
            let _ = write!(out, ",{},{}", c.k0, c.k1);
            for k in &c.k {
                let _ = write!(out, ",{k}");
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the same initial data at `dt` and `dt/2` and returns both
/// trajectories with the ratio of their invariant drifts (≈ 16 for a
/// fourth-order method in the asymptotic regime).
pub fn richardson_drift(
    space: Space,
    q0: &[f64],
    v0: &[f64],
    opts: &IntegrateOptions,
) -> Result<(GeodesicTrajectory, GeodesicTrajectory, f64)> {
    let coarse = integrate_geodesic(space, q0, v0, opts)?;
    let fine = integrate_geodesic(space, q0, v0, &IntegrateOptions { dt: opts.dt / 2.0, ..*opts })?;
    let ratio = coarse.drift().max_for(space) / fine.drift().max_for(space);
    Ok((coarse, fine, ratio))
}
