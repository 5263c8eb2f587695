use num_complex::Complex64;
use serde::Serialize;

use super::integrate::GeodesicTrajectory;
use crate::point::{pairing, Space};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real dot product of two complex numbers seen as plane vectors.
fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Chart-2 quantities of a sample, named as in the geodesic conditions.
struct Sample<'a> {
    z: Complex64,
    dz: Complex64,
    ddz: Complex64,
    r: &'a [f64],
    dr: &'a [f64],
    ddr: &'a [f64],
}

impl<'a> Sample<'a> {
    fn new(traj: &'a GeodesicTrajectory, i: usize) -> Self {
        let n = traj.n();
        let (q, v, a) = (&traj.positions[i], &traj.velocities[i], &traj.accelerations[i]);
        Sample {
            z: Complex64::new(q[0], q[1]),
            dz: Complex64::new(v[0], v[1]),
            ddz: Complex64::new(a[0], a[1]),
            r: &q[2..n],
            dr: &v[2..n],
            ddr: &a[2..n],
        }
    }

    fn sum_r2(&self) -> f64 {
        self.r.iter().map(|r| r * r).sum()
    }
}

/// Per-sample values of the `M(n)` geodesic conditions.
///
/// The conserved forms (eqs. I, III, IV as constants) are reported as
/// deviations from their value at the first sample; the pointwise forms as the
/// value itself. Second derivatives are those stored in the trajectory, which
/// for integrated curves come from the ODE right-hand side.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualsM {
    /// `(1 + Σ rⱼ²)(z′·iz) − k₁`.
    pub angular: Vec<f64>,
    /// `z″·z`.
    pub z_orthogonality: Vec<f64>,
    /// `max_j |rⱼ′‖z‖² − kⱼ|`.
    pub momenta: Vec<f64>,
    /// Expanded squared speed minus `k₀`.
    pub speed: Vec<f64>,
    /// `(k₀ − Σ kⱼ (rⱼ/rⱼ′)′ rⱼ′)/(1 + Σ rⱼ²) − ‖z′‖²`, with the `j`-term
    /// written as `‖z‖²(rⱼ′² − rⱼrⱼ″)` where `rⱼ′` vanishes.
    pub speed_reduced: Vec<f64>,
    /// `max_v |⟨⟨γ″, v⟩⟩|` over the frame `iγ, z e₂, …, z eₙ`.
    pub orthogonality: Vec<f64>,
}

/// Maxima of [`ResidualsM`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualsMSummary {
    pub angular: f64,
    pub z_orthogonality: f64,
    pub momenta: f64,
    pub speed: f64,
    pub speed_reduced: f64,
    pub orthogonality: f64,
}

impl ResidualsMSummary {
    pub fn max(&self) -> f64 {
        [self.angular, self.z_orthogonality, self.momenta, self.speed, self.speed_reduced, self.orthogonality]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl ResidualsM {
    pub fn summary(&self) -> ResidualsMSummary {
        ResidualsMSummary {
            angular: max_abs(&self.angular),
            z_orthogonality: max_abs(&self.z_orthogonality),
            momenta: max_abs(&self.momenta),
            speed: max_abs(&self.speed),
            speed_reduced: max_abs(&self.speed_reduced),
            orthogonality: max_abs(&self.orthogonality),
        }
    }
}

fn angular(s: &Sample) -> f64 {
    (1.0 + s.sum_r2()) * dot(s.dz, I * s.z)
}

fn expanded_speed(s: &Sample) -> f64 {
    let zz = s.z.norm_sqr();
    let zdz = dot(s.z, s.dz);
    let mut k0 = (1.0 + s.sum_r2()) * s.dz.norm_sqr();
    for (r, dr) in s.r.iter().zip(s.dr) {
        k0 += dr * dr * zz + 2.0 * dr * r * zdz;
    }
    k0
}

/// Residuals of the `M(n)` geodesic conditions along a chart-2 trajectory.
pub fn residuals_m(traj: &GeodesicTrajectory) -> ResidualsM {
    assert_eq!(traj.space, Space::M, "residuals_m needs an M(n) trajectory");
    let first = Sample::new(traj, 0);
    let k1 = angular(&first);
    let k0 = expanded_speed(&first);
    let zz0 = first.z.norm_sqr();
    let kj: Vec<f64> = first.dr.iter().map(|dr| dr * zz0).collect();

    let len = traj.len();
    let mut out = ResidualsM {
        angular: Vec::with_capacity(len),
        z_orthogonality: Vec::with_capacity(len),
        momenta: Vec::with_capacity(len),
        speed: Vec::with_capacity(len),
        speed_reduced: Vec::with_capacity(len),
        orthogonality: Vec::with_capacity(len),
    };
    for i in 0..len {
        let s = Sample::new(traj, i);
        let zz = s.z.norm_sqr();
        out.angular.push(angular(&s) - k1);
        out.z_orthogonality.push(dot(s.ddz, s.z));
        out.momenta.push(s.dr.iter().zip(&kj).map(|(dr, k)| (dr * zz - k).abs()).fold(0.0, f64::max));
        out.speed.push(expanded_speed(&s) - k0);

        let mut num = k0;
        for (j, k) in kj.iter().enumerate() {
            let (r, dr, ddr) = (s.r[j], s.dr[j], s.ddr[j]);
            num -= if dr.abs() > 1e-9 { k * (dr * dr - r * ddr) / dr } else { zz * (dr * dr - r * ddr) };
        }
        out.speed_reduced.push(num / (1.0 + s.sum_r2()) - s.dz.norm_sqr());

        let jet = traj.jet(i);
        let acc = traj.ambient_acceleration(i);
        out.orthogonality.push(frame_m(&jet.value, s.z).iter().map(|v| pairing(&acc, v).abs()).fold(0.0, f64::max));
    }
    out
}

/// `iγ, z e₂, …, z eₙ` at `γ`.
fn frame_m(gamma: &[Complex64], z: Complex64) -> Vec<Vec<Complex64>> {
    let n = gamma.len();
    let mut frame = Vec::with_capacity(n);
    frame.push(gamma.iter().map(|g| I * g).collect());
    for j in 1..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = z;
        frame.push(e);
    }
    frame
}

/// Comparison of a displayed expansion with the definitional value.
#[derive(Debug, Clone, Serialize)]
pub struct DisplayedForm {
    pub condition: &'static str,
    /// Largest `|displayed − definitional|` along the trajectory.
    pub max_discrepancy: f64,
    pub agrees: bool,
    pub note: &'static str,
}

/// Per-sample values of the `L(n)` geodesic conditions I′–V′, computed
/// definitionally as `⟨⟨γ̂″, vⱼ⟩⟩` for the `n + 2` frame vectors and as the
/// drift of the squared speed.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualsL {
    /// `⟨⟨γ̂″, iγ⟩⟩`.
    pub cond_i: Vec<f64>,
    /// `⟨⟨γ̂″, z e₂⟩⟩`.
    pub cond_ii: Vec<f64>,
    /// `max_j |⟨⟨γ̂″, z eⱼ⟩⟩|`, `j ≥ 3`.
    pub cond_iii: Vec<f64>,
    /// `max(|⟨⟨γ̂″, 1⃗⟩⟩|, |⟨⟨γ̂″, i⃗⟩⟩|)`.
    pub cond_iv: Vec<f64>,
    /// `‖γ̂′‖² − k₀`.
    pub cond_v: Vec<f64>,
    pub displayed: Vec<DisplayedForm>,
}

/// Maxima of the definitional conditions of [`ResidualsL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualsLSummary {
    pub cond_i: f64,
    pub cond_ii: f64,
    pub cond_iii: f64,
    pub cond_iv: f64,
    pub cond_v: f64,
}

impl ResidualsLSummary {
    pub fn max(&self) -> f64 {
        [self.cond_i, self.cond_ii, self.cond_iii, self.cond_iv, self.cond_v].into_iter().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl ResidualsL {
    pub fn summary(&self) -> ResidualsLSummary {
        ResidualsLSummary {
            cond_i: max_abs(&self.cond_i),
            cond_ii: max_abs(&self.cond_ii),
            cond_iii: max_abs(&self.cond_iii),
            cond_iv: max_abs(&self.cond_iv),
            cond_v: max_abs(&self.cond_v),
        }
    }
}

/// Relative agreement threshold for displayed forms.
const DISPLAYED_TOL: f64 = 1e-9;

/// Residuals of the `L(n)` geodesic conditions along a chart-2 trajectory,
/// plus a comparison of each condition's expanded textbook form against the
/// definitional value.
pub fn residuals_l(traj: &GeodesicTrajectory) -> ResidualsL {
    assert_eq!(traj.space, Space::L, "residuals_l needs an L(n) trajectory");
    let n = traj.n();
    let len = traj.len();
    let speed2 = |i: usize| {
        let v = traj.jet(i).push_forward(&traj.velocities[i]);
        pairing(&v, &v)
    };
    let k0 = speed2(0);

    let mut out = ResidualsL {
        cond_i: Vec::with_capacity(len),
        cond_ii: Vec::with_capacity(len),
        cond_iii: Vec::with_capacity(len),
        cond_iv: Vec::with_capacity(len),
        cond_v: Vec::with_capacity(len),
        displayed: Vec::new(),
    };
    // (displayed − definitional, scale) per form
    let mut gaps = [(0.0f64, 0.0f64); 5];
    let mut note = |k: usize, gap: f64, scale: f64| {
        gaps[k].0 = gaps[k].0.max(gap.abs());
        gaps[k].1 = gaps[k].1.max(scale.abs());
    };

    for i in 0..len {
        let s = Sample::new(traj, i);
        let jet = traj.jet(i);
        let lam = traj.lambda(i);
        let dlam = Complex64::new(traj.velocities[i][n], traj.velocities[i][n + 1]);
        let ddlam = Complex64::new(traj.accelerations[i][n], traj.accelerations[i][n + 1]);
        let gamma: Vec<Complex64> = jet.value.iter().map(|v| v - lam).collect();
        let acc = jet.ambient_acceleration(&traj.velocities[i], &traj.accelerations[i]);
        let frame = frame_m(&gamma, s.z);

        let c1 = pairing(&acc, &frame[0]);
        let c2 = pairing(&acc, &frame[1]);
        let c3: Vec<f64> = frame[2..].iter().map(|v| pairing(&acc, v)).collect();
        let sum_acc: Complex64 = acc.iter().sum();
        let (c4_one, c4_i) = (sum_acc.re, sum_acc.im);
        out.cond_i.push(c1);
        out.cond_ii.push(c2);
        out.cond_iii.push(max_abs(&c3));
        out.cond_iv.push(c4_one.abs().max(c4_i.abs()));
        let v2 = speed2(i);
        out.cond_v.push(v2 - k0);

        let sum_r: f64 = s.r.iter().sum();
        let sum_dr: f64 = s.dr.iter().sum();
        let sum_ddr: f64 = s.ddr.iter().sum();
        let sum_rdr: f64 = s.r.iter().zip(s.dr).map(|(r, dr)| r * dr).sum();

        let d10 = dot((1.0 + s.sum_r2()) * s.ddz + 2.0 * sum_rdr * s.dz + (1.0 + sum_r) * ddlam, I * s.z);
        note(0, d10 - c1, c1.abs() + d10.abs());
        let d11 = dot(s.ddz, s.z) + dot(ddlam, s.z);
        note(1, d11 - c2, c2.abs() + d11.abs());
        for (j, c) in c3.iter().enumerate() {
            let d12 = dot(s.z, s.ddr[j] * s.z + 2.0 * s.dr[j] * s.dz + (s.r[j] - 1.0) * s.ddz);
            note(2, d12 - c, c.abs() + d12.abs());
        }
        let d13 = (1.0 + sum_r) * s.ddz + 2.0 * sum_dr * s.dz + sum_ddr * s.z + n as f64 * ddlam;
        note(3, (d13 - sum_acc).norm(), sum_acc.norm() + d13.norm());
        let d_v =
            expanded_speed(&s) + sum_dr * dot(s.z, dlam) + (1.0 + sum_r) * dot(s.dz, dlam) + n as f64 * dlam.norm_sqr();
        note(4, d_v - v2, v2.abs());
    }

    let forms: [(&str, &str); 5] = [
        ("I'", "expansion of <<γ̂'', iγ>>"),
        ("II'", "expansion of <<γ̂'', z e_2>>"),
        ("III'", "uses II' to replace z·λ'' by −z·z''; differs from the definition by the II' residual"),
        ("IV'", "complex form: real part pairs with 1⃗, imaginary part with i⃗"),
        ("V'", "cross terms <<γ', λ'1⃗>> appear without their factor 2"),
    ];
    out.displayed = forms
        .iter()
        .zip(gaps)
        .map(|(&(condition, note), (gap, scale))| DisplayedForm {
            condition,
            max_discrepancy: gap,
            agrees: gap <= DISPLAYED_TOL * scale.max(1.0),
            note,
        })
        .collect();
    out
}

/// Monotonicity consequences of the momenta `kⱼ = rⱼ′‖z‖²`: each `rⱼ` is
/// constant or strictly monotone, and for `kⱼ, kₘ ≠ 0` the combination
/// `rₘ − (kₘ/kⱼ) rⱼ` is constant.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    /// Per `j = 3, …, n`: `"constant"`, `"increasing"`, `"decreasing"` or
    /// `"violated"`.
    pub behaviour: Vec<&'static str>,
    /// Largest drift of `rₘ − (kₘ/kⱼ) rⱼ` over all pairs with nonzero momenta.
    pub max_pair_drift: f64,
}

impl MonotonicityReport {
    pub fn holds(&self, tol: f64) -> bool {
        !self.behaviour.contains(&"violated") && self.max_pair_drift <= tol
    }
}

/// Checks that each `rⱼ` is monotone where `kⱼ ≠ 0`; `tol` decides when a momentum counts as
/// zero and when an `rⱼ` series counts as constant.
pub fn monotonicity(traj: &GeodesicTrajectory, tol: f64) -> MonotonicityReport {
    let n = traj.n();
    let k = &traj.conserved[0].k;
    let series = |j: usize| traj.positions.iter().map(move |q| q[j]);
    let mut behaviour = Vec::with_capacity(n - 2);
    for (idx, kj) in k.iter().enumerate() {
        let r: Vec<f64> = series(idx + 2).collect();
        let steps: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
        let b = if kj.abs() <= tol {
            if r.iter().all(|x| (x - r[0]).abs() <= tol) {
                "constant"
            } else {
                "violated"
            }
        } else if kj > &0.0 && steps.iter().all(|&d| d > 0.0) {
            "increasing"
        } else if kj < &0.0 && steps.iter().all(|&d| d < 0.0) {
            "decreasing"
        } else {
            "violated"
        };
        behaviour.push(b);
    }
    let mut max_pair_drift: f64 = 0.0;
    for j in 0..k.len() {
        for m in 0..k.len() {
            if j == m || k[j].abs() <= tol || k[m].abs() <= tol {
                continue;
            }
            let ratio = k[m] / k[j];
            let c0 = traj.positions[0][m + 2] - ratio * traj.positions[0][j + 2];
            for q in &traj.positions {
                max_pair_drift = max_pair_drift.max((q[m + 2] - ratio * q[j + 2] - c0).abs());
            }
        }
    }
    MonotonicityReport { behaviour, max_pair_drift }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::integrate::{integrate_geodesic, IntegrateOptions};

    #[test]
    fn straight_line_residuals_vanish() {
        let traj =
            integrate_geodesic(Space::M, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &IntegrateOptions::default()).unwrap();
        assert!(residuals_m(&traj).summary().max() <= 1e-12);
    }

    #[test]
    fn affine_translate_of_straight_line() {
        // z = 1, r₃ = t, r₄ = 0.5, λ(t) = (0.3 − 0.2i) t
        let traj = integrate_geodesic(
            Space::L,
            &[1.0, 0.0, 0.0, 0.5, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, 0.3, -0.2],
            &IntegrateOptions::default(),
        )
        .unwrap();
        let res = residuals_l(&traj);
        assert!(res.summary().max() <= 1e-12, "{:?}", res.summary());
        assert!(traj.positions.last().unwrap()[5] + 0.2 < 1e-12);
    }

    #[test]
    fn displayed_v_prime_misses_factor_two() {
        let traj = integrate_geodesic(
            Space::L,
            &[0.8, 0.3, 0.4, -0.2, 0.1, 0.0],
            &[0.2, -0.5, 0.7, 0.3, 0.6, 0.4],
            &IntegrateOptions::new(1e-3, 0.5),
        )
        .unwrap();
        let res = residuals_l(&traj);
        let by = |c: &str| res.displayed.iter().find(|d| d.condition == c).unwrap().clone();
        assert!(by("I'").agrees && by("II'").agrees && by("IV'").agrees);
        assert!(!by("V'").agrees);
    }
}
