use num_complex::Complex64;
use serde::Serialize;

use super::integrate::GeodesicTrajectory;
use super::residuals::{residuals_l, residuals_m, ResidualsLSummary};
use crate::error::{Error, Result};
use crate::point::{pairing, Space};

/// Balance tolerance of [`check_lift_condition`].
pub const BALANCE_TOL: f64 = 1e-12;

/// How coordinate `rⱼ` of a lifted curve depends on the `r` of the base curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `sⱼ ≡ 1`.
    Constant,
    /// `sⱼ ≡ r(t)`.
    FollowsR,
}

/// Coefficients of the curve `z(t)(0, 1, a₃s₃(t), …, aₙsₙ(t))` built from a
/// base geodesic `z(t)(0, 1, r(t))` of `M(3)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftSpec {
    amplitudes: Vec<f64>,
    shapes: Vec<Shape>,
}

impl LiftSpec {
    /// `amplitudes[i]` and `shapes[i]` describe `r_{i+3}`. Zero amplitudes are
    /// rejected: they make the partition into `A₁`, `A₂` ambiguous.
    pub fn new(amplitudes: Vec<f64>, shapes: Vec<Shape>) -> Result<Self> {
        if amplitudes.len() != shapes.len() {
            return Err(Error::DimensionMismatch { expected: amplitudes.len(), got: shapes.len() });
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("a lift needs at least one coordinate r₃".into()));
        }
        if let Some(i) = amplitudes.iter().position(|a| !a.is_finite() || *a == 0.0) {
            return Err(Error::Degenerate(format!(
                "amplitude a_{} = {} must be finite and nonzero",
                i + 3,
                amplitudes[i]
            )));
        }
        Ok(Self { amplitudes, shapes })
    }

    /// Number of vertices of the lifted curve.
    pub fn n(&self) -> usize {
        self.amplitudes.len() + 2
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// Vertex labels `j ≥ 3` with `sⱼ ≡ 1` and with `sⱼ ≡ r`.
    pub fn partition(&self) -> (Vec<usize>, Vec<usize>) {
        let labels = |s: Shape| self.shapes.iter().enumerate().filter(move |(_, &x)| x == s).map(|(i, _)| i + 3);
        (labels(Shape::Constant).collect(), labels(Shape::FollowsR).collect())
    }

    /// `(1 + Σ_{A₁} aⱼ², Σ_{A₂} aⱼ²)`.
    pub fn sides(&self) -> (f64, f64) {
        let mut a = 1.0;
        let mut a_prime = 0.0;
        for (amp, shape) in self.amplitudes.iter().zip(&self.shapes) {
            match shape {
                Shape::Constant => a += amp * amp,
                Shape::FollowsR => a_prime += amp * amp,
            }
        }
        (a, a_prime)
    }
}

/// The balance condition `1 + Σ_{A₁} aⱼ² = Σ_{A₂} aⱼ²`.
pub fn check_lift_condition(spec: &LiftSpec) -> bool {
    let (a, a_prime) = spec.sides();
    (a - a_prime).abs() <= BALANCE_TOL
}

/// Largest ambient acceleration along a trajectory.
pub fn max_ambient_acceleration(traj: &GeodesicTrajectory) -> f64 {
    (0..traj.len())
        .map(|i| {
            let a = traj.ambient_acceleration(i);
            pairing(&a, &a).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Builds `γ(t) = z(t)(0, 1, a₃s₃(t), …, aₙsₙ(t))` from a curved `M(3)`
/// geodesic `β(t) = z(t)(0, 1, r(t))`.
///
/// `tol` bounds both the residuals `β` must meet and the ambient acceleration
/// below which `β` counts as a straight line. Velocities and accelerations of
/// the lift are the exact derivatives of the formula in terms of those of
/// `β`, so the lift is a geodesic exactly when `residuals_m` says so.
pub fn lift_m3_to_mn(beta: &GeodesicTrajectory, spec: &LiftSpec, tol: f64) -> Result<GeodesicTrajectory> {
    if beta.space != Space::M || beta.n() != 3 {
        return Err(Error::InvalidArgument(format!(
            "base curve must lie in M(3), got {} with n = {}",
            beta.space,
            beta.n()
        )));
    }
    let residual = residuals_m(beta).summary().max();
    if residual > tol {
        return Err(Error::NotGeodesic { residual });
    }
    if max_ambient_acceleration(beta) <= tol {
        return Err(Error::StraightLine);
    }

    let lift = |row: &[f64]| -> Vec<f64> {
        let mut out = vec![row[0], row[1]];
        out.extend(spec.amplitudes.iter().zip(&spec.shapes).map(|(a, s)| match s {
            Shape::Constant => *a,
            Shape::FollowsR => a * row[2],
        }));
        out
    };
    // derivatives of constants vanish
    let lift_derivative = |row: &[f64]| -> Vec<f64> {
        let mut out = vec![row[0], row[1]];
        out.extend(spec.amplitudes.iter().zip(&spec.shapes).map(|(a, s)| match s {
            Shape::Constant => 0.0,
            Shape::FollowsR => a * row[2],
        }));
        out
    };
    GeodesicTrajectory::from_samples(
        Space::M,
        beta.times.clone(),
        beta.positions.iter().map(|q| lift(q)).collect(),
        beta.velocities.iter().map(|v| lift_derivative(v)).collect(),
        beta.accelerations.iter().map(|a| lift_derivative(a)).collect(),
    )
}

/// Outcome of [`lift_m_to_l`].
#[derive(Debug, Clone, Serialize)]
pub struct LiftToL {
    #[serde(skip)]
    pub trajectory: GeodesicTrajectory,
    pub lambda_affine: bool,
    /// `max |⟨⟨γ″, 1⃗⟩⟩|` along `γ`.
    pub max_pair_one: f64,
    /// `max |⟨⟨γ″, i⃗⟩⟩|` along `γ`.
    pub max_pair_i: f64,
    /// Criterion side: `λ″ ≡ 0` and both pairings vanish.
    pub verdict: bool,
    /// Definitional side: the residuals of `γ̂` in `L(n)`.
    pub residuals: ResidualsLSummary,
    pub residuals_pass: bool,
    pub agrees: bool,
}

/// Evaluates `Σ cₖ tᵏ` and its first two derivatives.
fn poly_jet(coeffs: &[Complex64], t: f64) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for c in coeffs.iter().rev() {
        out[2] = out[2] * t + 2.0 * out[1];
        out[1] = out[1] * t + out[0];
        out[0] = out[0] * t + c;
    }
    out
}

/// Translates an `M(n)` geodesic `γ` along the diagonal curve
/// `λ(t) = Σ cₖ tᵏ` and decides whether `γ̂ = γ + λ⃗` is an `L(n)` geodesic in
/// two independent ways: through the criterion `λ″ ≡ 0`, `⟨⟨γ″, 1⃗⟩⟩ ≡ 0`,
/// `⟨⟨γ″, i⃗⟩⟩ ≡ 0`, and through the `L(n)` residuals of `γ̂`, both at `tol`.
pub fn lift_m_to_l(gamma: &GeodesicTrajectory, lambda: &[Complex64], tol: f64) -> Result<LiftToL> {
    if gamma.space != Space::M {
        return Err(Error::InvalidArgument(format!("base curve must lie in M(n), got {}", gamma.space)));
    }
    let lambda_affine = lambda.iter().skip(2).all(|c| c.norm() <= tol);
    let mut max_pair_one: f64 = 0.0;
    let mut max_pair_i: f64 = 0.0;
    let (mut positions, mut velocities, mut accelerations) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..gamma.len() {
        let s: Complex64 = gamma.ambient_acceleration(i).iter().sum();
        max_pair_one = max_pair_one.max(s.re.abs());
        max_pair_i = max_pair_i.max(s.im.abs());

        let [l, dl, ddl] = poly_jet(lambda, gamma.times[i]);
        let append = |row: &[f64], c: Complex64| row.iter().copied().chain([c.re, c.im]).collect::<Vec<f64>>();
        positions.push(append(&gamma.positions[i], l));
        velocities.push(append(&gamma.velocities[i], dl));
        accelerations.push(append(&gamma.accelerations[i], ddl));
    }
    let trajectory =
        GeodesicTrajectory::from_samples(Space::L, gamma.times.clone(), positions, velocities, accelerations)?;
    let verdict = lambda_affine && max_pair_one <= tol && max_pair_i <= tol;
    let residuals = residuals_l(&trajectory).summary();
    let residuals_pass = residuals.passes(tol);
    Ok(LiftToL {
        trajectory,
        lambda_affine,
        max_pair_one,
        max_pair_i,
        verdict,
        residuals,
        residuals_pass,
        agrees: verdict == residuals_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: &[f64], s: &[Shape]) -> LiftSpec {
        LiftSpec::new(a.to_vec(), s.to_vec()).unwrap()
    }

    #[test]
    fn balance_examples() {
        use Shape::*;
        let h = 0.5f64.sqrt();
        assert!(check_lift_condition(&spec(&[h, h], &[FollowsR, FollowsR])));
        assert!(check_lift_condition(&spec(&[1.0, 2f64.sqrt()], &[Constant, FollowsR])));
        assert!(!check_lift_condition(&spec(&[1.0, 1.0], &[Constant, FollowsR])));
        assert!(matches!(LiftSpec::new(vec![1.0, 0.0], vec![FollowsR, FollowsR]), Err(Error::Degenerate(_))));
        assert_eq!(spec(&[1.0, 2.0, 3.0], &[Constant, FollowsR, Constant]).partition(), (vec![3, 5], vec![4]));
    }

    #[test]
    fn polynomial_jet() {
        let c = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0)];
        let [v, d, dd] = poly_jet(&c, 2.0);
        assert_eq!(v, Complex64::new(13.0, 4.0));
        assert_eq!(d, Complex64::new(12.0, 2.0));
        assert_eq!(dd, Complex64::new(6.0, 0.0));
    }
}
