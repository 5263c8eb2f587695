//! Membership in `L(n)` / `M(n)`, the mapping-torus parametrization of `M(n)`,
//! the splitting `L(n) ≅ M(n) × ℂ`, ends of a segment and the `U_k` charts.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{PolyPoint, Space};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ratio `σ₂/σ₁` of the singular values of the 2×(n−1) real matrix whose
/// columns are `zⱼ − z₁`. Zero for collinear (and for diagonal) points.
pub fn collinearity_defect(z: &PolyPoint) -> f64 {
    let base = z[0];
    let cols = z.n() - 1;
    let m = DMatrix::from_fn(2, cols, |row, col| {
        let d = z[col + 1] - base;
        if row == 0 {
            d.re
        } else {
            d.im
        }
    });
    let sv = m.singular_values();
    let (hi, lo) = if sv[0] >= sv[1] { (sv[0], sv[1]) } else { (sv[1], sv[0]) };
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Whether all vertices are collinear, up to a relative singular-value
/// tolerance. Diagonal points count as segments.
pub fn is_n_segment(z: &PolyPoint, tol: f64) -> bool {
    collinearity_defect(z) <= tol
}

/// Checks membership in the given manifold. Diagonal points (and `0⃗` for
/// `M(n)`) are not part of either manifold.
pub fn ensure_in(z: &PolyPoint, space: Space, tol: f64) -> Result<()> {
    let defect = collinearity_defect(z);
    if defect > tol {
        return Err(Error::NotInManifold { space, residual: defect });
    }
    match space {
        Space::M => {
            let scale = z.max_modulus();
            if scale == 0.0 {
                return Err(Error::Domain("the zero polygon is not in M(n)".into()));
            }
            let first = z[0].norm() / scale;
            if first > tol {
                return Err(Error::NotInManifold { space, residual: first });
            }
        }
        Space::L => {
            if z.vertices().iter().all(|&w| w == z[0]) {
                return Err(Error::Degenerate("diagonal polygons are not in L(n)".into()));
            }
        }
    }
    Ok(())
}

/// Angle in `[0, π]` of the line through `0` and `z`: `0` on the positive real
/// axis, `π` on the negative one, otherwise the argument of whichever of `±z`
/// lies in the upper half plane.
pub fn theta(z: Complex64) -> Result<f64> {
    if z == ZERO {
        return Err(Error::Domain("theta is undefined at 0".into()));
    }
    Ok(if z.im > 0.0 {
        z.arg()
    } else if z.im < 0.0 {
        (-z).arg()
    } else if z.re > 0.0 {
        0.0
    } else {
        PI
    })
}

/// A point `(X, θ)` of the mapping torus `(ℝⁿ⁻¹∖{0}) × [0, π] / (X, π) ∼ (−X, 0)`.
///
/// The identification is resolved on construction, so `theta ∈ [0, π)` and two
/// coordinates describe the same polygon iff they are equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingTorusCoord {
    x: Vec<f64>,
    theta: f64,
}

impl MappingTorusCoord {
    pub fn new(mut x: Vec<f64>, theta: f64) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::TooFewVertices(x.len() + 1));
        }
        if !theta.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("mapping torus coordinates must be finite".into()));
        }
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("profile X must be nonzero".into()));
        }
        let mut t = theta.rem_euclid(2.0 * PI);
        if t >= 2.0 * PI {
            t = 0.0;
        }
        if t >= PI {
            t -= PI;
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(Self { x, theta: t })
    }

    pub fn profile(&self) -> &[f64] {
        &self.x
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n(&self) -> usize {
        self.x.len() + 1
    }
}

/// `ψ(X, θ) = (0, e^{iθ}x₂, …, e^{iθ}xₙ)`.
pub fn psi(c: &MappingTorusCoord) -> PolyPoint {
    let rot = Complex64::from_polar(1.0, c.theta);
    let mut v = Vec::with_capacity(c.n());
    v.push(ZERO);
    v.extend(c.x.iter().map(|&x| rot * x));
    PolyPoint::new(v).expect("profile has at least two finite entries")
}

/// Inverse of [`psi`]. Uses the vertex of largest modulus to fix the angle.
pub fn psi_inv(z: &PolyPoint, tol: f64) -> Result<MappingTorusCoord> {
    ensure_in(z, Space::M, tol)?;
    let k = largest_vertex(z, 1);
    let angle = theta(z[k])?;
    let unrot = Complex64::from_polar(1.0, -angle);
    let x = z.vertices()[1..].iter().map(|&w| (unrot * w).re).collect();
    MappingTorusCoord::new(x, angle)
}

fn largest_vertex(z: &PolyPoint, from: usize) -> usize {
    (from..z.n()).max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm())).expect("at least one candidate vertex")
}

/// `Ẑ ↦ (Ẑ − ẑ⃗₁, ẑ₁)`: the `M(n)` part and the translation.
///
/// Diagonal points are accepted and map to the zero profile.
pub fn split_l(z: &PolyPoint, tol: f64) -> Result<(PolyPoint, Complex64)> {
    let defect = collinearity_defect(z);
    if defect > tol {
        return Err(Error::NotInManifold { space: Space::L, residual: defect });
    }
    let b = z[0];
    let v = z.vertices().iter().map(|&w| w - b).collect();
    Ok((PolyPoint::new(v)?, b))
}

/// Inverse of [`split_l`].
pub fn join_l(m: &PolyPoint, b: Complex64) -> PolyPoint {
    m.affine(Complex64::new(1.0, 0.0), b)
}

/// Decomposition `Ẑ = a·X + b⃗` with `|a| = 1`, `θ(a) ∈ [0, π)` and `X` a real
/// vector with `X₁ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentWitness {
    pub base: Complex64,
    pub direction: Complex64,
    pub profile: Vec<f64>,
}

impl SegmentWitness {
    pub fn of(z: &PolyPoint, tol: f64) -> Result<Self> {
        let (m, base) = split_l(z, tol)?;
        if m.max_modulus() == 0.0 {
            let profile = vec![0.0; z.n()];
            return Ok(Self { base, direction: Complex64::new(1.0, 0.0), profile });
        }
        let c = psi_inv(&m, tol)?;
        let mut profile = Vec::with_capacity(z.n());
        profile.push(0.0);
        profile.extend_from_slice(c.profile());
        Ok(Self { base, direction: Complex64::from_polar(1.0, c.theta()), profile })
    }

    pub fn reconstruct(&self) -> PolyPoint {
        PolyPoint::new(self.profile.iter().map(|&x| self.direction * x + self.base).collect())
            .expect("witness has at least three entries")
    }
}

/// Parameters of the vertices along the segment direction, after moving the
/// first vertex to 0. Fails on diagonal input.
fn positions_along(z: &PolyPoint, tol: f64) -> Result<Vec<f64>> {
    let (m, _) = split_l(z, tol)?;
    let k = largest_vertex(&m, 0);
    let span = m[k].norm();
    if span == 0.0 {
        return Err(Error::Degenerate("ends are undefined for a diagonal polygon".into()));
    }
    let dir = m[k] / span;
    Ok(m.vertices().iter().map(|w| (dir.conj() * w).re).collect())
}

/// Indices (0-based) of the vertices at the two ends of the segment. Ties
/// within `tol` of the segment length are all reported, so at least two
/// indices come back.
pub fn ends(z: &PolyPoint, tol: f64) -> Result<Vec<usize>> {
    let t = positions_along(z, tol)?;
    let (lo, hi) = extremes(&t);
    let width = hi - lo;
    Ok((0..t.len()).filter(|&i| t[i] - lo <= tol * width || hi - t[i] <= tol * width).collect())
}

fn extremes(t: &[f64]) -> (f64, f64) {
    t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// The representative `(Z − z⃗ₘ)/(z_M − zₘ)` with ends at 0 and 1, using the
/// least-index vertex at each end.
pub fn normalize_ends(z: &PolyPoint, tol: f64) -> Result<PolyPoint> {
    let t = positions_along(z, tol)?;
    let (lo, hi) = extremes(&t);
    let width = hi - lo;
    let lo_idx = (0..t.len()).find(|&i| t[i] - lo <= tol * width).expect("min attained");
    let hi_idx = (0..t.len()).find(|&i| hi - t[i] <= tol * width).expect("max attained");
    let origin = z[lo_idx];
    let unit = z[hi_idx] - origin;
    PolyPoint::new(z.vertices().iter().map(|&w| (w - origin) / unit).collect())
}

/// Coordinates in the chart `φ_k` of `M(n)` or `φ̂_k` of `L(n)`.
///
/// For `M(n)` the layout is `(r₂, …, r_{k−1}, x, y, r_{k+1}, …, rₙ)`; `L(n)`
/// appends `(u, v)`. The point is `z·(0, r₂, …, 1, …, rₙ) + b⃗` with `z = x + iy`
/// in slot `k` and `b = u + iv`. Vertex labels `k` are 1-based as in the chart
/// names `U_2, …, U_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartCoord {
    pub space: Space,
    pub k: usize,
    pub coords: Vec<f64>,
}

impl ChartCoord {
    pub fn new(space: Space, k: usize, coords: Vec<f64>) -> Result<Self> {
        let n = match space {
            Space::M => coords.len(),
            Space::L => coords.len().saturating_sub(2),
        };
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if !(2..=n).contains(&k) {
            return Err(Error::InvalidArgument(format!("chart index {k} outside 2..={n}")));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("chart coordinates must be finite".into()));
        }
        let c = Self { space, k, coords };
        if c.z() == ZERO {
            return Err(Error::Domain("chart coordinate z = x + iy must be nonzero".into()));
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        match self.space {
            Space::M => self.coords.len(),
            Space::L => self.coords.len() - 2,
        }
    }

    /// `z = x + iy`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.coords[self.k - 2], self.coords[self.k - 1])
    }

    /// `b = u + iv`; zero for `M(n)`.
    pub fn b(&self) -> Complex64 {
        match self.space {
            Space::M => ZERO,
            Space::L => {
                let n = self.n();
                Complex64::new(self.coords[n], self.coords[n + 1])
            }
        }
    }

    /// `r_m` for a 1-based vertex label `m ≠ 1, k`.
    pub fn r(&self, m: usize) -> f64 {
        debug_assert!(m >= 2 && m != self.k && m <= self.n());
        if m < self.k {
            self.coords[m - 2]
        } else {
            self.coords[m - 1]
        }
    }
}

/// `φ_k⁻¹`: chart coordinates to the polygon.
pub fn chart_to_point(c: &ChartCoord) -> PolyPoint {
    let n = c.n();
    let z = c.z();
    let b = c.b();
    let mut v = Vec::with_capacity(n);
    v.push(b);
    for m in 2..=n {
        let w = if m == c.k { z } else { z * c.r(m) };
        v.push(w + b);
    }
    PolyPoint::new(v).expect("finite chart coordinates give finite vertices")
}

/// The chart indices `k` whose domain contains the point: those with
/// `z_k − z₁ ≠ 0` (relative to `tol`).
pub fn admissible_charts(z: &PolyPoint, tol: f64) -> Vec<usize> {
    let b = z[0];
    let scale = (1..z.n()).map(|m| (z[m] - b).norm()).fold(0.0, f64::max);
    (2..=z.n()).filter(|&k| scale > 0.0 && (z[k - 1] - b).norm() > tol * scale).collect()
}

/// `φ_k`: the polygon to chart coordinates.
pub fn point_to_chart(z: &PolyPoint, space: Space, k: usize, tol: f64) -> Result<ChartCoord> {
    let n = z.n();
    if !(2..=n).contains(&k) {
        return Err(Error::InvalidArgument(format!("chart index {k} outside 2..={n}")));
    }
    ensure_in(z, space, tol)?;
    let admissible = admissible_charts(z, tol);
    if !admissible.contains(&k) {
        return Err(Error::ChartDomain { k, admissible });
    }
    let b = match space {
        Space::M => ZERO,
        Space::L => z[0],
    };
    let zk = z[k - 1] - b;
    let mut coords = Vec::with_capacity(space.dim(n));
    for m in 2..=n {
        if m == k {
            coords.push(zk.re);
            coords.push(zk.im);
        } else {
            coords.push(((z[m - 1] - b) / zk).re);
        }
    }
    if space == Space::L {
        coords.push(b.re);
        coords.push(b.im);
    }
    ChartCoord::new(space, k, coords)
}

/// The chart with the largest `|z_k − z₁|`, the best-conditioned choice.
pub fn best_chart(z: &PolyPoint) -> usize {
    let b = z[0];
    (2..=z.n()).max_by(|&a, &c| (z[a - 1] - b).norm().total_cmp(&(z[c - 1] - b).norm())).expect("n ≥ 3")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(pairs: &[(f64, f64)]) -> PolyPoint {
        PolyPoint::from_pairs(pairs).unwrap()
    }

    const TOL: f64 = 1e-10;

    #[test]
    fn membership_examples() {
        assert!(is_n_segment(&pt(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]), TOL));
        assert!(!is_n_segment(&pt(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), TOL));
        let five = pt(&[(-3.0, -3.0), (0.0, 0.0), (2.0, 2.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!(is_n_segment(&five, TOL));
        assert!(is_n_segment(&PolyPoint::diagonal(4, c(1.0, -2.0)).unwrap(), TOL));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(c(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(theta(c(-2.0, 0.0)).unwrap(), PI);
        assert!((theta(c(0.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((theta(c(0.0, -1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(theta(ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_examples() {
        let p = psi(&MappingTorusCoord::new(vec![1.0, 0.0], FRAC_PI_2).unwrap());
        assert!((p[1] - c(0.0, 1.0)).norm() < 1e-15 && p[2].norm() < 1e-15 && p[0] == ZERO);
        let p = psi(&MappingTorusCoord::new(vec![1.0, 2.0], 0.0).unwrap());
        assert_eq!(p, PolyPoint::from_real(&[0.0, 1.0, 2.0]).unwrap());
        assert!(MappingTorusCoord::new(vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn psi_inv_examples() {
        let back = psi_inv(&pt(&[(0.0, 0.0), (0.0, 1.0), (0.0, 0.0)]), TOL).unwrap();
        assert!((back.theta() - FRAC_PI_2).abs() < 1e-15);
        assert!((back.profile()[0] - 1.0).abs() < 1e-15 && back.profile()[1].abs() < 1e-15);

        // θ(z_k) = π: ((1, 2), π) is folded onto ((−1, −2), 0)
        let z = PolyPoint::from_real(&[0.0, -1.0, -2.0]).unwrap();
        let back = psi_inv(&z, TOL).unwrap();
        assert_eq!(back, MappingTorusCoord::new(vec![1.0, 2.0], PI).unwrap());
        assert_eq!((back.profile(), back.theta()), (&[-1.0, -2.0][..], 0.0));
        assert_eq!(psi(&back), z);

        assert!(matches!(psi_inv(&PolyPoint::from_real(&[0.0, 0.0, 0.0]).unwrap(), TOL), Err(Error::Domain(_))));
        assert!(matches!(
            psi_inv(&pt(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), TOL),
            Err(Error::NotInManifold { space: Space::M, .. })
        ));
        assert!(matches!(
            psi_inv(&PolyPoint::from_real(&[1.0, 2.0, 3.0]).unwrap(), TOL),
            Err(Error::NotInManifold { space: Space::M, .. })
        ));
    }

    #[test]
    fn torus_identification_is_normalized() {
        let a = MappingTorusCoord::new(vec![1.0, -3.0], PI).unwrap();
        let b = MappingTorusCoord::new(vec![-1.0, 3.0], 0.0).unwrap();
        assert_eq!(a, b);
        let wrapped = MappingTorusCoord::new(vec![2.0, 1.0], 0.25 + 2.0 * PI).unwrap();
        assert!((wrapped.theta() - 0.25).abs() < 1e-12);
        assert_eq!(wrapped.profile(), &[2.0, 1.0]);
        let negative = MappingTorusCoord::new(vec![2.0, 1.0], -0.25).unwrap();
        assert!((negative.theta() - (PI - 0.25)).abs() < 1e-12);
        assert_eq!(negative.profile(), &[-2.0, -1.0]);
    }

    #[test]
    fn split_examples() {
        let (m, b) = split_l(&PolyPoint::from_real(&[1.0, 2.0, 3.0]).unwrap(), TOL).unwrap();
        assert_eq!(m, PolyPoint::from_real(&[0.0, 1.0, 2.0]).unwrap());
        assert_eq!(b, c(1.0, 0.0));

        let bb = c(0.3, -1.7);
        let (m, b) = split_l(&PolyPoint::diagonal(4, bb).unwrap(), TOL).unwrap();
        assert_eq!(m.max_modulus(), 0.0);
        assert_eq!(b, bb);

        assert!(split_l(&pt(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), TOL).is_err());
    }

    #[test]
    fn ends_examples() {
        let five = pt(&[(-3.0, -3.0), (0.0, 0.0), (2.0, 2.0), (1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(ends(&five, TOL).unwrap(), vec![0, 2, 4]);
        assert_eq!(ends(&PolyPoint::from_real(&[0.0, 1.0, 0.5]).unwrap(), TOL).unwrap(), vec![0, 1]);
        assert_eq!(ends(&PolyPoint::from_real(&[0.0, 1.0, 1.0]).unwrap(), TOL).unwrap(), vec![0, 1, 2]);
        assert!(matches!(ends(&PolyPoint::diagonal(3, c(2.0, 2.0)).unwrap(), TOL), Err(Error::Degenerate(_))));
    }

    #[test]
    fn normalize_examples() {
        let expected = PolyPoint::from_real(&[0.0, 1.0, 0.5]).unwrap();
        let a = normalize_ends(&PolyPoint::from_real(&[0.0, 2.0, 1.0]).unwrap(), TOL).unwrap();
        assert_eq!(a, expected);
        let b = normalize_ends(&pt(&[(0.0, 1.0), (0.0, 3.0), (0.0, 2.0)]), TOL).unwrap();
        assert!((&b - &expected).norm() < 1e-15);
        assert!(normalize_ends(&PolyPoint::diagonal(3, ZERO).unwrap(), TOL).is_err());
    }

    #[test]
    fn chart_examples() {
        let p = chart_to_point(&ChartCoord::new(Space::M, 2, vec![1.0, 0.0, 2.0]).unwrap());
        assert_eq!(p, PolyPoint::from_real(&[0.0, 1.0, 2.0]).unwrap());
        let p = chart_to_point(&ChartCoord::new(Space::M, 2, vec![0.0, 1.0, 2.0]).unwrap());
        assert_eq!(p, pt(&[(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]));

        // chart k = 3 of M(3): (r₂, x, y)
        let q = ChartCoord::new(Space::M, 3, vec![0.5, 0.0, 2.0]).unwrap();
        assert_eq!(chart_to_point(&q), pt(&[(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]));

        let l = ChartCoord::new(Space::L, 2, vec![1.0, 0.0, 2.0, 1.0, -1.0]).unwrap();
        assert_eq!(chart_to_point(&l), pt(&[(1.0, -1.0), (2.0, -1.0), (3.0, -1.0)]));
        let back = point_to_chart(&chart_to_point(&l), Space::L, 2, TOL).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn chart_domain_reports_admissible_indices() {
        let z = PolyPoint::from_real(&[0.0, 0.0, 2.0, 1.0]).unwrap();
        match point_to_chart(&z, Space::M, 2, TOL) {
            Err(Error::ChartDomain { k, admissible }) => {
                assert_eq!(k, 2);
                assert_eq!(admissible, vec![3, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ChartCoord::new(Space::M, 2, vec![0.0, 0.0, 1.0]).is_err());
        assert!(ChartCoord::new(Space::M, 4, vec![1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn witness_reconstructs() {
        let z = pt(&[(1.0, 1.0), (2.0, 3.0), (0.0, -1.0), (1.5, 2.0)]);
        let w = SegmentWitness::of(&z, TOL).unwrap();
        assert_eq!(w.profile[0], 0.0);
        assert!((w.direction.norm() - 1.0).abs() < 1e-15);
        let th = theta(w.direction).unwrap();
        assert!((0.0..PI).contains(&th));
        assert!((&w.reconstruct() - &z).norm() < 1e-14);
    }
}
