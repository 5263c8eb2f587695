use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::point::{pairing, Space};
use crate::segment::ChartCoord;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of vertices encoded by a chart-2 coordinate vector.
pub(crate) fn vertex_count(space: Space, dim: usize) -> usize {
    match space {
        Space::M => dim,
        Space::L => dim - 2,
    }
}

/// Value and derivatives of the chart-2 parametrization
/// `F(x, y, r₃, …, rₙ[, u, v]) = (x + iy)(0, 1, r₃, …, rₙ) [+ (u + iv)1⃗]`.
///
/// `F` is bilinear in `z = x + iy` and the `r`s, so all second partials are
/// constant: `∂x∂rⱼF = eⱼ`, `∂y∂rⱼF = ieⱼ` and the rest vanish.
#[derive(Debug, Clone)]
pub struct EmbeddingJet {
    pub space: Space,
    pub coords: Vec<f64>,
    pub value: Vec<Complex64>,
    /// `first[i] = ∂ᵢF`.
    pub first: Vec<Vec<Complex64>>,
}

impl EmbeddingJet {
    pub fn at(space: Space, coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        let min = if space == Space::M { 3 } else { 5 };
        if dim < min {
            return Err(Error::TooFewVertices(dim.saturating_sub(min - 3)));
        }
        let n = vertex_count(space, dim);
        let z = Complex64::new(coords[0], coords[1]);
        if z == ZERO {
            return Err(Error::ChartDomain { k: 2, admissible: vec![] });
        }
        let b = match space {
            Space::M => ZERO,
            Space::L => Complex64::new(coords[n], coords[n + 1]),
        };

        let mut shape = Vec::with_capacity(n);
        shape.push(ZERO);
        shape.push(ONE);
        shape.extend(coords[2..n].iter().map(|&r| Complex64::new(r, 0.0)));

        let value = shape.iter().map(|s| z * s + b).collect();
        let mut first = Vec::with_capacity(dim);
        first.push(shape.clone());
        first.push(shape.iter().map(|s| I * s).collect());
        for j in 2..n {
            let mut e = vec![ZERO; n];
            e[j] = z;
            first.push(e);
        }
        if space == Space::L {
            first.push(vec![ONE; n]);
            first.push(vec![I; n]);
        }
        Ok(Self { space, coords: coords.to_vec(), value, first })
    }

    pub fn n(&self) -> usize {
        self.value.len()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.coords[0], self.coords[1])
    }

    /// `∂ᵢ∂ⱼF`.
    pub fn second(&self, i: usize, j: usize) -> Vec<Complex64> {
        let n = self.n();
        let mut out = vec![ZERO; n];
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if a < 2 && (2..n).contains(&b) {
            out[b] = if a == 0 { ONE } else { I };
        }
        out
    }

    /// `Σ q̇ⁱq̇ʲ ∂ᵢ∂ⱼF = 2ż Σⱼ ṙⱼ eⱼ`.
    pub fn second_contracted(&self, qdot: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        let zdot = Complex64::new(qdot[0], qdot[1]);
        let mut out = vec![ZERO; n];
        for j in 2..n {
            out[j] = zdot * (2.0 * qdot[j]);
        }
        out
    }

    /// `Σ q̇ⁱ ∂ᵢF`.
    pub fn push_forward(&self, qdot: &[f64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n()];
        for (col, &c) in self.first.iter().zip(qdot) {
            out.iter_mut().zip(col).for_each(|(o, v)| *o += v * c);
        }
        out
    }

    /// Ambient acceleration `Σ q̈ⁱ∂ᵢF + Σ q̇ⁱq̇ʲ∂ᵢ∂ⱼF` of a chart curve.
    pub fn ambient_acceleration(&self, qdot: &[f64], qddot: &[f64]) -> Vec<Complex64> {
        let mut out = self.push_forward(qddot);
        out.iter_mut().zip(self.second_contracted(qdot)).for_each(|(o, v)| *o += v);
        out
    }

    pub fn metric(&self) -> InducedMetric {
        let d = self.dim();
        InducedMetric { g: DMatrix::from_fn(d, d, |i, j| pairing(&self.first[i], &self.first[j])) }
    }
}

/// `gᵢⱼ = ⟨⟨∂ᵢF, ∂ⱼF⟩⟩` in chart 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMetric {
    pub g: DMatrix<f64>,
}

impl InducedMetric {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.g.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }

    /// Ratio of extreme eigenvalues; infinite when not positive definite.
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        if ev[0] <= 0.0 {
            f64::INFINITY
        } else {
            ev[ev.len() - 1] / ev[0]
        }
    }
}

/// Induced metric at a point given in chart `U_2` (or `Û_2`).
pub fn induced_metric(c: &ChartCoord) -> Result<InducedMetric> {
    if c.k != 2 {
        return Err(Error::InvalidArgument(format!("geodesic computations use chart 2, got {}", c.k)));
    }
    Ok(EmbeddingJet::at(c.space, &c.coords)?.metric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let g = induced_metric(&ChartCoord::new(Space::M, 2, vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(g.g, DMatrix::identity(3, 3));
        let g = induced_metric(&ChartCoord::new(Space::M, 2, vec![1.0, 0.0, 2.0]).unwrap()).unwrap();
        assert_eq!(g.g, DMatrix::from_row_slice(3, 3, &[5.0, 0.0, 2.0, 0.0, 5.0, 0.0, 2.0, 0.0, 1.0]));
        assert!(g.is_positive_definite());
    }

    #[test]
    fn rejects_other_charts_and_origin() {
        let c = ChartCoord::new(Space::M, 3, vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(induced_metric(&c), Err(Error::InvalidArgument(_))));
        assert!(matches!(EmbeddingJet::at(Space::M, &[0.0, 0.0, 1.0]), Err(Error::ChartDomain { .. })));
    }

    #[test]
    fn second_partials_are_symmetric_and_contract() {
        let jet = EmbeddingJet::at(Space::L, &[0.3, -1.2, 0.5, 2.0, 0.1, 0.2]).unwrap();
        let qdot = [0.7, -0.4, 1.1, 0.3, -2.0, 0.5];
        let d = jet.dim();
        let mut direct = vec![ZERO; jet.n()];
        for i in 0..d {
            for j in 0..d {
                assert_eq!(jet.second(i, j), jet.second(j, i));
                direct.iter_mut().zip(jet.second(i, j)).for_each(|(o, v)| *o += v * (qdot[i] * qdot[j]));
            }
        }
        let fast = jet.second_contracted(&qdot);
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let q = [0.8, 0.6, -0.3, 1.4, 0.9];
        let jet = EmbeddingJet::at(Space::M, &q).unwrap();
        let h = 1e-5;
        for i in 0..q.len() {
            let mut qp = q;
            let mut qm = q;
            qp[i] += h;
            qm[i] -= h;
            let fp = EmbeddingJet::at(Space::M, &qp).unwrap().value;
            let fm = EmbeddingJet::at(Space::M, &qm).unwrap().value;
            for m in 0..jet.n() {
                let fd = (fp[m] - fm[m]) / (2.0 * h);
                assert!((fd - jet.first[i][m]).norm() < 1e-9);
            }
            for j in 0..q.len() {
                let dp = EmbeddingJet::at(Space::M, &qp).unwrap().first[j].clone();
                let dm = EmbeddingJet::at(Space::M, &qm).unwrap().first[j].clone();
                let s = jet.second(i, j);
                for m in 0..jet.n() {
                    assert!(((dp[m] - dm[m]) / (2.0 * h) - s[m]).norm() < 1e-9);
                }
            }
        }
    }
}
