use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two segment manifolds a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// Segments with the first vertex at the origin, `M(n)`, real dimension `n`.
    M,
    /// All segments, `L(n)`, real dimension `n + 2`.
    L,
}

impl Space {
    /// Real dimension of the manifold for `n` vertices.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Space::M => n,
            Space::L => n + 2,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::M => f.write_str("M(n)"),
            Space::L => f.write_str("L(n)"),
        }
    }
}

/// A polygon with labeled vertices, as a point of ℂⁿ.
///
/// Always holds at least three finite vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPoint {
    vertices: Vec<Complex64>,
}

impl PolyPoint {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if let Some(index) = vertices.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { vertices })
    }

    /// Builds a polygon from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// A polygon with real vertices.
    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The diagonal point `(b, …, b)`.
    pub fn diagonal(n: usize, b: Complex64) -> Result<Self> {
        Self::new(vec![b; n])
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Complex64> {
        self.vertices
    }

    /// Euclidean norm in ℂⁿ ≅ ℝ²ⁿ.
    pub fn norm(&self) -> f64 {
        self.vertices.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_modulus(&self) -> f64 {
        self.vertices.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `a·Z + b⃗`, the action of the complex affine group.
    pub fn affine(&self, a: Complex64, b: Complex64) -> PolyPoint {
        PolyPoint { vertices: self.vertices.iter().map(|&z| a * z + b).collect() }
    }

    /// Subtracts `b` from every vertex.
    pub fn translate(&self, b: Complex64) -> PolyPoint {
        self.affine(Complex64::new(1.0, 0.0), -b)
    }

    pub fn scale(&self, a: Complex64) -> PolyPoint {
        self.affine(a, Complex64::new(0.0, 0.0))
    }

    /// `(1 - t) Z + t W`.
    pub fn lerp(&self, other: &PolyPoint, t: f64) -> PolyPoint {
        PolyPoint {
            vertices: self.vertices.iter().zip(&other.vertices).map(|(&z, &w)| z * (1.0 - t) + w * t).collect(),
        }
    }

    /// True when all vertices coincide exactly.
    pub fn is_diagonal(&self) -> bool {
        self.vertices.iter().all(|&z| z == self.vertices[0])
    }

    /// Distance from the point to the diagonal `D_n`, relative to nothing.
    pub fn distance_to_diagonal(&self) -> f64 {
        let mean = self.vertices.iter().sum::<Complex64>() / self.n() as f64;
        self.vertices.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyPointJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PolyPointJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

impl Index<usize> for PolyPoint {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.vertices[index]
    }
}

impl Add for &PolyPoint {
    type Output = PolyPoint;

    fn add(self, rhs: &PolyPoint) -> PolyPoint {
        assert_eq!(self.n(), rhs.n());
        PolyPoint { vertices: self.vertices.iter().zip(&rhs.vertices).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &PolyPoint {
    type Output = PolyPoint;

    fn sub(self, rhs: &PolyPoint) -> PolyPoint {
        assert_eq!(self.n(), rhs.n());
        PolyPoint { vertices: self.vertices.iter().zip(&rhs.vertices).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<f64> for &PolyPoint {
    type Output = PolyPoint;

    fn mul(self, rhs: f64) -> PolyPoint {
        PolyPoint { vertices: self.vertices.iter().map(|z| z * rhs).collect() }
    }
}

/// The real pairing `⟨⟨Z, W⟩⟩ = Σ Re(z̄ⱼ wⱼ)`, i.e. the dot product of ℂⁿ seen as ℝ²ⁿ.
pub fn pairing(z: &[Complex64], w: &[Complex64]) -> f64 {
    debug_assert_eq!(z.len(), w.len());
    z.iter().zip(w).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

/// Wire shape: `{"n": 5, "vertices": [[re, im], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyPointJson {
    n: usize,
    vertices: Vec<[f64; 2]>,
}

impl From<&PolyPoint> for PolyPointJson {
    fn from(p: &PolyPoint) -> Self {
        PolyPointJson { n: p.n(), vertices: p.vertices.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<PolyPointJson> for PolyPoint {
    type Error = Error;

    fn try_from(raw: PolyPointJson) -> Result<Self> {
        if raw.n != raw.vertices.len() {
            return Err(Error::Parse(format!("field n = {} but {} vertices were given", raw.n, raw.vertices.len())));
        }
        PolyPoint::new(raw.vertices.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_non_finite() {
        assert_eq!(PolyPoint::from_real(&[0.0, 1.0]), Err(Error::TooFewVertices(2)));
        assert_eq!(PolyPoint::from_real(&[0.0, f64::NAN, 1.0]), Err(Error::NonFinite { index: 1 }));
    }

    #[test]
    fn json_shape() {
        let p = PolyPoint::from_pairs(&[(0.0, 0.0), (1.0, 1.0), (2.0, -0.5)]).unwrap();
        let text = p.to_json();
        assert_eq!(text, r#"{"n":3,"vertices":[[0.0,0.0],[1.0,1.0],[2.0,-0.5]]}"#);
        assert_eq!(PolyPoint::from_json(&text).unwrap(), p);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = PolyPoint::from_json("{\"n\": 3,\n \"vertices\": [[0, 0], [1 1]]}").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(PolyPoint::from_json(r#"{"n": 4, "vertices": [[0,0],[1,0],[2,0]]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn pairing_is_planar_dot_product() {
        let z = [Complex64::new(1.0, 2.0), Complex64::new(0.0, 1.0)];
        let w = [Complex64::new(3.0, -1.0), Complex64::new(1.0, 0.0)];
        assert_eq!(pairing(&z, &w), 1.0 * 3.0 + -2.0 + 0.0);
        // i ⟂ 1 in the plane
        assert_eq!(pairing(&[Complex64::i()], &[Complex64::new(1.0, 0.0)]), 0.0);
    }
}
