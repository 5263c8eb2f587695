//! Tangent frames, the flat subspaces through a segment, segment containment
//! and the ruling lines of `M(n)` and `L(n)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::point::{pairing, PolyPoint, Space};
use crate::segment::{self, SegmentWitness};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Real basis of a tangent space, as vectors of ℂⁿ.
///
/// For `M(n)` in the chart `U_k` with `Z = ζ(0, c₂, …, 1, …, cₙ)` the vectors are
/// `iZ, ζe₂, …, ζeₙ`, which are pairwise orthogonal. For `L(n)` the vectors
/// `1⃗` and `i⃗` are appended; that frame is a basis but not orthogonal.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub base: PolyPoint,
    pub space: Space,
    pub vectors: Vec<Vec<Complex64>>,
}

impl TangentFrame {
    /// Frame of `T_Z M(n)` built from the chart `U_k`.
    pub fn for_m(z: &PolyPoint, k: usize, tol: f64) -> Result<Self> {
        // validates membership and the chart domain
        segment::point_to_chart(z, Space::M, k, tol)?;
        Ok(Self { base: z.clone(), space: Space::M, vectors: m_vectors(z, z[k - 1]) })
    }

    /// Frame of `T_Ẑ L(n)` built from the chart `Û_k`.
    pub fn for_l(z: &PolyPoint, k: usize, tol: f64) -> Result<Self> {
        segment::point_to_chart(z, Space::L, k, tol)?;
        let (m, _) = segment::split_l(z, tol)?;
        let n = z.n();
        let mut vectors = m_vectors(&m, m[k - 1]);
        vectors.push(vec![ONE; n]);
        vectors.push(vec![I; n]);
        Ok(Self { base: z.clone(), space: Space::L, vectors })
    }

    /// Gram matrix of the frame under `⟨⟨·,·⟩⟩`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.vectors.len();
        DMatrix::from_fn(m, m, |i, j| pairing(&self.vectors[i], &self.vectors[j]))
    }

    /// Largest `|g_ij| / sqrt(g_ii g_jj)` over `i ≠ j`.
    pub fn max_off_diagonal(&self) -> f64 {
        let g = self.gram();
        let m = g.nrows();
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    worst = worst.max(g[(i, j)].abs() / (g[(i, i)] * g[(j, j)]).sqrt());
                }
            }
        }
        worst
    }

    /// Numerical rank with singular values relative to the largest.
    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.vectors, tol)
    }

    /// Relative least-squares residual of `d` against the span of the frame.
    pub fn span_residual(&self, d: &[Complex64]) -> f64 {
        span_residual(&self.vectors, d)
    }
}

fn m_vectors(z: &PolyPoint, zeta: Complex64) -> Vec<Vec<Complex64>> {
    let n = z.n();
    let mut vectors = Vec::with_capacity(n + 2);
    vectors.push(z.vertices().iter().map(|w| I * w).collect());
    for j in 1..n {
        let mut e = vec![ZERO; n];
        e[j] = zeta;
        vectors.push(e);
    }
    vectors
}

pub(crate) fn realify(vectors: &[Vec<Complex64>]) -> DMatrix<f64> {
    let rows = 2 * vectors[0].len();
    DMatrix::from_fn(rows, vectors.len(), |r, c| {
        let z = vectors[c][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

/// Rank of a family of vectors of ℂⁿ seen in ℝ²ⁿ.
pub fn numerical_rank(vectors: &[Vec<Complex64>], tol: f64) -> usize {
    let sv = realify(vectors).singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// `‖d − P d‖ / ‖d‖` for `P` the orthogonal projection onto the real span.
pub fn span_residual(vectors: &[Vec<Complex64>], d: &[Complex64]) -> f64 {
    let a = realify(vectors);
    let b = DVector::from_iterator(2 * d.len(), d.iter().flat_map(|z| [z.re, z.im]));
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).expect("U and V were computed");
    let r = &b - &a * x;
    let scale = b.norm();
    if scale == 0.0 {
        0.0
    } else {
        r.norm() / scale
    }
}

/// The three families of flat subspaces through a segment `Z + b⃗`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubspaceKind {
    /// `ℂ*_{Z+b⃗} = {λZ + b⃗ : λ ≠ 0}`.
    CStar,
    /// `ℝⁿ⁻¹_{Z+b⃗} = {ζ(0, c + x) + b⃗ : x ≠ −c}`.
    RealProfile,
    /// `D_{Z+b⃗} = {Z + b⃗ + ω⃗}`.
    Diagonal,
}

#[derive(Debug, Clone)]
pub struct RulingSubspace {
    pub kind: SubspaceKind,
    pub anchor: PolyPoint,
    witness: SegmentWitness,
}

impl RulingSubspace {
    pub fn new(kind: SubspaceKind, anchor: &PolyPoint, tol: f64) -> Result<Self> {
        segment::ensure_in(anchor, Space::L, tol)?;
        let witness = SegmentWitness::of(anchor, tol)?;
        Ok(Self { kind, anchor: anchor.clone(), witness })
    }

    /// Number of real parameters of [`Self::point`].
    pub fn dim(&self) -> usize {
        match self.kind {
            SubspaceKind::CStar | SubspaceKind::Diagonal => 2,
            SubspaceKind::RealProfile => self.anchor.n() - 1,
        }
    }

    /// The set removed from the affine span.
    pub fn excluded(&self) -> &'static str {
        match self.kind {
            SubspaceKind::CStar => "λ = 0, the diagonal point b⃗",
            SubspaceKind::RealProfile => "x = −c, the diagonal point b⃗",
            SubspaceKind::Diagonal => "nothing",
        }
    }

    /// The point with parameters `p`: `(Re λ, Im λ)`, the real offset `x`, or
    /// `(Re ω, Im ω)` depending on the kind.
    pub fn point(&self, p: &[f64]) -> Result<PolyPoint> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        let w = &self.witness;
        let m = PolyPoint::new(w.profile.iter().map(|&x| w.direction * x).collect())?;
        match self.kind {
            SubspaceKind::CStar => {
                let lambda = Complex64::new(p[0], p[1]);
                if lambda == ZERO {
                    return Err(Error::Domain("λ = 0 is excluded".into()));
                }
                Ok(m.affine(lambda, w.base))
            }
            SubspaceKind::RealProfile => {
                let mut v = Vec::with_capacity(m.n());
                v.push(w.base);
                v.extend(w.profile[1..].iter().zip(p).map(|(&c, &x)| w.direction * (c + x) + w.base));
                if v.iter().all(|&q| q == w.base) {
                    return Err(Error::Domain("x = −c is excluded".into()));
                }
                PolyPoint::new(v)
            }
            SubspaceKind::Diagonal => Ok(self.anchor.translate(-Complex64::new(p[0], p[1]))),
        }
    }
}

/// Closed-form test of whether the segment `(1 − t)Z + tW`, `t ∈ [0, 1]`, lies
/// in the manifold: `W` (after moving first vertices to 0 for `L(n)`) must be in
/// `ℝⁿ⁻¹_Z ∪ ℂ*_Z` but not on the ray `{rZ : r ≤ 0}`.
pub fn segment_in_manifold(z: &PolyPoint, w: &PolyPoint, space: Space, tol: f64) -> Result<bool> {
    if z.n() != w.n() {
        return Err(Error::DimensionMismatch { expected: z.n(), got: w.n() });
    }
    segment::ensure_in(z, space, tol)?;
    segment::ensure_in(w, space, tol)?;
    let (z0, w0) = match space {
        Space::M => (z.clone(), w.clone()),
        Space::L => (segment::split_l(z, tol)?.0, segment::split_l(w, tol)?.0),
    };
    Ok(contained_in_m(&z0, &w0, tol))
}

fn contained_in_m(z: &PolyPoint, w: &PolyPoint, tol: f64) -> bool {
    let witness = SegmentWitness::of(z, tol).expect("z is in M(n)");
    let dir = witness.direction;
    let w_scale = w.max_modulus();
    let in_real = w.vertices().iter().all(|q| (dir.conj() * q).im.abs() <= tol * w_scale);

    let zz: f64 = z.vertices().iter().map(|q| q.norm_sqr()).sum();
    let lambda: Complex64 = z.vertices().iter().zip(w.vertices()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / zz;
    let off = w.vertices().iter().zip(z.vertices()).map(|(b, a)| (b - lambda * a).norm_sqr()).sum::<f64>().sqrt();
    let in_cstar = off <= tol * w.norm();

    let on_bad_ray = in_cstar && lambda.im.abs() <= tol * lambda.norm() && lambda.re <= 0.0;
    (in_real || in_cstar) && !on_bad_ray
}

/// Sampling oracle for [`segment_in_manifold`]: checks membership on a uniform
/// grid of `samples` interior parameters, and separately checks that the
/// segment stays away from the diagonal at its closest approach (a crossing of
/// the diagonal is a single point and would slip between grid points).
pub fn segment_in_manifold_sampled(z: &PolyPoint, w: &PolyPoint, space: Space, samples: usize, tol: f64) -> bool {
    if z.n() != w.n() {
        return false;
    }
    let centered = |p: &PolyPoint| -> Vec<Complex64> {
        match space {
            Space::M => p.vertices().to_vec(),
            Space::L => {
                let mean = p.vertices().iter().sum::<Complex64>() / p.n() as f64;
                p.vertices().iter().map(|q| q - mean).collect()
            }
        }
    };
    let zc = centered(z);
    let wc = centered(w);
    let norm = |v: &[Complex64]| pairing(v, v).sqrt();
    let scale = norm(&zc).max(norm(&wc));
    if scale == 0.0 {
        return false;
    }

    let d: Vec<Complex64> = wc.iter().zip(&zc).map(|(a, b)| a - b).collect();
    let dd = pairing(&d, &d);
    let t_star = if dd == 0.0 { 0.0 } else { (-pairing(&zc, &d) / dd).clamp(0.0, 1.0) };
    let closest: Vec<Complex64> = zc.iter().zip(&d).map(|(a, b)| a + b * t_star).collect();
    if norm(&closest) <= tol * scale {
        return false;
    }

    (1..=samples).all(|i| {
        let t = i as f64 / (samples + 1) as f64;
        let p = z.lerp(w, t);
        segment::is_n_segment(&p, tol)
    })
}

/// A straight line `t ↦ point + t·direction` in ℂⁿ.
#[derive(Debug, Clone)]
pub struct RulingLine {
    pub point: PolyPoint,
    pub direction: Vec<Complex64>,
}

impl RulingLine {
    pub fn at(&self, t: f64) -> PolyPoint {
        PolyPoint::new(self.point.vertices().iter().zip(&self.direction).map(|(p, d)| p + d * t).collect())
            .expect("finite line")
    }
}

impl Serialize for RulingLine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            point: Vec<[f64; 2]>,
            direction: Vec<[f64; 2]>,
        }
        let pairs = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect();
        Wire { point: pairs(self.point.vertices()), direction: pairs(&self.direction) }.serialize(s)
    }
}

/// Orthonormal basis `d₁, …, d_m` of ℝᵐ with `⟨dᵢ, x̂⟩ = 1/√m` for every `i`: the
/// Householder reflection taking `(1, …, 1)/√m` to `x̂` applied to the standard
/// basis. Lines through `x` along any `dᵢ` miss the origin when `m ≥ 2`.
fn balanced_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u = 1.0 / (m as f64).sqrt();
    let v: Vec<f64> = x.iter().map(|xi| u - xi / xn).collect();
    let vv: f64 = v.iter().map(|a| a * a).sum();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|r| {
                    let e = if r == i { 1.0 } else { 0.0 };
                    if vv < 1e-300 {
                        e
                    } else {
                        e - 2.0 * v[r] * v[i] / vv
                    }
                })
                .collect()
        })
        .collect()
}

fn unit(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = pairing(&v, &v).sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn profile_lines(witness: &SegmentWitness) -> Vec<Vec<Complex64>> {
    balanced_basis(&witness.profile[1..])
        .into_iter()
        .map(|d| std::iter::once(ZERO).chain(d.into_iter().map(|x| witness.direction * x)).collect())
        .collect()
}

/// `n` pairwise orthogonal lines through `Z` contained in `M(n)`: `n − 1` in
/// `ℝⁿ⁻¹_Z` that avoid `0⃗`, plus `t ↦ (1 + it)Z` in `ℂ*_Z`.
pub fn ruling_lines_m(z: &PolyPoint, tol: f64) -> Result<Vec<RulingLine>> {
    segment::ensure_in(z, Space::M, tol)?;
    let witness = SegmentWitness::of(z, tol)?;
    let mut lines: Vec<RulingLine> =
        profile_lines(&witness).into_iter().map(|direction| RulingLine { point: z.clone(), direction }).collect();
    lines.push(RulingLine { point: z.clone(), direction: unit(z.vertices().iter().map(|w| I * w).collect()) });
    Ok(lines)
}

/// `n + 2` linearly independent lines through `Ẑ` contained in `L(n)`: an
/// orthonormal family of `n + 1` in the span of `ℝⁿ⁻¹_Ẑ` and `D_Ẑ` (starting
/// with the diagonal directions `1⃗`, `i⃗`) avoiding the diagonal, plus
/// `t ↦ (1 + it)Z + b⃗`.
pub fn ruling_lines_l(z: &PolyPoint, tol: f64) -> Result<Vec<RulingLine>> {
    segment::ensure_in(z, Space::L, tol)?;
    let n = z.n();
    let witness = SegmentWitness::of(z, tol)?;
    let x_hat: Vec<Complex64> = {
        let p = &witness.profile;
        unit(p.iter().map(|&x| witness.direction * x).collect())
    };

    let mut seeds = vec![vec![ONE; n], vec![I; n]];
    seeds.extend(profile_lines(&witness));
    let mut ortho: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    for mut v in seeds {
        for q in &ortho {
            let c = pairing(q, &v);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= b * c);
        }
        let v = unit(v);
        // the part orthogonal to the diagonal must not be a multiple of the
        // profile, or the line would hit D_n
        let first = v[0];
        let m_part: Vec<Complex64> = v.iter().map(|q| q - first).collect();
        let mn = pairing(&m_part, &m_part).sqrt();
        if mn > tol && (pairing(&m_part, &x_hat).abs() / mn - 1.0).abs() < 1e-9 {
            return Err(Error::Construction("ruling direction parallel to the profile".into()));
        }
        ortho.push(v);
    }

    let (m, _) = segment::split_l(z, tol)?;
    let mut lines: Vec<RulingLine> =
        ortho.into_iter().map(|direction| RulingLine { point: z.clone(), direction }).collect();
    lines.push(RulingLine { point: z.clone(), direction: unit(m.vertices().iter().map(|w| I * w).collect()) });
    Ok(lines)
}
