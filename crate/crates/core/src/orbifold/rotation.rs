use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::exact::{gcd, shift_matrix};
use crate::error::{Error, Result};

/// Eigenpairs `λₖ = e^{2πik/n}`, `Bₖ = (e^{2πikm/n} − 1)ₘ` of `ℳ`,
/// `k = 1, …, n − 1`, with the substitution residual of each.
#[derive(Debug, Clone)]
pub struct EigenData {
    pub n: usize,
    pub pairs: Vec<(Complex64, Vec<Complex64>)>,
    /// `‖ℳBₖ − λₖBₖ‖ / ‖Bₖ‖`.
    pub residuals: Vec<f64>,
}

fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn eigen_vector(n: usize, k: usize) -> Vec<Complex64> {
    (1..n).map(|m| Complex64::from_polar(1.0, 2.0 * PI * (k * m % n) as f64 / n as f64) - 1.0).collect()
}

pub fn eigen_pairs(n: usize) -> Result<EigenData> {
    let m = shift_matrix(n)?.matrix.to_f64();
    let mut pairs = Vec::with_capacity(n - 1);
    let mut residuals = Vec::with_capacity(n - 1);
    for k in 1..n {
        let lambda = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        let b = eigen_vector(n, k);
        let mb: Vec<Complex64> = (0..n - 1).map(|r| (0..n - 1).map(|c| b[c] * m[(r, c)]).sum::<Complex64>()).collect();
        let diff: Vec<Complex64> = mb.iter().zip(&b).map(|(x, y)| x - lambda * y).collect();
        residuals.push(cnorm(&diff) / cnorm(&b));
        pairs.push((lambda, b));
    }
    Ok(EigenData { n, pairs, residuals })
}

/// Counter-clockwise rotation of the plane by `theta`.
pub fn rotation2(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// `ℛₙ`: blocks `R_{2πm/n}` for `m = 1, …, ⌊(n−1)/2⌋`, then `−1` for even `n`.
pub fn rotation_matrix(n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(n - 1, n - 1);
    for m in 1..=(n - 1) / 2 {
        let b = rotation2(2.0 * PI * m as f64 / n as f64);
        let o = 2 * (m - 1);
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                r[(o + i, o + j)] = *v;
            }
        }
    }
    if n.is_multiple_of(2) {
        r[(n - 2, n - 2)] = -1.0;
    }
    r
}

/// `ℬₙ` with columns `C₁, S₁, …` where `Cⱼ = Re Bⱼ`, `Sⱼ = −Im Bⱼ`, and for
/// even `n` the last column `−C_{n/2}`.
pub fn basis_matrix(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n - 1, n - 1);
    for j in 1..=(n - 1) / 2 {
        let v = eigen_vector(n, j);
        for (r, z) in v.iter().enumerate() {
            b[(r, 2 * (j - 1))] = z.re;
            b[(r, 2 * j - 1)] = -z.im;
        }
    }
    if n.is_multiple_of(2) {
        for (r, z) in eigen_vector(n, n / 2).iter().enumerate() {
            b[(r, n - 2)] = -z.re;
        }
    }
    b
}

/// `ℬₙ` with the sine columns read literally as `−sin(2πmj/n) − 1`.
pub fn literal_basis_matrix(n: usize) -> DMatrix<f64> {
    let mut b = basis_matrix(n);
    for j in 1..=(n - 1) / 2 {
        for m in 1..n {
            b[(m - 1, 2 * j - 1)] = -(2.0 * PI * (m * j) as f64 / n as f64).sin() - 1.0;
        }
    }
    b
}

/// Relative conjugation defect `‖ℬℛ − ℳℬ‖ / ‖ℳℬ‖`.
fn conjugation_defect(m: &DMatrix<f64>, b: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let mb = m * b;
    (b * r - &mb).norm() / mb.norm()
}

/// Threshold for [`rotation_form`]'s conjugation check.
pub const CONJUGATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct RotationNormalForm {
    pub n: usize,
    pub rotation: DMatrix<f64>,
    pub basis: DMatrix<f64>,
    /// `‖ℛₙᵀℛₙ − I‖`.
    pub orthogonality_defect: f64,
    /// `‖ℬₙℛₙ − ℳℬₙ‖ / ‖ℳℬₙ‖` for the basis used.
    pub conjugation_defect: f64,
    /// Same defect for the basis with literal `−sin − 1` entries; `None` when
    /// that matrix is singular.
    pub literal_conjugation_defect: Option<f64>,
}

impl RotationNormalForm {
    /// Whether the literal `−sin − 1` basis also conjugates `ℳ` to `ℛₙ`.
    pub fn literal_basis_conjugates(&self) -> bool {
        self.literal_conjugation_defect.is_some_and(|d| d <= CONJUGATION_TOL)
    }
}

/// Assembles `ℛₙ` and `ℬₙ` and verifies `ℬₙℛₙ = ℳℬₙ`.
pub fn rotation_form(n: usize) -> Result<RotationNormalForm> {
    let m = shift_matrix(n)?.matrix.to_f64();
    let rotation = rotation_matrix(n);
    let basis = basis_matrix(n);
    let orthogonality_defect = (rotation.transpose() * &rotation - DMatrix::identity(n - 1, n - 1)).norm();
    let defect = conjugation_defect(&m, &basis, &rotation);
    if defect.is_nan() || defect > CONJUGATION_TOL || basis.clone().try_inverse().is_none() {
        return Err(Error::Construction(format!("B_n does not conjugate M to R_n for n = {n}: defect {defect:e}")));
    }
    let literal = literal_basis_matrix(n);
    let literal_conjugation_defect = literal.clone().try_inverse().map(|_| conjugation_defect(&m, &literal, &rotation));
    Ok(RotationNormalForm {
        n,
        rotation,
        basis,
        orthogonality_defect,
        conjugation_defect: defect,
        literal_conjugation_defect,
    })
}

/// Structure of the group `⟨ℛₙ, ν⟩`, `ν = −I`, found by enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct GroupStructure {
    pub n: usize,
    pub order: usize,
    pub cyclic: bool,
    /// `"ν·R_n"` when that element generates the group.
    pub generator: Option<String>,
    /// Multiplicative order of `νℛₙ`.
    pub nu_r_order: usize,
    pub nu_in_rotation_subgroup: bool,
}

/// Enumeration cap, relative to `n`.
pub const GROUP_CAP_FACTOR: usize = 8;

fn same(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    (a - b).amax() <= 1e-9
}

fn element_order(g: &DMatrix<f64>, cap: usize) -> Option<usize> {
    let id = DMatrix::identity(g.nrows(), g.ncols());
    let mut p = g.clone();
    for k in 1..=cap {
        if same(&p, &id) {
            return Some(k);
        }
        p = &p * g;
    }
    None
}

/// Enumerates `⟨ℛₙ, ν⟩` by closing `{I}` under multiplication by the two
/// generators.
pub fn group_structure(n: usize) -> Result<GroupStructure> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let cap = GROUP_CAP_FACTOR * n;
    let r = rotation_matrix(n);
    let nu = -DMatrix::<f64>::identity(n - 1, n - 1);
    let mut elements = vec![DMatrix::<f64>::identity(n - 1, n - 1)];
    let mut frontier = elements.clone();
    while let Some(g) = frontier.pop() {
        for h in [&r * &g, &nu * &g] {
            if !elements.iter().any(|e| same(e, &h)) {
                if elements.len() == cap {
                    return Err(Error::Construction(format!("group for n = {n} exceeds {cap} elements")));
                }
                elements.push(h.clone());
                frontier.push(h);
            }
        }
    }
    let order = elements.len();
    let cyclic = elements.iter().any(|g| element_order(g, cap) == Some(order));
    let nu_r_order = element_order(&(&nu * &r), cap).expect("finite group");
    let mut rotations = vec![DMatrix::<f64>::identity(n - 1, n - 1)];
    for _ in 1..n {
        rotations.push(&r * rotations.last().expect("nonempty"));
    }
    let nu_in_rotation_subgroup = rotations.iter().any(|p| same(p, &nu));
    Ok(GroupStructure {
        n,
        order,
        cyclic,
        generator: (nu_r_order == order).then(|| "ν·R_n".to_string()),
        nu_r_order,
        nu_in_rotation_subgroup,
    })
}

/// Parameters of the orbifold lens space `L_q(p₁, …, pₘ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LensParams {
    pub q: i64,
    pub p: Vec<i64>,
    /// `gcd(pₜ, q) = 1` for every `t`: the action is free and the quotient a
    /// manifold.
    pub free: bool,
}

impl LensParams {
    pub fn new(q: i64, p: Vec<i64>) -> Result<Self> {
        if q <= 0 {
            return Err(Error::InvalidArgument(format!("lens order q = {q} must be positive")));
        }
        if p.iter().fold(q, |g, &x| gcd(g, x)) != 1 {
            return Err(Error::InvalidArgument(format!("gcd of {p:?} and {q} is not 1")));
        }
        let free = p.iter().all(|&x| gcd(x, q) == 1);
        Ok(Self { q, p, free })
    }

    /// `L_q(p₁,…,pₘ)`, or `S^1` for a single parameter.
    pub fn label(&self) -> String {
        if self.p.len() == 1 {
            return "S^1".to_string();
        }
        let p: Vec<String> = self.p.iter().map(i64::to_string).collect();
        format!("L_{}({})", self.q, p.join(","))
    }
}

/// Lens parameters of the quotient for odd `n`, `L_{2n}(n+2, n+4, …, 2n−1)`,
/// with a check that `νℛₙ` acts on `ℂ^{(n−1)/2}` by exactly these phases.
#[derive(Debug, Clone, Serialize)]
pub struct OddLens {
    pub params: LensParams,
    /// Largest gap between the sorted eigen-phases of `νℛₙ` and
    /// `{±2πpₜ/(2n)}` (mod 2π).
    pub phase_defect: f64,
}

pub fn lens_params_odd(n: usize) -> Result<OddLens> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("lens parameters are defined for odd n ≥ 3, got {n}")));
    }
    let q = 2 * n as i64;
    let p: Vec<i64> = (1..=(n as i64 - 1) / 2).map(|k| n as i64 + 2 * k).collect();
    let params = LensParams::new(q, p)?;

    let nu_r = -rotation_matrix(n);
    let tau = 2.0 * PI;
    let mut phases: Vec<f64> = nu_r.complex_eigenvalues().iter().map(|z| z.arg().rem_euclid(tau)).collect();
    let mut expected: Vec<f64> = params
        .p
        .iter()
        .flat_map(|&x| {
            let a = tau * x as f64 / q as f64;
            [a, tau - a]
        })
        .collect();
    phases.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let phase_defect = phases.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(OddLens { params, phase_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_examples() {
        let r4 = rotation_matrix(4);
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert!((r4 - expected).amax() < 1e-15);
        let r3 = rotation_matrix(3);
        let h = 3f64.sqrt() / 2.0;
        assert!((r3 - DMatrix::from_row_slice(2, 2, &[-0.5, -h, h, -0.5])).amax() < 1e-15);
    }

    #[test]
    fn lens_labels() {
        assert_eq!(LensParams::new(10, vec![7, 9]).unwrap().label(), "L_10(7,9)");
        assert_eq!(LensParams::new(4, vec![1]).unwrap().label(), "S^1");
        assert!(LensParams::new(6, vec![3]).is_err());
    }
}
