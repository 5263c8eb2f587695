use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use super::rotation::{rotation_matrix, LensParams};
use crate::error::{Error, Result};

/// Relative singular-value threshold for numerical kernel dimensions.
pub const KERNEL_TOL: f64 = 1e-8;

/// Largest principal angle accepted as subspace inclusion.
pub const INCLUSION_TOL: f64 = 1e-10;

fn matrix_power(a: &DMatrix<f64>, e: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..e {
        out = &out * a;
    }
    out
}

/// Orthonormal basis (as columns) of `ker a`, from the right singular vectors
/// whose singular value is below `KERNEL_TOL · max(1, σ_max)`.
pub fn kernel_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let cutoff = KERNEL_TOL * svd.singular_values.max().max(1.0);
    let rows: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if rows.is_empty() {
        DMatrix::zeros(a.ncols(), 0)
    } else {
        DMatrix::from_columns(&rows)
    }
}

/// Sine of the largest principal angle between `span u` and its projection
/// onto `span v` (both orthonormal columns); zero iff `span u ⊆ span v`.
pub fn inclusion_angle(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    if v.ncols() == 0 {
        return 1.0;
    }
    let residual = u - v * (v.transpose() * u);
    residual.svd(false, false).singular_values.max().min(1.0)
}

/// `ker(ℛₙʲ − I)` and `ker(ℛₙʲ + I)`.
fn fixed_kernels(n: usize, j: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = matrix_power(&rotation_matrix(n), j);
    let id = DMatrix::identity(n - 1, n - 1);
    (kernel_basis(&(&p - &id)), kernel_basis(&(&p + &id)))
}

/// `(dim ker(ℛₙʲ − I), dim ker(ℛₙʲ + I))` by counting blocks: `ℛₙʲ` has
/// blocks `R_{2πmj/n}`, which are `I₂` iff `n | mj` and `−I₂` iff
/// `mj ≡ n/2 (mod n)`; for even `n` the last entry is `(−1)ʲ`.
pub fn block_count_dims(n: usize, j: usize) -> (usize, usize) {
    let (mut plus, mut minus) = (0, 0);
    for m in 1..=(n - 1) / 2 {
        // the block angle is 2π·m·j/n ≡ 2π·(m·j mod n)/n
        let r = m * j % n;
        if r == 0 {
            plus += 2;
        } else if 2 * r == n {
            minus += 2;
        }
    }
    if n.is_multiple_of(2) {
        if j.is_multiple_of(2) {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    (plus, minus)
}

/// Kernel dimensions by rank-nullity on the numerical power `ℛₙʲ ∓ I`.
pub fn numeric_dims(n: usize, j: usize) -> (usize, usize) {
    let (plus, minus) = fixed_kernels(n, j);
    (plus.ncols(), minus.ncols())
}

/// `𝕊^{d−1}` for a `d`-dimensional subspace, `None` when `d = 0`.
fn sphere(d: usize) -> Option<String> {
    (d > 0).then(|| format!("S^{}", d - 1))
}

/// Fixed-point set `ℓʲ(n) = {X ∈ 𝕊ⁿ⁻² : ℛₙʲX = ±X}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub dim_plus: usize,
    pub dim_minus: usize,
    /// Union of the unit spheres of the two kernels, e.g. `"S^8 ∪ S^9"`.
    pub spheres: String,
    #[serde(serialize_with = "as_label")]
    pub quotient: Quotient,
}

fn as_label<S: Serializer>(q: &Quotient, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl Stratum {
    pub fn is_empty(&self) -> bool {
        self.dim_plus + self.dim_minus == 0
    }
}

fn sphere_union(dim_plus: usize, dim_minus: usize) -> String {
    let parts: Vec<String> = [sphere(dim_plus), sphere(dim_minus)].into_iter().flatten().collect();
    if parts.is_empty() {
        "∅".to_string()
    } else {
        parts.join(" ∪ ")
    }
}

/// Symbolic description of a quotient space; never evaluated topologically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quotient {
    Empty,
    /// A single point, written `{1}`.
    Point,
    Disc(usize),
    Lens(LensParams),
    /// `𝓛(j)`, the space of unlabelled `j`-segments, when no closed form is
    /// substituted.
    Unlabelled(usize),
    /// Closed cone over the base with the classes `[X]`, `[−X]` of the apex
    /// slice identified.
    ConeIdentified(Box<Quotient>),
    Union(Vec<Quotient>),
}

impl Quotient {
    /// `𝓛(j)` with the known closed forms substituted.
    pub fn unlabelled(j: usize) -> Quotient {
        match j {
            0 | 1 => Quotient::Empty,
            2 => Quotient::Point,
            3 => Quotient::Lens(LensParams::new(6, vec![5]).expect("coprime")),
            4 => Quotient::Disc(2),
            5 => Quotient::Lens(LensParams::new(10, vec![7, 9]).expect("coprime")),
            _ => Quotient::Unlabelled(j),
        }
    }

    fn union(parts: Vec<Quotient>) -> Quotient {
        let mut parts: Vec<Quotient> = parts.into_iter().filter(|q| *q != Quotient::Empty).collect();
        match parts.len() {
            0 => Quotient::Empty,
            1 => parts.remove(0),
            _ => Quotient::Union(parts),
        }
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quotient::Empty => write!(f, "∅"),
            Quotient::Point => write!(f, "{{1}}"),
            Quotient::Disc(d) => write!(f, "D^{d}"),
            Quotient::Lens(p) => write!(f, "{}", p.label()),
            Quotient::Unlabelled(j) => write!(f, "L({j})"),
            Quotient::ConeIdentified(base) => write!(f, "(C_{{{base}}}/{{([X],1)~([-X],1)}})"),
            Quotient::Union(parts) => {
                let parts: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join(" ∪ "))
            }
        }
    }
}

fn odd_lens(q: usize, upto: usize) -> Option<LensParams> {
    let p: Vec<i64> = (1..=upto).step_by(2).map(|x| x as i64).collect();
    (!p.is_empty()).then(|| LensParams::new(q as i64, p).expect("1 is a parameter"))
}

/// Quotient `ℓʲ(n)/⟨ℛₙ, ν⟩` for `n = jk`.
pub fn stratum_quotient(j: usize, k: usize) -> Quotient {
    let base = Quotient::unlabelled(j);
    if k % 2 == 1 {
        return base;
    }
    let minus = if j.is_multiple_of(2) {
        Quotient::Lens(odd_lens(2 * j, j - 1).expect("j ≥ 2"))
    } else {
        match odd_lens(j, j.saturating_sub(2)) {
            Some(l) => Quotient::ConeIdentified(Box::new(Quotient::Lens(l))),
            // j = 1: ℓ₋ is 𝕊⁰ = {±e}, identified by ν to a point
            None => Quotient::Point,
        }
    };
    Quotient::union(vec![base, minus])
}

fn check_proper_divisor(n: usize, j: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if j == 0 || j >= n || !n.is_multiple_of(j) {
        return Err(Error::NotProperDivisor { n, j });
    }
    Ok(())
}

/// Builds `ℓʲ(n)`, computing the kernel dimensions by rank-nullity and by
/// block counting and failing if they disagree.
pub fn fixed_sets(n: usize, j: usize) -> Result<Stratum> {
    check_proper_divisor(n, j)?;
    node(n, j)
}

fn node(n: usize, j: usize) -> Result<Stratum> {
    let k = n / j;
    let exact = block_count_dims(n, j);
    let numeric = numeric_dims(n, j);
    if exact != numeric {
        return Err(Error::Construction(format!(
            "fixed-set dimensions for (n, j) = ({n}, {j}) disagree: blocks {exact:?}, rank-nullity {numeric:?}"
        )));
    }
    let (dim_plus, dim_minus) = exact;
    Ok(Stratum {
        n,
        j,
        k,
        dim_plus,
        dim_minus,
        spheres: sphere_union(dim_plus, dim_minus),
        quotient: stratum_quotient(j, k),
    })
}

/// Nonempty fixed-point strata of `𝕊ⁿ⁻²` under `⟨ℛₙ, ν⟩`, the whole sphere
/// `ℓⁿ(n)` as top node, and the covering edges of divisibility between them.
#[derive(Debug, Clone, Serialize)]
pub struct Stratification {
    pub n: usize,
    /// Proper divisors `j` with nonempty `ℓʲ(n)`, ascending; empty for prime `n`.
    pub strata: Vec<Stratum>,
    /// `ℓⁿ(n) = 𝕊ⁿ⁻²` with quotient `𝓛(n)`.
    pub top: Stratum,
    /// `[m, j]` with `m | j`, `m ≠ j`, and no node strictly between.
    pub edges: Vec<[usize; 2]>,
}

/// Computes the singular-locus stratification of `𝓛(n)`.
pub fn stratification(n: usize) -> Result<Stratification> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let mut strata = Vec::new();
    for j in (1..n).filter(|j| n.is_multiple_of(*j)) {
        let s = fixed_sets(n, j)?;
        if !s.is_empty() {
            strata.push(s);
        }
    }
    let top = Stratum {
        n,
        j: n,
        k: 1,
        dim_plus: n - 1,
        dim_minus: 0,
        spheres: sphere_union(n - 1, 0),
        quotient: Quotient::unlabelled(n),
    };
    let mut edges = Vec::new();
    if !strata.is_empty() {
        let nodes: Vec<usize> = strata.iter().map(|s| s.j).chain([n]).collect();
        for &m in &nodes {
            for &j in &nodes {
                let covers =
                    m != j && j % m == 0 && !nodes.iter().any(|&l| l != m && l != j && l % m == 0 && j % l == 0);
                if covers {
                    edges.push([m, j]);
                }
            }
        }
    }
    Ok(Stratification { n, strata, top, edges })
}

impl Stratification {
    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Graph description: one node per stratum labelled with the fixed set and
    /// its quotient, edges pointing from the smaller set to the larger.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph strata_{} {{\n  rankdir=BT;\n  node [shape=box];\n", self.n);
        if self.is_empty() {
            out.push_str(&format!(
                "  // n = {} is prime: the action is free and the singular locus is empty\n",
                self.n
            ));
        }
        for s in self.strata.iter().chain([&self.top]) {
            out.push_str(&format!("  l{} [label=\"ℓ^{}({}) ≅ {}\\n{}\"];\n", s.j, s.j, self.n, s.spheres, s.quotient));
        }
        for [m, j] in &self.edges {
            out.push_str(&format!("  l{m} -> l{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Largest sine of principal angle over the inclusions `ℓᵐ₊ ⊆ ℓʲ₊` and
/// `ℓᵐ₋ ⊆ ker(ℛₙʲ − (−1)^{j/m} I)` for all divisor pairs `m | j` of `n`.
pub fn containment_defect(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let divisors: Vec<usize> = (1..=n).filter(|j| n.is_multiple_of(*j)).collect();
    let kernels: Vec<_> = divisors.iter().map(|&j| fixed_kernels(n, j)).collect();
    let mut worst = 0.0f64;
    for (a, &m) in divisors.iter().enumerate() {
        for (b, &j) in divisors.iter().enumerate() {
            if j % m != 0 {
                continue;
            }
            let (m_plus, m_minus) = &kernels[a];
            let (j_plus, j_minus) = &kernels[b];
            let target = if (j / m) % 2 == 0 { j_plus } else { j_minus };
            worst = worst.max(inclusion_angle(m_plus, j_plus)).max(inclusion_angle(m_minus, target));
        }
    }
    Ok(worst)
}

/// Fixed-space dimensions of the nontrivial group elements `±ℛₙʲ`.
#[derive(Debug, Clone, Serialize)]
pub struct FreenessReport {
    pub n: usize,
    /// `(j, dim ker(ℛₙʲ − I), dim ker(ℛₙʲ + I))`, omitting the identity's
    /// own kernel at `j ≡ 0 (mod n)`.
    pub powers: Vec<(usize, usize, usize)>,
    /// No nontrivial element fixes a point of the sphere.
    pub free: bool,
    /// Proper divisors `j` with nonempty `ℓʲ(n)`.
    pub nonempty_strata: Vec<usize>,
}

/// Checks which elements `±ℛₙʲ`, `j ∈ js`, fix points of `𝕊ⁿ⁻²`, counting
/// blocks and cross-checking by rank-nullity.
pub fn freeness_check(n: usize, js: impl IntoIterator<Item = usize>) -> Result<FreenessReport> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let mut powers = Vec::new();
    for j in js {
        let exact = block_count_dims(n, j % n);
        let numeric = numeric_dims(n, j);
        if exact != numeric {
            return Err(Error::Construction(format!(
                "fixed-space dimensions of R_{n}^{j} disagree: blocks {exact:?}, rank-nullity {numeric:?}"
            )));
        }
        let plus = if j % n == 0 { 0 } else { exact.0 };
        powers.push((j, plus, exact.1));
    }
    let free = powers.iter().all(|&(_, p, m)| p + m == 0);
    let nonempty_strata = (1..n)
        .filter(|j| n.is_multiple_of(*j))
        .filter(|&j| {
            let (p, m) = block_count_dims(n, j);
            p + m > 0
        })
        .collect();
    Ok(FreenessReport { n, powers, free, nonempty_strata })
}
