#![allow(dead_code)]

use rand::Rng;
use segspace::{Complex64, PolyPoint, Space};

/// `ζ(0, x₂, …, xₙ)` with `|ζ| ∈ [0.5, 2]`, `xⱼ ∈ [−1, 1]` and `x ≠ 0`.
pub fn random_m(n: usize, rng: &mut impl Rng) -> PolyPoint {
    let zeta = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-3.2..3.2));
    let mut x: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    if x.iter().all(|v| v.abs() < 1e-3) {
        x[0] = 1.0;
    }
    let mut v = vec![Complex64::new(0.0, 0.0)];
    v.extend(x.iter().map(|&xi| zeta * xi));
    PolyPoint::new(v).unwrap()
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn random_l(n: usize, rng: &mut impl Rng) -> PolyPoint {
    random_m(n, rng).translate(random_complex(rng, 2.0))
}

pub fn random_in(space: Space, n: usize, rng: &mut impl Rng) -> PolyPoint {
    match space {
        Space::M => random_m(n, rng),
        Space::L => random_l(n, rng),
    }
}

/// Pairs `(Z, W)` drawn from a mix of generic pairs and the boundary cases of
/// the containment criterion: `W` on `ℂ*_Z`, on the rays `rZ` with `r > 0`
/// and `r < 0`, and in `ℝⁿ⁻¹_Z`, each translated independently for `L(n)`.
pub fn random_pair(space: Space, n: usize, rng: &mut impl Rng) -> (PolyPoint, PolyPoint) {
    let z = random_m(n, rng);
    let w =
        match rng.random_range(0..6) {
            0 | 1 => random_m(n, rng),
            2 => {
                let lambda = Complex64::from_polar(rng.random_range(0.2..3.0), rng.random_range(-3.0..3.0));
                z.scale(lambda)
            }
            3 => z.scale(Complex64::new(rng.random_range(0.1..3.0), 0.0)),
            4 => z.scale(Complex64::new(-rng.random_range(0.1..3.0), 0.0)),
            _ => {
                // ζ(0, c + x): perturb the real profile along the segment direction
                let k = (1..n).max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm())).unwrap();
                let dir = z[k] / z[k].norm();
                let v = z.vertices().iter().enumerate().map(|(i, p)| {
                    if i == 0 {
                        *p
                    } else {
                        p + dir * rng.random_range(-1.0..1.0)
                    }
                });
                PolyPoint::new(v.collect()).unwrap()
            }
        };
    match space {
        Space::M => (z, w),
        Space::L => (z.translate(random_complex(rng, 2.0)), w.translate(random_complex(rng, 2.0))),
    }
}

/// `‖a − b‖ / ‖b‖` over the vertices.
pub fn relative_error(a: &PolyPoint, b: &PolyPoint) -> f64 {
    let d = a - b;
    let nb = b.vertices().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    d.vertices().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / nb
}
