use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// A square integer matrix with overflow-checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntMatrix {
    size: usize,
    /// Row-major entries.
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                entries.push(f(r, c));
            }
        }
        Self { size, entries }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, |r, c| i64::from(r == c))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.size + c]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.size).map(<[i64]>::to_vec).collect()
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut entries = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0i64;
                for k in 0..n {
                    let term = self.get(r, k).checked_mul(other.get(k, c)).ok_or(Error::Overflow)?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow)?;
                }
                entries[r * n + c] = acc;
            }
        }
        Ok(IntMatrix { size: n, entries })
    }

    pub fn checked_pow(&self, e: u32) -> Result<IntMatrix> {
        let mut out = IntMatrix::identity(self.size);
        for _ in 0..e {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.get(r, c) as f64)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The matrix `ℳ` of `(x₂, …, xₙ) ↦ (x₃ − x₂, …, xₙ − x₂, −x₂)`, the
/// re-enumeration of vertices lifted to `ℝⁿ⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftMatrix {
    pub n: usize,
    pub matrix: IntMatrix,
}

/// Builds `ℳ` for `n` vertices and verifies `ℳⁿ = I` exactly.
pub fn shift_matrix(n: usize) -> Result<ShiftMatrix> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let size = n - 1;
    let matrix = IntMatrix::from_fn(size, |r, c| if c == 0 { -1 } else { i64::from(r + 1 < size && c == r + 1) });
    let order = u32::try_from(n).map_err(|_| Error::Overflow)?;
    if matrix.checked_pow(order)? != IntMatrix::identity(size) {
        return Err(Error::Construction(format!("shift matrix for n = {n} does not have order n")));
    }
    Ok(ShiftMatrix { n, matrix })
}

/// Coefficients of `det(xI − A)`, highest degree first, by Berkowitz's
/// division-free algorithm in checked 128-bit arithmetic.
pub fn char_poly(a: &IntMatrix) -> Result<Vec<i128>> {
    let mul = |x: i128, y: i128| x.checked_mul(y).ok_or(Error::Overflow);
    let add = |x: i128, y: i128| x.checked_add(y).ok_or(Error::Overflow);
    let at = |r: usize, c: usize| i128::from(a.get(r, c));

    let mut poly = vec![1i128];
    for k in 1..=a.size() {
        let last = k - 1;
        // first column of the Toeplitz factor: 1, −a_kk, −R·C, −R·A·C, …
        let mut col = Vec::with_capacity(k + 1);
        col.push(1);
        col.push(-at(last, last));
        let mut v: Vec<i128> = (0..last).map(|r| at(r, last)).collect();
        for _ in 0..last {
            let mut rv = 0i128;
            for (c, vc) in v.iter().enumerate() {
                rv = add(rv, mul(at(last, c), *vc)?)?;
            }
            col.push(-rv);
            let mut next = vec![0i128; last];
            for (r, slot) in next.iter_mut().enumerate() {
                for (c, vc) in v.iter().enumerate() {
                    *slot = add(*slot, mul(at(r, c), *vc)?)?;
                }
            }
            v = next;
        }
        let mut next = vec![0i128; k + 1];
        for (r, slot) in next.iter_mut().enumerate() {
            for (c, pc) in poly.iter().enumerate().take(r + 1) {
                *slot = add(*slot, mul(col[r - c], *pc)?)?;
            }
        }
        poly = next;
    }
    Ok(poly)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}
