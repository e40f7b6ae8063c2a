//! LU factorization with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Row-pivoted LU factors of a square matrix.
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    /// perm[k] = original row selected as pivot row k.
    perm: Vec<usize>,
    smallest_pivot: f64,
    scale: f64,
}

impl LuFactors {
    /// Factors `a`. `pivot_floor`, when positive, replaces vanishing pivots
    /// with a signed floor instead of failing; inverse iteration relies on
    /// this to solve against a nearly singular shifted matrix.
    pub fn new(a: &SquareMatrix, pivot_floor: f64) -> LuFactors {
        let n = a.n();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        let mut smallest_pivot = f64::INFINITY;

        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let mut pivot = lu[k * n + k];
            if pivot.abs() < pivot_floor {
                pivot = if pivot >= 0.0 { pivot_floor } else { -pivot_floor };
                lu[k * n + k] = pivot;
            }
            smallest_pivot = smallest_pivot.min(pivot.abs());
            if pivot == 0.0 {
                continue;
            }
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }

        LuFactors {
            n,
            lu,
            perm,
            smallest_pivot: if n == 0 { 1.0 } else { smallest_pivot },
            scale,
        }
    }

    pub fn smallest_pivot(&self) -> f64 {
        self.smallest_pivot
    }

    /// Singularity heuristic: pivot collapsed relative to the input scale.
    pub fn is_singular(&self) -> bool {
        self.smallest_pivot <= f64::EPSILON * self.n as f64 * self.scale.max(1e-300)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut x = vec![0.0; n];
        for k in 0..n {
            x[k] = b[self.perm[k]];
        }
        for k in 0..n {
            for i in (k + 1)..n {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    x[i] -= f * x[k];
                }
            }
        }
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                x[k] -= self.lu[k * n + j] * x[j];
            }
            x[k] /= self.lu[k * n + k];
        }
        x
    }
}

/// Solves `a x = b`, failing on (numerically) singular systems.
pub fn solve(a: &SquareMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "rhs length {} does not match matrix size {}",
            b.len(),
            a.n()
        )));
    }
    let f = LuFactors::new(a, 0.0);
    if f.is_singular() {
        return Err(Error::Numeric(alloc::format!(
            "singular linear system (smallest pivot {:.3e})",
            f.smallest_pivot()
        )));
    }
    Ok(f.solve(b))
}
