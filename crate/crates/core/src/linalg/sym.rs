//! Symmetric eigendecomposition: Householder tridiagonalization followed by
//! implicit-shift QL iteration (the classic tred2/tql2 pair).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Full decomposition `A = V diag(values) V^T` of a symmetric matrix.
///
/// Eigenvalues are ascending; column `k` of `vectors` is the unit
/// eigenvector for `values[k]`, with sign fixed so the entry of largest
/// magnitude is positive.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: SquareMatrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// Index of the eigenvalue of largest modulus.
    pub fn top_modulus_index(&self) -> usize {
        let mut best = 0;
        for k in 1..self.values.len() {
            if self.values[k].abs() > self.values[best].abs() {
                best = k;
            }
        }
        best
    }
}

pub fn symmetric_eigen(a: &SquareMatrix) -> Result<SymmetricEigen> {
    let n = a.n();
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok(SymmetricEigen {
            values: d,
            vectors: v,
        });
    }
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    // Deterministic sign convention.
    for k in 0..n {
        let mut arg = 0;
        let mut big = 0.0;
        for i in 0..n {
            let x = v.get(i, k).abs();
            if x > big {
                big = x;
                arg = i;
            }
        }
        if v.get(arg, k) < 0.0 {
            for i in 0..n {
                let x = v.get(i, k);
                v.set(i, k, -x);
            }
        }
    }
    Ok(SymmetricEigen {
        values: d,
        vectors: v,
    })
}

/// Householder reduction to tridiagonal form; accumulates the orthogonal
/// transformation in `v`.
fn tred2(v: &mut SquareMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.n();
    for (j, dj) in d.iter_mut().enumerate() {
        *dj = v.get(n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                for k in (j + 1)..i {
                    g += v.get(k, j) * d[k];
                    e[k] += v.get(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let cur = v.get(k, j);
                    v.set(k, j, cur - (f * e[k] + g * d[k]));
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v.set(n - 1, i, v.get(i, i));
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for (k, dk) in d.iter_mut().enumerate().take(i + 1) {
                *dk = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for (k, dk) in d.iter().enumerate().take(i + 1) {
                    let cur = v.get(k, j);
                    v.set(k, j, cur - g * dk);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for (j, dj) in d.iter_mut().enumerate() {
        *dj = v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal form; sorts eigenpairs ascending.
fn tql2(v: &mut SquareMatrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = v.n();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());

        let mut m = l;
        while m < n {
            if e[m].abs() <= tst1 * f64::EPSILON {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 50 {
                    return Err(Error::Numeric(alloc::format!(
                        "symmetric QL failed to converge at index {l} after 50 sweeps"
                    )));
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v.get(k, i + 1);
                        v.set(k, i + 1, s * v.get(k, i) + c * h);
                        v.set(k, i, c * v.get(k, i) - s * h);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= tst1 * f64::EPSILON {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort ascending, moving vectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if *dj < p {
                k = j;
                p = *dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                let tmp = v.get(j, i);
                v.set(j, i, v.get(j, k));
                v.set(j, k, tmp);
            }
        }
    }
    Ok(())
}
