//! Power iteration and shifted inverse iteration.
//!
//! Power iteration on `M + sI` (any `s > 0`) cross-checks the dominant
//! eigenvalue of a nonnegative irreducible matrix: the shift adds a loop at
//! every node, which makes the matrix primitive without moving the Perron
//! vector. Inverse iteration recovers that vector to machine precision once
//! the eigenvalue is known.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::lu::LuFactors;
use crate::matrix::SquareMatrix;

pub struct PowerOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Dominant-eigenvalue estimate of a nonnegative matrix by shifted power
/// iteration. Returns the estimate for `M` itself (shift removed).
pub fn power_iteration(m: &SquareMatrix, max_iter: usize, tol: f64) -> PowerOutcome {
    let n = m.n();
    let shift = 1.0f64.max(m.max_abs() / 16.0);
    let mut v = vec![1.0 / n as f64; n];
    let mut value = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let mut w = m.mul_vec(&v);
        for i in 0..n {
            w[i] += shift * v[i];
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return PowerOutcome {
                value: -shift,
                vector: v,
                converged: true,
                iterations,
            };
        }
        for x in &mut w {
            *x /= norm;
        }
        // Rayleigh quotient of the shifted matrix at w.
        let mut mw = m.mul_vec(&w);
        for i in 0..n {
            mw[i] += shift * w[i];
        }
        let rq: f64 = w.iter().zip(&mw).map(|(a, b)| a * b).sum();
        let resid = mw
            .iter()
            .zip(&w)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - rq * b).abs()));
        v = w;
        value = rq - shift;
        if resid <= tol * rq.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    PowerOutcome {
        value,
        vector: v,
        converged,
        iterations,
    }
}

/// Inverse iteration: the eigenvector of `m` for the eigenvalue closest to
/// `shift`. The shifted system is deliberately near-singular; the LU pivot
/// floor keeps the solves finite and the normalization absorbs the blow-up.
pub fn inverse_iteration(m: &SquareMatrix, shift: f64, sweeps: usize) -> Vec<f64> {
    let n = m.n();
    let scale = m.max_abs().max(1.0);
    let mut shifted = m.clone();
    for i in 0..n {
        let v = shifted.get(i, i) - shift;
        shifted.set(i, i, v);
    }
    let factors = LuFactors::new(&shifted, f64::EPSILON * scale * n as f64);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..sweeps {
        let w = factors.solve(&v);
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        let prev = v.clone();
        v = w.iter().map(|x| x / norm).collect();
        // Fix orientation against the previous iterate so convergence is
        // monotone rather than alternating in sign.
        let dot: f64 = v.iter().zip(&prev).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        let diff = v
            .iter()
            .zip(&prev)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if diff < 1e-15 {
            break;
        }
    }
    v
}
