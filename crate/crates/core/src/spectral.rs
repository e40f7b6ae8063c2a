//! Spectral radius, Perron pairs, trace-power radius estimates, and
//! resolvent solves — the machinery every other module leans on.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{self, SquareMatrix};

/// The dominant eigenstructure of a nonnegative irreducible matrix.
///
/// `rho` is the spectral radius; `left` and `right` are the strictly
/// positive eigenvectors with `left^T M = rho left^T` and
/// `M right = rho right`, each normalized to sum 1.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub rho: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Spectral radius: the maximum modulus over all (possibly complex)
/// eigenvalues, by a full dense eigensolver. For nonnegative irreducible
/// inputs the answer is cross-checked against shifted power iteration.
pub fn spectral_radius(m: &SquareMatrix) -> Result<f64> {
    let n = m.n();
    if n == 0 {
        return Ok(0.0);
    }
    let rho = if m.is_symmetric(0.0) {
        let eig = linalg::symmetric_eigen(m)?;
        eig.values
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    } else {
        let (wr, wi) = linalg::general_eigenvalues(m)?;
        wr.iter()
            .zip(&wi)
            .fold(0.0f64, |acc, (re, im)| acc.max(re.hypot(*im)))
    };

    if m.is_nonnegative() && matrix::is_irreducible(m)? {
        let power = linalg::power_iteration(m, 20_000, 1e-10);
        if power.converged {
            let tol = 1e-6 * rho.max(1.0);
            if (power.value - rho).abs() > tol {
                return Err(Error::Numeric(alloc::format!(
                    "spectral radius cross-check failed: dense solver {rho}, \
                     power iteration {} after {} iterations",
                    power.value,
                    power.iterations
                )));
            }
        }
    }
    Ok(rho)
}

/// Perron pair of a nonnegative irreducible matrix with `n >= 2`.
///
/// The radius comes from the dense solver; both eigenvectors are then
/// polished by shifted inverse iteration and the reported `rho` is the
/// two-sided Rayleigh quotient, which is accurate to the residual squared.
pub fn perron_pair(m: &SquareMatrix) -> Result<PerronPair> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Precondition(alloc::format!(
            "Perron pair requires n >= 2, got {n}"
        )));
    }
    if !m.is_nonnegative() {
        return Err(Error::InvalidInput(
            "Perron pair requires a nonnegative matrix".into(),
        ));
    }
    if !matrix::is_irreducible(m)? {
        return Err(Error::Precondition(
            "Perron pair requires an irreducible matrix \
             (positive-entry digraph strongly connected)"
                .into(),
        ));
    }

    let rho0 = spectral_radius(m)?;
    let scale = m.max_abs().max(1.0);
    let shift = rho0 + 1e-12 * scale;
    let mt = m.transpose();

    let mut right = linalg::inverse_iteration(m, shift, 6);
    let mut left = linalg::inverse_iteration(&mt, shift, 6);
    orient_positive(&mut right)?;
    orient_positive(&mut left)?;
    normalize_sum(&mut right);
    normalize_sum(&mut left);

    // Two-sided Rayleigh quotient.
    let mr = m.mul_vec(&right);
    let num: f64 = left.iter().zip(&mr).map(|(a, b)| a * b).sum();
    let den: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let rho = num / den;

    let resid_tol = 1e-11 * rho.max(1.0);
    let right_resid = residual(&mr, rho, &right);
    let left_ml = m.tr_mul_vec(&left);
    let left_resid = residual(&left_ml, rho, &left);
    if right_resid > resid_tol || left_resid > resid_tol {
        return Err(Error::Numeric(alloc::format!(
            "Perron residuals too large: right {right_resid:.3e}, left {left_resid:.3e} \
             (rho = {rho})"
        )));
    }
    Ok(PerronPair { rho, left, right })
}

fn residual(mv: &[f64], rho: f64, v: &[f64]) -> f64 {
    mv.iter()
        .zip(v)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - rho * b).abs()))
}

/// Flips sign so the vector is positive; fails if entries keep mixed signs
/// beyond tolerance (which Perron-Frobenius rules out for valid inputs).
fn orient_positive(v: &mut [f64]) -> Result<()> {
    let sum: f64 = v.iter().sum();
    if sum < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    let max = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let floor = -1e-10 * max;
    for x in v.iter_mut() {
        if *x <= 0.0 {
            if *x < floor {
                return Err(Error::Numeric(
                    "computed dominant eigenvector is not positive".into(),
                ));
            }
            // A true Perron entry is strictly positive; anything that lands
            // at or below zero here is pure roundoff.
            *x = max * 1e-300;
        }
    }
    Ok(())
}

fn normalize_sum(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
}

/// One point of the trace-power sequence: `trace(M^t)^(1/t)` is undefined
/// (`None`) whenever the trace vanishes, which happens at off-period `t`
/// for periodic matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GelfandPoint {
    pub t: usize,
    pub value: Option<f64>,
}

/// The sequence `trace(M^t)^(1/t)` for `t = 1..=t_max`, which converges to
/// the spectral radius (limsup sense). Powers are accumulated with running
/// rescaling so large radii cannot overflow.
pub fn gelfand_trace_sequence(m: &SquareMatrix, t_max: usize) -> Result<Vec<GelfandPoint>> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidInput(
            "trace-power radius estimates require a nonnegative matrix".into(),
        ));
    }
    if t_max < 1 {
        return Err(Error::InvalidInput("t_max must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(t_max);
    let mut power = m.clone();
    let mut log_scale = 0.0f64;
    for t in 1..=t_max {
        if t > 1 {
            power = power.matmul(m)?;
            let mx = power.max_abs();
            if mx > 1e100 {
                power = power.scaled(1.0 / mx);
                log_scale += mx.ln();
            }
            if !mx.is_finite() {
                return Err(Error::Numeric(alloc::format!(
                    "matrix power overflowed at t = {t} despite rescaling"
                )));
            }
        }
        let tr = power.trace();
        let value = if tr > 0.0 {
            Some(((tr.ln() + log_scale) / t as f64).exp())
        } else {
            None
        };
        out.push(GelfandPoint { t, value });
    }
    Ok(out)
}

/// Which side of the resolvent identity to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `k^T = delta k^T M + z^T`, i.e. `k^T = z^T sum(delta^t M^t)`.
    Left,
    /// `k = delta M k + z`.
    Right,
}

/// Solves the resolvent system `(I - delta M)` against `z` on the requested
/// side. Requires `delta >= 0` and `delta * rho(M) < 1`; outside that disc
/// the walk series has no finite value.
pub fn resolvent_solve(
    m: &SquareMatrix,
    z: &[f64],
    delta: f64,
    side: Side,
) -> Result<Vec<f64>> {
    let n = m.n();
    if z.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "z has length {}, expected {n}",
            z.len()
        )));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidInput(alloc::format!(
            "decay parameter must be finite and nonnegative, got {delta}"
        )));
    }
    if delta > 0.0 {
        let rho = spectral_radius(m)?;
        if delta * rho >= 1.0 {
            return Err(Error::Divergence(alloc::format!(
                "delta * rho = {} >= 1: feedback blows up, no finite solution \
                 (delta = {delta}, rho = {rho})",
                delta * rho
            )));
        }
    }
    // (I - delta M) k = z, transposed for the left-hand convention.
    let system = SquareMatrix::from_fn(n, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        let coupling = match side {
            Side::Left => m.get(j, i),
            Side::Right => m.get(i, j),
        };
        base - delta * coupling
    });
    linalg::solve(&system, z)
}
