//! Pareto analysis of voluntary public-goods provision.
//!
//! Costly own actions, nonnegative external benefits. The benefits matrix
//! `B(x)` holds the marginal rates of substitution
//! `b_ij = (du_i/dx_j) / (-du_i/dx_i)`: how much own action `i` would trade
//! for a unit of `j`'s. Its spectral radius classifies the point:
//! `rho > 1` means everyone can gain by scaling actions up along the Perron
//! direction, `rho < 1` by scaling down, and `rho = 1` is Pareto efficient
//! with the left Perron vector as the planner weights.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{self, SquareMatrix};
use crate::spectral;

/// A profile of utilities over joint action vectors `x >= 0`.
///
/// Contract: own-action derivatives stay strictly negative (actions are
/// costly) and cross derivatives stay nonnegative (external benefits).
pub trait UtilityModel {
    fn agents(&self) -> usize;
    fn value(&self, i: usize, x: &[f64]) -> f64;
    /// Full gradient of `u_i`: entry `j` is `du_i/dx_j` at `x`.
    fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64>;
}

/// Quadratic own cost plus linear external benefits:
/// `u_i = -(x_i + c_i)^2 / 2 + sum_j g_ij x_j`.
///
/// At `x = 0` with unit shifts the benefits matrix is exactly `g`.
#[derive(Debug, Clone)]
pub struct LinearBenefitModel {
    g: SquareMatrix,
    c_shift: Vec<f64>,
}

/// Quadratic own cost plus logarithmic external benefits:
/// `u_i = -(x_i + c_i)^2 / 2 + sum_j g_ij ln(1 + x_j)`.
///
/// Benefits decay as others act, so rays from an improvable origin cross
/// the efficient frontier at finite scale.
#[derive(Debug, Clone)]
pub struct LogBenefitModel {
    g: SquareMatrix,
    c_shift: Vec<f64>,
}

fn validate_family(g: &SquareMatrix, c_shift: &[f64]) -> Result<()> {
    if !g.is_nonnegative() {
        return Err(Error::InvalidInput(
            "benefit weights must be nonnegative".into(),
        ));
    }
    for i in 0..g.n() {
        if g.get(i, i) != 0.0 {
            return Err(Error::InvalidInput(alloc::format!(
                "benefit matrix needs a zero diagonal (g[{i}][{i}] = {})",
                g.get(i, i)
            )));
        }
    }
    if c_shift.len() != g.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "{} cost shifts for {} agents",
            c_shift.len(),
            g.n()
        )));
    }
    if c_shift.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidInput(
            "cost shifts must be strictly positive".into(),
        ));
    }
    Ok(())
}

pub fn linear_benefit_family(g: SquareMatrix, c_shift: Vec<f64>) -> Result<LinearBenefitModel> {
    validate_family(&g, &c_shift)?;
    let model = LinearBenefitModel { g, c_shift };
    validate_gradient(&model)?;
    Ok(model)
}

pub fn log_benefit_family(g: SquareMatrix, c_shift: Vec<f64>) -> Result<LogBenefitModel> {
    validate_family(&g, &c_shift)?;
    let model = LogBenefitModel { g, c_shift };
    validate_gradient(&model)?;
    Ok(model)
}

impl UtilityModel for LinearBenefitModel {
    fn agents(&self) -> usize {
        self.g.n()
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        let own = x[i] + self.c_shift[i];
        let benefits: f64 = self
            .g
            .row(i)
            .iter()
            .zip(x)
            .map(|(gij, xj)| gij * xj)
            .sum();
        -0.5 * own * own + benefits
    }

    fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut grad = self.g.row(i).to_vec();
        grad[i] = -(x[i] + self.c_shift[i]);
        grad
    }
}

impl UtilityModel for LogBenefitModel {
    fn agents(&self) -> usize {
        self.g.n()
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        let own = x[i] + self.c_shift[i];
        let benefits: f64 = self
            .g
            .row(i)
            .iter()
            .zip(x)
            .map(|(gij, xj)| gij * (1.0 + xj).ln())
            .sum();
        -0.5 * own * own + benefits
    }

    fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let n = self.agents();
        let mut grad = vec![0.0; n];
        for j in 0..n {
            grad[j] = self.g.get(i, j) / (1.0 + x[j]);
        }
        grad[i] = -(x[i] + self.c_shift[i]);
        grad
    }
}

/// Central-difference check of the analytic gradients at a probe point.
fn validate_gradient(model: &dyn UtilityModel) -> Result<()> {
    let n = model.agents();
    let x: Vec<f64> = (0..n).map(|i| 0.1 + 0.05 * i as f64).collect();
    let worst = gradient_mismatch(model, &x);
    if worst > 1e-5 {
        return Err(Error::Numeric(alloc::format!(
            "analytic gradient disagrees with finite differences by {worst:.3e}"
        )));
    }
    Ok(())
}

/// Largest relative gap between the analytic gradient and central finite
/// differences (`h = 1e-6`) at `x`.
pub fn gradient_mismatch(model: &dyn UtilityModel, x: &[f64]) -> f64 {
    let n = model.agents();
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..n {
        let grad = model.gradient(i, x);
        for j in 0..n {
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[j] += h;
            lo[j] -= h;
            let fd = (model.value(i, &hi) - model.value(i, &lo)) / (2.0 * h);
            let scale = grad[j].abs().max(1.0);
            worst = worst.max((fd - grad[j]).abs() / scale);
        }
    }
    worst
}

/// The marginal-rate-of-substitution matrix at `x`.
#[derive(Debug, Clone)]
pub struct BenefitsMatrix {
    pub b: SquareMatrix,
    pub at_x: Vec<f64>,
}

pub fn benefits_matrix(model: &dyn UtilityModel, x: &[f64]) -> Result<BenefitsMatrix> {
    let n = model.agents();
    if x.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "point has {} coordinates for {n} agents",
            x.len()
        )));
    }
    if x.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput(
            "actions must be nonnegative".into(),
        ));
    }
    let mut b = SquareMatrix::zeros(n);
    for i in 0..n {
        let grad = model.gradient(i, x);
        let own = grad[i];
        if own >= 0.0 {
            return Err(Error::ModelViolation(alloc::format!(
                "du_{i}/dx_{i} = {own} >= 0 at the evaluation point; \
                 actions must be costly"
            )));
        }
        for j in 0..n {
            if i != j {
                b.set(i, j, grad[j] / -own);
            }
        }
    }
    Ok(BenefitsMatrix { b, at_x: x.to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParetoClass {
    /// `rho > 1`: everyone gains by scaling up along `direction`.
    ImprovableUp,
    /// `rho < 1`: everyone gains by scaling down, i.e. moving along the
    /// negated Perron direction.
    ImprovableDown,
    Efficient,
}

#[derive(Debug, Clone)]
pub struct ParetoVerdict {
    pub rho: f64,
    pub classification: ParetoClass,
    /// Sup-normalized movement direction for improvable points (already
    /// negated for the scale-down case).
    pub direction: Option<Vec<f64>>,
    /// Sum-normalized Pareto weights (left Perron vector) at efficiency.
    pub weights: Option<Vec<f64>>,
}

/// The spectral efficiency test: Pareto efficient iff `rho(B(x)) = 1`
/// (within `tol`, boundary counted as efficient).
pub fn pareto_classify(model: &dyn UtilityModel, x: &[f64], tol: f64) -> Result<ParetoVerdict> {
    let bm = benefits_matrix(model, x)?;
    if !matrix::is_irreducible(&bm.b)? {
        return Err(Error::Precondition(
            "benefits matrix is reducible: some group is impossible to \
             partition benefits across; spectral test undefined"
                .into(),
        ));
    }
    let pair = spectral::perron_pair(&bm.b)?;
    let rho = pair.rho;
    if rho > 1.0 + tol {
        let mut direction = pair.right;
        sup_normalize(&mut direction);
        Ok(ParetoVerdict {
            rho,
            classification: ParetoClass::ImprovableUp,
            direction: Some(direction),
            weights: None,
        })
    } else if rho < 1.0 - tol {
        let mut direction = pair.right;
        sup_normalize(&mut direction);
        for v in &mut direction {
            *v = -*v;
        }
        Ok(ParetoVerdict {
            rho,
            classification: ParetoClass::ImprovableDown,
            direction: Some(direction),
            weights: None,
        })
    } else {
        Ok(ParetoVerdict {
            rho,
            classification: ParetoClass::Efficient,
            direction: None,
            weights: Some(pair.left),
        })
    }
}

fn sup_normalize(v: &mut [f64]) {
    let sup = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for x in v.iter_mut() {
        *x /= sup;
    }
}

/// First-order and realized gains from moving `eta` along `direction`.
#[derive(Debug, Clone)]
pub struct ImprovementCheck {
    /// `sum_j du_i/dx_j * direction_j` per agent.
    pub first_order: Vec<f64>,
    /// `u_i(x + eta * direction) - u_i(x)` per agent.
    pub realized: Vec<f64>,
}

pub fn verify_improvement(
    model: &dyn UtilityModel,
    x: &[f64],
    direction: &[f64],
    eta: f64,
) -> Result<ImprovementCheck> {
    let n = model.agents();
    if direction.len() != n || x.len() != n {
        return Err(Error::InvalidInput(
            "direction and point must match the agent count".into(),
        ));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidInput("step size must be positive".into()));
    }
    let moved: Vec<f64> = x
        .iter()
        .zip(direction)
        .map(|(xi, di)| xi + eta * di)
        .collect();
    let mut first_order = vec![0.0; n];
    let mut realized = vec![0.0; n];
    for i in 0..n {
        let grad = model.gradient(i, x);
        first_order[i] = grad.iter().zip(direction).map(|(g, d)| g * d).sum();
        realized[i] = model.value(i, &moved) - model.value(i, x);
    }
    Ok(ImprovementCheck {
        first_order,
        realized,
    })
}

/// Stationarity residual of the weighted planner objective at `x`:
/// `max_j |sum_i theta_i dtilde_ij|` where `dtilde` is the Jacobian with
/// each row rescaled so the own-action entry is -1. Zero (to solver
/// accuracy) exactly at Pareto-efficient points with Perron weights.
pub fn stationarity_residual(
    model: &dyn UtilityModel,
    x: &[f64],
    weights: &[f64],
) -> Result<f64> {
    let n = model.agents();
    if weights.len() != n {
        return Err(Error::InvalidInput(
            "one weight per agent required".into(),
        ));
    }
    let mut residual = vec![0.0; n];
    for i in 0..n {
        let grad = model.gradient(i, x);
        let own = grad[i];
        if own >= 0.0 {
            return Err(Error::ModelViolation(alloc::format!(
                "du_{i}/dx_{i} = {own} >= 0; costly-actions assumption broken"
            )));
        }
        for j in 0..n {
            residual[j] += weights[i] * grad[j] / -own;
        }
    }
    Ok(residual.iter().fold(0.0f64, |a, b| a.max(b.abs())))
}

/// One agent's removal outcome in [`EssentialReport`].
#[derive(Debug, Clone)]
pub struct AgentRemoval {
    pub agent: usize,
    /// Spectral radius after zeroing the agent's row and column (indices
    /// keep their positions).
    pub rho_without: f64,
    pub essential: bool,
}

#[derive(Debug, Clone)]
pub struct EssentialReport {
    pub rho_full: f64,
    /// Whether the status quo is improvable at all (`rho_full > 1`).
    pub improvable: bool,
    pub removals: Vec<AgentRemoval>,
}

/// Essential-agent scan at the status quo `x = 0`: agent `i` is essential
/// when the full benefits matrix supports an improvement (`rho > 1`) but
/// zeroing row and column `i` drops the radius below 1.
pub fn essential_agents(model: &dyn UtilityModel) -> Result<EssentialReport> {
    let n = model.agents();
    let origin = vec![0.0; n];
    let bm = benefits_matrix(model, &origin)?;
    let rho_full = spectral::spectral_radius(&bm.b)?;
    let improvable = rho_full > 1.0;
    let mut removals = Vec::with_capacity(n);
    for agent in 0..n {
        let mut zeroed = bm.b.clone();
        for k in 0..n {
            zeroed.set(agent, k, 0.0);
            zeroed.set(k, agent, 0.0);
        }
        let rho_without = radius_or_zero(&zeroed)?;
        removals.push(AgentRemoval {
            agent,
            rho_without,
            essential: improvable && rho_without < 1.0,
        });
    }
    Ok(EssentialReport {
        rho_full,
        improvable,
        removals,
    })
}

/// Spectral radius that reports exact zero for nilpotent matrices (acyclic
/// benefit digraphs) instead of eigensolver noise.
fn radius_or_zero(m: &SquareMatrix) -> Result<f64> {
    let mut power = m.clone();
    for _ in 0..m.n() {
        if power.max_abs() == 0.0 {
            return Ok(0.0);
        }
        power = power.matmul(m)?;
    }
    if power.max_abs() == 0.0 {
        return Ok(0.0);
    }
    spectral::spectral_radius(m)
}

/// Bisection along the ray `x = s * direction` for the scale where
/// `rho(B(x)) = 1`. Requires `rho` above 1 at `s = 0` and a model whose
/// benefits decay along the ray (the log family qualifies).
pub fn bisect_efficient_scale(
    model: &dyn UtilityModel,
    direction: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let n = model.agents();
    if direction.len() != n || direction.iter().any(|&d| d < 0.0) {
        return Err(Error::InvalidInput(
            "need a nonnegative ray direction per agent".into(),
        ));
    }
    let rho_at = |s: f64| -> Result<f64> {
        let x: Vec<f64> = direction.iter().map(|d| s * d).collect();
        spectral::spectral_radius(&benefits_matrix(model, &x)?.b)
    };
    if rho_at(0.0)? <= 1.0 {
        return Err(Error::Precondition(
            "ray search expects an improvable origin (rho > 1 at x = 0)".into(),
        ));
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while rho_at(hi)? > 1.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::Numeric(
                "no efficient point found along the ray".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho_at(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (rho_at(hi)? - 1.0).abs() <= tol {
            break;
        }
    }
    Ok(direction.iter().map(|d| hi * d).collect())
}
