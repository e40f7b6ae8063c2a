//! Linear-quadratic games on a spillover network.
//!
//! Agent `i` picks effort `x_i >= 0` and earns
//! `-gamma_i x_i^2 / 2 + (beta_i + sum_j g_ij x_j) x_i`. Dividing `u_i` by
//! `gamma_i` leaves best responses unchanged, so the game is carried in
//! normalized form: `b_i = beta_i / gamma_i`, `m_ij = g_ij / gamma_i`. With
//! `rho(M) < 1` the unique Nash equilibrium is `x* = (I - M)^-1 b` — each
//! agent's `(1, b)` Katz-Bonacich centrality in the transposed network —
//! and best-response dynamics `x(t+1) = b + M x(t)` converge to it
//! geometrically.
//!
//! The welfare analysis (efficient benchmark, price of anarchy) additionally
//! assumes uniform `gamma` and symmetric `M`; those entry points enforce
//! symmetry and leave the `gamma` contract to the caller.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, LuFactors};
use crate::matrix::SquareMatrix;
use crate::spectral::{self, Side};

/// Raw game primitives: cost curvatures, standalone productivities, and the
/// spillover matrix (zero diagonal).
#[derive(Debug, Clone)]
pub struct GameSpec {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub g: SquareMatrix,
}

/// The game after dividing each utility by its cost curvature.
#[derive(Debug, Clone)]
pub struct NormalizedGame {
    pub b: Vec<f64>,
    pub m: SquareMatrix,
    pub rho: f64,
}

pub fn normalize(spec: &GameSpec) -> Result<NormalizedGame> {
    let n = spec.g.n();
    if spec.gamma.len() != n || spec.beta.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "gamma/beta lengths ({}, {}) must match network size {n}",
            spec.gamma.len(),
            spec.beta.len()
        )));
    }
    if spec.gamma.iter().any(|&g| !(g > 0.0)) || spec.beta.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidInput(
            "gamma and beta must be strictly positive".into(),
        ));
    }
    for i in 0..n {
        if spec.g.get(i, i) != 0.0 {
            return Err(Error::InvalidInput(alloc::format!(
                "spillover matrix must have a zero diagonal (g[{i}][{i}] = {})",
                spec.g.get(i, i)
            )));
        }
    }
    let b: Vec<f64> = spec
        .beta
        .iter()
        .zip(&spec.gamma)
        .map(|(beta, gamma)| beta / gamma)
        .collect();
    let m = SquareMatrix::from_fn(n, |i, j| spec.g.get(i, j) / spec.gamma[i]);
    let rho = spectral::spectral_radius(&m)?;
    Ok(NormalizedGame { b, m, rho })
}

impl NormalizedGame {
    /// Wraps an already-normalized `(b, M)` pair.
    pub fn from_parts(b: Vec<f64>, m: SquareMatrix) -> Result<Self> {
        if b.len() != m.n() {
            return Err(Error::InvalidInput(alloc::format!(
                "b length {} must match network size {}",
                b.len(),
                m.n()
            )));
        }
        let rho = spectral::spectral_radius(&m)?;
        Ok(NormalizedGame { b, m, rho })
    }

    fn require_subcritical(&self) -> Result<()> {
        if self.rho >= 1.0 {
            return Err(Error::Divergence(alloc::format!(
                "rho(M) = {} >= 1: feedback effects blow up and no equilibrium exists",
                self.rho
            )));
        }
        Ok(())
    }

    fn require_symmetric(&self, what: &str) -> Result<()> {
        if !self.m.is_symmetric(1e-12) {
            return Err(Error::Precondition(alloc::format!(
                "{what} requires a symmetric spillover matrix"
            )));
        }
        Ok(())
    }
}

/// Unique Nash equilibrium solution.
#[derive(Debug, Clone)]
pub struct NashSolution {
    pub actions: Vec<f64>,
    /// The unconstrained solve can dip below zero when spillovers are
    /// negative; reported so callers can warn.
    pub all_nonnegative: bool,
}

/// `x* = (I - M)^-1 b`, requiring `rho(M) < 1`.
pub fn nash_equilibrium(ng: &NormalizedGame) -> Result<NashSolution> {
    ng.require_subcritical()?;
    let actions = spectral::resolvent_solve(&ng.m, &ng.b, 1.0, Side::Right)?;
    let all_nonnegative = actions.iter().all(|&x| x >= 0.0);
    Ok(NashSolution {
        actions,
        all_nonnegative,
    })
}

#[derive(Debug, Clone)]
pub struct BestResponseRun {
    /// `x(0), x(1), ...` up to the stopping time.
    pub trajectory: Vec<Vec<f64>>,
    pub converged: bool,
    /// Set when the iterates grow past any plausible fixed point.
    pub diverged: bool,
}

/// Iterates `x(t+1) = b + M x(t)`. Defined for any spectral radius; when
/// `rho(M) < 1` the limit is the Nash equilibrium.
pub fn best_response_dynamics(
    ng: &NormalizedGame,
    x0: &[f64],
    t_max: usize,
    tol: f64,
) -> Result<BestResponseRun> {
    if x0.len() != ng.m.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "x0 length {} must match network size {}",
            x0.len(),
            ng.m.n()
        )));
    }
    let mut trajectory = vec![x0.to_vec()];
    let mut converged = false;
    let mut diverged = false;
    let mut x = x0.to_vec();
    let mut first_step = None;
    let mut prev_step = f64::INFINITY;
    let mut growth_streak = 0usize;
    for _ in 0..t_max {
        let mut next = ng.m.mul_vec(&x);
        for (v, b) in next.iter_mut().zip(&ng.b) {
            *v += b;
        }
        let step = next
            .iter()
            .zip(&x)
            .fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        x = next;
        trajectory.push(x.clone());
        if step <= tol {
            converged = true;
            break;
        }
        // Contractions shrink the update eventually; a sustained and large
        // blow-up of the step size marks the supercritical regime.
        let step0 = *first_step.get_or_insert(step);
        if step > prev_step {
            growth_streak += 1;
        } else {
            growth_streak = 0;
        }
        prev_step = step;
        if growth_streak >= 10 && step > 100.0 * (step0 + 1e-12) {
            diverged = true;
            break;
        }
    }
    Ok(BestResponseRun {
        trajectory,
        converged,
        diverged,
    })
}

/// Keyness: `kappa^T = 1^T (I - M)^-1`, the sensitivity of total
/// equilibrium effort to each agent's standalone productivity. This is the
/// `(1, 1)` Katz-Bonacich vector of `M` in the left convention.
pub fn keyness(ng: &NormalizedGame) -> Result<Vec<f64>> {
    ng.require_subcritical()?;
    spectral::resolvent_solve(&ng.m, &vec![1.0; ng.m.n()], 1.0, Side::Left)
}

/// Total welfare `V(x) = sum_i [-x_i^2/2 + (b_i + (Mx)_i) x_i]` in
/// normalized units (exact utilitarian welfare when the original cost
/// curvatures are uniform).
pub fn total_welfare(ng: &NormalizedGame, x: &[f64]) -> f64 {
    let mx = ng.m.mul_vec(x);
    x.iter()
        .zip(&ng.b)
        .zip(&mx)
        .map(|((xi, bi), mi)| -0.5 * xi * xi + (bi + mi) * xi)
        .sum()
}

/// Welfare-maximizing profile `x_eff = (I - 2M)^-1 b`; the first-order
/// conditions of `V` when `M` is symmetric, a maximum when `2 rho(M) < 1`.
pub fn efficient_profile(ng: &NormalizedGame) -> Result<Vec<f64>> {
    ng.require_symmetric("the efficient benchmark")?;
    if 2.0 * ng.rho >= 1.0 {
        return Err(Error::Divergence(alloc::format!(
            "2 rho(M) = {} >= 1: the welfare objective is unbounded",
            2.0 * ng.rho
        )));
    }
    spectral::resolvent_solve(&ng.m, &ng.b, 2.0, Side::Right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoaMode {
    /// `((1 - rho) / (1 - 2 rho))^2`, independent of `b`.
    ClosedForm,
    /// Multistart projected gradient ascent of `V(x_eff) / V(x*)` over
    /// positive `b` on the unit sphere.
    Empirical,
}

#[derive(Debug, Clone)]
pub struct PoaOutcome {
    pub value: f64,
    /// The maximizing direction found (empirical mode only).
    pub maximizer: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct PoaSearchOptions {
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for PoaSearchOptions {
    fn default() -> Self {
        PoaSearchOptions {
            starts: 32,
            iters: 400,
            seed: 0,
        }
    }
}

pub fn price_of_anarchy(ng: &NormalizedGame, mode: PoaMode) -> Result<PoaOutcome> {
    ng.require_symmetric("the price of anarchy")?;
    if 2.0 * ng.rho >= 1.0 {
        return Err(Error::Divergence(alloc::format!(
            "2 rho(M) = {} >= 1: efficient welfare is unbounded",
            2.0 * ng.rho
        )));
    }
    match mode {
        PoaMode::ClosedForm => Ok(PoaOutcome {
            value: ((1.0 - ng.rho) / (1.0 - 2.0 * ng.rho)).powi(2),
            maximizer: None,
        }),
        PoaMode::Empirical => empirical_poa(ng, &PoaSearchOptions::default()),
    }
}

/// Maximizes the welfare ratio `V(x_eff(b)) / V(x*(b))` over positive unit
/// `b`. Starts at the top three eigendirections (clamped positive) plus
/// seeded random positive vectors; ascent steps use backtracking and a
/// positivity floor.
pub fn empirical_poa(ng: &NormalizedGame, opts: &PoaSearchOptions) -> Result<PoaOutcome> {
    ng.require_symmetric("the price of anarchy")?;
    let n = ng.m.n();
    let nash_sys = SquareMatrix::from_fn(n, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - ng.m.get(i, j)
    });
    let eff_sys = SquareMatrix::from_fn(n, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - 2.0 * ng.m.get(i, j)
    });
    let nash_lu = LuFactors::new(&nash_sys, 0.0);
    let eff_lu = LuFactors::new(&eff_sys, 0.0);
    if nash_lu.is_singular() || eff_lu.is_singular() {
        return Err(Error::Numeric("welfare systems are singular".into()));
    }

    // ratio(b) = (b^T (I-2M)^-1 b) / |(I-M)^-1 b|^2, both halved; the halves
    // cancel.
    let ratio_and_grad = |b: &[f64]| -> (f64, Vec<f64>) {
        let x_eff = eff_lu.solve(b);
        let x_nash = nash_lu.solve(b);
        let v_eff: f64 = b.iter().zip(&x_eff).map(|(u, v)| u * v).sum();
        let v_nash: f64 = x_nash.iter().map(|v| v * v).sum();
        let value = v_eff / v_nash;
        // grad V_eff = 2 x_eff; grad V_nash = 2 (I-M)^-1 x_nash (symmetry).
        let y = nash_lu.solve(&x_nash);
        let grad: Vec<f64> = x_eff
            .iter()
            .zip(&y)
            .map(|(xe, yi)| 2.0 * (xe * v_nash - v_eff * yi) / (v_nash * v_nash))
            .collect();
        (value, grad)
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let eig = linalg::symmetric_eigen(&ng.m)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.values[b]
            .abs()
            .partial_cmp(&eig.values[a].abs())
            .unwrap()
    });
    for &k in order.iter().take(3.min(n)) {
        starts.push(positive_unit(&eig.vector(k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        starts.push(positive_unit(&v));
    }

    let floor = 1e-12;
    let mut best_value = f64::MIN;
    let mut best_b = starts[0].clone();
    for start in starts {
        let mut b = start;
        let (mut value, mut grad) = ratio_and_grad(&b);
        for _ in 0..opts.iters {
            // Tangent component keeps steps on the sphere.
            let radial: f64 = grad.iter().zip(&b).map(|(g, bi)| g * bi).sum();
            let tangent: Vec<f64> = grad
                .iter()
                .zip(&b)
                .map(|(g, bi)| g - radial * bi)
                .collect();
            let tnorm: f64 = tangent.iter().map(|v| v * v).sum::<f64>().sqrt();
            if tnorm < 1e-14 {
                break;
            }
            let mut eta = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let candidate: Vec<f64> = b
                    .iter()
                    .zip(&tangent)
                    .map(|(bi, t)| (bi + eta * t).max(floor))
                    .collect();
                let candidate = positive_unit(&candidate);
                let (cand_value, cand_grad) = ratio_and_grad(&candidate);
                if cand_value > value {
                    b = candidate;
                    value = cand_value;
                    grad = cand_grad;
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best_b = b;
        }
    }
    Ok(PoaOutcome {
        value: best_value,
        maximizer: Some(best_b),
    })
}

fn positive_unit(v: &[f64]) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    let flip = if sum < 0.0 { -1.0 } else { 1.0 };
    let mut out: Vec<f64> = v.iter().map(|&x| (flip * x).max(1e-9)).collect();
    let norm: f64 = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut out {
        *x /= norm;
    }
    out
}

/// Everything the CLI reports about one game.
#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub x_star: Vec<f64>,
    pub all_nonnegative: bool,
    pub keyness: Vec<f64>,
    pub welfare_nash: Option<f64>,
    pub x_eff: Option<Vec<f64>>,
    pub welfare_eff: Option<f64>,
    pub poa_closed_form: Option<f64>,
}

/// Solves the game end to end. Welfare, the efficient benchmark, and the
/// closed-form price of anarchy are filled only in the symmetric,
/// subcritical regime where they are defined.
pub fn analyze(ng: &NormalizedGame) -> Result<EquilibriumReport> {
    let nash = nash_equilibrium(ng)?;
    let kappa = keyness(ng)?;
    let welfare_branch = ng.m.is_symmetric(1e-12) && 2.0 * ng.rho < 1.0;
    let (welfare_nash, x_eff, welfare_eff, poa_closed_form) = if welfare_branch {
        let eff = efficient_profile(ng)?;
        (
            Some(total_welfare(ng, &nash.actions)),
            Some(eff.clone()),
            Some(total_welfare(ng, &eff)),
            Some(price_of_anarchy(ng, PoaMode::ClosedForm)?.value),
        )
    } else {
        (None, None, None, None)
    };
    Ok(EquilibriumReport {
        x_star: nash.actions,
        all_nonnegative: nash.all_nonnegative,
        keyness: kappa,
        welfare_nash,
        x_eff,
        welfare_eff,
        poa_closed_form,
    })
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::centrality;
    use crate::testkit;

    fn two_node_game(coupling: f64) -> NormalizedGame {
        let m = SquareMatrix::from_rows(&[vec![0.0, coupling], vec![coupling, 0.0]]).unwrap();
        NormalizedGame::from_parts(vec![1.0, 1.0], m).unwrap()
    }

    #[test]
    fn normalize_divides_by_gamma() {
        let spec = GameSpec {
            gamma: vec![2.0, 2.0],
            beta: vec![2.0, 4.0],
            g: SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        };
        let ng = normalize(&spec).unwrap();
        assert_eq!(ng.b, vec![1.0, 2.0]);
        assert_eq!(ng.m.get(0, 1), 0.5);
        assert_eq!(ng.m.get(1, 0), 0.5);
    }

    #[test]
    fn normalize_rejects_bad_primitives() {
        let g = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let bad_gamma = GameSpec {
            gamma: vec![0.0, 1.0],
            beta: vec![1.0, 1.0],
            g: g.clone(),
        };
        assert!(matches!(normalize(&bad_gamma), Err(Error::InvalidInput(_))));
        let bad_diag = GameSpec {
            gamma: vec![1.0, 1.0],
            beta: vec![1.0, 1.0],
            g: SquareMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap(),
        };
        assert!(matches!(normalize(&bad_diag), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gamma_rescaling_leaves_equilibrium_unchanged() {
        let g = testkit::random_symmetric_with_radius(5, 17, 0.3);
        let spec = GameSpec {
            gamma: vec![1.0; 5],
            beta: vec![1.0, 2.0, 0.5, 1.5, 1.0],
            g: g.clone(),
        };
        let scaled = GameSpec {
            gamma: vec![10.0; 5],
            beta: spec.beta.clone(),
            g,
        };
        let x1 = nash_equilibrium(&normalize(&spec).unwrap()).unwrap().actions;
        let x2 = nash_equilibrium(&normalize(&scaled).unwrap())
            .unwrap()
            .actions;
        // Scaling gamma scales b and m by 1/10; the equilibrium solves a
        // different but proportional fixed point. With uniform scaling of
        // both, x* changes unless beta scales too; scale beta alongside to
        // keep b fixed.
        let consistent = GameSpec {
            gamma: vec![10.0; 5],
            beta: spec.beta.iter().map(|b| b * 10.0).collect(),
            g: scaled.g.scaled(10.0),
        };
        let x3 = nash_equilibrium(&normalize(&consistent).unwrap())
            .unwrap()
            .actions;
        for (a, c) in x1.iter().zip(&x3) {
            assert!((a - c).abs() < 1e-10);
        }
        // And the un-consistent scaling genuinely moves the point.
        assert!(testkit::max_abs_diff(&x1, &x2) > 1e-3);
    }

    #[test]
    fn nash_without_spillovers_is_b() {
        let ng = NormalizedGame::from_parts(vec![1.5, 2.5], SquareMatrix::zeros(2)).unwrap();
        let nash = nash_equilibrium(&ng).unwrap();
        assert_eq!(nash.actions, vec![1.5, 2.5]);
        assert!(nash.all_nonnegative);
    }

    #[test]
    fn nash_two_node_half_coupling() {
        let ng = two_node_game(0.5);
        let x = nash_equilibrium(&ng).unwrap().actions;
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nash_is_katz_bonacich_in_transposed_network() {
        for seed in 0..8u64 {
            let m = testkit::random_irreducible(7, seed).scaled(0.08);
            let b: Vec<f64> = (0..7).map(|i| 0.5 + 0.3 * i as f64).collect();
            let ng = NormalizedGame::from_parts(b.clone(), m.clone()).unwrap();
            let x = nash_equilibrium(&ng).unwrap().actions;
            let kb = centrality::katz_bonacich(&m.transpose(), 1.0, &b, Side::Left).unwrap();
            assert!(testkit::max_abs_diff(&x, &kb.scores) < 1e-10);
        }
    }

    #[test]
    fn nash_rejects_supercritical_network() {
        let ng = two_node_game(1.1);
        assert!(matches!(nash_equilibrium(&ng), Err(Error::Divergence(_))));
    }

    #[test]
    fn best_response_fixed_point_stays_fixed() {
        let ng = two_node_game(0.5);
        let x_star = nash_equilibrium(&ng).unwrap().actions;
        let run = best_response_dynamics(&ng, &x_star, 50, 1e-12).unwrap();
        assert!(run.converged);
        assert_eq!(run.trajectory.len(), 2);
    }

    #[test]
    fn best_response_partial_sums() {
        let ng = two_node_game(0.5);
        let run = best_response_dynamics(&ng, &[0.0, 0.0], 3, 0.0).unwrap();
        // x(3) = b + Mb + M^2 b = (7/4, 7/4)
        let x3 = &run.trajectory[3];
        assert!((x3[0] - 1.75).abs() < 1e-12);
        assert!((x3[1] - 1.75).abs() < 1e-12);
    }

    #[test]
    fn best_response_converges_to_nash_geometrically() {
        let m = testkit::random_symmetric_with_radius(6, 5, 0.9);
        let ng = NormalizedGame::from_parts(vec![1.0; 6], m).unwrap();
        let x_star = nash_equilibrium(&ng).unwrap().actions;
        let run = best_response_dynamics(&ng, &[0.0; 6], 2000, 1e-13).unwrap();
        assert!(run.converged);
        // |x(t) - x*| <= C rho^t with C from the t = 0 gap.
        let c0 = x_star.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let c = 4.0 * c0;
        for (t, x) in run.trajectory.iter().enumerate().skip(1) {
            let err = testkit::max_abs_diff(x, &x_star);
            assert!(err <= c * ng.rho.powi(t as i32) + 1e-12, "t = {t}: {err}");
        }
    }

    #[test]
    fn best_response_flags_divergence() {
        // rank-one stochastic scaled to rho = 1.2
        let m = SquareMatrix::from_fn(4, |_, _| 1.2 / 4.0);
        let ng = NormalizedGame::from_parts(vec![1.0; 4], m).unwrap();
        let run = best_response_dynamics(&ng, &[1.0; 4], 50, 1e-9).unwrap();
        assert!(run.diverged);
        assert!(!run.converged);
    }

    #[test]
    fn keyness_without_spillovers_is_one() {
        let ng = NormalizedGame::from_parts(vec![1.0, 1.0], SquareMatrix::zeros(2)).unwrap();
        assert_eq!(keyness(&ng).unwrap(), vec![1.0, 1.0]);
        let coupled = two_node_game(0.5);
        let k = keyness(&coupled).unwrap();
        assert!((k[0] - 2.0).abs() < 1e-12);
        assert!((k[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn keyness_is_gradient_of_total_effort() {
        for seed in 0..6u64 {
            let m = testkit::random_irreducible(6, seed).scaled(0.09);
            let b = vec![1.0; 6];
            let ng = NormalizedGame::from_parts(b.clone(), m.clone()).unwrap();
            let kappa = keyness(&ng).unwrap();
            let total = |bb: &[f64]| -> f64 {
                let ngb = NormalizedGame::from_parts(bb.to_vec(), m.clone()).unwrap();
                nash_equilibrium(&ngb).unwrap().actions.iter().sum()
            };
            let h = 1e-6;
            for i in 0..6 {
                let mut bumped = b.clone();
                bumped[i] += h;
                let fd = (total(&bumped) - total(&b)) / h;
                assert!(
                    (fd - kappa[i]).abs() <= 1e-4 * kappa[i].abs().max(1.0),
                    "agent {i}: fd {fd} vs kappa {}",
                    kappa[i]
                );
            }
        }
    }

    #[test]
    fn welfare_examples() {
        let ng = two_node_game(0.25);
        assert_eq!(total_welfare(&ng, &[0.0, 0.0]), 0.0);
        let x = nash_equilibrium(&ng).unwrap().actions;
        assert!((x[0] - 4.0 / 3.0).abs() < 1e-12);
        // At Nash, V = |x*|^2 / 2.
        let direct = total_welfare(&ng, &x);
        let half_norm: f64 = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        assert!((direct - half_norm).abs() < 1e-12);
        assert!((direct - 16.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn nash_welfare_is_half_squared_norm_on_random_instances() {
        for seed in 0..6u64 {
            let m = testkit::random_symmetric_with_radius(7, seed, 0.35);
            let b: Vec<f64> = (0..7).map(|i| 0.4 + 0.2 * i as f64).collect();
            let ng = NormalizedGame::from_parts(b, m).unwrap();
            let x = nash_equilibrium(&ng).unwrap().actions;
            let direct = total_welfare(&ng, &x);
            let half_norm: f64 = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
            assert!((direct - half_norm).abs() < 1e-10);
        }
    }

    #[test]
    fn efficient_profile_examples() {
        let zero = NormalizedGame::from_parts(vec![1.0, 2.0], SquareMatrix::zeros(2)).unwrap();
        assert_eq!(efficient_profile(&zero).unwrap(), vec![1.0, 2.0]);
        let ng = two_node_game(0.25);
        let eff = efficient_profile(&ng).unwrap();
        assert!((eff[0] - 2.0).abs() < 1e-12);
        assert!((eff[1] - 2.0).abs() < 1e-12);
        assert!((total_welfare(&ng, &eff) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn efficient_profile_guards() {
        let asym = NormalizedGame::from_parts(
            vec![1.0, 1.0],
            SquareMatrix::from_rows(&[vec![0.0, 0.3], vec![0.1, 0.0]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            efficient_profile(&asym),
            Err(Error::Precondition(_))
        ));
        let hot = two_node_game(0.6);
        assert!(matches!(efficient_profile(&hot), Err(Error::Divergence(_))));
    }

    #[test]
    fn efficient_welfare_dominates_nash() {
        for seed in 0..10u64 {
            let m = testkit::random_symmetric_with_radius(6, seed, 0.3);
            let b: Vec<f64> = (0..6).map(|i| 0.5 + 0.25 * i as f64).collect();
            let ng = NormalizedGame::from_parts(b, m).unwrap();
            let nash = nash_equilibrium(&ng).unwrap().actions;
            let eff = efficient_profile(&ng).unwrap();
            assert!(total_welfare(&ng, &eff) >= total_welfare(&ng, &nash) - 1e-12);
        }
    }

    #[test]
    fn welfare_spectral_decomposition_identities() {
        // In the eigenbasis of symmetric M, with bt = W^T b:
        //   V(x*)   = sum bt_l^2 / (1 - lambda_l)^2 / 2
        //   V(x_eff) = sum bt_l^2 / (1 - 2 lambda_l) / 2
        for seed in 0..5u64 {
            let m = testkit::random_symmetric_with_radius(6, 40 + seed, 0.32);
            let b: Vec<f64> = (0..6).map(|i| 0.7 + 0.1 * i as f64).collect();
            let ng = NormalizedGame::from_parts(b.clone(), m.clone()).unwrap();
            let eig = crate::linalg::symmetric_eigen(&m).unwrap();
            let bt: Vec<f64> = (0..6)
                .map(|k| {
                    let v = eig.vector(k);
                    v.iter().zip(&b).map(|(u, w)| u * w).sum()
                })
                .collect();
            let v_nash_spec: f64 = bt
                .iter()
                .zip(&eig.values)
                .map(|(bl, l): (&f64, &f64)| 0.5 * bl * bl / ((1.0 - l) * (1.0 - l)))
                .sum();
            let v_eff_spec: f64 = bt
                .iter()
                .zip(&eig.values)
                .map(|(bl, l): (&f64, &f64)| 0.5 * bl * bl / (1.0 - 2.0 * l))
                .sum();
            let nash = nash_equilibrium(&ng).unwrap().actions;
            let eff = efficient_profile(&ng).unwrap();
            assert!((total_welfare(&ng, &nash) - v_nash_spec).abs() < 1e-9);
            assert!((total_welfare(&ng, &eff) - v_eff_spec).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_poa_examples() {
        let flat = NormalizedGame::from_parts(vec![1.0, 1.0], SquareMatrix::zeros(2)).unwrap();
        assert!(
            (price_of_anarchy(&flat, PoaMode::ClosedForm).unwrap().value - 1.0).abs() < 1e-12
        );
        let quarter = two_node_game(0.25);
        assert!(
            (price_of_anarchy(&quarter, PoaMode::ClosedForm).unwrap().value - 2.25).abs()
                < 1e-12
        );
    }

    #[test]
    fn empirical_poa_finds_top_eigenvector_and_true_supremum() {
        // The welfare ratio's exact supremum over positive b is
        // (1 - rho)^2 / (1 - 2 rho), attained along the Perron direction;
        // the quoted closed form squares the second factor and is an upper
        // bound, not the supremum (see the welfare identities above).
        for &rho in &[0.1, 0.25, 0.4] {
            let m = testkit::random_symmetric_with_radius(6, 77, rho);
            let ng = NormalizedGame::from_parts(vec![1.0; 6], m.clone()).unwrap();
            let out = empirical_poa(&ng, &PoaSearchOptions::default()).unwrap();
            let true_sup = (1.0 - rho) * (1.0 - rho) / (1.0 - 2.0 * rho);
            assert!(
                (out.value - true_sup).abs() <= 1e-6 * true_sup,
                "rho {rho}: {} vs {true_sup}",
                out.value
            );
            let closed = price_of_anarchy(&ng, PoaMode::ClosedForm).unwrap().value;
            assert!(out.value <= closed + 1e-9);
            let maximizer = out.maximizer.unwrap();
            let eig = crate::linalg::symmetric_eigen(&m).unwrap();
            let top = eig.vector(eig.top_modulus_index());
            assert!(testkit::cosine(&maximizer, &top).abs() >= 0.99);
        }
    }

    #[test]
    fn welfare_ratio_never_exceeds_closed_form() {
        let m = testkit::random_symmetric_with_radius(5, 23, 0.3);
        let ng = NormalizedGame::from_parts(vec![1.0; 5], m).unwrap();
        let closed = price_of_anarchy(&ng, PoaMode::ClosedForm).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let b: Vec<f64> = (0..5).map(|_| rng.gen_range(0.01..2.0)).collect();
            let ngb = NormalizedGame::from_parts(b, ng.m.clone()).unwrap();
            let nash = nash_equilibrium(&ngb).unwrap().actions;
            let eff = efficient_profile(&ngb).unwrap();
            let ratio = total_welfare(&ngb, &eff) / total_welfare(&ngb, &nash);
            assert!(ratio <= closed + 1e-9);
        }
    }

    #[test]
    fn analyze_fills_welfare_branch_only_when_defined() {
        let sym = two_node_game(0.25);
        let report = analyze(&sym).unwrap();
        assert!(report.welfare_nash.is_some());
        assert!(report.poa_closed_form.is_some());
        let asym = NormalizedGame::from_parts(
            vec![1.0, 1.0],
            SquareMatrix::from_rows(&[vec![0.0, 0.3], vec![0.1, 0.0]]).unwrap(),
        )
        .unwrap();
        let report = analyze(&asym).unwrap();
        assert!(report.welfare_nash.is_none());
        assert!(report.x_eff.is_none());
        assert_eq!(report.keyness.len(), 2);
    }
}
