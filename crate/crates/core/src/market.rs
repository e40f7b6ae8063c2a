//! Pricing-game welfare under noisy measurement and robust interventions.
//!
//! Quantities respond to prices as `q(x) = q0 + M x` with own-price
//! normalization `M_ii = -1` and symmetric cross effects. A cost
//! perturbation `-sigma` moves economic surplus by
//! `V(sigma) = q0^T (I - M)^-1 M sigma`, which diagonalizes to
//! `sum_l alpha_l beta_l lambda_l / (1 - lambda_l)` in the eigenbasis of
//! `M`. The authority only sees `M + E` and `q0 + z` for Wigner-style noise
//! `E`; the designed intervention therefore leans exclusively on the
//! eigenvectors whose eigenvalues clear a threshold `tau`, where
//! Davis-Kahan guarantees recovery.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, SymmetricEigen};
use crate::matrix::SquareMatrix;

/// A ground-truth market: symmetric price-response matrix with `-1`
/// diagonal, positive pre-intervention quantities, and the noise scale and
/// seed used for observation.
#[derive(Debug, Clone)]
pub struct MarketScenario {
    m: SquareMatrix,
    q0: Vec<f64>,
    noise_sd: f64,
    seed: u64,
    eigen: SymmetricEigen,
}

impl MarketScenario {
    pub fn new(m: SquareMatrix, q0: Vec<f64>, noise_sd: f64, seed: u64) -> Result<Self> {
        let n = m.n();
        if q0.len() != n {
            return Err(Error::InvalidInput(alloc::format!(
                "q0 has length {}, expected {n}",
                q0.len()
            )));
        }
        if q0.iter().any(|&q| !(q > 0.0)) {
            return Err(Error::InvalidInput(
                "pre-intervention quantities must be strictly positive".into(),
            ));
        }
        if !(noise_sd >= 0.0) {
            return Err(Error::InvalidInput(
                "noise standard deviation must be nonnegative".into(),
            ));
        }
        for i in 0..n {
            if m.get(i, i) != -1.0 {
                return Err(Error::InvalidInput(alloc::format!(
                    "diagonal must be exactly -1 (entry {i} is {})",
                    m.get(i, i)
                )));
            }
        }
        if !m.is_symmetric(1e-12) {
            return Err(Error::InvalidInput(
                "price-response matrix must be symmetric".into(),
            ));
        }
        let eigen = linalg::symmetric_eigen(&m)?;
        if eigen.values.iter().any(|l| (l - 1.0).abs() < 1e-9) {
            return Err(Error::InvalidInput(
                "an eigenvalue of M sits within 1e-9 of 1, so I - M is singular".into(),
            ));
        }
        Ok(MarketScenario {
            m,
            q0,
            noise_sd,
            seed,
            eigen,
        })
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.m
    }

    pub fn q0(&self) -> &[f64] {
        &self.q0
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Eigendecomposition of the true matrix.
    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eigen
    }

    /// Unit top-modulus eigenvector of the true matrix.
    pub fn top_eigenvector(&self) -> Vec<f64> {
        self.eigen.vector(self.eigen.top_modulus_index())
    }

    /// Spacing between the largest and second-largest eigenvalue moduli.
    pub fn top_modulus_gap(&self) -> f64 {
        let mut moduli: Vec<f64> = self.eigen.values.iter().map(|l| l.abs()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if moduli.len() < 2 {
            return 0.0;
        }
        moduli[moduli.len() - 1] - moduli[moduli.len() - 2]
    }
}

/// What the authority sees: `M + E` (E symmetric Wigner) and `q0 + z`.
#[derive(Debug, Clone)]
pub struct NoisyObservation {
    pub m_hat: SquareMatrix,
    pub q0_hat: Vec<f64>,
}

/// Replicate 0 of the observation process.
pub fn observe(scenario: &MarketScenario) -> NoisyObservation {
    observe_replicate(scenario, 0)
}

/// Deterministic observation for `(scenario.seed, replicate)`: i.i.d.
/// `Normal(0, noise_sd^2)` upper-triangle (diagonal included) mirrored to
/// keep `E` symmetric bit-exactly, then the same for `z`.
pub fn observe_replicate(scenario: &MarketScenario, replicate: u64) -> NoisyObservation {
    let n = scenario.n();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(replicate);
    let sd = scenario.noise_sd;
    let mut m_hat = scenario.m.clone();
    for i in 0..n {
        for j in i..n {
            let draw: f64 = rng.sample(StandardNormal);
            let e = sd * draw;
            m_hat.set(i, j, m_hat.get(i, j) + e);
            if j != i {
                m_hat.set(j, i, m_hat.get(j, i) + e);
            }
        }
    }
    let q0_hat: Vec<f64> = scenario
        .q0
        .iter()
        .map(|q| {
            let draw: f64 = rng.sample(StandardNormal);
            q + sd * draw
        })
        .collect();
    NoisyObservation { m_hat, q0_hat }
}

/// Equilibrium price shift from a cost perturbation: solves
/// `(I - M) x_dot = c_dot`.
pub fn price_response(scenario: &MarketScenario, c_dot: &[f64]) -> Result<Vec<f64>> {
    solve_i_minus_m(scenario.matrix(), c_dot)
}

fn solve_i_minus_m(m: &SquareMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.n();
    let system = SquareMatrix::from_fn(n, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - m.get(i, j)
    });
    linalg::solve(&system, rhs)
}

/// Surplus effect of an intervention: `V(sigma) = q0^T (I - M)^-1 M sigma`.
pub fn welfare_effect(scenario: &MarketScenario, sigma: &[f64]) -> Result<f64> {
    if sigma.len() != scenario.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "sigma has length {}, expected {}",
            sigma.len(),
            scenario.n()
        )));
    }
    let m_sigma = scenario.matrix().mul_vec(sigma);
    let propagated = solve_i_minus_m(scenario.matrix(), &m_sigma)?;
    Ok(scenario
        .q0()
        .iter()
        .zip(&propagated)
        .map(|(q, p)| q * p)
        .sum())
}

/// One eigen-mode's contribution to the welfare sum.
#[derive(Debug, Clone)]
pub struct SpectralTerm {
    pub lambda: f64,
    /// Coefficient of `sigma` on the eigenvector.
    pub alpha: f64,
    /// Coefficient of `q0` on the eigenvector.
    pub beta: f64,
    /// `alpha * beta * lambda / (1 - lambda)`.
    pub contribution: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralWelfare {
    pub value: f64,
    pub terms: Vec<SpectralTerm>,
}

/// The welfare effect mode by mode: diagonalize `M = W L W^T`, expand
/// `sigma` and `q0` in `W`, and sum `alpha_l beta_l lambda_l/(1-lambda_l)`.
pub fn spectral_welfare(scenario: &MarketScenario, sigma: &[f64]) -> Result<SpectralWelfare> {
    if sigma.len() != scenario.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "sigma has length {}, expected {}",
            sigma.len(),
            scenario.n()
        )));
    }
    let eigen = scenario.eigen();
    let mut terms = Vec::with_capacity(eigen.values.len());
    let mut value = 0.0;
    for (k, &lambda) in eigen.values.iter().enumerate() {
        if (lambda - 1.0).abs() < 1e-9 {
            return Err(Error::Numeric(alloc::format!(
                "eigenvalue {lambda} within 1e-9 of 1: welfare series singular"
            )));
        }
        let w = eigen.vector(k);
        let alpha: f64 = w.iter().zip(sigma).map(|(a, b)| a * b).sum();
        let beta: f64 = w.iter().zip(scenario.q0()).map(|(a, b)| a * b).sum();
        let contribution = alpha * beta * lambda / (1.0 - lambda);
        value += contribution;
        terms.push(SpectralTerm {
            lambda,
            alpha,
            beta,
            contribution,
        });
    }
    Ok(SpectralWelfare { value, terms })
}

#[derive(Debug, Clone)]
pub struct RecoverableStructure {
    pub holds: bool,
    /// Euclidean norm of the projection of `q0` onto the span of
    /// eigenvectors with `|lambda| >= mu`.
    pub projection_norm: f64,
    /// Dimension of that span.
    pub space_dim: usize,
}

/// Tests `(mu, delta)`-recoverable structure: does `q0` project with norm
/// at least `delta` onto the large-eigenvalue subspace?
pub fn recoverable_structure(
    scenario: &MarketScenario,
    mu: f64,
    delta: f64,
) -> RecoverableStructure {
    let eigen = scenario.eigen();
    let mut norm_sq = 0.0;
    let mut space_dim = 0;
    for (k, lambda) in eigen.values.iter().enumerate() {
        if lambda.abs() >= mu {
            space_dim += 1;
            let w = eigen.vector(k);
            let beta: f64 = w.iter().zip(scenario.q0()).map(|(a, b)| a * b).sum();
            norm_sq += beta * beta;
        }
    }
    let projection_norm = norm_sq.sqrt();
    RecoverableStructure {
        holds: projection_norm >= delta,
        projection_norm,
        space_dim,
    }
}

#[derive(Debug, Clone)]
pub struct DesignOptions {
    /// Eigenvalue inclusion threshold on the observed matrix.
    pub tau: f64,
    /// Surplus the design must clear.
    pub target: f64,
    /// The hatted estimate is steered to `margin * target` to absorb
    /// estimation error.
    pub margin: f64,
}

impl DesignOptions {
    pub fn new(tau: f64, target: f64) -> Self {
        DesignOptions {
            tau,
            target,
            margin: 2.0,
        }
    }
}

/// An intervention built purely from the noisy observation, plus the truth
/// metrics a simulation may fill in afterwards.
#[derive(Debug, Clone)]
pub struct InterventionReport {
    pub sigma: Vec<f64>,
    /// Welfare the design believes it achieves (hatted quantities).
    pub estimated_welfare: f64,
    /// Welfare under the true matrix; simulation only.
    pub true_welfare: Option<f64>,
    /// Number of observed eigenvalues above the threshold.
    pub top_space_dim: usize,
    /// Unit eigenvector of the observed matrix at the top-modulus selected
    /// eigenvalue.
    pub top_vector: Vec<f64>,
    /// `|<w1_true, w1_hat>|`; simulation only.
    pub alignment: Option<f64>,
}

/// Builds the robust intervention from an observation alone: keep the
/// observed eigen-modes with `|lambda_hat| >= tau`, align each retained
/// coefficient with the sign of `lambda_hat / (1 - lambda_hat)`, and scale
/// so the estimated welfare equals `margin * target`. Nothing from the true
/// scenario enters the design.
pub fn design_intervention(
    obs: &NoisyObservation,
    opts: &DesignOptions,
) -> Result<InterventionReport> {
    if !(opts.tau > 0.0) {
        return Err(Error::InvalidInput("threshold tau must be positive".into()));
    }
    if !(opts.target > 0.0) || !(opts.margin >= 1.0) {
        return Err(Error::InvalidInput(
            "need target > 0 and margin >= 1".into(),
        ));
    }
    let n = obs.m_hat.n();
    let eigen = linalg::symmetric_eigen(&obs.m_hat)?;
    let selected: Vec<usize> = (0..n)
        .filter(|&k| eigen.values[k].abs() >= opts.tau)
        .collect();
    if selected.is_empty() {
        return Err(Error::NoRecoverableStructure(alloc::format!(
            "no observed eigenvalue clears tau = {}",
            opts.tau
        )));
    }
    let mut weights = Vec::with_capacity(selected.len());
    let mut mass = 0.0;
    for &k in &selected {
        let lambda = eigen.values[k];
        if (lambda - 1.0).abs() < 1e-9 {
            return Err(Error::Numeric(alloc::format!(
                "selected eigenvalue {lambda} within 1e-9 of 1"
            )));
        }
        let w = eigen.vector(k);
        let beta: f64 = w.iter().zip(&obs.q0_hat).map(|(a, b)| a * b).sum();
        let factor = lambda / (1.0 - lambda);
        mass += beta * beta * factor.abs();
        weights.push((k, w, beta, factor));
    }
    let q_scale: f64 = obs.q0_hat.iter().map(|q| q * q).sum();
    if mass <= 1e-12 * (1.0 + q_scale) {
        return Err(Error::NoRecoverableStructure(alloc::format!(
            "observed quantities project onto the retained eigenspace with \
             negligible welfare mass ({mass:.3e})"
        )));
    }
    let scale = opts.margin * opts.target / mass;
    let mut sigma = vec![0.0; n];
    let mut estimated = 0.0;
    for (_, w, beta, factor) in &weights {
        let alpha = scale * beta * factor.signum();
        estimated += alpha * beta * factor;
        for (s, wi) in sigma.iter_mut().zip(w) {
            *s += alpha * wi;
        }
    }
    let top = weights
        .iter()
        .max_by(|a, b| {
            eigen.values[a.0]
                .abs()
                .partial_cmp(&eigen.values[b.0].abs())
                .unwrap()
        })
        .expect("selection nonempty");
    Ok(InterventionReport {
        sigma,
        estimated_welfare: estimated,
        true_welfare: None,
        top_space_dim: selected.len(),
        top_vector: top.1.clone(),
        alignment: None,
    })
}

/// Fills in the simulation-only truth metrics of a design.
pub fn evaluate_design(
    scenario: &MarketScenario,
    report: &InterventionReport,
) -> Result<InterventionReport> {
    let true_welfare = welfare_effect(scenario, &report.sigma)?;
    let w1 = scenario.top_eigenvector();
    let alignment: f64 = w1
        .iter()
        .zip(&report.top_vector)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs();
    let mut out = report.clone();
    out.true_welfare = Some(true_welfare);
    out.alignment = Some(alignment);
    Ok(out)
}

/// One certification replicate.
#[derive(Debug, Clone)]
pub struct ReplicateRecord {
    pub replicate: u64,
    pub success: bool,
    pub true_welfare: Option<f64>,
    pub alignment: f64,
    /// Spectral norm of the drawn noise matrix.
    pub noise_norm: f64,
    /// `|E| / (gap - |E|)` capped at 1; an a-priori bound on `sin(theta)`.
    pub davis_kahan_bound: f64,
    pub design_error: Option<Error>,
}

/// Runs observe/design/evaluate for one replicate index.
pub fn certify_replicate(
    scenario: &MarketScenario,
    opts: &DesignOptions,
    replicate: u64,
) -> Result<ReplicateRecord> {
    let obs = observe_replicate(scenario, replicate);
    // Alignment and noise diagnostics come straight from the observation,
    // so they exist even when the design step fails.
    let hat_eigen = linalg::symmetric_eigen(&obs.m_hat)?;
    let w1_hat = hat_eigen.vector(hat_eigen.top_modulus_index());
    let w1 = scenario.top_eigenvector();
    let alignment = w1
        .iter()
        .zip(&w1_hat)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs();
    let noise = SquareMatrix::from_fn(scenario.n(), |i, j| {
        obs.m_hat.get(i, j) - scenario.matrix().get(i, j)
    });
    let noise_eigen = linalg::symmetric_eigen(&noise)?;
    let noise_norm = noise_eigen
        .values
        .iter()
        .fold(0.0f64, |a, l| a.max(l.abs()));
    let gap = scenario.top_modulus_gap();
    let davis_kahan_bound = if noise_norm < gap {
        (noise_norm / (gap - noise_norm)).min(1.0)
    } else {
        1.0
    };
    match design_intervention(&obs, opts) {
        Ok(report) => {
            let evaluated = evaluate_design(scenario, &report)?;
            let true_welfare = evaluated.true_welfare.expect("evaluated");
            Ok(ReplicateRecord {
                replicate,
                success: true_welfare >= opts.target,
                true_welfare: Some(true_welfare),
                alignment,
                noise_norm,
                davis_kahan_bound,
                design_error: None,
            })
        }
        Err(err @ (Error::NoRecoverableStructure(_) | Error::Numeric(_))) => Ok(ReplicateRecord {
            replicate,
            success: false,
            true_welfare: None,
            alignment,
            noise_norm,
            davis_kahan_bound,
            design_error: Some(err),
        }),
        Err(other) => Err(other),
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOutcome {
    pub replicates: Vec<ReplicateRecord>,
    pub success_rate: f64,
    pub mean_alignment: f64,
    /// Worst per-replicate Davis-Kahan bound.
    pub davis_kahan_bound: f64,
    /// `success_rate >= 1 - epsilon`.
    pub meets_epsilon: bool,
}

/// Monte Carlo certification of the design rule: success fraction at the
/// target, mean top-eigenvector alignment, and the worst Davis-Kahan bound.
pub fn certify(
    scenario: &MarketScenario,
    opts: &DesignOptions,
    replicates: u64,
    epsilon: f64,
) -> Result<CertifyOutcome> {
    if replicates < 1 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    let records: Result<Vec<ReplicateRecord>> = (0..replicates)
        .map(|r| certify_replicate(scenario, opts, r))
        .collect();
    summarize_certification(records?, epsilon)
}

/// Aggregates per-replicate records; shared by the sequential and parallel
/// drivers so both produce identical outcomes.
pub fn summarize_certification(
    records: Vec<ReplicateRecord>,
    epsilon: f64,
) -> Result<CertifyOutcome> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no replicates to summarize".into()));
    }
    let n = records.len() as f64;
    let success_rate = records.iter().filter(|r| r.success).count() as f64 / n;
    let mean_alignment = records.iter().map(|r| r.alignment).sum::<f64>() / n;
    let davis_kahan_bound = records
        .iter()
        .fold(0.0f64, |a, r| a.max(r.davis_kahan_bound));
    Ok(CertifyOutcome {
        success_rate,
        mean_alignment,
        davis_kahan_bound,
        meets_epsilon: success_rate >= 1.0 - epsilon,
        replicates: records,
    })
}

/// The three-sector block market: groups of `n/3` identical firms, cross
/// effects 0.15 / 0.7 / 0.6 between groups, unit spillovers inside a group,
/// and the `-1` own-price diagonal. `q0` is the (positive) top eigenvector
/// scaled to sup-norm 1 plus a 0.1 uniform component, so quantities are
/// order-one per firm and the dominant mode carries most of their mass.
pub fn block_example(n: usize) -> Result<MarketScenario> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::InvalidInput(alloc::format!(
            "block example needs n divisible by 3, got {n}"
        )));
    }
    let cross = [
        [1.0, 0.15, 0.7],
        [0.15, 1.0, 0.6],
        [0.7, 0.6, 1.0],
    ];
    let third = n / 3;
    let m = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            -1.0
        } else {
            cross[i / third][j / third]
        }
    });
    let eigen = linalg::symmetric_eigen(&m)?;
    let w1 = eigen.vector(eigen.top_modulus_index());
    let sup = w1.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    // Magnitude profile of the dominant mode: identical to the mode itself
    // at production sizes (where it is entrywise positive) and still a
    // valid positive quantity vector at degenerate tiny n.
    let q0: Vec<f64> = w1.iter().map(|v| v.abs() / sup + 0.1).collect();
    MarketScenario::new(m, q0, 1.0, 0)
}

/// Replaces the seed and noise scale of a scenario (used by the CLI to
/// apply flags on top of the built-in example).
pub fn with_noise(scenario: &MarketScenario, noise_sd: f64, seed: u64) -> Result<MarketScenario> {
    MarketScenario::new(
        scenario.m.clone(),
        scenario.q0.clone(),
        noise_sd,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    /// Small symmetric scenario with -1 diagonal and controlled cross terms.
    fn small_scenario(n: usize, seed: u64, noise_sd: f64) -> MarketScenario {
        let base = testkit::random_symmetric_with_radius(n, seed, 0.4);
        let m = SquareMatrix::from_fn(n, |i, j| if i == j { -1.0 } else { base.get(i, j) });
        let q0: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        MarketScenario::new(m, q0, noise_sd, seed).unwrap()
    }

    #[test]
    fn scenario_validation() {
        let m = SquareMatrix::from_rows(&[vec![-1.0, 0.2], vec![0.2, -0.5]]).unwrap();
        assert!(matches!(
            MarketScenario::new(m, vec![1.0, 1.0], 1.0, 0),
            Err(Error::InvalidInput(_))
        ));
        let asym = SquareMatrix::from_rows(&[vec![-1.0, 0.2], vec![0.3, -1.0]]).unwrap();
        assert!(matches!(
            MarketScenario::new(asym, vec![1.0, 1.0], 1.0, 0),
            Err(Error::InvalidInput(_))
        ));
        let ok = SquareMatrix::from_rows(&[vec![-1.0, 0.2], vec![0.2, -1.0]]).unwrap();
        assert!(MarketScenario::new(ok.clone(), vec![1.0, 1.0], 1.0, 0).is_ok());
        assert!(matches!(
            MarketScenario::new(ok, vec![1.0, -1.0], 1.0, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn price_response_without_cross_effects_halves_costs() {
        let m = SquareMatrix::from_fn(3, |i, j| if i == j { -1.0 } else { 0.0 });
        let scenario = MarketScenario::new(m, vec![1.0; 3], 0.0, 0).unwrap();
        let x = price_response(&scenario, &[2.0, 4.0, -6.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, -3.0]);
    }

    #[test]
    fn welfare_of_zero_intervention_is_zero() {
        let scenario = small_scenario(6, 1, 1.0);
        assert_eq!(welfare_effect(&scenario, &[0.0; 6]).unwrap(), 0.0);
    }

    #[test]
    fn welfare_no_cross_effects_closed_form() {
        let m = SquareMatrix::from_fn(3, |i, j| if i == j { -1.0 } else { 0.0 });
        let scenario = MarketScenario::new(m, vec![1.0, 2.0, 3.0], 0.0, 0).unwrap();
        let sigma = [1.0, 1.0, 1.0];
        // (I - M)^-1 M = -I/2
        let expect = -0.5 * (1.0 + 2.0 + 3.0);
        assert!((welfare_effect(&scenario, &sigma).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn direct_and_spectral_welfare_agree() {
        for seed in 0..6u64 {
            let scenario = small_scenario(8, seed, 1.0);
            let sigma: Vec<f64> = (0..8).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
            let direct = welfare_effect(&scenario, &sigma).unwrap();
            let spectral = spectral_welfare(&scenario, &sigma).unwrap();
            assert!((direct - spectral.value).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn welfare_is_linear_in_sigma() {
        let scenario = small_scenario(7, 3, 1.0);
        let s1: Vec<f64> = (0..7).map(|i| (i as f64 * 0.77).sin()).collect();
        let s2: Vec<f64> = (0..7).map(|i| (i as f64 * 1.3).cos()).collect();
        let combo: Vec<f64> = s1
            .iter()
            .zip(&s2)
            .map(|(a, b)| 2.5 * a - 1.25 * b)
            .collect();
        let v1 = welfare_effect(&scenario, &s1).unwrap();
        let v2 = welfare_effect(&scenario, &s2).unwrap();
        let vc = welfare_effect(&scenario, &combo).unwrap();
        assert!((vc - (2.5 * v1 - 1.25 * v2)).abs() < 1e-10);
    }

    #[test]
    fn spectral_terms_vanish_off_support() {
        let scenario = block_example(30).unwrap();
        let w1 = scenario.top_eigenvector();
        let out = spectral_welfare(&scenario, &w1).unwrap();
        // sigma = w1: every term except the top-modulus one has alpha ~ 0.
        let top = scenario.eigen().top_modulus_index();
        for (k, term) in out.terms.iter().enumerate() {
            if k != top {
                assert!(term.alpha.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn observation_is_deterministic_and_symmetric() {
        let scenario = small_scenario(10, 9, 1.0);
        let a = observe_replicate(&scenario, 4);
        let b = observe_replicate(&scenario, 4);
        assert_eq!(a.m_hat, b.m_hat);
        assert_eq!(a.q0_hat, b.q0_hat);
        assert!(a.m_hat.is_symmetric(0.0));
        let c = observe_replicate(&scenario, 5);
        assert_ne!(a.m_hat, c.m_hat);
    }

    #[test]
    fn noiseless_observation_is_exact() {
        let scenario = small_scenario(5, 2, 0.0);
        let obs = observe(&scenario);
        assert_eq!(&obs.m_hat, scenario.matrix());
        assert_eq!(obs.q0_hat, scenario.q0());
    }

    #[test]
    fn recoverable_structure_thresholds() {
        let scenario = block_example(30).unwrap();
        // mu above every eigenvalue: empty span.
        let none = recoverable_structure(&scenario, 1e6, 0.5);
        assert!(!none.holds);
        assert_eq!(none.space_dim, 0);
        assert_eq!(none.projection_norm, 0.0);
        // mu below the top eigenvalue: q0 projects heavily there.
        let top = recoverable_structure(&scenario, 15.0, 1.0);
        assert!(top.holds);
        assert!(top.space_dim >= 1);
        assert!(top.projection_norm > 1.0);
    }

    /// A market whose dominant mode alternates signs, so the uniform
    /// quantity vector is exactly orthogonal to it: M = 10 v v^T with the
    /// diagonal overwritten to -1, v = (+1, -1, ...)/sqrt(n), n even.
    fn alternating_market(n: usize) -> MarketScenario {
        let v: Vec<f64> = (0..n)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / (n as f64).sqrt())
            .collect();
        let m = SquareMatrix::from_fn(n, |i, j| {
            if i == j {
                -1.0
            } else {
                10.0 * v[i] * v[j]
            }
        });
        MarketScenario::new(m, vec![1.0; n], 0.0, 0).unwrap()
    }

    #[test]
    fn q0_orthogonal_to_top_space_fails_structure_test() {
        let scenario = alternating_market(30);
        // Top eigenvalue is 10 - 1 - 10/30 ~ 8.67; everything else is -4/3.
        let rec = recoverable_structure(&scenario, 5.0, 1e-6);
        assert_eq!(rec.space_dim, 1);
        assert!(!rec.holds, "projection {}", rec.projection_norm);
        assert!(rec.projection_norm < 1e-10);
    }

    #[test]
    fn noiseless_design_hits_margin_exactly() {
        let scenario = block_example(30).unwrap();
        let noiseless = with_noise(&scenario, 0.0, 0).unwrap();
        let obs = observe(&noiseless);
        let opts = DesignOptions::new(1.0, 1.0);
        let report = design_intervention(&obs, &opts).unwrap();
        assert!((report.estimated_welfare - 2.0).abs() < 1e-9);
        let evaluated = evaluate_design(&noiseless, &report).unwrap();
        let true_w = evaluated.true_welfare.unwrap();
        assert!((true_w - 2.0).abs() < 1e-8);
        assert!((evaluated.alignment.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn design_refuses_orthogonal_quantities() {
        // Noiseless adversarial case: q0 carries no mass on the only
        // retained eigenvector, so the welfare mass vanishes exactly.
        let scenario = alternating_market(30);
        let obs = observe(&scenario);
        let opts = DesignOptions::new(5.0, 1.0);
        assert!(matches!(
            design_intervention(&obs, &opts),
            Err(Error::NoRecoverableStructure(_))
        ));
    }

    #[test]
    fn design_refuses_empty_selection() {
        let scenario = small_scenario(6, 4, 0.0);
        let obs = observe(&scenario);
        let opts = DesignOptions::new(1e9, 1.0);
        assert!(matches!(
            design_intervention(&obs, &opts),
            Err(Error::NoRecoverableStructure(_))
        ));
    }

    #[test]
    fn certification_on_noiseless_scenario_is_perfect() {
        let scenario = with_noise(&block_example(30).unwrap(), 0.0, 3).unwrap();
        let outcome = certify(&scenario, &DesignOptions::new(1.0, 1.0), 5, 0.05).unwrap();
        assert_eq!(outcome.success_rate, 1.0);
        assert!((outcome.mean_alignment - 1.0).abs() < 1e-10);
        assert!(outcome.meets_epsilon);
    }

    #[test]
    fn certification_block_example_small() {
        // Scaled-down version of the production check: n = 60, tau scaled
        // as 2.5 sqrt(n), 20 replicates.
        let scenario = block_example(60).unwrap();
        let tau = 2.5 * (60.0f64).sqrt();
        let outcome = certify(&scenario, &DesignOptions::new(tau, 1.0), 20, 0.05).unwrap();
        assert!(outcome.success_rate >= 0.95, "rate {}", outcome.success_rate);
        for rec in &outcome.replicates {
            assert!(rec.alignment >= 0.9, "alignment {}", rec.alignment);
            // Davis-Kahan consistency: sin(theta) below the bound whenever
            // the bound is informative.
            if rec.noise_norm < scenario.top_modulus_gap() {
                let sin_theta = (1.0 - rec.alignment * rec.alignment).sqrt();
                assert!(sin_theta <= rec.davis_kahan_bound + 1e-12);
            }
        }
    }

    #[test]
    fn block_example_structure() {
        // n = 3 collapses to the 3x3 cross matrix with unit off-diagonals
        // replaced by the printed cross effects.
        let tiny = block_example(3).unwrap();
        assert_eq!(tiny.matrix().get(0, 1), 0.15);
        assert_eq!(tiny.matrix().get(0, 2), 0.7);
        assert_eq!(tiny.matrix().get(1, 2), 0.6);
        for i in 0..3 {
            assert_eq!(tiny.matrix().get(i, i), -1.0);
        }
        assert!(block_example(10).is_err());
        // Within-block off-diagonal spillovers are 1.
        let m = block_example(30).unwrap();
        assert_eq!(m.matrix().get(0, 1), 1.0);
        assert_eq!(m.matrix().get(0, 10), 0.15);
    }

    #[test]
    fn block_example_spectrum_scales_with_n() {
        let scenario = block_example(30).unwrap();
        let eigen = scenario.eigen();
        let top = eigen.values.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        // 10 * lambda_max(|C|) - 2 at n = 30.
        assert!((top - 17.99).abs() < 0.2, "top {top}");
        assert!(scenario.top_eigenvector().iter().all(|&v| v > 0.0));
    }
}
