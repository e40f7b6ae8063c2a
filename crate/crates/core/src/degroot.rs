//! Averaging opinion dynamics on a row-stochastic matrix.
//!
//! Each period every agent replaces its opinion with a weighted average of
//! the opinions it listens to: `x(t+1) = M x(t)`. On a strongly connected,
//! aperiodic digraph the process reaches consensus `a = c^T x(0)` where `c`
//! is the left Perron vector of `M` at eigenvalue 1 — the agents' influence
//! weights. The module also covers prominence (groups that every outsider
//! ends up weighting), the max-influence diagnostic for growing matrix
//! families, and seeded crowd-wisdom experiments.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::centrality::{self, CentralityResult};
use crate::error::{Error, Result};
use crate::matrix::{self, SquareMatrix};

/// Row-stochastic wrapper: nonnegative entries, each row summing to 1
/// within [`ROW_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    base: SquareMatrix,
}

pub const ROW_SUM_TOL: f64 = 1e-12;

impl StochasticMatrix {
    pub fn new(base: SquareMatrix) -> Result<Self> {
        if !base.is_nonnegative() {
            return Err(Error::InvalidInput(
                "stochastic matrix requires nonnegative entries".into(),
            ));
        }
        for i in 0..base.n() {
            let s: f64 = base.row(i).iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidInput(alloc::format!(
                    "row {i} sums to {s}, expected 1"
                )));
            }
        }
        Ok(StochasticMatrix { base })
    }

    /// Normalizes each row of a nonnegative matrix with positive row sums.
    pub fn from_weights(weights: &SquareMatrix) -> Result<Self> {
        if !weights.is_nonnegative() {
            return Err(Error::InvalidInput(
                "listening weights must be nonnegative".into(),
            ));
        }
        let n = weights.n();
        let mut base = weights.clone();
        for i in 0..n {
            let s: f64 = base.row(i).iter().sum();
            if s <= 0.0 {
                return Err(Error::InvalidInput(alloc::format!(
                    "row {i} has zero total weight"
                )));
            }
            for j in 0..n {
                base.set(i, j, base.get(i, j) / s);
            }
        }
        Ok(StochasticMatrix { base })
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }
}

/// An `n x d` block of opinions: row `i` is agent `i`'s point in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinions {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Opinions {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n * d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::InvalidInput(alloc::format!(
                    "opinion row {i} has dimension {}, expected {d}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Opinions { n, d, data })
    }

    /// Scalar opinions (`d = 1`).
    pub fn scalar(values: &[f64]) -> Self {
        Opinions {
            n: values.len(),
            d: 1,
            data: values.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.d + k]
    }

    /// Cross-sectional mean per dimension.
    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for i in 0..self.n {
            for k in 0..self.d {
                mean[k] += self.get(i, k);
            }
        }
        for v in &mut mean {
            *v /= self.n as f64;
        }
        mean
    }

    /// Largest deviation of any agent from the cross-sectional mean.
    pub fn spread(&self) -> f64 {
        let mean = self.mean();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in 0..self.d {
                worst = worst.max((self.get(i, k) - mean[k]).abs());
            }
        }
        worst
    }

    fn step(&self, m: &SquareMatrix) -> Opinions {
        let mut next = vec![0.0; self.n * self.d];
        for i in 0..self.n {
            let row = m.row(i);
            for (j, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for k in 0..self.d {
                    next[i * self.d + k] += w * self.get(j, k);
                }
            }
        }
        Opinions {
            n: self.n,
            d: self.d,
            data: next,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub t_max: usize,
    pub tol: f64,
    /// Keep every `stride`-th state (plus the first and last).
    pub stride: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            t_max: 100_000,
            tol: 1e-9,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OpinionTrajectory {
    /// `(t, state)` samples, first and last always present.
    pub states: Vec<(usize, Opinions)>,
    pub converged: bool,
    /// Cross-sectional mean at the stopping time, when converged.
    pub consensus: Option<Vec<f64>>,
    /// Stopping time.
    pub steps: usize,
}

/// Iterates `x(t+1) = M x(t)` until the opinion spread falls under `tol` or
/// `t_max` is reached. Non-convergence (periodic chains oscillate forever)
/// is a reported outcome, not an error.
pub fn simulate(m: &StochasticMatrix, x0: &Opinions, opts: &SimulateOptions) -> Result<OpinionTrajectory> {
    if x0.n() != m.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "{} opinion rows for {} agents",
            x0.n(),
            m.n()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let stride = opts.stride.max(1);
    let mut states = Vec::new();
    let mut x = x0.clone();
    let mut t = 0usize;
    states.push((0, x.clone()));
    let mut converged = x.spread() <= opts.tol;
    while !converged && t < opts.t_max {
        x = x.step(m.matrix());
        t += 1;
        if t % stride == 0 && t != 0 {
            states.push((t, x.clone()));
        }
        converged = x.spread() <= opts.tol;
    }
    if states.last().map(|(st, _)| *st) != Some(t) {
        states.push((t, x.clone()));
    }
    let consensus = converged.then(|| x.mean());
    Ok(OpinionTrajectory {
        states,
        converged,
        consensus,
        steps: t,
    })
}

/// Influence weights: the left Perron vector of `M` at eigenvalue 1,
/// sum-normalized.
pub fn influence_weights(m: &StochasticMatrix) -> Result<CentralityResult> {
    centrality::eigenvector_centrality(m.matrix())
}

/// Predicted consensus `c^T x(0)` (one value per opinion dimension),
/// independent of simulation. Requires a strongly connected, aperiodic
/// digraph; otherwise the limit need not exist or be a consensus.
pub fn consensus_value(m: &StochasticMatrix, x0: &Opinions) -> Result<Vec<f64>> {
    if x0.n() != m.n() {
        return Err(Error::InvalidInput(alloc::format!(
            "{} opinion rows for {} agents",
            x0.n(),
            m.n()
        )));
    }
    if !matrix::is_irreducible(m.matrix())? {
        return Err(Error::Precondition(String::from(
            "consensus prediction requires a strongly connected digraph",
        )));
    }
    if !matrix::is_aperiodic(m.matrix())? {
        return Err(Error::Precondition(String::from(
            "consensus prediction requires an aperiodic digraph",
        )));
    }
    let weights = influence_weights(m)?;
    let mut out = vec![0.0; x0.dim()];
    for i in 0..x0.n() {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot += weights.scores[i] * x0.get(i, k);
        }
    }
    Ok(out)
}

/// Smallest `t <= t_max` at which every outsider places total `t`-step
/// weight at least `epsilon` on the set `p`; `None` if no such `t`.
///
/// Concretely: `sum_{i in p} (M^t)_{ji} >= epsilon` for every `j` outside
/// `p`, i.e. the group shows up with weight `epsilon` in every outsider's
/// `t`-step average.
pub fn prominence_check(
    m: &StochasticMatrix,
    p: &[usize],
    epsilon: f64,
    t_max: usize,
) -> Result<Option<usize>> {
    let n = m.n();
    if p.is_empty() || p.len() >= n {
        return Err(Error::InvalidInput(
            "prominent set must be a nonempty proper subset".into(),
        ));
    }
    if p.iter().any(|&i| i >= n) {
        return Err(Error::InvalidInput("node index out of range".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput(
            "epsilon must lie in (0, 1]".into(),
        ));
    }
    if t_max < 1 {
        return Err(Error::InvalidInput("t_max must be at least 1".into()));
    }
    let mut member = vec![false; n];
    for &i in p {
        member[i] = true;
    }
    // y_t = M^t 1_p; entry j is the weight outsider j puts on the group.
    let mut y: Vec<f64> = member.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    for t in 1..=t_max {
        y = m.matrix().mul_vec(&y);
        let ok = (0..n)
            .filter(|&j| !member[j])
            .all(|j| y[j] >= epsilon);
        if ok {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// A family of growing listening matrices with its provenance.
#[derive(Debug, Clone)]
pub struct MatrixSequence {
    pub matrices: Vec<StochasticMatrix>,
    pub description: String,
}

/// Max influence weight per family member — the finite-sample diagnostic
/// for the crowd-wisdom property (wise families drive it to zero).
pub fn wisdom_trend(seq: &MatrixSequence) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(seq.matrices.len());
    for m in &seq.matrices {
        let w = influence_weights(m)?;
        let max = w.scores.iter().cloned().fold(f64::MIN, f64::max);
        out.push((m.n(), max));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrowdWisdomOutcome {
    /// Sample standard deviation of the consensus across replicates.
    pub consensus_sd: f64,
    /// Exact value `noise_sd * ||c||_2`.
    pub theoretical_sd: f64,
    pub replicates: usize,
}

/// Consensus of one replicate: initial opinions drawn i.i.d.
/// `Normal(mu, noise_sd^2)` from the stream derived from `(seed, idx)`.
pub fn crowd_wisdom_replicate(
    weights: &[f64],
    mu: f64,
    noise_sd: f64,
    seed: u64,
    idx: u64,
) -> f64 {
    let mut rng = replicate_rng(seed, idx);
    let mut a = 0.0;
    for &c in weights {
        let draw: f64 = rng.sample(StandardNormal);
        a += c * (mu + noise_sd * draw);
    }
    a
}

/// Monte Carlo check of the wisdom-of-crowds variance formula: the sampled
/// consensus spread against the exact `noise_sd * ||c||_2`.
pub fn crowd_wisdom_experiment(
    m: &StochasticMatrix,
    mu: f64,
    noise_sd: f64,
    replicates: usize,
    seed: u64,
) -> Result<CrowdWisdomOutcome> {
    if replicates < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 replicates for a sample standard deviation".into(),
        ));
    }
    if !(noise_sd > 0.0) {
        return Err(Error::InvalidInput("noise_sd must be positive".into()));
    }
    if !matrix::is_aperiodic(m.matrix())? {
        return Err(Error::Precondition(
            "crowd-wisdom experiment requires a primitive matrix".into(),
        ));
    }
    let weights = influence_weights(m)?;
    let samples: Vec<f64> = (0..replicates)
        .map(|r| crowd_wisdom_replicate(&weights.scores, mu, noise_sd, seed, r as u64))
        .collect();
    Ok(summarize_crowd_wisdom(&weights.scores, noise_sd, &samples))
}

/// Folds per-replicate consensus values into the experiment outcome; the
/// parallel driver in the CLI crate reuses this to stay bit-identical with
/// the sequential path.
pub fn summarize_crowd_wisdom(
    weights: &[f64],
    noise_sd: f64,
    samples: &[f64],
) -> CrowdWisdomOutcome {
    let n = samples.len();
    let mean: f64 = samples.iter().sum::<f64>() / n as f64;
    let var: f64 = samples.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1) as f64;
    let norm: f64 = weights.iter().map(|c| c * c).sum::<f64>().sqrt();
    CrowdWisdomOutcome {
        consensus_sd: var.sqrt(),
        theoretical_sd: noise_sd * norm,
        replicates: n,
    }
}

fn replicate_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

/// All-entries-`1/n` listening matrix.
pub fn uniform_matrix(n: usize) -> Result<StochasticMatrix> {
    StochasticMatrix::from_weights(&SquareMatrix::from_fn(n, |_, _| 1.0))
}

/// One celebrity everyone half-listens to: row 0 splits evenly between
/// itself and the crowd; every other row is half self, half celebrity.
/// Influence of node 0 stays near 1/2 for every `n`, so the family is a
/// textbook obstruction to crowd wisdom.
pub fn celebrity_matrix(n: usize) -> Result<StochasticMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput("celebrity family needs n >= 2".into()));
    }
    let m = SquareMatrix::from_fn(n, |i, j| {
        if i == 0 {
            if j == 0 {
                0.5
            } else {
                0.5 / (n - 1) as f64
            }
        } else if j == 0 {
            0.5
        } else if i == j {
            0.5
        } else {
            0.0
        }
    });
    StochasticMatrix::new(m)
}

/// Row-normalized symmetric Erdos-Renyi graph with self-loops; resamples
/// deterministically until strongly connected.
pub fn erdos_renyi_stochastic(n: usize, p: f64, seed: u64) -> Result<StochasticMatrix> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(
            "need n >= 2 and edge probability in [0, 1]".into(),
        ));
    }
    for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37)));
        let mut w = SquareMatrix::zeros(n);
        for i in 0..n {
            w.set(i, i, 1.0);
            for j in (i + 1)..n {
                if rng.gen_range(0.0..1.0) < p {
                    w.set(i, j, 1.0);
                    w.set(j, i, 1.0);
                }
            }
        }
        if matrix::is_irreducible(&w)? {
            return StochasticMatrix::from_weights(&w);
        }
    }
    Err(Error::Numeric(alloc::format!(
        "no connected Erdos-Renyi draw at n = {n}, p = {p} after 64 attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    fn two_state(rows: [[f64; 2]; 2]) -> StochasticMatrix {
        StochasticMatrix::new(
            SquareMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let bad = SquareMatrix::from_rows(&[vec![0.7, 0.2], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            StochasticMatrix::new(bad),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn uniform_two_node_reaches_consensus_in_one_step() {
        let m = two_state([[0.5, 0.5], [0.5, 0.5]]);
        let run = simulate(&m, &Opinions::scalar(&[0.0, 1.0]), &SimulateOptions::default())
            .unwrap();
        assert!(run.converged);
        assert_eq!(run.steps, 1);
        assert!((run.consensus.unwrap()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_cycle_oscillates_forever() {
        let m = two_state([[0.0, 1.0], [1.0, 0.0]]);
        let opts = SimulateOptions {
            t_max: 500,
            ..SimulateOptions::default()
        };
        let run = simulate(&m, &Opinions::scalar(&[0.0, 1.0]), &opts).unwrap();
        assert!(!run.converged);
        assert!(run.consensus.is_none());
    }

    #[test]
    fn simulated_consensus_matches_prediction() {
        let m = two_state([[2.0 / 3.0, 1.0 / 3.0], [0.25, 0.75]]);
        let x0 = Opinions::scalar(&[0.0, 1.0]);
        let run = simulate(&m, &x0, &SimulateOptions::default()).unwrap();
        assert!(run.converged);
        assert!((run.consensus.unwrap()[0] - 4.0 / 7.0).abs() < 1e-8);
        let predicted = consensus_value(&m, &x0).unwrap();
        assert!((predicted[0] - 4.0 / 7.0).abs() < 1e-12);
        let scaled = consensus_value(&m, &Opinions::scalar(&[7.0, 0.0])).unwrap();
        assert!((scaled[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn consensus_value_requires_primitivity() {
        let periodic = two_state([[0.0, 1.0], [1.0, 0.0]]);
        let err = consensus_value(&periodic, &Opinions::scalar(&[0.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let reducible = StochasticMatrix::new(
            SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            consensus_value(&reducible, &Opinions::scalar(&[0.0, 1.0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn prediction_matches_simulation_on_random_primitive_matrices() {
        for seed in 0..20u64 {
            let n = 3 + (seed as usize) % 18;
            let m = StochasticMatrix::new(testkit::random_primitive_stochastic(n, seed, 0.3))
                .unwrap();
            let x0 = Opinions::scalar(
                &(0..n).map(|i| (i as f64 * 1.37).sin() * 3.0).collect::<Vec<_>>(),
            );
            let predicted = consensus_value(&m, &x0).unwrap()[0];
            let opts = SimulateOptions {
                tol: 1e-12,
                ..SimulateOptions::default()
            };
            let run = simulate(&m, &x0, &opts).unwrap();
            assert!(run.converged);
            assert!((run.consensus.unwrap()[0] - predicted).abs() <= 1e-8);
        }
    }

    #[test]
    fn influence_weights_examples() {
        let uniform = uniform_matrix(5).unwrap();
        for w in influence_weights(&uniform).unwrap().scores {
            assert!((w - 0.2).abs() < 1e-12);
        }
        let m = two_state([[2.0 / 3.0, 1.0 / 3.0], [0.25, 0.75]]);
        let w = influence_weights(&m).unwrap().scores;
        assert!((w[0] - 3.0 / 7.0).abs() < 1e-12);
        assert!((w[1] - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn celebrity_holds_half_the_influence() {
        for n in [4usize, 10, 50] {
            let m = celebrity_matrix(n).unwrap();
            let w = influence_weights(&m).unwrap().scores;
            assert!((w[0] - 0.5).abs() < 1e-10);
            for &vi in &w[1..] {
                assert!((vi - 0.5 / (n - 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn contraction_of_opinion_spread() {
        let m = StochasticMatrix::new(testkit::random_primitive_stochastic(8, 11, 0.2)).unwrap();
        let mut x = Opinions::scalar(&[5.0, -1.0, 2.0, 0.0, 3.3, -2.2, 0.7, 1.9]);
        let mut spread = x.spread();
        for _ in 0..50 {
            x = x.step(m.matrix());
            let next = x.spread();
            assert!(next <= spread + 1e-12);
            spread = next;
        }
        assert!(spread < 1e-3);
    }

    #[test]
    fn affine_equivariance_of_the_map() {
        let m = StochasticMatrix::new(testkit::random_primitive_stochastic(6, 3, 0.1)).unwrap();
        let base = [0.4, -1.0, 2.0, 0.1, 0.9, -0.3];
        let shifted: Vec<f64> = base.iter().map(|v| 2.0 * v + 5.0).collect();
        let mut xa = Opinions::scalar(&base);
        let mut xb = Opinions::scalar(&shifted);
        for _ in 0..30 {
            xa = xa.step(m.matrix());
            xb = xb.step(m.matrix());
        }
        for i in 0..6 {
            assert!((xb.get(i, 0) - (2.0 * xa.get(i, 0) + 5.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn vector_opinions_converge_per_dimension() {
        let m = two_state([[2.0 / 3.0, 1.0 / 3.0], [0.25, 0.75]]);
        let x0 = Opinions::new(&[vec![0.0, 10.0], vec![1.0, -10.0]]).unwrap();
        let predicted = consensus_value(&m, &x0).unwrap();
        let run = simulate(&m, &x0, &SimulateOptions::default()).unwrap();
        let got = run.consensus.unwrap();
        assert!((got[0] - predicted[0]).abs() < 1e-8);
        assert!((got[1] - predicted[1]).abs() < 1e-8);
    }

    #[test]
    fn prominence_of_single_listened_node() {
        // 2-cycle: the outsider places weight 1 on the set {0} after 1 step.
        let m = two_state([[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(prominence_check(&m, &[0], 0.5, 10).unwrap(), Some(1));
    }

    #[test]
    fn prominence_absent_in_uniform_matrix() {
        let m = uniform_matrix(8).unwrap();
        // Column mass over a singleton stays 1/n = 0.125 < 0.25 forever.
        assert_eq!(prominence_check(&m, &[0], 0.25, 64).unwrap(), None);
    }

    #[test]
    fn prominence_of_near_full_set() {
        let m = StochasticMatrix::new(
            SquareMatrix::from_rows(&[
                vec![0.5, 0.5, 0.0],
                vec![0.25, 0.5, 0.25],
                vec![0.0, 0.5, 0.5],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(prominence_check(&m, &[0, 1], 1e-6, 5).unwrap(), Some(1));
    }

    #[test]
    fn celebrity_is_prominent_at_every_size() {
        for n in [5usize, 20, 60] {
            let m = celebrity_matrix(n).unwrap();
            assert_eq!(prominence_check(&m, &[0], 0.4, 4).unwrap(), Some(1));
        }
    }

    #[test]
    fn wisdom_trend_uniform_family_decays() {
        let seq = MatrixSequence {
            matrices: (2..=32)
                .step_by(10)
                .map(|n| uniform_matrix(n).unwrap())
                .collect(),
            description: String::from("uniform"),
        };
        let trend = wisdom_trend(&seq).unwrap();
        for ((n, max), (n2, max2)) in trend.iter().zip(trend.iter().skip(1)) {
            assert!(n2 > n);
            assert!(max2 < max);
            assert!((max - 1.0 / *n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn wisdom_trend_celebrity_family_is_bounded_below() {
        let seq = MatrixSequence {
            matrices: (10..=80)
                .step_by(10)
                .map(|n| celebrity_matrix(n).unwrap())
                .collect(),
            description: String::from("celebrity"),
        };
        for (_, max) in wisdom_trend(&seq).unwrap() {
            assert!(max >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn wisdom_trend_erdos_renyi_decays_on_average() {
        let sizes = [20usize, 40, 80];
        let mut means = Vec::new();
        for &n in &sizes {
            let p = 3.0 * (n as f64).ln() / n as f64;
            let mut acc = 0.0;
            for seed in 0..10u64 {
                let m = erdos_renyi_stochastic(n, p, 100 + seed).unwrap();
                let w = influence_weights(&m).unwrap().scores;
                acc += w.iter().cloned().fold(f64::MIN, f64::max);
            }
            means.push(acc / 10.0);
        }
        assert!(means[1] < means[0]);
        assert!(means[2] < means[1]);
    }

    #[test]
    fn crowd_wisdom_uniform_matches_root_n_law() {
        let m = uniform_matrix(100).unwrap();
        let out = crowd_wisdom_experiment(&m, 3.0, 2.0, 4000, 9).unwrap();
        assert!((out.theoretical_sd - 2.0 / 10.0).abs() < 1e-12);
        // 3 standard errors of a sample sd at R replicates.
        let se = out.theoretical_sd / (2.0 * (out.replicates as f64 - 1.0)).sqrt();
        assert!((out.consensus_sd - out.theoretical_sd).abs() <= 3.0 * se);
    }

    #[test]
    fn crowd_wisdom_celebrity_variance_stays_large() {
        let m = celebrity_matrix(50).unwrap();
        let out = crowd_wisdom_experiment(&m, 0.0, 1.0, 2000, 4).unwrap();
        assert!(out.theoretical_sd >= 0.4);
        let se = out.theoretical_sd / (2.0 * (out.replicates as f64 - 1.0)).sqrt();
        assert!((out.consensus_sd - out.theoretical_sd).abs() <= 3.0 * se);
    }

    #[test]
    fn replicates_are_deterministic_in_index() {
        let w = [0.3, 0.3, 0.4];
        let a = crowd_wisdom_replicate(&w, 1.0, 0.5, 42, 7);
        let b = crowd_wisdom_replicate(&w, 1.0, 0.5, 42, 7);
        assert_eq!(a.to_bits(), b.to_bits());
        let c = crowd_wisdom_replicate(&w, 1.0, 0.5, 42, 8);
        assert_ne!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn power_limit_is_rank_one_in_influence() {
        // M^64 ~ 1 c^T for primitive chains with a healthy spectral gap.
        for seed in 0..5u64 {
            let n = 6 + 2 * seed as usize;
            let m = StochasticMatrix::new(testkit::random_primitive_stochastic(n, seed, 0.3))
                .unwrap();
            let c = influence_weights(&m).unwrap().scores;
            let mut p = m.matrix().clone();
            for _ in 0..6 {
                p = p.matmul(&p).unwrap(); // M^64
            }
            for i in 0..n {
                for j in 0..n {
                    assert!((p.get(i, j) - c[j]).abs() <= 1e-6);
                }
            }
        }
    }
}
