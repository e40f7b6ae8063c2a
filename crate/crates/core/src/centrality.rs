//! Node-score measures: degree, eigenvector centrality, and Katz-Bonacich
//! centrality, plus the limit relation between the last two.
//!
//! Eigenvector centrality solves `lambda c_i = sum_j c_j M_ji` (the left
//! Perron vector, sum-normalized). Katz-Bonacich centrality adds an
//! exogenous term: `k^T = delta k^T M + z^T`, a decayed sum over incoming
//! walks, weighted by `z` where they end. As `delta * rho(M) -> 1` the
//! rescaled vector `(1 - delta) k(delta)` lines up with the eigenvector
//! scores, which is what [`kb_eigenvector_limit`] measures.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{self, SquareMatrix};
use crate::spectral::{self, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityKind {
    Degree,
    Eigenvector,
    KatzBonacich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Scores sum to one.
    SumOne,
    /// Scores reported as computed.
    Raw,
}

/// Parameters attached to a Katz-Bonacich result.
#[derive(Debug, Clone, PartialEq)]
pub struct KatzParams {
    pub delta: f64,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityResult {
    pub scores: Vec<f64>,
    pub kind: CentralityKind,
    pub normalization: Normalization,
    pub params: Option<KatzParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Column sums: weight received.
    In,
    /// Row sums: weight emitted.
    Out,
    /// Degree in the symmetrized 0/1 edge pattern.
    Undirected,
}

pub fn degree_centrality(m: &SquareMatrix, direction: Direction) -> Result<CentralityResult> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidInput(
            "degree centrality requires a nonnegative matrix".into(),
        ));
    }
    let n = m.n();
    let mut scores = alloc::vec![0.0; n];
    match direction {
        Direction::Out => {
            for i in 0..n {
                scores[i] = m.row(i).iter().sum();
            }
        }
        Direction::In => {
            for i in 0..n {
                for j in 0..n {
                    scores[j] += m.get(i, j);
                }
            }
        }
        Direction::Undirected => {
            for i in 0..n {
                for j in 0..n {
                    if m.has_edge(i, j) || m.has_edge(j, i) {
                        scores[i] += 1.0;
                    }
                }
            }
        }
    }
    Ok(CentralityResult {
        scores,
        kind: CentralityKind::Degree,
        normalization: Normalization::Raw,
        params: None,
    })
}

/// Left-eigenvector centrality of a nonnegative irreducible matrix.
///
/// Reducible inputs are an error rather than a per-component answer:
/// relative scores are only pinned down within a strongly connected
/// component, so a silent global vector would be meaningless.
pub fn eigenvector_centrality(m: &SquareMatrix) -> Result<CentralityResult> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidInput(
            "eigenvector centrality requires a nonnegative matrix".into(),
        ));
    }
    if !matrix::is_irreducible(m)? {
        return Err(Error::Precondition(String::from(
            "matrix is reducible: eigenvector centrality is determined only within \
             a strongly connected component; analyze components separately",
        )));
    }
    let pair = spectral::perron_pair(m)?;
    Ok(CentralityResult {
        scores: pair.left,
        kind: CentralityKind::Eigenvector,
        normalization: Normalization::SumOne,
        params: None,
    })
}

/// `(delta, z)` Katz-Bonacich centrality in the left-hand convention
/// `k^T = delta k^T M + z^T`. Use `side = Right` for the transposed network
/// (the game module's equilibrium lives there).
pub fn katz_bonacich(
    m: &SquareMatrix,
    delta: f64,
    z: &[f64],
    side: Side,
) -> Result<CentralityResult> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidInput(
            "Katz-Bonacich centrality requires a nonnegative matrix".into(),
        ));
    }
    let scores = spectral::resolvent_solve(m, z, delta, side)?;
    Ok(CentralityResult {
        scores,
        kind: CentralityKind::KatzBonacich,
        normalization: Normalization::Raw,
        params: Some(KatzParams {
            delta,
            z: z.to_vec(),
        }),
    })
}

/// One rung of the decay ladder climbed by [`kb_eigenvector_limit`].
#[derive(Debug, Clone)]
pub struct LimitPoint {
    pub delta: f64,
    /// Sum-normalized `(1 - delta) k(delta)`.
    pub rescaled: Vec<f64>,
    /// Cosine similarity with eigenvector centrality.
    pub cosine_to_eigenvector: f64,
}

/// Tracks how the rescaled Katz-Bonacich vector approaches eigenvector
/// centrality as `delta * rho` approaches 1 from below.
pub fn kb_eigenvector_limit(
    m: &SquareMatrix,
    z: &[f64],
    deltas: &[f64],
) -> Result<Vec<LimitPoint>> {
    if z.iter().any(|&v| v < 0.0) || z.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidInput(
            "z must be nonnegative and nonzero for the limit comparison".into(),
        ));
    }
    let reference = eigenvector_centrality(m)?;
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let kb = katz_bonacich(m, delta, z, Side::Left)?;
        let mut rescaled: Vec<f64> = kb.scores.iter().map(|v| v * (1.0 - delta)).collect();
        let sum: f64 = rescaled.iter().sum();
        for v in &mut rescaled {
            *v /= sum;
        }
        let cosine = cosine(&rescaled, &reference.scores);
        out.push(LimitPoint {
            delta,
            rescaled,
            cosine_to_eigenvector: cosine,
        });
    }
    Ok(out)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
