//! Fixture graphs and seeded random-instance generators shared by the test
//! suites (including the acceptance suite in the companion crate).

use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::SquareMatrix;

/// The 7-node line-of-clusters graph used throughout the centrality tests:
/// two triangles (1-2-3 and 5-6-7) bridged through node 4.
///
/// Undirected edges: 1-3, 2-3, 3-4, 4-5, 5-6, 5-7, 1-2, 6-7 (1-based).
pub fn bridge_graph() -> SquareMatrix {
    let edges = [(1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7), (1, 2), (6, 7)];
    let mut m = SquareMatrix::zeros(7);
    for &(a, b) in &edges {
        m.set(a - 1, b - 1, 1.0);
        m.set(b - 1, a - 1, 1.0);
    }
    m
}

/// The 4-agent benefits matrix of the public-goods example: directed gifts
/// 1->2 (5), 3->2 (6), 3->1 (7) and mutual 0.5 links 1-4, 3-4, 2-4.
pub fn benefits_example() -> SquareMatrix {
    SquareMatrix::from_rows(&[
        alloc::vec![0.0, 5.0, 0.0, 0.5],
        alloc::vec![0.0, 0.0, 0.0, 0.5],
        alloc::vec![7.0, 6.0, 0.0, 0.5],
        alloc::vec![0.5, 0.5, 0.5, 0.0],
    ])
    .unwrap()
}

/// Random dense nonnegative matrix with entries in (lo, 1]; strictly
/// positive entries make it irreducible and primitive.
pub fn random_positive(n: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SquareMatrix::from_fn(n, |_, _| rng.gen_range(0.05..1.0))
}

/// Random irreducible nonnegative matrix: a directed Hamiltonian cycle
/// guarantees strong connectivity, plus random sparse extras.
pub fn random_irreducible(n: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        m.set(i, (i + 1) % n, rng.gen_range(0.1..1.0));
    }
    let extras = 2 * n;
    for _ in 0..extras {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            m.set(i, j, rng.gen_range(0.1..1.0));
        }
    }
    m
}

/// Random row-stochastic matrix with a uniform-mixing component, which keeps
/// the spectral gap comfortably large (|lambda_2| <= 1 - mix).
pub fn random_primitive_stochastic(n: usize, seed: u64, mix: f64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let s: f64 = row.iter().sum();
        for v in &mut row {
            *v /= s;
        }
        for (j, v) in row.iter().enumerate() {
            m.set(i, j, (1.0 - mix) * v + mix / n as f64);
        }
    }
    m
}

/// Random symmetric nonnegative matrix with zero diagonal, rescaled to the
/// requested spectral radius.
pub fn random_symmetric_with_radius(n: usize, seed: u64, rho: f64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(0.0..1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let cur = crate::spectral::spectral_radius(&m).unwrap();
    m.scaled(rho / cur)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
