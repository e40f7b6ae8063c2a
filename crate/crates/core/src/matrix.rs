//! Dense square matrices and their digraph structure.
//!
//! A matrix `M` is identified with a weighted digraph on `0..n` whose edges
//! are the ordered pairs `(i, j)` with `M[i][j] > 0`. Entries smaller than
//! [`STRUCTURAL_EPS`] in absolute value are treated as absent edges so that
//! float noise cannot manufacture connectivity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};

/// Entries with absolute value at or below this are structural zeros.
pub const STRUCTURAL_EPS: f64 = 1e-12;

/// Dense row-major `n x n` real matrix with optional node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
            labels: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from rows, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(alloc::format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(alloc::format!(
                        "entry ({i},{j}) is not finite"
                    )));
                }
                data.push(v);
            }
        }
        Ok(SquareMatrix {
            n,
            data,
            labels: None,
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Option<Vec<String>>) -> Result<()> {
        if let Some(ref l) = labels {
            if l.len() != self.n {
                return Err(Error::InvalidInput(alloc::format!(
                    "{} labels for {} nodes",
                    l.len(),
                    self.n
                )));
            }
        }
        self.labels = labels;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t.labels = self.labels.clone();
        t
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= a;
        }
        out
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidInput(alloc::format!(
                "matmul size mismatch: {} vs {}",
                self.n,
                other.n
            )));
        }
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * orow[j];
                }
            }
        }
        Ok(out)
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `M^T v`, i.e. `(v^T M)^T`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let row = self.row(i);
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..self.n {
                out[j] += vi * row[j];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Edge test in the digraph view: strictly positive beyond float noise.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > STRUCTURAL_EPS
    }

    /// Adjacency lists of the positive-entry digraph.
    pub fn out_neighbors(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.has_edge(i, j)).collect())
            .collect()
    }

    fn require_nonnegative(&self, what: &str) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) < 0.0 {
                    return Err(Error::InvalidInput(alloc::format!(
                        "{what} requires a nonnegative matrix; entry ({i},{j}) = {}",
                        self.get(i, j)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Strongly connected components of the positive-entry digraph, via an
/// iterative Tarjan walk (no recursion, so deep chains are safe).
/// Components are returned in reverse topological order.
pub fn strongly_connected_components(m: &SquareMatrix) -> Vec<Vec<usize>> {
    let n = m.n();
    let adj = m.out_neighbors();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS frames: (node, position in its adjacency list).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.1 < adj[v].len() {
                let w = adj[v][frame.1];
                frame.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// `true` iff the positive-entry digraph is strongly connected. A 1x1 matrix
/// is irreducible by convention.
pub fn is_irreducible(m: &SquareMatrix) -> Result<bool> {
    m.require_nonnegative("irreducibility")?;
    if m.n() <= 1 {
        return Ok(true);
    }
    Ok(strongly_connected_components(m).len() == 1)
}

/// `true` iff the gcd of all directed cycle lengths is 1.
///
/// Computed as the gcd of `level(u) + 1 - level(v)` over all edges `(u, v)`,
/// with levels from a BFS rooted at node 0; for a strongly connected digraph
/// this gcd is exactly the period.
pub fn is_aperiodic(m: &SquareMatrix) -> Result<bool> {
    m.require_nonnegative("aperiodicity")?;
    if !is_irreducible(m)? {
        return Err(Error::Precondition(String::from(
            "aperiodicity is defined per strongly connected component; matrix is reducible",
        )));
    }
    let n = m.n();
    if n == 1 {
        // Single node: aperiodic iff it has a self-loop (cycle of length 1).
        return Ok(m.has_edge(0, 0));
    }
    let adj = m.out_neighbors();
    let mut level = vec![usize::MAX; n];
    let mut queue = alloc::collections::VecDeque::new();
    level[0] = 0;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if level[w] == usize::MAX {
                level[w] = level[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut g: u64 = 0;
    for (u, nbrs) in adj.iter().enumerate() {
        for &w in nbrs {
            let d = level[u] as i64 + 1 - level[w] as i64;
            g = gcd(g, d.unsigned_abs());
        }
    }
    Ok(g == 1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(matches!(
            SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            SquareMatrix::from_rows(&[vec![f64::NAN]]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn two_cycle_is_irreducible() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(is_irreducible(&a).unwrap());
    }

    #[test]
    fn upper_triangular_is_reducible() {
        // No path from node 1 back to node 0.
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(!is_irreducible(&a).unwrap());
    }

    #[test]
    fn negative_entry_is_invalid_for_structure_tests() {
        let a = m(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(matches!(is_irreducible(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn figure2_benefits_matrix_is_irreducible() {
        let a = crate::testkit::benefits_example();
        assert!(is_irreducible(&a).unwrap());
    }

    #[test]
    fn two_cycle_is_periodic() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(!is_aperiodic(&a).unwrap());
    }

    #[test]
    fn self_loop_breaks_periodicity() {
        let a = m(&[&[1.0, 1.0], &[1.0, 0.0]]);
        assert!(is_aperiodic(&a).unwrap());
    }

    #[test]
    fn three_cycle_with_one_self_loop_is_aperiodic() {
        // gcd(3, 1) = 1
        let a = m(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert!(is_aperiodic(&a).unwrap());
        // and without the self-loop the pure 3-cycle has period 3
        let b = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert!(!is_aperiodic(&b).unwrap());
    }

    #[test]
    fn aperiodicity_requires_irreducibility() {
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(is_aperiodic(&a), Err(Error::Precondition(_))));
    }

    #[test]
    fn directed_four_cycle_has_period_four() {
        let mut a = SquareMatrix::zeros(4);
        for i in 0..4 {
            a.set(i, (i + 1) % 4, 1.0);
        }
        assert!(!is_aperiodic(&a).unwrap());
    }

    #[test]
    fn scc_finds_two_components() {
        let a = m(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 0.0, 1.0]]);
        let comps = strongly_connected_components(&a);
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn matmul_and_vec_products_agree() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = m(&[&[0.0, 1.0], &[1.0, 1.0]]);
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab.row(0), &[2.0, 3.0]);
        assert_eq!(ab.row(1), &[4.0, 7.0]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]), vec![4.0, 6.0]);
    }
}
