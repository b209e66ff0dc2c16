use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{Matrix, SymMatrix};

/// Simple undirected graph: symmetric 0/1 adjacency without self-loops,
/// stored as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        Self {
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds from an edge list; duplicates and orientation are ignored and
    /// self-loops dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parameter(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u != v {
                neighbors[u].push(v);
                neighbors[v].push(u);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    /// Reads a dense matrix; any non-zero off-diagonal entry is an edge.
    pub fn from_dense(m: &SymMatrix) -> Self {
        let n = m.n();
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && m.get(i, j) != 0.0).collect())
            .collect();
        Self { neighbors }
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn to_dense(&self) -> SymMatrix {
        let n = self.n();
        let mut data = vec![0.0; n * n];
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                data[i * n + j] = 1.0;
            }
        }
        SymMatrix::from_raw(n, data)
    }

    /// Subgraph induced by `idx`, relabelled to `0..idx.len()` in that order.
    pub fn induced(&self, idx: &[usize]) -> AdjacencyMatrix {
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let neighbors = idx
            .iter()
            .map(|&i| {
                let mut l: Vec<usize> = self.neighbors[i]
                    .iter()
                    .filter_map(|&j| (pos[j] != usize::MAX).then_some(pos[j]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        AdjacencyMatrix { neighbors }
    }

    /// Dense `rows.len() x cols.len()` block `A[rows, cols]`.
    pub fn cross_block(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &j) in cols.iter().enumerate() {
            pos[j] = k;
        }
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            let row = m.row_mut(a);
            for &j in &self.neighbors[i] {
                if pos[j] != usize::MAX {
                    row[pos[j]] = 1.0;
                }
            }
        }
        m
    }

    /// Relabels node `i` as `p[i]`.
    pub fn permute(&self, p: &[usize]) -> AdjacencyMatrix {
        let mut neighbors = vec![Vec::new(); self.n()];
        for (i, list) in self.neighbors.iter().enumerate() {
            neighbors[p[i]] = list.iter().map(|&j| p[j]).collect();
            neighbors[p[i]].sort_unstable();
        }
        AdjacencyMatrix { neighbors }
    }

    /// Fraction of the `n(n−1)/2` node pairs that are edges.
    pub fn density(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        self.edge_count() as f64 / (n * (n - 1) / 2) as f64
    }
}
