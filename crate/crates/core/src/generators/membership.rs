use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::Matrix;

/// Hard clustering: one label in `0..r` per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardMembership {
    labels: Vec<usize>,
    r: usize,
}

impl HardMembership {
    pub fn new(labels: Vec<usize>, r: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= r) {
            return Err(Error::Parameter(format!("label {bad} not below r = {r}")));
        }
        Ok(Self { labels, r })
    }

    /// `r` is one more than the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let r = labels.iter().max().map_or(0, |m| m + 1);
        Self { labels, r }
    }

    /// Contiguous blocks: the first `sizes[0]` nodes are cluster 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &m)| std::iter::repeat_n(k, m))
            .collect();
        Self {
            labels,
            r: sizes.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.r];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Members of each cluster, in node order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut c = vec![Vec::new(); self.r];
        for (i, &l) in self.labels.iter().enumerate() {
            c[l].push(i);
        }
        c
    }

    pub fn has_empty_cluster(&self) -> bool {
        self.sizes().contains(&0)
    }

    /// Drops empty clusters, keeping the relative order of the others.
    pub fn compacted(&self) -> HardMembership {
        let sizes = self.sizes();
        let mut map = vec![usize::MAX; self.r];
        let mut next = 0;
        for (k, &m) in sizes.iter().enumerate() {
            if m > 0 {
                map[k] = next;
                next += 1;
            }
        }
        HardMembership {
            labels: self.labels.iter().map(|&l| map[l]).collect(),
            r: next,
        }
    }

    pub fn select(&self, idx: &[usize]) -> HardMembership {
        HardMembership {
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            r: self.r,
        }
    }

    /// Node `i` moves to position `p[i]`.
    pub fn permute(&self, p: &[usize]) -> HardMembership {
        let mut labels = vec![0; self.n()];
        for (i, &l) in self.labels.iter().enumerate() {
            labels[p[i]] = l;
        }
        HardMembership { labels, r: self.r }
    }

    /// One-hot `n x r` matrix `Z`.
    pub fn to_matrix(&self) -> Matrix {
        let mut z = Matrix::zeros(self.n(), self.r);
        for (i, &l) in self.labels.iter().enumerate() {
            z.set(i, l, 1.0);
        }
        z
    }
}

/// Mixed membership: `n x r` matrix with rows on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftMembership {
    theta: Matrix,
}

impl SoftMembership {
    pub fn new(theta: Matrix) -> Result<Self> {
        for i in 0..theta.rows() {
            let row = theta.row(i);
            let s: f64 = row.iter().sum();
            if row.iter().any(|&v| v < 0.0 || !v.is_finite()) || (s - 1.0).abs() > 1e-12 {
                return Err(Error::Parameter(format!("row {i} is not on the simplex")));
            }
        }
        Ok(Self { theta })
    }

    /// Caller guarantees simplex rows (e.g. after projection).
    pub(crate) fn from_projected(theta: Matrix) -> Self {
        Self { theta }
    }

    pub fn from_hard(z: &HardMembership) -> Self {
        Self { theta: z.to_matrix() }
    }

    pub fn theta(&self) -> &Matrix {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.rows()
    }

    pub fn r(&self) -> usize {
        self.theta.cols()
    }

    /// Row-wise argmax, ties to the smallest column.
    pub fn argmax(&self) -> HardMembership {
        let labels = (0..self.n())
            .map(|i| {
                let row = self.theta.row(i);
                let mut best = 0;
                for (k, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect();
        HardMembership {
            labels,
            r: self.r(),
        }
    }
}

/// Either kind of membership; both induce a normalized clustering matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Membership {
    Hard(HardMembership),
    Soft(SoftMembership),
}

impl Membership {
    pub fn n(&self) -> usize {
        match self {
            Membership::Hard(z) => z.n(),
            Membership::Soft(t) => t.n(),
        }
    }

    /// Hard labels (argmax for soft memberships).
    pub fn hard_labels(&self) -> HardMembership {
        match self {
            Membership::Hard(z) => z.clone(),
            Membership::Soft(t) => t.argmax(),
        }
    }
}

impl From<HardMembership> for Membership {
    fn from(z: HardMembership) -> Self {
        Membership::Hard(z)
    }
}

impl From<SoftMembership> for Membership {
    fn from(t: SoftMembership) -> Self {
        Membership::Soft(t)
    }
}
