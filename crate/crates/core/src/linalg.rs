//! Small dense symmetric eigenproblems.

/// A symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// Symmetrizes `entries` as `(M + Mᵀ)/2`.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let mut m = Self { dim, entries };
        for i in 0..dim {
            for j in i + 1..dim {
                let v = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
        self.entries[j * self.dim + i] = v;
    }

    /// Adds `w·u uᵀ`.
    pub fn add_outer(&mut self, u: &[f64], w: f64) {
        for i in 0..self.dim {
            let wi = w * u[i];
            for j in 0..self.dim {
                self.entries[i * self.dim + j] += wi * u[j];
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SymMatrix, w: f64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += w * b;
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn off_diagonal_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s
    }

    fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    /// Eigenvalues ascending with unit eigenvectors, by cyclic Jacobi
    /// rotations.
    pub fn eigen(&self) -> Eigen {
        let n = self.dim;
        let mut a = self.clone();
        let mut v = SymMatrix::zeros(n);
        for i in 0..n {
            v.entries[i * n + i] = 1.0;
        }
        let scale = a.frobenius_sq();
        for _sweep in 0..100 {
            if a.off_diagonal_sq() <= 1e-30 * scale || scale == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.entries[k * n + p];
                        let akq = a.entries[k * n + q];
                        a.entries[k * n + p] = c * akp - s * akq;
                        a.entries[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a.entries[p * n + k];
                        let aqk = a.entries[q * n + k];
                        a.entries[p * n + k] = c * apk - s * aqk;
                        a.entries[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v.entries[k * n + p];
                        let vkq = v.entries[k * n + q];
                        v.entries[k * n + p] = c * vkp - s * vkq;
                        v.entries[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
        Eigen {
            values: order.iter().map(|&i| a.get(i, i)).collect(),
            vectors: order
                .iter()
                .map(|&i| (0..n).map(|k| v.entries[k * n + i]).collect())
                .collect(),
        }
    }

    /// `λ_min` with its eigenvector.
    pub fn min_eigen(&self) -> (f64, Vec<f64>) {
        let mut e = self.eigen();
        (e.values[0], e.vectors.swap_remove(0))
    }

    /// Spectral norm `max |λ|`.
    pub fn spectral_norm(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let e = self.eigen();
        e.values[0].abs().max(e.values[self.dim - 1].abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}
