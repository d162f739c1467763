use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Square complex matrix in compressed sparse row form.
///
/// Column indices are sorted within each row and no explicit zeros are
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); diag.len()];
        for (i, &d) in diag.iter().enumerate() {
            rows[i].push((i, d));
        }
        Self::from_rows(diag.len(), rows)
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            rows[r].push((c, v));
        }
        Self::from_rows(dim, rows)
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix {
            dim,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of `row` as `(col, value)`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[row]..self.indptr[row + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Iterates all stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let span = self.indptr[row]..self.indptr[row + 1];
        match self.indices[span.clone()].binary_search(&col) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if factor == C64::new(0.0, 0.0) {
            return Self::zeros(self.dim);
        }
        out
    }

    /// `sum_k coeff_k * M_k` over matrices of equal dimension.
    pub fn linear_combination<'a>(dim: usize, terms: impl IntoIterator<Item = (C64, &'a SparseMatrix)>) -> Self {
        let mut triplets = Vec::new();
        for (coeff, m) in terms {
            assert_eq!(m.dim, dim);
            triplets.extend(m.triplets().map(|(r, c, v)| (r, c, coeff * v)));
        }
        Self::from_triplets(dim, triplets)
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = (0..self.dim)
            .map(|r| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for (k, a) in self.row(r) {
                    acc.extend(other.row(k).map(|(c, b)| (c, a * b)));
                }
                acc
            })
            .collect();
        Self::from_rows(self.dim, rows)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude of `A - A^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Converts a dense matrix, dropping entries with magnitude `<= drop_tol`.
    pub fn from_dense(m: &DMatrix<C64>, drop_tol: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let triplets = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c)));
        Self::from_triplets(
            dim,
            triplets
                .map(|(r, c)| (r, c, m[(r, c)]))
                .filter(|(_, _, v)| v.norm() > drop_tol),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = SparseMatrix::from_triplets(
            2,
            [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_triplets(3, [(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.5)), (1, 1, c(0.0, 1.0))]);
        let b = SparseMatrix::from_triplets(3, [(1, 2, c(2.0, 0.0)), (0, 0, c(1.0, -1.0)), (1, 0, c(3.0, 0.0))]);
        let sparse = a.matmul(&b).to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = SparseMatrix::from_triplets(2, [(0, 1, c(1.0, 2.0))]);
        let adj = a.adjoint();
        assert_eq!(adj.get(1, 0), c(1.0, -2.0));
        assert_eq!(adj.get(0, 1), c(0.0, 0.0));
        assert!(a.hermiticity_defect() > 0.0);
    }
}
