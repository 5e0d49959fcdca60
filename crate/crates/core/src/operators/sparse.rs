use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::DomainError;

pub type C64 = Complex64;

/// Complex matrix in compressed sparse row layout.
///
/// Column indices within a row are strictly increasing and no explicit zeros
/// are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Assembles a matrix from (row, col, value) triplets; duplicates are
    /// summed and exact zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut entries: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(entries.len());
        let mut rows_of: Vec<usize> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            assert!(
                r < rows && c < cols,
                "triplet ({r}, {c}) outside {rows}x{cols}"
            );
            match (rows_of.last(), indices.last()) {
                (Some(&lr), Some(&lc)) if lr == r && lc == c => {
                    *values.last_mut().unwrap() += v;
                }
                _ => {
                    rows_of.push(r);
                    indices.push(c);
                    values.push(v);
                }
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((r, c), v) in rows_of.into_iter().zip(indices).zip(values) {
            if v != C64::new(0.0, 0.0) {
                indptr[r + 1] += 1;
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            rows,
            cols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        Self::from_triplets(
            rows,
            cols,
            (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j, m[(i, j)]))),
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Stored entries of one row as (column, value).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries as (row, column, value), row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.iter().map(|(i, j, v)| (j, i, v.conj())),
        )
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_triplets(
            self.rows,
            self.cols,
            self.iter().map(|(i, j, v)| (i, j, v * factor)),
        )
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add");
        Self::from_triplets(self.rows, self.cols, self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    /// Sparse product self · other.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut triplets = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.cols];
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                triplets.push((i, j, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                mark[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.rows, other.cols, triplets)
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = other.shape();
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (i1, j1, a) in self.iter() {
            for (i2, j2, b) in other.iter() {
                triplets.push((i1 * r2 + i2, j1 * c2 + j2, a * b));
            }
        }
        Self::from_triplets(self.rows * r2, self.cols * c2, triplets)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// y = self · x
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let span = self.indptr[i]..self.indptr[i + 1];
            let mut s = C64::new(0.0, 0.0);
            for (&j, &v) in self.indices[span.clone()].iter().zip(&self.values[span]) {
                s += v * x[j];
            }
            *yi = s;
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// Largest stored magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max |A - A†| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn ensure_square(&self, expected: usize) -> Result<(), DomainError> {
        if self.rows != expected || self.cols != expected {
            return Err(DomainError::DimensionMismatch {
                expected,
                got: if self.rows != expected {
                    self.rows
                } else {
                    self.cols
                },
            });
        }
        Ok(())
    }
}

/// Kronecker product A ⊗ B.
pub fn tensor(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a.kron(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dense_kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        let (ra, ca) = a.shape();
        let (rb, cb) = b.shape();
        DMatrix::from_fn(ra * rb, ca * cb, |i, j| {
            a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
        })
    }

    fn sparse_strategy(n: usize) -> impl Strategy<Value = DMatrix<C64>> {
        proptest::collection::vec((-2i32..=2, -2i32..=2, any::<bool>()), n * n).prop_map(move |v| {
            DMatrix::from_iterator(
                n,
                n,
                v.into_iter().map(|(a, b, keep)| {
                    if keep {
                        c(a as f64, b as f64 * 0.5)
                    } else {
                        c(0.0, 0.0)
                    }
                }),
            )
        })
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![
                (1, 2, c(1.0, 0.0)),
                (0, 1, c(2.0, 0.0)),
                (1, 2, c(-1.0, 0.0)),
                (0, 0, c(0.0, 1.0)),
                (0, 1, c(1.0, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(1, 2), c(0.0, 0.0));
        assert_eq!(m.indices(), &[0, 1]);
        assert_eq!(m.indptr(), &[0, 2, 2]);
    }

    #[test]
    fn identity_kron() {
        let i6 = tensor(&SparseMatrix::identity(2), &SparseMatrix::identity(3));
        assert_eq!(i6, SparseMatrix::identity(6));
        let a = SparseMatrix::zeros(2, 2);
        assert_eq!(tensor(&a, &SparseMatrix::identity(3)).shape(), (6, 6));
    }

    proptest! {
        #[test]
        fn sparse_matches_dense(a in sparse_strategy(3), b in sparse_strategy(3),
                                cm in sparse_strategy(2), d in sparse_strategy(2)) {
            let (sa, sb) = (SparseMatrix::from_dense(&a), SparseMatrix::from_dense(&b));
            let (sc, sd) = (SparseMatrix::from_dense(&cm), SparseMatrix::from_dense(&d));
            prop_assert_eq!(sa.matmul(&sb).to_dense(), &a * &b);
            prop_assert_eq!(sa.add(&sb).to_dense(), &a + &b);
            prop_assert_eq!(sa.adjoint().to_dense(), a.adjoint());
            prop_assert_eq!(tensor(&sa, &sc).to_dense(), dense_kron(&a, &cm));
            // Mixed-product property (A⊗C)(B⊗D) = AB ⊗ CD.
            let lhs = tensor(&sa, &sc).matmul(&tensor(&sb, &sd));
            let rhs = tensor(&sa.matmul(&sb), &sc.matmul(&sd));
            prop_assert!((lhs.to_dense() - rhs.to_dense()).norm() < 1e-12);
            let x: Vec<C64> = (0..3).map(|k| c(k as f64 + 1.0, -0.5 * k as f64)).collect();
            let y = sa.matvec(&x);
            let yd = &a * nalgebra::DVector::from_vec(x.clone());
            for k in 0..3 {
                prop_assert!((y[k] - yd[k]).norm() < 1e-12);
            }
        }
    }
}
