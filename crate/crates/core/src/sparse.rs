//! Compressed-row complex operator matrices.
//!
//! Every operator in the crate (fermion bilinears, ladder operators, assembled
//! four-momentum components) is an [`OperatorMatrix`]: a square CSR matrix over
//! `Complex64` that never stores an exact zero, plus a `hermitian` flag that is
//! only set by constructions that guarantee it.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let entries = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, Complex64::new(d, 0.0)));
        let mut m = Self::from_triplets(diag.len(), entries);
        m.hermitian = true;
        m
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that end up exactly zero are dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut t: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        t.sort_by_key(|e| (e.0, e.1));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < t.len() {
            let (r, c, mut v) = t[k];
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            k += 1;
            while k < t.len() && t[k].0 == r && t[k].1 == c {
                v += t[k].2;
                k += 1;
            }
            if v != ZERO {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        let n = m.nrows();
        let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)])));
        Self::from_triplets(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Metadata flag: set only when the construction guarantees `M = M^dagger`.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Marks the matrix hermitian after checking the defect against `tol`.
    pub fn assert_hermitian(mut self, tol: f64) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub(crate) fn with_hermitian_flag(mut self, flag: bool) -> Self {
        self.hermitian = flag;
        self
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[s..e].binary_search(&j) {
            Ok(k) => self.vals[s + k],
            Err(_) => ZERO,
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().map(|(i, j, v)| (j, i, v.conj()));
        Self::from_triplets(self.dim, t).with_hermitian_flag(self.hermitian)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let hermitian = self.hermitian && s.im == 0.0;
        let t = self.triplets().map(|(i, j, v)| (i, j, v * s));
        Self::from_triplets(self.dim, t).with_hermitian_flag(hermitian)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    fn check_dim(&self, other: &Self, context: &'static str) {
        assert_eq!(
            self.dim, other.dim,
            "{context}: dimension mismatch {} vs {}",
            self.dim, other.dim
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other, "add");
        let t = self.triplets().chain(other.triplets());
        Self::from_triplets(self.dim, t).with_hermitian_flag(self.hermitian && other.hermitian)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_dim(other, "sub");
        let t = self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, -v)));
        Self::from_triplets(self.dim, t).with_hermitian_flag(self.hermitian && other.hermitian)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        self.check_dim(other, "matmul");
        let n = self.dim;
        let mut acc = vec![ZERO; n];
        let mut seen = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            touched.clear();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if seen[j] != i {
                        seen[j] = i;
                        acc[j] = ZERO;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if acc[j] != ZERO {
                    cols.push(j);
                    vals.push(acc[j]);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Self {
            dim: n,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        }
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self)).with_hermitian_flag(false)
    }

    /// `{self, other} = self*other + other*self`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self)).with_hermitian_flag(false)
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow (outer) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.dim;
        let t = self.triplets().flat_map(|(i, j, a)| {
            other
                .triplets()
                .map(move |(k, l, b)| (i * m + k, j * m + l, a * b))
        });
        Self::from_triplets(self.dim * m, t).with_hermitian_flag(self.hermitian && other.hermitian)
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (p, &i) in indices.iter().enumerate() {
            pos[i] = p;
        }
        let t = indices.iter().enumerate().flat_map(|(p, &i)| {
            let pos = &pos;
            self.row(i)
                .filter(move |(j, _)| pos[*j] != usize::MAX)
                .map(move |(j, v)| (p, pos[j], v))
        });
        Self::from_triplets(indices.len(), t).with_hermitian_flag(self.hermitian)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "apply: vector length mismatch");
        (0..self.dim)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of the block `P M P`, where `P` projects onto
    /// the basis states listed in `indices`.
    pub fn max_abs_on(&self, indices: &[usize]) -> f64 {
        let mut keep = vec![false; self.dim];
        for &i in indices {
            keep[i] = true;
        }
        indices
            .iter()
            .flat_map(|&i| self.row(i).filter(|(j, _)| keep[*j]).map(|(_, v)| v.norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// `max |M - M^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let h = self.apply(psi);
        psi.iter().zip(&h).map(|(a, b)| a.conj() * b).sum()
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}
