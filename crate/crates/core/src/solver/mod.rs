//! Diagonalization of assembled operators and the exactly solvable models.

pub mod exact;
pub mod n1;
pub mod roots;

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{norm, OperatorMatrix};

pub use exact::{
    exact_sector_spectrum, solve_alpha, AlphaSolution, ExactLevel, ExactModel, ExactModelSpec,
};
pub use n1::{n1_diagonalization, n1_series_spectrum, n1_spectral_functions, SeriesOptions};

/// Residual bound for the dense path.
pub const DENSE_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Eigenvalues within this distance are one level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Dense,
    /// Lanczos with full reorthogonalization and explicit deflation.
    Iterative { tolerance: f64, max_krylov: usize },
}

impl Method {
    pub fn iterative(tolerance: f64) -> Self {
        Method::Iterative {
            tolerance,
            max_krylov: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    /// `‖Hψ − λψ‖` per pair.
    pub residuals: Vec<f64>,
    /// Norm fraction on boundary states; empty until [`Spectrum::attach_leakage`].
    pub truncation_leakage: Vec<f64>,
}

/// One distinct eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

impl Spectrum {
    /// Fills `truncation_leakage` from a per-state boundary mask.
    pub fn attach_leakage(&mut self, boundary: &[bool]) {
        self.truncation_leakage = match &self.eigenvectors {
            Some(vecs) => vecs
                .iter()
                .map(|v| {
                    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    let edge: f64 = v
                        .iter()
                        .zip(boundary)
                        .filter(|(_, &b)| b)
                        .map(|(z, _)| z.norm_sqr())
                        .sum();
                    if total > 0.0 {
                        (edge / total).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect(),
            None => Vec::new(),
        };
    }

    pub fn levels(&self) -> Vec<Level> {
        group_levels(&self.eigenvalues, DEGENERACY_TOLERANCE)
    }
}

/// Groups sorted values closer than `tol` to their predecessor.
pub fn group_levels(sorted: &[f64], tol: f64) -> Vec<Level> {
    let mut out: Vec<Level> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &x in sorted {
        match out.last_mut() {
            Some(level) if x - last <= tol => level.multiplicity += 1,
            _ => out.push(Level {
                value: x,
                multiplicity: 1,
            }),
        }
        last = x;
    }
    out
}

fn check_hermitian(op: &OperatorMatrix) -> Result<()> {
    let defect = op.hermiticity_defect();
    if defect > 1e-12 * (1.0 + op.max_abs()) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Lowest `count` eigenpairs of a hermitian operator.
pub fn diagonalize(op: &OperatorMatrix, count: usize, method: Method) -> Result<Spectrum> {
    check_hermitian(op)?;
    let count = count.min(op.dim());
    match method {
        Method::Dense => dense(op, count),
        Method::Iterative {
            tolerance,
            max_krylov,
        } => lanczos(op, count, tolerance, max_krylov),
    }
}

fn residual(op: &OperatorMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let hv = op.apply(v);
    let r: Vec<Complex64> = hv.iter().zip(v).map(|(h, x)| h - x * lambda).collect();
    norm(&r)
}

fn dense(op: &OperatorMatrix, count: usize) -> Result<Spectrum> {
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..op.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut eigenvalues = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for &i in order.iter().take(count) {
        let lambda = eig.eigenvalues[i];
        let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        let r = residual(op, lambda, &v);
        if r > DENSE_RESIDUAL_TOLERANCE * (1.0 + op.max_abs()) {
            return Err(Error::NoConvergence {
                achieved: r,
                tolerance: DENSE_RESIDUAL_TOLERANCE,
            });
        }
        eigenvalues.push(lambda);
        vectors.push(v);
        residuals.push(r);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(vectors),
        residuals,
        truncation_leakage: Vec::new(),
    })
}

/// Deterministic start vector (splitmix64 stream).
fn start_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..dim).map(|_| Complex64::new(next(), next())).collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn orthogonalize(v: &mut [Complex64], against: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in against {
            let p = dot(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= y * p;
            }
        }
    }
}

fn lanczos(op: &OperatorMatrix, count: usize, tol: f64, max_krylov: usize) -> Result<Spectrum> {
    let dim = op.dim();
    let mut locked: Vec<Vec<Complex64>> = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut residuals = Vec::new();
    let mut seed = 0u64;
    while locked.len() < count {
        let mut start = start_vector(dim, seed);
        seed += 1;
        let mut best = (f64::NAN, Vec::new(), f64::INFINITY);
        for _restart in 0..50 {
            best = lanczos_lowest(op, &locked, start, max_krylov.max(2));
            if best.2 <= tol {
                break;
            }
            start = best.1.clone();
        }
        let (lambda, v, r) = best;
        if !(r <= tol) {
            return Err(Error::NoConvergence {
                achieved: r,
                tolerance: tol,
            });
        }
        eigenvalues.push(lambda);
        residuals.push(r);
        locked.push(v);
    }
    // deflation rounds deliver ascending values up to roundoff
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
        eigenvectors: Some(order.iter().map(|&i| locked[i].clone()).collect()),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        truncation_leakage: Vec::new(),
    })
}

/// One Lanczos run in the orthogonal complement of `locked`; returns the
/// lowest Ritz pair and its true residual.
fn lanczos_lowest(
    op: &OperatorMatrix,
    locked: &[Vec<Complex64>],
    mut start: Vec<Complex64>,
    max_krylov: usize,
) -> (f64, Vec<Complex64>, f64) {
    let dim = op.dim();
    orthogonalize(&mut start, locked);
    let n0 = norm(&start);
    if n0 == 0.0 {
        start = start_vector(dim, 0xDEAD_BEEF);
        orthogonalize(&mut start, locked);
    }
    let n0 = norm(&start);
    let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|z| z / n0).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let limit = max_krylov.min(dim - locked.len());
    loop {
        let j = basis.len() - 1;
        let mut w = op.apply(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alphas.push(a);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, locked);
        let b = norm(&w);
        if basis.len() >= limit || b < 1e-13 {
            break;
        }
        betas.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let imin = (0..m)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .unwrap_or(0);
    let theta = eig.eigenvalues[imin];
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for (q, &y) in basis.iter().zip(eig.eigenvectors.column(imin).iter()) {
        for (x, qi) in v.iter_mut().zip(q) {
            *x += qi * y;
        }
    }
    orthogonalize(&mut v, locked);
    let nv = norm(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }
    let r = residual(op, theta, &v);
    (theta, v, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> OperatorMatrix {
        let v = start_vector(n * n, seed);
        let mut m = DMatrix::from_fn(n, n, |i, j| v[i * n + j]);
        m = &m + m.adjoint();
        OperatorMatrix::from_dense(&m).assert_hermitian(0.0).unwrap()
    }

    #[test]
    fn free_single_mode_spectrum() {
        let diag = [0.0, 1.0, 1.0, 1.0, 2.0];
        let op = OperatorMatrix::from_real_diagonal(&diag);
        let s = diagonalize(&op, 4, Method::Dense).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0, 1.0, 1.0, 1.0]);
        let levels = s.levels();
        assert_eq!(levels[1].multiplicity, 3);
    }

    #[test]
    fn dense_and_iterative_agree() {
        let op = random_hermitian(60, 7);
        let d = diagonalize(&op, 5, Method::Dense).unwrap();
        let it = diagonalize(&op, 5, Method::iterative(1e-10)).unwrap();
        for (a, b) in d.eigenvalues.iter().zip(&it.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(d.residuals.iter().all(|&r| r < 1e-10));
        assert!(it.residuals.iter().all(|&r| r <= 1e-10));
    }

    #[test]
    fn iterative_resolves_degeneracy() {
        let op = OperatorMatrix::from_real_diagonal(&[3.0, 1.0, 1.0, 2.0, 1.0, 5.0]);
        let it = diagonalize(&op, 4, Method::iterative(1e-12)).unwrap();
        for (a, b) in it.eigenvalues.iter().zip([1.0, 1.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let op = OperatorMatrix::from_triplets(2, [(0, 1, Complex64::new(1.0, 0.0))]);
        assert!(matches!(diagonalize(&op, 1, Method::Dense), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn leakage_is_a_fraction() {
        let op = random_hermitian(10, 3);
        let mut s = diagonalize(&op, 3, Method::Dense).unwrap();
        let mask: Vec<bool> = (0..10).map(|i| i >= 7).collect();
        s.attach_leakage(&mask);
        assert_eq!(s.truncation_leakage.len(), 3);
        assert!(s.truncation_leakage.iter().all(|&l| (0.0..=1.0).contains(&l)));
    }
}
