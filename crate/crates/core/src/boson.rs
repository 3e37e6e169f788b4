//! Truncated boson Fock space with a uniform per-mode cutoff.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::OperatorMatrix;

pub const DEFAULT_MAX_BOSON_STATES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Occupation vectors `(n_1..n_K)` with every `n_k <= n_max`, ordered
/// lexicographically with mode 1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonBasis {
    modes: usize,
    n_max: usize,
    dim: usize,
}

pub fn build_boson_basis(modes: usize, n_max: usize, max_states: usize) -> Result<BosonBasis> {
    if n_max < 1 {
        return Err(Error::InvalidInput("boson cutoff n_max must be at least 1".into()));
    }
    let mut required: u128 = 1;
    for _ in 0..modes {
        required = required.saturating_mul(n_max as u128 + 1);
    }
    if required > max_states as u128 {
        return Err(Error::Capacity {
            what: "boson basis",
            required,
            budget: max_states,
        });
    }
    Ok(BosonBasis {
        modes,
        n_max,
        dim: required as usize,
    })
}

impl BosonBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn stride(&self, k: usize) -> usize {
        // k is zero-based; mode 0 is the most significant digit
        (self.n_max + 1).pow((self.modes - 1 - k) as u32)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let base = self.n_max + 1;
        let mut occ = vec![0; self.modes];
        let mut rest = index;
        for k in (0..self.modes).rev() {
            occ[k] = rest % base;
            rest /= base;
        }
        occ
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .fold(0, |acc, &n| acc * (self.n_max + 1) + n)
    }

    /// `true` if some mode sits at the cutoff.
    pub fn is_boundary(&self, index: usize) -> bool {
        self.occupations(index).contains(&self.n_max)
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.modes {
            return Err(Error::IndexOutOfRange {
                what: "boson mode",
                index: k,
                max: self.modes,
            });
        }
        Ok(())
    }

    /// `c_k` or `c_k^dagger` (one-based `k`), with `c^dagger |n_max> = 0`.
    pub fn ladder(&self, kind: Ladder, k: usize) -> Result<OperatorMatrix> {
        self.check_mode(k)?;
        let stride = self.stride(k - 1);
        let t = (0..self.dim).filter_map(|col| {
            let n = self.occupations(col)[k - 1];
            match kind {
                Ladder::Create if n < self.n_max => {
                    Some((col + stride, col, libm::sqrt((n + 1) as f64)))
                }
                Ladder::Annihilate if n > 0 => Some((col - stride, col, libm::sqrt(n as f64))),
                _ => None,
            }
        });
        Ok(OperatorMatrix::from_triplets(
            self.dim,
            t.map(|(r, c, v)| (r, c, Complex64::new(v, 0.0))),
        ))
    }

    /// Diagonal `n_k`.
    pub fn number(&self, k: usize) -> Result<OperatorMatrix> {
        self.check_mode(k)?;
        let d: Vec<f64> = (0..self.dim)
            .map(|i| self.occupations(i)[k - 1] as f64)
            .collect();
        Ok(OperatorMatrix::from_real_diagonal(&d))
    }

    pub fn vacuum(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn safe_subspace(&self, margin: usize) -> SafeSubspace {
        let indices = (0..self.dim)
            .filter(|&i| {
                self.occupations(i)
                    .iter()
                    .all(|&n| n + margin <= self.n_max)
            })
            .collect();
        SafeSubspace { margin, indices }
    }

    /// `D(beta) = exp(sum_k beta_k c_k^dagger - conj(beta_k) c_k)` on the
    /// truncated space. Accurate when `|beta_k|^2` is well below `n_max`.
    pub fn displacement_operator(&self, beta: &[Complex64]) -> Result<OperatorMatrix> {
        if beta.len() != self.modes {
            return Err(Error::DimensionMismatch {
                context: "displacement amplitudes",
                expected: self.modes,
                found: beta.len(),
            });
        }
        // the modes act on separate tensor factors, so D factorizes
        let single = build_boson_basis(1, self.n_max, self.n_max + 1)?;
        let cd = single.ladder(Ladder::Create, 1)?;
        let c = single.ladder(Ladder::Annihilate, 1)?;
        let mut d = OperatorMatrix::identity(1);
        for &b in beta {
            let gen = cd.scale(b).sub(&c.scale(b.conj()));
            d = d.kron(&OperatorMatrix::from_dense(&expm(&gen.to_dense())));
        }
        Ok(d)
    }
}

/// States with every occupation at most `n_max - margin`, away from where the
/// truncation breaks `[c, c^dagger] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeSubspace {
    margin: usize,
    indices: Vec<usize>,
}

impl SafeSubspace {
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn projector(&self, dim: usize) -> OperatorMatrix {
        let mut d = vec![0.0; dim];
        for &i in &self.indices {
            d[i] = 1.0;
        }
        OperatorMatrix::from_real_diagonal(&d)
    }

    /// Lifts boson-space indices to `fermion ⊗ boson` indices.
    pub fn lift(&self, fermion_dim: usize, boson_dim: usize) -> Vec<usize> {
        (0..fermion_dim)
            .flat_map(|f| self.indices.iter().map(move |&b| f * boson_dim + b))
            .collect()
    }
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a * Complex64::new(scale, 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        let tn: f64 = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
