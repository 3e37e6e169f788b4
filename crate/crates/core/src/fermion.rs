//! Antisymmetric Fock space of the `2N` modes `A_1..A_2N`.
//!
//! The fermion modes are `A_i = a_i` and the antifermion modes enter through
//! `A_{i+N} = b_i^dagger`, so a basis word records *A-mode* occupations: bit
//! `alpha - 1` set means `A_alpha` is occupied. In that language the Fock vacuum
//! `|0_F>` (no fermions, no antifermions) has the upper `N` bits filled, and a
//! cleared upper bit is a present antifermion.
//!
//! Sign convention: `A_alpha` and `A_alpha^dagger` pick up
//! `(-1)^(number of occupied A-modes with index < alpha)`. States are ordered by
//! ascending occupation word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::OperatorMatrix;

pub const DEFAULT_MAX_FERMION_STATES: usize = 1 << 16;

/// Ladder operator kinds for the physical species.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    FermionCreate,
    FermionAnnihilate,
    AntifermionCreate,
    AntifermionAnnihilate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionBasis {
    modes: usize,
    states: Vec<u64>,
    sectors: BTreeMap<i32, Vec<usize>>,
}

/// Builds the `4^N` dimensional basis, refusing anything above `max_states`.
pub fn build_basis(modes: usize, max_states: usize) -> Result<FermionBasis> {
    let required: u128 = if 2 * modes >= 128 {
        u128::MAX
    } else {
        1u128 << (2 * modes)
    };
    if modes >= 32 || required > max_states as u128 {
        return Err(Error::Capacity {
            what: "fermion basis",
            required,
            budget: max_states,
        });
    }
    let states: Vec<u64> = (0..required as u64).collect();
    let mut sectors: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (idx, &w) in states.iter().enumerate() {
        sectors.entry(baryon_of(modes, w)).or_default().push(idx);
    }
    Ok(FermionBasis {
        modes,
        states,
        sectors,
    })
}

fn baryon_of(modes: usize, word: u64) -> i32 {
    let low = (1u64 << modes) - 1;
    let fermions = (word & low).count_ones() as i32;
    let filled_upper = ((word >> modes) & low).count_ones() as i32;
    fermions - (modes as i32 - filled_upper)
}

/// Applies `A_alpha` (`create = false`) or `A_alpha^dagger` to a basis word.
/// `alpha` is zero-based here.
fn apply_mode(word: u64, alpha: usize, create: bool) -> Option<(u64, f64)> {
    let bit = 1u64 << alpha;
    let occupied = word & bit != 0;
    if occupied == create {
        return None;
    }
    let below = (word & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((word ^ bit, sign))
}

impl FermionBasis {
    /// Number of modes per species (`N`).
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn word(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn index_of(&self, word: u64) -> usize {
        // words are exactly 0..4^N in ascending order
        debug_assert_eq!(self.states[word as usize], word);
        word as usize
    }

    pub fn n_fermions(&self, word: u64) -> u32 {
        (word & ((1u64 << self.modes) - 1)).count_ones()
    }

    pub fn n_antifermions(&self, word: u64) -> u32 {
        let upper = (word >> self.modes) & ((1u64 << self.modes) - 1);
        self.modes as u32 - upper.count_ones()
    }

    pub fn baryon_number(&self, word: u64) -> i32 {
        baryon_of(self.modes, word)
    }

    pub fn sectors(&self) -> &BTreeMap<i32, Vec<usize>> {
        &self.sectors
    }

    /// Basis indices of the baryon-`b` sector, in ascending word order.
    pub fn sector(&self, b: i32) -> Result<&[usize]> {
        self.sectors
            .get(&b)
            .map(Vec::as_slice)
            .ok_or(Error::SectorOutOfRange { b, n: self.modes })
    }

    pub fn fock_vacuum_word(&self) -> u64 {
        ((1u64 << self.modes) - 1) << self.modes
    }

    pub fn fock_vacuum(&self) -> Vec<Complex64> {
        self.unit_vector(self.index_of(self.fock_vacuum_word()))
    }

    fn unit_vector(&self, index: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[index] = Complex64::new(1.0, 0.0);
        v
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.modes {
            return Err(Error::IndexOutOfRange {
                what: "mode",
                index: i,
                max: self.modes,
            });
        }
        Ok(())
    }

    /// `A_alpha` or `A_alpha^dagger` as a matrix; `alpha` is one-based, `1..=2N`.
    pub fn a_mode_operator(&self, alpha: usize, create: bool) -> Result<OperatorMatrix> {
        if alpha == 0 || alpha > 2 * self.modes {
            return Err(Error::IndexOutOfRange {
                what: "A-mode",
                index: alpha,
                max: 2 * self.modes,
            });
        }
        let t = self.states.iter().enumerate().filter_map(|(col, &w)| {
            apply_mode(w, alpha - 1, create)
                .map(|(w2, s)| (self.index_of(w2), col, Complex64::new(s, 0.0)))
        });
        Ok(OperatorMatrix::from_triplets(self.dim(), t))
    }

    /// Ladder operator for fermion or antifermion mode `i` (one-based).
    pub fn mode_operator(&self, kind: ModeKind, i: usize) -> Result<OperatorMatrix> {
        self.check_mode(i)?;
        let n = self.modes;
        let (alpha, create) = match kind {
            ModeKind::FermionCreate => (i, true),
            ModeKind::FermionAnnihilate => (i, false),
            ModeKind::AntifermionCreate => (i + n, false),
            ModeKind::AntifermionAnnihilate => (i + n, true),
        };
        self.a_mode_operator(alpha, create)
    }

    /// `A(X) = sum_{alpha,beta} X_{alpha beta} A_alpha^dagger A_beta`, with the
    /// antifermion pieces left in `b b^dagger` order.
    pub fn bilinear(&self, x: &CouplingMatrix) -> Result<OperatorMatrix> {
        let n2 = 2 * self.modes;
        if x.dim() != n2 {
            return Err(Error::DimensionMismatch {
                context: "bilinear",
                expected: n2,
                found: x.dim(),
            });
        }
        let mut t = Vec::new();
        for (col, &w) in self.states.iter().enumerate() {
            for beta in 0..n2 {
                let Some((w1, s1)) = apply_mode(w, beta, false) else {
                    continue;
                };
                for alpha in 0..n2 {
                    let coeff = x.entries[(alpha, beta)];
                    if coeff == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    if let Some((w2, s2)) = apply_mode(w1, alpha, true) {
                        t.push((self.index_of(w2), col, coeff * (s1 * s2)));
                    }
                }
            }
        }
        let hermitian = x.hermiticity_defect() == 0.0;
        Ok(OperatorMatrix::from_triplets(self.dim(), t).with_hermitian_flag(hermitian))
    }

    /// Diagonal `B = A(I) - N`, eigenvalue `n_fermion - n_antifermion`.
    pub fn baryon_operator(&self) -> OperatorMatrix {
        let d: Vec<f64> = self
            .states
            .iter()
            .map(|&w| self.baryon_number(w) as f64)
            .collect();
        OperatorMatrix::from_real_diagonal(&d)
    }

    /// Orthogonal projector onto the baryon-`b` eigenspace.
    pub fn sector_projector(&self, b: i32) -> Result<OperatorMatrix> {
        if b.unsigned_abs() as usize > self.modes {
            return Err(Error::SectorOutOfRange { b, n: self.modes });
        }
        let mut d = vec![0.0; self.dim()];
        for &i in self.sector(b)? {
            d[i] = 1.0;
        }
        Ok(OperatorMatrix::from_real_diagonal(&d))
    }

    /// The cyclic vector of sector `b`: `a_1^dagger..a_b^dagger |0_F>` for
    /// `b >= 0`, `b_1^dagger..b_|b|^dagger |0_F>` for `b < 0`.
    pub fn cyclic_vector(&self, b: i32) -> Result<Vec<Complex64>> {
        if b.unsigned_abs() as usize > self.modes {
            return Err(Error::SectorOutOfRange { b, n: self.modes });
        }
        let kind = if b >= 0 {
            ModeKind::FermionCreate
        } else {
            ModeKind::AntifermionCreate
        };
        let mut v = self.fock_vacuum();
        // apply the highest index first so that the leftmost operator is mode 1
        for i in (1..=b.unsigned_abs() as usize).rev() {
            v = self.mode_operator(kind, i)?.apply(&v);
        }
        Ok(v)
    }
}

/// Square `2N x 2N` coefficient matrix `X` of a bilinear `A(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: DMatrix<Complex64>,
}

impl CouplingMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || !entries.nrows().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "coupling matrix must be square with even dimension, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn scalar(dim: usize, s: Complex64) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim) * s,
        }
    }

    /// `diag(d_1..d_2N)`.
    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.entries[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `[X, X^dagger]`.
    pub fn normality_defect(&self) -> f64 {
        frobenius(&self.commutator(&self.adjoint()).entries)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        self.normality_defect() <= tol
    }
}

pub(crate) fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize) -> FermionBasis {
        build_basis(n, DEFAULT_MAX_FERMION_STATES).unwrap()
    }

    fn binomial(n: usize, k: i64) -> usize {
        if k < 0 || k as usize > n {
            return 0;
        }
        let k = k as usize;
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    }

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn empty_mode_set_is_vacuum_only() {
        let b = basis(0);
        assert_eq!(b.dim(), 1);
        assert_eq!(b.sector(0).unwrap(), &[0]);
    }

    #[test]
    fn sector_dimensions_match_enumeration() {
        let b = basis(1);
        assert_eq!(b.dim(), 4);
        assert_eq!(b.sector(-1).unwrap().len(), 1);
        assert_eq!(b.sector(0).unwrap().len(), 2);
        assert_eq!(b.sector(1).unwrap().len(), 1);

        for n in 1..=4usize {
            let b = basis(n);
            for (&q, states) in b.sectors() {
                // k fermions and k - q antifermions
                let formula: usize = (0..=n as i64)
                    .map(|k| binomial(n, k) * binomial(n, k - q as i64))
                    .sum();
                assert_eq!(states.len(), formula, "N={n}, b={q}");
            }
            assert_eq!(b.sector(0).unwrap().len(), binomial(2 * n, n as i64));
        }
        assert_eq!(basis(2).sector(0).unwrap().len(), 6);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(build_basis(3, 63), Err(Error::Capacity { .. })));
        assert!(build_basis(3, 64).is_ok());
    }

    #[test]
    fn annihilators_kill_fock_vacuum() {
        let b = basis(2);
        let vac = b.fock_vacuum();
        for i in 1..=2 {
            for kind in [ModeKind::FermionAnnihilate, ModeKind::AntifermionAnnihilate] {
                let out = b.mode_operator(kind, i).unwrap().apply(&vac);
                assert!(out.iter().all(|z| z.norm() == 0.0));
            }
        }
    }

    #[test]
    fn creation_operators_anticommute_on_vacuum() {
        let b = basis(2);
        let vac = b.fock_vacuum();
        let a1 = b.mode_operator(ModeKind::FermionCreate, 1).unwrap();
        let a2 = b.mode_operator(ModeKind::FermionCreate, 2).unwrap();
        let s12 = a1.apply(&a2.apply(&vac));
        let s21 = a2.apply(&a1.apply(&vac));
        assert!(s12.iter().any(|z| z.norm() > 0.5));
        for (x, y) in s12.iter().zip(&s21) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn a_modes_satisfy_car() {
        let b = basis(2);
        let id = OperatorMatrix::identity(b.dim());
        for alpha in 1..=4 {
            for beta in 1..=4 {
                let a = b.a_mode_operator(alpha, false).unwrap();
                let bd = b.a_mode_operator(beta, true).unwrap();
                let bb = b.a_mode_operator(beta, false).unwrap();
                let expect = if alpha == beta { id.clone() } else { OperatorMatrix::zero(b.dim()) };
                assert_eq!(a.anticommutator(&bd).max_abs_diff(&expect), 0.0);
                assert_eq!(a.anticommutator(&bb).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn mode_index_is_checked() {
        let b = basis(2);
        assert!(b.mode_operator(ModeKind::FermionCreate, 0).is_err());
        assert!(b.mode_operator(ModeKind::FermionCreate, 3).is_err());
    }

    #[test]
    fn identity_bilinear_counts_occupations() {
        let b = basis(2);
        let op = b.bilinear(&CouplingMatrix::identity(4)).unwrap();
        for (i, &w) in b.states().iter().enumerate() {
            let expect = b.n_fermions(w) as f64 + 2.0 - b.n_antifermions(w) as f64;
            assert_eq!(op.get(i, i), Complex64::new(expect, 0.0));
        }
        assert_eq!(op.nnz(), b.dim() - 1); // the all-empty word has eigenvalue 0
    }

    #[test]
    fn elementary_bilinear_is_pair_creation() {
        let b = basis(1);
        let mut x = CouplingMatrix::zeros(2);
        x.entries_mut()[(0, 1)] = c1();
        let op = b.bilinear(&x).unwrap();
        let pair = b
            .mode_operator(ModeKind::FermionCreate, 1)
            .unwrap()
            .matmul(&b.mode_operator(ModeKind::AntifermionCreate, 1).unwrap());
        assert_eq!(op.max_abs_diff(&pair), 0.0);
    }

    #[test]
    fn bilinear_dimension_mismatch() {
        let b = basis(2);
        assert!(matches!(
            b.bilinear(&CouplingMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn baryon_eigenvalues() {
        let n = 3;
        let b = basis(n);
        let bop = b.baryon_operator();
        let vac = b.fock_vacuum();
        assert!(bop.apply(&vac).iter().all(|z| z.norm() == 0.0));
        for i in 1..=n {
            let one = b.mode_operator(ModeKind::FermionCreate, i).unwrap().apply(&vac);
            assert_eq!(bop.apply(&one), one);
        }
        let filled = b.cyclic_vector(n as i32).unwrap();
        let scaled: Vec<_> = filled.iter().map(|z| z * n as f64).collect();
        assert_eq!(bop.apply(&filled), scaled);
        // B = A(I) - N
        let shifted = b
            .bilinear(&CouplingMatrix::identity(2 * n))
            .unwrap()
            .sub(&OperatorMatrix::identity(b.dim()).scale_real(n as f64));
        assert_eq!(shifted.max_abs_diff(&bop), 0.0);
    }

    #[test]
    fn projectors_are_complete_and_idempotent() {
        let b = basis(2);
        let mut sum = OperatorMatrix::zero(b.dim());
        for q in -2..=2 {
            let p = b.sector_projector(q).unwrap();
            assert_eq!(p.matmul(&p).max_abs_diff(&p), 0.0);
            assert_eq!(p.adjoint().max_abs_diff(&p), 0.0);
            sum = sum.add(&p);
        }
        assert_eq!(sum.max_abs_diff(&OperatorMatrix::identity(b.dim())), 0.0);
        let rank: f64 = b.sector_projector(1).unwrap().diagonal().iter().map(|z| z.re).sum();
        assert_eq!(rank, 4.0);
        assert!(b.sector_projector(3).is_err());
    }

    #[test]
    fn worked_commutator_holds() {
        // [b_i a_j, a_k^dagger b_l^dagger] = b_i b_l^dagger d_jk - a_k^dagger a_j d_il
        let b = basis(2);
        let op = |k, i| b.mode_operator(k, i).unwrap();
        use ModeKind::*;
        for i in 1..=2 {
            for j in 1..=2 {
                for k in 1..=2 {
                    for l in 1..=2 {
                        let lower = op(AntifermionAnnihilate, i).matmul(&op(FermionAnnihilate, j));
                        let raise = op(FermionCreate, k).matmul(&op(AntifermionCreate, l));
                        let lhs = lower.commutator(&raise);
                        let mut rhs = OperatorMatrix::zero(b.dim());
                        if j == k {
                            rhs = rhs.add(&op(AntifermionAnnihilate, i).matmul(&op(AntifermionCreate, l)));
                        }
                        if i == l {
                            rhs = rhs.sub(&op(FermionCreate, k).matmul(&op(FermionAnnihilate, j)));
                        }
                        assert_eq!(lhs.max_abs_diff(&rhs), 0.0, "i={i} j={j} k={k} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn lowering_annihilates_cyclic_vectors() {
        let b = basis(3);
        use ModeKind::*;
        for q in 0..=3 {
            let v = b.cyclic_vector(q).unwrap();
            assert!(v.iter().any(|z| z.norm() > 0.5));
            assert_eq!(b.baryon_operator().apply(&v), v.iter().map(|z| z * q as f64).collect::<Vec<_>>());
            for i in 1..=3 {
                for j in 1..=3 {
                    let ba = b
                        .mode_operator(AntifermionAnnihilate, i)
                        .unwrap()
                        .matmul(&b.mode_operator(FermionAnnihilate, j).unwrap());
                    assert!(ba.apply(&v).iter().all(|z| z.norm() == 0.0));
                }
            }
        }
    }
}
