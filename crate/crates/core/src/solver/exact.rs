//! The scalar-vertex model in the baryon-`N` sector, solved in closed form.
//!
//! With `A(X^0_k) = Y_k` on the filled state the Hamiltonian is a sum of
//! linearly driven oscillators, `λ_n = Σ_i e_i + Σ_k (n_k ε_k − α²|Y_k|²/ε_k)`.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use super::roots::brent;
use super::{diagonalize, Method};
use crate::boson::{build_boson_basis, DEFAULT_MAX_BOSON_STATES};
use crate::error::{Error, Result};
use crate::fermion::{build_basis, DEFAULT_MAX_FERMION_STATES};
use crate::momentum::{assemble_total, Kinematics, ModelConfig};
use crate::space::ProductSpace;
use crate::sparse::{norm, OperatorMatrix};
use crate::vertex::VertexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactModel {
    fermion_energies: Vec<f64>,
    boson_energies: Vec<f64>,
    couplings: Vec<Complex64>,
}

impl ExactModel {
    /// `N` fermion energies, `K` boson energies `ε_k = κ v0_k` and `K` couplings.
    pub fn new(fermion_energies: Vec<f64>, boson_energies: Vec<f64>, couplings: Vec<Complex64>) -> Result<Self> {
        for (i, &e) in fermion_energies.iter().chain(&boson_energies).enumerate() {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::NonPositiveEnergy { index: i + 1, value: e });
            }
        }
        if couplings.len() != boson_energies.len() {
            return Err(Error::DimensionMismatch {
                context: "couplings per boson mode",
                expected: boson_energies.len(),
                found: couplings.len(),
            });
        }
        Ok(Self {
            fermion_energies,
            boson_energies,
            couplings,
        })
    }

    /// One boson mode per fermion mode, sharing its energy.
    pub fn paired(energies: Vec<f64>, couplings: Vec<Complex64>) -> Result<Self> {
        Self::new(energies.clone(), energies, couplings)
    }

    pub fn fermion_energies(&self) -> &[f64] {
        &self.fermion_energies
    }

    pub fn boson_energies(&self) -> &[f64] {
        &self.boson_energies
    }

    pub fn couplings(&self) -> &[Complex64] {
        &self.couplings
    }

    pub fn fermion_modes(&self) -> usize {
        self.fermion_energies.len()
    }

    pub fn boson_modes(&self) -> usize {
        self.boson_energies.len()
    }

    fn binding(&self) -> f64 {
        self.couplings
            .iter()
            .zip(&self.boson_energies)
            .map(|(y, e)| y.norm_sqr() / e)
            .sum()
    }

    pub fn level(&self, alpha: f64, occupations: &[usize]) -> Result<f64> {
        if occupations.len() != self.boson_modes() {
            return Err(Error::DimensionMismatch {
                context: "occupation multi-index",
                expected: self.boson_modes(),
                found: occupations.len(),
            });
        }
        let base: f64 = self.fermion_energies.iter().sum();
        let osc: f64 = occupations
            .iter()
            .zip(&self.boson_energies)
            .map(|(&n, &e)| n as f64 * e)
            .sum();
        Ok(base + osc - alpha * alpha * self.binding())
    }

    /// The `count` lowest levels with their occupations, ascending.
    pub fn lowest_levels(&self, alpha: f64, count: usize) -> Vec<(f64, Vec<usize>)> {
        #[derive(PartialEq)]
        struct Item(f64, Vec<usize>);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                // min-heap on energy, then occupations
                other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
            }
        }
        let k = self.boson_modes();
        let mut out = Vec::with_capacity(count);
        let mut seen = BTreeSet::new();
        let mut heap = BinaryHeap::new();
        let zero = vec![0usize; k];
        let energy = |n: &[usize]| self.level(alpha, n).unwrap_or(f64::NAN);
        heap.push(Item(energy(&zero), zero.clone()));
        seen.insert(zero);
        while out.len() < count {
            let Some(Item(e, n)) = heap.pop() else { break };
            for m in 0..k {
                let mut next = n.clone();
                next[m] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Item(energy(&next), next));
                }
            }
            out.push((e, n));
        }
        out
    }

    /// `α*` with `α*² = Σ e_i / Σ |Y_k|²/ε_k`.
    pub fn critical_alpha(&self) -> Result<f64> {
        let b = self.binding();
        if !(b > 0.0) {
            return Err(Error::NoRoot("all couplings vanish, λ_min does not depend on α".into()));
        }
        let base: f64 = self.fermion_energies.iter().sum();
        Ok(libm::sqrt(base / b))
    }

    /// The same model as a generic configuration: rest-frame energies, `κ = 1`.
    pub fn model_config(&self, alpha: f64, n_max: usize) -> ModelConfig {
        ModelConfig {
            fermion_modes: self.fermion_energies.iter().map(|&e| Kinematics::Energy(e)).collect(),
            boson_modes: self.boson_energies.iter().map(|&e| Kinematics::Energy(e)).collect(),
            kappa: 1.0,
            alpha,
            mass_scale: 1.0,
            n_max,
        }
    }

    pub fn vertices(&self) -> Result<VertexSet> {
        let vectors: Vec<_> = self.boson_energies.iter().map(|&e| [e, 0.0, 0.0, 0.0]).collect();
        VertexSet::scalar_y(self.fermion_modes(), &self.couplings, &vectors)
    }

    /// The baryon-`N` product space with cutoff `n_max`.
    pub fn sector_space(&self, n_max: usize) -> Result<ProductSpace> {
        let n = self.fermion_modes();
        let fb = build_basis(n, DEFAULT_MAX_FERMION_STATES)?;
        let bb = build_boson_basis(self.boson_modes(), n_max, DEFAULT_MAX_BOSON_STATES)?;
        ProductSpace::new(fb, bb, Some(n as i32))
    }

    /// Assembled `P^0` on the baryon-`N` sector.
    pub fn sector_hamiltonian(&self, alpha: f64, n_max: usize) -> Result<(ProductSpace, OperatorMatrix)> {
        let pencil = SectorPencil::new(self, n_max)?;
        let h = pencil.at(alpha)?;
        Ok((pencil.space, h))
    }
}

/// `P^0(α) = F + α V` on a fixed space.
struct SectorPencil {
    space: ProductSpace,
    free: OperatorMatrix,
    interaction: OperatorMatrix,
}

impl SectorPencil {
    fn new(model: &ExactModel, n_max: usize) -> Result<Self> {
        let space = model.sector_space(n_max)?;
        let parts = assemble_total(&model.model_config(1.0, n_max), &model.vertices()?, &space)?;
        let [free, ..] = parts.free.operator.components;
        let [interaction, ..] = parts.interaction.components;
        Ok(Self {
            space,
            free,
            interaction,
        })
    }

    fn at(&self, alpha: f64) -> Result<OperatorMatrix> {
        self.free
            .add(&self.interaction.scale_real(alpha))
            .assert_hermitian(1e-12 * (1.0 + self.free.max_abs() + alpha.abs() * self.interaction.max_abs()))
    }

    fn lambda_min(&self, alpha: f64) -> Result<f64> {
        Ok(diagonalize(&self.at(alpha)?, 1, Method::Dense)?.eigenvalues[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactModelSpec {
    pub model: ExactModel,
    pub alpha: f64,
    pub occupations: Vec<usize>,
}

/// Closed-form eigenpair: `λ_n` and the displaced number state
/// `Π_k (c_k† + αY_k/ε_k)^{n_k} |β_k⟩ ⊗ a_1†..a_N†|0_F⟩`, `β_k = −αȲ_k/ε_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLevel {
    pub eigenvalue: f64,
    pub occupations: Vec<usize>,
    pub coherent_amplitudes: Vec<Complex64>,
    pub raising_shifts: Vec<Complex64>,
}

pub fn exact_sector_spectrum(spec: &ExactModelSpec) -> Result<ExactLevel> {
    let model = &spec.model;
    let eigenvalue = model.level(spec.alpha, &spec.occupations)?;
    let (coherent_amplitudes, raising_shifts) = model
        .couplings
        .iter()
        .zip(&model.boson_energies)
        .map(|(y, &e)| (-y.conj() * (spec.alpha / e), *y * (spec.alpha / e)))
        .unzip();
    Ok(ExactLevel {
        eigenvalue,
        occupations: spec.occupations.clone(),
        coherent_amplitudes,
        raising_shifts,
    })
}

impl ExactLevel {
    /// One boson mode truncated at `n_max`, normalized.
    pub fn mode_vector(&self, k: usize, n_max: usize) -> Vec<Complex64> {
        let beta = self.coherent_amplitudes[k];
        let shift = self.raising_shifts[k];
        let mut v = Vec::with_capacity(n_max + 1);
        let mut coeff = Complex64::new(1.0, 0.0);
        for n in 0..=n_max {
            if n > 0 {
                coeff = coeff * beta / libm::sqrt(n as f64);
            }
            v.push(coeff);
        }
        for _ in 0..self.occupations[k] {
            // (c† + s) with truncated c†
            let mut w: Vec<Complex64> = v.iter().map(|x| x * shift).collect();
            for n in 0..n_max {
                w[n + 1] += v[n] * libm::sqrt((n + 1) as f64);
            }
            v = w;
        }
        normalize(v)
    }

    /// The eigenvector in a baryon-`N` (or unrestricted) product space.
    pub fn eigenvector(&self, space: &ProductSpace) -> Result<Vec<Complex64>> {
        let bb = space.boson();
        if bb.modes() != self.occupations.len() {
            return Err(Error::DimensionMismatch {
                context: "boson modes",
                expected: self.occupations.len(),
                found: bb.modes(),
            });
        }
        let n = space.fermion().modes() as i32;
        if space.sector().is_some_and(|b| b != n) {
            return Err(Error::InvalidInput(format!(
                "closed-form eigenvector lives in sector {n}, space is restricted to {:?}",
                space.sector()
            )));
        }
        let modes: Vec<Vec<Complex64>> = (0..bb.modes()).map(|k| self.mode_vector(k, bb.n_max())).collect();
        let boson: Vec<Complex64> = (0..bb.dim())
            .map(|idx| {
                bb.occupations(idx)
                    .iter()
                    .zip(&modes)
                    .map(|(&occ, m)| m[occ])
                    .product()
            })
            .collect();
        let fermion = space.fermion().cyclic_vector(n)?;
        Ok(normalize(space.tensor(&fermion, &boson)))
    }
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = norm(&v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolution {
    pub alpha_closed_form: f64,
    pub alpha_root_found: f64,
    /// Ground eigenvalue of the truncated Hamiltonian at `alpha_root_found`.
    pub lambda_min_at_alpha: f64,
    pub lambda_min_at_closed_form: f64,
}

/// Positive coupling with `λ_min(α) = 0`, both in closed form and by a
/// bracketing root-find on the diagonalized sector Hamiltonian.
pub fn solve_alpha(model: &ExactModel, n_max: usize) -> Result<AlphaSolution> {
    let alpha_closed_form = model.critical_alpha()?;
    let pencil = SectorPencil::new(model, n_max)?;
    let f = |a: f64| pencil.lambda_min(a);

    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        let v = f(hi)?;
        if v < 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoRoot(format!(
                "λ_min stays non-negative up to α = {lo} at n_max = {n_max}"
            )));
        }
    }
    let alpha_root_found = brent(f, lo, hi, 1e-14, 200)?;
    Ok(AlphaSolution {
        alpha_closed_form,
        alpha_root_found,
        lambda_min_at_alpha: f(alpha_root_found)?,
        lambda_min_at_closed_form: f(alpha_closed_form)?,
    })
}
