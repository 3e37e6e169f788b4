//! Four-momentum operators on `fermion ⊗ boson`.
//!
//! Everything is dimensionless (`m = 1`); `mass_scale` only multiplies reported
//! eigenvalues. The free part is assembled in normal-ordered form
//! `sum_i v^mu_i (a†a + b†b) + κ sum_k v^mu_k c†c`, and the interaction is
//! `α sum_k (A(X^mu_k) ⊗ c_k + A(X^mu_k)† ⊗ c_k†)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::boson::Ladder;
use crate::error::{Error, Result};
use crate::fermion::{CouplingMatrix, FermionBasis};
use crate::space::ProductSpace;
use crate::sparse::OperatorMatrix;
use crate::vertex::spinor::check_unit_velocity;
use crate::vertex::{FourVector, VertexSet};

/// A mode is either a unit four-velocity or a bare energy `e = v0` at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kinematics {
    Velocity(FourVector),
    Energy(f64),
}

impl Kinematics {
    pub fn four_vector(&self) -> FourVector {
        match *self {
            Kinematics::Velocity(v) => v,
            Kinematics::Energy(e) => [e, 0.0, 0.0, 0.0],
        }
    }

    pub fn energy(&self) -> f64 {
        self.four_vector()[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub fermion_modes: Vec<Kinematics>,
    pub boson_modes: Vec<Kinematics>,
    pub kappa: f64,
    pub alpha: f64,
    /// Reporting-only scale; internal arithmetic uses `m = 1`.
    pub mass_scale: f64,
    pub n_max: usize,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.fermion_modes.iter().chain(&self.boson_modes).enumerate() {
            if let Kinematics::Velocity(v) = m {
                check_unit_velocity(v, i + 1)?;
            }
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidInput("alpha must be finite".into()));
        }
        if !(self.mass_scale > 0.0) {
            return Err(Error::InvalidInput("mass_scale must be positive".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn boson_vectors(&self) -> Vec<FourVector> {
        self.boson_modes.iter().map(Kinematics::four_vector).collect()
    }
}

/// The four components `P^0..P^3` on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct FourOperator {
    pub components: [OperatorMatrix; 4],
}

impl FourOperator {
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            components: core::array::from_fn(|mu| self.components[mu].add(&other.components[mu])),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.components.iter().all(OperatorMatrix::is_hermitian)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeMomentum {
    pub operator: FourOperator,
    /// `sum_i v^mu_i`, the constant with `A(E^mu) + const = fermionic free part`.
    pub bilinear_constant: [f64; 4],
}

fn check_counts(model: &ModelConfig, space: &ProductSpace) -> Result<()> {
    if model.fermion_modes.len() != space.fermion().modes() {
        return Err(Error::DimensionMismatch {
            context: "fermion modes",
            expected: space.fermion().modes(),
            found: model.fermion_modes.len(),
        });
    }
    if model.boson_modes.len() != space.boson().modes() {
        return Err(Error::DimensionMismatch {
            context: "boson modes",
            expected: space.boson().modes(),
            found: model.boson_modes.len(),
        });
    }
    Ok(())
}

pub fn assemble_free(model: &ModelConfig, space: &ProductSpace) -> Result<FreeMomentum> {
    check_counts(model, space)?;
    let fb = space.fermion();
    let bb = space.boson();
    let fv: Vec<FourVector> = model.fermion_modes.iter().map(Kinematics::four_vector).collect();
    let bv = model.boson_vectors();

    let components = core::array::from_fn(|mu| {
        let fdiag: Vec<f64> = space
            .fermion_states()
            .iter()
            .map(|&s| {
                let w = fb.word(s);
                (0..fb.modes())
                    .map(|i| {
                        let nf = (w >> i) & 1;
                        let nb = 1 - ((w >> (i + fb.modes())) & 1);
                        fv[i][mu] * (nf + nb) as f64
                    })
                    .sum()
            })
            .collect();
        let bdiag: Vec<f64> = (0..bb.dim())
            .map(|s| {
                bb.occupations(s)
                    .iter()
                    .zip(&bv)
                    .map(|(&n, v)| model.kappa * v[mu] * n as f64)
                    .sum()
            })
            .collect();
        let diag: Vec<f64> = fdiag
            .iter()
            .flat_map(|&f| bdiag.iter().map(move |&b| f + b))
            .collect();
        OperatorMatrix::from_real_diagonal(&diag)
    });
    let bilinear_constant = core::array::from_fn(|mu| fv.iter().map(|v| v[mu]).sum());
    Ok(FreeMomentum {
        operator: FourOperator { components },
        bilinear_constant,
    })
}

/// `E^mu = diag(v^mu_1..v^mu_N, -v^mu_1..-v^mu_N)`.
pub fn free_coupling_matrix(model: &ModelConfig, mu: usize) -> CouplingMatrix {
    let v: Vec<f64> = model.fermion_modes.iter().map(|m| m.four_vector()[mu]).collect();
    let d: Vec<Complex64> = v
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(v.iter().map(|&x| Complex64::new(-x, 0.0)))
        .collect();
    CouplingMatrix::diagonal(&d)
}

/// `A(E^mu)` on the full fermion Fock space.
pub fn free_fermion_bilinear(model: &ModelConfig, fb: &FermionBasis) -> Result<FourOperator> {
    let mut components: [OperatorMatrix; 4] = core::array::from_fn(|_| OperatorMatrix::zero(fb.dim()));
    for (mu, c) in components.iter_mut().enumerate() {
        *c = fb.bilinear(&free_coupling_matrix(model, mu))?;
    }
    Ok(FourOperator { components })
}

fn check_vertices(vertices: &VertexSet, space: &ProductSpace) -> Result<()> {
    if vertices.boson_modes() != space.boson().modes() {
        return Err(Error::DimensionMismatch {
            context: "vertex boson modes",
            expected: space.boson().modes(),
            found: vertices.boson_modes(),
        });
    }
    if vertices.dim() != 2 * space.fermion().modes() {
        return Err(Error::DimensionMismatch {
            context: "vertex matrix dimension",
            expected: 2 * space.fermion().modes(),
            found: vertices.dim(),
        });
    }
    Ok(())
}

pub fn assemble_interaction(
    model: &ModelConfig,
    vertices: &VertexSet,
    space: &ProductSpace,
) -> Result<FourOperator> {
    check_counts(model, space)?;
    check_vertices(vertices, space)?;
    let fb = space.fermion();
    let bb = space.boson();
    let alpha = Complex64::new(model.alpha, 0.0);
    let mut components: [OperatorMatrix; 4] = core::array::from_fn(|_| OperatorMatrix::zero(space.dim()));
    for k in 1..=bb.modes() {
        let c = bb.ladder(Ladder::Annihilate, k)?;
        for (mu, comp) in components.iter_mut().enumerate() {
            let a = fb.bilinear(vertices.matrix(k, mu))?;
            let lowering = space.product(&a, &c).scale(alpha);
            *comp = comp.add(&lowering).add(&lowering.adjoint());
        }
    }
    for comp in components.iter_mut() {
        *comp = core::mem::replace(comp, OperatorMatrix::zero(0)).assert_hermitian(0.0)?;
    }
    Ok(FourOperator { components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumParts {
    pub free: FreeMomentum,
    pub interaction: FourOperator,
    pub total: FourOperator,
}

pub fn assemble_total(model: &ModelConfig, vertices: &VertexSet, space: &ProductSpace) -> Result<MomentumParts> {
    model.validate()?;
    let free = assemble_free(model, space)?;
    let interaction = assemble_interaction(model, vertices, space)?;
    let total = free.operator.add(&interaction);
    Ok(MomentumParts {
        free,
        interaction,
        total,
    })
}

/// Projected commutator norms for one pair `mu < nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorEntry {
    pub mu: usize,
    pub nu: usize,
    pub free_free: f64,
    pub int_int: f64,
    /// `[F^mu, I^nu] + [I^mu, F^nu]`; reported, not asserted.
    pub mixed: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorReport {
    pub margin: usize,
    pub entries: Vec<CommutatorEntry>,
}

impl CommutatorReport {
    pub fn max_free_free(&self) -> f64 {
        self.entries.iter().map(|e| e.free_free).fold(0.0, f64::max)
    }

    pub fn max_int_int(&self) -> f64 {
        self.entries.iter().map(|e| e.int_int).fold(0.0, f64::max)
    }

    pub fn max_mixed(&self) -> f64 {
        self.entries.iter().map(|e| e.mixed).fold(0.0, f64::max)
    }
}

/// Max-entry norms of `[P^mu, P^nu]` on the boson `SafeSubspace(margin)`.
pub fn verify_momentum_commutators(parts: &MomentumParts, space: &ProductSpace, margin: usize) -> CommutatorReport {
    let safe = space.safe_indices(margin);
    let f = &parts.free.operator.components;
    let i = &parts.interaction.components;
    let t = &parts.total.components;
    let mut entries = Vec::with_capacity(6);
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let mixed = f[mu].commutator(&i[nu]).add(&i[mu].commutator(&f[nu]));
            entries.push(CommutatorEntry {
                mu,
                nu,
                free_free: f[mu].commutator(&f[nu]).max_abs_on(&safe),
                int_int: i[mu].commutator(&i[nu]).max_abs_on(&safe),
                mixed: mixed.max_abs_on(&safe),
                total: t[mu].commutator(&t[nu]).max_abs_on(&safe),
            });
        }
    }
    CommutatorReport { margin, entries }
}

/// `κ v0_k` per boson mode, refusing massless modes.
fn mode_frequencies(model: &ModelConfig) -> Result<Vec<f64>> {
    model
        .boson_modes
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let w = model.kappa * m.energy();
            if w > 0.0 {
                Ok(w)
            } else {
                Err(Error::MasslessMode { mode: k + 1, value: w })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMode {
    /// `C_k = c_k + α A(X^0_k)† / (κ v0_k)`.
    pub annihilate: OperatorMatrix,
    pub create: OperatorMatrix,
}

/// The shifted ladder operators of the Heisenberg automorphism.
pub fn shifted_modes(model: &ModelConfig, vertices: &VertexSet, space: &ProductSpace) -> Result<Vec<ShiftedMode>> {
    check_counts(model, space)?;
    check_vertices(vertices, space)?;
    let freq = mode_frequencies(model)?;
    let fb = space.fermion();
    let bb = space.boson();
    (1..=bb.modes())
        .map(|k| {
            let a = fb.bilinear(vertices.matrix(k, 0))?;
            let shift = space.lift_fermion(&a.adjoint()).scale_real(model.alpha / freq[k - 1]);
            let annihilate = space.lift_boson(&bb.ladder(Ladder::Annihilate, k)?).add(&shift);
            let create = annihilate.adjoint();
            Ok(ShiftedMode { annihilate, create })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedHamiltonian {
    pub operator: OperatorMatrix,
    /// `-α² sum_k A(X^0_k) A(X^0_k)† / (κ v0_k)`, lifted to the product space.
    pub shift_term: OperatorMatrix,
}

/// `P^0_F(fr) - α² sum_k A A† / (κ v0_k) + sum_k κ v0_k C_k† C_k`.
pub fn transformed_hamiltonian(
    model: &ModelConfig,
    vertices: &VertexSet,
    space: &ProductSpace,
) -> Result<TransformedHamiltonian> {
    let shifted = shifted_modes(model, vertices, space)?;
    let freq = mode_frequencies(model)?;
    let fb = space.fermion();

    let mut shift_term = OperatorMatrix::zero(space.dim());
    let mut boson_term = OperatorMatrix::zero(space.dim());
    for (k, sm) in shifted.iter().enumerate() {
        let a = fb.bilinear(vertices.matrix(k + 1, 0))?;
        let aad = space.lift_fermion(&a.matmul(&a.adjoint()));
        shift_term = shift_term.sub(&aad.scale_real(model.alpha * model.alpha / freq[k]));
        boson_term = boson_term.add(&sm.create.matmul(&sm.annihilate).scale_real(freq[k]));
    }

    // fermionic part of the free P^0 alone
    let mut fermion_only = model.clone();
    fermion_only.kappa = 0.0;
    let free_fermion = assemble_free(&fermion_only, space)?.operator.components[0].clone();

    let operator = free_fermion.add(&shift_term).add(&boson_term);
    let tol = 1e-12 * (1.0 + operator.max_abs());
    let operator = operator.assert_hermitian(tol)?;
    Ok(TransformedHamiltonian {
        operator,
        shift_term: shift_term.assert_hermitian(1e-12 * (1.0 + model.alpha * model.alpha))?,
    })
}
