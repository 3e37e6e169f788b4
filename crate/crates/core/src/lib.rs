//! Point-form four-momentum operators on a truncated fermion ⊗ boson Fock space.
//!
//! Fermions are encoded through the `2N` modes `A_i = a_i`, `A_{i+N} = b_i†`,
//! so every bilinear `A(X) = A†_α X_{αβ} A_β` is a finite sparse matrix and
//! `X ↦ A(X)` is a Lie algebra homomorphism. Bosons are truncated at `n_max`
//! quanta per mode; identities that only hold in the untruncated space are
//! checked on the safe subspace away from the cutoff.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod boson;
pub mod error;
pub mod fermion;
pub mod momentum;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod vertex;

pub use boson::{build_boson_basis, BosonBasis, Ladder, SafeSubspace};
pub use error::{Error, Result};
pub use fermion::{build_basis, CouplingMatrix, FermionBasis, ModeKind};
pub use momentum::{
    assemble_free, assemble_interaction, assemble_total, shifted_modes, transformed_hamiltonian,
    verify_momentum_commutators, Kinematics, ModelConfig,
};
pub use solver::{diagonalize, Method, Spectrum};
pub use space::ProductSpace;
pub use sparse::OperatorMatrix;
pub use vertex::{form_factor, pseudoscalar_vertex_set, verify_vertex_matrices, QuadratureSpec, VertexSet};

pub use nalgebra;
pub use num_complex::Complex64;
