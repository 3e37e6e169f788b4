//! The `fermion ⊗ boson` product space, optionally restricted to one baryon
//! sector. Product index = `fermion_position * boson_dim + boson_index`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::boson::BosonBasis;
use crate::error::{Error, Result};
use crate::fermion::FermionBasis;
use crate::sparse::OperatorMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    fermion: FermionBasis,
    boson: BosonBasis,
    sector: Option<i32>,
    fermion_states: Vec<usize>,
}

impl ProductSpace {
    /// Full product space, or the baryon-`sector` slice of it. Every bilinear
    /// commutes with `B`, so restricting to a sector is exact.
    pub fn new(fermion: FermionBasis, boson: BosonBasis, sector: Option<i32>) -> Result<Self> {
        let fermion_states = match sector {
            Some(b) => {
                if b.unsigned_abs() as usize > fermion.modes() {
                    return Err(Error::SectorOutOfRange {
                        b,
                        n: fermion.modes(),
                    });
                }
                fermion.sector(b)?.to_vec()
            }
            None => (0..fermion.dim()).collect(),
        };
        Ok(Self {
            fermion,
            boson,
            sector,
            fermion_states,
        })
    }

    pub fn fermion(&self) -> &FermionBasis {
        &self.fermion
    }

    pub fn boson(&self) -> &BosonBasis {
        &self.boson
    }

    pub fn sector(&self) -> Option<i32> {
        self.sector
    }

    /// Fermion basis indices spanning the fermionic factor, in order.
    pub fn fermion_states(&self) -> &[usize] {
        &self.fermion_states
    }

    pub fn fermion_dim(&self) -> usize {
        self.fermion_states.len()
    }

    pub fn dim(&self) -> usize {
        self.fermion_dim() * self.boson.dim()
    }

    pub fn index(&self, fermion_position: usize, boson_index: usize) -> usize {
        fermion_position * self.boson.dim() + boson_index
    }

    /// `(fermion basis index, boson occupations)` of a product index.
    pub fn split(&self, index: usize) -> (usize, Vec<usize>) {
        let bd = self.boson.dim();
        (
            self.fermion_states[index / bd],
            self.boson.occupations(index % bd),
        )
    }

    /// `F ⊗ G` with `F` on the full fermion basis, restricted to this space.
    pub fn product(&self, fermion_op: &OperatorMatrix, boson_op: &OperatorMatrix) -> OperatorMatrix {
        fermion_op.restrict(&self.fermion_states).kron(boson_op)
    }

    pub fn lift_fermion(&self, fermion_op: &OperatorMatrix) -> OperatorMatrix {
        self.product(fermion_op, &OperatorMatrix::identity(self.boson.dim()))
    }

    pub fn lift_boson(&self, boson_op: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::identity(self.fermion_dim()).kron(boson_op)
    }

    /// Product indices whose boson part lies in `SafeSubspace(margin)`.
    pub fn safe_indices(&self, margin: usize) -> Vec<usize> {
        self.boson
            .safe_subspace(margin)
            .lift(self.fermion_dim(), self.boson.dim())
    }

    /// `true` for product states with some boson occupation at the cutoff.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let b: Vec<bool> = (0..self.boson.dim()).map(|i| self.boson.is_boundary(i)).collect();
        (0..self.dim()).map(|i| b[i % self.boson.dim()]).collect()
    }

    /// Embeds a full-basis fermion vector and a boson vector as `f ⊗ g`.
    pub fn tensor(&self, fermion_vec: &[Complex64], boson_vec: &[Complex64]) -> Vec<Complex64> {
        self.fermion_states
            .iter()
            .flat_map(|&f| boson_vec.iter().map(move |&g| fermion_vec[f] * g))
            .collect()
    }
}
