#![allow(dead_code)]

use nalgebra::DMatrix;
use pointform_core::fermion::CouplingMatrix;
use pointform_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| random_complex(rng))
}

/// Unitary Q factor of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    random_matrix(rng, dim).qr().q()
}

/// `U D^mu_k U†` for a shared random unitary: normal and mutually commuting.
pub fn commuting_vertices(rng: &mut ChaCha8Rng, fermion_modes: usize, boson_modes: usize) -> Vec<[CouplingMatrix; 4]> {
    let dim = 2 * fermion_modes;
    let u = random_unitary(rng, dim);
    (0..boson_modes)
        .map(|_| {
            core::array::from_fn(|_| {
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| random_complex(rng)));
                CouplingMatrix::new(&u * d * u.adjoint()).unwrap()
            })
        })
        .collect()
}

/// `r^mu_k U D_k U†` with real `r^mu_k`: one shared phase pattern per mode.
pub fn aligned_vertices(rng: &mut ChaCha8Rng, fermion_modes: usize, boson_modes: usize) -> Vec<[CouplingMatrix; 4]> {
    let dim = 2 * fermion_modes;
    let u = random_unitary(rng, dim);
    (0..boson_modes)
        .map(|_| {
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| random_complex(rng)));
            let x = &u * d * u.adjoint();
            core::array::from_fn(|_| {
                let r: f64 = rng.random_range(-1.0..1.0);
                CouplingMatrix::new(&x * Complex64::new(r, 0.0)).unwrap()
            })
        })
        .collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
