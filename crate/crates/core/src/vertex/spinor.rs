//! Dirac spinors in the Dirac representation.
//!
//! Rest spinors are `(χ_σ, 0)` for particles and `(0, χ_σ)` for
//! antiparticles; moving spinors are obtained with the rotationless boost
//! `B(v)`. Normalization: `ū u = 1`, `v̄ v = -1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Spinor = [Complex64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinorKind {
    Particle,
    Antiparticle,
}

pub const UNIT_VELOCITY_TOLERANCE: f64 = 1e-12;

pub fn minkowski_dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Checks `|v·v - 1| <= 1e-12` and `v0 > 0`.
pub fn check_unit_velocity(v: &[f64; 4], index: usize) -> Result<()> {
    let defect = minkowski_dot(v, v) - 1.0;
    if defect.abs() > UNIT_VELOCITY_TOLERANCE || !(v[0] > 0.0) {
        return Err(Error::InvalidVelocity { index, defect });
    }
    Ok(())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn dirac_spinor(v: &[f64; 4], spin: Spin, kind: SpinorKind) -> Result<Spinor> {
    check_unit_velocity(v, 0)?;
    let chi = match spin {
        Spin::Up => [c(1.0), c(0.0)],
        Spin::Down => [c(0.0), c(1.0)],
    };
    let ch = libm::sqrt((v[0] + 1.0) / 2.0);
    let k = 1.0 / libm::sqrt(2.0 * (v[0] + 1.0));
    // σ·v_vec / sqrt(2(v0+1)) applied to χ
    let (vx, vy, vz) = (v[1] * k, v[2] * k, v[3] * k);
    let sigma_chi = [
        chi[0] * vz + chi[1] * Complex64::new(vx, -vy),
        chi[0] * Complex64::new(vx, vy) - chi[1] * vz,
    ];
    Ok(match kind {
        SpinorKind::Particle => [chi[0] * ch, chi[1] * ch, sigma_chi[0], sigma_chi[1]],
        SpinorKind::Antiparticle => [sigma_chi[0], sigma_chi[1], chi[0] * ch, chi[1] * ch],
    })
}

/// `ψ̄ φ = ψ† γ0 φ`.
pub fn bar_product(psi: &Spinor, phi: &Spinor) -> Complex64 {
    psi[0].conj() * phi[0] + psi[1].conj() * phi[1] - psi[2].conj() * phi[2] - psi[3].conj() * phi[3]
}

/// `ψ̄ γ5 φ` with `γ5 = [[0, I], [I, 0]]`, so `γ0 γ5 = [[0, I], [-I, 0]]`.
pub fn pseudoscalar_bilinear(psi: &Spinor, phi: &Spinor) -> Complex64 {
    psi[0].conj() * phi[2] + psi[1].conj() * phi[3] - psi[2].conj() * phi[0] - psi[3].conj() * phi[1]
}
