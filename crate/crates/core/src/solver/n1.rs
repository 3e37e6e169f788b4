//! The `N = 1`, baryon-0 model
//! `H = e(a†a + b†b) + c†c + α A(σx)(c + c†)` in the Bargmann representation.
//!
//! On `f_1|0_F⟩ + f_2 a†b†|0_F⟩` the eigenvalue problem becomes
//!
//! ```text
//! (z + α) f₊' = (λ − e − αz) f₊ + e f₋
//! (z − α) f₋' = (λ − e + αz) f₋ + e f₊,      f± = f_1 ± f_2
//! ```
//!
//! Regularity at `z = −α` fixes the solution up to scale. The model is
//! invariant under `z → −z, f_2 → −f_2`, which maps solutions regular at `−α`
//! onto solutions regular at `+α`, so entire solutions are exactly those that
//! are even or odd: `f_2(0) = 0` or `f_1(0) = 0`. Both conditions are read off
//! the series about `−α` evaluated at `z = 0`, half-way to the other
//! singular point.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::roots::bisect;
use super::{diagonalize, group_levels, Level, Method, Spectrum, DEGENERACY_TOLERANCE};
use crate::boson::{build_boson_basis, DEFAULT_MAX_BOSON_STATES};
use crate::error::{Error, Result};
use crate::fermion::{build_basis, CouplingMatrix};
use crate::momentum::{assemble_total, Kinematics, ModelConfig};
use crate::space::ProductSpace;
use crate::vertex::VertexSet;

/// Relative size of the last series terms accepted as converged.
pub const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub lower: f64,
    pub upper: f64,
    pub order: usize,
    pub scan_step: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            lower: -1.0,
            upper: 6.0,
            order: 200,
            scan_step: 1e-3,
        }
    }
}

impl SeriesOptions {
    fn validate(&self) -> Result<()> {
        if self.order < 50 {
            return Err(Error::InvalidInput(alloc::format!(
                "series order must be at least 50, got {}",
                self.order
            )));
        }
        if !(self.lower < self.upper) || !(self.scan_step > 0.0) {
            return Err(Error::InvalidInput("empty search window or non-positive scan step".into()));
        }
        Ok(())
    }
}

/// Spectral functions `(G₊, G₋)` at `λ`. `G₊` vanishes on even eigenstates
/// (`f_2(0) = 0`), `G₋` on odd ones (`f_1(0) = 0`). Both are entire in `λ`;
/// the poles of the series at `λ − e + α² ∈ ℕ` are divided out. The third
/// value is the relative size of the truncated tail.
pub fn n1_spectral_functions(e: f64, alpha: f64, lambda: f64, order: usize) -> (f64, f64, f64) {
    let rho = lambda - e + alpha * alpha;
    let sigma = lambda - e - alpha * alpha;
    // rescale by (k − ρ)/(k + 1) for every k up to n_hi so no division by a
    // vanishing (k − ρ) remains
    let n_hi = if rho > 0.0 { libm::ceil(rho) as usize + 1 } else { 1 };
    let mut a: Vec<f64> = Vec::with_capacity(order + 1);
    let mut b: Vec<f64> = vec![1.0];
    for k in 0..=order {
        let prev_a = if k > 0 { a[k - 1] } else { 0.0 };
        let r = -alpha * prev_a + e * b[k];
        let kf = k as f64;
        if k <= n_hi {
            let s = (kf - rho) / (kf + 1.0);
            a.iter_mut().for_each(|x| *x *= s);
            b.iter_mut().for_each(|x| *x *= s);
            a.push(r / (kf + 1.0));
        } else {
            a.push(r / (kf - rho));
        }
        let prev_b = if k > 0 { b[k - 1] } else { 0.0 };
        let next = ((kf - sigma) * b[k] - alpha * prev_b - e * a[k]) / (2.0 * alpha * (kf + 1.0));
        b.push(next);
    }
    let mut fp = 0.0;
    let mut fm = 0.0;
    let mut scale = 0.0f64;
    let mut tail = 0.0f64;
    let mut pw = 1.0;
    for k in 0..=order {
        let (ta, tb) = (a[k] * pw, b[k] * pw);
        fp += ta;
        fm += tb;
        scale = scale.max(ta.abs()).max(tb.abs());
        if k + 5 > order {
            tail = tail.max(ta.abs()).max(tb.abs());
        }
        pw *= alpha;
    }
    let rel = if scale > 0.0 { tail / scale } else { 0.0 };
    (fp - fm, fp + fm, rel)
}

fn scan_roots(g: impl Fn(f64) -> f64, opts: &SeriesOptions) -> Result<Vec<f64>> {
    let steps = libm::ceil((opts.upper - opts.lower) / opts.scan_step) as usize;
    let xs: Vec<f64> = (0..=steps)
        .map(|i| (opts.lower + i as f64 * opts.scan_step).min(opts.upper))
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if vals[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < xs.len() && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
            roots.push(bisect(&g, xs[i], xs[i + 1], 1e-15)?);
        }
    }
    Ok(roots)
}

/// Levels of the `N = 1`, baryon-0 model inside `[lower, upper]`.
pub fn n1_series_spectrum(e: f64, alpha: f64, opts: &SeriesOptions) -> Result<Vec<Level>> {
    opts.validate()?;
    let mut values = if alpha == 0.0 {
        // decoupled: {n} ∪ {2e + n}
        let mut v = Vec::new();
        for base in [0.0, 2.0 * e] {
            let mut n = libm::ceil(opts.lower - base).max(0.0);
            while base + n <= opts.upper {
                v.push(base + n);
                n += 1.0;
            }
        }
        v
    } else {
        let even = scan_roots(|l| n1_spectral_functions(e, alpha, l, opts.order).0, opts)?;
        let odd = scan_roots(|l| n1_spectral_functions(e, alpha, l, opts.order).1, opts)?;
        let mut v = even;
        v.extend(odd);
        for &l in &v {
            let (_, _, rel) = n1_spectral_functions(e, alpha, l, opts.order);
            if !(rel <= SERIES_TOLERANCE) {
                return Err(Error::NoConvergence {
                    achieved: rel,
                    tolerance: SERIES_TOLERANCE,
                });
            }
        }
        v
    };
    if values.is_empty() {
        return Err(Error::NoRoot(alloc::format!(
            "no eigenvalue in [{}, {}]",
            opts.lower, opts.upper
        )));
    }
    values.sort_by(f64::total_cmp);
    Ok(group_levels(&values, DEGENERACY_TOLERANCE))
}

/// The same model assembled on `2 fermion states ⊗ (n_max + 1) boson states`.
pub fn n1_model(e: f64, alpha: f64, n_max: usize) -> Result<(ModelConfig, VertexSet, ProductSpace)> {
    let model = ModelConfig {
        fermion_modes: vec![Kinematics::Energy(e)],
        boson_modes: vec![Kinematics::Energy(1.0)],
        kappa: 1.0,
        alpha,
        mass_scale: 1.0,
        n_max,
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let sigma_x = CouplingMatrix::new(DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]))?;
    let z = CouplingMatrix::zeros(2);
    let vertices = VertexSet::explicit(1, vec![[sigma_x, z.clone(), z.clone(), z]])?;
    let space = ProductSpace::new(
        build_basis(1, 4)?,
        build_boson_basis(1, n_max, DEFAULT_MAX_BOSON_STATES)?,
        Some(0),
    )?;
    Ok((model, vertices, space))
}

/// Lowest `count` eigenvalues of the assembled `N = 1` model, dense.
pub fn n1_diagonalization(e: f64, alpha: f64, n_max: usize, count: usize) -> Result<Spectrum> {
    let (model, vertices, space) = n1_model(e, alpha, n_max)?;
    let parts = assemble_total(&model, &vertices, &space)?;
    let mut s = diagonalize(&parts.total.components[0], count, Method::Dense)?;
    s.attach_leakage(&space.boundary_mask());
    Ok(s)
}
