//! Forward-hyperboloid form factor
//! `F^mu(u) = ∫ d^4y δ(y·y - 1) θ(y0) y^mu e^{i u·y}`.
//!
//! With `y = (cosh ρ, sinh ρ n)` the measure is `½ sinh²ρ dρ dΩ`. The angular
//! integral is done in closed form about the axis `û = u_vec/|u_vec|`:
//!
//! ```text
//! F^0    =  2π ∫ dρ sinh²ρ cosh ρ  e^{(i u0 - ε) cosh ρ} j0(|u| sinh ρ)
//! F_vec  = -2πi û ∫ dρ sinh³ρ      e^{(i u0 - ε) cosh ρ} j1(|u| sinh ρ)
//! ```
//!
//! The integral does not converge without a regulator. Each sample carries an
//! exponential damping `e^{-ε y0}` and a rapidity cutoff `ρ <= R`; the reported
//! value is a polynomial (Neville) extrapolation of the samples to `ε = 0`, and
//! the change produced by the last schedule level is reported as the stability
//! estimate.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Rapidity cutoff `R`.
    pub rapidity_cutoff: f64,
    /// Gauss-Legendre nodes per radial panel.
    pub nodes_per_panel: usize,
    /// Largest panel width in rapidity.
    pub max_panel_width: f64,
    /// Damping values `ε`, extrapolated to zero.
    pub schedule: Vec<f64>,
    /// Relative change above which an extrapolation is flagged.
    pub stability_tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rapidity_cutoff: 12.0,
            nodes_per_panel: 16,
            max_panel_width: 0.25,
            schedule: vec![0.4, 0.3, 0.2, 0.15, 0.1, 0.05],
            stability_tolerance: 1e-4,
            max_panels: 2_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rapidity_cutoff > 0.0) {
            return Err(Error::InvalidInput("rapidity cutoff must be positive".into()));
        }
        if self.nodes_per_panel < 8 {
            return Err(Error::InvalidInput("at least 8 nodes per panel are required".into()));
        }
        if !(self.max_panel_width > 0.0) {
            return Err(Error::InvalidInput("panel width must be positive".into()));
        }
        if self.schedule.len() < 2 || self.schedule.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidInput(
                "regulator schedule needs at least two positive values".into(),
            ));
        }
        Ok(())
    }
}

pub type FourVector = [f64; 4];
pub type ComplexFourVector = [Complex64; 4];

/// One regulated quadrature sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatedSample {
    pub epsilon: f64,
    pub value: ComplexFourVector,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormFactor {
    /// Extrapolated `ε -> 0` value.
    pub value: ComplexFourVector,
    /// `|P_n(0) - P_{n-1}(0)| / |P_n(0)|` over the Neville table.
    pub stability: f64,
    pub flagged: bool,
    pub samples: Vec<RegulatedSample>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn spherical_j0(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        libm::sin(x) / x
    }
}

fn spherical_j1(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x / 3.0 - x * x2 / 30.0 + x * x2 * x2 / 840.0
    } else {
        (libm::sin(x) / x - libm::cos(x)) / x
    }
}

fn spatial_norm(u: &FourVector) -> f64 {
    libm::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3])
}

/// Regulated integral with damping `epsilon >= 0` and rapidity cutoff `cutoff`.
/// Returns `None` when the panel budget would be exceeded.
pub fn regulated_form_factor(
    u: &FourVector,
    epsilon: f64,
    cutoff: f64,
    q: &QuadratureSpec,
) -> Option<RegulatedSample> {
    let (gx, gw) = gauss_legendre(q.nodes_per_panel);
    let uabs = spatial_norm(u);
    let omega = u[0].abs() + uabs;

    // past t = cosh ρ_stop the damped integrand t^3 e^{-εt} is below 1e-18 of unity
    let rho_stop = if epsilon > 0.0 {
        let mut t = (3.0 / epsilon).max(1.0);
        while 3.0 * libm::log(t) - epsilon * t > -41.5 {
            t *= 1.25;
        }
        libm::acosh(t).min(cutoff)
    } else {
        cutoff
    };

    let mut f0 = Complex64::new(0.0, 0.0);
    let mut fr = Complex64::new(0.0, 0.0);
    let mut rho = 0.0;
    let mut panels = 0usize;
    while rho < rho_stop {
        let rate = omega * libm::cosh(rho) + epsilon * libm::sinh(rho);
        let mut h = q.max_panel_width;
        if rate > 0.0 {
            h = h.min(PI / rate);
        }
        let b = (rho + h).min(rho_stop);
        let (mid, half) = (0.5 * (rho + b), 0.5 * (b - rho));
        for (x, w) in gx.iter().zip(&gw) {
            let r = mid + half * x;
            let (s, t) = (libm::sinh(r), libm::cosh(r));
            let damp = libm::exp(-epsilon * t);
            let phase = Complex64::new(libm::cos(u[0] * t), libm::sin(u[0] * t));
            let weight = phase * (w * half * s * s * damp);
            f0 += weight * (t * spherical_j0(uabs * s));
            fr += weight * (s * spherical_j1(uabs * s));
        }
        rho = b;
        panels += 1;
        if panels > q.max_panels {
            return None;
        }
    }

    let two_pi = 2.0 * PI;
    let mut value = [Complex64::new(0.0, 0.0); 4];
    value[0] = f0 * two_pi;
    if uabs > 0.0 {
        // -2πi û ∫ ...
        let radial = fr * Complex64::new(0.0, -two_pi);
        for k in 1..4 {
            value[k] = radial * (u[k] / uabs);
        }
    }
    Some(RegulatedSample {
        epsilon,
        value,
        panels,
    })
}

fn four_norm(v: &ComplexFourVector) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Neville extrapolation of `(x_i, y_i)` to `x = 0`, returning the last two
/// diagonal entries of the table.
fn neville_at_zero(xs: &[f64], ys: &[ComplexFourVector]) -> (ComplexFourVector, ComplexFourVector) {
    let n = xs.len();
    let mut table: Vec<ComplexFourVector> = ys.to_vec();
    let mut prev_top = table[0];
    let mut top = table[0];
    for m in 1..n {
        for i in 0..n - m {
            let mut next = [Complex64::new(0.0, 0.0); 4];
            for c in 0..4 {
                // P(0) = (x_{i+m} P_i - x_i P_{i+1}) / (x_{i+m} - x_i)
                next[c] = (table[i][c] * xs[i + m] - table[i + 1][c] * xs[i]) / (xs[i + m] - xs[i]);
            }
            table[i] = next;
        }
        prev_top = top;
        top = table[0];
    }
    (top, prev_top)
}

/// Regulated, extrapolated form factor; see the module docs.
pub fn form_factor(u: &FourVector, q: &QuadratureSpec) -> Result<FormFactor> {
    q.validate()?;
    let mut schedule = q.schedule.clone();
    schedule.sort_by(|a, b| b.total_cmp(a));
    let mut samples = Vec::with_capacity(schedule.len());
    for &eps in &schedule {
        match regulated_form_factor(u, eps, q.rapidity_cutoff, q) {
            Some(s) => samples.push(s),
            None => {
                return Ok(FormFactor {
                    value: [Complex64::new(f64::NAN, f64::NAN); 4],
                    stability: f64::INFINITY,
                    flagged: true,
                    samples,
                })
            }
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.epsilon).collect();
    let ys: Vec<ComplexFourVector> = samples.iter().map(|s| s.value).collect();
    let (value, previous) = neville_at_zero(&xs, &ys);
    let diff: ComplexFourVector = core::array::from_fn(|c| value[c] - previous[c]);
    let scale = four_norm(&value);
    let stability = if scale > 0.0 {
        four_norm(&diff) / scale
    } else {
        four_norm(&diff)
    };
    let flagged = !stability.is_finite() || stability > q.stability_tolerance;
    Ok(FormFactor {
        value,
        stability,
        flagged,
        samples,
    })
}

/// One row of a rapidity-cutoff scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffScanRow {
    pub cutoff: f64,
    /// Undamped (`ε = 0`) integral up to the cutoff, if the panel budget allows it.
    pub truncated: Option<ComplexFourVector>,
    pub extrapolated: FormFactor,
}

/// Evaluates the form factor at each rapidity cutoff in `cutoffs`.
pub fn cutoff_scan(u: &FourVector, cutoffs: &[f64], q: &QuadratureSpec) -> Result<Vec<CutoffScanRow>> {
    cutoffs
        .iter()
        .map(|&r| {
            let mut qr = q.clone();
            qr.rapidity_cutoff = r;
            Ok(CutoffScanRow {
                cutoff: r,
                truncated: regulated_form_factor(u, 0.0, r, &qr).map(|s| s.value),
                extrapolated: form_factor(u, &qr)?,
            })
        })
        .collect()
}
