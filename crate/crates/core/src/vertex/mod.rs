//! Vertex matrices `X^mu_k`: one `2N x 2N` coupling matrix per boson mode and
//! four-momentum component.

pub mod form_factor;
pub mod spinor;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{frobenius, CouplingMatrix};
pub use form_factor::{
    cutoff_scan, form_factor, regulated_form_factor, CutoffScanRow, FormFactor, FourVector,
    QuadratureSpec, RegulatedSample,
};
pub use spinor::{dirac_spinor, Spin, SpinorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    Pseudoscalar,
    ScalarY,
}

/// Max Frobenius norms of `[X^mu_k, (X^mu_l)^dagger]` and `[X^mu_k, X^nu_l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexReport {
    pub normality_defect: f64,
    pub commutativity_defect: f64,
}

impl VertexReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.normality_defect <= tol && self.commutativity_defect <= tol
    }
}

/// Form-factor evaluation that failed to extrapolate cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryWarning {
    pub boson_mode: usize,
    pub row: usize,
    pub col: usize,
    pub stability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    dim: usize,
    matrices: Vec<[CouplingMatrix; 4]>,
    provenance: Provenance,
    report: VertexReport,
    warnings: Vec<EntryWarning>,
}

impl VertexSet {
    fn build(
        dim: usize,
        matrices: Vec<[CouplingMatrix; 4]>,
        provenance: Provenance,
        warnings: Vec<EntryWarning>,
    ) -> Result<Self> {
        for m in matrices.iter().flatten() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "vertex matrix",
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        let report = compute_report(&matrices);
        Ok(Self {
            dim,
            matrices,
            provenance,
            report,
            warnings,
        })
    }

    /// `matrices[k][mu] = X^mu_{k+1}`, all of dimension `2N`.
    pub fn explicit(fermion_modes: usize, matrices: Vec<[CouplingMatrix; 4]>) -> Result<Self> {
        Self::build(2 * fermion_modes, matrices, Provenance::Explicit, Vec::new())
    }

    /// Scalar vertices: `X^mu_k = Y_k (v^mu_k / v^0_k) / (2N) · I`, so that
    /// `tr X^0_k = Y_k` and `A(X^0_k)` acts as `Y_k` on the filled baryon-`N`
    /// state.
    pub fn scalar_y(fermion_modes: usize, y: &[Complex64], boson_vectors: &[FourVector]) -> Result<Self> {
        if y.len() != boson_vectors.len() {
            return Err(Error::DimensionMismatch {
                context: "scalar vertex couplings",
                expected: boson_vectors.len(),
                found: y.len(),
            });
        }
        let dim = 2 * fermion_modes;
        let matrices = y
            .iter()
            .zip(boson_vectors)
            .map(|(&yk, v)| {
                core::array::from_fn(|mu| {
                    if dim == 0 {
                        CouplingMatrix::zeros(0)
                    } else {
                        CouplingMatrix::scalar(dim, yk * (v[mu] / v[0] / dim as f64))
                    }
                })
            })
            .collect();
        Self::build(dim, matrices, Provenance::ScalarY, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boson_modes(&self) -> usize {
        self.matrices.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `X^mu_k` for one-based boson mode `k`.
    pub fn matrix(&self, k: usize, mu: usize) -> &CouplingMatrix {
        &self.matrices[k - 1][mu]
    }

    pub fn matrices(&self) -> &[[CouplingMatrix; 4]] {
        &self.matrices
    }

    pub fn report(&self) -> VertexReport {
        self.report
    }

    pub fn warnings(&self) -> &[EntryWarning] {
        &self.warnings
    }
}

fn compute_report(matrices: &[[CouplingMatrix; 4]]) -> VertexReport {
    let mut normality: f64 = 0.0;
    let mut commutativity: f64 = 0.0;
    for xk in matrices {
        for xl in matrices {
            for mu in 0..4 {
                let n = frobenius(xk[mu].commutator(&xl[mu].adjoint()).entries());
                normality = normality.max(n);
                for x in xl {
                    let c = frobenius(xk[mu].commutator(x).entries());
                    commutativity = commutativity.max(c);
                }
            }
        }
    }
    VertexReport {
        normality_defect: normality,
        commutativity_defect: commutativity,
    }
}

/// Recomputes the normality/commutativity defects of a vertex set.
pub fn verify_vertex_matrices(vs: &VertexSet) -> VertexReport {
    compute_report(&vs.matrices)
}

/// One fermion grid point: a four-velocity and a spin label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMode {
    pub velocity: FourVector,
    pub spin: Spin,
}

/// Pseudoscalar vertex matrices on a discrete velocity/spin grid.
///
/// Rows `i` carry `ū(v_i)` (fermion created) and rows `i+N` carry `v̄(v_i)`
/// (antifermion annihilated); columns `j` carry `u(v_j)` (fermion annihilated)
/// and columns `j+N` carry `v(v_j)` (antifermion created). The form-factor
/// argument follows the plane-wave phases of the same operators:
///
/// ```text
/// (i,   j  ):  F( v_i - v_j - v_k) ū γ5 u      (i+N, j  ):  F(-v_i - v_j - v_k) v̄ γ5 u
/// (i,   j+N):  F( v_i + v_j - v_k) ū γ5 v      (i+N, j+N):  F(-v_i + v_j - v_k) v̄ γ5 v
/// ```
pub fn pseudoscalar_vertex_set(
    grid: &[GridMode],
    bosons: &[FourVector],
    q: &QuadratureSpec,
) -> Result<VertexSet> {
    q.validate()?;
    let n = grid.len();
    for (i, g) in grid.iter().enumerate() {
        spinor::check_unit_velocity(&g.velocity, i + 1)?;
    }
    for (k, v) in bosons.iter().enumerate() {
        spinor::check_unit_velocity(v, k + 1)?;
    }
    let mut spinors = Vec::with_capacity(n);
    for g in grid {
        spinors.push((
            dirac_spinor(&g.velocity, g.spin, SpinorKind::Particle)?,
            dirac_spinor(&g.velocity, g.spin, SpinorKind::Antiparticle)?,
        ));
    }

    let mut warnings = Vec::new();
    let mut matrices = Vec::with_capacity(bosons.len());
    for (k, vk) in bosons.iter().enumerate() {
        let mut xs: [CouplingMatrix; 4] = core::array::from_fn(|_| CouplingMatrix::zeros(2 * n));
        for r in 0..2 * n {
            let (i, row_particle) = if r < n { (r, true) } else { (r - n, false) };
            let bra = if row_particle { &spinors[i].0 } else { &spinors[i].1 };
            let s_row = if row_particle { 1.0 } else { -1.0 };
            for col in 0..2 * n {
                let (j, col_particle) = if col < n { (col, true) } else { (col - n, false) };
                let ket = if col_particle { &spinors[j].0 } else { &spinors[j].1 };
                let s_col = if col_particle { -1.0 } else { 1.0 };
                let gamma = spinor::pseudoscalar_bilinear(bra, ket);
                if gamma == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let vi = &grid[i].velocity;
                let vj = &grid[j].velocity;
                let u: FourVector = core::array::from_fn(|m| s_row * vi[m] + s_col * vj[m] - vk[m]);
                let ff = form_factor(&u, q)?;
                if ff.flagged {
                    warnings.push(EntryWarning {
                        boson_mode: k + 1,
                        row: r,
                        col,
                        stability: ff.stability,
                    });
                }
                for (mu, x) in xs.iter_mut().enumerate() {
                    x.entries_mut()[(r, col)] = ff.value[mu] * gamma;
                }
            }
        }
        matrices.push(xs);
    }
    VertexSet::build(2 * n, matrices, Provenance::Pseudoscalar, warnings)
}
