//! Run configuration: one JSON document, validated before anything runs.

use std::path::Path;

use pointform_core::fermion::CouplingMatrix;
use pointform_core::momentum::{Kinematics, ModelConfig};
use pointform_core::nalgebra::DMatrix;
use pointform_core::solver::ExactModel;
use pointform_core::vertex::spinor::Spin;
use pointform_core::vertex::{pseudoscalar_vertex_set, GridMode, QuadratureSpec, VertexSet};
use pointform_core::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub verify: VerifyOptions,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub solve_alpha: SolveAlphaOptions,
    #[serde(default)]
    pub model_n1: ModelN1Options,
    #[serde(default)]
    pub form_factor: FormFactorOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub fermion_modes: Vec<ModeSpec>,
    #[serde(default)]
    pub boson_modes: Vec<ModeSpec>,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "one")]
    pub mass_scale: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Baryon sector to restrict to; the full space when absent.
    #[serde(default)]
    pub sector: Option<i32>,
    #[serde(default)]
    pub vertices: VertexSpec,
}

/// `{"energy": e}` (at rest) or `{"velocity": [v0, v1, v2, v3]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    Energy(f64),
    Velocity([f64; 4]),
}

/// A real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinSpec {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VertexSpec {
    /// All vertex matrices zero.
    #[default]
    None,
    /// `X^mu_k = Y_k (v^mu_k / v^0_k) / (2N) · I`.
    ScalarY { y: Vec<ComplexValue> },
    /// `matrices[k][mu]` as row-major `2N x 2N` arrays.
    Explicit { matrices: Vec<[Vec<Vec<ComplexValue>>; 4]> },
    /// Pseudoscalar vertices on the fermion velocity grid.
    Pseudoscalar {
        spins: Vec<SpinSpec>,
        #[serde(default)]
        quadrature: QuadratureOptions,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    pub rapidity_cutoff: f64,
    pub nodes_per_panel: usize,
    pub max_panel_width: f64,
    pub schedule: Vec<f64>,
    pub stability_tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            rapidity_cutoff: q.rapidity_cutoff,
            nodes_per_panel: q.nodes_per_panel,
            max_panel_width: q.max_panel_width,
            schedule: q.schedule,
            stability_tolerance: q.stability_tolerance,
            max_panels: q.max_panels,
        }
    }
}

impl QuadratureOptions {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rapidity_cutoff: self.rapidity_cutoff,
            nodes_per_panel: self.nodes_per_panel,
            max_panel_width: self.max_panel_width,
            schedule: self.schedule.clone(),
            stability_tolerance: self.stability_tolerance,
            max_panels: self.max_panels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    /// Safe-subspace margin for the momentum commutators.
    pub margin: usize,
    /// Seeded random `(X, Y)` pairs for the homomorphism check.
    pub random_pairs: usize,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            margin: 2,
            random_pairs: 20,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    pub count: usize,
    pub method: MethodSpec,
    /// Residual tolerance of the iterative solver.
    pub tolerance: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            count: 8,
            method: MethodSpec::Dense,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveAlphaOptions {
    /// Cutoff for the root-find; the model's `n_max` when absent.
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelN1Options {
    pub e: f64,
    pub alpha: f64,
    pub n_max: usize,
    pub lower: f64,
    pub upper: f64,
    pub order: usize,
    pub scan_step: f64,
    /// Largest accepted series/diagonalization mismatch.
    pub tolerance: f64,
}

impl Default for ModelN1Options {
    fn default() -> Self {
        Self {
            e: 0.7,
            alpha: 0.4,
            n_max: 40,
            lower: -1.0,
            upper: 4.5,
            order: 200,
            scan_step: 1e-3,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormFactorOptions {
    pub points: Vec<[f64; 4]>,
    pub quadrature: QuadratureOptions,
}

impl Default for FormFactorOptions {
    fn default() -> Self {
        Self {
            points: vec![[5.0, 0.0, 0.0, 0.0], [-5.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]],
            quadrature: QuadratureOptions::default(),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    8
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(tol) = o.tolerance {
            self.verify.tolerance = tol;
            self.spectrum.tolerance = tol;
        }
        if let Some(n) = o.n_max {
            if let Some(m) = self.model.as_mut() {
                m.n_max = n;
            }
            self.model_n1.n_max = n;
            self.solve_alpha.n_max = Some(n);
        }
    }

    /// SHA-256 of the effective configuration in canonical JSON.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn model(&self) -> Result<&ModelSection, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Schema("this command needs a `model` section".into()))
    }
}

fn kinematics(m: &ModeSpec) -> Kinematics {
    match *m {
        ModeSpec::Energy(e) => Kinematics::Energy(e),
        ModeSpec::Velocity(v) => Kinematics::Velocity(v),
    }
}

impl ModelSection {
    pub fn model_config(&self) -> Result<ModelConfig, CliError> {
        let cfg = ModelConfig {
            fermion_modes: self.fermion_modes.iter().map(kinematics).collect(),
            boson_modes: self.boson_modes.iter().map(kinematics).collect(),
            kappa: self.kappa,
            alpha: self.alpha,
            mass_scale: self.mass_scale,
            n_max: self.n_max,
        };
        cfg.validate().map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(cfg)
    }

    pub fn vertex_set(&self, model: &ModelConfig) -> Result<VertexSet, CliError> {
        let n = model.fermion_modes.len();
        let k = model.boson_modes.len();
        let dim = 2 * n;
        let vs = match &self.vertices {
            VertexSpec::None => {
                VertexSet::explicit(n, (0..k).map(|_| core::array::from_fn(|_| CouplingMatrix::zeros(dim))).collect())
            }
            VertexSpec::ScalarY { y } => {
                let y: Vec<Complex64> = y.iter().map(|c| c.value()).collect();
                VertexSet::scalar_y(n, &y, &model.boson_vectors())
            }
            VertexSpec::Explicit { matrices } => {
                if matrices.len() != k {
                    return Err(CliError::Schema(format!(
                        "explicit vertices: {} boson modes but {} matrix sets",
                        k,
                        matrices.len()
                    )));
                }
                let mut sets = Vec::with_capacity(k);
                for set in matrices {
                    let mut four: [CouplingMatrix; 4] = core::array::from_fn(|_| CouplingMatrix::zeros(dim));
                    for (mu, rows) in set.iter().enumerate() {
                        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                            return Err(CliError::Schema(format!("explicit vertices must be {dim} x {dim}")));
                        }
                        let m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j].value());
                        four[mu] = CouplingMatrix::new(m).map_err(|e| CliError::Schema(e.to_string()))?;
                    }
                    sets.push(four);
                }
                VertexSet::explicit(n, sets)
            }
            VertexSpec::Pseudoscalar { spins, quadrature } => {
                if spins.len() != n {
                    return Err(CliError::Schema(format!(
                        "pseudoscalar vertices: {} spins for {} fermion modes",
                        spins.len(),
                        n
                    )));
                }
                let grid: Vec<GridMode> = model
                    .fermion_modes
                    .iter()
                    .zip(spins)
                    .map(|(m, s)| GridMode {
                        velocity: m.four_vector(),
                        spin: match s {
                            SpinSpec::Up => Spin::Up,
                            SpinSpec::Down => Spin::Down,
                        },
                    })
                    .collect();
                pseudoscalar_vertex_set(&grid, &model.boson_vectors(), &quadrature.spec())
            }
        };
        vs.map_err(|e| CliError::Schema(e.to_string()))
    }

    /// The closed-form model: needs scalar vertices and massive bosons.
    pub fn exact_model(&self, model: &ModelConfig) -> Result<ExactModel, CliError> {
        let VertexSpec::ScalarY { y } = &self.vertices else {
            return Err(CliError::Schema("solve-alpha needs `scalar_y` vertices".into()));
        };
        let fermion = model.fermion_modes.iter().map(Kinematics::energy).collect();
        let boson = model.boson_modes.iter().map(|m| model.kappa * m.energy()).collect();
        let y = y.iter().map(|c| c.value()).collect();
        ExactModel::new(fermion, boson, y).map_err(|e| CliError::Schema(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let cfg = RunConfig::from_json(r#"{"schema_version": 1}"#).unwrap();
        assert!(cfg.model.is_none());
        assert_eq!(cfg.verify.margin, 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_json(r#"{"schema_version": 1, "modle": {}}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
        let err = RunConfig::from_json(r#"{"schema_version": 1, "verify": {"margn": 1}}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
    }

    #[test]
    fn wrong_version_rejected() {
        assert!(matches!(
            RunConfig::from_json(r#"{"schema_version": 7}"#),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn scalar_model_parses() {
        let cfg = RunConfig::from_json(
            r#"{"schema_version": 1, "model": {
                "fermion_modes": [{"energy": 1.0}],
                "boson_modes": [{"velocity": [1.0, 0.0, 0.0, 0.0]}],
                "alpha": 0.3, "n_max": 4, "sector": 1,
                "vertices": {"scalar_y": {"y": [1.0]}}}}"#,
        )
        .unwrap();
        let m = cfg.model().unwrap();
        let mc = m.model_config().unwrap();
        assert_eq!(m.vertex_set(&mc).unwrap().boson_modes(), 1);
        assert_eq!(m.exact_model(&mc).unwrap().boson_energies(), &[1.0]);
    }

    #[test]
    fn hash_follows_overrides() {
        let mut cfg = RunConfig::from_json(r#"{"schema_version": 1}"#).unwrap();
        let h0 = cfg.sha256();
        assert_eq!(h0, cfg.sha256());
        cfg.apply(Overrides {
            seed: Some(3),
            ..Overrides::default()
        });
        assert_ne!(h0, cfg.sha256());
    }
}
