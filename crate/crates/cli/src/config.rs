//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use parabolic::flow::{Frame, IntegratorConfig, Rect, TimeGrid};
use parabolic::generators::{cayley, cayley_inverse, GeneratorSpec};
use parabolic::geometry::ImCondition;
use parabolic::quad::QuadTol;
use parabolic::rigidity::StrongRigidityMode;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    /// Second semigroup for rigidity comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_star: Option<GeneratorSpec>,
    /// Frame in which `initial_points` are given.
    #[serde(default = "default_frame")]
    pub frame: Frame,
    #[serde(default)]
    pub initial_points: Vec<C64>,
    #[serde(default = "default_grid")]
    pub grid: TimeGrid,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_frame() -> Frame {
    Frame::Disk
}

fn default_grid() -> TimeGrid {
    TimeGrid::up_to(1e6)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub integrator_rel: f64,
    pub integrator_abs: f64,
    pub quadrature: QuadTol,
}

impl Default for Tolerances {
    fn default() -> Self {
        let ic = IntegratorConfig::default();
        Tolerances { integrator_rel: ic.rel_tol, integrator_abs: ic.abs_tol, quadrature: QuadTol::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { rect: Rect { re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0 }, nx: 41, ny: 41 }
    }
}

/// One report; `points` falls back to the top-level `initial_points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Asymptotics {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<C64>>,
    },
    Geometry {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<C64>>,
        #[serde(default)]
        im_condition: ImCondition,
    },
    Omega {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        /// `(α, β)` pairs; one representative per region when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(f64, f64)>>,
    },
    Asymptote {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<C64>>,
        #[serde(default)]
        im_condition: ImCondition,
    },
    Rigidity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<C64>>,
        /// Weak rigidity perturbation `c (1-z)^(1+α+β)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<C64>,
        /// Strong rigidity direction; needs `generator_star` or `c`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
        #[serde(default = "default_mode")]
        mode: StrongRigidityMode,
    },
    Appendix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<C64>>,
    },
}

fn default_mode() -> StrongRigidityMode {
    StrongRigidityMode::Probe
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Asymptotics { .. } => "asymptotics",
            Experiment::Geometry { .. } => "geometry",
            Experiment::Omega { .. } => "omega",
            Experiment::Asymptote { .. } => "asymptote",
            Experiment::Rigidity { .. } => "rigidity",
            Experiment::Appendix { .. } => "appendix",
        }
    }

    fn name(&self) -> Option<&str> {
        match self {
            Experiment::Asymptotics { name, .. }
            | Experiment::Geometry { name, .. }
            | Experiment::Omega { name, .. }
            | Experiment::Asymptote { name, .. }
            | Experiment::Rigidity { name, .. }
            | Experiment::Appendix { name, .. } => name.as_deref(),
        }
    }

    /// File stem of the report; defaults to `NN_kind`.
    pub fn label(&self, index: usize) -> String {
        match self.name() {
            Some(n) => n.to_string(),
            None => format!("{index:02}_{}", self.kind()),
        }
    }

    pub fn points(&self) -> Option<&[C64]> {
        match self {
            Experiment::Asymptotics { points, .. }
            | Experiment::Geometry { points, .. }
            | Experiment::Asymptote { points, .. }
            | Experiment::Rigidity { points, .. }
            | Experiment::Appendix { points, .. } => points.as_deref(),
            Experiment::Omega { .. } => None,
        }
    }
}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub t_max: Option<f64>,
    pub tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, ov: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply(ov);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, ov: &Overrides) {
        if let Some(dir) = &ov.out_dir {
            self.out_dir = Some(dir.clone());
        }
        if let Some(t) = ov.t_max {
            self.grid = self.grid.with_t_max(t);
        }
        if let Some(tol) = ov.tol {
            self.tolerances.integrator_rel = tol;
            self.tolerances.integrator_abs = tol * 1e-2;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.samples().map_err(CliError::from)?;
        let t = &self.tolerances;
        if !(t.integrator_rel > 0.0 && t.integrator_abs > 0.0 && t.quadrature.rel > 0.0 && t.quadrature.abs > 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        for z in &self.initial_points {
            self.to_disk(*z)?;
        }
        let mut labels = std::collections::BTreeSet::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let label = e.label(i);
            if label.is_empty() || label.contains(['/', '\\']) || label.starts_with('.') {
                return Err(CliError::Config(format!("experiment name '{label}' is not a plain file stem")));
            }
            if !labels.insert(label.clone()) {
                return Err(CliError::Config(format!("duplicate experiment name '{label}'")));
            }
            for z in e.points().unwrap_or(&[]) {
                self.to_disk(*z)?;
            }
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.tolerances.integrator_rel,
            abs_tol: self.tolerances.integrator_abs,
            grid: self.grid.clone(),
            ..IntegratorConfig::default()
        }
    }

    pub fn to_disk(&self, p: C64) -> Result<C64, CliError> {
        Ok(match self.frame {
            Frame::Disk => {
                cayley(p)?;
                p
            }
            Frame::HalfPlane => cayley_inverse(p)?,
        })
    }

    pub fn to_half_plane(&self, p: C64) -> Result<C64, CliError> {
        Ok(match self.frame {
            Frame::Disk => cayley(p)?,
            Frame::HalfPlane => {
                cayley_inverse(p)?;
                p
            }
        })
    }

    /// Points of an experiment in the config frame.
    pub fn points_for<'a>(&'a self, e: &'a Experiment) -> Result<&'a [C64], CliError> {
        let pts = e.points().unwrap_or(&self.initial_points);
        if pts.is_empty() {
            return Err(CliError::Config(format!("experiment '{}' has no points", e.kind())));
        }
        Ok(pts)
    }

    /// SHA-256 of the canonical JSON form of the effective configuration,
    /// without the output directory.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = ExperimentConfig { out_dir: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
