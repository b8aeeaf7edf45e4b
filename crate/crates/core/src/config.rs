//! Run configuration: one TOML document with `[velocity]`, `[solver]`,
//! `[kinetic]` and `[output]` tables. Every key has a default, so a file
//! only needs the values it changes.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::grid::{PeriodicGrid, ScalarField};
use crate::kinetic::{plateau_test_function, TimeCutoff, XiGrid};
use crate::velocity::{build_schedule, ScheduleParams, VelocitySchedule};
use crate::{Error, Result};

/// A single number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Initial scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// `sin(2πy)`.
    SinY,
    /// `sin(2πx)`.
    SinX,
}

impl InitialData {
    pub fn field(self, grid: PeriodicGrid) -> ScalarField {
        match self {
            InitialData::SinY => ScalarField::from_fn(grid, |_, y| (2.0 * PI * y).sin()),
            InitialData::SinX => ScalarField::from_fn(grid, |x, _| (2.0 * PI * x).sin()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub kappa: OneOrMany<f64>,
    #[serde(rename = "N")]
    pub resolution: OneOrMany<usize>,
    pub substeps_per_stage: usize,
    pub snapshots_per_stage: usize,
    pub mollify_scale: f64,
    pub initial: InitialData,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            kappa: OneOrMany::Many(vec![1e-2, 5e-3, 2.5e-3, 1.25e-3]),
            resolution: OneOrMany::One(256),
            substeps_per_stage: 512,
            snapshots_per_stage: 32,
            mollify_scale: 0.0,
            initial: InitialData::SinY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KineticSection {
    pub epsilon: Vec<f64>,
    pub xi_min: f64,
    pub xi_max: f64,
    pub d_xi: f64,
    pub tau: f64,
    pub cutoff_width: f64,
}

impl Default for KineticSection {
    fn default() -> Self {
        Self {
            epsilon: vec![0.1, 0.2, 0.4],
            xi_min: -16.0,
            xi_max: 16.0,
            d_xi: 1.0 / 256.0,
            tau: 0.5,
            cutoff_width: 1.0 / 64.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub workers: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("anomdiss-out"),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub velocity: ScheduleParams,
    pub solver: SolverSection,
    pub kinetic: KineticSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    /// Single-line JSON, used in output headers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run config serializes to JSON")
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.solver.kappa.to_vec()
    }

    pub fn resolutions(&self) -> Vec<usize> {
        self.solver.resolution.to_vec()
    }

    pub fn schedule(&self) -> Result<VelocitySchedule> {
        build_schedule(&self.velocity)
    }

    pub fn cutoff(&self) -> Result<TimeCutoff> {
        TimeCutoff::new(self.kinetic.tau, self.kinetic.cutoff_width, self.velocity.horizon)
    }

    pub fn xi_grid(&self) -> Result<XiGrid> {
        XiGrid::new(self.kinetic.xi_min, self.kinetic.xi_max, self.kinetic.d_xi)
    }

    /// Checks every constraint; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let schedule = self.schedule()?;
        let kappas = self.kappas();
        if kappas.is_empty() {
            return Err(Error::param("kappa", "at least one value is required"));
        }
        if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::param(
                "kappa",
                format!("must be finite and non-negative, got {k}"),
            ));
        }
        let resolutions = self.resolutions();
        if resolutions.is_empty() {
            return Err(Error::param("N", "at least one resolution is required"));
        }
        let lambda_max = schedule.params().max_frequency();
        for &n in &resolutions {
            let grid = PeriodicGrid::new(n).map_err(|e| Error::param("N", e.to_string()))?;
            if lambda_max.saturating_mul(8) > grid.n() as u64 {
                return Err(Error::param(
                    "N",
                    format!(
                        "finest frequency {lambda_max} exceeds N/8 = {} (raise N or lower n_stages)",
                        n / 8
                    ),
                ));
            }
        }
        if self.solver.substeps_per_stage == 0 {
            return Err(Error::param("substeps_per_stage", "must be at least 1"));
        }
        if self.solver.snapshots_per_stage < 2 {
            return Err(Error::param("snapshots_per_stage", "must be at least 2"));
        }
        let m = self.solver.mollify_scale;
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::param("mollify_scale", "must be finite and non-negative"));
        }
        let xi = self.xi_grid()?;
        for &eps in &self.kinetic.epsilon {
            xi.check_contains(&plateau_test_function(eps)?)
                .map_err(|e| Error::param("epsilon", e.to_string()))?;
        }
        self.cutoff()?;
        if self.output.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        Ok(())
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn config() -> impl Strategy<Value = RunConfig> {
        (
            (0.0f64..0.9, 1usize..=4, any::<bool>(), 0.1f64..2.0),
            (
                prop::collection::vec(1e-4f64..1e-1, 1..5),
                prop::sample::select(vec![64usize, 128, 256]),
            ),
            (1usize..2048, 2usize..64, 0.0f64..0.1, any::<bool>()),
            (prop::collection::vec(0.05f64..0.45, 1..4), 1usize..16),
        )
            .prop_map(
                |((alpha, n_stages, mirrored, amplitude), (kappa, n), (sub, snaps, moll, sin_x), (eps, workers))| {
                    let mut cfg = RunConfig::default();
                    cfg.velocity.alpha = alpha;
                    cfg.velocity.n_stages = n_stages;
                    cfg.velocity.mirrored = mirrored;
                    cfg.velocity.amplitude = amplitude;
                    cfg.solver.kappa = OneOrMany::Many(kappa);
                    cfg.solver.resolution = OneOrMany::One(n);
                    cfg.solver.substeps_per_stage = sub;
                    cfg.solver.snapshots_per_stage = snaps;
                    cfg.solver.mollify_scale = moll;
                    cfg.solver.initial = if sin_x { InitialData::SinX } else { InitialData::SinY };
                    cfg.kinetic.epsilon = eps;
                    cfg.output.workers = workers;
                    cfg
                },
            )
    }

    proptest! {
        #[test]
        fn serialization_round_trip_is_idempotent(cfg in config()) {
            prop_assume!(cfg.validate().is_ok());
            let text = cfg.to_toml_string();
            let back = RunConfig::from_toml_str(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_toml_string(), text);
            let json: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
            prop_assert_eq!(json, cfg);
        }
    }
}
