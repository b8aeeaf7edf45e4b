//! Spectral advection–diffusion on the unit torus under alternating shear
//! flows, with the kinetic (microscopic) diagnostics of the vanishing
//! diffusivity limit.
//!
//! - [`grid`]: periodic grids, fields, spectral derivatives, snapshot I/O.
//! - [`velocity`]: the shear cascade and its time mirror.
//! - [`solver`]: exact split-step integration and the energy ledger.
//! - [`kinetic`]: `χ`, test functions in `ξ`, and weak-form residuals.
//! - [`analysis`]: viscosity sweeps, the smooth control, report tables.
//! - [`config`]: the TOML run configuration.

pub mod analysis;
pub mod config;
pub mod error;
pub mod grid;
pub mod kinetic;
pub mod solver;
pub mod velocity;

pub use analysis::{run_sweep, smooth_control, SweepConfig, SweepRecord};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use grid::{PeriodicGrid, ScalarField, Snapshot};
pub use solver::{integrate, SolverConfig, Trajectory};
pub use velocity::{build_schedule, ScheduleParams, VelocitySchedule};
