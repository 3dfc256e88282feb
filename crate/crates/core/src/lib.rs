//! One-dimensional compressible isentropic MHD with a transverse magnetic
//! field, in resistive (`nu > 0`) and non-resistive (`nu = 0`) form, plus
//! the diagnostics and sweep machinery used to study the `nu -> 0` limit.
//!
//! The prognostic fields are density, momentum and magnetic field on a
//! truncated domain `[-L, L]` with far-field Dirichlet data. Pressure is
//! `P = rho^gamma`.

pub mod diagnostics;
pub mod error;
pub mod fingerprint;
pub mod grid;
pub mod limit;
pub mod params;
pub mod physics;
pub mod scenario;
pub mod solver;
pub mod state;
pub mod stencil;
pub mod verify;

pub use diagnostics::{DiagnosticsRecord, DiagnosticsRow};
pub use error::{Error, Result};
pub use grid::{FieldScalar, Grid1D};
pub use limit::{ConvergenceReport, SharedConfig};
pub use params::{PhysParams, RHO_FLOOR};
pub use scenario::{Preset, ScenarioSpec};
pub use solver::{Mode, Reconstruction, SchemeConfig, TimeIntegrator, ViscousTreatment};
pub use state::State;
