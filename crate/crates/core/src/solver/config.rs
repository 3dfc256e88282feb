use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconstruction {
    FirstOrderUpwind,
    MusclMinmod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeIntegrator {
    SspRk2,
    SspRk3,
}

/// How the viscous term `(mu u_x)_x` is advanced.
///
/// `Explicit` keeps it inside the Runge-Kutta stages and adds the diffusive
/// bound `mu / rho_min` to the step size. `Implicit` removes it from the
/// stages and applies a backward-Euler momentum diffusion solve after each
/// step, which is what makes runs with interior vacuum affordable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ViscousTreatment {
    #[default]
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `b_t + (ub)_x = nu b_xx`.
    Resistive,
    /// `b_t + (ub)_x = 0`.
    NonResistive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub cfl_number: f64,
    pub diffusion_number: f64,
    pub reconstruction: Reconstruction,
    pub time_integrator: TimeIntegrator,
    pub viscous: ViscousTreatment,
    pub end_time: f64,
    /// Number of uniform sampling intervals in `[0, T]`; `samples + 1` rows
    /// are recorded when `T > 0`.
    pub samples: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl_number: 0.45,
            diffusion_number: 0.4,
            reconstruction: Reconstruction::MusclMinmod,
            time_integrator: TimeIntegrator::SspRk2,
            viscous: ViscousTreatment::Explicit,
            end_time: 1.0,
            samples: 50,
        }
    }
}

impl SchemeConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            v.push(format!("0 < cfl_number <= 1 (got {})", self.cfl_number));
        }
        if !(self.diffusion_number > 0.0 && self.diffusion_number <= 0.5) {
            v.push(format!("0 < diffusion_number <= 0.5 (got {})", self.diffusion_number));
        }
        if !(self.end_time.is_finite() && self.end_time >= 0.0) {
            v.push(format!("end_time >= 0 (got {})", self.end_time));
        }
        if self.samples == 0 {
            v.push("samples >= 1".into());
        }
        v
    }
}
