//! Initial data with far-field limits `(rho_bar, 0, b_bar)` and the audits
//! applied to it: the weighted energy moment and the compatibility residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldScalar, Grid1D};
use crate::params::PhysParams;
use crate::physics::{potential_energy_at, pressure_at};
use crate::state::State;
use crate::stencil;

/// Below this density the compatibility quotient `h / sqrt(rho0)` is not
/// evaluated and the node is flagged instead.
pub const RHO_COMPAT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `rho0 = rho_bar + a_rho exp(-x^2/sigma^2)`.
    GaussianBump,
    /// `rho0 = rho_bar (1 - exp(-x^2/sigma^2))^2`, vanishing at the origin.
    InteriorVacuum,
    /// Tabulated nodal profiles. Must match the grid they are used on.
    Custom(CustomProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProfile {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub preset: Preset,
    pub a_rho: f64,
    pub a_u: f64,
    pub a_b: f64,
    pub sigma: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            preset: Preset::GaussianBump,
            a_rho: 0.2,
            a_u: 0.2,
            a_b: 0.2,
            sigma: 2.0,
        }
    }
}

impl ScenarioSpec {
    pub fn gaussian(a_rho: f64, a_u: f64, a_b: f64, sigma: f64) -> Self {
        Self { preset: Preset::GaussianBump, a_rho, a_u, a_b, sigma }
    }

    pub fn interior_vacuum(a_u: f64, a_b: f64, sigma: f64) -> Self {
        Self { preset: Preset::InteriorVacuum, a_rho: 0.0, a_u, a_b, sigma }
    }

    pub fn violations(&self, params: &PhysParams, grid: &Grid1D) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            v.push(format!("sigma > 0 (got {})", self.sigma));
        }
        for (name, a) in [("a_rho", self.a_rho), ("a_u", self.a_u), ("a_b", self.a_b)] {
            if !a.is_finite() {
                v.push(format!("{name} finite (got {a})"));
            }
        }
        match &self.preset {
            Preset::GaussianBump => {
                if self.a_rho <= -params.rho_bar {
                    v.push(format!("a_rho > -rho_bar (got {} <= {})", self.a_rho, -params.rho_bar));
                }
            }
            Preset::InteriorVacuum => {}
            Preset::Custom(c) => {
                let n = grid.n_cells;
                if c.rho.len() != n || c.u.len() != n || c.b.len() != n {
                    v.push(format!("custom profile lengths must equal n_cells = {n}"));
                }
                if c.rho.iter().any(|&r| !(r >= 0.0)) {
                    v.push("custom rho >= 0".into());
                }
            }
        }
        if !matches!(self.preset, Preset::Custom(_)) && grid.half_width < 5.0 * self.sigma {
            v.push(format!(
                "half_width >= 5 sigma (got L = {}, sigma = {})",
                grid.half_width, self.sigma
            ));
        }
        v
    }

    /// Closed-form `(rho0, u0, b0)` at a point; `None` for tabulated data.
    pub fn closed_form(&self, x: f64, params: &PhysParams) -> Option<(f64, f64, f64)> {
        let g = (-(x * x) / (self.sigma * self.sigma)).exp();
        let u = self.a_u * x * g;
        let b = params.b_bar + self.a_b * g;
        match self.preset {
            Preset::GaussianBump => Some((params.rho_bar + self.a_rho * g, u, b)),
            Preset::InteriorVacuum => {
                let s = 1.0 - g;
                Some((params.rho_bar * s * s, u, b))
            }
            Preset::Custom(_) => None,
        }
    }
}

/// Sample the preset on the grid at `t = 0`.
pub fn build_initial_state(spec: &ScenarioSpec, params: &PhysParams, grid: &Grid1D) -> Result<State> {
    let mut v = params.violations();
    v.extend(grid.violations());
    v.extend(spec.violations(params, grid));
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let (rho, u, b) = match &spec.preset {
        Preset::Custom(c) => (c.rho.clone(), c.u.clone(), c.b.clone()),
        _ => {
            let n = grid.n_cells;
            let (mut rho, mut u, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
            for i in 0..n {
                let (r, uu, bb) = spec.closed_form(grid.x(i), params).expect("closed-form preset");
                rho.push(r);
                u.push(uu);
                b.push(bb);
            }
            (rho, u, b)
        }
    };
    State::from_primitive(*grid, rho, &u, b, 0.0)
}

/// Pointwise energy density `rho u^2/2 + Phi(rho) + (b - b_bar)^2/2`.
pub fn energy_density(state: &State, params: &PhysParams) -> Vec<f64> {
    (0..state.len())
        .map(|i| {
            let u = state.velocity_at(i);
            let db = state.b[i] - params.b_bar;
            0.5 * state.rho[i] * u * u + potential_energy_at(state.rho[i], params.gamma, params.rho_bar) + 0.5 * db * db
        })
        .collect()
}

/// Trapezoid value of `int (energy density) |x|^alpha dx` for the initial data.
pub fn weighted_moment_check(state0: &State, params: &PhysParams, grid: &Grid1D) -> f64 {
    let e = energy_density(state0, params);
    let w: Vec<f64> = e
        .iter()
        .enumerate()
        .map(|(i, v)| v * grid.x(i).abs().powf(params.alpha))
        .collect();
    stencil::trapezoid(&w, grid.dx())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityAudit {
    /// `g = h / sqrt(rho0)`, set to zero on flagged nodes.
    pub g: FieldScalar,
    pub g_l2: f64,
    /// Nodes where `rho0 <= RHO_COMPAT`.
    pub flagged: Vec<usize>,
}

/// Residual of the compatibility condition: `h = (mu u0_x - P(rho0) - b0^2/2)_x`
/// and `g = h / sqrt(rho0)` away from vacuum.
pub fn compatibility_residual(state0: &State, params: &PhysParams, grid: &Grid1D) -> CompatibilityAudit {
    let dx = grid.dx();
    let u_x = stencil::derivative(&state0.velocity(), dx);
    let inner: Vec<f64> = (0..state0.len())
        .map(|i| params.mu * u_x[i] - pressure_at(state0.rho[i], params.gamma) - 0.5 * state0.b[i] * state0.b[i])
        .collect();
    let h = stencil::derivative(&inner, dx);
    let mut flagged = Vec::new();
    let g: Vec<f64> = h
        .iter()
        .zip(&state0.rho)
        .enumerate()
        .map(|(i, (&h, &r))| {
            if r > RHO_COMPAT {
                h / r.sqrt()
            } else {
                flagged.push(i);
                0.0
            }
        })
        .collect();
    let g_l2 = (g.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
    CompatibilityAudit { g: FieldScalar { values: g, grid: *grid }, g_l2, flagged }
}
