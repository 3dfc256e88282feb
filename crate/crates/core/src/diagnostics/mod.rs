//! Functionals of the solution whose boundedness the resistivity-limit
//! argument relies on, sampled into a time series.

mod independence;
mod record;

pub use independence::{nu_independence_report, IndependenceReport, QuantitySpread, SweepRecord, SPREAD_TOLERANCE};
pub use record::{DiagnosticsRecord, DiagnosticsRow, COLUMNS};

use crate::grid::{FieldScalar, Grid1D};
use crate::params::PhysParams;
use crate::physics::effective_flux_values;
use crate::scenario::energy_density;
use crate::solver::RhsOutput;
use crate::state::State;
use crate::stencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lp {
    L2,
    L4,
    L6,
    Inf,
}

/// Discrete Lebesgue norm: `(sum |f_i|^p dx)^(1/p)`, or `max |f_i|`.
pub fn lp_norm(values: &[f64], p: Lp, grid: &Grid1D) -> f64 {
    let dx = grid.dx();
    match p {
        Lp::Inf => values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Lp::L2 => (values.iter().map(|v| v * v).sum::<f64>() * dx).sqrt(),
        Lp::L4 => (values.iter().map(|v| (v * v) * (v * v)).sum::<f64>() * dx).powf(0.25),
        Lp::L6 => (values.iter().map(|v| (v * v * v).powi(2)).sum::<f64>() * dx).powf(1.0 / 6.0),
    }
}

/// `(sum f_i^2 |x_i|^alpha dx)^(1/2)`.
pub fn weighted_l2(values: &[f64], alpha: f64, grid: &Grid1D) -> f64 {
    let s: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * v * grid.x(i).abs().powf(alpha))
        .sum();
    (s * grid.dx()).sqrt()
}

/// `int (rho u^2/2 + Phi(rho) + (b - b_bar)^2/2) dx`.
pub fn total_energy(state: &State, params: &PhysParams, grid: &Grid1D) -> f64 {
    stencil::trapezoid(&energy_density(state, params), grid.dx())
}

/// Energy with the spatial weight `|x|^alpha`.
pub fn weighted_energy(state: &State, params: &PhysParams, grid: &Grid1D) -> f64 {
    let w: Vec<f64> = energy_density(state, params)
        .into_iter()
        .enumerate()
        .map(|(i, e)| e * grid.x(i).abs().powf(params.alpha))
        .collect();
    stencil::trapezoid(&w, grid.dx())
}

/// `xi(x) = int_{-L}^{x} rho u dy`, zero at the left edge.
pub fn momentum_potential(state: &State, grid: &Grid1D) -> FieldScalar {
    FieldScalar {
        values: stencil::cumulative_trapezoid(&state.mom, grid.dx()),
        grid: *grid,
    }
}

/// `|| rho u_dot - F_x ||_2` with `u_dot = u_t + u u_x` taken from the
/// tendencies at the same instant.
pub fn flux_identity_residual(state: &State, rhs: &RhsOutput, params: &PhysParams, grid: &Grid1D) -> f64 {
    let dx = grid.dx();
    let u = state.velocity();
    let u_x = stencil::derivative(&u, dx);
    let f = effective_flux_values(&state.rho, &u_x, &state.b, params);
    let f_x = stencil::derivative(&f, dx);
    let r: Vec<f64> = (0..u.len())
        .map(|i| state.rho[i] * (rhs.u_t[i] + u[i] * u_x[i]) - f_x[i])
        .collect();
    lp_norm(&r, Lp::L2, grid)
}

/// Instantaneous integrands of the time-accumulated columns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DissipationRates {
    pub mu_ux2: f64,
    pub nu_bx2: f64,
    pub mu_ux2_weighted: f64,
    pub nu_bx2_weighted: f64,
    pub b_dev_pow6: f64,
}

impl DissipationRates {
    /// `nu` is the resistivity active in the run (zero for non-resistive).
    pub fn evaluate(state: &State, params: &PhysParams, nu: f64) -> Self {
        let grid = &state.grid;
        let dx = grid.dx();
        let u_x = stencil::derivative(&state.velocity(), dx);
        let b_x = stencil::derivative(&state.b, dx);
        let ux_l2 = lp_norm(&u_x, Lp::L2, grid);
        let bx_l2 = lp_norm(&b_x, Lp::L2, grid);
        let ux_w = weighted_l2(&u_x, params.alpha, grid);
        let bx_w = weighted_l2(&b_x, params.alpha, grid);
        let b_dev: Vec<f64> = state.b.iter().map(|b| b - params.b_bar).collect();
        Self {
            mu_ux2: params.mu * ux_l2 * ux_l2,
            nu_bx2: nu * bx_l2 * bx_l2,
            mu_ux2_weighted: params.mu * ux_w * ux_w,
            nu_bx2_weighted: nu * bx_w * bx_w,
            b_dev_pow6: lp_norm(&b_dev, Lp::L6, grid).powi(6),
        }
    }
}

/// One record row at the state's time. Time-accumulated columns and the
/// clipping count are left at zero for the caller to fill.
pub fn sample(state: &State, rhs: &RhsOutput, params: &PhysParams, grid: &Grid1D) -> DiagnosticsRow {
    let dx = grid.dx();
    let u = state.velocity();
    let u_x = stencil::derivative(&u, dx);
    let u_xx = stencil::second_derivative(&u, dx);
    let b_x = stencil::derivative(&state.b, dx);
    let rho_x = stencil::derivative(&state.rho, dx);
    let u_xt = stencil::derivative(&rhs.u_t, dx);
    let rho_dev: Vec<f64> = state.rho.iter().map(|r| r - params.rho_bar).collect();
    let b_dev: Vec<f64> = state.b.iter().map(|b| b - params.b_bar).collect();
    // vacuum annihilates the weight even where u_t is large
    let weighted_udot: Vec<f64> = (0..u.len())
        .map(|i| {
            let w = state.rho[i].sqrt();
            if w == 0.0 {
                0.0
            } else {
                w * (rhs.u_t[i] + u[i] * u_x[i])
            }
        })
        .collect();
    let xi = momentum_potential(state, grid);

    DiagnosticsRow {
        t: state.t,
        energy: total_energy(state, params, grid),
        weighted_energy: weighted_energy(state, params, grid),
        dissipation_u: 0.0,
        dissipation_b: 0.0,
        weighted_dissipation_u: 0.0,
        weighted_dissipation_b: 0.0,
        sup_rho: state.rho.iter().fold(f64::NEG_INFINITY, |m, &r| m.max(r)),
        sup_abs_b: lp_norm(&state.b, Lp::Inf, grid),
        sup_abs_u: lp_norm(&u, Lp::Inf, grid),
        rho_dev_l2: lp_norm(&rho_dev, Lp::L2, grid),
        b_dev_l4: lp_norm(&b_dev, Lp::L4, grid),
        b_dev_l6_pow6_time_integral: 0.0,
        u_x_l2: lp_norm(&u_x, Lp::L2, grid),
        b_x_l2: lp_norm(&b_x, Lp::L2, grid),
        rho_x_l2: lp_norm(&rho_x, Lp::L2, grid),
        sqrt_rho_udot_l2: lp_norm(&weighted_udot, Lp::L2, grid),
        flux_identity_residual: flux_identity_residual(state, rhs, params, grid),
        xi_sup: lp_norm(&xi.values, Lp::Inf, grid),
        clipping_count: 0,
        rho_t_l2: lp_norm(&rhs.drho, Lp::L2, grid),
        b_t_l2: lp_norm(&rhs.db, Lp::L2, grid),
        u_xx_l2: lp_norm(&u_xx, Lp::L2, grid),
        u_xt_l2: lp_norm(&u_xt, Lp::L2, grid),
        u_xt_l2_sq_time_integral: 0.0,
    }
}
