//! Manufactured solutions: travelling Gaussian profiles with analytic
//! source terms, used to measure the observed order of the scheme.

use crate::diagnostics::{lp_norm, Lp};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::PhysParams;
use crate::state::State;

use super::integrate::{clamp_dt, Integrator, RunMonitors};
use super::kernel::{effective_nu, Forcing, RhsOutput};
use super::{rhs_forced, Mode, SchemeConfig};

/// `base + amp exp(-((x - x0 - speed t) / width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWave {
    pub base: f64,
    pub amp: f64,
    pub x0: f64,
    pub speed: f64,
    pub width: f64,
}

/// Value and the derivatives the source terms need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub t: f64,
    pub x: f64,
    pub xx: f64,
}

impl GaussianWave {
    pub fn constant(base: f64) -> Self {
        Self { base, amp: 0.0, x0: 0.0, speed: 0.0, width: 1.0 }
    }

    pub fn jet(&self, x: f64, t: f64) -> Jet {
        let w2 = self.width * self.width;
        let z = x - self.x0 - self.speed * t;
        let g = self.amp * (-z * z / w2).exp();
        let gx = -2.0 * z / w2 * g;
        let gxx = (4.0 * z * z / (w2 * w2) - 2.0 / w2) * g;
        Jet { v: self.base + g, t: -self.speed * gx, x: gx, xx: gxx }
    }
}

/// Closed-form `(rho*, u*, b*)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub rho: GaussianWave,
    pub u: GaussianWave,
    pub b: GaussianWave,
}

impl Manufactured {
    /// Smooth far-field compatible solution with three distinct wave speeds.
    pub fn standard(params: &PhysParams) -> Self {
        Self {
            rho: GaussianWave { base: params.rho_bar, amp: 0.1, x0: -0.5, speed: 0.3, width: 1.0 },
            u: GaussianWave { base: 0.0, amp: 0.1, x0: 0.0, speed: -0.2, width: 1.2 },
            b: GaussianWave { base: params.b_bar, amp: 0.1, x0: 0.5, speed: 0.1, width: 0.9 },
        }
    }

    pub fn far_field(params: &PhysParams) -> Self {
        Self {
            rho: GaussianWave::constant(params.rho_bar),
            u: GaussianWave::constant(0.0),
            b: GaussianWave::constant(params.b_bar),
        }
    }

    pub fn state(&self, grid: &Grid1D, t: f64) -> State {
        let n = grid.n_cells;
        let (mut rho, mut mom, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let x = grid.x(i);
            let r = self.rho.jet(x, t).v;
            rho.push(r);
            mom.push(r * self.u.jet(x, t).v);
            b.push(self.b.jet(x, t).v);
        }
        State { grid: *grid, rho, mom, b, t }
    }

    /// Residuals of the continuous equations at `(x, t)`.
    pub fn sources(&self, x: f64, t: f64, params: &PhysParams, nu: f64) -> [f64; 3] {
        let r = self.rho.jet(x, t);
        let u = self.u.jet(x, t);
        let b = self.b.jet(x, t);
        let g = params.gamma;
        let s_rho = r.t + r.x * u.v + r.v * u.x;
        let s_mom = r.t * u.v + r.v * u.t + r.x * u.v * u.v + 2.0 * r.v * u.v * u.x + g * r.v.powf(g - 1.0) * r.x
            + b.v * b.x
            - params.mu * u.xx;
        let s_b = b.t + u.x * b.v + u.v * b.x - nu * b.xx;
        [s_rho, s_mom, s_b]
    }
}

impl Forcing for Manufactured {
    fn add_sources(&self, grid: &Grid1D, t: f64, params: &PhysParams, mode: Mode, out: &mut RhsOutput) {
        let nu = effective_nu(params, mode);
        for i in 0..grid.n_cells {
            let [a, m, b] = self.sources(grid.x(i), t, params, nu);
            out.drho[i] += a;
            out.dmom[i] += m;
            out.db[i] += b;
        }
    }
}

/// Tendencies with the manufactured sources added.
pub fn mms_rhs(
    state: &State,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
    manufactured: &Manufactured,
) -> Result<RhsOutput> {
    rhs_forced(state, params, scheme, mode, Some(manufactured))
}

/// Errors and observed orders of a grid-doubling study.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStudy {
    pub n_cells: Vec<usize>,
    /// Discrete L2 errors at the end time, per grid, for `(rho, u, b)`.
    pub errors: Vec<[f64; 3]>,
    /// `log2(e_coarse / e_fine)` for each consecutive pair.
    pub orders: Vec<[f64; 3]>,
}

impl OrderStudy {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Integrate the forced system from the exact data to `scheme.end_time`
/// and measure the error against the exact solution.
pub fn mms_error(
    manufactured: &Manufactured,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
    grid: &Grid1D,
) -> Result<[f64; 3]> {
    let state0 = manufactured.state(grid, 0.0);
    let monitors = RunMonitors { boundary_tolerance: None };
    let mut it = Integrator::new(state0, params, scheme, mode, monitors)?.with_forcing(manufactured);
    let end = scheme.end_time;
    while it.state().t < end {
        let dt = clamp_dt(it.stable_dt(), it.state().t, end);
        let landing = dt == end - it.state().t;
        it.advance(dt)?;
        if landing {
            it.set_time(end);
        }
    }
    let exact = manufactured.state(grid, end);
    let s = it.state();
    let d_rho: Vec<f64> = s.rho.iter().zip(&exact.rho).map(|(a, b)| a - b).collect();
    let d_u: Vec<f64> = s.velocity().iter().zip(exact.velocity()).map(|(a, b)| a - b).collect();
    let d_b: Vec<f64> = s.b.iter().zip(&exact.b).map(|(a, b)| a - b).collect();
    Ok([lp_norm(&d_rho, Lp::L2, grid), lp_norm(&d_u, Lp::L2, grid), lp_norm(&d_b, Lp::L2, grid)])
}

pub fn order_study(
    manufactured: &Manufactured,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
    half_width: f64,
    n_cells: &[usize],
) -> Result<OrderStudy> {
    if n_cells.len() < 2 {
        return Err(Error::Invalid(vec!["order study needs at least two grids".into()]));
    }
    let errors = n_cells
        .iter()
        .map(|&n| mms_error(manufactured, params, scheme, mode, &Grid1D::new(half_width, n)?))
        .collect::<Result<Vec<_>>>()?;
    let orders = errors
        .windows(2)
        .zip(n_cells.windows(2))
        .map(|(e, n)| {
            let ratio = (n[1] as f64 / n[0] as f64).log2();
            [0, 1, 2].map(|k| (e[0][k] / e[1][k]).log2() / ratio)
        })
        .collect();
    Ok(OrderStudy { n_cells: n_cells.to_vec(), errors, orders })
}
