//! Semi-discrete right-hand side: local Lax-Friedrichs fluxes on
//! reconstructed primitive states plus central viscous and resistive terms.
//! Two ghost cells per side carry the far-field state.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::{PhysParams, RHO_FLOOR};
use crate::physics::fast_speed_at;
use crate::state::recover_velocity;

use super::config::{Mode, Reconstruction, SchemeConfig, ViscousTreatment};

const GHOSTS: usize = 2;

/// Time derivatives of the prognostic fields, plus the derived `u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsOutput {
    pub drho: Vec<f64>,
    pub dmom: Vec<f64>,
    pub db: Vec<f64>,
    /// `(dm/dt - u drho/dt) / max(rho, RHO_FLOOR)`.
    pub u_t: Vec<f64>,
}

impl RhsOutput {
    pub fn zeros(n: usize) -> Self {
        Self {
            drho: vec![0.0; n],
            dmom: vec![0.0; n],
            db: vec![0.0; n],
            u_t: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.drho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drho.is_empty()
    }

    /// Largest absolute tendency over all three conserved fields.
    pub fn sup_norm(&self) -> f64 {
        self.drho
            .iter()
            .chain(&self.dmom)
            .chain(&self.db)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Analytic source terms added on top of the physical tendencies.
pub trait Forcing: Sync {
    fn add_sources(&self, grid: &Grid1D, t: f64, params: &PhysParams, mode: Mode, out: &mut RhsOutput);
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Reusable buffers for right-hand-side evaluation on one grid size.
#[derive(Debug, Clone)]
pub struct RhsKernel {
    rho: Vec<f64>,
    u: Vec<f64>,
    b: Vec<f64>,
    s_rho: Vec<f64>,
    s_u: Vec<f64>,
    s_b: Vec<f64>,
    f_rho: Vec<f64>,
    f_mom: Vec<f64>,
    f_b: Vec<f64>,
}

impl RhsKernel {
    pub fn new(n_cells: usize) -> Self {
        let e = n_cells + 2 * GHOSTS;
        Self {
            rho: vec![0.0; e],
            u: vec![0.0; e],
            b: vec![0.0; e],
            s_rho: vec![0.0; e],
            s_u: vec![0.0; e],
            s_b: vec![0.0; e],
            f_rho: vec![0.0; n_cells + 1],
            f_mom: vec![0.0; n_cells + 1],
            f_b: vec![0.0; n_cells + 1],
        }
    }

    /// Evaluate tendencies for `(rho, mom, b)` into `out`.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        &mut self,
        grid: &Grid1D,
        rho: &[f64],
        mom: &[f64],
        b: &[f64],
        t: f64,
        params: &PhysParams,
        scheme: &SchemeConfig,
        mode: Mode,
        forcing: Option<&dyn Forcing>,
        out: &mut RhsOutput,
    ) -> Result<()> {
        let n = grid.n_cells;
        let dx = grid.dx();
        let gamma = params.gamma;

        for g in 0..GHOSTS {
            self.rho[g] = params.rho_bar;
            self.u[g] = 0.0;
            self.b[g] = params.b_bar;
            self.rho[n + GHOSTS + g] = params.rho_bar;
            self.u[n + GHOSTS + g] = 0.0;
            self.b[n + GHOSTS + g] = params.b_bar;
        }
        for i in 0..n {
            self.rho[i + GHOSTS] = rho[i];
            self.u[i + GHOSTS] = recover_velocity(mom[i], rho[i]);
            self.b[i + GHOSTS] = b[i];
        }

        match scheme.reconstruction {
            Reconstruction::FirstOrderUpwind => {
                self.s_rho.fill(0.0);
                self.s_u.fill(0.0);
                self.s_b.fill(0.0);
            }
            Reconstruction::MusclMinmod => {
                let e = n + 2 * GHOSTS;
                for k in 1..e - 1 {
                    self.s_rho[k] = minmod(self.rho[k] - self.rho[k - 1], self.rho[k + 1] - self.rho[k]);
                    self.s_u[k] = minmod(self.u[k] - self.u[k - 1], self.u[k + 1] - self.u[k]);
                    self.s_b[k] = minmod(self.b[k] - self.b[k - 1], self.b[k + 1] - self.b[k]);
                }
            }
        }

        // face f sits between extended cells f+1 and f+2
        for f in 0..=n {
            let l = f + 1;
            let r = f + 2;
            let (rl, ul, bl) = (
                self.rho[l] + 0.5 * self.s_rho[l],
                self.u[l] + 0.5 * self.s_u[l],
                self.b[l] + 0.5 * self.s_b[l],
            );
            let (rr, ur, br) = (
                self.rho[r] - 0.5 * self.s_rho[r],
                self.u[r] - 0.5 * self.s_u[r],
                self.b[r] - 0.5 * self.s_b[r],
            );
            let ml = rl * ul;
            let mr = rr * ur;
            let a = fast_speed_at(rl, ul, bl, gamma).max(fast_speed_at(rr, ur, br, gamma));
            let pl = rl.powf(gamma) + 0.5 * bl * bl;
            let pr = rr.powf(gamma) + 0.5 * br * br;
            self.f_rho[f] = 0.5 * (ml + mr) - 0.5 * a * (rr - rl);
            self.f_mom[f] = 0.5 * (ml * ul + pl + mr * ur + pr) - 0.5 * a * (mr - ml);
            self.f_b[f] = 0.5 * (ul * bl + ur * br) - 0.5 * a * (br - bl);
        }

        let inv_dx = 1.0 / dx;
        for i in 0..n {
            out.drho[i] = -(self.f_rho[i + 1] - self.f_rho[i]) * inv_dx;
            out.dmom[i] = -(self.f_mom[i + 1] - self.f_mom[i]) * inv_dx;
            out.db[i] = -(self.f_b[i + 1] - self.f_b[i]) * inv_dx;
        }

        let inv_dx2 = inv_dx * inv_dx;
        if scheme.viscous == ViscousTreatment::Explicit {
            let c = params.mu * inv_dx2;
            for i in 0..n {
                let k = i + GHOSTS;
                out.dmom[i] += c * (self.u[k + 1] - 2.0 * self.u[k] + self.u[k - 1]);
            }
        }
        let nu = effective_nu(params, mode);
        if nu != 0.0 {
            let c = nu * inv_dx2;
            for i in 0..n {
                let k = i + GHOSTS;
                out.db[i] += c * (self.b[k + 1] - 2.0 * self.b[k] + self.b[k - 1]);
            }
        }

        if let Some(src) = forcing {
            src.add_sources(grid, t, params, mode, out);
        }

        for i in 0..n {
            let u = self.u[i + GHOSTS];
            out.u_t[i] = (out.dmom[i] - u * out.drho[i]) / rho[i].max(RHO_FLOOR);
        }

        for (name, f) in [("drho/dt", &out.drho), ("dm/dt", &out.dmom), ("db/dt", &out.db)] {
            if let Some(i) = f.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field: name, node: i, t });
            }
        }
        Ok(())
    }
}

/// Resistivity actually used by `mode`.
#[inline]
pub fn effective_nu(params: &PhysParams, mode: Mode) -> f64 {
    match mode {
        Mode::Resistive => params.nu,
        Mode::NonResistive => 0.0,
    }
}

/// Solve `rho u - c (u_{i+1} - 2u_i + u_{i-1}) = m` with `u = 0` in the
/// ghosts and overwrite `mom` with `rho u`. Thomas algorithm; the matrix is
/// strictly diagonally dominant for `c > 0`.
pub fn implicit_viscous_update(rho: &[f64], mom: &mut [f64], c: f64, scratch: &mut Vec<f64>) {
    let n = rho.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let cp = scratch;
    let mut prev_c = 0.0;
    let mut prev_d = 0.0;
    for i in 0..n {
        let diag = rho[i] + 2.0 * c;
        let denom = diag + c * prev_c;
        let ci = -c / denom;
        let di = (mom[i] + c * prev_d) / denom;
        cp[i] = ci;
        mom[i] = di;
        prev_c = ci;
        prev_d = di;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        mom[i] -= cp[i] * mom[i + 1];
    }
    for i in 0..n {
        mom[i] *= rho[i];
    }
}
