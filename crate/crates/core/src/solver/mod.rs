//! Method-of-lines integrator for the resistive and non-resistive systems.

mod checkpoint;
mod config;
mod integrate;
mod kernel;
pub mod mms;

pub use checkpoint::{checkpoint_string, parse_checkpoint, read_checkpoint, write_checkpoint};
pub use config::{Mode, Reconstruction, SchemeConfig, TimeIntegrator, ViscousTreatment};
pub use integrate::{run, run_from, Integrator, RunMonitors, RunOutput, BOUNDARY_TOLERANCE};
pub(crate) use integrate::{clamp_dt, sample_times};
pub use kernel::{effective_nu, implicit_viscous_update, Forcing, RhsKernel, RhsOutput};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::{PhysParams, RHO_FLOOR};
use crate::physics::fast_speed_at;
use crate::state::State;

/// Tendencies of `state` for the chosen system.
pub fn rhs(state: &State, params: &PhysParams, scheme: &SchemeConfig, mode: Mode) -> Result<RhsOutput> {
    rhs_forced(state, params, scheme, mode, None)
}

pub(crate) fn rhs_forced(
    state: &State,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
    forcing: Option<&dyn Forcing>,
) -> Result<RhsOutput> {
    let mut kernel = RhsKernel::new(state.len());
    let mut out = RhsOutput::zeros(state.len());
    kernel.evaluate(
        &state.grid, &state.rho, &state.mom, &state.b, state.t, params, scheme, mode, forcing, &mut out,
    )?;
    Ok(out)
}

/// Largest stable step: the smaller of the advective bound
/// `cfl dx / max fast_speed` and the diffusive bound
/// `diffusion_number dx^2 / max(mu / max(rho_min, floor), nu)`.
/// With implicit viscosity only `nu` enters the diffusive bound.
pub fn stable_dt(state: &State, params: &PhysParams, scheme: &SchemeConfig, grid: &Grid1D) -> f64 {
    let dx = grid.dx();
    let mut max_speed = 0.0f64;
    let mut rho_min = f64::INFINITY;
    for i in 0..state.len() {
        max_speed = max_speed.max(fast_speed_at(state.rho[i], state.velocity_at(i), state.b[i], params.gamma));
        rho_min = rho_min.min(state.rho[i]);
    }
    let advective = scheme.cfl_number * dx / max_speed;
    let viscous = match scheme.viscous {
        ViscousTreatment::Explicit => params.mu / rho_min.max(RHO_FLOOR),
        ViscousTreatment::Implicit => 0.0,
    };
    let diffusivity = viscous.max(params.nu);
    if diffusivity > 0.0 {
        advective.min(scheme.diffusion_number * dx * dx / diffusivity)
    } else {
        advective
    }
}

/// Reusable stage storage for SSP Runge-Kutta steps.
#[derive(Debug, Clone)]
pub struct Stepper {
    kernel: RhsKernel,
    k: RhsOutput,
    stage_rho: Vec<f64>,
    stage_mom: Vec<f64>,
    stage_b: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(n_cells: usize) -> Self {
        Self {
            kernel: RhsKernel::new(n_cells),
            k: RhsOutput::zeros(n_cells),
            stage_rho: vec![0.0; n_cells],
            stage_mom: vec![0.0; n_cells],
            stage_b: vec![0.0; n_cells],
            scratch: Vec::with_capacity(n_cells),
        }
    }

    /// Advance `state` by `dt` in place. Returns the number of density
    /// values clipped to zero across all stages.
    pub fn step(
        &mut self,
        state: &mut State,
        dt: f64,
        params: &PhysParams,
        scheme: &SchemeConfig,
        mode: Mode,
        forcing: Option<&dyn Forcing>,
    ) -> Result<usize> {
        let t0 = state.t;
        let mut clipped = 0;

        // stage 1: forward Euler from u^n into the stage buffers
        self.eval(state.grid, Stage::Base(state), t0, params, scheme, mode, forcing)?;
        for i in 0..state.len() {
            self.stage_rho[i] = state.rho[i] + dt * self.k.drho[i];
            self.stage_mom[i] = state.mom[i] + dt * self.k.dmom[i];
            self.stage_b[i] = state.b[i] + dt * self.k.db[i];
        }
        clipped += clip(&mut self.stage_rho);

        match scheme.time_integrator {
            TimeIntegrator::SspRk2 => {
                self.eval(state.grid, Stage::Buffer, t0 + dt, params, scheme, mode, forcing)?;
                self.combine(state, 0.5, 0.5, dt);
                clipped += clip(&mut self.stage_rho);
            }
            TimeIntegrator::SspRk3 => {
                self.eval(state.grid, Stage::Buffer, t0 + dt, params, scheme, mode, forcing)?;
                self.combine(state, 0.75, 0.25, dt);
                clipped += clip(&mut self.stage_rho);
                self.eval(state.grid, Stage::Buffer, t0 + 0.5 * dt, params, scheme, mode, forcing)?;
                self.combine(state, 1.0 / 3.0, 2.0 / 3.0, dt);
                clipped += clip(&mut self.stage_rho);
            }
        }

        std::mem::swap(&mut state.rho, &mut self.stage_rho);
        std::mem::swap(&mut state.mom, &mut self.stage_mom);
        std::mem::swap(&mut state.b, &mut self.stage_b);
        state.t = t0 + dt;

        if scheme.viscous == ViscousTreatment::Implicit {
            let dx = state.grid.dx();
            let c = dt * params.mu / (dx * dx);
            implicit_viscous_update(&state.rho, &mut state.mom, c, &mut self.scratch);
        }

        for (name, f) in [("rho", &state.rho), ("mom", &state.mom), ("b", &state.b)] {
            if let Some(i) = f.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field: name, node: i, t: state.t });
            }
        }
        Ok(clipped)
    }

    #[allow(clippy::too_many_arguments)]
    fn eval(
        &mut self,
        grid: Grid1D,
        which: Stage<'_>,
        t: f64,
        params: &PhysParams,
        scheme: &SchemeConfig,
        mode: Mode,
        forcing: Option<&dyn Forcing>,
    ) -> Result<()> {
        let (rho, mom, b) = match which {
            Stage::Base(s) => (&s.rho, &s.mom, &s.b),
            Stage::Buffer => (&self.stage_rho, &self.stage_mom, &self.stage_b),
        };
        self.kernel.evaluate(&grid, rho, mom, b, t, params, scheme, mode, forcing, &mut self.k)
    }

    /// `stage <- a * base + c * (stage + dt * k)`.
    fn combine(&mut self, base: &State, a: f64, c: f64, dt: f64) {
        for i in 0..base.len() {
            self.stage_rho[i] = a * base.rho[i] + c * (self.stage_rho[i] + dt * self.k.drho[i]);
            self.stage_mom[i] = a * base.mom[i] + c * (self.stage_mom[i] + dt * self.k.dmom[i]);
            self.stage_b[i] = a * base.b[i] + c * (self.stage_b[i] + dt * self.k.db[i]);
        }
    }
}

enum Stage<'a> {
    Base(&'a State),
    Buffer,
}

fn clip(rho: &mut [f64]) -> usize {
    let mut count = 0;
    for r in rho.iter_mut() {
        if *r < 0.0 {
            *r = 0.0;
            count += 1;
        }
    }
    count
}

/// One step from `state`; returns the new state and the clipping count.
pub fn step(
    state: &State,
    dt: f64,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
) -> Result<(State, usize)> {
    let mut next = state.clone();
    let clipped = Stepper::new(state.len()).step(&mut next, dt, params, scheme, mode, None)?;
    Ok((next, clipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_initial_state, ScenarioSpec};

    fn scheme(reconstruction: Reconstruction) -> SchemeConfig {
        SchemeConfig { reconstruction, ..Default::default() }
    }

    #[test]
    fn far_field_is_a_fixed_point() {
        let p = PhysParams { rho_bar: 1.7, b_bar: -2.3, nu: 0.01, ..Default::default() };
        let g = Grid1D::new(10.0, 64).unwrap();
        let s = State::far_field(g, &p);
        for rec in [Reconstruction::FirstOrderUpwind, Reconstruction::MusclMinmod] {
            for mode in [Mode::Resistive, Mode::NonResistive] {
                assert_eq!(rhs(&s, &p, &scheme(rec), mode).unwrap().sup_norm(), 0.0);
            }
        }
        let mut st = s.clone();
        let mut stepper = Stepper::new(64);
        for _ in 0..20 {
            let dt = stable_dt(&st, &p, &scheme(Reconstruction::MusclMinmod), &g);
            stepper.step(&mut st, dt, &p, &scheme(Reconstruction::MusclMinmod), Mode::Resistive, None).unwrap();
        }
        assert_eq!(st.rho, s.rho);
        assert_eq!(st.mom, s.mom);
        assert_eq!(st.b, s.b);
    }

    /// Independent first-order LLF density tendency for `rho = rho_bar`,
    /// `b = b_bar`, written out node by node.
    #[test]
    fn density_tendency_matches_hand_stencil() {
        let p = PhysParams::default();
        let g = Grid1D::new(4.0, 8).unwrap();
        let u: Vec<f64> = g.coordinates().iter().map(|x| 0.3 * (-x * x).exp()).collect();
        let s = State::from_primitive(g, vec![p.rho_bar; 8], &u, vec![p.b_bar; 8], 0.0).unwrap();
        let out = rhs(&s, &p, &scheme(Reconstruction::FirstOrderUpwind), Mode::Resistive).unwrap();

        let speed = |u: f64| u.abs() + (p.gamma * p.rho_bar.powf(p.gamma - 1.0) + p.b_bar * p.b_bar / p.rho_bar).sqrt();
        let ext = |i: isize| if (0..8).contains(&i) { u[i as usize] } else { 0.0 };
        let face = |i: isize| {
            // between node i-1 and node i; density jump is zero
            0.5 * p.rho_bar * (ext(i - 1) + ext(i)) - 0.0 * speed(ext(i - 1)).max(speed(ext(i)))
        };
        for i in 0..8isize {
            let expect = -(face(i + 1) - face(i)) / g.dx();
            assert!((out.drho[i as usize] - expect).abs() < 1e-14, "node {i}");
        }
    }

    #[test]
    fn modes_differ_only_by_resistive_term() {
        let p = PhysParams { nu: 0.05, ..Default::default() };
        let g = Grid1D::new(10.0, 100).unwrap();
        let s = build_initial_state(&ScenarioSpec::gaussian(0.2, 0.2, 0.3, 1.5), &p, &g).unwrap();
        let sc = scheme(Reconstruction::MusclMinmod);
        let res = rhs(&s, &p, &sc, Mode::Resistive).unwrap();
        let non = rhs(&s, &p, &sc, Mode::NonResistive).unwrap();
        assert_eq!(res.drho, non.drho);
        assert_eq!(res.dmom, non.dmom);
        let dx2 = g.dx() * g.dx();
        for i in 0..100 {
            let l = if i == 0 { p.b_bar } else { s.b[i - 1] };
            let r = if i == 99 { p.b_bar } else { s.b[i + 1] };
            let bxx = p.nu * (r - 2.0 * s.b[i] + l) / dx2;
            assert!((res.db[i] - non.db[i] - bxx).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn stable_dt_examples() {
        let p = PhysParams { gamma: 2.0, mu: 1e-300, nu: 0.0, ..Default::default() };
        let g = Grid1D::new(1.0, 10).unwrap();
        let s = State::new(g, vec![1.0; 10], vec![0.0; 10], vec![0.0; 10], 0.0).unwrap();
        let sc = SchemeConfig::default();
        let dt = stable_dt(&s, &p, &sc, &g);
        assert!((dt - sc.cfl_number * g.dx() / 2f64.sqrt()).abs() < 1e-15);

        // refinement at most halves the advective bound
        let p = PhysParams::default();
        let g2 = g.refined();
        let s1 = State::far_field(g, &p);
        let s2 = State::far_field(g2, &p);
        let sc = SchemeConfig { viscous: ViscousTreatment::Implicit, ..Default::default() };
        let ratio = stable_dt(&s2, &p, &sc, &g2) / stable_dt(&s1, &p, &sc, &g);
        assert!(ratio >= 0.5 - 1e-15);

        // nu = 0: diffusive bound from mu / rho alone
        let sc = SchemeConfig::default();
        let p0 = PhysParams { nu: 0.0, mu: 10.0, ..Default::default() };
        let big = Grid1D::new(1.0, 100).unwrap();
        let s = State::far_field(big, &p0);
        let dt = stable_dt(&s, &p0, &sc, &big);
        assert!((dt - sc.diffusion_number * big.dx() * big.dx() / 10.0).abs() < 1e-18);
    }

    #[test]
    fn step_keeps_constant_state() {
        let p = PhysParams::default();
        let g = Grid1D::new(5.0, 32).unwrap();
        let s = State::far_field(g, &p);
        for integ in [TimeIntegrator::SspRk2, TimeIntegrator::SspRk3] {
            let sc = SchemeConfig { time_integrator: integ, ..Default::default() };
            let (n, c) = step(&s, 1e-3, &p, &sc, Mode::Resistive).unwrap();
            assert_eq!(c, 0);
            assert_eq!(n.rho, s.rho);
            assert_eq!(n.t, 1e-3);
        }
    }

    /// Passive advection of b at constant speed with rho frozen at rho_bar,
    /// compared against exact translation on two grids.
    fn translation_error(n: usize) -> f64 {
        let c = 0.5;
        let p = PhysParams { mu: 1e-12, nu: 0.0, ..Default::default() };
        let g = Grid1D::new(10.0, n).unwrap();
        let profile = |x: f64| p.b_bar + 0.01 * (-(x * x)).exp();
        let rho = vec![p.rho_bar; g.n_cells];
        let mom = vec![p.rho_bar * c; g.n_cells];
        let mut b: Vec<f64> = g.coordinates().into_iter().map(profile).collect();
        let sc = SchemeConfig { viscous: ViscousTreatment::Implicit, ..Default::default() };
        let mut kernel = RhsKernel::new(g.n_cells);
        let mut out = RhsOutput::zeros(g.n_cells);
        let dt = 0.2 * g.dx();
        let end = 0.5;
        let steps = (end / dt).round() as usize;
        // SSP-RK2 on the b equation only, u held fixed
        for _ in 0..steps {
            let b0 = b.clone();
            kernel.evaluate(&g, &rho, &mom, &b, 0.0, &p, &sc, Mode::NonResistive, None, &mut out).unwrap();
            let b1: Vec<f64> = (0..g.n_cells).map(|i| b[i] + dt * out.db[i]).collect();
            kernel.evaluate(&g, &rho, &mom, &b1, 0.0, &p, &sc, Mode::NonResistive, None, &mut out).unwrap();
            b = (0..g.n_cells).map(|i| 0.5 * b0[i] + 0.5 * (b1[i] + dt * out.db[i])).collect();
        }
        let shift = c * dt * steps as f64;
        // the ghosts carry u = 0, so only the interior is judged
        g.coordinates()
            .iter()
            .zip(&b)
            .filter(|(x, _)| x.abs() < 5.0)
            .map(|(x, v)| (v - profile(x - shift)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn passive_field_translates() {
        let coarse = translation_error(1000);
        let fine = translation_error(2000);
        assert!(fine < 0.01 * 0.01, "max error {fine}");
        assert!(coarse / fine > 2.0, "{coarse} -> {fine}");
    }
}
