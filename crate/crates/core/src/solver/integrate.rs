use crate::diagnostics::{self, DiagnosticsRecord, DissipationRates};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::PhysParams;
use crate::scenario::{build_initial_state, ScenarioSpec};
use crate::state::State;

use super::kernel::{effective_nu, Forcing, RhsKernel, RhsOutput};
use super::{stable_dt, Mode, SchemeConfig, Stepper};

/// Far-field deviation allowed at the three outermost nodes on each side.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;
const MONITORED_EDGE_NODES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMonitors {
    /// `None` disables the boundary-validity check.
    pub boundary_tolerance: Option<f64>,
}

impl Default for RunMonitors {
    fn default() -> Self {
        Self { boundary_tolerance: Some(BOUNDARY_TOLERANCE) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub state: State,
    pub record: DiagnosticsRecord,
    pub clipping_events: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulators {
    d_u: f64,
    d_b: f64,
    dw_u: f64,
    dw_b: f64,
    b6: f64,
    uxt2: f64,
}

/// One evolving solution with its running diagnostics.
pub struct Integrator<'a> {
    state: State,
    params: PhysParams,
    scheme: SchemeConfig,
    mode: Mode,
    forcing: Option<&'a dyn Forcing>,
    monitors: RunMonitors,
    stepper: Stepper,
    kernel: RhsKernel,
    rhs: RhsOutput,
    rates: DissipationRates,
    acc: Accumulators,
    last_sample: Option<(f64, f64)>,
    clipping: u64,
    steps: u64,
    record: DiagnosticsRecord,
}

impl<'a> Integrator<'a> {
    pub fn new(
        state: State,
        params: &PhysParams,
        scheme: &SchemeConfig,
        mode: Mode,
        monitors: RunMonitors,
    ) -> Result<Self> {
        let mut v = params.violations();
        v.extend(scheme.violations());
        v.extend(state.grid.violations());
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        state.check()?;
        let n = state.len();
        let rates = DissipationRates::evaluate(&state, params, effective_nu(params, mode));
        let it = Self {
            state,
            params: *params,
            scheme: *scheme,
            mode,
            forcing: None,
            monitors,
            stepper: Stepper::new(n),
            kernel: RhsKernel::new(n),
            rhs: RhsOutput::zeros(n),
            rates,
            acc: Accumulators::default(),
            last_sample: None,
            clipping: 0,
            steps: 0,
            record: DiagnosticsRecord::default(),
        };
        it.check_boundary()?;
        Ok(it)
    }

    pub fn with_forcing(mut self, forcing: &'a dyn Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn record(&self) -> &DiagnosticsRecord {
        &self.record
    }

    pub fn clipping_events(&self) -> u64 {
        self.clipping
    }

    /// Parameters with the resistivity this mode actually uses.
    fn active_params(&self) -> PhysParams {
        self.params.with_nu(effective_nu(&self.params, self.mode))
    }

    pub fn stable_dt(&self) -> f64 {
        stable_dt(&self.state, &self.active_params(), &self.scheme, &self.state.grid)
    }

    /// Advance by `dt`, updating the time-integrated dissipation terms.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let clipped = self.stepper.step(&mut self.state, dt, &self.params, &self.scheme, self.mode, self.forcing)?;
        self.clipping += clipped as u64;
        self.steps += 1;
        let next = DissipationRates::evaluate(&self.state, &self.params, effective_nu(&self.params, self.mode));
        let half = 0.5 * dt;
        let prev = self.rates;
        self.acc.d_u += half * (prev.mu_ux2 + next.mu_ux2);
        self.acc.d_b += half * (prev.nu_bx2 + next.nu_bx2);
        self.acc.dw_u += half * (prev.mu_ux2_weighted + next.mu_ux2_weighted);
        self.acc.dw_b += half * (prev.nu_bx2_weighted + next.nu_bx2_weighted);
        self.acc.b6 += half * (prev.b_dev_pow6 + next.b_dev_pow6);
        self.rates = next;
        self.check_boundary()
    }

    /// Pin the clock to `t` after landing on a sample time, removing
    /// accumulated round-off in `t`.
    pub fn set_time(&mut self, t: f64) {
        self.state.t = t;
    }

    /// Tendencies at the current state.
    pub fn current_rhs(&mut self) -> Result<&RhsOutput> {
        let s = &self.state;
        self.kernel.evaluate(
            &s.grid, &s.rho, &s.mom, &s.b, s.t, &self.params, &self.scheme, self.mode, self.forcing, &mut self.rhs,
        )?;
        Ok(&self.rhs)
    }

    /// Append a diagnostics row at the current time.
    pub fn sample(&mut self) -> Result<()> {
        self.current_rhs()?;
        let mut row = diagnostics::sample(&self.state, &self.rhs, &self.params, &self.state.grid);
        let q = row.u_xt_l2 * row.u_xt_l2;
        if let Some((t_prev, q_prev)) = self.last_sample {
            self.acc.uxt2 += 0.5 * (row.t - t_prev) * (q_prev + q);
        }
        self.last_sample = Some((row.t, q));
        row.dissipation_u = self.acc.d_u;
        row.dissipation_b = self.acc.d_b;
        row.weighted_dissipation_u = self.acc.dw_u;
        row.weighted_dissipation_b = self.acc.dw_b;
        row.b_dev_l6_pow6_time_integral = self.acc.b6;
        row.u_xt_l2_sq_time_integral = self.acc.uxt2;
        row.clipping_count = self.clipping;
        if !row.is_finite() {
            return Err(Error::NonFinite { field: "diagnostics", node: 0, t: row.t });
        }
        self.record.rows.push(row);
        Ok(())
    }

    fn check_boundary(&self) -> Result<()> {
        let Some(tol) = self.monitors.boundary_tolerance else {
            return Ok(());
        };
        let n = self.state.len();
        let k = MONITORED_EDGE_NODES.min(n);
        for i in (0..k).chain(n - k..n) {
            let checks = [
                ("rho", (self.state.rho[i] - self.params.rho_bar).abs()),
                ("u", self.state.velocity_at(i).abs()),
                ("b", (self.state.b[i] - self.params.b_bar).abs()),
            ];
            for (field, deviation) in checks {
                if !(deviation <= tol) {
                    return Err(Error::BoundaryTrip { t: self.state.t, field, node: i, deviation });
                }
            }
        }
        Ok(())
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            state: self.state,
            record: self.record,
            clipping_events: self.clipping,
            steps: self.steps,
        }
    }
}

/// Sample times `k T / samples`; a single time when `T = 0`.
pub(crate) fn sample_times(scheme: &SchemeConfig) -> Vec<f64> {
    if scheme.end_time == 0.0 {
        return vec![0.0];
    }
    let n = scheme.samples;
    (0..=n).map(|k| scheme.end_time * k as f64 / n as f64).collect()
}

/// Step length that lands on `target` without leaving a sliver step.
pub(crate) fn clamp_dt(stable: f64, t: f64, target: f64) -> f64 {
    let remaining = target - t;
    if stable >= remaining {
        remaining
    } else if 2.0 * stable > remaining {
        0.5 * remaining
    } else {
        stable
    }
}

/// Drive an integrator from its current time through every sample time.
pub(crate) fn drive(it: &mut Integrator<'_>, scheme: &SchemeConfig) -> Result<()> {
    let times = sample_times(scheme);
    it.sample()?;
    for &target in &times[1..] {
        while it.state().t < target {
            let dt = clamp_dt(it.stable_dt(), it.state().t, target);
            let landing = dt == target - it.state().t;
            it.advance(dt)?;
            if landing {
                it.set_time(target);
            }
        }
        it.sample()?;
    }
    Ok(())
}

/// Integrate a scenario from `t = 0` to the scheme's end time.
pub fn run(
    scenario: &ScenarioSpec,
    params: &PhysParams,
    scheme: &SchemeConfig,
    grid: &Grid1D,
    mode: Mode,
    monitors: RunMonitors,
) -> Result<RunOutput> {
    let state0 = build_initial_state(scenario, params, grid)?;
    run_from(state0, params, scheme, mode, monitors)
}

pub fn run_from(
    state0: State,
    params: &PhysParams,
    scheme: &SchemeConfig,
    mode: Mode,
    monitors: RunMonitors,
) -> Result<RunOutput> {
    let mut it = Integrator::new(state0, params, scheme, mode, monitors)?;
    drive(&mut it, scheme)?;
    Ok(it.into_output())
}
