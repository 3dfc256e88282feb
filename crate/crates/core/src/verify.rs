//! Built-in verification battery: each check computes its own oracle and
//! reports pass/fail with the measured numbers.

use crate::diagnostics::{flux_identity_residual, DiagnosticsRecord};
use crate::error::Result;
use crate::grid::Grid1D;
use crate::limit::SharedConfig;
use crate::params::PhysParams;
use crate::physics::potential_energy_at;
use crate::scenario::build_initial_state;
use crate::solver::mms::{order_study, Manufactured, OrderStudy};
use crate::solver::{rhs, run, Mode, Reconstruction, RunMonitors, SchemeConfig, TimeIntegrator};
use crate::state::State;

pub const MMS_GRIDS: [usize; 3] = [512, 1024, 2048];
pub const MMS_HALF_WIDTH: f64 = 8.0;
pub const MMS_END_TIME: f64 = 0.5;
pub const MUSCL_MIN_ORDER: f64 = 1.8;
pub const UPWIND_MIN_ORDER: f64 = 0.9;
pub const FLUX_IDENTITY_MIN_CONTRACTION: f64 = 3.5;
pub const STEADY_STATE_TOL: f64 = 1e-13;
pub const MASS_DEFECT_TOL: f64 = 1e-8;
pub const ENERGY_DRIFT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// Empirical constants for the two-sided bounds on the potential energy:
/// `c1 (rho - rb)^2 <= Phi <= c2 (rho - rb)^2` on `[0, 2 rb]` and
/// `rho^g - rb^g <= C1 (rho - rb)^g <= C2 Phi` on `(2 rb, 10 rb]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialBounds {
    pub c1: f64,
    pub c2: f64,
    pub big_c1: f64,
    pub big_c2: f64,
}

impl PotentialBounds {
    pub fn all_finite_positive(&self) -> bool {
        [self.c1, self.c2, self.big_c1, self.big_c2].iter().all(|c| c.is_finite() && *c > 0.0)
    }
}

pub fn potential_bounds(gamma: f64, rho_bar: f64, samples: usize) -> PotentialBounds {
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for k in 0..=samples {
        let rho = 2.0 * rho_bar * k as f64 / samples as f64;
        let d2 = (rho - rho_bar).powi(2);
        // the quotient tends to gamma rb^(gamma-2)/2 at rho = rb; skip the
        // few samples where cancellation dominates
        if d2 < 1e-8 * rho_bar * rho_bar {
            continue;
        }
        let q = potential_energy_at(rho, gamma, rho_bar) / d2;
        c1 = c1.min(q);
        c2 = c2.max(q);
    }
    let mut big_c1 = 0.0f64;
    let mut ratios = Vec::with_capacity(samples);
    for k in 1..=samples {
        let rho = 2.0 * rho_bar + 8.0 * rho_bar * k as f64 / samples as f64;
        let dg = (rho - rho_bar).powf(gamma);
        big_c1 = big_c1.max((rho.powf(gamma) - rho_bar.powf(gamma)) / dg);
        ratios.push((dg, potential_energy_at(rho, gamma, rho_bar)));
    }
    let big_c2 = ratios.iter().map(|(dg, phi)| big_c1 * dg / phi).fold(0.0f64, f64::max);
    PotentialBounds { c1, c2, big_c1, big_c2 }
}

/// Largest increase of `E + D_u + D_b` between any two samples, relative
/// to its initial value.
pub fn energy_budget_drift(record: &DiagnosticsRecord) -> f64 {
    let Some(first) = record.rows.first() else { return 0.0 };
    let w0 = first.energy_budget();
    if w0 == 0.0 {
        return 0.0;
    }
    let mut running_min = f64::INFINITY;
    let mut drift = 0.0f64;
    for r in &record.rows {
        let w = r.energy_budget();
        drift = drift.max((w - running_min) / w0);
        running_min = running_min.min(w);
    }
    drift
}

/// `|int (rho(T) - rho_bar) - int (rho0 - rho_bar)| / |rho0 - rho_bar|_L1`.
pub fn mass_defect(initial: &State, last: &State, rho_bar: f64) -> f64 {
    let dx = initial.grid.dx();
    let m0: f64 = initial.rho.iter().map(|r| r - rho_bar).sum::<f64>() * dx;
    let m1: f64 = last.rho.iter().map(|r| r - rho_bar).sum::<f64>() * dx;
    let l1: f64 = initial.rho.iter().map(|r| (r - rho_bar).abs()).sum::<f64>() * dx;
    (m1 - m0).abs() / l1
}

/// Flux-identity residual at the manufactured state on `n` and `2n` cells.
pub fn flux_identity_residuals(params: &PhysParams, scheme: &SchemeConfig, n: usize) -> Result<(f64, f64)> {
    let m = Manufactured::standard(params);
    let eval = |n: usize| -> Result<f64> {
        let g = Grid1D::new(MMS_HALF_WIDTH, n)?;
        let s = m.state(&g, 0.0);
        let r = rhs(&s, params, scheme, Mode::Resistive)?;
        Ok(flux_identity_residual(&s, &r, params, &g))
    };
    Ok((eval(n)?, eval(2 * n)?))
}

pub fn mms_study(reconstruction: Reconstruction, integrator: TimeIntegrator) -> Result<OrderStudy> {
    let params = PhysParams { nu: 1e-2, ..Default::default() };
    let scheme = SchemeConfig {
        reconstruction,
        time_integrator: integrator,
        end_time: MMS_END_TIME,
        ..Default::default()
    };
    order_study(&Manufactured::standard(&params), &params, &scheme, Mode::Resistive, MMS_HALF_WIDTH, &MMS_GRIDS)
}

fn check_potential() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for gamma in [1.4, 2.0, 3.0] {
        for rho_bar in [1.0, 2.0] {
            let b = potential_bounds(gamma, rho_bar, 20_000);
            ok &= b.all_finite_positive() && b.c1 <= b.c2;
            detail.push(format!(
                "(g={gamma}, rb={rho_bar}): c1={:.4} c2={:.4} C1={:.4} C2={:.4}",
                b.c1, b.c2, b.big_c1, b.big_c2
            ));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn check_steady_state() -> Result<(bool, String)> {
    let p = PhysParams::default();
    let g = Grid1D::new(20.0, 2048)?;
    let s = State::far_field(g, &p);
    let scale = p.rho_bar.max(p.b_bar.abs()).max(1.0);
    let mut worst = 0.0f64;
    for rec in [Reconstruction::FirstOrderUpwind, Reconstruction::MusclMinmod] {
        for mode in [Mode::Resistive, Mode::NonResistive] {
            let sc = SchemeConfig { reconstruction: rec, ..Default::default() };
            worst = worst.max(rhs(&s, &p, &sc, mode)?.sup_norm());
        }
    }
    Ok((worst < STEADY_STATE_TOL * scale, format!("tendency sup-norm {worst:e}")))
}

fn check_conservation_and_energy() -> Result<Vec<CheckOutcome>> {
    let shared = SharedConfig::standard();
    let s0 = build_initial_state(&shared.scenario, &shared.params, &shared.grid)?;
    let out = run(&shared.scenario, &shared.params, &shared.scheme, &shared.grid, Mode::Resistive, RunMonitors::default())?;
    let defect = mass_defect(&s0, &out.state, shared.params.rho_bar);
    let drift = energy_budget_drift(&out.record);
    Ok(vec![
        CheckOutcome::new("mass_conservation", defect <= MASS_DEFECT_TOL, format!("relative mass defect {defect:e}")),
        CheckOutcome::new(
            "energy_inequality",
            drift <= ENERGY_DRIFT_TOL,
            format!("max relative increase of E + D_u + D_b: {drift:e}"),
        ),
    ])
}

fn check_mms(rec: Reconstruction, min_order: f64) -> Result<(bool, String)> {
    let study = mms_study(rec, TimeIntegrator::SspRk2)?;
    let o = study.min_order();
    Ok((o >= min_order, format!("orders {:?}, min {o:.3} (need >= {min_order})", study.orders)))
}

fn check_flux_identity() -> Result<(bool, String)> {
    let p = PhysParams::default();
    let (a, b) = flux_identity_residuals(&p, &SchemeConfig::default(), 1024)?;
    let c = a / b;
    Ok((
        c >= FLUX_IDENTITY_MIN_CONTRACTION,
        format!("residual {a:e} -> {b:e}, contraction {c:.3}"),
    ))
}

/// Every check in the battery, in a fixed order.
pub fn run_battery() -> Vec<CheckOutcome> {
    let mut out = vec![
        CheckOutcome::from_result("potential_energy_bounds", check_potential()),
        CheckOutcome::from_result("steady_state", check_steady_state()),
    ];
    match check_conservation_and_energy() {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckOutcome::new("standard_run", false, format!("error: {e}"))),
    }
    out.push(CheckOutcome::from_result(
        "mms_order_muscl_minmod",
        check_mms(Reconstruction::MusclMinmod, MUSCL_MIN_ORDER),
    ));
    out.push(CheckOutcome::from_result(
        "mms_order_first_order_upwind",
        check_mms(Reconstruction::FirstOrderUpwind, UPWIND_MIN_ORDER),
    ));
    out.push(CheckOutcome::from_result("flux_identity_two_grid", check_flux_identity()));
    out
}
