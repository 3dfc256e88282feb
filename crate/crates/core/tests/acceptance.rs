//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mhd1d::diagnostics::{DiagnosticsRecord, SweepRecord};
use mhd1d::limit::{sweep, SharedConfig, SweepOptions, SweepOutcome, POLLUTION_FACTOR, RATE_WINDOW};
use mhd1d::scenario::build_initial_state;
use mhd1d::solver::{rhs, run, Mode, Reconstruction, RunMonitors, TimeIntegrator, ViscousTreatment};
use mhd1d::verify::{
    energy_budget_drift, flux_identity_residuals, mass_defect, mms_study, potential_bounds, ENERGY_DRIFT_TOL,
    FLUX_IDENTITY_MIN_CONTRACTION, MASS_DEFECT_TOL, MUSCL_MIN_ORDER, STEADY_STATE_TOL, UPWIND_MIN_ORDER,
};
use mhd1d::{Grid1D, PhysParams, ScenarioSpec, SchemeConfig, State};

const SWEEP_NU: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
const AUX_MIN_SLOPE: f64 = 0.8;
const SPREAD_MAX: f64 = 0.10;
/// Quantities whose spread across the sweep must stay below `SPREAD_MAX`.
const INDEPENDENT: [&str; 7] = [
    "sup_rho",
    "sup_abs_b",
    "sup_u_x_l2",
    "sup_rho_x_l2",
    "sup_energy",
    "sup_weighted_energy",
    "sup_sqrt_rho_udot_l2",
];

struct Verdict {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(v: &Verdict, secs: f64) {
    let tag = if v.passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {:>2} {:<28} {} ({secs:.1}s)", v.id, v.name, v.detail);
}

fn timed(list: &mut Vec<Verdict>, f: impl FnOnce() -> Vec<Verdict>) {
    let start = Instant::now();
    let vs = f();
    let secs = start.elapsed().as_secs_f64();
    for v in vs {
        report(&v, secs);
        list.push(v);
    }
}

fn fail(id: usize, name: &'static str, e: impl std::fmt::Display) -> Verdict {
    Verdict { id, name, passed: false, detail: format!("error: {e}") }
}

fn sweep_criteria(outcome: &SweepOutcome) -> Vec<Verdict> {
    let r = &outcome.report;
    let e_total: Vec<String> = r.entries.iter().map(|e| format!("{:.3e}", e.e_total)).collect();

    // a super-linear slope is reported as a flag; only the lower edge is asserted
    let rate = match (r.fit, &r.pollution_guard) {
        (Some(fit), Some(g)) => {
            let rate_ok = fit.slope >= RATE_WINDOW.0;
            let u_slope = r.u_fit.map(|f| f.slope).unwrap_or(f64::NAN);
            Verdict {
                id: 1,
                name: "non_resistive_rate",
                passed: rate_ok && u_slope >= RATE_WINDOW.0 && g.passed,
                detail: format!(
                    "slope {:.4} >= {} (super-linear above {}: {}); u slope {u_slope:.4}; guard e_total(min nu) {:.3e} > {POLLUTION_FACTOR} x proxy {:.3e}: {}; e_total {e_total:?}",
                    fit.slope, RATE_WINDOW.0, RATE_WINDOW.1, fit.slope > RATE_WINDOW.1, g.smallest_nu_error, g.proxy, g.passed
                ),
            }
        }
        _ => Verdict { id: 1, name: "non_resistive_rate", passed: false, detail: format!("flags {:?}", r.flags) },
    };

    let aux_values: Vec<String> = r.entries.iter().map(|e| format!("{:.3e}", e.aux)).collect();
    let decreasing = r.entries.windows(2).all(|w| w[1].aux < w[0].aux);
    let aux = match r.aux_fit {
        Some(f) => Verdict {
            id: 2,
            name: "resistive_flux_vanishes",
            passed: decreasing && f.slope >= AUX_MIN_SLOPE,
            detail: format!("slope {:.4} >= {AUX_MIN_SLOPE}, decreasing {decreasing}, values {aux_values:?}", f.slope),
        },
        None => Verdict { id: 2, name: "resistive_flux_vanishes", passed: false, detail: "no aux fit".into() },
    };

    let indep = match &r.independence {
        Some(ind) => {
            let mut worst = 0.0f64;
            let mut parts = Vec::new();
            let mut ok = true;
            for name in INDEPENDENT {
                match ind.get(name) {
                    Some(q) => {
                        ok &= q.spread <= SPREAD_MAX;
                        worst = worst.max(q.spread);
                        parts.push(format!("{name}={:.4}", q.spread));
                    }
                    None => {
                        ok = false;
                        parts.push(format!("{name}=missing"));
                    }
                }
            }
            Verdict {
                id: 3,
                name: "nu_independent_bounds",
                passed: ok,
                detail: format!("max spread {worst:.4} <= {SPREAD_MAX}: {}", parts.join(" ")),
            }
        }
        None => Verdict { id: 3, name: "nu_independent_bounds", passed: false, detail: "no independence report".into() },
    };
    vec![rate, aux, indep]
}

fn standard_run_criteria() -> Vec<Verdict> {
    let shared = SharedConfig::standard();
    let s0 = match build_initial_state(&shared.scenario, &shared.params, &shared.grid) {
        Ok(s) => s,
        Err(e) => return vec![fail(4, "energy_inequality", &e), fail(6, "steady_state_and_mass", e)],
    };
    let out = match run(&shared.scenario, &shared.params, &shared.scheme, &shared.grid, Mode::Resistive, RunMonitors::default()) {
        Ok(o) => o,
        Err(e) => return vec![fail(4, "energy_inequality", &e), fail(6, "steady_state_and_mass", e)],
    };
    let drift = energy_budget_drift(&out.record);
    let energy = Verdict {
        id: 4,
        name: "energy_inequality",
        passed: drift <= ENERGY_DRIFT_TOL,
        detail: format!("max relative increase of E + D_u + D_b {drift:.3e} <= {ENERGY_DRIFT_TOL:e}"),
    };

    let defect = mass_defect(&s0, &out.state, shared.params.rho_bar);
    let steady = steady_tendency(&shared.params);
    let steady_ok = matches!(steady, Ok(s) if s < STEADY_STATE_TOL);
    let conservation = Verdict {
        id: 6,
        name: "steady_state_and_mass",
        passed: steady_ok && defect <= MASS_DEFECT_TOL,
        detail: format!(
            "far-field tendency {} < {STEADY_STATE_TOL:e}; relative mass defect {defect:.3e} <= {MASS_DEFECT_TOL:e}",
            match steady {
                Ok(s) => format!("{s:.3e}"),
                Err(e) => format!("error {e}"),
            }
        ),
    };
    vec![energy, conservation]
}

fn steady_tendency(p: &PhysParams) -> mhd1d::Result<f64> {
    let g = Grid1D::new(20.0, 2048)?;
    let s = State::far_field(g, p);
    let mut worst = 0.0f64;
    for reconstruction in [Reconstruction::FirstOrderUpwind, Reconstruction::MusclMinmod] {
        for mode in [Mode::Resistive, Mode::NonResistive] {
            let sc = SchemeConfig { reconstruction, ..Default::default() };
            worst = worst.max(rhs(&s, p, &sc, mode)?.sup_norm());
        }
    }
    Ok(worst)
}

fn mms_criterion() -> Vec<Verdict> {
    let mut detail = Vec::new();
    let mut ok = true;
    for (rec, need) in [(Reconstruction::MusclMinmod, MUSCL_MIN_ORDER), (Reconstruction::FirstOrderUpwind, UPWIND_MIN_ORDER)] {
        match mms_study(rec, TimeIntegrator::SspRk2) {
            Ok(st) => {
                let o = st.min_order();
                ok &= o >= need;
                detail.push(format!("{rec:?}: min order {o:.3} >= {need} (orders {:?})", st.orders));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{rec:?}: error {e}"));
            }
        }
    }
    vec![Verdict { id: 5, name: "mms_order", passed: ok, detail: detail.join("; ") }]
}

fn potential_criterion() -> Vec<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [1.4, 2.0, 3.0] {
        for rho_bar in [1.0, 2.0] {
            let b = potential_bounds(gamma, rho_bar, 20_000);
            ok &= b.all_finite_positive();
            parts.push(format!("({gamma},{rho_bar}):c1={:.3},c2={:.3},C1={:.3},C2={:.3}", b.c1, b.c2, b.big_c1, b.big_c2));
        }
    }
    vec![Verdict { id: 7, name: "potential_energy_bounds", passed: ok, detail: parts.join(" ") }]
}

fn flux_identity_criterion() -> Vec<Verdict> {
    let v = match flux_identity_residuals(&PhysParams::default(), &SchemeConfig::default(), 1024) {
        Ok((a, b)) => Verdict {
            id: 8,
            name: "flux_identity",
            passed: a / b >= FLUX_IDENTITY_MIN_CONTRACTION,
            detail: format!("residual {a:.3e} -> {b:.3e}, contraction {:.3} >= {FLUX_IDENTITY_MIN_CONTRACTION}", a / b),
        },
        Err(e) => fail(8, "flux_identity", e),
    };
    vec![v]
}

fn vacuum_criterion() -> Vec<Verdict> {
    let params = PhysParams::default();
    // b0 vanishes with rho0 so that b^2 / rho stays bounded at the vacuum node
    let scenario = ScenarioSpec::interior_vacuum(0.2, -params.b_bar, 2.0);
    let scheme = SchemeConfig { viscous: ViscousTreatment::Implicit, ..Default::default() };
    let grid = Grid1D { half_width: 20.0, n_cells: 2048 };
    let v = match run(&scenario, &params, &scheme, &grid, Mode::Resistive, RunMonitors::default()) {
        Ok(out) => {
            let t_end = out.record.last().map(|r| r.t).unwrap_or(f64::NAN);
            let finite = out.record.rows.iter().all(|r| r.is_finite());
            Verdict {
                id: 9,
                name: "vacuum_robustness",
                passed: out.clipping_events == 0 && finite && t_end == scheme.end_time,
                detail: format!(
                    "reached t={t_end}, clipping events {}, all diagnostics finite {finite}, steps {}",
                    out.clipping_events, out.steps
                ),
            }
        }
        Err(e) => fail(9, "vacuum_robustness", e),
    };
    vec![v]
}

fn csv_of(record: &DiagnosticsRecord) -> String {
    record.to_csv()
}

fn determinism_criterion(first: &SweepOutcome) -> Vec<Verdict> {
    let shared = SharedConfig::standard();
    let run_once = || run(&shared.scenario, &shared.params, &shared.scheme, &shared.grid, Mode::Resistive, RunMonitors::default());
    let runs_equal = match (run_once(), run_once()) {
        (Ok(a), Ok(b)) => csv_of(&a.record) == csv_of(&b.record),
        _ => false,
    };
    // a second sweep on a different worker count
    let again = sweep(&SWEEP_NU, &shared, SweepOptions { jobs: Some(1), ..Default::default() });
    let sweeps_equal = match &again {
        Ok(o) => {
            o.report.to_json() == first.report.to_json()
                && records_equal(&o.records, &first.records)
        }
        Err(_) => false,
    };
    vec![Verdict {
        id: 10,
        name: "determinism",
        passed: runs_equal && sweeps_equal,
        detail: format!("repeated run CSV identical {runs_equal}; repeated sweep report and CSVs identical {sweeps_equal}"),
    }]
}

fn records_equal(a: &[SweepRecord], b: &[SweepRecord]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.nu == y.nu && csv_of(&x.record) == csv_of(&y.record))
}

fn main() -> ExitCode {
    let mut verdicts = Vec::new();
    timed(&mut verdicts, potential_criterion);
    timed(&mut verdicts, flux_identity_criterion);
    timed(&mut verdicts, standard_run_criteria);
    timed(&mut verdicts, mms_criterion);
    timed(&mut verdicts, vacuum_criterion);

    let start = Instant::now();
    let outcome = sweep(&SWEEP_NU, &SharedConfig::standard(), SweepOptions::default());
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(o) => {
            for v in sweep_criteria(o) {
                report(&v, secs);
                verdicts.push(v);
            }
            println!("       sweep flags: {:?}", o.report.flags);
            timed(&mut verdicts, || determinism_criterion(o));
        }
        Err(e) => {
            for (id, name) in [(1, "non_resistive_rate"), (2, "resistive_flux_vanishes"), (3, "nu_independent_bounds"), (10, "determinism")] {
                let v = fail(id, name, e);
                report(&v, secs);
                verdicts.push(v);
            }
        }
    }

    verdicts.sort_by_key(|v| v.id);
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.passed).map(|v| format!("{} {}", v.id, v.name)).collect();
    println!("acceptance: {} of {} criteria passed", verdicts.len() - failed.len(), verdicts.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
