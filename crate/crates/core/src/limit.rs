//! Matched resistive / non-resistive runs across a resistivity grid, the
//! error functionals of the limit, and the log-log rate fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{lp_norm, nu_independence_report, IndependenceReport, Lp, SweepRecord};
use crate::error::{Error, Result};
use crate::fingerprint::fingerprint;
use crate::grid::Grid1D;
use crate::params::PhysParams;
use crate::scenario::{build_initial_state, ScenarioSpec};
use crate::solver::{clamp_dt, sample_times, Integrator, Mode, RunMonitors, RunOutput, SchemeConfig};
use crate::state::State;
use crate::stencil;

/// Acceptance window for the fitted rate.
pub const RATE_WINDOW: (f64, f64) = (0.75, 1.25);
/// The smallest-nu error must exceed this multiple of the discretization proxy.
pub const POLLUTION_FACTOR: f64 = 10.0;

/// Everything a sweep holds fixed across `nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedConfig {
    pub params: PhysParams,
    pub scenario: ScenarioSpec,
    pub scheme: SchemeConfig,
    pub grid: Grid1D,
}

impl SharedConfig {
    /// Gaussian bump with amplitudes 0.2 and width 2 on the default grid.
    pub fn standard() -> Self {
        Self {
            params: PhysParams::default(),
            scenario: ScenarioSpec::default(),
            scheme: SchemeConfig::default(),
            grid: Grid1D::default(),
        }
    }

    /// Fingerprint of the configuration with `nu` removed.
    pub fn key(&self) -> String {
        let mut c = self.clone();
        c.params.nu = 0.0;
        fingerprint(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "message")]
pub enum EntryStatus {
    Ok,
    NumericalFailure(String),
    BoundaryAbort(String),
    Failed(String),
}

/// Non-finite values (failed entries) serialize as `null`.
mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Error functionals for one `nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub nu: f64,
    /// `sup_t (|rho - rho~|^2 + |u - u~|^2 + |b - b~|^2)`.
    #[serde(with = "nullable")]
    pub e_sup: f64,
    /// `int_0^T mu |(u - u~)_x|^2 dt`.
    #[serde(with = "nullable")]
    pub e_diss: f64,
    #[serde(with = "nullable")]
    pub e_total: f64,
    /// `int_0^T |nu b_x|^2 dt`.
    #[serde(with = "nullable")]
    pub aux: f64,
    /// Component-wise sup of the squared differences.
    #[serde(with = "nullable")]
    pub e_sup_rho: f64,
    #[serde(with = "nullable")]
    pub e_sup_u: f64,
    #[serde(with = "nullable")]
    pub e_sup_b: f64,
    pub status: EntryStatus,
}

impl PairRecord {
    fn failed(nu: f64, status: EntryStatus) -> Self {
        Self {
            nu,
            e_sup: f64::NAN,
            e_diss: f64::NAN,
            e_total: f64::NAN,
            aux: f64::NAN,
            e_sup_rho: f64::NAN,
            e_sup_u: f64::NAN,
            e_sup_b: f64::NAN,
            status,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == EntryStatus::Ok
    }
}

pub struct PairOutcome {
    pub record: PairRecord,
    pub resistive: RunOutput,
    pub non_resistive: RunOutput,
}

fn sq_l2_diff(a: &[f64], b: &[f64], grid: &Grid1D) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    lp_norm(&d, Lp::L2, grid).powi(2)
}

#[derive(Debug, Clone, Copy, Default)]
struct PairTracker {
    sup_rho: f64,
    sup_u: f64,
    sup_b: f64,
    sup_total: f64,
    e_diss: f64,
    aux: f64,
    diss_rate: f64,
    aux_rate: f64,
}

impl PairTracker {
    fn rates(res: &State, non: &State, params: &PhysParams) -> (f64, f64, f64, f64, f64) {
        let g = &res.grid;
        let u = res.velocity();
        let ut = non.velocity();
        let d_rho = sq_l2_diff(&res.rho, &non.rho, g);
        let d_u = sq_l2_diff(&u, &ut, g);
        let d_b = sq_l2_diff(&res.b, &non.b, g);
        let du: Vec<f64> = u.iter().zip(&ut).map(|(a, b)| a - b).collect();
        let du_x = stencil::derivative(&du, g.dx());
        let diss = params.mu * lp_norm(&du_x, Lp::L2, g).powi(2);
        let b_x = stencil::derivative(&res.b, g.dx());
        let aux = (params.nu * lp_norm(&b_x, Lp::L2, g)).powi(2);
        (d_rho, d_u, d_b, diss, aux)
    }

    fn observe(&mut self, res: &State, non: &State, params: &PhysParams, dt: Option<f64>) {
        let (d_rho, d_u, d_b, diss, aux) = Self::rates(res, non, params);
        self.sup_rho = self.sup_rho.max(d_rho);
        self.sup_u = self.sup_u.max(d_u);
        self.sup_b = self.sup_b.max(d_b);
        self.sup_total = self.sup_total.max(d_rho + d_u + d_b);
        if let Some(dt) = dt {
            self.e_diss += 0.5 * dt * (self.diss_rate + diss);
            self.aux += 0.5 * dt * (self.aux_rate + aux);
        }
        self.diss_rate = diss;
        self.aux_rate = aux;
    }
}

/// Evolve the resistive system with `nu` and the non-resistive system in
/// lockstep. The resistive run's stability bound sets every step for both.
pub fn run_pair(nu: f64, shared: &SharedConfig) -> Result<PairOutcome> {
    let params = shared.params.with_nu(nu);
    let state0 = build_initial_state(&shared.scenario, &params, &shared.grid)?;
    let monitors = RunMonitors::default();
    let mut res = Integrator::new(state0.clone(), &params, &shared.scheme, Mode::Resistive, monitors)?;
    let mut non = Integrator::new(state0, &params, &shared.scheme, Mode::NonResistive, monitors)?;

    let mut tr = PairTracker::default();
    tr.observe(res.state(), non.state(), &params, None);
    res.sample()?;
    non.sample()?;
    for &target in &sample_times(&shared.scheme)[1..] {
        while res.state().t < target {
            let dt = clamp_dt(res.stable_dt(), res.state().t, target);
            let landing = dt == target - res.state().t;
            res.advance(dt)?;
            non.advance(dt)?;
            if landing {
                res.set_time(target);
                non.set_time(target);
            }
            tr.observe(res.state(), non.state(), &params, Some(dt));
        }
        res.sample()?;
        non.sample()?;
    }

    let record = PairRecord {
        nu,
        e_sup: tr.sup_total,
        e_diss: tr.e_diss,
        e_total: tr.sup_total + tr.e_diss,
        aux: tr.aux,
        e_sup_rho: tr.sup_rho,
        e_sup_u: tr.sup_u,
        e_sup_b: tr.sup_b,
        status: EntryStatus::Ok,
    };
    Ok(PairOutcome { record, resistive: res.into_output(), non_resistive: non.into_output() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares of `ln e` against `ln nu`.
pub fn fit_rate(nu: &[f64], errors: &[f64]) -> Result<RateFit> {
    if nu.len() != errors.len() {
        return Err(Error::Invalid(vec!["nu and error lists differ in length".into()]));
    }
    if nu.len() < 3 {
        return Err(Error::Degenerate(format!("rate fit needs >= 3 points (got {})", nu.len())));
    }
    if let Some(e) = errors.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Degenerate(format!("rate fit needs positive errors (got {e})")));
    }
    if let Some(n) = nu.iter().find(|&&n| !(n > 0.0)) {
        return Err(Error::Degenerate(format!("rate fit needs positive nu (got {n})")));
    }
    let xs: Vec<f64> = nu.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all nu values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit { slope, intercept, rms_residual: (rss / k).sqrt() })
}

/// Discretization-error proxy for the sweep's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollutionGuard {
    /// `sup_t` over sample times of the squared L2 distance between the
    /// non-resistive solutions on `n` and `2n` cells.
    pub proxy: f64,
    pub smallest_nu_error: f64,
    pub passed: bool,
}

/// Fine-grid values at the coarse nodes (cubic interpolation, linear at the ends).
fn restrict(fine: &[f64]) -> Vec<f64> {
    let n = fine.len() / 2;
    (0..n)
        .map(|i| {
            let (a, b) = (2 * i, 2 * i + 1);
            if i == 0 || i == n - 1 {
                0.5 * (fine[a] + fine[b])
            } else {
                (-fine[a - 1] + 9.0 * fine[a] + 9.0 * fine[b] - fine[b + 1]) / 16.0
            }
        })
        .collect()
}

fn states_at_samples(shared: &SharedConfig, grid: &Grid1D) -> Result<Vec<State>> {
    let state0 = build_initial_state(&shared.scenario, &shared.params, grid)?;
    let mut it = Integrator::new(state0, &shared.params, &shared.scheme, Mode::NonResistive, RunMonitors::default())?;
    let mut out = vec![it.state().clone()];
    for &target in &sample_times(&shared.scheme)[1..] {
        while it.state().t < target {
            let dt = clamp_dt(it.stable_dt(), it.state().t, target);
            let landing = dt == target - it.state().t;
            it.advance(dt)?;
            if landing {
                it.set_time(target);
            }
        }
        out.push(it.state().clone());
    }
    Ok(out)
}

/// Squared-L2 distance between non-resistive solutions on `n` and `2n` cells.
pub fn discretization_proxy(shared: &SharedConfig) -> Result<f64> {
    let coarse_grid = shared.grid;
    let fine_grid = coarse_grid.refined();
    let (coarse, fine) = rayon::join(
        || states_at_samples(shared, &coarse_grid),
        || states_at_samples(shared, &fine_grid),
    );
    let (coarse, fine) = (coarse?, fine?);
    let mut proxy = 0.0f64;
    for (c, f) in coarse.iter().zip(&fine) {
        let d = sq_l2_diff(&c.rho, &restrict(&f.rho), &coarse_grid)
            + sq_l2_diff(&c.velocity(), &restrict(&f.velocity()), &coarse_grid)
            + sq_l2_diff(&c.b, &restrict(&f.b), &coarse_grid);
        proxy = proxy.max(d);
    }
    Ok(proxy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Strictly decreasing.
    pub nu: Vec<f64>,
    pub entries: Vec<PairRecord>,
    /// Fit of `e_total` against `nu`; absent when the sweep is degenerate.
    pub fit: Option<RateFit>,
    /// Fit of `sup_t |u - u~|^2`.
    pub u_fit: Option<RateFit>,
    /// Fit of `int |nu b_x|^2 dt`.
    pub aux_fit: Option<RateFit>,
    pub pollution_guard: Option<PollutionGuard>,
    pub independence: Option<IndependenceReport>,
    pub flags: Vec<String>,
    pub config_fingerprint: String,
}

impl ConvergenceReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }
}

pub struct SweepOutcome {
    pub report: ConvergenceReport,
    /// Resistive-run diagnostics per successful `nu`, in sweep order.
    pub records: Vec<SweepRecord>,
    /// Non-resistive diagnostics (identical for every `nu`), when any pair ran.
    pub non_resistive: Option<crate::diagnostics::DiagnosticsRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads for concurrent pairs; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub pollution_guard: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { jobs: None, pollution_guard: true }
    }
}

pub fn validate_nu_list(nu_list: &[f64]) -> Vec<String> {
    let mut v = Vec::new();
    if nu_list.is_empty() {
        v.push("nu list must not be empty".into());
    }
    if nu_list.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        v.push("every nu > 0".into());
    }
    if nu_list.windows(2).any(|w| !(w[1] < w[0])) {
        v.push("nu list strictly decreasing".into());
    }
    v
}

/// Logarithmic grid of `points` values from `hi` down to `lo`.
pub fn log_nu_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

fn classify(e: Error) -> EntryStatus {
    match e {
        Error::BoundaryTrip { .. } => EntryStatus::BoundaryAbort(e.to_string()),
        Error::NonFinite { .. } => EntryStatus::NumericalFailure(e.to_string()),
        other => EntryStatus::Failed(other.to_string()),
    }
}

/// Run every pair, fit the rates and assemble the report. Failed pairs are
/// recorded in the report rather than aborting the sweep.
pub fn sweep(nu_list: &[f64], shared: &SharedConfig, options: SweepOptions) -> Result<SweepOutcome> {
    let mut problems = validate_nu_list(nu_list);
    problems.extend(shared.params.violations());
    problems.extend(shared.scheme.violations());
    problems.extend(shared.grid.violations());
    problems.extend(shared.scenario.violations(&shared.params, &shared.grid));
    if !problems.is_empty() {
        return Err(Error::Invalid(problems));
    }

    let work = || -> (Vec<Result<PairOutcome>>, Option<Result<f64>>) {
        let pairs = || nu_list.par_iter().map(|&nu| run_pair(nu, shared)).collect::<Vec<_>>();
        if options.pollution_guard {
            let (p, g) = rayon::join(pairs, || discretization_proxy(shared));
            (p, Some(g))
        } else {
            (pairs(), None)
        }
    };
    let (outcomes, proxy) = match options.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(work),
        None => work(),
    };

    let key = shared.key();
    let mut entries = Vec::with_capacity(nu_list.len());
    let mut records = Vec::new();
    let mut non_resistive = None;
    for (&nu, outcome) in nu_list.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                entries.push(o.record);
                records.push(SweepRecord { nu, config_key: key.clone(), record: o.resistive.record });
                non_resistive.get_or_insert(o.non_resistive.record);
            }
            Err(e) => entries.push(PairRecord::failed(nu, classify(e))),
        }
    }
    let report = assemble_report(nu_list, entries, &records, proxy, fingerprint(shared));
    Ok(SweepOutcome { report, records, non_resistive })
}

fn assemble_report(
    nu_list: &[f64],
    entries: Vec<PairRecord>,
    records: &[SweepRecord],
    proxy: Option<Result<f64>>,
    config_fingerprint: String,
) -> ConvergenceReport {
    let mut flags = Vec::new();
    let ok: Vec<&PairRecord> = entries.iter().filter(|e| e.is_ok()).collect();
    if ok.len() < entries.len() {
        flags.push(format!("failed_entries: {}", entries.len() - ok.len()));
    }
    let nus: Vec<f64> = ok.iter().map(|e| e.nu).collect();
    let mut try_fit = |name: &str, values: Vec<f64>| match fit_rate(&nus, &values) {
        Ok(f) => Some(f),
        Err(e) => {
            flags.push(format!("{name}_fit_skipped: {e}"));
            None
        }
    };
    let fit = try_fit("e_total", ok.iter().map(|e| e.e_total).collect());
    let u_fit = try_fit("u", ok.iter().map(|e| e.e_sup_u).collect());
    let aux_fit = try_fit("aux", ok.iter().map(|e| e.aux).collect());
    if fit.is_none() {
        flags.push("degenerate".into());
    }
    if let Some(f) = fit {
        if f.slope > RATE_WINDOW.1 {
            flags.push(format!("superlinear_rate: slope {:.4} > {}", f.slope, RATE_WINDOW.1));
        }
        if f.slope < RATE_WINDOW.0 {
            flags.push(format!("sublinear_rate: slope {:.4} < {}", f.slope, RATE_WINDOW.0));
        }
    }
    if ok.len() >= 2 && ok.windows(2).any(|w| w[1].e_total > w[0].e_total) {
        flags.push("e_total_not_monotone".into());
    }

    let pollution_guard = match proxy {
        Some(Ok(p)) => ok.last().map(|smallest| {
            let passed = smallest.e_total > POLLUTION_FACTOR * p;
            if !passed {
                flags.push(format!(
                    "pollution_guard_failed: e_total(nu = {:e}) = {:e} <= {} x proxy {:e}; refine the grid",
                    smallest.nu, smallest.e_total, POLLUTION_FACTOR, p
                ));
            }
            PollutionGuard { proxy: p, smallest_nu_error: smallest.e_total, passed }
        }),
        Some(Err(e)) => {
            flags.push(format!("pollution_guard_error: {e}"));
            None
        }
        None => None,
    };

    let independence = match nu_independence_report(records) {
        Ok(r) => {
            for q in r.flagged() {
                flags.push(format!("nu_dependent: {} spread {:.4}", q.name, q.spread));
            }
            Some(r)
        }
        Err(e) => {
            flags.push(format!("independence_skipped: {e}"));
            None
        }
    };

    ConvergenceReport {
        nu: nu_list.to_vec(),
        entries,
        fit,
        u_fit,
        aux_fit,
        pollution_guard,
        independence,
        flags,
        config_fingerprint,
    }
}
