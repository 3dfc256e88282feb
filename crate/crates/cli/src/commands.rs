use std::path::{Path, PathBuf};

use mhd1d::fingerprint::{canonical_json, fingerprint};
use mhd1d::limit::{self, EntryStatus, SweepOptions};
use mhd1d::solver::{checkpoint_string, run, RunMonitors};
use mhd1d::verify::run_battery;

use crate::artifacts::{unix_seconds, BoundaryStatus, OutputDir, RunManifest};
use crate::config::{load_config, RunConfig};
use crate::CliError;

const DEFAULT_OUTPUT_DIR: &str = "mhd1d-out";

fn output_root(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Writes the resolved config and, once the command finishes, its manifest.
struct Session {
    out: OutputDir,
    command: &'static str,
    fingerprint: String,
    started: f64,
}

impl Session {
    fn open(command: &'static str, cfg: &RunConfig, flag: Option<PathBuf>) -> Result<Self, CliError> {
        let mut out = OutputDir::create(output_root(flag, cfg))?;
        out.write("config.json", &canonical_json(cfg))?;
        Ok(Self { out, command, fingerprint: fingerprint(cfg), started: unix_seconds() })
    }

    fn close(mut self, clipping_events: u64, boundary: BoundaryStatus, error: Option<&CliError>) -> Result<(), CliError> {
        let mut files = self.out.files().to_vec();
        files.push("manifest.json".into());
        let m = RunManifest {
            command: self.command.into(),
            config_fingerprint: self.fingerprint.clone(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: self.started,
            finished_unix: unix_seconds(),
            clipping_events,
            boundary_status: boundary,
            exit_code: error.map_or(0, |e| e.exit_code() as i32),
            error: error.map(|e| e.to_string()),
            files,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        self.out.write("manifest.json", &text)?;
        eprintln!("wrote {} files to {}", self.out.files().len(), self.out.root().display());
        Ok(())
    }
}

pub fn simulate(config: &Path, flag: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let mut session = Session::open("simulate", &cfg, flag)?;
    let shared = cfg.shared();
    match run(&shared.scenario, &shared.params, &shared.scheme, &shared.grid, cfg.mode, RunMonitors::default()) {
        Ok(out) => {
            session.out.write("diagnostics.csv", &out.record.to_csv())?;
            session.out.write("final_state.ckpt", &checkpoint_string(&out.state))?;
            eprintln!("t = {} reached in {} steps, {} clipping events", out.state.t, out.steps, out.clipping_events);
            session.close(out.clipping_events, BoundaryStatus::Ok, None)
        }
        Err(e) => {
            let err = CliError::from(e);
            let boundary = if matches!(err, CliError::Boundary(_)) { BoundaryStatus::Tripped } else { BoundaryStatus::NotRun };
            session.close(0, boundary, Some(&err))?;
            Err(err)
        }
    }
}

pub fn sweep(config: &Path, flag: Option<PathBuf>, jobs: Option<usize>) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let mut session = Session::open("sweep", &cfg, flag)?;
    let outcome = limit::sweep(&cfg.nu_list, &cfg.shared(), SweepOptions { jobs, pollution_guard: true })?;
    let report = &outcome.report;

    session.out.write("report.json", &report.to_json())?;
    for (k, r) in outcome.records.iter().enumerate() {
        session.out.write(&format!("diagnostics_{k:02}_nu_{:e}.csv", r.nu), &r.record.to_csv())?;
    }
    if let Some(nr) = &outcome.non_resistive {
        session.out.write("diagnostics_non_resistive.csv", &nr.to_csv())?;
    }
    let clipping: u64 = outcome.records.iter().filter_map(|r| r.record.last()).map(|row| row.clipping_count).sum();

    match report.slope() {
        Some(s) => eprintln!("fitted slope {s:.4}"),
        None => eprintln!("rate fit skipped"),
    }
    for f in &report.flags {
        eprintln!("flag: {f}");
    }

    // completed entries are already on disk; a failed entry decides the exit code
    let failure = report.entries.iter().find_map(|e| match &e.status {
        EntryStatus::Ok => None,
        EntryStatus::BoundaryAbort(m) => Some(CliError::Boundary(format!("nu = {:e}: {m}", e.nu))),
        EntryStatus::NumericalFailure(m) | EntryStatus::Failed(m) => Some(CliError::Numerical(format!("nu = {:e}: {m}", e.nu))),
    });
    let boundary = if report.entries.iter().any(|e| matches!(e.status, EntryStatus::BoundaryAbort(_))) {
        BoundaryStatus::Tripped
    } else {
        BoundaryStatus::Ok
    };
    session.close(clipping, boundary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

pub fn verify() -> Result<(), CliError> {
    let mut failed = Vec::new();
    for c in run_battery() {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed))
    }
}
