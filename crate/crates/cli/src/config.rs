use std::path::{Path, PathBuf};

use mhd1d::limit::{validate_nu_list, SharedConfig};
use mhd1d::scenario::CustomProfile;
use mhd1d::solver::read_checkpoint;
use mhd1d::{Grid1D, Mode, PhysParams, Preset, ScenarioSpec, SchemeConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything one invocation needs. Missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysParams,
    pub scenario: ScenarioSpec,
    pub scheme: SchemeConfig,
    pub grid: Grid1D,
    pub mode: Mode,
    pub output_dir: Option<PathBuf>,
    /// Resistivities for `sweep`, strictly decreasing.
    pub nu_list: Vec<f64>,
    /// Checkpoint whose nodal values become a custom initial profile.
    /// Relative paths resolve against the config file's directory.
    pub initial_checkpoint: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysParams::default(),
            scenario: ScenarioSpec::default(),
            scheme: SchemeConfig::default(),
            grid: Grid1D::default(),
            mode: Mode::Resistive,
            output_dir: None,
            nu_list: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            initial_checkpoint: None,
        }
    }
}

fn prefixed(section: &str, items: Vec<String>) -> impl Iterator<Item = String> + '_ {
    items.into_iter().map(move |m| format!("{section}: {m}"))
}

impl RunConfig {
    /// Every violated invariant, each prefixed with the offending section.
    pub fn violations(&self) -> Vec<String> {
        let mut v: Vec<String> = Vec::new();
        v.extend(prefixed("params", self.params.violations()));
        v.extend(prefixed("scheme", self.scheme.violations()));
        v.extend(prefixed("grid", self.grid.violations()));
        if self.grid.violations().is_empty() {
            v.extend(prefixed("scenario", self.scenario.violations(&self.params, &self.grid)));
        }
        v.extend(prefixed("nu_list", validate_nu_list(&self.nu_list)));
        v
    }

    pub fn shared(&self) -> SharedConfig {
        SharedConfig { params: self.params, scenario: self.scenario.clone(), scheme: self.scheme, grid: self.grid }
    }

    /// Replace the scenario by the checkpoint's profile, if one is named.
    fn resolve_checkpoint(&mut self, base: &Path) -> Result<(), CliError> {
        let Some(rel) = self.initial_checkpoint.take() else { return Ok(()) };
        let path = base.join(&rel);
        let state = read_checkpoint(&path).map_err(|e| CliError::Config(vec![format!("initial_checkpoint: {}: {e}", path.display())]))?;
        if state.grid != self.grid {
            return Err(CliError::Config(vec![format!(
                "initial_checkpoint: grid (L = {}, n = {}) differs from grid (L = {}, n = {})",
                state.grid.half_width, state.grid.n_cells, self.grid.half_width, self.grid.n_cells
            )]));
        }
        self.scenario = ScenarioSpec {
            preset: Preset::Custom(CustomProfile { u: state.velocity(), rho: state.rho, b: state.b }),
            ..self.scenario.clone()
        };
        Ok(())
    }
}

pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.resolve_checkpoint(base)?;
    let v = cfg.violations();
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(v))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
