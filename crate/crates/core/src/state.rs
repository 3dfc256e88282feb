use crate::error::{Error, Result};
use crate::grid::{FieldScalar, Grid1D};
use crate::params::{PhysParams, RHO_FLOOR};

/// Fields at one instant. Momentum `m = rho u` is the prognostic variable.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl State {
    pub fn new(grid: Grid1D, rho: Vec<f64>, mom: Vec<f64>, b: Vec<f64>, t: f64) -> Result<Self> {
        let s = Self { grid, rho, mom, b, t };
        s.check()?;
        Ok(s)
    }

    /// Constant far-field state `(rho_bar, 0, b_bar)`.
    pub fn far_field(grid: Grid1D, params: &PhysParams) -> Self {
        let n = grid.n_cells;
        Self {
            grid,
            rho: vec![params.rho_bar; n],
            mom: vec![0.0; n],
            b: vec![params.b_bar; n],
            t: 0.0,
        }
    }

    /// Build from primitive velocity instead of momentum.
    pub fn from_primitive(grid: Grid1D, rho: Vec<f64>, u: &[f64], b: Vec<f64>, t: f64) -> Result<Self> {
        if u.len() != rho.len() {
            return Err(Error::Domain("velocity length mismatch".into()));
        }
        let mom = rho.iter().zip(u).map(|(r, u)| r * u).collect();
        Self::new(grid, rho, mom, b, t)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.grid.n_cells;
        if self.rho.len() != n || self.mom.len() != n || self.b.len() != n {
            return Err(Error::Domain(format!(
                "field lengths ({}, {}, {}) do not match {} cells",
                self.rho.len(),
                self.mom.len(),
                self.b.len(),
                n
            )));
        }
        if let Some(i) = self.rho.iter().position(|&r| r < 0.0) {
            return Err(Error::Domain(format!("negative density {} at node {i}", self.rho[i])));
        }
        for (name, f) in [("rho", &self.rho), ("mom", &self.mom), ("b", &self.b)] {
            if let Some(i) = f.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field: name, node: i, t: self.t });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    #[inline]
    pub fn velocity_at(&self, i: usize) -> f64 {
        recover_velocity(self.mom[i], self.rho[i])
    }

    pub fn velocity(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.velocity_at(i)).collect()
    }

    pub fn velocity_field(&self) -> FieldScalar {
        FieldScalar { values: self.velocity(), grid: self.grid }
    }
}

/// `u = m / max(rho, RHO_FLOOR)`.
#[inline]
pub fn recover_velocity(mom: f64, rho: f64) -> f64 {
    mom / rho.max(RHO_FLOOR)
}
