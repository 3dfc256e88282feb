use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density floor used only as a divisor (velocity recovery, `b^2/rho`).
/// The density field itself is never raised to this value.
pub const RHO_FLOOR: f64 = 1e-12;

/// Physical coefficients and far-field state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysParams {
    /// Viscosity, > 0.
    pub mu: f64,
    /// Resistivity, >= 0.
    pub nu: f64,
    /// Adiabatic exponent of `P = rho^gamma`, > 1.
    pub gamma: f64,
    /// Far-field density, >= 1.
    pub rho_bar: f64,
    /// Far-field magnetic field, non-zero.
    pub b_bar: f64,
    /// Exponent of the spatial weight `|x|^alpha`, in (1, 2].
    pub alpha: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            mu: 0.1,
            nu: 1e-3,
            gamma: 1.4,
            rho_bar: 1.0,
            b_bar: 1.0,
            alpha: 2.0,
        }
    }
}

impl PhysParams {
    pub fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Every violated invariant, phrased as the constraint that failed.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let finite = |x: f64| x.is_finite();
        if !(finite(self.mu) && self.mu > 0.0) {
            v.push(format!("mu > 0 (got {})", self.mu));
        }
        if !(finite(self.nu) && self.nu >= 0.0) {
            v.push(format!("nu >= 0 (got {})", self.nu));
        }
        if !(finite(self.gamma) && self.gamma > 1.0) {
            v.push(format!("gamma > 1 (got {})", self.gamma));
        }
        if !(finite(self.rho_bar) && self.rho_bar >= 1.0) {
            v.push(format!("rho_bar >= 1 (got {})", self.rho_bar));
        }
        if !(finite(self.b_bar) && self.b_bar != 0.0) {
            v.push(format!("b_bar != 0 (got {})", self.b_bar));
        }
        if !(finite(self.alpha) && self.alpha > 1.0 && self.alpha <= 2.0) {
            v.push(format!("1 < alpha <= 2 (got {})", self.alpha));
        }
        v
    }

    pub fn with_nu(self, nu: f64) -> Self {
        Self { nu, ..self }
    }
}
