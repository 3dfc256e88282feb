//! Pointwise constitutive relations and derived fields: pressure, potential
//! energy, effective viscous flux, material derivative and the fast
//! magnetosonic speed bound.

use crate::error::{Error, Result};
use crate::grid::FieldScalar;
use crate::params::{PhysParams, RHO_FLOOR};
use crate::state::State;
use crate::stencil;

#[inline]
pub fn pressure_at(rho: f64, gamma: f64) -> f64 {
    rho.powf(gamma)
}

/// `Phi(rho) = (rho^g - rb^g - g rb^(g-1) (rho - rb)) / (g - 1)`.
#[inline]
pub fn potential_energy_at(rho: f64, gamma: f64, rho_bar: f64) -> f64 {
    let pb = rho_bar.powf(gamma);
    let v = (rho.powf(gamma) - pb - gamma * rho_bar.powf(gamma - 1.0) * (rho - rho_bar)) / (gamma - 1.0);
    // cancellation near rho_bar can leave a tiny negative residue
    v.max(0.0)
}

/// `|u| + sqrt(gamma rho^(gamma-1) + b^2 / rho)` with the density floored.
#[inline]
pub fn fast_speed_at(rho: f64, u: f64, b: f64, gamma: f64) -> f64 {
    let r = rho.max(RHO_FLOOR);
    u.abs() + (gamma * r.powf(gamma - 1.0) + b * b / r).sqrt()
}

fn check_density(rho: &[f64]) -> Result<()> {
    match rho.iter().position(|&r| !(r >= 0.0)) {
        Some(i) => Err(Error::Domain(format!("density {} < 0 at node {i}", rho[i]))),
        None => Ok(()),
    }
}

pub fn pressure(rho: &FieldScalar, gamma: f64) -> Result<FieldScalar> {
    check_density(&rho.values)?;
    Ok(FieldScalar {
        values: rho.iter().map(|&r| pressure_at(r, gamma)).collect(),
        grid: rho.grid,
    })
}

pub fn potential_energy(rho: &FieldScalar, gamma: f64, rho_bar: f64) -> Result<FieldScalar> {
    check_density(&rho.values)?;
    Ok(FieldScalar {
        values: rho.iter().map(|&r| potential_energy_at(r, gamma, rho_bar)).collect(),
        grid: rho.grid,
    })
}

/// `F = mu u_x - (P(rho) - P(rho_bar) + (b^2 - b_bar^2)/2)`.
pub fn effective_viscous_flux(state: &State, params: &PhysParams) -> FieldScalar {
    let u_x = stencil::derivative(&state.velocity(), state.grid.dx());
    FieldScalar {
        values: effective_flux_values(&state.rho, &u_x, &state.b, params),
        grid: state.grid,
    }
}

pub(crate) fn effective_flux_values(rho: &[f64], u_x: &[f64], b: &[f64], p: &PhysParams) -> Vec<f64> {
    let pb = pressure_at(p.rho_bar, p.gamma);
    let bb2 = p.b_bar * p.b_bar;
    rho.iter()
        .zip(u_x)
        .zip(b)
        .map(|((&r, &ux), &b)| p.mu * ux - (pressure_at(r, p.gamma) - pb + 0.5 * (b * b - bb2)))
        .collect()
}

/// `u_dot = u_t + u u_x`.
pub fn material_derivative(state: &State, u_t: &FieldScalar) -> FieldScalar {
    let u = state.velocity();
    let u_x = stencil::derivative(&u, state.grid.dx());
    FieldScalar {
        values: (0..u.len()).map(|i| u_t[i] + u[i] * u_x[i]).collect(),
        grid: state.grid,
    }
}

pub fn fast_speed(state: &State, params: &PhysParams) -> FieldScalar {
    FieldScalar {
        values: (0..state.len())
            .map(|i| fast_speed_at(state.rho[i], state.velocity_at(i), state.b[i], params.gamma))
            .collect(),
        grid: state.grid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use proptest::prelude::*;

    fn field(v: Vec<f64>) -> FieldScalar {
        let g = Grid1D::new(1.0, v.len()).unwrap();
        FieldScalar::new(v, g).unwrap()
    }

    #[test]
    fn pressure_values() {
        let p = pressure(&field(vec![1.0, 0.0, 2.0]), 2.0).unwrap();
        assert_eq!(p.values, vec![1.0, 0.0, 4.0]);
        assert_eq!(pressure_at(1.0, 1.4), 1.0);
        assert!(pressure(&field(vec![1.0, -0.1, 1.0]), 2.0).is_err());
    }

    #[test]
    fn potential_energy_values() {
        assert_eq!(potential_energy_at(1.0, 2.0, 1.0), 0.0);
        assert_eq!(potential_energy_at(3.0, 1.4, 3.0), 0.0);
        assert_eq!(potential_energy_at(2.0, 2.0, 1.0), 1.0);
        assert_eq!(potential_energy_at(0.0, 2.0, 1.0), 1.0);
        assert!(potential_energy(&field(vec![-1.0, 1.0, 1.0]), 2.0, 1.0).is_err());
    }

    #[test]
    fn fast_speed_values() {
        assert!((fast_speed_at(1.0, 0.0, 0.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((fast_speed_at(1.0, 3.0, 0.0, 2.0) - (2f64.sqrt() + 3.0)).abs() < 1e-15);
        let v = fast_speed_at(0.0, 0.0, 1.0, 1.4);
        assert!(v.is_finite() && v > 1e5);
    }

    #[test]
    fn flux_of_constant_state_vanishes() {
        let g = Grid1D::new(5.0, 16).unwrap();
        let p = PhysParams { b_bar: -1.7, rho_bar: 2.5, ..Default::default() };
        let s = State::far_field(g, &p);
        assert!(effective_viscous_flux(&s, &p).iter().all(|&f| f.abs() < 1e-14));
    }

    #[test]
    fn flux_of_linear_velocity() {
        let g = Grid1D::new(1.0, 12).unwrap();
        let p = PhysParams::default();
        let slope = 0.3;
        let u: Vec<f64> = g.coordinates().iter().map(|x| slope * x).collect();
        let s = State::from_primitive(g, vec![p.rho_bar; 12], &u, vec![p.b_bar; 12], 0.0).unwrap();
        for f in effective_viscous_flux(&s, &p).iter() {
            assert!((f - p.mu * slope).abs() < 1e-14);
        }
    }

    #[test]
    fn material_derivative_cases() {
        let g = Grid1D::new(1.0, 10).unwrap();
        let x = g.coordinates();
        let zero = FieldScalar::zeros(g);
        let rho = vec![1.0; 10];
        let b = vec![1.0; 10];

        let s = State::from_primitive(g, rho.clone(), &[0.0; 10], b.clone(), 0.0).unwrap();
        assert!(material_derivative(&s, &zero).iter().all(|&v| v == 0.0));

        let s = State::from_primitive(g, rho.clone(), &[0.7; 10], b.clone(), 0.0).unwrap();
        assert!(material_derivative(&s, &zero).iter().all(|&v| v.abs() < 1e-14));

        let s = State::from_primitive(g, rho, &x, b, 0.0).unwrap();
        let ud = material_derivative(&s, &zero);
        for i in 0..10 {
            assert!((ud[i] - x[i]).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn potential_energy_nonnegative_and_zero_only_at_far_field(
            rho in 0.0f64..20.0, gamma in 1.05f64..4.0, rho_bar in 1.0f64..4.0
        ) {
            let phi = potential_energy_at(rho, gamma, rho_bar);
            prop_assert!(phi >= 0.0 && phi.is_finite());
            if (rho - rho_bar).abs() > 1e-3 {
                prop_assert!(phi > 0.0);
            }
        }

        #[test]
        fn fields_keep_length_and_stay_finite(
            vals in proptest::collection::vec(0.0f64..5.0, 3..40), gamma in 1.1f64..3.0
        ) {
            let f = field(vals);
            let p = pressure(&f, gamma).unwrap();
            let e = potential_energy(&f, gamma, 1.0).unwrap();
            prop_assert_eq!(p.len(), f.len());
            prop_assert_eq!(e.len(), f.len());
            prop_assert!(p.iter().chain(e.iter()).all(|v| v.is_finite()));
        }
    }
}
