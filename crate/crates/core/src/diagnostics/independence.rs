use serde::{Deserialize, Serialize};

use super::record::{DiagnosticsRecord, DiagnosticsRow};
use crate::error::{Error, Result};

/// Relative spread above which a monitored quantity is flagged.
pub const SPREAD_TOLERANCE: f64 = 0.10;

/// Diagnostics of one resistive run within a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub nu: f64,
    /// Identifies everything except `nu`; must agree across the sweep.
    pub config_key: String,
    pub record: DiagnosticsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantitySpread {
    pub name: String,
    /// One value per `nu`, in input order.
    pub values: Vec<f64>,
    /// `(max - min) / max |value|`.
    pub spread: f64,
    /// Part of the flag set (false for quantities that contain `nu` by definition).
    pub monitored: bool,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub nu: Vec<f64>,
    pub quantities: Vec<QuantitySpread>,
}

impl IndependenceReport {
    pub fn all_within_tolerance(&self) -> bool {
        self.quantities.iter().all(|q| !q.flagged)
    }

    pub fn get(&self, name: &str) -> Option<&QuantitySpread> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &QuantitySpread> {
        self.quantities.iter().filter(|q| q.flagged)
    }
}

type Extract = fn(&DiagnosticsRecord) -> f64;

fn sup(f: fn(&DiagnosticsRow) -> f64) -> impl Fn(&DiagnosticsRecord) -> f64 {
    move |r| r.sup_of(f)
}

/// (name, extractor, monitored)
fn quantities() -> Vec<(&'static str, Box<dyn Fn(&DiagnosticsRecord) -> f64>, bool)> {
    let fin = |f: Extract| -> Box<dyn Fn(&DiagnosticsRecord) -> f64> { Box::new(f) };
    vec![
        ("sup_rho", Box::new(sup(|r| r.sup_rho)), true),
        ("sup_abs_b", Box::new(sup(|r| r.sup_abs_b)), true),
        ("sup_u_x_l2", Box::new(sup(|r| r.u_x_l2)), true),
        ("sup_rho_x_l2", Box::new(sup(|r| r.rho_x_l2)), true),
        ("sup_energy", Box::new(sup(|r| r.energy)), true),
        ("sup_weighted_energy", Box::new(sup(|r| r.weighted_energy)), true),
        ("dissipation_u", fin(|r| r.last().map_or(0.0, |x| x.dissipation_u)), true),
        ("weighted_dissipation_u", fin(|r| r.last().map_or(0.0, |x| x.weighted_dissipation_u)), true),
        ("sup_sqrt_rho_udot_l2", Box::new(sup(|r| r.sqrt_rho_udot_l2)), true),
        ("sup_rho_dev_l2", Box::new(sup(|r| r.rho_dev_l2)), true),
        ("sup_abs_u", Box::new(sup(|r| r.sup_abs_u)), true),
        ("sup_b_dev_l4_pow4", Box::new(sup(|r| r.b_dev_l4.powi(4))), true),
        (
            "b_dev_l6_pow6_time_integral",
            fin(|r| r.last().map_or(0.0, |x| x.b_dev_l6_pow6_time_integral)),
            true,
        ),
        ("sup_b_x_l2", Box::new(sup(|r| r.b_x_l2)), true),
        ("sup_rho_t_l2", Box::new(sup(|r| r.rho_t_l2)), true),
        ("dissipation_b", fin(|r| r.last().map_or(0.0, |x| x.dissipation_b)), false),
        ("weighted_dissipation_b", fin(|r| r.last().map_or(0.0, |x| x.weighted_dissipation_b)), false),
    ]
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = max.abs().max(min.abs());
    if scale == 0.0 {
        0.0
    } else {
        (max - min) / scale
    }
}

/// Spread of each monitored sup-in-time quantity across a resistivity sweep.
pub fn nu_independence_report(records: &[SweepRecord]) -> Result<IndependenceReport> {
    let mut problems = Vec::new();
    if records.len() < 3 {
        problems.push(format!("at least 3 nu values required (got {})", records.len()));
    }
    let nus: Vec<f64> = records.iter().map(|r| r.nu).collect();
    let positive: Vec<f64> = nus.iter().copied().filter(|&n| n > 0.0).collect();
    if positive.len() != nus.len() {
        problems.push("all nu must be > 0".into());
    } else if let (Some(hi), Some(lo)) = (
        positive.iter().copied().reduce(f64::max),
        positive.iter().copied().reduce(f64::min),
    ) {
        if hi / lo < 100.0 * (1.0 - 1e-12) {
            problems.push(format!("nu values must span >= 2 decades (got {lo:e}..{hi:e})"));
        }
    }
    if let Some(first) = records.first() {
        for r in &records[1..] {
            if r.config_key != first.config_key {
                problems.push(format!("nu = {:e}: configuration differs from nu = {:e}", r.nu, first.nu));
            }
            let same_times = r.record.len() == first.record.len()
                && r.record.rows.iter().zip(&first.record.rows).all(|(a, b)| a.t.to_bits() == b.t.to_bits());
            if !same_times {
                problems.push(format!("nu = {:e}: sample times differ", r.nu));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Invalid(problems));
    }

    let quantities = quantities()
        .into_iter()
        .map(|(name, f, monitored)| {
            let values: Vec<f64> = records.iter().map(|r| f(&r.record)).collect();
            let spread = relative_spread(&values);
            QuantitySpread {
                name: name.to_string(),
                flagged: monitored && !(spread <= SPREAD_TOLERANCE),
                values,
                spread,
                monitored,
            }
        })
        .collect();
    Ok(IndependenceReport { nu: nus, quantities })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(scale: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            rows: (0..3)
                .map(|k| DiagnosticsRow {
                    t: k as f64,
                    sup_rho: 1.2 * scale,
                    energy: 0.5,
                    dissipation_u: 0.1 * k as f64,
                    dissipation_b: 0.3 * scale * k as f64,
                    ..Default::default()
                })
                .collect(),
        }
    }

    fn sweep(scales: &[f64]) -> Vec<SweepRecord> {
        [1e-2, 1e-3, 1e-4]
            .iter()
            .zip(scales)
            .map(|(&nu, &s)| SweepRecord { nu, config_key: "k".into(), record: rec(s) })
            .collect()
    }

    #[test]
    fn identical_records_have_zero_spread() {
        let r = nu_independence_report(&sweep(&[1.0, 1.0, 1.0])).unwrap();
        assert!(r.quantities.iter().all(|q| q.spread == 0.0));
        assert!(r.all_within_tolerance());
    }

    #[test]
    fn resistive_dissipation_is_not_flagged() {
        let mut s = sweep(&[1.0, 1.0, 1.0]);
        for (k, e) in s.iter_mut().enumerate() {
            for row in e.record.rows.iter_mut() {
                row.dissipation_b *= 10f64.powi(-(k as i32));
            }
        }
        let r = nu_independence_report(&s).unwrap();
        let db = r.get("dissipation_b").unwrap();
        assert!(db.spread > 0.5 && !db.monitored && !db.flagged);
        assert!(r.all_within_tolerance());
    }

    #[test]
    fn large_spread_is_flagged() {
        let r = nu_independence_report(&sweep(&[1.0, 1.0, 1.5])).unwrap();
        assert!(r.get("sup_rho").unwrap().flagged);
        assert!(!r.all_within_tolerance());
    }

    #[test]
    fn rejects_mismatched_sweeps() {
        let mut s = sweep(&[1.0, 1.0, 1.0]);
        s[2].config_key = "other".into();
        assert!(nu_independence_report(&s).is_err());
        let mut s = sweep(&[1.0, 1.0, 1.0]);
        s[1].record.rows.pop();
        assert!(nu_independence_report(&s).is_err());
        let mut s = sweep(&[1.0, 1.0, 1.0]);
        s[2].nu = 5e-3;
        assert!(nu_independence_report(&s).is_err());
        assert!(nu_independence_report(&sweep(&[1.0, 1.0, 1.0])[..2]).is_err());
    }
}
