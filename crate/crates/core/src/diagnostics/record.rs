use crate::error::{Error, Result};

/// Column names of the CSV serialization, in order.
pub const COLUMNS: [&str; 25] = [
    "t",
    "energy",
    "weighted_energy",
    "dissipation_u",
    "dissipation_b",
    "weighted_dissipation_u",
    "weighted_dissipation_b",
    "sup_rho",
    "sup_abs_b",
    "sup_abs_u",
    "rho_dev_l2",
    "b_dev_l4",
    "b_dev_l6_pow6_time_integral",
    "u_x_l2",
    "b_x_l2",
    "rho_x_l2",
    "sqrt_rho_udot_l2",
    "flux_identity_residual",
    "xi_sup",
    "clipping_count",
    "rho_t_l2",
    "b_t_l2",
    "u_xx_l2",
    "u_xt_l2",
    "u_xt_l2_sq_time_integral",
];

/// One sample of every monitored functional.
///
/// The `*_time_integral` and `dissipation_*` columns are running integrals
/// from `t = 0`. `u_xt_l2_sq_time_integral` is integrated over the sample
/// times only, so it is a sub-sampled quadrature.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub energy: f64,
    pub weighted_energy: f64,
    pub dissipation_u: f64,
    pub dissipation_b: f64,
    pub weighted_dissipation_u: f64,
    pub weighted_dissipation_b: f64,
    pub sup_rho: f64,
    pub sup_abs_b: f64,
    pub sup_abs_u: f64,
    pub rho_dev_l2: f64,
    pub b_dev_l4: f64,
    pub b_dev_l6_pow6_time_integral: f64,
    pub u_x_l2: f64,
    pub b_x_l2: f64,
    pub rho_x_l2: f64,
    pub sqrt_rho_udot_l2: f64,
    pub flux_identity_residual: f64,
    pub xi_sup: f64,
    pub clipping_count: u64,
    pub rho_t_l2: f64,
    pub b_t_l2: f64,
    pub u_xx_l2: f64,
    pub u_xt_l2: f64,
    pub u_xt_l2_sq_time_integral: f64,
}

impl DiagnosticsRow {
    fn floats(&self) -> [f64; 24] {
        [
            self.t,
            self.energy,
            self.weighted_energy,
            self.dissipation_u,
            self.dissipation_b,
            self.weighted_dissipation_u,
            self.weighted_dissipation_b,
            self.sup_rho,
            self.sup_abs_b,
            self.sup_abs_u,
            self.rho_dev_l2,
            self.b_dev_l4,
            self.b_dev_l6_pow6_time_integral,
            self.u_x_l2,
            self.b_x_l2,
            self.rho_x_l2,
            self.sqrt_rho_udot_l2,
            self.flux_identity_residual,
            self.xi_sup,
            self.rho_t_l2,
            self.b_t_l2,
            self.u_xx_l2,
            self.u_xt_l2,
            self.u_xt_l2_sq_time_integral,
        ]
    }

    fn from_floats(v: [f64; 24], clipping_count: u64) -> Self {
        Self {
            t: v[0],
            energy: v[1],
            weighted_energy: v[2],
            dissipation_u: v[3],
            dissipation_b: v[4],
            weighted_dissipation_u: v[5],
            weighted_dissipation_b: v[6],
            sup_rho: v[7],
            sup_abs_b: v[8],
            sup_abs_u: v[9],
            rho_dev_l2: v[10],
            b_dev_l4: v[11],
            b_dev_l6_pow6_time_integral: v[12],
            u_x_l2: v[13],
            b_x_l2: v[14],
            rho_x_l2: v[15],
            sqrt_rho_udot_l2: v[16],
            flux_identity_residual: v[17],
            xi_sup: v[18],
            clipping_count,
            rho_t_l2: v[19],
            b_t_l2: v[20],
            u_xx_l2: v[21],
            u_xt_l2: v[22],
            u_xt_l2_sq_time_integral: v[23],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.floats().iter().all(|v| v.is_finite())
    }

    /// `E + D_u + D_b`, non-increasing for the continuous problem.
    pub fn energy_budget(&self) -> f64 {
        self.energy + self.dissipation_u + self.dissipation_b
    }
}

/// Index of `clipping_count` within `COLUMNS`.
const CLIP_COL: usize = 19;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticsRow> {
        self.rows.last()
    }

    /// Supremum over samples of one column.
    pub fn sup_of(&self, f: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
        self.rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks the record invariants: finite entries, strictly increasing
    /// times, non-decreasing accumulators.
    pub fn validate(&self) -> Result<()> {
        for (k, r) in self.rows.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::Domain(format!("non-finite diagnostics in row {k}")));
            }
        }
        for (k, w) in self.rows.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if b.t <= a.t {
                return Err(Error::Domain(format!("sample times not increasing at row {}", k + 1)));
            }
            let acc = |r: &DiagnosticsRow| {
                [
                    r.dissipation_u,
                    r.dissipation_b,
                    r.weighted_dissipation_u,
                    r.weighted_dissipation_b,
                    r.b_dev_l6_pow6_time_integral,
                    r.u_xt_l2_sq_time_integral,
                    r.clipping_count as f64,
                ]
            };
            if acc(a).iter().zip(acc(b)).any(|(x, y)| y < *x) {
                return Err(Error::Domain(format!("accumulator decreased at row {}", k + 1)));
            }
        }
        Ok(())
    }

    /// Header plus one row per sample, floats in 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = COLUMNS.join(",");
        s.push('\n');
        for r in &self.rows {
            let f = r.floats();
            let mut cells: Vec<String> = Vec::with_capacity(COLUMNS.len());
            for (k, v) in f.iter().enumerate() {
                if k == CLIP_COL {
                    cells.push(r.clipping_count.to_string());
                }
                cells.push(format!("{v:.16e}"));
            }
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or_default();
        if header.split(',').collect::<Vec<_>>() != COLUMNS {
            return Err(Error::Parse { line: 1, message: "unexpected header".into() });
        }
        let mut rows = Vec::new();
        for (k, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != COLUMNS.len() {
                return Err(Error::Parse {
                    line: k + 1,
                    message: format!("expected {} cells, found {}", COLUMNS.len(), cells.len()),
                });
            }
            let mut floats = [0.0; 24];
            let mut j = 0;
            let mut clip = 0;
            for (c, cell) in cells.iter().enumerate() {
                let bad = |e: String| Error::Parse { line: k + 1, message: format!("column {}: {e}", COLUMNS[c]) };
                if c == CLIP_COL {
                    clip = cell.parse::<u64>().map_err(|e| bad(e.to_string()))?;
                } else {
                    floats[j] = cell.parse::<f64>().map_err(|e| bad(e.to_string()))?;
                    j += 1;
                }
            }
            rows.push(DiagnosticsRow::from_floats(floats, clip));
        }
        Ok(Self { rows })
    }
}
