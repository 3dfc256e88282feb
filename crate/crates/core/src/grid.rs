use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform cell-centred mesh on the truncated domain `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid1D {
    pub half_width: f64,
    pub n_cells: usize,
}

impl Default for Grid1D {
    fn default() -> Self {
        Self { half_width: 20.0, n_cells: 2048 }
    }
}

impl Grid1D {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        let g = Self { half_width, n_cells };
        let v = g.violations();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            v.push(format!("half_width > 0 (got {})", self.half_width));
        }
        if self.n_cells < 3 {
            v.push(format!("n_cells >= 3 (got {})", self.n_cells));
        }
        v
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_cells as f64
    }

    /// Coordinate of node `i`: `-L + (i + 1/2) dx`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    /// Same domain with twice as many cells.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            n_cells: 2 * self.n_cells,
        }
    }
}

/// Per-node scalar field tied to the grid it was sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldScalar {
    pub values: Vec<f64>,
    pub grid: Grid1D,
}

impl FieldScalar {
    pub fn new(values: Vec<f64>, grid: Grid1D) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::Domain(format!(
                "field length {} does not match grid with {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        Ok(Self { values, grid })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            values: vec![0.0; grid.n_cells],
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }
}

impl std::ops::Index<usize> for FieldScalar {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_cell_centres() {
        let g = Grid1D::new(2.0, 4).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert_eq!(g.coordinates(), vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn even_grid_is_symmetric() {
        let g = Grid1D::new(20.0, 2048).unwrap();
        let x = g.coordinates();
        for i in 0..g.n_cells {
            assert_eq!(x[i], -x[g.n_cells - 1 - i]);
        }
        assert!(x.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(Grid1D::new(0.0, 10).is_err());
        assert!(Grid1D::new(1.0, 1).is_err());
        match Grid1D::new(-1.0, 0) {
            Err(Error::Invalid(v)) => assert_eq!(v.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_length_checked() {
        let g = Grid1D::new(1.0, 5).unwrap();
        assert!(FieldScalar::new(vec![0.0; 4], g).is_err());
        assert_eq!(FieldScalar::zeros(g).len(), 5);
    }
}
