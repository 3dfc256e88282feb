//! Plain-text checkpoint: a header `n_cells L t`, then one `x rho mom b`
//! row per node, every float in 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::state::State;

pub fn checkpoint_string(state: &State) -> String {
    let g = state.grid;
    let mut s = String::with_capacity(80 * (g.n_cells + 1));
    let _ = writeln!(s, "{} {:.16e} {:.16e}", g.n_cells, g.half_width, state.t);
    for i in 0..g.n_cells {
        let _ = writeln!(
            s,
            "{:.16e} {:.16e} {:.16e} {:.16e}",
            g.x(i),
            state.rho[i],
            state.mom[i],
            state.b[i]
        );
    }
    s
}

pub fn write_checkpoint(path: &Path, state: &State) -> Result<()> {
    std::fs::write(path, checkpoint_string(state))?;
    Ok(())
}

pub fn parse_checkpoint(text: &str) -> Result<State> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty checkpoint".into() })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(Error::Parse { line: 1, message: "header must be `n_cells L t`".into() });
    }
    let perr = |line: usize, e: &dyn std::fmt::Display| Error::Parse { line, message: e.to_string() };
    let n: usize = h[0].parse().map_err(|e| perr(1, &e))?;
    let l: f64 = h[1].parse().map_err(|e| perr(1, &e))?;
    let t: f64 = h[2].parse().map_err(|e| perr(1, &e))?;
    let grid = Grid1D::new(l, n)?;
    let (mut rho, mut mom, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (k, line) in lines {
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != 4 {
            return Err(Error::Parse { line: k + 1, message: "row must be `x rho mom b`".into() });
        }
        let mut v = [0.0; 4];
        for (j, c) in cells.iter().enumerate() {
            v[j] = c.parse().map_err(|e| perr(k + 1, &e))?;
        }
        rho.push(v[1]);
        mom.push(v[2]);
        b.push(v[3]);
    }
    if rho.len() != n {
        return Err(Error::Parse {
            line: rho.len() + 2,
            message: format!("expected {n} rows, found {}", rho.len()),
        });
    }
    State::new(grid, rho, mom, b, t)
}

pub fn read_checkpoint(path: &Path) -> Result<State> {
    parse_checkpoint(&std::fs::read_to_string(path)?)
}
