//! Discrete fields on the staggered grid and their file formats.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, XMode};

/// Dense row-major array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2 {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<f64>,
}

impl Field2 {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    #[inline]
    pub fn at(&self, j: usize, i: usize) -> f64 {
        self.data[j * self.ncols + i]
    }

    #[inline]
    pub fn at_mut(&mut self, j: usize, i: usize) -> &mut f64 {
        &mut self.data[j * self.ncols + i]
    }

    #[inline]
    pub fn set(&mut self, j: usize, i: usize, value: f64) {
        self.data[j * self.ncols + i] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Velocity (u, v) on Ω together with the wall slip trace g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityField {
    pub u: Field2,
    pub v: Field2,
    pub g: Vec<f64>,
}

impl VelocityField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { u: Field2::zeros(grid.ny, grid.nux()), v: Field2::zeros(grid.ny + 1, grid.nx), g: vec![0.0; grid.nux()] }
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        let ok = self.u.nrows == grid.ny
            && self.u.ncols == grid.nux()
            && self.v.nrows == grid.ny + 1
            && self.v.ncols == grid.nx
            && self.g.len() == grid.nux();
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "field u {}x{}, v {}x{}, g {} does not fit grid nx={} ny={} ({:?})",
                self.u.nrows,
                self.u.ncols,
                self.v.nrows,
                self.v.ncols,
                self.g.len(),
                grid.nx,
                grid.ny,
                grid.x_mode
            )))
        }
    }

    fn parts_mut(&mut self) -> [&mut [f64]; 3] {
        [&mut self.u.data, &mut self.v.data, &mut self.g]
    }

    fn parts(&self) -> [&[f64]; 3] {
        [&self.u.data, &self.v.data, &self.g]
    }

    /// self += a·x
    pub fn axpy(&mut self, a: f64, x: &VelocityField) {
        for (dst, src) in self.parts_mut().into_iter().zip(x.parts()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * s;
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for part in self.parts_mut() {
            part.iter_mut().for_each(|x| *x *= a);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// self − other
    pub fn minus(&self, other: &VelocityField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Plain Euclidean dot product of all stored values.
    pub(crate) fn raw_dot(&self, other: &VelocityField) -> f64 {
        self.parts().iter().zip(other.parts()).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs()).max(self.g.iter().fold(0.0, |m, x| m.max(x.abs())))
    }

    /// Zeroes every pinned entry: walls for v, top for u via storage, x ends in Dirichlet mode.
    pub fn enforce_pins(&mut self, grid: &Grid) {
        let nv = self.v.ncols;
        for i in 0..nv {
            self.v.set(0, i, 0.0);
            self.v.set(grid.ny, i, 0.0);
        }
        if grid.x_mode == XMode::DirichletEnds {
            for j in 0..grid.ny {
                self.u.set(j, 0, 0.0);
                self.u.set(j, grid.nx, 0.0);
            }
            self.g[0] = 0.0;
            self.g[grid.nx] = 0.0;
        }
    }
}

/// Solver state: velocity, slip trace, pressure and time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub vel: VelocityField,
    pub p: Field2,
    pub t: f64,
    /// Explicit terms of the previous step, used by Adams–Bashforth.
    #[serde(skip)]
    pub(crate) explicit_prev: Option<VelocityField>,
}

impl FlowState {
    pub fn zeros(grid: &Grid) -> Self {
        Self::from_velocity(VelocityField::zeros(grid), grid, 0.0)
    }

    pub fn from_velocity(vel: VelocityField, grid: &Grid, t: f64) -> Self {
        Self { vel, p: Field2::zeros(grid.ny, grid.nx), t, explicit_prev: None }
    }

    pub fn u(&self) -> &Field2 {
        &self.vel.u
    }

    pub fn v(&self) -> &Field2 {
        &self.vel.v
    }

    pub fn g(&self) -> &[f64] {
        &self.vel.g
    }

    /// Drops multistep history so the next step restarts with forward Euler.
    pub fn reset_history(&mut self) {
        self.explicit_prev = None;
    }

    /// Writes the flat little-endian binary layout.
    ///
    /// Header: `nx, ny, n_trunc, x_mode` as u64 then `t` as f64; body: `u`, `v`, `g`, `p` row-major f64.
    pub fn write_binary<W: Write>(&self, grid: &Grid, mut w: W) -> Result<()> {
        self.vel.check(grid)?;
        for h in [grid.nx as u64, grid.ny as u64, grid.n_trunc as u64, grid.x_mode.code()] {
            w.write_all(&h.to_le_bytes())?;
        }
        w.write_all(&self.t.to_le_bytes())?;
        for part in [&self.vel.u.data[..], &self.vel.v.data, &self.vel.g, &self.p.data] {
            for x in part {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<(Grid, FlowState)> {
        let mut b8 = [0u8; 8];
        let mut header = [0u64; 4];
        for h in header.iter_mut() {
            r.read_exact(&mut b8)?;
            *h = u64::from_le_bytes(b8);
        }
        r.read_exact(&mut b8)?;
        let t = f64::from_le_bytes(b8);
        let x_mode = XMode::from_code(header[3]).ok_or_else(|| Error::Format(format!("unknown x_mode {}", header[3])))?;
        let grid = Grid::new(header[2] as usize, header[0] as usize, header[1] as usize, x_mode)?;
        let mut state = FlowState::zeros(&grid);
        state.t = t;
        let mut fill = |dst: &mut [f64]| -> Result<()> {
            for x in dst.iter_mut() {
                r.read_exact(&mut b8)?;
                *x = f64::from_le_bytes(b8);
            }
            Ok(())
        };
        fill(&mut state.vel.u.data)?;
        fill(&mut state.vel.v.data)?;
        fill(&mut state.vel.g)?;
        fill(&mut state.p.data)?;
        Ok((grid, state))
    }

    /// CSV with columns `component,i,j,x,y,value`.
    pub fn write_csv<W: Write>(&self, grid: &Grid, mut w: W) -> Result<()> {
        writeln!(w, "component,i,j,x,y,value")?;
        for j in 0..grid.ny {
            for i in 0..grid.nux() {
                writeln!(w, "u,{i},{j},{},{},{:e}", grid.x_face(i), grid.y_row(j), self.vel.u.at(j, i))?;
            }
        }
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                writeln!(w, "v,{i},{j},{},{},{:e}", grid.x_center(i), grid.y_line(j), self.vel.v.at(j, i))?;
            }
        }
        for (i, g) in self.vel.g.iter().enumerate() {
            writeln!(w, "g,{i},0,{},0,{:e}", grid.x_face(i), g)?;
        }
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                writeln!(w, "p,{i},{j},{},{},{:e}", grid.x_center(i), grid.y_row(j), self.p.at(j, i))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        for mode in [XMode::DirichletEnds, XMode::Periodic] {
            let grid = Grid::new(2, 8, 4, mode).unwrap();
            let mut s = FlowState::zeros(&grid);
            for (k, x) in s.vel.u.data.iter_mut().enumerate() {
                *x = k as f64 * 0.5 - 3.0;
            }
            s.vel.v.set(2, 3, 1.25);
            s.vel.g[1] = -0.75;
            s.p.set(1, 1, 9.0);
            s.t = 0.375;
            let mut buf = Vec::new();
            s.write_binary(&grid, &mut buf).unwrap();
            assert_eq!(buf.len(), 8 * (5 + 4 * grid.nux() + 5 * 8 + grid.nux() + 4 * 8));
            let (g2, s2) = FlowState::read_binary(&buf[..]).unwrap();
            assert_eq!(g2, grid);
            assert_eq!(s2, s);
        }
    }

    #[test]
    fn csv_has_every_entry() {
        let grid = Grid::new(1, 4, 4, XMode::Periodic).unwrap();
        let s = FlowState::zeros(&grid);
        let mut buf = Vec::new();
        s.write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 16 + 20 + 4 + 16);
    }

    #[test]
    fn dimension_check() {
        let a = Grid::new(1, 4, 4, XMode::Periodic).unwrap();
        let b = Grid::new(1, 4, 4, XMode::DirichletEnds).unwrap();
        assert!(VelocityField::zeros(&a).check(&b).is_err());
    }
}
