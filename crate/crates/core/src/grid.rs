//! Staggered (MAC) grid on the truncated channel (−n, n) × (0, 1).
//!
//! Index conventions:
//! - `u` lives on vertical faces `x_i = −n + i·dx` at row centers `y_j = (j+½)·dy`.
//!   In `DirichletEnds` mode faces `0..=nx` are stored and the two end faces are pinned to zero;
//!   in `Periodic` mode faces `0..nx` are stored and face `nx` wraps to face `0`.
//! - `v` lives on horizontal faces `y_j = j·dy`, `j = 0..=ny`, at column centers; rows `0` and `ny` are walls.
//! - `g` is the bottom-wall value of `u`, stored on the same x-positions as `u`.
//! - `p` is cell centered, `ny × nx`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Treatment of the truncation ends x = ±n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XMode {
    /// Velocity vanishes on x = ±n.
    #[default]
    DirichletEnds,
    /// Velocity is 2n-periodic in x.
    Periodic,
}

impl XMode {
    pub fn code(self) -> u64 {
        match self {
            XMode::DirichletEnds => 0,
            XMode::Periodic => 1,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        match code {
            0 => Some(XMode::DirichletEnds),
            1 => Some(XMode::Periodic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_trunc: usize,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x_mode: XMode,
    /// Channel height; 1 for every grid built from parameters, 2 for reflected grids.
    pub(crate) ly: f64,
    /// Lowest y coordinate; 0 except for reflected grids.
    pub(crate) y0: f64,
}

/// Validates sizes and builds the unit-channel grid.
pub fn build_grid(params: &PhysicalParams, n_trunc: usize, nx: usize, ny: usize, x_mode: XMode) -> Result<Grid> {
    params.validate()?;
    Grid::new(n_trunc, nx, ny, x_mode)
}

impl Grid {
    pub fn new(n_trunc: usize, nx: usize, ny: usize, x_mode: XMode) -> Result<Self> {
        if n_trunc == 0 {
            return Err(Error::InvalidParams("n_trunc must be at least 1".into()));
        }
        if nx < 4 || ny < 4 {
            return Err(Error::GridTooCoarse { nx, ny });
        }
        Ok(Self { n_trunc, nx, ny, dx: 2.0 * n_trunc as f64 / nx as f64, dy: 1.0 / ny as f64, x_mode, ly: 1.0, y0: 0.0 })
    }

    pub(crate) fn with_height(self, ny: usize, ly: f64, y0: f64) -> Self {
        Self { ny, dy: ly / ny as f64, ly, y0, ..self }
    }

    pub fn periodic(&self) -> bool {
        self.x_mode == XMode::Periodic
    }

    /// Number of stored u columns.
    pub fn nux(&self) -> usize {
        match self.x_mode {
            XMode::DirichletEnds => self.nx + 1,
            XMode::Periodic => self.nx,
        }
    }

    /// Range of u columns that carry unknowns.
    pub fn free_cols(&self) -> std::ops::Range<usize> {
        match self.x_mode {
            XMode::DirichletEnds => 1..self.nx,
            XMode::Periodic => 0..self.nx,
        }
    }

    pub fn x_face(&self, i: usize) -> f64 {
        -(self.n_trunc as f64) + i as f64 * self.dx
    }

    pub fn x_center(&self, i: usize) -> f64 {
        -(self.n_trunc as f64) + (i as f64 + 0.5) * self.dx
    }

    pub fn y_row(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    pub fn y_line(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn height(&self) -> f64 {
        self.ly
    }

    /// Area of the truncated domain.
    pub fn area(&self) -> f64 {
        2.0 * self.n_trunc as f64 * self.ly
    }

    /// Length of the truncated wall.
    pub fn wall_length(&self) -> f64 {
        2.0 * self.n_trunc as f64
    }

    /// Quadrature weight of u column `i` along x (zero on pinned end faces).
    pub fn wx_face(&self, i: usize) -> f64 {
        match self.x_mode {
            XMode::Periodic => self.dx,
            XMode::DirichletEnds if i == 0 || i == self.nx => 0.0,
            XMode::DirichletEnds => self.dx,
        }
    }

    /// Cyclic or clamped neighbour index of a u face; `None` past a Dirichlet end.
    pub(crate) fn face_left(&self, i: usize) -> Option<usize> {
        match (self.x_mode, i) {
            (XMode::Periodic, 0) => Some(self.nx - 1),
            (_, 0) => None,
            _ => Some(i - 1),
        }
    }

    pub(crate) fn face_right(&self, i: usize) -> Option<usize> {
        match self.x_mode {
            XMode::Periodic => Some((i + 1) % self.nx),
            XMode::DirichletEnds if i >= self.nx => None,
            XMode::DirichletEnds => Some(i + 1),
        }
    }

    /// Index of the u face on the right of cell column `i`.
    pub(crate) fn right_face_of_cell(&self, i: usize) -> usize {
        match self.x_mode {
            XMode::Periodic => (i + 1) % self.nx,
            XMode::DirichletEnds => i + 1,
        }
    }

    /// Cell column left of face `i`; `None` at a Dirichlet end.
    pub(crate) fn cell_left_of_face(&self, i: usize) -> Option<usize> {
        match (self.x_mode, i) {
            (XMode::Periodic, 0) => Some(self.nx - 1),
            (_, 0) => None,
            _ => Some(i - 1),
        }
    }

    /// Cell column right of face `i`; `None` at a Dirichlet end.
    pub(crate) fn cell_right_of_face(&self, i: usize) -> Option<usize> {
        match self.x_mode {
            XMode::Periodic => Some(i % self.nx),
            XMode::DirichletEnds if i >= self.nx => None,
            XMode::DirichletEnds => Some(i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacings() {
        let g = Grid::new(1, 8, 4, XMode::DirichletEnds).unwrap();
        assert_eq!((g.dx, g.dy), (0.25, 0.25));
        let g = Grid::new(4, 64, 16, XMode::DirichletEnds).unwrap();
        assert_eq!((g.dx, g.dy), (0.125, 0.0625));
    }

    #[test]
    fn too_coarse() {
        let err = Grid::new(1, 2, 8, XMode::DirichletEnds).unwrap_err();
        assert!(err.to_string().contains("grid too coarse"));
        assert!(Grid::new(0, 8, 8, XMode::Periodic).is_err());
    }

    #[test]
    fn index_maps() {
        let d = Grid::new(2, 8, 4, XMode::DirichletEnds).unwrap();
        assert_eq!(d.nux(), 9);
        assert_eq!(d.free_cols(), 1..8);
        assert_eq!(d.x_face(0), -2.0);
        assert_eq!(d.x_face(8), 2.0);
        assert_eq!(d.face_right(8), None);
        assert_eq!(d.cell_left_of_face(0), None);
        let p = Grid::new(2, 8, 4, XMode::Periodic).unwrap();
        assert_eq!(p.nux(), 8);
        assert_eq!(p.face_left(0), Some(7));
        assert_eq!(p.right_face_of_cell(7), 0);
        assert_eq!(p.cell_right_of_face(7), Some(7));
    }
}
