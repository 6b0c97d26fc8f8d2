//! Direct solvers for the implicit momentum blocks and the pressure Poisson problem.
//!
//! Every operator is a sum of an x-operator and a y-operator, so diagonalising the x-part once
//! per grid reduces each solve to independent tridiagonal systems in y (or, for the pressure,
//! to a diagonal after a second transform in y).

use nalgebra::DMatrix;

use crate::field::{Field2, VelocityField};
use crate::grid::{Grid, XMode};
use crate::linalg::{tridiag_matrix, tridiag_solve, SymEig};

/// 1D x-stiffness for the u faces: Σ (Δu)²/dx with Dirichlet or periodic ends.
fn x_stiffness_u(grid: &Grid) -> DMatrix<f64> {
    let h = grid.dx;
    match grid.x_mode {
        XMode::DirichletEnds => tridiag_matrix(&vec![2.0 / h; grid.nx - 1], &vec![-1.0 / h; grid.nx - 2]),
        XMode::Periodic => circulant(grid.nx, 2.0 / h, -1.0 / h),
    }
}

/// 1D x-stiffness for the v columns (cell centers); Dirichlet ends are half a cell away.
fn x_stiffness_v(grid: &Grid) -> DMatrix<f64> {
    let h = grid.dx;
    match grid.x_mode {
        XMode::DirichletEnds => {
            let mut d = vec![2.0 / h; grid.nx];
            d[0] = 3.0 / h;
            d[grid.nx - 1] = 3.0 / h;
            tridiag_matrix(&d, &vec![-1.0 / h; grid.nx - 1])
        }
        XMode::Periodic => circulant(grid.nx, 2.0 / h, -1.0 / h),
    }
}

/// Negative discrete Laplacian with zero-flux ends on `n` cells of width `h`.
fn neumann(n: usize, h: f64) -> DMatrix<f64> {
    let mut d = vec![2.0 / (h * h); n];
    d[0] = 1.0 / (h * h);
    d[n - 1] = 1.0 / (h * h);
    tridiag_matrix(&d, &vec![-1.0 / (h * h); n - 1])
}

fn circulant(n: usize, diag: f64, off: f64) -> DMatrix<f64> {
    let mut a = tridiag_matrix(&vec![diag; n], &vec![off; n - 1]);
    a[(0, n - 1)] += off;
    a[(n - 1, 0)] += off;
    a
}

/// Cached eigendecompositions for one grid.
#[derive(Debug, Clone)]
pub struct FastSolvers {
    grid: Grid,
    ux: SymEig,
    vx: SymEig,
    px: SymEig,
    py: SymEig,
}

/// Coefficients of M + τK for the momentum blocks.
#[derive(Debug, Clone, Copy)]
pub struct ImplicitCoeffs {
    /// θ·dt.
    pub tau: f64,
    /// Implicit viscosity.
    pub nu: f64,
    /// Boundary inertia β.
    pub beta: f64,
    /// α times the wall-law slope on the g nodes.
    pub slip: f64,
}

impl FastSolvers {
    pub fn new(grid: &Grid) -> Self {
        let (px, py) = match grid.x_mode {
            XMode::DirichletEnds => (neumann(grid.nx, grid.dx), neumann(grid.ny, grid.dy)),
            XMode::Periodic => (circulant(grid.nx, 2.0 / grid.dx.powi(2), -1.0 / grid.dx.powi(2)), neumann(grid.ny, grid.dy)),
        };
        Self {
            grid: *grid,
            ux: SymEig::new(x_stiffness_u(grid)),
            vx: SymEig::new(x_stiffness_v(grid)),
            px: SymEig::new(px),
            py: SymEig::new(py),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Solves (M + τK) x = rhs on the (g, u) block; `rhs` and result in integrated units.
    pub fn solve_u(&self, rhs: &VelocityField, c: &ImplicitCoeffs, out: &mut VelocityField) {
        let g = &self.grid;
        let cols: Vec<usize> = g.free_cols().collect();
        let m = cols.len();
        let nn = g.ny + 1;
        let mut r = DMatrix::zeros(nn, m);
        for (k, &i) in cols.iter().enumerate() {
            r[(0, k)] = rhs.g[i];
            for j in 0..g.ny {
                r[(j + 1, k)] = rhs.u.at(j, i);
            }
        }
        let mut hat = r * &self.ux.vectors;
        let (dx, dy) = (g.dx, g.dy);
        let link_wall = c.tau * c.nu * dx * 2.0 / dy;
        let link = c.tau * c.nu * dx / dy;
        let mut diag = vec![0.0; nn];
        let mut off = vec![0.0; nn - 1];
        let mut col = vec![0.0; nn];
        let mut work = Vec::with_capacity(nn);
        for k in 0..m {
            let lam = self.ux.values[k];
            diag[0] = dx * c.beta + link_wall + c.tau * c.slip * dx;
            off[0] = -link_wall;
            for rr in 1..nn {
                let below = if rr == 1 { link_wall } else { link };
                let above = if rr == nn - 1 { link_wall } else { link };
                diag[rr] = dx * dy + c.tau * c.nu * lam * dy + below + above;
                if rr < nn - 1 {
                    off[rr] = -link;
                }
            }
            for rr in 0..nn {
                col[rr] = hat[(rr, k)];
            }
            tridiag_solve(&diag, &off, &mut col, &mut work);
            for rr in 0..nn {
                hat[(rr, k)] = col[rr];
            }
        }
        let x = hat * self.ux.vectors.transpose();
        for (k, &i) in cols.iter().enumerate() {
            out.g[i] = x[(0, k)];
            for j in 0..g.ny {
                out.u.set(j, i, x[(j + 1, k)]);
            }
        }
    }

    /// Solves (M + τK) x = rhs on the v block.
    pub fn solve_v(&self, rhs: &VelocityField, c: &ImplicitCoeffs, out: &mut VelocityField) {
        let g = &self.grid;
        let nn = g.ny - 1;
        let m = g.nx;
        let mut r = DMatrix::zeros(nn, m);
        for j in 1..g.ny {
            for i in 0..m {
                r[(j - 1, i)] = rhs.v.at(j, i);
            }
        }
        let mut hat = r * &self.vx.vectors;
        let (dx, dy) = (g.dx, g.dy);
        let link = c.tau * c.nu * dx / dy;
        let off = vec![-link; nn.saturating_sub(1)];
        let mut diag = vec![0.0; nn];
        let mut col = vec![0.0; nn];
        let mut work = Vec::with_capacity(nn);
        for k in 0..m {
            let lam = self.vx.values[k];
            diag.iter_mut().for_each(|d| *d = dx * dy + c.tau * c.nu * lam * dy + 2.0 * link);
            for rr in 0..nn {
                col[rr] = hat[(rr, k)];
            }
            tridiag_solve(&diag, &off, &mut col, &mut work);
            for rr in 0..nn {
                hat[(rr, k)] = col[rr];
            }
        }
        let x = hat * self.vx.vectors.transpose();
        for j in 1..g.ny {
            for i in 0..m {
                out.v.set(j, i, x[(j - 1, i)]);
            }
        }
    }

    /// Solves D G φ = b with zero-mean φ; `b` must have zero mean.
    pub fn solve_pressure(&self, b: &Field2) -> Field2 {
        let g = &self.grid;
        let bm = DMatrix::from_row_slice(g.ny, g.nx, &b.data);
        let mut hat = self.py.vectors.transpose() * bm * &self.px.vectors;
        let scale = self.px.values.iter().chain(&self.py.values).fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..g.ny {
            for k in 0..g.nx {
                let lam = self.py.values[j] + self.px.values[k];
                hat[(j, k)] = if lam.abs() <= 1e-12 * scale { 0.0 } else { -hat[(j, k)] / lam };
            }
        }
        let phi = &self.py.vectors * hat * self.px.vectors.transpose();
        let mut out = Field2::zeros(g.ny, g.nx);
        for j in 0..g.ny {
            for i in 0..g.nx {
                out.set(j, i, phi[(j, i)]);
            }
        }
        out
    }
}

/// Discrete pressure gradient on the faces (pinned faces untouched).
pub fn pressure_gradient(phi: &Field2, grid: &Grid) -> VelocityField {
    let mut gr = VelocityField::zeros(grid);
    for j in 0..grid.ny {
        for i in grid.free_cols() {
            let (l, r) = (grid.cell_left_of_face(i), grid.cell_right_of_face(i));
            if let (Some(l), Some(r)) = (l, r) {
                gr.u.set(j, i, (phi.at(j, r) - phi.at(j, l)) / grid.dx);
            }
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            gr.v.set(j, i, (phi.at(j, i) - phi.at(j - 1, i)) / grid.dy);
        }
    }
    gr
}
