//! Discrete derivatives, quadratures and the H/V norms.
//!
//! Derivatives of the staggered velocity live in two places: `∂x u` and `∂y v` at cell centers,
//! `∂y u` and `∂x v` at corners (u-face x positions × horizontal grid lines). A corner on a wall
//! or on a Dirichlet end sits half a cell from its neighbour, so its difference uses half the
//! spacing and its quadrature weight is halved in that direction. The bottom wall difference uses
//! the slip trace `g` as the wall value.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{Field2, VelocityField};
use crate::grid::{Grid, XMode};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct NormReport {
    pub l2_omega: f64,
    pub l2_gamma: f64,
    pub grad_l2: f64,
    pub symgrad_l2: f64,
    pub v_norm: f64,
    pub h_norm: f64,
    pub l4_omega: f64,
}

/// Discrete velocity gradient.
#[derive(Debug, Clone)]
pub struct Gradient {
    /// ∂x u at centers, ny × nx.
    pub ux: Field2,
    /// ∂y v at centers, ny × nx.
    pub vy: Field2,
    /// ∂y u at corners, (ny+1) × nux.
    pub uy: Field2,
    /// ∂x v at corners, (ny+1) × nux.
    pub vx: Field2,
}

#[inline]
pub(crate) fn corner_wx(grid: &Grid, i: usize) -> f64 {
    match grid.x_mode {
        XMode::DirichletEnds if i == 0 || i == grid.nx => 0.5 * grid.dx,
        _ => grid.dx,
    }
}

#[inline]
pub(crate) fn corner_wy(grid: &Grid, j: usize) -> f64 {
    if j == 0 || j == grid.ny {
        0.5 * grid.dy
    } else {
        grid.dy
    }
}

pub fn gradient(f: &VelocityField, grid: &Grid) -> Gradient {
    let (nx, ny, nux) = (grid.nx, grid.ny, grid.nux());
    let (dx, dy) = (grid.dx, grid.dy);
    let mut ux = Field2::zeros(ny, nx);
    let mut vy = Field2::zeros(ny, nx);
    for j in 0..ny {
        for i in 0..nx {
            let rf = grid.right_face_of_cell(i);
            ux.set(j, i, (f.u.at(j, rf) - f.u.at(j, i)) / dx);
            vy.set(j, i, (f.v.at(j + 1, i) - f.v.at(j, i)) / dy);
        }
    }
    let mut uy = Field2::zeros(ny + 1, nux);
    let mut vx = Field2::zeros(ny + 1, nux);
    for i in 0..nux {
        uy.set(0, i, (f.u.at(0, i) - f.g[i]) / (0.5 * dy));
        for j in 1..ny {
            uy.set(j, i, (f.u.at(j, i) - f.u.at(j - 1, i)) / dy);
        }
        uy.set(ny, i, -f.u.at(ny - 1, i) / (0.5 * dy));
        let len = corner_wx(grid, i);
        for j in 1..ny {
            let right = grid.cell_right_of_face(i).map_or(0.0, |c| f.v.at(j, c));
            let left = grid.cell_left_of_face(i).map_or(0.0, |c| f.v.at(j, c));
            vx.set(j, i, (right - left) / len);
        }
    }
    Gradient { ux, vy, uy, vx }
}

/// Adjoint of [`gradient`] under the quadrature weights: returns r with
/// r·δw = Σ_centers dxdy (tux δ∂xu + tvy δ∂yv) + Σ_corners w (tuy δ∂yu + tvx δ∂xv).
pub fn gradient_adjoint(tux: &Field2, tvy: &Field2, tuy: &Field2, tvx: &Field2, grid: &Grid) -> VelocityField {
    let (nx, ny, nux) = (grid.nx, grid.ny, grid.nux());
    let (dx, dy) = (grid.dx, grid.dy);
    let mut r = VelocityField::zeros(grid);
    let cw = dx * dy;
    for j in 0..ny {
        for i in 0..nx {
            let rf = grid.right_face_of_cell(i);
            let a = cw * tux.at(j, i) / dx;
            *r.u.at_mut(j, rf) += a;
            *r.u.at_mut(j, i) -= a;
            let b = cw * tvy.at(j, i) / dy;
            *r.v.at_mut(j + 1, i) += b;
            *r.v.at_mut(j, i) -= b;
        }
    }
    for i in 0..nux {
        let wx = corner_wx(grid, i);
        let c = wx * corner_wy(grid, 0) * tuy.at(0, i) / (0.5 * dy);
        *r.u.at_mut(0, i) += c;
        r.g[i] -= c;
        for j in 1..ny {
            let c = wx * dy * tuy.at(j, i) / dy;
            *r.u.at_mut(j, i) += c;
            *r.u.at_mut(j - 1, i) -= c;
        }
        let c = wx * corner_wy(grid, ny) * tuy.at(ny, i) / (0.5 * dy);
        *r.u.at_mut(ny - 1, i) -= c;
        for j in 1..ny {
            let d = wx * dy * tvx.at(j, i) / wx;
            if let Some(c) = grid.cell_right_of_face(i) {
                *r.v.at_mut(j, c) += d;
            }
            if let Some(c) = grid.cell_left_of_face(i) {
                *r.v.at_mut(j, c) -= d;
            }
        }
    }
    r.enforce_pins(grid);
    r
}

/// Symmetric gradient: D11, D22 at centers, D12 at corners.
#[derive(Debug, Clone)]
pub struct SymGrad {
    pub d11: Field2,
    pub d22: Field2,
    pub d12: Field2,
}

impl Gradient {
    pub fn sym(&self) -> SymGrad {
        let mut d12 = self.uy.clone();
        for (d, vx) in d12.data.iter_mut().zip(&self.vx.data) {
            *d = 0.5 * (*d + vx);
        }
        SymGrad { d11: self.ux.clone(), d22: self.vy.clone(), d12 }
    }

    pub fn norm_sq(&self, grid: &Grid) -> f64 {
        let cw = grid.dx * grid.dy;
        let centers: f64 = self.ux.data.iter().zip(&self.vy.data).map(|(a, b)| a * a + b * b).sum::<f64>() * cw;
        centers + corner_sum(grid, |j, i| self.uy.at(j, i).powi(2) + self.vx.at(j, i).powi(2))
    }
}

impl SymGrad {
    /// ‖D‖² = Σ (D11² + D22² + 2 D12²).
    pub fn norm_sq(&self, grid: &Grid) -> f64 {
        self.dot(self, grid)
    }

    /// Σ D:E with the same quadrature as [`SymGrad::norm_sq`].
    pub fn dot(&self, other: &SymGrad, grid: &Grid) -> f64 {
        let cw = grid.dx * grid.dy;
        let centers: f64 = (0..self.d11.data.len())
            .map(|k| self.d11.data[k] * other.d11.data[k] + self.d22.data[k] * other.d22.data[k])
            .sum::<f64>()
            * cw;
        centers + 2.0 * corner_sum(grid, |j, i| self.d12.at(j, i) * other.d12.at(j, i))
    }

    /// D12 averaged onto cell center (j, i).
    pub fn d12_at_center(&self, grid: &Grid, j: usize, i: usize) -> f64 {
        let rf = grid.right_face_of_cell(i);
        0.25 * (self.d12.at(j, i) + self.d12.at(j, rf) + self.d12.at(j + 1, i) + self.d12.at(j + 1, rf))
    }

    /// (D11, D22) averaged from the cells touching corner (j, i).
    pub fn diag_at_corner(&self, grid: &Grid, j: usize, i: usize) -> (f64, f64) {
        let mut s = (0.0, 0.0);
        let mut n = 0usize;
        let rows = [j.checked_sub(1), if j < grid.ny { Some(j) } else { None }];
        let cols = [grid.cell_left_of_face(i), grid.cell_right_of_face(i)];
        for r in rows.iter().flatten() {
            for c in cols.iter().flatten() {
                s.0 += self.d11.at(*r, *c);
                s.1 += self.d22.at(*r, *c);
                n += 1;
            }
        }
        if n == 0 {
            (0.0, 0.0)
        } else {
            (s.0 / n as f64, s.1 / n as f64)
        }
    }
}

fn corner_sum(grid: &Grid, f: impl Fn(usize, usize) -> f64) -> f64 {
    let mut s = 0.0;
    for j in 0..=grid.ny {
        let wy = corner_wy(grid, j);
        for i in 0..grid.nux() {
            s += wy * corner_wx(grid, i) * f(j, i);
        }
    }
    s
}

pub fn inner_l2(a: &VelocityField, b: &VelocityField, grid: &Grid) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nux() {
            s += grid.wx_face(i) * a.u.at(j, i) * b.u.at(j, i);
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            s += grid.dx * a.v.at(j, i) * b.v.at(j, i);
        }
    }
    s * grid.dy
}

pub fn inner_gamma(a: &VelocityField, b: &VelocityField, grid: &Grid) -> f64 {
    (0..grid.nux()).map(|i| grid.wx_face(i) * a.g[i] * b.g[i]).sum()
}

/// (a, b)_H = (a, b)_{L²(Ω)} + β (a, b)_{L²(Γ)}.
pub fn inner_h(a: &VelocityField, b: &VelocityField, grid: &Grid, beta: f64) -> f64 {
    inner_l2(a, b, grid) + beta * inner_gamma(a, b, grid)
}

pub fn l2_omega_sq(f: &VelocityField, grid: &Grid) -> f64 {
    inner_l2(f, f, grid)
}

pub fn l2_gamma_sq(f: &VelocityField, grid: &Grid) -> f64 {
    inner_gamma(f, f, grid)
}

pub fn grad_sq(f: &VelocityField, grid: &Grid) -> f64 {
    gradient(f, grid).norm_sq(grid)
}

pub fn symgrad_sq(f: &VelocityField, grid: &Grid) -> f64 {
    gradient(f, grid).sym().norm_sq(grid)
}

/// ‖u‖²_V = ‖Du‖² + α‖u‖²_Γ.
pub fn v_norm_sq(f: &VelocityField, grid: &Grid, alpha: f64) -> f64 {
    symgrad_sq(f, grid) + alpha * l2_gamma_sq(f, grid)
}

pub fn h_norm_sq(f: &VelocityField, grid: &Grid, beta: f64) -> f64 {
    inner_h(f, f, grid, beta)
}

/// Cell-centered velocity (u, v) at cell (j, i).
pub(crate) fn center_velocity(f: &VelocityField, grid: &Grid, j: usize, i: usize) -> (f64, f64) {
    let rf = grid.right_face_of_cell(i);
    (0.5 * (f.u.at(j, i) + f.u.at(j, rf)), 0.5 * (f.v.at(j, i) + f.v.at(j + 1, i)))
}

/// ∫|u|⁴ using cell-centered velocities.
pub fn l4_pow4(f: &VelocityField, grid: &Grid) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (a, b) = center_velocity(f, grid, j, i);
            s += (a * a + b * b).powi(2);
        }
    }
    s * grid.dx * grid.dy
}

/// Discrete divergence at cell centers.
pub fn divergence(f: &VelocityField, grid: &Grid) -> Field2 {
    let mut d = Field2::zeros(grid.ny, grid.nx);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let rf = grid.right_face_of_cell(i);
            d.set(j, i, (f.u.at(j, rf) - f.u.at(j, i)) / grid.dx + (f.v.at(j + 1, i) - f.v.at(j, i)) / grid.dy);
        }
    }
    d
}

pub fn compute_norms(f: &VelocityField, params: &PhysicalParams, grid: &Grid) -> Result<NormReport> {
    f.check(grid)?;
    Ok(norm_report(f, grid, params.alpha, params.beta))
}

pub(crate) fn norm_report(f: &VelocityField, grid: &Grid, alpha: f64, beta: f64) -> NormReport {
    let l2o = l2_omega_sq(f, grid);
    let l2g = l2_gamma_sq(f, grid);
    let grad = gradient(f, grid);
    let g2 = grad.norm_sq(grid);
    let s2 = grad.sym().norm_sq(grid);
    NormReport {
        l2_omega: l2o.sqrt(),
        l2_gamma: l2g.sqrt(),
        grad_l2: g2.sqrt(),
        symgrad_l2: s2.sqrt(),
        v_norm: (s2 + alpha * l2g).sqrt(),
        h_norm: (l2o + beta * l2g).sqrt(),
        l4_omega: l4_pow4(f, grid).powf(0.25),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{random_stream_field, StreamSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = grid();
        let r = compute_norms(&VelocityField::zeros(&g), &PhysicalParams::unit(), &g).unwrap();
        assert_eq!(r, NormReport::default());
    }

    #[test]
    fn constant_field_quadrature() {
        let g = Grid::new(2, 16, 8, XMode::Periodic).unwrap();
        let c = 0.7;
        let mut f = VelocityField::zeros(&g);
        f.u.data.iter_mut().for_each(|x| *x = c);
        f.g.iter_mut().for_each(|x| *x = c);
        let params = PhysicalParams::new(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let r = compute_norms(&f, &params, &g).unwrap();
        let expected = c * c * g.area() + 2.0 * c * c * g.wall_length();
        assert!((r.h_norm.powi(2) - expected).abs() < 1e-12);
    }

    #[test]
    fn definitional_identities() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_stream_field(&g, &StreamSpec::random(&g, &mut rng));
        let params = PhysicalParams::new(0.3, 1.7, 1.0, 1.0, 1.0).unwrap();
        let r = compute_norms(&f, &params, &g).unwrap();
        let v = r.symgrad_l2.powi(2) + params.alpha * r.l2_gamma.powi(2);
        let h = r.l2_omega.powi(2) + params.beta * r.l2_gamma.powi(2);
        assert!((r.v_norm.powi(2) - v).abs() <= 1e-14 * v);
        assert!((r.h_norm.powi(2) - h).abs() <= 1e-14 * h);
    }

    #[test]
    fn divergence_of_hand_fields() {
        let g = Grid::new(2, 16, 8, XMode::DirichletEnds).unwrap();
        // u = (y, 0): divergence free.
        let mut f = VelocityField::zeros(&g);
        for j in 0..g.ny {
            for i in 0..g.nux() {
                f.u.set(j, i, g.y_row(j));
            }
        }
        assert_eq!(divergence(&f, &g).max_abs(), 0.0);
        // u = (x, 0): divergence one.
        let mut f = VelocityField::zeros(&g);
        for j in 0..g.ny {
            for i in 0..g.nux() {
                f.u.set(j, i, g.x_face(i));
            }
        }
        let d = divergence(&f, &g);
        assert!(d.data.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn adjoint_matches_gradient() {
        let g = Grid::new(1, 8, 6, XMode::DirichletEnds).unwrap();
        for mode in [XMode::DirichletEnds, XMode::Periodic] {
            let g = Grid { x_mode: mode, ..g };
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let mut rand_field = || {
                use rand::Rng;
                let mut f = VelocityField::zeros(&g);
                f.u.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
                f.v.data.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
                f.g.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
                f.enforce_pins(&g);
                f
            };
            let a = rand_field();
            let b = rand_field();
            let ga = gradient(&a, &g);
            let gb = gradient(&b, &g);
            let lhs = gradient_adjoint(&ga.ux, &ga.vy, &ga.uy, &ga.vx, &g).raw_dot(&b);
            let rhs = {
                let cw = g.dx * g.dy;
                let c: f64 =
                    (0..ga.ux.data.len()).map(|k| ga.ux.data[k] * gb.ux.data[k] + ga.vy.data[k] * gb.vy.data[k]).sum::<f64>()
                        * cw;
                c + corner_sum(&g, |j, i| ga.uy.at(j, i) * gb.uy.at(j, i) + ga.vx.at(j, i) * gb.vx.at(j, i))
            };
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "{mode:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn korn_identity_for_solenoidal_fields() {
        // 2‖Du‖² = ‖∇u‖² for discretely divergence-free fields with impermeable flat walls.
        for mode in [XMode::DirichletEnds, XMode::Periodic] {
            let g = Grid::new(2, 32, 12, mode).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..5 {
                let f = random_stream_field(&g, &StreamSpec::random(&g, &mut rng));
                let gr = grad_sq(&f, &g);
                let sy = symgrad_sq(&f, &g);
                assert!((gr - 2.0 * sy).abs() < 1e-11 * gr, "{mode:?}: {gr} vs {}", 2.0 * sy);
            }
        }
    }
}
