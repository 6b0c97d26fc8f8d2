//! Spatial operators in integrated (volume-weighted) form.

use serde::{Deserialize, Serialize};

use crate::constitutive::{stress_eval, StressLaw, Sym2};
use crate::field::{Field2, VelocityField};
use crate::grid::Grid;
use crate::norms::{gradient, gradient_adjoint, SymGrad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConvectionScheme {
    /// ½[(w·∇)z + ∇·(w⊗z)]; contributes nothing to the energy budget.
    #[default]
    SkewSymmetric,
    /// ∇·(w⊗z) with centered face values.
    DivergenceForm,
    /// No convection (Stokes test mode).
    Disabled,
}

/// Mass matrix: dx·dy on velocity faces, β·dx on the wall nodes.
pub fn mass_apply(w: &VelocityField, grid: &Grid, beta: f64) -> VelocityField {
    let mut out = VelocityField::zeros(grid);
    let cw = grid.dx * grid.dy;
    for j in 0..grid.ny {
        for i in grid.free_cols() {
            out.u.set(j, i, cw * w.u.at(j, i));
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            out.v.set(j, i, cw * w.v.at(j, i));
        }
    }
    for i in grid.free_cols() {
        out.g[i] = beta * grid.dx * w.g[i];
    }
    out
}

/// Stiffness of ν‖∇w‖² (no wall-law term).
pub fn viscous_apply(w: &VelocityField, grid: &Grid, nu: f64) -> VelocityField {
    let gr = gradient(w, grid);
    let mut out = gradient_adjoint(&gr.ux, &gr.vy, &gr.uy, &gr.vx, grid);
    out.scale(nu);
    out
}

/// Wall-law force α·dx·s₁(g) on the free wall nodes (integrated units).
pub fn slip_apply(g: &[f64], grid: &Grid, alpha: f64, s: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; g.len()];
    for i in grid.free_cols() {
        out[i] = alpha * grid.dx * s(g[i]);
    }
    out
}

/// Convection of `z` by the flux of `w`, integrated over each momentum control volume.
pub fn convection(w: &VelocityField, z: &VelocityField, grid: &Grid, scheme: ConvectionScheme) -> VelocityField {
    let mut out = VelocityField::zeros(grid);
    if scheme == ConvectionScheme::Disabled {
        return out;
    }
    let skew = scheme == ConvectionScheme::SkewSymmetric;
    let (nx, ny) = (grid.nx, grid.ny);
    let (dx, dy) = (grid.dx, grid.dy);
    // Contribution of a face with outward flux f and neighbour value zn to CV value zk.
    let term = |f: f64, zk: f64, zn: f64| if skew { 0.5 * f * zn } else { 0.5 * f * (zk + zn) };

    for j in 0..ny {
        for i in grid.free_cols() {
            let zk = z.u.at(j, i);
            let ir = grid.face_right(i).expect("free face has a right neighbour");
            let il = grid.face_left(i).expect("free face has a left neighbour");
            let cl = grid.cell_left_of_face(i).expect("free face has a left cell");
            let cr = grid.cell_right_of_face(i).expect("free face has a right cell");
            let mut s = 0.0;
            let fe = 0.5 * (w.u.at(j, i) + w.u.at(j, ir)) * dy;
            s += term(fe, zk, z.u.at(j, ir));
            let fw = -0.5 * (w.u.at(j, il) + w.u.at(j, i)) * dy;
            s += term(fw, zk, z.u.at(j, il));
            if j + 1 < ny {
                let fnn = 0.5 * (w.v.at(j + 1, cl) + w.v.at(j + 1, cr)) * dx;
                s += term(fnn, zk, z.u.at(j + 1, i));
            }
            if j > 0 {
                let fs = -0.5 * (w.v.at(j, cl) + w.v.at(j, cr)) * dx;
                s += term(fs, zk, z.u.at(j - 1, i));
            }
            out.u.set(j, i, s);
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            let zk = z.v.at(j, i);
            let fr = grid.right_face_of_cell(i);
            let mut s = 0.0;
            let fe = 0.5 * (w.u.at(j - 1, fr) + w.u.at(j, fr)) * dy;
            let ze = grid.cell_right_of_face(fr).map_or(0.0, |c| z.v.at(j, c));
            s += term(fe, zk, ze);
            let fw = -0.5 * (w.u.at(j - 1, i) + w.u.at(j, i)) * dy;
            let zw = grid.cell_left_of_face(i).map_or(0.0, |c| z.v.at(j, c));
            s += term(fw, zk, zw);
            let fnn = 0.5 * (w.v.at(j, i) + w.v.at(j + 1, i)) * dx;
            s += term(fnn, zk, z.v.at(j + 1, i));
            let fs = -0.5 * (w.v.at(j - 1, i) + w.v.at(j, i)) * dx;
            s += term(fs, zk, z.v.at(j - 1, i));
            out.v.set(j, i, s);
        }
    }
    out
}

/// Stress tensors at centers (T11, T22) and corners (T12) for a field's symmetric gradient.
fn assemble_stress_force(
    sym: &SymGrad,
    grid: &Grid,
    center: impl Fn(Sym2) -> Sym2,
    corner: impl Fn(Sym2) -> Sym2,
) -> VelocityField {
    let mut t11 = Field2::zeros(grid.ny, grid.nx);
    let mut t22 = Field2::zeros(grid.ny, grid.nx);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let d = Sym2::new(sym.d11.at(j, i), sym.d22.at(j, i), sym.d12_at_center(grid, j, i));
            let t = center(d);
            t11.set(j, i, t.xx);
            t22.set(j, i, t.yy);
        }
    }
    let mut t12 = Field2::zeros(grid.ny + 1, grid.nux());
    for j in 0..=grid.ny {
        for i in 0..grid.nux() {
            let (a, b) = sym.diag_at_corner(grid, j, i);
            t12.set(j, i, corner(Sym2::new(a, b, sym.d12.at(j, i))).xy);
        }
    }
    let mut f = gradient_adjoint(&t11, &t22, &t12, &t12, grid);
    f.scale(-1.0);
    f
}

/// Force of the stress beyond its implicit linear part 2ν_imp·D.
pub fn extra_stress_force(w: &VelocityField, grid: &Grid, law: &StressLaw) -> VelocityField {
    let nu = law.implicit_nu();
    let sym = gradient(w, grid).sym();
    let t = |d: Sym2| stress_eval(law, &d).add(&d.scale(-2.0 * nu));
    assemble_stress_force(&sym, grid, t, t)
}

/// Linearisation of [`extra_stress_force`] at `base` applied to `dir`.
pub fn extra_stress_tangent(base: &VelocityField, dir: &VelocityField, grid: &Grid, law: &StressLaw) -> VelocityField {
    let nu = law.implicit_nu();
    let sb = gradient(base, grid).sym();
    let sd = gradient(dir, grid).sym();
    let mut t11 = Field2::zeros(grid.ny, grid.nx);
    let mut t22 = Field2::zeros(grid.ny, grid.nx);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let db = Sym2::new(sb.d11.at(j, i), sb.d22.at(j, i), sb.d12_at_center(grid, j, i));
            let dd = Sym2::new(sd.d11.at(j, i), sd.d22.at(j, i), sd.d12_at_center(grid, j, i));
            let t = law.jacobian_apply(&db, &dd).add(&dd.scale(-2.0 * nu));
            t11.set(j, i, t.xx);
            t22.set(j, i, t.yy);
        }
    }
    let mut t12 = Field2::zeros(grid.ny + 1, grid.nux());
    for j in 0..=grid.ny {
        for i in 0..grid.nux() {
            let (a, b) = sb.diag_at_corner(grid, j, i);
            let (c, d) = sd.diag_at_corner(grid, j, i);
            let db = Sym2::new(a, b, sb.d12.at(j, i));
            let dd = Sym2::new(c, d, sd.d12.at(j, i));
            t12.set(j, i, law.jacobian_apply(&db, &dd).add(&dd.scale(-2.0 * nu)).xy);
        }
    }
    let mut f = gradient_adjoint(&t11, &t22, &t12, &t12, grid);
    f.scale(-1.0);
    f
}

/// ∫S(Du):Du with the same quadrature as the V-norm.
pub fn stress_power(w: &VelocityField, grid: &Grid, law: &StressLaw) -> f64 {
    let sym = gradient(w, grid).sym();
    if law.is_linear() {
        return 2.0 * law.implicit_nu() * sym.norm_sq(grid);
    }
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let d = Sym2::new(sym.d11.at(j, i), sym.d22.at(j, i), sym.d12_at_center(grid, j, i));
            let t = stress_eval(law, &d);
            s += t.xx * d.xx + t.yy * d.yy;
        }
    }
    s *= grid.dx * grid.dy;
    let mut c = 0.0;
    for j in 0..=grid.ny {
        for i in 0..grid.nux() {
            let (a, b) = sym.diag_at_corner(grid, j, i);
            let d = Sym2::new(a, b, sym.d12.at(j, i));
            c += crate::norms::corner_wx(grid, i) * crate::norms::corner_wy(grid, j) * 2.0 * stress_eval(law, &d).xy * d.xy;
        }
    }
    s + c
}
