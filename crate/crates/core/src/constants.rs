//! Functional-inequality constants of the slip energy spaces and their numerical verifiers.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attractor::TangentFamily;
use crate::error::{Error, Result};
use crate::field::VelocityField;
use crate::grid::Grid;
use crate::linalg::SymEig;
use crate::norms::{grad_sq, inner_l2, l2_gamma_sq, l2_omega_sq, l4_pow4, symgrad_sq, v_norm_sq};
use crate::params::PhysicalParams;
use crate::samples::{random_stream_field, StreamSpec};
use crate::solver::{FastSolvers, ImplicitCoeffs};

/// Bracket width at which the root search stops.
const ROOT_TOL: f64 = 1e-13;
/// Relative slack allowed when comparing an observed ratio with its constant.
const RATIO_TOL: f64 = 1e-9;

/// Root of μ cos μ + 8α sin μ = 0 on [π/2, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub mu: f64,
    pub lambda_sq: f64,
    pub bracket: (f64, f64),
    /// |μ cos μ + 8α sin μ| / (1 + 8α); the unscaled value for α = 0.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub analytic_constant: f64,
    pub worst_observed_ratio: f64,
    pub sample_count: usize,
    pub pass: bool,
}

impl InequalityReport {
    fn new(name: &str, analytic_constant: f64) -> Self {
        Self { name: name.to_string(), analytic_constant, worst_observed_ratio: 0.0, sample_count: 0, pass: true }
    }

    /// Records lhs ≤ C·rhs; a zero right side counts only if the left side is nonzero.
    fn record(&mut self, lhs: f64, rhs: f64) {
        self.sample_count += 1;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        self.worst_observed_ratio = self.worst_observed_ratio.max(ratio);
        self.pass = self.worst_observed_ratio <= self.analytic_constant * (1.0 + RATIO_TOL);
    }
}

/// Brent's method on a sign-changing bracket.
fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    assert!(fa * fb < 0.0, "bracket does not change sign");
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= tol {
            break;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { s > lo && s < b } else { s > b && s < lo };
        let slow = if bisected { (s - b).abs() >= (b - c).abs() / 2.0 } else { (s - b).abs() >= (c - d).abs() / 2.0 };
        let tiny = if bisected { (b - c).abs() < tol } else { (c - d).abs() < tol };
        if !between || slow || tiny {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

/// Smallest root μ(α) of μ cos μ + 8α sin μ = 0; `f64::INFINITY` gives π.
pub fn boundary_eigenvalue_mu(alpha: f64) -> Result<EigenResult> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!("alpha must be >= 0, got {alpha}")));
    }
    let bracket = (PI / 2.0, PI);
    if alpha.is_infinite() {
        return Ok(EigenResult { mu: PI, lambda_sq: PI * PI, bracket, residual: 0.0 });
    }
    let scale = 1.0 + 8.0 * alpha;
    let f = |m: f64| (m * m.cos() + 8.0 * alpha * m.sin()) / scale;
    let mu = if alpha == 0.0 { PI / 2.0 } else { brent(f, bracket.0, bracket.1, ROOT_TOL) };
    Ok(EigenResult { mu, lambda_sq: mu * mu, bracket, residual: f(mu).abs() })
}

/// Λ = 32L²/π² + β·min{1/α, 8L}.
pub fn capital_lambda(alpha: f64, beta: f64, l: f64) -> f64 {
    32.0 * l * l / (PI * PI) + beta * (1.0 / alpha).min(8.0 * l)
}

/// Even reflection across the wall onto (−1, 1); the result lives on a grid of height 2.
///
/// The reflected field has no wall trace; its bottom row sees a no-slip wall at y = −1.
pub fn extend_by_reflection(f: &VelocityField, grid: &Grid) -> Result<(Grid, VelocityField)> {
    f.check(grid)?;
    let top = (0..grid.nx).map(|i| f.v.at(grid.ny, i).abs()).fold(0.0, f64::max);
    if top != 0.0 {
        return Err(Error::InvalidParams(format!("field has a nonzero top trace ({top:e})")));
    }
    let ny = grid.ny;
    let ext = grid.with_height(2 * ny, 2.0 * grid.height(), grid.y0 - grid.height());
    let mut e = VelocityField::zeros(&ext);
    for j in 0..ny {
        for i in 0..grid.nux() {
            let val = f.u.at(j, i);
            e.u.set(ny + j, i, val);
            e.u.set(ny - 1 - j, i, val);
        }
    }
    for j in 0..=ny {
        for i in 0..grid.nx {
            let val = f.v.at(j, i);
            e.v.set(ny + j, i, val);
            e.v.set(ny - j, i, val);
        }
    }
    e.enforce_pins(&ext);
    Ok((ext, e))
}

/// Smallest discrete Rayleigh quotient of the scalar relaxed problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEigen {
    pub lambda_sq: f64,
    pub iterations: usize,
    /// Lanczos residual estimate in the operator's units.
    pub residual: f64,
}

/// Stand-in for α = ∞ in the wall link; the link conductance saturates at 2/dy.
const ALPHA_INF: f64 = 1e14;

/// min (‖∇u‖² + 8α‖u‖²_Γ)/‖u‖²_Ω over scalar u on the u faces of `grid`.
///
/// The wall node is eliminated exactly (it carries no mass), leaving a Robin link. Solved by
/// Lanczos on (K + M)⁻¹M with the fast direct solver.
pub fn discrete_lambda_sq(alpha: f64, grid: &Grid) -> Result<DiscreteEigen> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!("alpha must be >= 0, got {alpha}")));
    }
    if grid.ny < 16 {
        return Err(Error::InvalidParams(format!("discrete eigenvalue needs ny >= 16, got {}", grid.ny)));
    }
    let a = if alpha.is_finite() { alpha } else { ALPHA_INF };
    let fast = FastSolvers::new(grid);
    let coeffs = ImplicitCoeffs { tau: 1.0, nu: 1.0, beta: 0.0, slip: 8.0 * a };
    let cols: Vec<usize> = grid.free_cols().collect();
    let n = cols.len() * grid.ny;
    let mass = grid.dx * grid.dy;
    let pack = |f: &VelocityField| -> Vec<f64> {
        let mut x = Vec::with_capacity(n);
        for j in 0..grid.ny {
            x.extend(cols.iter().map(|&i| f.u.at(j, i)));
        }
        x
    };
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut rhs = VelocityField::zeros(grid);
        for j in 0..grid.ny {
            for (k, &i) in cols.iter().enumerate() {
                rhs.u.set(j, i, mass * x[j * cols.len() + k]);
            }
        }
        let mut out = VelocityField::zeros(grid);
        fast.solve_u(&rhs, &coeffs, &mut out);
        pack(&out)
    };
    let dot_m = |x: &[f64], y: &[f64]| mass * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let nq = dot_m(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= nq);
    let max_iter = 400.min(n);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    for k in 0..max_iter {
        let mut w = apply(&basis[k]);
        let ak = dot_m(&w, &basis[k]);
        alphas.push(ak);
        for _ in 0..2 {
            for b in &basis {
                let c = dot_m(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bk = dot_m(&w, &w).sqrt();
        let m = alphas.len();
        let t = crate::linalg::tridiag_matrix(&alphas, &betas);
        let e = SymEig::new(t);
        let (top, idx) = e.values.iter().enumerate().fold((f64::MIN, 0), |acc, (i, &v)| if v > acc.0 { (v, i) } else { acc });
        let ritz_res = bk * e.vectors[(m - 1, idx)].abs();
        let lam = 1.0 / top - 1.0;
        // Residual in λ units: δθ/θ² bounds the shift in 1/θ.
        let lam_res = ritz_res / (top * top);
        if lam_res <= 1e-10 * lam.abs().max(1.0) || bk <= 1e-14 {
            return Ok(DiscreteEigen { lambda_sq: lam, iterations: k + 1, residual: lam_res });
        }
        last = lam_res;
        betas.push(bk);
        basis.push(w.into_iter().map(|x| x / bk).collect());
    }
    Err(Error::NonconvergentEigen(format!("lanczos stalled after {max_iter} steps, residual {last:e}")))
}

/// Random admissible test fields on `grid`.
pub fn sample_fields(grid: &Grid, count: usize, seed: u64) -> Vec<VelocityField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_stream_field(grid, &StreamSpec::random(grid, &mut rng))).collect()
}

/// Korn, Poincaré, trace, norm-equivalence and reflection-extension inequalities.
///
/// `params` must be nondimensional (L = 1 channel height of the grid).
pub fn verify_korn_fields(params: &PhysicalParams, grid: &Grid, fields: &[VelocityField]) -> Result<Vec<InequalityReport>> {
    let alpha = params.alpha;
    let lam_sq = boundary_eigenvalue_mu(alpha)?.lambda_sq;
    let l = 1.0;
    let mut first = InequalityReport::new("grad_by_symgrad", 8.0);
    let mut poincare = InequalityReport::new("l2_by_symgrad", 8.0);
    let mut trace = InequalityReport::new("trace_by_symgrad", 8.0);
    let mut second = InequalityReport::new("l2_by_v_norm", 8.0 / lam_sq);
    let mut korn = InequalityReport::new("w12_by_v_norm", 8.0 * (1.0 + 4.0 * l * l / (PI * PI)));
    let mut equiv = InequalityReport::new("h_by_v_norm", capital_lambda(alpha, params.beta, l));
    let mut ext_d = InequalityReport::new("extension_symgrad", 4.0);
    let mut ext_l2 = InequalityReport::new("extension_l2", 4.0);
    let mut ext_w12 = InequalityReport::new("extension_w12", 64.0);
    for f in fields {
        f.check(grid)?;
        let d2 = symgrad_sq(f, grid);
        let g2 = grad_sq(f, grid);
        let l2 = l2_omega_sq(f, grid);
        let tr = l2_gamma_sq(f, grid);
        let v2 = d2 + alpha * tr;
        first.record(g2, d2);
        poincare.record(l2, d2);
        trace.record(tr, d2);
        second.record(l2, v2);
        korn.record(l2 + g2, v2);
        equiv.record(l2 + params.beta * tr, v2);
        let (eg, e) = extend_by_reflection(f, grid)?;
        let el2 = l2_omega_sq(&e, &eg);
        ext_d.record(symgrad_sq(&e, &eg), d2);
        ext_l2.record(el2, l2);
        ext_w12.record(el2 + grad_sq(&e, &eg), d2);
    }
    Ok(vec![first, poincare, trace, second, korn, equiv, ext_d, ext_l2, ext_w12])
}

/// [`verify_korn_fields`] over `sample_count` random stream-function fields.
pub fn verify_korn_suite(params: &PhysicalParams, grid: &Grid, sample_count: usize, seed: u64) -> Result<Vec<InequalityReport>> {
    verify_korn_fields(params, grid, &sample_fields(grid, sample_count, seed))
}

pub const LADYZHENSKAYA_CONSTANT: f64 = 16.0 * std::f64::consts::SQRT_2;

/// ‖u‖²_{L⁴} ≤ 16√2 ‖u‖_{L²} ‖u‖_V.
pub fn verify_ladyzhenskaya(fields: &[VelocityField], grid: &Grid, alpha: f64) -> InequalityReport {
    let mut r = InequalityReport::new("ladyzhenskaya", LADYZHENSKAYA_CONSTANT);
    for f in fields {
        r.record(l4_pow4(f, grid).sqrt(), l2_omega_sq(f, grid).sqrt() * v_norm_sq(f, grid, alpha).sqrt());
    }
    r
}

/// Σ ξᵢξⱼ (Eφᵢ, Eφⱼ)_{L²} ≤ Σ ξᵢ² for every ξ sample.
pub fn verify_suborthonormal(family: &TangentFamily, xi_samples: &[Vec<f64>], grid: &Grid) -> Result<InequalityReport> {
    let n = family.phis.len();
    let ext: Vec<(Grid, VelocityField)> = family.phis.iter().map(|p| extend_by_reflection(p, grid)).collect::<Result<_>>()?;
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = inner_l2(&ext[i].1, &ext[j].1, &ext[i].0);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let mut r = InequalityReport::new("suborthonormal", 1.0);
    for xi in xi_samples {
        if xi.len() != n {
            return Err(Error::DimensionMismatch(format!("xi has {} entries for a family of {n}", xi.len())));
        }
        let x = nalgebra::DVector::from_column_slice(xi);
        let lhs = (x.transpose() * &gram * &x)[(0, 0)];
        r.record(lhs, x.norm_squared());
    }
    Ok(r)
}

/// Random coefficient vectors for [`verify_suborthonormal`].
pub fn random_xi(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}
