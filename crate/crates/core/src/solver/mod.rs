//! IMEX projection stepper for the channel with a dynamic slip wall.
//!
//! One step: θ-implicit viscosity and wall law, Adams–Bashforth-2 convection and extra stress,
//! then an M-orthogonal projection onto discretely solenoidal fields. The wall node `g` is an
//! unknown of the implicit momentum solve, so the boundary ODE is advanced in the same system.

pub mod fast;
pub mod ops;

use serde::{Deserialize, Serialize};

use crate::constitutive::Laws;
use crate::error::{Error, Result};
use crate::field::{Field2, FlowState, VelocityField};
use crate::forcing::Forcing;
use crate::grid::Grid;
use crate::linalg::pcg;
use crate::norms::{divergence, h_norm_sq, inner_h, norm_report, v_norm_sq};
use crate::params::PhysicalParams;

pub use fast::{pressure_gradient, FastSolvers, ImplicitCoeffs};
pub use ops::ConvectionScheme;

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub div_tol: f64,
    pub convection_scheme: ConvectionScheme,
    /// 0.5 is Crank–Nicolson, 1 is backward Euler.
    pub theta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dt: 0.01, div_tol: 1e-9, convection_scheme: ConvectionScheme::SkewSymmetric, theta: 1.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.div_tol > 0.0) {
            return Err(Error::InvalidParams(format!("div_tol must be positive, got {}", self.div_tol)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::InvalidParams(format!("theta must lie in [0.5, 1], got {}", self.theta)));
        }
        Ok(())
    }
}

/// Linearised state advanced alongside a base trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentState {
    /// Tangent velocity; its `g` entries are the tangent slip trace.
    pub vel: VelocityField,
    pub sigma: Field2,
    pub t: f64,
    #[serde(skip)]
    pub(crate) explicit_prev: Option<VelocityField>,
}

impl TangentState {
    pub fn new(vel: VelocityField, grid: &Grid, t: f64) -> Self {
        Self { vel, sigma: Field2::zeros(grid.ny, grid.nx), t, explicit_prev: None }
    }
}

/// Stepper with cached direct solvers for one grid and parameter set.
#[derive(Debug, Clone)]
pub struct Solver {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub laws: Laws,
    pub cfg: SolverConfig,
    fast: FastSolvers,
}

/// Flat (u, g) vector used by the Newton and tangent solves.
fn pack_ug(f: &VelocityField) -> Vec<f64> {
    let mut x = f.u.data.clone();
    x.extend_from_slice(&f.g);
    x
}

fn unpack_ug(x: &[f64], f: &mut VelocityField) {
    let n = f.u.data.len();
    f.u.data.copy_from_slice(&x[..n]);
    f.g.copy_from_slice(&x[n..]);
}

impl Solver {
    pub fn new(params: &PhysicalParams, laws: &Laws, grid: &Grid, cfg: &SolverConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        Ok(Self { grid: *grid, params: *params, laws: *laws, cfg: *cfg, fast: FastSolvers::new(grid) })
    }

    pub fn fast(&self) -> &FastSolvers {
        &self.fast
    }

    fn tau(&self) -> f64 {
        self.cfg.theta * self.cfg.dt
    }

    fn nu_imp(&self) -> f64 {
        self.laws.stress.implicit_nu()
    }

    fn coeffs(&self, slope: f64) -> ImplicitCoeffs {
        ImplicitCoeffs { tau: self.tau(), nu: self.nu_imp(), beta: self.params.beta, slip: self.params.alpha * slope }
    }

    /// Stiffness K w of the implicit viscous part (no wall law).
    fn stiffness(&self, w: &VelocityField) -> VelocityField {
        ops::viscous_apply(w, &self.grid, self.nu_imp())
    }

    /// Explicit right-hand side N(w) = −B(w, w) + X(w), integrated units.
    pub fn explicit_terms(&self, w: &VelocityField) -> VelocityField {
        let mut n = ops::convection(w, w, &self.grid, self.cfg.convection_scheme);
        n.scale(-1.0);
        if !self.laws.stress.is_linear() {
            n.axpy(1.0, &ops::extra_stress_force(w, &self.grid, &self.laws.stress));
        }
        n
    }

    /// Derivative of [`Solver::explicit_terms`] at `w` in direction `d`.
    fn explicit_tangent(&self, w: &VelocityField, d: &VelocityField) -> VelocityField {
        let s = self.cfg.convection_scheme;
        let mut n = ops::convection(d, w, &self.grid, s);
        n.axpy(1.0, &ops::convection(w, d, &self.grid, s));
        n.scale(-1.0);
        if !self.laws.stress.is_linear() {
            n.axpy(1.0, &ops::extra_stress_tangent(w, d, &self.grid, &self.laws.stress));
        }
        n
    }

    fn wall_force(&self, g: &[f64], slope_only: Option<&[f64]>) -> Vec<f64> {
        let slip = self.laws.slip;
        match slope_only {
            None => ops::slip_apply(g, &self.grid, self.params.alpha, |x| slip.tangential(x)),
            Some(base) => {
                let mut out = vec![0.0; g.len()];
                for i in self.grid.free_cols() {
                    out[i] = self.params.alpha * self.grid.dx * slip.tangential_slope(base[i]) * g[i];
                }
                out
            }
        }
    }

    /// Right-hand side of the implicit solve (integrated units).
    fn implicit_rhs(
        &self,
        w: &VelocityField,
        explicit: &VelocityField,
        forcing: Option<&Forcing>,
        wall: Vec<f64>,
    ) -> VelocityField {
        let dt = self.cfg.dt;
        let grid = &self.grid;
        let mut rhs = ops::mass_apply(w, grid, self.params.beta);
        let explicit_weight = 1.0 - self.cfg.theta;
        if explicit_weight > 0.0 {
            rhs.axpy(-explicit_weight * dt, &self.stiffness(w));
            for i in grid.free_cols() {
                rhs.g[i] -= explicit_weight * dt * wall[i];
            }
        }
        rhs.axpy(dt, explicit);
        if let Some(f) = forcing {
            rhs.axpy(dt, &ops::mass_apply(&f.field, grid, self.params.beta));
        }
        rhs.enforce_pins(grid);
        rhs
    }

    /// Applies (M + τK + τα·dx·diag(c)) on the (u, g) block.
    fn apply_ug(&self, x: &[f64], wall_coef: &[f64], out: &mut [f64]) {
        let grid = &self.grid;
        let mut f = VelocityField::zeros(grid);
        unpack_ug(x, &mut f);
        let mut r = ops::mass_apply(&f, grid, self.params.beta);
        r.axpy(self.tau(), &self.stiffness(&f));
        for i in grid.free_cols() {
            r.g[i] += self.tau() * self.params.alpha * grid.dx * wall_coef[i] * f.g[i];
        }
        r.enforce_pins(grid);
        out.copy_from_slice(&pack_ug(&r));
    }

    fn precond_ug(&self, r: &[f64], c: &ImplicitCoeffs, out: &mut [f64]) {
        let mut f = VelocityField::zeros(&self.grid);
        unpack_ug(r, &mut f);
        let mut z = VelocityField::zeros(&self.grid);
        self.fast.solve_u(&f, c, &mut z);
        out.copy_from_slice(&pack_ug(&z));
    }

    /// Solves the (u, g) block with a variable linear wall coefficient.
    fn solve_ug_linear(
        &self,
        rhs: &VelocityField,
        wall_coef: &[f64],
        out: &mut VelocityField,
        stage: &'static str,
    ) -> Result<()> {
        let c = self.coeffs(self.laws.slip.reference_slope());
        let grid = &self.grid;
        let uniform = grid.free_cols().all(|i| (wall_coef[i] - self.laws.slip.reference_slope()).abs() == 0.0);
        self.fast.solve_u(rhs, &c, out);
        if uniform {
            return Ok(());
        }
        let b = pack_ug(rhs);
        let mut x = pack_ug(out);
        pcg(|v, o| self.apply_ug(v, wall_coef, o), |r, z| self.precond_ug(r, &c, z), &b, &mut x, 1e-13, 200, stage)?;
        unpack_ug(&x, out);
        Ok(())
    }

    /// Solves M w + τK w + τα·dx·s(g) = rhs on the (u, g) block by Newton.
    fn solve_ug_nonlinear(&self, rhs: &VelocityField, out: &mut VelocityField) -> Result<()> {
        let grid = &self.grid;
        let slip = self.laws.slip;
        let c_ref = slip.reference_slope();
        let c = self.coeffs(c_ref);
        self.fast.solve_u(rhs, &c, out);
        if slip.is_linear() {
            return Ok(());
        }
        let b = pack_ug(rhs);
        let scale = b.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let n = b.len();
        let nu = out.u.data.len();
        let mut x = pack_ug(out);
        let mut res = vec![0.0; n];
        let ref_coef = vec![c_ref; grid.nux()];
        let mut last = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            self.apply_ug(&x, &ref_coef, &mut res);
            for i in grid.free_cols() {
                let g = x[nu + i];
                res[nu + i] += self.tau() * self.params.alpha * grid.dx * (slip.tangential(g) - c_ref * g);
            }
            for k in 0..n {
                res[k] = b[k] - res[k];
            }
            last = res.iter().map(|r| r * r).sum::<f64>().sqrt() / scale;
            if last <= NEWTON_TOL {
                unpack_ug(&x, out);
                return Ok(());
            }
            let coef: Vec<f64> = (0..grid.nux()).map(|i| slip.tangential_slope(x[nu + i])).collect();
            let mut delta = vec![0.0; n];
            pcg(
                |v, o| self.apply_ug(v, &coef, o),
                |r, z| self.precond_ug(r, &c, z),
                &res,
                &mut delta,
                1e-12,
                200,
                "newton inner solve",
            )?;
            for k in 0..n {
                x[k] += delta[k];
            }
        }
        Err(Error::SolverDiverged { stage: "wall-law newton", residual: last })
    }

    /// M-orthogonal projection w = w* − Gφ with DGφ = Dw*.
    fn project(&self, w: &mut VelocityField) -> Result<Field2> {
        let grid = &self.grid;
        let mut b = divergence(w, grid);
        let mean = b.data.iter().sum::<f64>() / b.data.len() as f64;
        b.data.iter_mut().for_each(|x| *x -= mean);
        let phi = self.fast.solve_pressure(&b);
        w.axpy(-1.0, &pressure_gradient(&phi, grid));
        w.enforce_pins(grid);
        let res = divergence(w, grid).max_abs();
        if res > self.cfg.div_tol {
            return Err(Error::SolverDiverged { stage: "pressure projection", residual: res });
        }
        Ok(phi)
    }

    /// Projects `w` onto discretely solenoidal fields; returns the potential φ.
    pub fn project_field(&self, w: &mut VelocityField) -> Result<Field2> {
        self.project(w)
    }

    /// Advances one step of size `cfg.dt`.
    pub fn step(&self, state: &FlowState, forcing: &Forcing) -> Result<FlowState> {
        let grid = &self.grid;
        let w = &state.vel;
        let n_now = self.explicit_terms(w);
        let explicit = match &state.explicit_prev {
            Some(prev) => {
                let mut e = n_now.scaled(1.5);
                e.axpy(-0.5, prev);
                e
            }
            None => n_now.clone(),
        };
        let wall = self.wall_force(&w.g, None);
        let rhs = self.implicit_rhs(w, &explicit, Some(forcing), wall);
        let mut next = VelocityField::zeros(grid);
        self.fast.solve_v(&rhs, &self.coeffs(self.laws.slip.reference_slope()), &mut next);
        self.solve_ug_nonlinear(&rhs, &mut next)?;
        next.enforce_pins(grid);
        let phi = self.project(&mut next)?;
        let mut p = phi;
        p.data.iter_mut().for_each(|x| *x /= self.cfg.dt);
        Ok(FlowState { vel: next, p, t: state.t + self.cfg.dt, explicit_prev: Some(n_now) })
    }

    /// Advances the linearisation of [`Solver::step`] along the base step `base0 → base1`.
    pub fn tangent_step(&self, ts: &TangentState, base0: &FlowState, base1: &FlowState) -> Result<TangentState> {
        let grid = &self.grid;
        let d_now = self.explicit_tangent(&base0.vel, &ts.vel);
        let explicit = match (&ts.explicit_prev, &base0.explicit_prev) {
            (Some(prev), Some(_)) => {
                let mut e = d_now.scaled(1.5);
                e.axpy(-0.5, prev);
                e
            }
            _ => d_now.clone(),
        };
        let wall = self.wall_force(&ts.vel.g, Some(&base0.vel.g));
        let rhs = self.implicit_rhs(&ts.vel, &explicit, None, wall);
        let mut next = VelocityField::zeros(grid);
        self.fast.solve_v(&rhs, &self.coeffs(self.laws.slip.reference_slope()), &mut next);
        let coef: Vec<f64> = base1.vel.g.iter().map(|&g| self.laws.slip.tangential_slope(g)).collect();
        self.solve_ug_linear(&rhs, &coef, &mut next, "tangent solve")?;
        next.enforce_pins(grid);
        let mut sigma = self.project(&mut next)?;
        sigma.data.iter_mut().for_each(|x| *x /= self.cfg.dt);
        Ok(TangentState { vel: next, sigma, t: ts.t + self.cfg.dt, explicit_prev: Some(d_now) })
    }

    /// D(w) = ∫S(Dw):Dw + α∫s(w)·w.
    pub fn dissipation(&self, w: &VelocityField) -> f64 {
        let grid = &self.grid;
        let interior = ops::stress_power(w, grid, &self.laws.stress);
        let wall: f64 = (0..grid.nux()).map(|i| grid.wx_face(i) * self.laws.slip.tangential(w.g[i]) * w.g[i]).sum();
        interior + self.params.alpha * wall
    }

    /// Residual of the discrete energy identity over one step `w0 → w1`.
    pub fn step_energy_residual(&self, w0: &VelocityField, w1: &VelocityField, forcing: &Forcing) -> f64 {
        let beta = self.params.beta;
        let de = 0.5 * (h_norm_sq(w1, &self.grid, beta) - h_norm_sq(w0, &self.grid, beta)) / self.cfg.dt;
        (de + self.dissipation(w1) - inner_h(&forcing.field, w1, &self.grid, beta)).abs()
    }
}

/// Free-function form of [`Solver::step`]; builds the direct solvers on every call.
pub fn step(
    state: &FlowState,
    forcing: &Forcing,
    laws: &Laws,
    params: &PhysicalParams,
    grid: &Grid,
    cfg: &SolverConfig,
) -> Result<FlowState> {
    state.vel.check(grid)?;
    forcing.check(grid)?;
    Solver::new(params, laws, grid, cfg)?.step(state, forcing)
}

pub fn divergence_residual(state: &FlowState, grid: &Grid) -> f64 {
    divergence(&state.vel, grid).max_abs()
}

/// What [`run_to_time`] records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observer {
    /// Record a series row every `cadence` steps.
    pub cadence: usize,
    /// Keep a state snapshot every this many steps (plus the initial state).
    pub snapshot_every: Option<usize>,
}

impl Default for Observer {
    fn default() -> Self {
        Self { cadence: 1, snapshot_every: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub h_norm: f64,
    pub v_norm: f64,
    pub div_residual: f64,
    pub energy_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub series: Vec<SeriesRow>,
    pub snapshots: Vec<FlowState>,
    pub final_state: FlowState,
}

impl Trajectory {
    pub fn write_series_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,h_norm,v_norm,div_residual,energy_residual")?;
        for r in &self.series {
            writeln!(w, "{},{:e},{:e},{:e},{:e}", r.t, r.h_norm, r.v_norm, r.div_residual, r.energy_residual)?;
        }
        Ok(())
    }
}

/// Number of fixed-size steps from `t0` to `t1`.
pub(crate) fn step_count(t0: f64, t1: f64, dt: f64) -> usize {
    let n = (t1 - t0) / dt;
    if n <= 1e-9 {
        0
    } else {
        (n - 1e-9).ceil() as usize
    }
}

/// Steps until `t_end`, recording norms at the observer cadence.
pub fn run_to_time(solver: &Solver, state: &FlowState, forcing: &Forcing, t_end: f64, observer: &Observer) -> Result<Trajectory> {
    let grid = &solver.grid;
    let (alpha, beta) = (solver.params.alpha, solver.params.beta);
    let steps = step_count(state.t, t_end, solver.cfg.dt);
    let cadence = observer.cadence.max(1);
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    if observer.snapshot_every.is_some() {
        snapshots.push(state.clone());
    }
    let mut cur = state.clone();
    for k in 1..=steps {
        let next = solver.step(&cur, forcing)?;
        if k % cadence == 0 {
            let nr = norm_report(&next.vel, grid, alpha, beta);
            series.push(SeriesRow {
                t: next.t,
                h_norm: nr.h_norm,
                v_norm: v_norm_sq(&next.vel, grid, alpha).sqrt(),
                div_residual: divergence_residual(&next, grid),
                energy_residual: solver.step_energy_residual(&cur.vel, &next.vel, forcing),
            });
        }
        if observer.snapshot_every.is_some_and(|s| k % s.max(1) == 0) {
            snapshots.push(next.clone());
        }
        cur = next;
    }
    Ok(Trajectory { series, snapshots, final_state: cur })
}

/// ‖w(t)‖²_H and ∫₀ᵗ‖w‖²_V for w = u − v along two trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceEnergy {
    pub t: Vec<f64>,
    pub h_sq: Vec<f64>,
    pub v_integral: Vec<f64>,
}

pub fn difference_energy(
    u_traj: &[FlowState],
    v_traj: &[FlowState],
    params: &PhysicalParams,
    grid: &Grid,
) -> Result<DifferenceEnergy> {
    if u_traj.len() != v_traj.len() {
        return Err(Error::DimensionMismatch(format!("trajectory lengths {} and {}", u_traj.len(), v_traj.len())));
    }
    let mut out = DifferenceEnergy { t: Vec::new(), h_sq: Vec::new(), v_integral: Vec::new() };
    let mut prev: Option<(f64, f64)> = None;
    let mut acc = 0.0;
    for (index, (a, b)) in u_traj.iter().zip(v_traj).enumerate() {
        if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs()) {
            return Err(Error::MismatchedTimestamps { index });
        }
        let w = a.vel.minus(&b.vel);
        let vsq = v_norm_sq(&w, grid, params.alpha);
        if let Some((t0, v0)) = prev {
            acc += 0.5 * (a.t - t0) * (v0 + vsq);
        }
        prev = Some((a.t, vsq));
        out.t.push(a.t);
        out.h_sq.push(h_norm_sq(&w, grid, params.beta));
        out.v_integral.push(acc);
    }
    Ok(out)
}
