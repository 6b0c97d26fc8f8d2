//! Long-time diagnostics: energy identity, absorbing ball, tangent dynamics, N-trace and the
//! dimension bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::capital_lambda;
use crate::error::{Error, Result};
use crate::field::{FlowState, VelocityField};
use crate::forcing::Forcing;
use crate::grid::Grid;
use crate::linalg::SymEig;
use crate::norms::{h_norm_sq, inner_h};
use crate::params::PhysicalParams;
use crate::samples::{random_stream_field, StreamSpec};
use crate::solver::{ops, run_to_time, ConvectionScheme, ImplicitCoeffs, Observer, Solver, SolverConfig, TangentState};

/// Default Lieb–Thirring constant.
pub const DEFAULT_KAPPA: f64 = 0.288_675_134_594_812_9;

/// Discretisation allowance on the absorbing radius.
pub const BALL_SLACK: f64 = 0.1;

/// N fields with pairwise H inner products ½δᵢⱼ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentFamily {
    pub phis: Vec<VelocityField>,
}

impl TangentFamily {
    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    /// Largest deviation of the Gram matrix from ½I.
    pub fn gram_error(&self, grid: &Grid, beta: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.phis.iter().enumerate() {
            for (j, b) in self.phis.iter().enumerate().take(i + 1) {
                let target = if i == j { 0.5 } else { 0.0 };
                worst = worst.max((inner_h(a, b, grid, beta) - target).abs());
            }
        }
        worst
    }
}

/// Gram–Schmidt in H (two passes), then scaling so that (φᵢ, φⱼ)_H = ½δᵢⱼ.
pub fn h_orthonormalize_half(fields: &[VelocityField], grid: &Grid, beta: f64) -> Result<TangentFamily> {
    let mut phis: Vec<VelocityField> = Vec::with_capacity(fields.len());
    for (index, f) in fields.iter().enumerate() {
        f.check(grid)?;
        let start = h_norm_sq(f, grid, beta).sqrt();
        let mut w = f.clone();
        for _ in 0..2 {
            for p in &phis {
                let c = 2.0 * inner_h(&w, p, grid, beta);
                w.axpy(-c, p);
            }
        }
        let n = h_norm_sq(&w, grid, beta).sqrt();
        if start == 0.0 || n <= 1e-10 * start {
            return Err(Error::RankDeficient { index });
        }
        w.scale(std::f64::consts::FRAC_1_SQRT_2 / n);
        phis.push(w);
    }
    Ok(TangentFamily { phis })
}

/// Per-step residuals of the discrete energy identity over consecutive states.
pub fn energy_residual(solver: &Solver, window: &[FlowState], forcing: &Forcing) -> Vec<f64> {
    window.windows(2).map(|w| solver.step_energy_residual(&w[0].vel, &w[1].vel, forcing)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingBallReport {
    /// (Λ/2)‖(f, h)‖_H.
    pub r_theory: f64,
    /// First sample time with ‖u‖_H ≤ (1 + δ)R.
    pub entry_time: Option<f64>,
    /// Samples after entry above (1 + δ)R.
    pub violations: usize,
    /// Samples outside (1 + δ)R where the norm did not decrease at the next sample.
    pub monotonicity_violations: usize,
    pub max_after_entry: f64,
}

impl AbsorbingBallReport {
    pub fn pass(&self) -> bool {
        self.entry_time.is_some() && self.violations == 0 && self.monotonicity_violations == 0
    }
}

/// Ball radius (Λ/2)‖(f, h)‖_H for nondimensional parameters.
pub fn absorbing_radius(params: &PhysicalParams, forcing_h_norm: f64) -> f64 {
    0.5 * capital_lambda(params.alpha, params.beta, 1.0) * forcing_h_norm
}

/// Checks entry into and confinement to the absorbing ball along a sampled series of (t, ‖u‖_H).
pub fn absorbing_ball_check(series: &[(f64, f64)], params: &PhysicalParams, forcing_h_norm: f64) -> AbsorbingBallReport {
    let r = absorbing_radius(params, forcing_h_norm);
    let level = (1.0 + BALL_SLACK) * r;
    let mut rep =
        AbsorbingBallReport { r_theory: r, entry_time: None, violations: 0, monotonicity_violations: 0, max_after_entry: 0.0 };
    for (k, &(t, h)) in series.iter().enumerate() {
        if h > level {
            if let Some(&(_, next)) = series.get(k + 1) {
                if next > h {
                    rep.monotonicity_violations += 1;
                }
            }
        }
        match rep.entry_time {
            None if h <= level => {
                rep.entry_time = Some(t);
                rep.max_after_entry = h;
            }
            Some(_) => {
                rep.max_after_entry = rep.max_after_entry.max(h);
                if h > level {
                    rep.violations += 1;
                }
            }
            None => {}
        }
    }
    rep
}

/// One step of the linearised system along the base step `base0 → base1`.
pub fn tangent_step(solver: &Solver, ts: &TangentState, base0: &FlowState, base1: &FlowState) -> Result<TangentState> {
    solver.tangent_step(ts, base0, base1)
}

/// Propagates a tangent vector along a stored base trajectory (one state per step).
pub fn propagate_tangent(solver: &Solver, base: &[FlowState], u0: &VelocityField) -> Result<TangentState> {
    let mut ts = TangentState::new(u0.clone(), &solver.grid, base.first().map_or(0.0, |b| b.t));
    for w in base.windows(2) {
        ts = solver.tangent_step(&ts, &w[0], &w[1])?;
    }
    Ok(ts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasidiffReport {
    pub epsilons: Vec<f64>,
    /// e(ε) = ‖S(T)(u₀ + ε·dir) − S(T)u₀ − U_ε(T)‖_H.
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
    pub monotone: bool,
    /// Set when the last ratio fails to drop by a factor of 2 from the previous one.
    pub stagnated: bool,
}

/// e(ε)/ε for the tangent started from ε·dir against the nonlinear flow.
pub fn quasidiff_ratios(
    solver: &Solver,
    u0: &FlowState,
    dir: &VelocityField,
    epsilons: &[f64],
    t_end: f64,
    forcing: &Forcing,
) -> Result<QuasidiffReport> {
    let beta = solver.params.beta;
    let base = run_to_time(solver, u0, forcing, t_end, &Observer { cadence: usize::MAX, snapshot_every: Some(1) })?;
    let unit = propagate_tangent(solver, &base.snapshots, dir)?;
    let results: Vec<Result<f64>> = epsilons
        .par_iter()
        .map(|&eps| {
            let mut start = u0.clone();
            start.vel.axpy(eps, dir);
            let pert = run_to_time(solver, &start, forcing, t_end, &Observer { cadence: usize::MAX, snapshot_every: None })?;
            let mut r = pert.final_state.vel.minus(&base.final_state.vel);
            r.axpy(-eps, &unit.vel);
            Ok(h_norm_sq(&r, &solver.grid, beta).sqrt())
        })
        .collect();
    let errors: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = errors.iter().zip(epsilons).map(|(e, eps)| if *eps == 0.0 { 0.0 } else { e / eps }).collect();
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0]);
    let stagnated = ratios.len() >= 2 && ratios[ratios.len() - 1] > 0.5 * ratios[ratios.len() - 2];
    Ok(QuasidiffReport { epsilons: epsilons.to_vec(), errors, ratios, monotone, stagnated })
}

/// (Lφ, φ)_H of the discrete linearisation at `base`.
pub fn linearized_quadratic_form(solver: &Solver, base: &VelocityField, phi: &VelocityField) -> f64 {
    let grid = &solver.grid;
    let laws = &solver.laws;
    let scheme = solver.cfg.convection_scheme;
    let mut q = -ops::viscous_apply(phi, grid, laws.stress.implicit_nu()).raw_dot(phi);
    if !laws.stress.is_linear() {
        q += ops::extra_stress_tangent(base, phi, grid, &laws.stress).raw_dot(phi);
    }
    q -= ops::convection(phi, base, grid, scheme).raw_dot(phi);
    if scheme != ConvectionScheme::SkewSymmetric {
        q -= ops::convection(base, phi, grid, scheme).raw_dot(phi);
    }
    let wall: f64 = grid.free_cols().map(|i| grid.dx * laws.slip.tangential_slope(base.g[i]) * phi.g[i] * phi.g[i]).sum();
    q - solver.params.alpha * wall
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyStrategy {
    /// Random stream-function fields, several seeds.
    Random,
    /// Least-damped modes of the discrete Stokes operator with the slip wall.
    StokesModes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub n: usize,
    pub q_empirical: f64,
    /// −N/Λ + 8κΛ‖(f, h)‖²_H.
    pub q_theory: f64,
    /// Standard deviation over random families (0 for deterministic strategies).
    pub sigma: f64,
    pub strategy: FamilyStrategy,
}

impl TraceEstimate {
    pub fn pass(&self) -> bool {
        self.q_empirical <= self.q_theory + 3.0 * self.sigma
    }
}

/// −N/Λ + 8κΛ‖(f, h)‖²_H.
pub fn q_theory(n: usize, lambda_cap: f64, kappa: f64, forcing_h_norm: f64) -> f64 {
    -(n as f64) / lambda_cap + 8.0 * kappa * lambda_cap * forcing_h_norm * forcing_h_norm
}

/// Approximate least-damped Stokes modes by block inverse iteration and Rayleigh–Ritz.
pub fn stokes_modes(solver: &Solver, n: usize, seed: u64) -> Result<TangentFamily> {
    let grid = &solver.grid;
    let beta = solver.params.beta;
    let slope = solver.laws.slip.reference_slope();
    let block = n + 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vecs: Vec<VelocityField> =
        (0..block).map(|_| random_stream_field(grid, &StreamSpec::random(grid, &mut rng))).collect();
    let shift = 0.1;
    let c = ImplicitCoeffs { tau: shift, nu: solver.laws.stress.implicit_nu(), beta, slip: solver.params.alpha * slope };
    let stiff = |f: &VelocityField| {
        let mut k = ops::viscous_apply(f, grid, solver.laws.stress.implicit_nu());
        for i in grid.free_cols() {
            k.g[i] += solver.params.alpha * grid.dx * slope * f.g[i];
        }
        k
    };
    let projector = Solver::new(&solver.params, &solver.laws, grid, &SolverConfig { dt: 1.0, div_tol: 1e-8, ..solver.cfg })?;
    for _ in 0..40 {
        vecs = vecs
            .par_iter()
            .map(|v| {
                let rhs = ops::mass_apply(v, grid, beta);
                let mut out = VelocityField::zeros(grid);
                projector.fast().solve_u(&rhs, &c, &mut out);
                projector.fast().solve_v(&rhs, &c, &mut out);
                out.enforce_pins(grid);
                projector.project_field(&mut out)?;
                Ok(out)
            })
            .collect::<Result<_>>()?;
        vecs = h_orthonormalize_half(&vecs, grid, beta)?.phis;
    }
    // Rayleigh–Ritz: Gram is ½I, so the Ritz problem is 2K in this basis.
    let k = nalgebra::DMatrix::from_fn(block, block, |i, j| 2.0 * stiff(&vecs[j]).raw_dot(&vecs[i]));
    let k = 0.5 * (&k + k.transpose());
    let e = SymEig::new(k);
    let mut order: Vec<usize> = (0..block).collect();
    order.sort_by(|&a, &b| e.values[a].total_cmp(&e.values[b]));
    let modes: Vec<VelocityField> = order
        .iter()
        .take(n)
        .map(|&col| {
            let mut m = VelocityField::zeros(grid);
            for (r, v) in vecs.iter().enumerate() {
                m.axpy(e.vectors[(r, col)], v);
            }
            m
        })
        .collect();
    h_orthonormalize_half(&modes, grid, beta)
}

fn family_trace(solver: &Solver, base: &VelocityField, family: &TangentFamily) -> f64 {
    family.phis.iter().map(|p| linearized_quadratic_form(solver, base, p)).sum()
}

/// (2/t)∫Σⱼ(L(τ)φⱼ, φⱼ)_H by the trapezoid rule over the stored base states.
pub fn time_averaged_trace(solver: &Solver, base: &[FlowState], family: &TangentFamily) -> f64 {
    let vals: Vec<(f64, f64)> = base.par_iter().map(|s| (s.t, family_trace(solver, &s.vel, family))).collect();
    if vals.len() == 1 {
        return 2.0 * vals[0].1;
    }
    let span = vals[vals.len() - 1].0 - vals[0].0;
    let integral: f64 = vals.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    2.0 * integral / span
}

/// Empirical N-trace along a stored base trajectory against the theoretical bound.
#[allow(clippy::too_many_arguments)]
pub fn n_trace_estimate(
    solver: &Solver,
    base: &[FlowState],
    n: usize,
    strategy: FamilyStrategy,
    kappa: f64,
    forcing_h_norm: f64,
    seeds: &[u64],
) -> Result<TraceEstimate> {
    if base.is_empty() {
        return Err(Error::InvalidParams("empty base trajectory".into()));
    }
    let grid = &solver.grid;
    let beta = solver.params.beta;
    let lam = capital_lambda(solver.params.alpha, beta, 1.0);
    let theory = q_theory(n, lam, kappa, forcing_h_norm);
    let (q, sigma) = match strategy {
        FamilyStrategy::Random => {
            let qs: Vec<f64> = seeds
                .iter()
                .map(|&s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let fields: Vec<VelocityField> =
                        (0..n).map(|_| random_stream_field(grid, &StreamSpec::random(grid, &mut rng))).collect();
                    let fam = h_orthonormalize_half(&fields, grid, beta)?;
                    Ok(time_averaged_trace(solver, base, &fam))
                })
                .collect::<Result<_>>()?;
            let m = qs.iter().sum::<f64>() / qs.len() as f64;
            let var = if qs.len() > 1 { qs.iter().map(|q| (q - m).powi(2)).sum::<f64>() / (qs.len() - 1) as f64 } else { 0.0 };
            (m, var.sqrt())
        }
        FamilyStrategy::StokesModes => {
            let fam = stokes_modes(solver, n, seeds.first().copied().unwrap_or(0))?;
            (time_averaged_trace(solver, base, &fam), 0.0)
        }
    };
    Ok(TraceEstimate { n, q_empirical: q, q_theory: theory, sigma, strategy })
}

/// Runs until the absorbing ball is entered, then for `extra` more time units.
pub fn burn_in(
    solver: &Solver,
    state: &FlowState,
    forcing: &Forcing,
    forcing_h_norm: f64,
    max_t: f64,
    extra: f64,
) -> Result<FlowState> {
    let level = (1.0 + BALL_SLACK) * absorbing_radius(&solver.params, forcing_h_norm);
    let mut cur = state.clone();
    while h_norm_sq(&cur.vel, &solver.grid, solver.params.beta).sqrt() > level {
        if cur.t >= state.t + max_t {
            return Err(Error::SolverDiverged { stage: "absorbing-ball burn-in", residual: cur.t });
        }
        cur = solver.step(&cur, forcing)?;
    }
    Ok(run_to_time(solver, &cur, forcing, cur.t + extra, &Observer { cadence: usize::MAX, snapshot_every: None })?.final_state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionBound {
    pub kappa: f64,
    pub lambda_cap: f64,
    pub forcing_h_norm: f64,
    pub bound: f64,
    pub dirichlet_reference: f64,
}

/// (8κ/ν⁴)·Λ²·‖(f, h)‖²_{H_L} in physical variables, plus the no-slip reference value.
///
/// `f_l2_norm` is ‖f‖_{L²(Ω_L)} alone; β = 0 and α = ∞ are accepted as limits.
pub fn dimension_bound(params: &PhysicalParams, kappa: f64, forcing_h_norm: f64, f_l2_norm: f64) -> Result<DimensionBound> {
    let PhysicalParams { alpha, beta, nu, l, .. } = *params;
    if !(alpha > 0.0) || !(beta >= 0.0) || !(nu > 0.0) || !(l > 0.0) || !(kappa > 0.0) || !(forcing_h_norm >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "dimension bound needs alpha, nu, L, kappa > 0 and beta, norms >= 0; got {params:?}, kappa={kappa}"
        )));
    }
    let lam = capital_lambda(alpha, beta, l);
    let nu4 = nu.powi(4);
    Ok(DimensionBound {
        kappa,
        lambda_cap: lam,
        forcing_h_norm,
        bound: 8.0 * kappa / nu4 * lam * lam * forcing_h_norm * forcing_h_norm,
        dirichlet_reference: 1.0 / (4.0 * 3f64.sqrt() * nu4) * l.powi(4) / std::f64::consts::PI.powi(4) * f_l2_norm * f_l2_norm,
    })
}

/// The same bound from nondimensional data: 8κ·Λ(α*, β*, 1)²·‖(f*, h*)‖²_H.
pub fn dimension_bound_nondim(alpha_star: f64, beta_star: f64, kappa: f64, forcing_h_norm_star: f64) -> f64 {
    let lam = capital_lambda(alpha_star, beta_star, 1.0);
    8.0 * kappa * lam * lam * forcing_h_norm_star * forcing_h_norm_star
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::sample_fields;
    use crate::constitutive::Laws;
    use crate::grid::XMode;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn solver(grid: &Grid) -> Solver {
        Solver::new(&PhysicalParams::unit(), &Laws::linear(1.0), grid, &SolverConfig { dt: 0.01, ..Default::default() }).unwrap()
    }

    #[test]
    fn orthonormalize_gram() {
        let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
        let fields = sample_fields(&grid, 8, 2);
        let fam = h_orthonormalize_half(&fields, &grid, 1.0).unwrap();
        assert!(fam.gram_error(&grid, 1.0) < 1e-10);
        let one = h_orthonormalize_half(&fields[..1], &grid, 1.0).unwrap();
        assert_relative_eq!(h_norm_sq(&one.phis[0], &grid, 1.0), 0.5, max_relative = 1e-12);
        let dup = vec![fields[0].clone(), fields[0].scaled(2.0)];
        assert!(matches!(h_orthonormalize_half(&dup, &grid, 1.0), Err(Error::RankDeficient { index: 1 })));
    }

    #[test]
    fn orthogonal_pair_is_only_rescaled() {
        let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
        let a = random_stream_field(&grid, &StreamSpec::single(1.0, -1.0, 0.8));
        let b = random_stream_field(&grid, &StreamSpec::single(2.0, 1.0, 0.8));
        let fam = h_orthonormalize_half(&[a.clone(), b.clone()], &grid, 1.0).unwrap();
        let s = (0.5 / h_norm_sq(&b, &grid, 1.0)).sqrt();
        assert!(fam.phis[1].minus(&b.scaled(s)).max_abs() < 1e-12);
    }

    #[test]
    fn zero_tangent_stays_zero_and_stokes_decays() {
        let grid = Grid::new(2, 32, 12, XMode::DirichletEnds).unwrap();
        let s = solver(&grid);
        let base = run_to_time(
            &s,
            &FlowState::zeros(&grid),
            &Forcing::zero(&grid),
            0.1,
            &Observer { cadence: 1, snapshot_every: Some(1) },
        )
        .unwrap();
        let z = propagate_tangent(&s, &base.snapshots, &VelocityField::zeros(&grid)).unwrap();
        assert_eq!(z.vel.max_abs(), 0.0);
        let d = random_stream_field(&grid, &StreamSpec::single(1.0, 0.0, 1.0));
        let mut ts = TangentState::new(d, &grid, 0.0);
        let mut prev = h_norm_sq(&ts.vel, &grid, 1.0);
        for w in base.snapshots.windows(2) {
            ts = tangent_step(&s, &ts, &w[0], &w[1]).unwrap();
            let now = h_norm_sq(&ts.vel, &grid, 1.0);
            assert!(now < prev);
            prev = now;
        }
    }

    #[test]
    fn ball_report() {
        let p = PhysicalParams::unit();
        let r = absorbing_radius(&p, 1.0);
        let series = vec![(0.0, 3.0 * r), (1.0, 2.0 * r), (2.0, 0.9 * r), (3.0, r)];
        let rep = absorbing_ball_check(&series, &p, 1.0);
        assert_eq!(rep.entry_time, Some(2.0));
        assert!(rep.pass());
        let bad = vec![(0.0, 0.5 * r), (1.0, 2.0 * r)];
        assert_eq!(absorbing_ball_check(&bad, &p, 1.0).violations, 1);
        assert_eq!(absorbing_ball_check(&[(0.0, 0.0)], &p, 0.0).r_theory, 0.0);
    }

    #[test]
    fn theory_value() {
        let q = q_theory(32, 3.2423, DEFAULT_KAPPA, 1.0);
        assert!((q - (-2.38)).abs() < 0.01, "{q}");
    }

    #[test]
    fn zero_base_trace_below_minus_n_over_lambda() {
        let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
        let s = solver(&grid);
        let base = vec![FlowState::zeros(&grid)];
        for strategy in [FamilyStrategy::Random, FamilyStrategy::StokesModes] {
            let est = n_trace_estimate(&s, &base, 4, strategy, DEFAULT_KAPPA, 0.0, &[1, 2, 3]).unwrap();
            assert!(est.q_empirical <= -4.0 / capital_lambda(1.0, 1.0, 1.0), "{est:?}");
        }
    }

    #[test]
    fn zero_base_form_is_minus_twice_v_norm() {
        let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
        let s = solver(&grid);
        let phi = random_stream_field(&grid, &StreamSpec::single(1.0, 0.2, 1.1));
        let q = linearized_quadratic_form(&s, &VelocityField::zeros(&grid), &phi);
        assert_relative_eq!(q, -2.0 * crate::norms::v_norm_sq(&phi, &grid, 1.0), max_relative = 1e-10);
    }

    #[test]
    fn dimension_reference_values() {
        let p = PhysicalParams { alpha: 1.0, beta: 0.0, nu: 1.0, l: 1.0, t_final: 1.0 };
        let b = dimension_bound(&p, DEFAULT_KAPPA, 1.0, 1.0).unwrap();
        assert!((b.bound - 24.28).abs() < 0.005, "{}", b.bound);
        assert!((b.dirichlet_reference - 1.482e-3).abs() < 5e-7);
        let z = dimension_bound(&p, DEFAULT_KAPPA, 0.0, 0.0).unwrap();
        assert_eq!(z.bound, 0.0);
    }

    proptest! {
        #[test]
        fn bound_monotone_in_beta(a in 1e-3f64..10.0, b in 0.0f64..10.0, d in 1e-3f64..5.0) {
            let p = PhysicalParams { alpha: a, beta: b, nu: 1.0, l: 1.0, t_final: 1.0 };
            let q = PhysicalParams { beta: b + d, ..p };
            prop_assert!(dimension_bound(&q, DEFAULT_KAPPA, 1.0, 1.0).unwrap().bound >= dimension_bound(&p, DEFAULT_KAPPA, 1.0, 1.0).unwrap().bound);
        }

        #[test]
        fn bound_round_trip(a in 1e-2f64..10.0, b in 1e-2f64..10.0, nu in 0.1f64..3.0, l in 0.2f64..4.0, f in 0.1f64..5.0) {
            let p = PhysicalParams { alpha: a, beta: b, nu, l, t_final: 1.0 };
            let phys = dimension_bound(&p, DEFAULT_KAPPA, f, f).unwrap().bound;
            let star = dimension_bound_nondim(a * l, b / l, DEFAULT_KAPPA, f * (l / nu).powi(2));
            prop_assert!((phys - star).abs() <= 1e-12 * phys);
        }
    }
}
