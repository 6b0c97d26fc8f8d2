//! Run configuration, domain-exhaustion studies and the bundled verification suite.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::attractor::{self, FamilyStrategy, DEFAULT_KAPPA};
use crate::constants::{self, boundary_eigenvalue_mu, capital_lambda};
use crate::constitutive::{validate_conditions, Laws, SlipLaw, StressLaw};
use crate::error::{Error, Result};
use crate::field::{FlowState, VelocityField};
use crate::forcing::{Forcing, ForcingSpec};
use crate::grid::{Grid, XMode};
use crate::norms::h_norm_sq;
use crate::params::{nondimensionalize, PhysicalParams};
use crate::samples::{random_stream_field, StreamSpec};
use crate::solver::{run_to_time, ConvectionScheme, Observer, Solver, SolverConfig};

/// Flat key/value run configuration (TOML).
///
/// Physical symbols keep their usual names; everything is mapped to the unit channel before
/// a run. Grid sizes refer to the unit channel `(−n_trunc, n_trunc) × (0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "T")]
    pub t_final: f64,

    pub n_trunc: usize,
    pub nx: usize,
    pub ny: usize,
    pub x_mode: XMode,

    pub dt: f64,
    pub div_tol: f64,
    pub theta: f64,
    pub convection: ConvectionScheme,

    /// "linear" or "shear_dependent".
    pub stress: String,
    pub nu_inf: f64,
    pub nu_0: f64,
    /// "linear" or "rational".
    pub slip: String,
    pub slip_a: f64,
    pub slip_b: f64,
    /// Declared structural constants overriding the exact ones.
    pub stress_c1: Option<f64>,
    pub stress_c2: Option<f64>,
    pub stress_c3: Option<f64>,
    pub slip_c1: Option<f64>,
    pub slip_c2: Option<f64>,
    pub slip_c3: Option<f64>,

    /// "zero", "constant", "gaussian_bump" or "boundary_bump".
    pub forcing: String,
    pub f1: f64,
    pub f2: f64,
    pub h: f64,
    pub x0: f64,
    pub sigma_x: f64,
    pub radius: f64,
    pub width: f64,
    pub amplitude: f64,
    /// Rescale the sampled forcing to this ‖(f, h)‖_H on the unit channel.
    pub fnorm: Option<f64>,

    /// Amplitude of the stream-function initial field (0 = rest).
    pub init_amplitude: f64,
    pub init_width: f64,

    pub kappa: f64,
    pub out_dir: PathBuf,
    /// Series cadence in steps.
    pub cadence: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            nu: 1.0,
            l: 1.0,
            t_final: 1.0,
            n_trunc: 4,
            nx: 64,
            ny: 16,
            x_mode: XMode::DirichletEnds,
            dt: 0.01,
            div_tol: 1e-9,
            theta: 1.0,
            convection: ConvectionScheme::SkewSymmetric,
            stress: "linear".into(),
            nu_inf: 1.0,
            nu_0: 2.0,
            slip: "linear".into(),
            slip_a: 2.0,
            slip_b: 1.0,
            stress_c1: None,
            stress_c2: None,
            stress_c3: None,
            slip_c1: None,
            slip_c2: None,
            slip_c3: None,
            forcing: "gaussian_bump".into(),
            f1: 1.0,
            f2: 0.0,
            h: 0.0,
            x0: 0.0,
            sigma_x: 0.5,
            radius: 1.5,
            width: 1.0,
            amplitude: 1.0,
            fnorm: None,
            init_amplitude: 0.0,
            init_width: 1.0,
            kappa: DEFAULT_KAPPA,
            out_dir: PathBuf::from("out"),
            cadence: 1,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.alpha, self.beta, self.nu, self.l, self.t_final)
    }

    pub fn forcing_spec(&self) -> Result<ForcingSpec> {
        Ok(match self.forcing.as_str() {
            "zero" => ForcingSpec::Zero,
            "constant" => ForcingSpec::Constant { f1: self.f1, f2: self.f2, h: self.h },
            "gaussian_bump" => {
                ForcingSpec::GaussianBump { x0: self.x0, sigma_x: self.sigma_x, radius: self.radius, amplitude: self.amplitude }
            }
            "boundary_bump" => ForcingSpec::BoundaryBump { x0: self.x0, width: self.width, amplitude: self.amplitude },
            other => return Err(Error::Config(format!("unknown forcing '{other}'"))),
        })
    }

    pub fn laws(&self) -> Result<Laws> {
        let mut stress = match self.stress.as_str() {
            "linear" => StressLaw::linear(1.0),
            "shear_dependent" => StressLaw::shear_dependent(self.nu_inf, self.nu_0),
            other => return Err(Error::Config(format!("unknown stress law '{other}'"))),
        };
        let mut slip = match self.slip.as_str() {
            "linear" => SlipLaw::linear(1.0),
            "rational" => SlipLaw::rational(self.slip_a, self.slip_b),
            other => return Err(Error::Config(format!("unknown slip law '{other}'"))),
        };
        stress = stress.with_constants(
            self.stress_c1.unwrap_or(stress.c1),
            self.stress_c2.unwrap_or(stress.c2),
            self.stress_c3.unwrap_or(stress.c3),
        );
        slip = slip.with_constants(
            self.slip_c1.unwrap_or(slip.c1),
            self.slip_c2.unwrap_or(slip.c2),
            self.slip_c3.unwrap_or(slip.c3),
        );
        Ok(Laws { stress, slip })
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig { dt: self.dt, div_tol: self.div_tol, convection_scheme: self.convection, theta: self.theta }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_trunc, self.nx, self.ny, self.x_mode)
    }

    /// Everything needed for a run on the unit channel.
    pub fn prepare(&self) -> Result<Prepared> {
        let (star, fspec, _) = nondimensionalize(&self.physical_params()?, &self.forcing_spec()?)?;
        let grid = self.grid()?;
        let mut forcing = fspec.sample(&grid);
        if let Some(target) = self.fnorm {
            forcing = forcing.normalized(&grid, star.beta, target);
        }
        let solver = Solver::new(&star, &self.laws()?, &grid, &self.solver_config())?;
        let init = if self.init_amplitude != 0.0 {
            random_stream_field(&grid, &StreamSpec::single(self.init_amplitude, 0.0, self.init_width))
        } else {
            VelocityField::zeros(&grid)
        };
        Ok(Prepared { forcing_spec: fspec, forcing, initial: FlowState::from_velocity(init, &grid, 0.0), solver })
    }
}

/// A configuration mapped to the unit channel.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Nondimensional forcing template.
    pub forcing_spec: ForcingSpec,
    pub forcing: Forcing,
    pub initial: FlowState,
    pub solver: Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub n_list: Vec<usize>,
    /// ‖u_n − u_ref‖ in L²(0, T; H) after zero extension.
    pub errors: Vec<f64>,
    pub ref_n: usize,
    /// Adjacent pairs (in increasing n) where the error grew.
    pub inversions: usize,
}

impl ExhaustionReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Embeds a field from a channel of half-length `n` into a wider one by zero extension.
fn zero_extend(f: &VelocityField, small: &Grid, big: &Grid) -> VelocityField {
    let off = ((big.n_trunc - small.n_trunc) as f64 / small.dx).round() as usize;
    let mut e = VelocityField::zeros(big);
    for j in 0..small.ny {
        for i in 0..small.nux() {
            e.u.set(j, i + off, f.u.at(j, i));
        }
    }
    for j in 0..=small.ny {
        for i in 0..small.nx {
            e.v.set(j, i + off, f.v.at(j, i));
        }
    }
    for i in 0..small.nux() {
        e.g[i + off] = f.g[i];
    }
    e
}

/// Solves on (−n, n) for each n at fixed dx and compares with the largest n.
pub fn run_exhaustion(cfg: &RunConfig, n_list: &[usize]) -> Result<ExhaustionReport> {
    if n_list.is_empty() {
        return Err(Error::Config("empty n list".into()));
    }
    if cfg.x_mode != XMode::DirichletEnds {
        return Err(Error::Config("exhaustion needs x_mode = dirichlet_ends".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let (star, fspec, _) = nondimensionalize(&cfg.physical_params()?, &cfg.forcing_spec()?)?;
    let radius = fspec.support_radius();
    if radius >= ns[0] as f64 {
        return Err(Error::ForcingSupport { radius, n_min: ns[0] });
    }
    let base = cfg.grid()?;
    let cells_per_unit = base.nx as f64 / (2.0 * base.n_trunc as f64);
    let laws = cfg.laws()?;
    let scfg = cfg.solver_config();
    let steps_per_sample = cfg.cadence.max(1);
    let runs: Vec<Result<(Grid, Vec<FlowState>)>> = ns
        .par_iter()
        .map(|&n| {
            let nx = (2.0 * n as f64 * cells_per_unit).round() as usize;
            let grid = Grid::new(n, nx, base.ny, XMode::DirichletEnds)?;
            let mut forcing = fspec.sample(&grid);
            if let Some(target) = cfg.fnorm {
                // Normalise on the smallest domain so that every member sees the same forcing.
                let small =
                    Grid::new(ns[0], (2.0 * ns[0] as f64 * cells_per_unit).round() as usize, base.ny, XMode::DirichletEnds)?;
                let norm = fspec.sample(&small).h_norm(&small, star.beta);
                if norm > 0.0 {
                    forcing.field.scale(target / norm);
                }
            }
            let solver = Solver::new(&star, &laws, &grid, &scfg)?;
            let obs = Observer { cadence: usize::MAX, snapshot_every: Some(steps_per_sample) };
            let tr = run_to_time(&solver, &FlowState::zeros(&grid), &forcing, star.t_final, &obs)?;
            Ok((grid, tr.snapshots))
        })
        .collect();
    let runs: Vec<(Grid, Vec<FlowState>)> = runs.into_iter().collect::<Result<_>>()?;
    let (ref_grid, ref_traj) = runs.last().expect("nonempty list");
    let errors: Vec<f64> = runs
        .iter()
        .map(|(grid, traj)| {
            let vals: Vec<(f64, f64)> = traj
                .iter()
                .zip(ref_traj)
                .map(|(a, b)| (a.t, h_norm_sq(&zero_extend(&a.vel, grid, ref_grid).minus(&b.vel), ref_grid, star.beta)))
                .collect();
            vals.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum::<f64>().sqrt()
        })
        .collect();
    let inversions = errors.windows(2).filter(|w| w[1] > w[0]).count();
    Ok(ExhaustionReport { ref_n: *ns.last().unwrap(), n_list: ns, errors, inversions })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, serde_json::Value)>) -> CheckResult {
    match f() {
        Ok((pass, detail)) => CheckResult { name: name.into(), pass, detail },
        Err(e) => CheckResult { name: name.into(), pass: false, detail: json!({ "error": e.to_string() }) },
    }
}

/// Reference values of μ(α) to four significant digits.
pub const MU_TABLE: [(f64, f64); 5] =
    [(0.0, std::f64::consts::FRAC_PI_2), (0.1, 1.956), (1.0, 2.804), (10.0, 3.103), (f64::INFINITY, std::f64::consts::PI)];

/// Runs the bundled checks at desk scale. Grid, law and time-step settings come from `cfg`.
pub fn run_verification_suite(cfg: &RunConfig) -> Result<VerificationReport> {
    let laws = cfg.laws()?;
    let (star, _, _) = nondimensionalize(&cfg.physical_params()?, &cfg.forcing_spec()?)?;
    let grid = cfg.grid()?;
    let seed = cfg.seed;
    let mut checks = Vec::new();

    checks.push(check("constitutive_conditions", || {
        let s = validate_conditions(&laws.stress, 1000, seed);
        let b = validate_conditions(&laws.slip, 1000, seed + 1);
        Ok((s.pass() && b.pass(), json!({ "stress": s, "slip": b })))
    }));

    let fields = constants::sample_fields(&grid, 40, seed);
    checks.push(check("korn_suite", || {
        let reps = constants::verify_korn_fields(&star, &grid, &fields)?;
        Ok((reps.iter().all(|r| r.pass), serde_json::to_value(&reps).unwrap_or_default()))
    }));
    checks.push(check("ladyzhenskaya", || {
        let r = constants::verify_ladyzhenskaya(&fields, &grid, star.alpha);
        Ok((r.pass, serde_json::to_value(&r).unwrap_or_default()))
    }));
    checks.push(check("suborthonormal", || {
        let fam = attractor::h_orthonormalize_half(&fields[..8], &grid, star.beta)?;
        let r = constants::verify_suborthonormal(&fam, &constants::random_xi(8, 200, seed), &grid)?;
        Ok((r.pass, serde_json::to_value(&r).unwrap_or_default()))
    }));

    // Self-consistency of the root finder; the distance to the listed values is reported only.
    checks.push(check("mu_table", || {
        let mut rows = Vec::new();
        let mut ok = true;
        let mut prev = 0.0;
        for (a, listed) in MU_TABLE {
            let r = boundary_eigenvalue_mu(a)?;
            ok &= r.residual <= 1e-12 && r.mu >= prev && (r.bracket.0..=r.bracket.1).contains(&r.mu);
            prev = r.mu;
            rows.push(json!({ "alpha": if a.is_finite() { json!(a) } else { json!("inf") }, "mu": r.mu, "listed": listed, "abs_diff": (r.mu - listed).abs(), "residual": r.residual }));
        }
        Ok((ok, json!(rows)))
    }));

    let solver = Solver::new(&star, &laws, &grid, &cfg.solver_config())?;
    let forcing = ForcingSpec::GaussianBump { x0: 0.0, sigma_x: 0.5, radius: 1.5, amplitude: 5.0 }.sample(&grid);
    let init = FlowState::from_velocity(random_stream_field(&grid, &StreamSpec::single(8.0, 0.0, 1.2)), &grid, 0.0);

    checks.push(check("energy_residual_order", || {
        let span = 10.0 * cfg.dt;
        let mut maxes = Vec::new();
        for dt in [cfg.dt, 0.5 * cfg.dt] {
            let s = Solver::new(&star, &laws, &grid, &SolverConfig { dt, ..cfg.solver_config() })?;
            let tr = run_to_time(&s, &init, &forcing, span, &Observer::default())?;
            maxes.push(tr.series.iter().map(|r| r.energy_residual).fold(0.0, f64::max));
        }
        let ratio = maxes[0] / maxes[1];
        Ok((ratio >= 1.8, json!({ "residuals": maxes, "ratio": ratio, "order": ratio.log2() })))
    }));

    checks.push(check("divergence_residuals", || {
        let tr = run_to_time(&solver, &init, &forcing, 10.0 * cfg.dt, &Observer::default())?;
        let worst = tr.series.iter().map(|r| r.div_residual).fold(0.0, f64::max);
        Ok((worst <= cfg.div_tol, json!({ "max": worst, "div_tol": cfg.div_tol })))
    }));

    checks.push(check("quasidiff_ratios", || {
        let dir = random_stream_field(&grid, &StreamSpec::single(3.0, 0.4, 0.9));
        let r = attractor::quasidiff_ratios(&solver, &init, &dir, &[1e-1, 1e-2, 1e-3], 20.0 * cfg.dt, &forcing)?;
        let ok = r.monotone && r.ratios[2] <= 0.1 * r.ratios[0];
        Ok((ok, serde_json::to_value(&r).unwrap_or_default()))
    }));

    checks.push(check("trace_vs_theory", || {
        let fnorm = 1.0;
        let f1 = forcing.clone().normalized(&grid, star.beta, fnorm);
        let lam = capital_lambda(star.alpha, star.beta, 1.0);
        let st = attractor::burn_in(&solver, &FlowState::zeros(&grid), &f1, fnorm, 200.0, lam)?;
        let tr = run_to_time(&solver, &st, &f1, st.t + 1.0, &Observer { cadence: usize::MAX, snapshot_every: Some(5) })?;
        let mut rows = Vec::new();
        let mut ok = true;
        for n in [4, 8] {
            for strategy in [FamilyStrategy::Random, FamilyStrategy::StokesModes] {
                let e = attractor::n_trace_estimate(
                    &solver,
                    &tr.snapshots,
                    n,
                    strategy,
                    cfg.kappa,
                    fnorm,
                    &[seed, seed + 1, seed + 2],
                )?;
                ok &= e.pass();
                rows.push(e);
            }
        }
        Ok((ok, serde_json::to_value(&rows).unwrap_or_default()))
    }));

    checks.push(check("bound_monotonicity", || {
        let p = cfg.physical_params()?;
        let b = |beta: f64| attractor::dimension_bound(&PhysicalParams { beta, ..p }, cfg.kappa, 1.0, 1.0).map(|d| d.bound);
        let betas = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4];
        let vals: Vec<f64> = betas.iter().map(|&x| b(x)).collect::<Result<_>>()?;
        let mono = vals.windows(2).all(|w| w[1] >= w[0]);
        let limit = attractor::dimension_bound(&PhysicalParams { alpha: f64::INFINITY, ..p }, cfg.kappa, 1.0, 1.0)?.bound;
        let ok = mono && (vals[0] - limit).abs() <= 1e-12 * limit && vals[6] > 1e3 * vals[0];
        Ok((ok, json!({ "beta": betas, "bound": vals, "alpha_inf": limit })))
    }));

    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport { checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_flat_toml() {
        let c = RunConfig::from_toml_str(
            "alpha = 2.0\nL = 3.0\nx_mode = \"periodic\"\nforcing = \"constant\"\nconvection = \"divergence_form\"\n",
        )
        .unwrap();
        assert_eq!(c.alpha, 2.0);
        assert_eq!(c.l, 3.0);
        assert_eq!(c.x_mode, XMode::Periodic);
        assert_eq!(c.convection, ConvectionScheme::DivergenceForm);
        assert!(matches!(c.forcing_spec().unwrap(), ForcingSpec::Constant { .. }));
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
        let bad = RunConfig { stress: "plastic".into(), ..Default::default() };
        assert!(bad.laws().is_err());
    }

    #[test]
    fn zero_extension_preserves_norm() {
        let small = Grid::new(2, 16, 8, XMode::DirichletEnds).unwrap();
        let big = Grid::new(4, 32, 8, XMode::DirichletEnds).unwrap();
        let f = random_stream_field(&small, &StreamSpec::single(1.0, 0.3, 1.0));
        let e = zero_extend(&f, &small, &big);
        assert!((h_norm_sq(&e, &big, 1.0) - h_norm_sq(&f, &small, 1.0)).abs() < 1e-14);
        assert!((big.x_face(8) - small.x_face(0)).abs() < 1e-15);
    }

    #[test]
    fn exhaustion_trivial_cases() {
        let cfg = RunConfig { forcing: "zero".into(), nx: 16, n_trunc: 2, ny: 8, t_final: 0.1, dt: 0.02, ..Default::default() };
        let r = run_exhaustion(&cfg, &[2, 4]).unwrap();
        assert!(r.errors.iter().all(|&e| e == 0.0));
        let cfg = RunConfig { nx: 16, n_trunc: 2, ny: 8, t_final: 0.1, dt: 0.02, radius: 1.0, ..Default::default() };
        let single = run_exhaustion(&cfg, &[4]).unwrap();
        assert_eq!(single.errors, vec![0.0]);
        assert_eq!(single.ref_n, 4);
        let wide = RunConfig { radius: 3.0, ..cfg };
        assert!(matches!(run_exhaustion(&wide, &[2, 4]), Err(Error::ForcingSupport { .. })));
    }
}
