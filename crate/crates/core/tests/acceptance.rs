//! Acceptance criteria 1 to 11. Each test prints one PASS/FAIL line before asserting.

use std::time::{Duration, Instant};

use dynslip::attractor::*;
use dynslip::constants::*;
use dynslip::harness::{run_exhaustion, RunConfig};
use dynslip::norms::h_norm_sq;
use dynslip::samples::{random_stream_field, StreamSpec};
use dynslip::solver::{run_to_time, Observer};
use dynslip::*;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{name}] {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(",")
}

fn unit(alpha: f64, beta: f64) -> PhysicalParams {
    PhysicalParams::new(alpha, beta, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn c01_mu_table() {
    let table =
        [(0.0, std::f64::consts::FRAC_PI_2), (0.1, 1.956), (1.0, 2.804), (10.0, 3.103), (f64::INFINITY, std::f64::consts::PI)];
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut rows = Vec::new();
    for (a, listed) in table {
        let t0 = Instant::now();
        let r = boundary_eigenvalue_mu(a).unwrap();
        slowest = slowest.max(t0.elapsed());
        let d = (r.mu - listed).abs();
        worst = worst.max(d);
        rows.push(format!("{a}:{:.6}(d={d:.1e})", r.mu));
    }
    let pass = worst <= 5e-4 && slowest < Duration::from_millis(1);
    report(1, "mu table", pass, format!("{} slowest={slowest:?}", rows.join(" ")));
}

#[test]
fn c02_discrete_eigenvalue() {
    let grid = Grid::new(8, 128, 64, XMode::DirichletEnds).unwrap();
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for a in [0.0, 0.1, 1.0, 10.0, 1e6] {
        let exact = boundary_eigenvalue_mu(a).unwrap().lambda_sq;
        let d = discrete_lambda_sq(a, &grid).unwrap();
        let rel = (d.lambda_sq - exact).abs() / exact;
        worst = worst.max(rel);
        rows.push(format!("{a}:{rel:.2e}"));
    }
    let el = t0.elapsed();
    report(2, "discrete eigenvalue", worst < 0.02 && el < Duration::from_secs(30), format!("{} time={el:?}", rows.join(" ")));
}

fn poiseuille_error(alpha: f64, ny: usize) -> f64 {
    let grid = Grid::new(1, 4, ny, XMode::Periodic).unwrap();
    let params = unit(alpha, 1.0);
    let s = Solver::new(&params, &Laws::linear(1.0), &grid, &SolverConfig { dt: 0.05, ..Default::default() }).unwrap();
    let f = ForcingSpec::Constant { f1: 1.0, f2: 0.0, h: 0.0 }.sample(&grid);
    let st = run_to_time(&s, &FlowState::zeros(&grid), &f, 20.0, &Observer { cadence: 100, snapshot_every: None })
        .unwrap()
        .final_state;
    let exact = |y: f64| if alpha > 1e3 { y * (1.0 - y) / 2.0 } else { -y * y / 2.0 + y / 3.0 + 1.0 / 6.0 };
    let mut err = (st.g()[0] - exact(0.0)).abs();
    for i in 0..grid.nux() {
        for j in 0..ny {
            err = err.max((st.u().at(j, i) - exact(grid.y_row(j))).abs());
        }
    }
    err
}

#[test]
fn c03_slip_poiseuille() {
    let t0 = Instant::now();
    let ns = [16usize, 32, 64];
    let errs: Vec<f64> = ns.iter().map(|&n| poiseuille_error(1.0, n)).collect();
    let within = ns.iter().zip(&errs).all(|(&n, &e)| e <= 4.0 / (n * n) as f64);
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let el = t0.elapsed();
    let pass = within && orders.iter().all(|&o| o >= 1.8) && el < Duration::from_secs(60);
    report(3, "slip Poiseuille", pass, format!("errors={} orders={orders:.3?} time={el:?}", sci(&errs)));
}

#[test]
fn c04_no_slip_limit() {
    let e = poiseuille_error(1e6, 64);
    report(4, "no-slip limit", e <= 1e-3, format!("sup error {e:.3e} at alpha=1e6, ny=64"));
}

#[test]
fn c05_energy_identity() {
    let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
    let params = PhysicalParams::unit();
    let f = ForcingSpec::GaussianBump { x0: 0.0, sigma_x: 0.5, radius: 1.5, amplitude: 5.0 }.sample(&grid);
    let u0 = FlowState::from_velocity(random_stream_field(&grid, &StreamSpec::single(8.0, 0.0, 1.2)), &grid, 0.0);
    let nonlinear = Laws { stress: StressLaw::shear_dependent(1.0, 2.0), slip: SlipLaw::rational(2.0, 1.0) };
    let mut ratios = Vec::new();
    for laws in [Laws::linear(1.0), nonlinear] {
        let maxes: Vec<f64> = [0.02, 0.01, 0.005, 0.0025]
            .iter()
            .map(|&dt| {
                let s = Solver::new(&params, &laws, &grid, &SolverConfig { dt, ..Default::default() }).unwrap();
                let tr = run_to_time(&s, &u0, &f, 0.2, &Observer::default()).unwrap();
                tr.series.iter().map(|r| r.energy_residual).fold(0.0, f64::max)
            })
            .collect();
        ratios.extend(maxes.windows(2).map(|w| w[0] / w[1]));
    }
    let s = Solver::new(&params, &Laws::linear(1.0), &grid, &SolverConfig::default()).unwrap();
    let zero = run_to_time(&s, &FlowState::zeros(&grid), &Forcing::zero(&grid), 0.2, &Observer::default()).unwrap();
    let zero_max = zero.series.iter().map(|r| r.energy_residual).fold(0.0, f64::max);
    let pass = ratios.iter().all(|&r| r >= 1.8) && zero_max == 0.0;
    report(5, "energy identity", pass, format!("halving ratios={ratios:.3?} zero-solution residual={zero_max:e}"));
}

#[test]
fn c06_inequality_suites() {
    let t0 = Instant::now();
    let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
    let mut failed = Vec::new();
    let mut count = 0;
    for (k, (a, b)) in [(0.1, 1.0), (1.0, 1.0), (10.0, 0.01)].into_iter().enumerate() {
        let params = unit(a, b);
        let fields = sample_fields(&grid, 200, 100 + k as u64);
        for r in verify_korn_fields(&params, &grid, &fields).unwrap().into_iter().chain([verify_ladyzhenskaya(&fields, &grid, a)])
        {
            count += 1;
            if !r.pass || r.sample_count < 200 {
                failed.push(format!("{}@alpha={a}", r.name));
            }
        }
        let fam = h_orthonormalize_half(&fields[..8], &grid, b).unwrap();
        let r = verify_suborthonormal(&fam, &random_xi(8, 200, 7 + k as u64), &grid).unwrap();
        count += 1;
        if !r.pass || r.sample_count < 200 {
            failed.push(format!("suborthonormal@alpha={a}"));
        }
    }
    let el = t0.elapsed();
    let pass = failed.is_empty() && el < Duration::from_secs(120);
    report(6, "inequality suites", pass, format!("{count} reports, failures={failed:?} time={el:?}"));
}

#[test]
fn c07_absorbing_ball() {
    let t0 = Instant::now();
    let cases = [
        (1.0, 1.0, ForcingSpec::GaussianBump { x0: 0.0, sigma_x: 0.5, radius: 2.0, amplitude: 1.0 }),
        (0.1, 1.0, ForcingSpec::BoundaryBump { x0: 0.5, width: 1.5, amplitude: 1.0 }),
        (1.0, 0.01, ForcingSpec::Constant { f1: 1.0, f2: 0.0, h: 1.0 }),
    ];
    let mut rows = Vec::new();
    let mut pass = true;
    for (a, b, spec) in cases {
        let grid = Grid::new(4, 64, 16, XMode::DirichletEnds).unwrap();
        let params = PhysicalParams::new(a, b, 1.0, 1.0, 10.0).unwrap();
        let f = spec.sample(&grid).normalized(&grid, b, 1.0);
        let r = absorbing_radius(&params, 1.0);
        let mut u0 = random_stream_field(&grid, &StreamSpec::single(1.0, 0.0, 2.0));
        u0.scale(1.8 * r / h_norm_sq(&u0, &grid, b).sqrt());
        let s = Solver::new(&params, &Laws::linear(1.0), &grid, &SolverConfig { dt: 0.02, ..Default::default() }).unwrap();
        let tr = run_to_time(&s, &FlowState::from_velocity(u0, &grid, 0.0), &f, 10.0, &Observer::default()).unwrap();
        let series: Vec<(f64, f64)> = tr.series.iter().map(|r| (r.t, r.h_norm)).collect();
        let rep = absorbing_ball_check(&series, &params, 1.0);
        pass &= rep.pass();
        rows.push(format!("({a},{b}): entry={:?} violations={}", rep.entry_time, rep.violations));
    }
    let el = t0.elapsed();
    report(7, "absorbing ball", pass && el < Duration::from_secs(600), format!("{} time={el:?}", rows.join("; ")));
}

#[test]
fn c08_quasidifferentiability() {
    let grid = Grid::new(2, 32, 16, XMode::DirichletEnds).unwrap();
    let params = PhysicalParams::unit();
    let f = ForcingSpec::GaussianBump { x0: 0.0, sigma_x: 0.5, radius: 1.5, amplitude: 5.0 }.sample(&grid);
    let u0 = FlowState::from_velocity(random_stream_field(&grid, &StreamSpec::single(10.0, 0.0, 1.2)), &grid, 0.0);
    let dir = random_stream_field(&grid, &StreamSpec::single(3.0, 0.4, 0.9));
    let eps = [1e-1, 1e-2, 1e-3];
    let run = |laws: Laws, scheme: ConvectionScheme| {
        let cfg = SolverConfig { dt: 0.005, convection_scheme: scheme, ..Default::default() };
        let s = Solver::new(&params, &laws, &grid, &cfg).unwrap();
        quasidiff_ratios(&s, &u0, &dir, &eps, 0.5, &f).unwrap()
    };
    let nonlinear = Laws { stress: StressLaw::shear_dependent(1.0, 2.0), slip: SlipLaw::rational(2.0, 1.0) };
    let a = run(nonlinear, ConvectionScheme::SkewSymmetric);
    let b = run(Laws::linear(1.0), ConvectionScheme::Disabled);
    let worst_linear = b.errors.iter().cloned().fold(0.0, f64::max);
    let pass = a.monotone && a.ratios[2] <= 0.1 * a.ratios[0] && worst_linear <= 1e-9;
    report(8, "quasidifferentiability", pass, format!("ratios={} linear remainder={worst_linear:.1e}", sci(&a.ratios)));
}

#[test]
fn c09_trace_vs_theory() {
    let t0 = Instant::now();
    let grid = Grid::new(4, 64, 16, XMode::DirichletEnds).unwrap();
    let params = PhysicalParams::unit();
    let f = ForcingSpec::GaussianBump { x0: 0.0, sigma_x: 0.5, radius: 2.0, amplitude: 1.0 }
        .sample(&grid)
        .normalized(&grid, 1.0, 1.0);
    let s = Solver::new(&params, &Laws::linear(1.0), &grid, &SolverConfig { dt: 0.02, ..Default::default() }).unwrap();
    let lam = capital_lambda(1.0, 1.0, 1.0);
    let st = burn_in(&s, &FlowState::zeros(&grid), &f, 1.0, 100.0, 5.0 * lam).unwrap();
    let base =
        run_to_time(&s, &st, &f, st.t + 2.0, &Observer { cadence: usize::MAX, snapshot_every: Some(5) }).unwrap().snapshots;
    let zero_base = vec![FlowState::zeros(&grid)];
    let mut pass = true;
    let mut rows = Vec::new();
    for n in [4, 8, 16, 32] {
        for strategy in [FamilyStrategy::Random, FamilyStrategy::StokesModes] {
            let e = n_trace_estimate(&s, &base, n, strategy, DEFAULT_KAPPA, 1.0, &[1, 2, 3, 4, 5]).unwrap();
            let z = n_trace_estimate(&s, &zero_base, n, strategy, DEFAULT_KAPPA, 0.0, &[1, 2, 3, 4, 5]).unwrap();
            let zero_ok = z.q_empirical <= -(n as f64) / lam;
            pass &= e.pass() && zero_ok;
            rows.push(format!("N={n} {strategy:?}: q={:.2} theory={:.3} zero-base ok={zero_ok}", e.q_empirical, e.q_theory));
        }
    }
    let el = t0.elapsed();
    report(9, "N-trace vs theory", pass && el < Duration::from_secs(1200), format!("{} time={el:?}", rows.join("; ")));
}

#[test]
fn c10_dimension_formula() {
    let kappa = 1.0 / (2.0 * 3f64.sqrt());
    let p = |alpha: f64, beta: f64| PhysicalParams { alpha, beta, nu: 1.0, l: 1.0, t_final: 1.0 };
    let at_beta = |beta: f64| dimension_bound(&p(1.0, beta), kappa, 1.0, 1.0).unwrap().bound;
    let b0 = at_beta(0.0);
    let limit = dimension_bound(&p(f64::INFINITY, 0.7), kappa, 1.0, 1.0).unwrap().bound;
    let limit_formula = 8.0 * kappa * (32.0 / std::f64::consts::PI.powi(2)).powi(2);
    let betas = [0.0, 1e-3, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4];
    let vals: Vec<f64> = betas.iter().map(|&b| at_beta(b)).collect();
    let monotone = vals.windows(2).all(|w| w[1] >= w[0]);
    let diverging = at_beta(1e4) > 1e3 * b0;
    let reference = dimension_bound(&p(1.0, 0.0), kappa, 1.0, 1.0).unwrap();
    let refs_ok = format!("{:.2}", reference.bound) == "24.28" && format!("{:.3e}", reference.dirichlet_reference) == "1.482e-3";
    let phys = PhysicalParams::new(0.37, 2.5, 0.013, 3.2, 7.0).unwrap();
    let spec = ForcingSpec::GaussianBump { x0: 0.4, sigma_x: 0.3, radius: 1.1, amplitude: 2.5 };
    let (star, fs, sc) = nondimensionalize(&phys, &spec).unwrap();
    let (back, fb) = redimensionalize(&star, &fs, &sc);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut rt = [
        rel(back.alpha, phys.alpha),
        rel(back.beta, phys.beta),
        rel(back.nu, phys.nu),
        rel(back.l, phys.l),
        rel(back.t_final, phys.t_final),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if let (
        ForcingSpec::GaussianBump { x0, sigma_x, radius, amplitude },
        ForcingSpec::GaussianBump { x0: x1, sigma_x: s1, radius: r1, amplitude: a1 },
    ) = (spec, fb)
    {
        rt = rt.max(rel(x1, x0)).max(rel(s1, sigma_x)).max(rel(r1, radius)).max(rel(a1, amplitude));
    } else {
        rt = f64::INFINITY;
    }
    let pass = rel(b0, limit) <= 1e-12 && rel(b0, limit_formula) <= 1e-12 && monotone && diverging && refs_ok && rt <= 1e-12;
    report(
        10,
        "dimension formula",
        pass,
        format!(
            "bound(beta=0)={b0:.6} alpha-inf={limit:.6} monotone={monotone} ratio(1e4)={:.3e} dirichlet={:.4e} round-trip={rt:.1e}",
            at_beta(1e4) / b0,
            reference.dirichlet_reference
        ),
    );
}

#[test]
fn c11_exhaustion() {
    let t0 = Instant::now();
    let cfg = RunConfig {
        alpha: 0.1,
        n_trunc: 4,
        nx: 32,
        ny: 8,
        t_final: 2.0,
        dt: 0.02,
        radius: 1.5,
        sigma_x: 0.5,
        amplitude: 5.0,
        cadence: 5,
        ..Default::default()
    };
    let r = run_exhaustion(&cfg, &[4, 8, 16, 32]).unwrap();
    let head = &r.errors[..3];
    let strictly = head.windows(2).all(|w| w[1] < w[0]) && head[2] > r.errors[3];
    let el = t0.elapsed();
    report(11, "exhaustion", strictly && el < Duration::from_secs(900), format!("e(4,8,16)={} ref=32 time={el:?}", sci(head)));
}
