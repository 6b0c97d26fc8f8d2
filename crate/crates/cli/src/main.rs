use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dynslip::attractor::{self, FamilyStrategy};
use dynslip::constants::{boundary_eigenvalue_mu, capital_lambda, discrete_lambda_sq};
use dynslip::harness::{run_exhaustion, run_verification_suite, RunConfig};
use dynslip::solver::{run_to_time, Observer};
use dynslip::{nondimensionalize, Grid, PhysicalParams, XMode};

#[derive(Parser)]
#[command(name = "dynslip", version, about = "Channel flow with dynamic slip boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-integrate a configuration and write the norm series and snapshots.
    Simulate(Common),
    /// Boundary eigenvalue, Poincaré constant and Λ for each alpha.
    Constants(Common),
    /// Attractor dimension bound.
    Dimension(Common),
    /// N-trace estimates along a burned-in trajectory.
    Tangent(Common),
    /// Domain-exhaustion study over --n-list.
    Exhaustion(Common),
    /// Bundled verification suite; exits 1 if any check fails.
    Verify(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// One or more values; "inf" selects the no-slip limit.
    #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = parse_alpha)]
    alpha: Vec<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n_list: Vec<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Forcing norm ‖(f, h)‖_H.
    #[arg(long)]
    fnorm: Option<f64>,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("bad alpha '{s}': {e}")),
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => RunConfig::default(),
        };
        if let Some(&a) = self.alpha.first() {
            cfg.alpha = a;
        }
        macro_rules! set {
            ($($f:ident => $c:ident),*) => { $(if let Some(v) = self.$f.clone() { cfg.$c = v; })* };
        }
        set!(beta => beta, nu => nu, l => l, kappa => kappa, dt => dt, t_final => t_final, seed => seed, out => out_dir);
        if self.fnorm.is_some() {
            cfg.fnorm = self.fnorm;
        }
        Ok(cfg)
    }
}

fn alpha_json(a: f64) -> serde_json::Value {
    if a.is_finite() {
        json!(a)
    } else {
        json!("inf")
    }
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(value)?;
    fs::write(dir.join(name), &text)?;
    println!("{text}");
    Ok(())
}

fn simulate(c: &Common) -> Result<bool> {
    let cfg = c.config()?;
    let prep = cfg.prepare()?;
    let grid = &prep.solver.grid;
    let obs = Observer { cadence: cfg.cadence.max(1), snapshot_every: Some(cfg.cadence.max(1) * 10) };
    let tr = run_to_time(&prep.solver, &prep.initial, &prep.forcing, prep.solver.params.t_final, &obs)?;
    fs::create_dir_all(&cfg.out_dir)?;
    tr.write_series_csv(BufWriter::new(File::create(cfg.out_dir.join("series.csv"))?))?;
    let snap_dir = cfg.out_dir.join("snapshots");
    fs::create_dir_all(&snap_dir)?;
    for (k, s) in tr.snapshots.iter().enumerate() {
        s.write_binary(grid, BufWriter::new(File::create(snap_dir.join(format!("snap_{k:05}.bin")))?))?;
    }
    tr.final_state.write_binary(grid, BufWriter::new(File::create(cfg.out_dir.join("final.bin"))?))?;
    let fnorm = prep.forcing.h_norm(grid, prep.solver.params.beta);
    let series: Vec<(f64, f64)> = tr.series.iter().map(|r| (r.t, r.h_norm)).collect();
    let ball = attractor::absorbing_ball_check(&series, &prep.solver.params, fnorm);
    let worst_div = tr.series.iter().map(|r| r.div_residual).fold(0.0, f64::max);
    let ok = worst_div <= cfg.div_tol;
    write_json(
        &cfg.out_dir,
        "summary.json",
        &json!({ "samples": tr.series.len(), "final_t": tr.final_state.t, "forcing_h_norm": fnorm,
                 "max_div_residual": worst_div, "absorbing_ball": ball, "pass": ok }),
    )?;
    Ok(ok)
}

fn constants_cmd(c: &Common) -> Result<bool> {
    let cfg = c.config()?;
    let alphas = if c.alpha.is_empty() { vec![0.1, 1.0, 10.0, f64::INFINITY] } else { c.alpha.clone() };
    let grid = Grid::new(1, 8, cfg.ny.max(16), XMode::Periodic)?;
    let mut rows = Vec::new();
    for a in alphas {
        let mu = boundary_eigenvalue_mu(a)?;
        let discrete = discrete_lambda_sq(a, &grid)?;
        rows.push(json!({
            "alpha": alpha_json(a),
            "mu": mu.mu, "lambda_sq": mu.lambda_sq, "residual": mu.residual,
            "lambda_sq_discrete": discrete.lambda_sq,
            "capital_lambda": capital_lambda(a, cfg.beta, cfg.l),
        }));
    }
    write_json(&cfg.out_dir, "constants.json", &json!({ "beta": cfg.beta, "L": cfg.l, "rows": rows }))?;
    Ok(true)
}

fn dimension_cmd(c: &Common) -> Result<bool> {
    let cfg = c.config()?;
    let params = PhysicalParams { alpha: cfg.alpha, beta: cfg.beta, nu: cfg.nu, l: cfg.l, t_final: cfg.t_final };
    let (fh, fl2) = match cfg.fnorm {
        Some(f) => (f, f),
        None => {
            let spec = cfg.forcing_spec()?;
            let grid = cfg.grid()?;
            let l2 = PhysicalParams { beta: 0.0, ..params };
            (spec.physical_h_norm_sq(&grid, &params).sqrt(), spec.physical_h_norm_sq(&grid, &l2).sqrt())
        }
    };
    let b = attractor::dimension_bound(&params, cfg.kappa, fh, fl2)?;
    write_json(
        &cfg.out_dir,
        "dimension.json",
        &json!({
            "params": { "alpha": alpha_json(params.alpha), "beta": params.beta, "nu": params.nu, "L": params.l },
            "result": b,
        }),
    )?;
    Ok(true)
}

fn tangent_cmd(c: &Common) -> Result<bool> {
    let mut cfg = c.config()?;
    let fnorm = *cfg.fnorm.get_or_insert(1.0);
    let prep = cfg.prepare()?;
    let s = &prep.solver;
    let lam = capital_lambda(s.params.alpha, s.params.beta, 1.0);
    let st = attractor::burn_in(s, &prep.initial, &prep.forcing, fnorm, 100.0 * lam, 5.0 * lam)?;
    let obs = Observer { cadence: usize::MAX, snapshot_every: Some(5) };
    let tr = run_to_time(s, &st, &prep.forcing, st.t + s.params.t_final, &obs)?;
    let n_list = if c.n_list.is_empty() { vec![4, 8, 16] } else { c.n_list.clone() };
    let seeds: Vec<u64> = (cfg.seed..cfg.seed + 5).collect();
    let mut rows = Vec::new();
    let mut ok = true;
    for n in n_list {
        for strategy in [FamilyStrategy::Random, FamilyStrategy::StokesModes] {
            let e = attractor::n_trace_estimate(s, &tr.snapshots, n, strategy, cfg.kappa, fnorm, &seeds)?;
            ok &= e.pass();
            rows.push(e);
        }
    }
    write_json(&cfg.out_dir, "tangent.json", &json!({ "estimates": rows, "pass": ok }))?;
    Ok(ok)
}

fn exhaustion_cmd(c: &Common) -> Result<bool> {
    let cfg = c.config()?;
    let n_list = if c.n_list.is_empty() { vec![4, 8, 16, 32] } else { c.n_list.clone() };
    let r = run_exhaustion(&cfg, &n_list)?;
    let ok = r.strictly_decreasing();
    write_json(&cfg.out_dir, "exhaustion.json", &json!({ "report": r, "strictly_decreasing": ok }))?;
    Ok(ok)
}

fn verify_cmd(c: &Common) -> Result<bool> {
    let cfg = c.config()?;
    // Validates parameters before the heavier checks.
    nondimensionalize(&cfg.physical_params()?, &cfg.forcing_spec()?)?;
    let r = run_verification_suite(&cfg)?;
    write_json(&cfg.out_dir, "verify.json", &serde_json::to_value(&r)?)?;
    Ok(r.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Constants(c) => constants_cmd(c),
        Command::Dimension(c) => dimension_cmd(c),
        Command::Tangent(c) => tangent_cmd(c),
        Command::Exhaustion(c) => exhaustion_cmd(c),
        Command::Verify(c) => verify_cmd(c),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| {
                c.downcast_ref::<dynslip::Error>()
                    .is_some_and(|d| matches!(d, dynslip::Error::Config(_) | dynslip::Error::InvalidParams(_)))
            });
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
