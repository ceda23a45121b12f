//! Command-line front end: run the steady, eigenvalue and periodic
//! continuations or the rigorous saddle-node validation, writing
//! figure-ready CSV files and JSON artifacts.
//!
//! Outputs are deterministic: re-running a configuration reproduces every
//! file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use memswave::continuation::Settings;
use memswave::{eigen, periodic, steady, validate};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "memswave", version, about = "Spectral continuation and validated fold enclosure for a MEMS membrane wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continue the steady branch from zero voltage through the fold.
    Steady {
        /// Chebyshev truncation.
        #[arg(long, default_value_t = 65)]
        m: usize,
        /// Initial arclength step.
        #[arg(long, default_value_t = 1e-3)]
        ds: f64,
        /// Newton tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Maximum number of branch points.
        #[arg(long, default_value_t = 400)]
        steps: usize,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Continue an eigenvalue branch of the linearized operator.
    Eigen {
        /// Mode index (1, 2 or 3).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 65)]
        m: usize,
        /// Voltage grid spacing.
        #[arg(long = "dlambda", default_value_t = 0.005)]
        dlambda: f64,
        /// Last grid voltage.
        #[arg(long = "lambda-max", default_value_t = 0.34)]
        lambda_max: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Continue a branch of time-periodic solutions at frequency pi p / (2 q).
    Periodic {
        /// Eigenmode the branch bifurcates from.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 11)]
        q: usize,
        /// Chebyshev truncation.
        #[arg(long, default_value_t = 40)]
        m: usize,
        /// Cosine (time) truncation.
        #[arg(long = "K", default_value_t = 20)]
        n_four: usize,
        /// Initial bifurcation amplitude.
        #[arg(long, default_value_t = 1e-3)]
        b: f64,
        #[arg(long, default_value_t = 1e-3)]
        ds: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 150)]
        steps: usize,
        /// Stop once the voltage drops below this value.
        #[arg(long = "lambda-min", default_value_t = 0.08)]
        lambda_min: f64,
        /// Keep every stride-th point's coefficients in the JSON sidecar.
        #[arg(long, default_value_t = 10)]
        stride: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rigorously enclose the fold of the steady branch.
    Validate {
        #[arg(long, default_value_t = 65)]
        m: usize,
        #[arg(long, default_value_t = 1.05)]
        nu: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// A-priori radius cap checked a posteriori.
        #[arg(long = "r-star", default_value_t = 1e-6)]
        r_star: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn check_common(m: usize, tol: f64) -> Result<()> {
    if m < 2 {
        bail!("truncation m = {m} must be at least 2");
    }
    if !(tol > 0.0) {
        bail!("tolerance must be positive");
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn run_steady(m: usize, ds: f64, tol: f64, steps: usize, out: &Path) -> Result<()> {
    check_common(m, tol)?;
    let settings = Settings { ds, tol, ..Settings::default() };
    let branch = steady::continue_from_zero(m, &settings, steps)?;
    let mut csv = String::from("lambda,delta,u_center,sup_norm\n");
    for pt in &branch.points {
        let p = steady::unpack(pt.param, &pt.unknowns, m);
        let u0 = p.eval_u(0.0)?;
        let sup = (0..=64)
            .map(|i| p.eval_u(-1.0 + i as f64 / 32.0).unwrap().abs())
            .fold(0.0f64, f64::max);
        writeln!(csv, "{},{},{},{}", pt.param, p.delta, u0, sup)?;
    }
    let path = write_file(out, "steady_branch.csv", &csv)?;
    println!("steady branch: {} points -> {}", branch.points.len(), path.display());
    let problem = steady::SteadyProblem { m };
    if let Some(fold) = memswave::continuation::detect_fold(&problem, &branch, &settings)? {
        println!("fold detected at lambda = {:.15}", fold.param);
    }
    Ok(())
}

fn run_eigen(k: usize, m: usize, dlambda: f64, lambda_max: f64, tol: f64, out: &Path) -> Result<()> {
    check_common(m, tol)?;
    if !(dlambda > 0.0) {
        bail!("dlambda must be positive");
    }
    let branch = eigen::continue_branch(k, m, dlambda, lambda_max, tol)?;
    let mut csv = String::from("lambda,mu\n");
    for pt in &branch {
        writeln!(csv, "{},{}", pt.lambda, pt.mu)?;
    }
    let path = write_file(out, &format!("eigen_k{k}.csv"), &csv)?;
    println!(
        "eigenvalue branch k = {k}: {} points, mu({}) = {:.12} -> {}",
        branch.len(),
        branch.last().map(|p| p.lambda).unwrap_or(0.0),
        branch.last().map(|p| p.mu).unwrap_or(0.0),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SidecarPoint {
    index: usize,
    lambda: f64,
    delta: Vec<f64>,
    a1: Vec<Vec<f64>>,
    a2: Vec<Vec<f64>>,
    a3: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Sidecar {
    k: usize,
    p: usize,
    q: usize,
    omega: f64,
    m: usize,
    n_four: usize,
    stride: usize,
    tail_ratio_cheb: f64,
    tail_ratio_four: f64,
    points: Vec<SidecarPoint>,
}

fn grid_rows(g: &periodic::FourierCheb) -> Vec<Vec<f64>> {
    (0..g.n_cheb())
        .map(|n| (0..g.n_four()).map(|k| g.get(n, k)).collect())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_periodic(
    k: usize,
    p: usize,
    q: usize,
    m: usize,
    n_four: usize,
    b: f64,
    ds: f64,
    tol: f64,
    steps: usize,
    lambda_min: f64,
    stride: usize,
    out: &Path,
) -> Result<()> {
    check_common(m, tol)?;
    if n_four < 2 {
        bail!("time truncation K = {n_four} must be at least 2");
    }
    let eig = eigen::continue_branch(k, 65, 0.005, 0.34, tol)?;
    let run = periodic::BranchRun {
        k,
        p,
        q,
        b,
        m,
        kk: n_four,
        max_steps: steps,
        lambda_window: (lambda_min, 0.36),
    };
    let settings = Settings { ds, tol, ds_max: 1.5e-2, exact_jacobian: false, ..Settings::default() };
    let branch = periodic::run_branch(&run, &eig, &settings, tol)?;
    let omega = core::f64::consts::PI * p as f64 / (2.0 * q as f64);

    let mut csv = String::from("lambda,omega,p,q,sup_norm,u_center\n");
    let mut points = Vec::new();
    let mut worst_tail = (0.0f64, 0.0f64);
    for (i, pt) in branch.points.iter().enumerate() {
        let pp = periodic::unpack(pt.param, omega, &pt.unknowns, m, n_four);
        let sup = pp.sup_norm(48, 24);
        let u00 = pp.eval_u(0.0, 0.0)?;
        writeln!(csv, "{},{},{},{},{},{}", pt.param, omega, p, q, sup, u00)?;
        let tr = pp.tail_ratio();
        worst_tail = (worst_tail.0.max(tr.0), worst_tail.1.max(tr.1));
        if i % stride.max(1) == 0 || i + 1 == branch.points.len() {
            points.push(SidecarPoint {
                index: i,
                lambda: pt.param,
                delta: pp.delta.clone(),
                a1: grid_rows(&pp.a[0]),
                a2: grid_rows(&pp.a[1]),
                a3: grid_rows(&pp.a[2]),
            });
        }
    }
    let stem = format!("branch_k{k}_q{q}_p{p}");
    let csv_path = write_file(out, &format!("{stem}.csv"), &csv)?;
    let sidecar = Sidecar {
        k,
        p,
        q,
        omega,
        m,
        n_four,
        stride,
        tail_ratio_cheb: worst_tail.0,
        tail_ratio_four: worst_tail.1,
        points,
    };
    let json = serde_json::to_string_pretty(&sidecar)?;
    let json_path = write_file(out, &format!("{stem}.json"), &json)?;
    println!(
        "periodic branch k = {k}, p = {p}, q = {q}: {} points, lambda {:.6} .. {:.6}",
        branch.points.len(),
        branch.points.first().map(|x| x.param).unwrap_or(f64::NAN),
        branch.points.last().map(|x| x.param).unwrap_or(f64::NAN),
    );
    println!("  worst tail ratios (cheb, cos): {:.2e}, {:.2e}", worst_tail.0, worst_tail.1);
    println!("  -> {}", csv_path.display());
    println!("  -> {}", json_path.display());
    Ok(())
}

fn run_validate(m: usize, nu: f64, tol: f64, r_star: f64, out: &Path) -> Result<()> {
    check_common(m, tol)?;
    if nu < 1.0 {
        bail!("geometric rate nu = {nu} must be at least 1");
    }
    let v = validate::validate_saddle_node(m, nu, tol, r_star)?;
    let json = serde_json::to_string_pretty(&v.certificate)?;
    let path = write_file(out, "certificate.json", &json)?;
    let c = &v.certificate;
    println!("saddle-node enclosure verified (m = {m}, nu = {nu}, kernel scale = {})", v.kernel_scale);
    println!("  Y0 <= {:.6e}   Z0 <= {:.6e}", c.y0[1], c.z0[1]);
    println!("  Z1 <= {:.6}   Z2 <= {:.6e}", c.z1[1], c.z2[1]);
    println!("  radius r0 = {:.6e} (r* = {:.1e})", c.r0, c.r_star);
    println!("  lambda* in [{:.15}, {:.15}]", c.lambda_star[0], c.lambda_star[1]);
    println!("  u(0)    in [{:.15}, {:.15}]", c.u_center[0], c.u_center[1]);
    println!("  -> {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Steady { m, ds, tol, steps, out } => run_steady(m, ds, tol, steps, &out),
        Command::Eigen { k, m, dlambda, lambda_max, tol, out } => {
            run_eigen(k, m, dlambda, lambda_max, tol, &out)
        }
        Command::Periodic { k, p, q, m, n_four, b, ds, tol, steps, lambda_min, stride, out } => {
            run_periodic(k, p, q, m, n_four, b, ds, tol, steps, lambda_min, stride, &out)
        }
        Command::Validate { m, nu, tol, r_star, out } => run_validate(m, nu, tol, r_star, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Machine-readable failure report on stderr.
            let report = serde_json::json!({ "error": format!("{e:#}") });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
