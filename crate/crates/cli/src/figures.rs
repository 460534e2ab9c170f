//! Figure datasets: the weak-coupling overdamping condition, the slow
//! transverse modes with their cusp at the transition, and the exact vs
//! Redfield trajectories across it.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::Serialize;

use overdamp::gorm::{self, GormModel, MicrocanonicalWindow};
use overdamp::io::trajectory_rows;
use overdamp::spin::{self, BlochVector, SpinModel};

use crate::support::{emit_csv, provenance, time_grid, CliError, Settings};

const FIG_ETA: f64 = 0.2;
const FIG_OMEGA0: f64 = 0.01;
const FIG2_COUPLINGS: [f64; 3] = [0.08, 0.14, 0.20];
const FIG2_SEED: u64 = 11;
const FIG2_N: usize = 1500;

#[derive(Subcommand)]
pub enum FiguresCmd {
    /// Squared damping rate against squared total frequency across ω₀.
    Fig1(OutDirArgs),
    /// Slow transverse modes across the coupling, with the cusp.
    Fig1b(OutDirArgs),
    /// Exact and Redfield trajectories across the transition.
    Fig2(Fig2Args),
}

#[derive(Args)]
pub struct OutDirArgs {
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
pub struct Fig2Args {
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Total Hilbert-space dimension; 3000 reproduces the source scale.
    #[arg(long)]
    n: Option<usize>,
    /// Sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of time-grid points per trajectory.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Serialize)]
struct Fig1Row {
    omega0: f64,
    gamma_sq: f64,
    omega2_plus_gamma_sq: f64,
}

#[derive(Serialize)]
struct Fig1bRow {
    eta: f64,
    abs_re_s3: f64,
    abs_re_s4: f64,
}

fn out_dir(flag: Option<PathBuf>, settings: &Settings) -> Result<PathBuf, CliError> {
    let dir = settings
        .path(flag, "out-dir")?
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn run(cmd: FiguresCmd, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    match cmd {
        FiguresCmd::Fig1(args) => run_fig1(args, settings, stamp),
        FiguresCmd::Fig1b(args) => run_fig1b(args, settings, stamp),
        FiguresCmd::Fig2(args) => run_fig2(args, settings, stamp),
    }
}

/// Γ² stays finite as ω₀ → 0 while Ω² + Γ² tracks ω₀² down; the two
/// curves cross, so overdamping sets in at fixed weak coupling.
fn run_fig1(args: OutDirArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let dir = out_dir(args.out_dir, settings)?;
    let points = settings.usize(args.points, "points", 121)?.max(2);

    let (lg_lo, lg_hi) = (-3.0f64, 0.4f64.log10());
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let lg = lg_lo + (lg_hi - lg_lo) * i as f64 / (points - 1) as f64;
        let omega0 = 10.0f64.powf(lg);
        let model = GormModel::new(4, FIG_ETA, omega0, 1.0)?;
        let rates = gorm::gorm_rates(&model, 0.0)?;
        rows.push(Fig1Row {
            omega0,
            gamma_sq: rates.gamma * rates.gamma,
            omega2_plus_gamma_sq: rates.omega2 + rates.gamma * rates.gamma,
        });
    }

    let header = provenance(
        "figures fig1",
        serde_json::json!({
            "eta": FIG_ETA, "eps": 0.0, "hbar": 1.0, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(Some(&dir.join("fig1.csv")), &header, &rows)
}

/// |Re s₃| and |Re s₄| against the coupling at ω₀ = 0.01; the slow mode
/// has a cusp where the transverse pair collides.
fn run_fig1b(args: OutDirArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let dir = out_dir(args.out_dir, settings)?;
    let points = settings.usize(args.points, "points", 141)?.max(2);

    let (lo, hi) = (0.02f64, 0.30f64);
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let eta = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let model = GormModel::new(4, eta, FIG_OMEGA0, 1.0)?;
        let rates = gorm::gorm_rates(&model, 0.0)?;
        let modes = spin::modes(&rates.bloch_rates());
        rows.push(Fig1bRow {
            eta,
            abs_re_s3: modes.s3.re.abs(),
            abs_re_s4: modes.s4.re.abs(),
        });
    }

    let header = provenance(
        "figures fig1b",
        serde_json::json!({
            "omega0": FIG_OMEGA0, "eps": 0.0, "hbar": 1.0, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(Some(&dir.join("fig1b.csv")), &header, &rows)
}

/// Exact shell-averaged and Redfield trajectories for couplings below,
/// at, and above the transition, three relaxation times each.
fn run_fig2(args: Fig2Args, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let dir = out_dir(args.out_dir, settings)?;
    let n = settings.usize(args.n, "n", FIG2_N)?;
    let seed = settings.u64(args.seed, "seed", FIG2_SEED)?;
    let points = settings.usize(args.points, "points", 241)?;

    let window = MicrocanonicalWindow::new(0.0, 0.025)?;
    let b0 = BlochVector {
        x: 8.0f64.sqrt() / 3.0,
        y: 0.0,
        z: 1.0 / 3.0,
    };
    let spin_model = SpinModel::new(FIG_OMEGA0, 1.0)?;

    for eta in FIG2_COUPLINGS {
        let model = GormModel::new(n, eta, FIG_OMEGA0, 1.0)?;
        let rates = gorm::gorm_rates(&model, 0.0)?;
        let times = time_grid(3.0 / rates.gamma, points)?;
        let sample = gorm::sample_goe(&model, seed);
        let exact = gorm::exact_evolve(&model, &sample, &window, b0, &times)?;
        let redfield = spin::evolve(&rates.bloch_rates(), &spin_model, b0, &times)?;

        let params = serde_json::json!({
            "N": n, "eta": eta, "omega0": FIG_OMEGA0, "eps": 0.0,
            "delta_eps": 0.025, "hbar": 1.0,
            "x0": b0.x, "y0": b0.y, "z0": b0.z,
            "t_max": times.last().copied().unwrap_or(0.0), "points": points,
        });
        for (kind, states) in [("exact", &exact), ("redfield", &redfield)] {
            let rows = trajectory_rows(&times, states)?;
            let header = provenance(
                &format!("figures fig2 ({kind}, eta = {eta})"),
                params.clone(),
                Some(seed),
                stamp,
            );
            let path: &Path = &dir.join(format!("fig2_eta_{eta:.2}_{kind}.csv"));
            emit_csv(Some(path), &header, &rows)?;
        }
    }
    Ok(())
}
