//! Spin coupled to a thermal oscillator bath: quadrature rates, Bloch
//! trajectories, and high-temperature coupling sweeps.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use overdamp::bath::{correlator_ft_fn, BathSpec, CouplingUnit, ThermalState};
use overdamp::io::{trajectory_rows, SpinRateRecord};
use overdamp::spin::{self, BlochVector, DampingRegime, SpinModel};
use overdamp::tol;

use crate::support::{emit_csv, emit_json, provenance, sweep_grid, time_grid, CliError, Settings};

#[derive(Subcommand)]
pub enum SpinBosonCmd {
    /// Markovian rates from the bath correlator transform.
    Rates(RatesArgs),
    /// Closed-form Bloch trajectory under the Markovian rates.
    Evolve(EvolveArgs),
    /// High-temperature rates on a coupling grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct RatesArgs {
    /// Bare spin frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Coupling strength, action units.
    #[arg(long)]
    kappa: Option<f64>,
    /// Bath cutoff rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    rates: RatesArgs,
    /// Initial Bloch x component.
    #[arg(long)]
    x0: Option<f64>,
    /// Initial Bloch y component.
    #[arg(long)]
    y0: Option<f64>,
    /// Initial Bloch z component.
    #[arg(long)]
    z0: Option<f64>,
    /// Time-grid end point.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Bare spin frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Bath cutoff rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// First coupling of the sweep.
    #[arg(long)]
    kappa_min: Option<f64>,
    /// Last coupling of the sweep.
    #[arg(long)]
    kappa_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    points: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepRow {
    kappa: f64,
    gamma: f64,
    omega2: f64,
    z_inf: Option<f64>,
    regime: DampingRegime,
}

struct Resolved {
    omega0: f64,
    kappa: f64,
    alpha: f64,
    beta: f64,
    hbar: f64,
}

fn resolve(args: &RatesArgs, settings: &Settings) -> Result<Resolved, CliError> {
    Ok(Resolved {
        omega0: settings.require_f64(args.omega0, "omega0")?,
        kappa: settings.require_f64(args.kappa, "kappa")?,
        alpha: settings.require_f64(args.alpha, "alpha")?,
        beta: settings.require_f64(args.beta, "beta")?,
        hbar: settings.f64(args.hbar, "hbar", 1.0)?,
    })
}

fn rate_record(p: &Resolved) -> Result<SpinRateRecord, CliError> {
    let spin = SpinModel::new(p.omega0, p.hbar)?;
    let spec = BathSpec::new(p.kappa, p.alpha, p.hbar, CouplingUnit::Action)?;
    let temp = ThermalState::finite(p.beta)?;
    let rates = spin::markov_rates(&spin, correlator_ft_fn(&spec, &temp))?;
    Ok(SpinRateRecord {
        omega0: p.omega0,
        kappa: p.kappa,
        beta: p.beta,
        gamma: rates.gamma,
        omega2: rates.omega2,
        z_inf: rates.z_inf,
        regime: spin::classify(&rates, tol::CRITICAL_BAND),
    })
}

pub fn run(cmd: SpinBosonCmd, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    match cmd {
        SpinBosonCmd::Rates(args) => {
            let p = resolve(&args, settings)?;
            let record = rate_record(&p)?;
            emit_json(settings.path(args.out, "out")?.as_deref(), &record)
        }
        SpinBosonCmd::Evolve(args) => run_evolve(args, settings, stamp),
        SpinBosonCmd::Sweep(args) => run_sweep(args, settings, stamp),
    }
}

fn run_evolve(args: EvolveArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let p = resolve(&args.rates, settings)?;
    let b0 = BlochVector {
        x: settings.f64(args.x0, "x0", 1.0)?,
        y: settings.f64(args.y0, "y0", 0.0)?,
        z: settings.f64(args.z0, "z0", 0.0)?,
    };
    let t_max = settings.require_f64(args.t_max, "t-max")?;
    let points = settings.usize(args.points, "points", 201)?;
    let times = time_grid(t_max, points)?;

    let spin = SpinModel::new(p.omega0, p.hbar)?;
    let spec = BathSpec::new(p.kappa, p.alpha, p.hbar, CouplingUnit::Action)?;
    let temp = ThermalState::finite(p.beta)?;
    let rates = spin::markov_rates(&spin, correlator_ft_fn(&spec, &temp))?;
    let states = spin::evolve(&rates, &spin, b0, &times)?;
    let rows = trajectory_rows(&times, &states)?;

    let header = provenance(
        "spin-boson evolve",
        serde_json::json!({
            "omega0": p.omega0, "kappa": p.kappa, "alpha": p.alpha,
            "beta": p.beta, "hbar": p.hbar,
            "x0": b0.x, "y0": b0.y, "z0": b0.z,
            "t_max": t_max, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(
        settings.path(args.rates.out, "out")?.as_deref(),
        &header,
        &rows,
    )
}

fn run_sweep(args: SweepArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let omega0 = settings.require_f64(args.omega0, "omega0")?;
    let alpha = settings.require_f64(args.alpha, "alpha")?;
    let beta = settings.require_f64(args.beta, "beta")?;
    let hbar = settings.f64(args.hbar, "hbar", 1.0)?;
    let lo = settings.require_f64(args.kappa_min, "kappa-min")?;
    let hi = settings.require_f64(args.kappa_max, "kappa-max")?;
    let points = settings.usize(args.points, "points", 50)?;

    let spin = SpinModel::new(omega0, hbar)?;
    let temp = ThermalState::finite(beta)?;
    let grid = sweep_grid(lo, hi, points)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &kappa in &grid {
        let spec = BathSpec::new(kappa, alpha, hbar, CouplingUnit::Action)?;
        let rates = spin::spin_boson_high_t(&spin, &spec, &temp)?.rates;
        rows.push(SweepRow {
            kappa,
            gamma: rates.gamma,
            omega2: rates.omega2,
            z_inf: rates.z_inf,
            regime: spin::classify(&rates, tol::CRITICAL_BAND),
        });
    }

    let header = provenance(
        "spin-boson sweep",
        serde_json::json!({
            "omega0": omega0, "alpha": alpha, "beta": beta, "hbar": hbar,
            "kappa_min": lo, "kappa_max": hi, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(settings.path(args.out, "out")?.as_deref(), &header, &rows)
}
