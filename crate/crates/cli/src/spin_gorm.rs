//! Spin coupled to a random-matrix bath: Redfield rates, the critical
//! coupling, exact shell-averaged dynamics, and the exact-vs-Redfield
//! comparison.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use overdamp::gorm::{
    self, CriticalCoupling, GormModel, GormRates, MicrocanonicalWindow,
};
use overdamp::io::{trajectory_rows, GormRateRecord};
use overdamp::spin::{self, BlochVector, SpinModel};

use crate::support::{emit_csv, emit_json, provenance, time_grid, CliError, Settings};

const DEFAULT_N: usize = 1500;
const DEFAULT_DELTA_EPS: f64 = 0.025;
const DEFAULT_SEED: u64 = 11;
const DEFAULT_ETA_MAX: f64 = 1.0;

#[derive(Subcommand)]
pub enum SpinGormCmd {
    /// Redfield rates and the critical coupling.
    Rates(RatesArgs),
    /// Coupling where the shifted squared frequency crosses zero.
    EtaC(EtaCArgs),
    /// Exact shell-averaged trajectory of one sampled realization.
    Evolve(EvolveArgs),
    /// Exact and Redfield trajectories plus a deviation summary.
    Compare(EvolveArgs),
}

#[derive(Args)]
pub struct RatesArgs {
    /// Total Hilbert-space dimension (spin times bath).
    #[arg(long)]
    n: Option<usize>,
    /// Coupling strength.
    #[arg(long)]
    eta: Option<f64>,
    /// Bare spin frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Microcanonical shell center.
    #[arg(long)]
    eps: Option<f64>,
    /// Microcanonical shell width.
    #[arg(long)]
    delta_eps: Option<f64>,
    /// Sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Upper end of the critical-coupling scan.
    #[arg(long)]
    eta_max: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EtaCArgs {
    /// Bare spin frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Microcanonical shell center.
    #[arg(long)]
    eps: Option<f64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Upper end of the critical-coupling scan.
    #[arg(long)]
    eta_max: Option<f64>,
    /// Output file; bare value on stdout when omitted.
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
    /// Time-grid end point; three relaxation times when omitted.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// Output directory for the compare subcommand.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct EtaCOut {
    eta_c: Option<f64>,
}

struct Resolved {
    n: usize,
    eta: f64,
    omega0: f64,
    eps: f64,
    delta_eps: f64,
    seed: u64,
    hbar: f64,
    eta_max: f64,
}

fn resolve(args: &RatesArgs, settings: &Settings) -> Result<Resolved, CliError> {
    Ok(Resolved {
        n: settings.usize(args.n, "n", DEFAULT_N)?,
        eta: settings.require_f64(args.eta, "eta")?,
        omega0: settings.require_f64(args.omega0, "omega0")?,
        eps: settings.f64(args.eps, "eps", 0.0)?,
        delta_eps: settings.f64(args.delta_eps, "delta-eps", DEFAULT_DELTA_EPS)?,
        seed: settings.u64(args.seed, "seed", DEFAULT_SEED)?,
        hbar: settings.f64(args.hbar, "hbar", 1.0)?,
        eta_max: settings.f64(args.eta_max, "eta-max", DEFAULT_ETA_MAX)?,
    })
}

fn critical_opt(
    omega0: f64,
    hbar: f64,
    eps: f64,
    eta_max: f64,
) -> Result<Option<f64>, CliError> {
    Ok(match gorm::eta_critical(omega0, hbar, eps, eta_max)? {
        CriticalCoupling::Transition(v) => Some(v),
        CriticalCoupling::NoTransition => None,
    })
}

pub fn run(cmd: SpinGormCmd, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    match cmd {
        SpinGormCmd::Rates(args) => {
            let p = resolve(&args, settings)?;
            let model = GormModel::new(p.n, p.eta, p.omega0, p.hbar)?;
            let rates = gorm::gorm_rates(&model, p.eps)?;
            let record = GormRateRecord {
                n: p.n,
                eta: p.eta,
                eps: p.eps,
                delta_eps: p.delta_eps,
                seed: p.seed,
                gamma: rates.gamma,
                omega2: rates.omega2,
                eta_c: critical_opt(p.omega0, p.hbar, p.eps, p.eta_max)?,
            };
            emit_json(settings.path(args.out, "out")?.as_deref(), &record)
        }
        SpinGormCmd::EtaC(args) => {
            let omega0 = settings.require_f64(args.omega0, "omega0")?;
            let eps = settings.f64(args.eps, "eps", 0.0)?;
            let hbar = settings.f64(args.hbar, "hbar", 1.0)?;
            let eta_max = settings.f64(args.eta_max, "eta-max", DEFAULT_ETA_MAX)?;
            let eta_c = critical_opt(omega0, hbar, eps, eta_max)?;
            match settings.path(args.out, "out")? {
                Some(path) => emit_json(Some(&path), &EtaCOut { eta_c }),
                None => {
                    match eta_c {
                        Some(v) => println!("{v}"),
                        None => println!("none"),
                    }
                    Ok(())
                }
            }
        }
        SpinGormCmd::Evolve(args) => run_evolve(args, settings, stamp),
        SpinGormCmd::Compare(args) => run_compare(args, settings, stamp),
    }
}

struct Prepared {
    p: Resolved,
    b0: BlochVector,
    times: Vec<f64>,
    model: GormModel,
    window: MicrocanonicalWindow,
    rates: GormRates,
    points: usize,
}

fn prepare(args: &EvolveArgs, settings: &Settings) -> Result<Prepared, CliError> {
    let p = resolve(&args.rates, settings)?;
    let b0 = BlochVector {
        x: settings.f64(args.x0, "x0", 8.0f64.sqrt() / 3.0)?,
        y: settings.f64(args.y0, "y0", 0.0)?,
        z: settings.f64(args.z0, "z0", 1.0 / 3.0)?,
    };
    let model = GormModel::new(p.n, p.eta, p.omega0, p.hbar)?;
    let window = MicrocanonicalWindow::new(p.eps, p.delta_eps)?;
    let rates = gorm::gorm_rates(&model, p.eps)?;
    let t_max = match settings.f64_opt(args.t_max, "t-max")? {
        Some(v) => v,
        None if rates.gamma > 0.0 => 3.0 / rates.gamma,
        None => {
            return Err(CliError::usage(
                "relaxation rate is zero; pass --t-max explicitly",
            ))
        }
    };
    let points = settings.usize(args.points, "points", 241)?;
    let times = time_grid(t_max, points)?;
    Ok(Prepared {
        p,
        b0,
        times,
        model,
        window,
        rates,
        points,
    })
}

fn parameters_json(prep: &Prepared) -> serde_json::Value {
    serde_json::json!({
        "N": prep.p.n, "eta": prep.p.eta, "omega0": prep.p.omega0,
        "eps": prep.p.eps, "delta_eps": prep.p.delta_eps, "hbar": prep.p.hbar,
        "x0": prep.b0.x, "y0": prep.b0.y, "z0": prep.b0.z,
        "t_max": prep.times.last().copied().unwrap_or(0.0),
        "points": prep.points,
    })
}

fn run_evolve(args: EvolveArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let out = settings.path(args.rates.out.clone(), "out")?;
    let prep = prepare(&args, settings)?;
    let sample = gorm::sample_goe(&prep.model, prep.p.seed);
    let states =
        gorm::exact_evolve(&prep.model, &sample, &prep.window, prep.b0, &prep.times)?;
    let rows = trajectory_rows(&prep.times, &states)?;
    let header = provenance(
        "spin-gorm evolve",
        parameters_json(&prep),
        Some(prep.p.seed),
        stamp,
    );
    emit_csv(out.as_deref(), &header, &rows)
}

fn run_compare(args: EvolveArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let out_dir = settings
        .path(args.out_dir.clone(), "out-dir")?
        .unwrap_or_else(|| PathBuf::from("."));
    let prep = prepare(&args, settings)?;
    let sample = gorm::sample_goe(&prep.model, prep.p.seed);
    let exact =
        gorm::exact_evolve(&prep.model, &sample, &prep.window, prep.b0, &prep.times)?;
    let spin = SpinModel::new(prep.p.omega0, prep.p.hbar)?;
    let redfield = spin::evolve(&prep.rates.bloch_rates(), &spin, prep.b0, &prep.times)?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
    let params = parameters_json(&prep);
    for (name, states) in [("exact", &exact), ("redfield", &redfield)] {
        let rows = trajectory_rows(&prep.times, states)?;
        let header = provenance(
            &format!("spin-gorm compare ({name})"),
            params.clone(),
            Some(prep.p.seed),
            stamp,
        );
        emit_csv(Some(&out_dir.join(format!("{name}.csv"))), &header, &rows)?;
    }

    let report = gorm::compare_exact_redfield(&exact, &redfield)?;
    emit_json(None, &report)
}
