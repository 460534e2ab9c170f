//! Damped oscillator: exact characteristic rates, response amplitudes,
//! the discretized-bath oracle, and Markovian coupling sweeps.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use overdamp::bath::CouplingUnit;
use overdamp::io::{AmplitudeRow, QbmRateRecord};
use overdamp::qbm::{self, OscillatorMeanState, QbmError, QbmModel};
use overdamp::spin::DampingRegime;
use overdamp::tol;

use crate::support::{emit_csv, emit_json, provenance, sweep_grid, time_grid, CliError, Settings};

const DEFAULT_ORACLE_OSCILLATORS: usize = 2000;
const DEFAULT_CUTOFF_FACTOR: f64 = 20.0;

#[derive(Subcommand)]
pub enum QbmCmd {
    /// Exact characteristic rates and the transition coupling.
    Rates(RatesArgs),
    /// Response amplitude and mean displacement on a time grid.
    Amplitude(AmplitudeArgs),
    /// Discretized-bath mean displacement beside the same amplitude.
    Oracle(OracleArgs),
    /// Markovian-limit rates on a coupling grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct RatesArgs {
    /// Bare oscillator frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Coupling strength, frequency units.
    #[arg(long)]
    kappa: Option<f64>,
    /// Bath decay rate.
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
pub struct AmplitudeArgs {
    #[command(flatten)]
    rates: RatesArgs,
    /// Initial mean position.
    #[arg(long)]
    q0: Option<f64>,
    /// Initial mean momentum.
    #[arg(long)]
    p0: Option<f64>,
    /// Time-grid end point.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
pub struct OracleArgs {
    #[command(flatten)]
    amplitude: AmplitudeArgs,
    /// Number of discretized bath oscillators.
    #[arg(long)]
    n_osc: Option<usize>,
    /// Upper edge of the discretized frequency grid.
    #[arg(long)]
    omega_max: Option<f64>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Bare oscillator frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Bath decay rate.
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
    lambda: f64,
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
        beta: settings.f64(args.beta, "beta", 1.0)?,
        hbar: settings.f64(args.hbar, "hbar", 1.0)?,
    })
}

fn build_model(p: &Resolved) -> Result<QbmModel, CliError> {
    Ok(QbmModel::new(
        p.omega0,
        p.kappa,
        p.alpha,
        p.beta,
        p.hbar,
        CouplingUnit::Frequency,
    )?)
}

fn critical_opt(model: &QbmModel) -> Result<Option<f64>, CliError> {
    match qbm::kappa_critical_exact(model) {
        Ok(v) => Ok(Some(v)),
        Err(QbmError::NoTransition { .. }) => Ok(None),
        Err(other) => Err(other.into()),
    }
}

pub fn run(cmd: QbmCmd, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    match cmd {
        QbmCmd::Rates(args) => {
            let p = resolve(&args, settings)?;
            let model = build_model(&p)?;
            let rates = qbm::exact_rates(&model)?;
            let record = QbmRateRecord {
                omega0: p.omega0,
                kappa: p.kappa,
                alpha: p.alpha,
                beta: p.beta,
                gamma: rates.gamma,
                omega2: rates.omega2,
                lambda: rates.lambda,
                regime: qbm::damping_regime(&rates, tol::CRITICAL_BAND),
                kappa_c: critical_opt(&model)?,
            };
            emit_json(settings.path(args.out, "out")?.as_deref(), &record)
        }
        QbmCmd::Amplitude(args) => run_amplitude(args, settings, stamp),
        QbmCmd::Oracle(args) => run_oracle(args, settings, stamp),
        QbmCmd::Sweep(args) => run_sweep(args, settings, stamp),
    }
}

struct AmplitudePlan {
    p: Resolved,
    init: OscillatorMeanState,
    times: Vec<f64>,
    points: usize,
    rates: qbm::QbmRates,
}

fn prepare_amplitude(args: &AmplitudeArgs, settings: &Settings) -> Result<AmplitudePlan, CliError> {
    let p = resolve(&args.rates, settings)?;
    let init = OscillatorMeanState {
        q_mean: settings.f64(args.q0, "q0", 1.0)?,
        p_mean: settings.f64(args.p0, "p0", 0.0)?,
    };
    let t_max = settings.require_f64(args.t_max, "t-max")?;
    let points = settings.usize(args.points, "points", 201)?;
    let times = time_grid(t_max, points)?;
    let model = build_model(&p)?;
    let rates = qbm::exact_rates(&model)?;
    Ok(AmplitudePlan {
        p,
        init,
        times,
        points,
        rates,
    })
}

fn amplitude_rows(plan: &AmplitudePlan, q_means: &[f64]) -> Result<Vec<AmplitudeRow>, CliError> {
    plan.times
        .iter()
        .zip(q_means)
        .map(|(&t, &q_mean)| {
            let (a, adot) = qbm::amplitude_with_derivative(&plan.rates, t)?;
            Ok(AmplitudeRow {
                t,
                a,
                adot,
                q_mean,
            })
        })
        .collect()
}

fn run_amplitude(args: AmplitudeArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let out = settings.path(args.rates.out.clone(), "out")?;
    let plan = prepare_amplitude(&args, settings)?;
    let q_means = plan
        .times
        .iter()
        .map(|&t| qbm::mean_displacement(&plan.rates, &plan.init, t))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = amplitude_rows(&plan, &q_means)?;
    let header = provenance(
        "qbm amplitude",
        serde_json::json!({
            "omega0": plan.p.omega0, "kappa": plan.p.kappa, "alpha": plan.p.alpha,
            "beta": plan.p.beta, "hbar": plan.p.hbar,
            "q0": plan.init.q_mean, "p0": plan.init.p_mean,
            "t_max": plan.times.last().copied().unwrap_or(0.0), "points": plan.points,
        }),
        None,
        stamp,
    );
    emit_csv(out.as_deref(), &header, &rows)
}

fn run_oracle(args: OracleArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let out = settings.path(args.amplitude.rates.out.clone(), "out")?;
    let plan = prepare_amplitude(&args.amplitude, settings)?;
    let n_osc = settings.usize(args.n_osc, "n-osc", DEFAULT_ORACLE_OSCILLATORS)?;
    let omega_max = settings.f64(
        args.omega_max,
        "omega-max",
        DEFAULT_CUTOFF_FACTOR * plan.p.alpha,
    )?;
    let model = build_model(&plan.p)?;
    let q_means = qbm::finite_bath_oracle(&model, n_osc, omega_max, &plan.init, &plan.times)?;
    let rows = amplitude_rows(&plan, &q_means)?;
    let header = provenance(
        "qbm oracle",
        serde_json::json!({
            "omega0": plan.p.omega0, "kappa": plan.p.kappa, "alpha": plan.p.alpha,
            "beta": plan.p.beta, "hbar": plan.p.hbar,
            "q0": plan.init.q_mean, "p0": plan.init.p_mean,
            "t_max": plan.times.last().copied().unwrap_or(0.0), "points": plan.points,
            "n_osc": n_osc, "omega_max": omega_max,
        }),
        None,
        stamp,
    );
    emit_csv(out.as_deref(), &header, &rows)
}

fn run_sweep(args: SweepArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let omega0 = settings.require_f64(args.omega0, "omega0")?;
    let alpha = settings.require_f64(args.alpha, "alpha")?;
    let beta = settings.f64(args.beta, "beta", 1.0)?;
    let hbar = settings.f64(args.hbar, "hbar", 1.0)?;
    let lo = settings.require_f64(args.kappa_min, "kappa-min")?;
    let hi = settings.require_f64(args.kappa_max, "kappa-max")?;
    let points = settings.usize(args.points, "points", 50)?;

    let grid = sweep_grid(lo, hi, points)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &kappa in &grid {
        let model = QbmModel::new(omega0, kappa, alpha, beta, hbar, CouplingUnit::Frequency)?;
        let rates = qbm::markov_rates(&model);
        rows.push(SweepRow {
            kappa,
            gamma: rates.gamma,
            omega2: rates.omega2,
            lambda: rates.lambda,
            regime: qbm::damping_regime(&rates, tol::CRITICAL_BAND),
        });
    }

    let header = provenance(
        "qbm sweep",
        serde_json::json!({
            "omega0": omega0, "alpha": alpha, "beta": beta, "hbar": hbar,
            "kappa_min": lo, "kappa_max": hi, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(settings.path(args.out, "out")?.as_deref(), &header, &rows)
}
