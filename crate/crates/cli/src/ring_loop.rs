//! Dephasing ring: sector relaxation spectra, the closed-form diffusive
//! branch, and dephasing-strength sweeps.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use overdamp::io::SpectrumRow;
use overdamp::numerics::GENERAL_EIG_MAX_DIM;
use overdamp::ring::{self, DephasingBath, LoopModel};

use crate::support::{emit_csv, provenance, sweep_grid, CliError, Settings};

#[derive(Subcommand)]
pub enum LoopCmd {
    /// Relaxation spectrum of every Bloch sector.
    Spectrum(SpectrumArgs),
    /// Closed-form diffusive branch across sectors.
    Diffusive(SpectrumArgs),
    /// Slowest sector mode on a dephasing-strength grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Number of ring sites.
    #[arg(long)]
    sites: Option<usize>,
    /// Hopping amplitude.
    #[arg(long)]
    hop: Option<f64>,
    /// On-site energy.
    #[arg(long)]
    e0: Option<f64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Dephasing strength.
    #[arg(long)]
    q_strength: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Number of ring sites.
    #[arg(long)]
    sites: Option<usize>,
    /// Hopping amplitude.
    #[arg(long)]
    hop: Option<f64>,
    /// On-site energy.
    #[arg(long)]
    e0: Option<f64>,
    /// Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Bloch sector to follow.
    #[arg(long)]
    sector: Option<usize>,
    /// First dephasing strength.
    #[arg(long)]
    q_min: Option<f64>,
    /// Last dephasing strength.
    #[arg(long)]
    q_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    points: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepRow {
    q_strength: f64,
    n: usize,
    q: f64,
    re: f64,
    im: f64,
    is_diffusive: bool,
}

struct ResolvedModel {
    sites: usize,
    hop: f64,
    e0: f64,
    hbar: f64,
}

fn resolve_model(
    sites: Option<usize>,
    hop: Option<f64>,
    e0: Option<f64>,
    hbar: Option<f64>,
    settings: &Settings,
) -> Result<ResolvedModel, CliError> {
    Ok(ResolvedModel {
        sites: settings.require_usize(sites, "sites")?,
        hop: settings.f64(hop, "hop", 1.0)?,
        e0: settings.f64(e0, "e0", 0.0)?,
        hbar: settings.f64(hbar, "hbar", 1.0)?,
    })
}

fn check_exact_size(sites: usize) -> Result<(), CliError> {
    if sites > GENERAL_EIG_MAX_DIM {
        return Err(CliError::Usage(format!(
            "exact sector spectra are limited to {GENERAL_EIG_MAX_DIM} sites, got {sites}; \
             the diffusive subcommand covers larger rings in closed form"
        )));
    }
    Ok(())
}

pub fn run(cmd: LoopCmd, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    match cmd {
        LoopCmd::Spectrum(args) => run_spectrum(args, settings, stamp),
        LoopCmd::Diffusive(args) => run_diffusive(args, settings, stamp),
        LoopCmd::Sweep(args) => run_sweep(args, settings, stamp),
    }
}

fn run_spectrum(args: SpectrumArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let m = resolve_model(args.sites, args.hop, args.e0, args.hbar, settings)?;
    let q_strength = settings.require_f64(args.q_strength, "q-strength")?;
    check_exact_size(m.sites)?;
    let model = LoopModel::new(m.sites, m.hop, m.e0, m.hbar)?;
    let bath = DephasingBath::new(q_strength)?;

    let mut rows = Vec::new();
    for (i, sector) in ring::sector_spectra(&model, &bath)?.iter().enumerate() {
        let n = i + 1;
        for (j, z) in sector.eigenvalues.iter().enumerate() {
            rows.push(SpectrumRow {
                n,
                q: sector.bloch_q,
                re: z.re,
                im: z.im,
                is_diffusive: sector.diffusive_index == Some(j),
            });
        }
    }

    let header = provenance(
        "loop spectrum",
        serde_json::json!({
            "sites": m.sites, "hop": m.hop, "e0": m.e0, "hbar": m.hbar,
            "q_strength": q_strength,
        }),
        None,
        stamp,
    );
    emit_csv(settings.path(args.out, "out")?.as_deref(), &header, &rows)
}

fn run_diffusive(args: SpectrumArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let m = resolve_model(args.sites, args.hop, args.e0, args.hbar, settings)?;
    let q_strength = settings.require_f64(args.q_strength, "q-strength")?;
    let model = LoopModel::new(m.sites, m.hop, m.e0, m.hbar)?;
    let bath = DephasingBath::new(q_strength)?;

    let mut rows = Vec::new();
    for n in 1..=m.sites {
        let q = model.bloch_q(n);
        match ring::diffusive_eigenvalue(&model, &bath, q) {
            Ok(re) => rows.push(SpectrumRow {
                n,
                q,
                re,
                im: 0.0,
                is_diffusive: true,
            }),
            Err(ring::RingError::BranchAbsent { .. }) => {}
            Err(other) => return Err(other.into()),
        }
    }

    let header = provenance(
        "loop diffusive",
        serde_json::json!({
            "sites": m.sites, "hop": m.hop, "e0": m.e0, "hbar": m.hbar,
            "q_strength": q_strength,
        }),
        None,
        stamp,
    );
    emit_csv(settings.path(args.out, "out")?.as_deref(), &header, &rows)
}

fn run_sweep(args: SweepArgs, settings: &Settings, stamp: bool) -> Result<(), CliError> {
    let m = resolve_model(args.sites, args.hop, args.e0, args.hbar, settings)?;
    let sector = settings.usize(args.sector, "sector", 1)?;
    let lo = settings.require_f64(args.q_min, "q-min")?;
    let hi = settings.require_f64(args.q_max, "q-max")?;
    let points = settings.usize(args.points, "points", 50)?;
    check_exact_size(m.sites)?;
    let model = LoopModel::new(m.sites, m.hop, m.e0, m.hbar)?;

    let grid = sweep_grid(lo, hi, points)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &q_strength in &grid {
        let bath = DephasingBath::new(q_strength)?;
        let spectrum = ring::sector_spectrum(&model, &bath, sector)?;
        let (idx, slowest) = spectrum
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
            .expect("sector spectra are nonempty");
        rows.push(SweepRow {
            q_strength,
            n: sector,
            q: spectrum.bloch_q,
            re: slowest.re,
            im: slowest.im,
            is_diffusive: spectrum.diffusive_index == Some(idx),
        });
    }

    let header = provenance(
        "loop sweep",
        serde_json::json!({
            "sites": m.sites, "hop": m.hop, "e0": m.e0, "hbar": m.hbar,
            "sector": sector, "q_min": lo, "q_max": hi, "points": points,
        }),
        None,
        stamp,
    );
    emit_csv(settings.path(args.out, "out")?.as_deref(), &header, &rows)
}
