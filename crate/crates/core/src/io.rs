//! CSV and JSON emission plus the matching readers, so every file this
//! crate writes can be parsed back by its own tooling.
//!
//! CSV files may carry a single `#`-prefixed comment line ahead of the
//! header; callers put a JSON record of the run parameters there.
//! Numbers serialize in the shortest decimal form that round-trips, so
//! reading a file back reproduces the written values bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spin::{BlochVector, DampingRegime};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    File(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("time grid has {times} entries but the trajectory has {states}")]
    LengthMismatch { times: usize, states: usize },
}

/// One Bloch-trajectory sample; serializes under the header `t,x,y,z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Pairs a time grid with Bloch states into serializable rows.
pub fn trajectory_rows(
    times: &[f64],
    states: &[BlochVector],
) -> Result<Vec<TrajectoryRow>, IoError> {
    if times.len() != states.len() {
        return Err(IoError::LengthMismatch {
            times: times.len(),
            states: states.len(),
        });
    }
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, b)| TrajectoryRow {
            t,
            x: b.x,
            y: b.y,
            z: b.z,
        })
        .collect())
}

/// One relaxation eigenvalue of a ring sector; serializes under the
/// header `n,q,re,im,is_diffusive`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub q: f64,
    pub re: f64,
    pub im: f64,
    pub is_diffusive: bool,
}

/// One oscillator response sample; serializes under the header
/// `t,A,Adot,q_mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub t: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "Adot")]
    pub adot: f64,
    pub q_mean: f64,
}

/// Rate record for the oscillator-bath spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinRateRecord {
    pub omega0: f64,
    pub kappa: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega2: f64,
    pub z_inf: Option<f64>,
    pub regime: DampingRegime,
}

/// Rate record for the random-matrix bath. `eta_c` is null when no
/// transition exists at or below the scanned coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GormRateRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub eta: f64,
    pub eps: f64,
    pub delta_eps: f64,
    pub seed: u64,
    pub gamma: f64,
    pub omega2: f64,
    pub eta_c: Option<f64>,
}

/// Rate record for the damped oscillator. `kappa_c` is null when the
/// complex pair never collides at couplings up to the bath rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QbmRateRecord {
    pub omega0: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega2: f64,
    pub lambda: f64,
    pub regime: DampingRegime,
    pub kappa_c: Option<f64>,
}

/// Writes rows as CSV with a header row; `comment`, when given, lands
/// as a single `#`-prefixed line ahead of the header.
pub fn write_csv<R: Serialize, P: AsRef<Path>>(
    path: P,
    comment: Option<&str>,
    rows: &[R],
) -> Result<(), IoError> {
    let mut file = BufWriter::new(File::create(path)?);
    if let Some(comment) = comment {
        writeln!(file, "# {comment}")?;
    }
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads CSV rows written by [`write_csv`], skipping comment lines.
pub fn read_csv<R: DeserializeOwned, P: AsRef<Path>>(path: P) -> Result<Vec<R>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path.as_ref())?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// Writes a value as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize, P: AsRef<Path>>(path: P, value: &T) -> Result<(), IoError> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(())
}

/// Reads a JSON value written by [`write_json`].
pub fn read_json<T: DeserializeOwned, P: AsRef<Path>>(path: P) -> Result<T, IoError> {
    let file = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(file)?)
}
