//! Shared command plumbing: exit-code mapping, config-file merging,
//! provenance headers, grid construction, and output emission.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use overdamp::bath::BathError;
use overdamp::gorm::GormError;
use overdamp::io::IoError;
use overdamp::qbm::QbmError;
use overdamp::ring::RingError;
use overdamp::spin::SpinError;

/// Usage problems exit 2, numerical failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<SpinError> for CliError {
    fn from(err: SpinError) -> Self {
        match err {
            SpinError::Numerics(e) => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BathError> for CliError {
    fn from(err: BathError) -> Self {
        match err {
            BathError::Numerics(e) => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GormError> for CliError {
    fn from(err: GormError) -> Self {
        match err {
            GormError::Numerics(e) => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<RingError> for CliError {
    fn from(err: RingError) -> Self {
        match err {
            RingError::Numerics(e) => CliError::Numerical(e.to_string()),
            RingError::SolverFailure => CliError::Numerical(err.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<QbmError> for CliError {
    fn from(err: QbmError) -> Self {
        match err {
            QbmError::Numerics(e) => CliError::Numerical(e.to_string()),
            QbmError::NearTripleRoot { .. } | QbmError::ResidualTooLarge { .. } => {
                CliError::Numerical(err.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(err: IoError) -> Self {
        CliError::Usage(err.to_string())
    }
}

/// Defaults loaded from a JSON config file. Keys mirror the long flag
/// names (either spelling of the separator); explicit flags win.
pub struct Settings {
    values: serde_json::Map<String, Value>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self {
                values: serde_json::Map::new(),
            });
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let parsed: Value = serde_json::from_str(&text).map_err(|e| {
            CliError::Usage(format!("config {} is not valid JSON: {e}", path.display()))
        })?;
        let Value::Object(map) = parsed else {
            return Err(CliError::usage(format!(
                "config {} must hold a JSON object",
                path.display()
            )));
        };
        let values = map
            .into_iter()
            .map(|(k, v)| (k.replace('-', "_"), v))
            .collect();
        Ok(Self { values })
    }

    fn lookup(&self, key: &str) -> Option<&Value> {
        self.values.get(&key.replace('-', "_"))
    }

    pub fn f64_opt(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("config field {key} must be a number"))),
        }
    }

    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(flag, key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, flag: Option<f64>, key: &str) -> Result<f64, CliError> {
        self.f64_opt(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter --{key}")))
    }

    fn integer(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.lookup(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| {
                CliError::Usage(format!("config field {key} must be a nonnegative integer"))
            }),
        }
    }

    pub fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> Result<u64, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.integer(key)?.unwrap_or(default))
    }

    pub fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.integer(key)?.map(|v| v as usize).unwrap_or(default))
    }

    pub fn require_usize(&self, flag: Option<usize>, key: &str) -> Result<usize, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.integer(key)?
            .map(|v| v as usize)
            .ok_or_else(|| CliError::Usage(format!("missing required parameter --{key}")))
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(_) => Err(CliError::Usage(format!(
                "config field {key} must be a string path"
            ))),
        }
    }
}

/// One-line JSON run descriptor placed as the CSV comment header.
/// Key order is the map's sorted order, so reruns are byte-identical
/// whenever the timestamp is suppressed.
pub fn provenance(
    command: &str,
    parameters: Value,
    seed: Option<u64>,
    with_timestamp: bool,
) -> String {
    let mut map = serde_json::Map::new();
    map.insert("tool".into(), Value::from("overdamp"));
    map.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    map.insert("command".into(), Value::from(command));
    map.insert("parameters".into(), parameters);
    if let Some(seed) = seed {
        map.insert("seed".into(), Value::from(seed));
    }
    if with_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        map.insert("timestamp".into(), Value::from(secs));
    }
    Value::Object(map).to_string()
}

/// Uniform grid from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::usage("empty time grid: --points must be at least 1"));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(CliError::usage("--t-max must be nonnegative and finite"));
    }
    Ok(linspace(0.0, t_max, points))
}

/// Uniform parameter grid; a zero-length range gives a single point.
pub fn sweep_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::usage("sweep bounds must be finite"));
    }
    if hi < lo {
        return Err(CliError::Usage(format!(
            "sweep range is not monotone: {lo} > {hi}"
        )));
    }
    if points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    if hi == lo {
        return Ok(vec![lo]);
    }
    Ok(linspace(lo, hi, points.max(2)))
}

fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![a];
    }
    let step = (b - a) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { b } else { a + step * i as f64 })
        .collect()
}

/// Writes rows as CSV behind the provenance comment, to the file when
/// given and to stdout otherwise.
pub fn emit_csv<R: Serialize>(
    out: Option<&Path>,
    header: &str,
    rows: &[R],
) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(overdamp::io::write_csv(path, Some(header), rows)?),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            writeln!(lock, "# {header}")
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
            let mut writer = csv::Writer::from_writer(lock);
            for row in rows {
                writer
                    .serialize(row)
                    .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
            }
            writer
                .flush()
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
            Ok(())
        }
    }
}

/// Writes a value as JSON to the file when given, to stdout otherwise.
pub fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(overdamp::io::write_json(path, value)?),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Usage(format!("cannot serialize output: {e}")))?;
            println!("{text}");
            Ok(())
        }
    }
}
