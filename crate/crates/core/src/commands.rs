//! Table-producing commands behind the `chsh-decoherence` binary, plus the
//! run manifest and CSV/JSON rendering they share.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::decoherence::{self, SpinBathSpec, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{estimate_volume, ViolationSet, VolumeRecord};
use crate::linalg::Complex;
use crate::optimizer::maximize_violation;
use crate::state::{horodecki_max_violation, make_rho, DecoherenceFactor};

/// Parses `"0.3+0.4i"`, `"-0.2-0.1i"`, `"0.5i"` or a bare real `"0.7"`.
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::ParseComplex(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix('i') else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex::new(re, 0.0)),
            _ => Err(err()),
        };
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| err())?;
    let im: f64 = im.parse().map_err(|_| err())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(err());
    }
    Ok(Complex::new(re, im))
}

/// Parses a decoherence factor and rejects `|r| > 1`.
pub fn parse_factor(text: &str) -> Result<DecoherenceFactor> {
    DecoherenceFactor::new(parse_complex(text)?)
}

/// `steps + 1` real factors evenly spaced on `[0, 1]`.
pub fn real_grid(steps: usize) -> Vec<DecoherenceFactor> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| DecoherenceFactor::real(k as f64 / steps as f64).expect("grid lies in [0, 1]"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Horodecki,
    Optimize,
    Both,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "horodecki" => Ok(Method::Horodecki),
            "optimize" => Ok(Method::Optimize),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    R,
    MaxViolation,
    Volume,
}

impl FromStr for Emit {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "r" => Ok(Emit::R),
            "max_violation" | "max-violation" => Ok(Emit::MaxViolation),
            "volume" => Ok(Emit::Volume),
            other => Err(format!("unknown emit mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|row| &row[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// An array with one object per row.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// Path of the manifest that accompanies the data file `out`.
    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Maximal CHSH value per factor: closed form, numerical search, or both.
pub fn max_violation_table(
    factors: &[DecoherenceFactor],
    method: Method,
    restarts: usize,
    seed: u64,
) -> Result<Table> {
    let mut table = Table::new(vec!["r_re", "r_im", "horodecki", "optimized", "abs_diff"]);
    for r in factors {
        let rho = make_rho(*r);
        let horodecki = matches!(method, Method::Horodecki | Method::Both)
            .then(|| horodecki_max_violation(&rho));
        let optimized = match method {
            Method::Optimize | Method::Both => {
                Some(maximize_violation(&rho, restarts, seed)?.best_value)
            }
            Method::Horodecki => None,
        };
        let diff = horodecki.zip(optimized).map(|(h, o)| (h - o).abs());
        let opt = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Float);
        table.rows.push(vec![
            Cell::Float(r.value().re),
            Cell::Float(r.value().im),
            opt(horodecki),
            opt(optimized),
            opt(diff),
        ]);
    }
    Ok(table)
}

/// Monte Carlo fraction of `set` per factor, with the analytic bound.
pub fn volume_table(
    factors: &[DecoherenceFactor],
    samples: u64,
    seed: u64,
    set: ViolationSet,
) -> Result<Table> {
    let mut table = Table::new(vec![
        "r_re",
        "r_im",
        "set",
        "samples",
        "seed",
        "fraction",
        "ci95",
        "bound_fraction",
        "within_bound",
    ]);
    for r in factors {
        let estimate = estimate_volume(*r, samples, seed, set)?;
        let rec = VolumeRecord::new(*r, set, &estimate);
        table.rows.push(vec![
            Cell::Float(rec.r_re),
            Cell::Float(rec.r_im),
            Cell::Text(rec.set.to_string()),
            Cell::Int(rec.samples),
            Cell::Int(rec.seed),
            Cell::Float(rec.fraction),
            Cell::Float(rec.ci95),
            Cell::Float(rec.bound_fraction),
            Cell::Bool(rec.within_bound()),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub t_max: f64,
    pub steps: usize,
    pub emit: Emit,
    pub samples: u64,
    pub seed: u64,
    pub set: ViolationSet,
}

/// Time series of `r(t)` and the requested derived quantity. With a second
/// bath, the effective factor `r1* r2` of two independent environments is
/// used.
pub fn trajectory_table(
    bath: &SpinBathSpec,
    second_bath: Option<&SpinBathSpec>,
    opts: &TrajectoryOptions,
) -> Result<Table> {
    let times = decoherence::uniform_grid(opts.t_max, opts.steps)?;
    let traj: Trajectory = match second_bath {
        Some(other) => decoherence::two_env_trajectory(bath, other, &times)?,
        None => decoherence::trajectory(bath, &times)?,
    };
    let mut columns = vec!["t", "r_re", "r_im", "r_abs"];
    match opts.emit {
        Emit::R => {}
        Emit::MaxViolation => columns.push("max_violation"),
        Emit::Volume => columns.extend(["fraction", "ci95", "bound_fraction"]),
    }
    let mut table = Table::new(columns);
    for (t, r) in traj.times.iter().zip(&traj.factors) {
        let mut row = vec![
            Cell::Float(*t),
            Cell::Float(r.value().re),
            Cell::Float(r.value().im),
            Cell::Float(r.modulus()),
        ];
        match opts.emit {
            Emit::R => {}
            Emit::MaxViolation => row.push(Cell::Float(horodecki_max_violation(&make_rho(*r)))),
            Emit::Volume => {
                let est = estimate_volume(*r, opts.samples, opts.seed, opts.set)?;
                let rec = VolumeRecord::new(*r, opts.set, &est);
                row.extend([
                    Cell::Float(rec.fraction),
                    Cell::Float(rec.ci95),
                    Cell::Float(rec.bound_fraction),
                ]);
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Human-readable list of factors for manifests.
pub fn factors_json(factors: &[DecoherenceFactor]) -> Value {
    Value::Array(
        factors
            .iter()
            .map(|r| json!([r.value().re, r.value().im]))
            .collect(),
    )
}

/// One line per check, `PASS name` or `FAIL name: detail`.
pub fn render_report(report: &crate::selftest::SelfTestReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::new();
            for check in &report.checks {
                if check.passed {
                    let _ = writeln!(out, "PASS {}", check.name);
                } else {
                    let _ = writeln!(out, "FAIL {}: {}", check.name, check.detail);
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(out, "{} checks, {} failed", report.checks.len(), failed);
            out
        }
    }
}
