//! File formats: trajectory and grid CSV, JSON, atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::dynamics::{Sample, Trajectory};
use crate::sweeps::PhaseDiagram;

pub const TRAJECTORY_COLUMNS: &str = "n,t,p0_raw,p1_raw,norm,p0_norm,p1_norm";
pub const GRID_COLUMNS: &str = "omega_t0,gamma_t1,discriminant,phase,kappa";
pub const BOUNDARY_COLUMNS: &str = "omega_t0,gamma_t1";

/// Decimal scientific notation with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Ordered `key = value` pairs written as the `#` header of every file.
#[derive(Debug, Clone, Default)]
pub struct Header {
    pub command: String,
    pub params: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
        }
    }

    /// Floats are recorded with `{:?}`, the shortest form that parses back
    /// to the same bits.
    pub fn float(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), format!("{value:?}")));
        self
    }

    pub fn text(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# fpt {}", crate::cli::VERSION).unwrap();
        writeln!(s, "# command = {}", self.command).unwrap();
        for (k, v) in &self.params {
            writeln!(s, "# {k} = {v}").unwrap();
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::json!({
            "version": crate::cli::VERSION,
            "command": self.command,
            "parameters": params,
        })
    }
}

pub fn trajectory_csv(header: &Header, traj: &Trajectory) -> String {
    let mut s = header.render();
    if let Some(n) = traj.truncated_at {
        writeln!(s, "# truncated_at = {n}").unwrap();
    }
    writeln!(s, "{TRAJECTORY_COLUMNS}").unwrap();
    for x in &traj.samples {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            x.n,
            sig12(x.t),
            sig12(x.p0_raw),
            sig12(x.p1_raw),
            sig12(x.norm),
            sig12(x.p0_norm),
            sig12(x.p1_norm)
        )
        .unwrap();
    }
    s
}

/// Reads back the rows of a trajectory CSV, skipping `#` lines.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<Sample>, String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == TRAJECTORY_COLUMNS => {}
        other => return Err(format!("unexpected column header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(format!("row {i}: expected 7 fields, got {}", fields.len()));
            }
            let f = |k: usize| {
                fields[k]
                    .parse::<f64>()
                    .map_err(|e| format!("row {i} column {k}: {e}"))
            };
            Ok(Sample {
                n: fields[0]
                    .parse()
                    .map_err(|e| format!("row {i} column 0: {e}"))?,
                t: f(1)?,
                p0_raw: f(2)?,
                p1_raw: f(3)?,
                norm: f(4)?,
                p0_norm: f(5)?,
                p1_norm: f(6)?,
            })
        })
        .collect()
}

pub fn trajectory_json(header: &Header, traj: &Trajectory, extra: serde_json::Value) -> String {
    let mut doc = header.to_json();
    doc["samples"] = serde_json::to_value(&traj.samples).unwrap();
    doc["truncated_at"] = serde_json::to_value(traj.truncated_at).unwrap();
    doc["summary"] = extra;
    serde_json::to_string_pretty(&doc).unwrap()
}

pub fn grid_csv(header: &Header, diagram: &PhaseDiagram) -> String {
    let mut s = header.render();
    writeln!(s, "{GRID_COLUMNS}").unwrap();
    for c in &diagram.cells {
        writeln!(
            s,
            "{},{},{},{},{}",
            sig12(c.omega_t0),
            sig12(c.gamma_t1),
            sig12(c.discriminant),
            c.phase,
            sig12(c.kappa)
        )
        .unwrap();
    }
    s
}

pub fn grid_json(header: &Header, diagram: &PhaseDiagram) -> String {
    let mut doc = header.to_json();
    doc["grid"] = serde_json::to_value(diagram).unwrap();
    serde_json::to_string_pretty(&doc).unwrap()
}

pub fn boundary_csv(header: &Header, points: &[(f64, f64)]) -> String {
    let mut s = header.render();
    writeln!(s, "{BOUNDARY_COLUMNS}").unwrap();
    for (a, g) in points {
        writeln!(s, "{},{}", sig12(*a), sig12(*g)).unwrap();
    }
    s
}

/// Writes `contents` to a sibling temp file and renames it into place.
/// Missing parent directories are created.
pub fn atomic_write(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
