//! On-disk formats and the output directory layout.
//!
//! ```text
//! <out>/config.json              resolved config of the last stage run
//! <out>/alpha-<a>/config.json    resolved config the files beside it belong to
//! <out>/alpha-<a>/{transparency,robustness}.{json,csv}
//! <out>/alpha-<a>/boundary_k-<k>.csv
//! <out>/alpha-<a>/front.{json,csv}
//! <out>/selection.json
//! <out>/bundle.json
//! ```
//!
//! Numbers are written as shortest round-trip decimals; sentinels are JSON
//! `null` and empty CSV fields.

use std::fs;
use std::path::{Path, PathBuf};

use admittance_pareto::maps::{ControllerGrid, MapKind, ObjectiveMap};
use admittance_pareto::metrics::BoundaryPoint;
use admittance_pareto::pareto::ParetoPoint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn alpha_dir(out: &Path, alpha: f64) -> PathBuf {
    out.join(format!("alpha-{alpha}"))
}

pub fn map_path(out: &Path, alpha: f64, kind: MapKind, ext: &str) -> PathBuf {
    let name = match kind {
        MapKind::Transparency => "transparency",
        MapKind::Robustness => "robustness",
    };
    alpha_dir(out, alpha).join(format!("{name}.{ext}"))
}

pub fn front_path(out: &Path, alpha: f64, ext: &str) -> PathBuf {
    alpha_dir(out, alpha).join(format!("front.{ext}"))
}

pub fn boundary_path(out: &Path, alpha: f64, k_eq: f64) -> PathBuf {
    alpha_dir(out, alpha).join(format!("boundary_k-{k_eq}.csv"))
}

pub fn selection_path(out: &Path) -> PathBuf {
    out.join("selection.json")
}

pub fn bundle_path(out: &Path) -> PathBuf {
    out.join("bundle.json")
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> CliResult<()> {
    let mut bytes = if pretty { serde_json::to_vec_pretty(value) } else { serde_json::to_vec(value) }
        .map_err(|e| CliError::Compute(format!("serializing {}: {e}", path.display())))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

/// `Ok(None)` when the file does not exist.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<Option<T>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::io(format!("reading {}", path.display()), e)),
    };
    serde_json::from_slice(&bytes)
        .map(Some)
        .map_err(|e| CliError::Compute(format!("malformed {}: {e}", path.display())))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn csv_finish(path: &Path, w: csv::Writer<Vec<u8>>) -> CliResult<()> {
    let bytes = w.into_inner().map_err(|e| CliError::Compute(format!("writing {}: {e}", path.display())))?;
    write_bytes(path, &bytes)
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Compute(format!("writing {}: {e}", path.display()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapGridJson {
    pub alpha: f64,
    #[serde(rename = "m_F")]
    pub m_f: Vec<f64>,
    #[serde(rename = "b_F")]
    pub b_f: Vec<f64>,
}

/// Map export: `values[i][j]` belongs to `m_F[i]`, `b_F[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub grid: MapGridJson,
    pub kind: MapKind,
    pub values: Vec<Vec<Option<f64>>>,
}

impl From<&ObjectiveMap> for MapJson {
    fn from(map: &ObjectiveMap) -> Self {
        Self {
            grid: MapGridJson { alpha: map.grid.alpha, m_f: map.grid.m_f().to_vec(), b_f: map.grid.b_f().to_vec() },
            kind: map.kind,
            values: map.rows().map(<[Option<f64>]>::to_vec).collect(),
        }
    }
}

impl TryFrom<MapJson> for ObjectiveMap {
    type Error = CliError;

    fn try_from(m: MapJson) -> CliResult<Self> {
        let grid = ControllerGrid::new(m.grid.alpha, m.grid.m_f, m.grid.b_f)?;
        if m.values.len() != grid.m_f().len() || m.values.iter().any(|r| r.len() != grid.b_f().len()) {
            return Err(CliError::Compute("map values do not match grid dimensions".into()));
        }
        Ok(ObjectiveMap::new(grid, m.kind, m.values.into_iter().flatten().collect())?)
    }
}

pub fn write_map(out: &Path, map: &ObjectiveMap) -> CliResult<()> {
    let alpha = map.grid.alpha;
    write_json(&map_path(out, alpha, map.kind, "json"), &MapJson::from(map), false)?;

    let path = map_path(out, alpha, map.kind, "csv");
    let mut w = csv_writer();
    w.write_record(["m_F", "b_F", "value"]).map_err(|e| csv_err(&path, e))?;
    let cols = map.grid.b_f().len();
    for (k, v) in map.values().iter().enumerate() {
        let (i, j) = (k / cols, k % cols);
        w.write_record([map.grid.m_f()[i].to_string(), map.grid.b_f()[j].to_string(), opt(*v)])
            .map_err(|e| csv_err(&path, e))?;
    }
    csv_finish(&path, w)
}

pub fn read_map(out: &Path, alpha: f64, kind: MapKind) -> CliResult<Option<ObjectiveMap>> {
    let Some(json) = read_json::<MapJson>(&map_path(out, alpha, kind, "json"))? else {
        return Ok(None);
    };
    if json.kind != kind || json.grid.alpha != alpha {
        return Err(CliError::Compute(format!("{} holds a different map", map_path(out, alpha, kind, "json").display())));
    }
    json.try_into().map(Some)
}

pub fn write_boundary(out: &Path, alpha: f64, k_eq: f64, points: &[BoundaryPoint]) -> CliResult<()> {
    let path = boundary_path(out, alpha, k_eq);
    let mut w = csv_writer();
    w.write_record(["m_F", "b_F_critical"]).map_err(|e| csv_err(&path, e))?;
    for p in points {
        w.write_record([p.m_f.to_string(), opt(p.b_f_critical)]).map_err(|e| csv_err(&path, e))?;
    }
    csv_finish(&path, w)
}

/// Front export: a JSON array of points plus the `alpha,m_F,b_F,C,rho,w` CSV.
pub fn write_front(out: &Path, alpha: f64, points: &[ParetoPoint]) -> CliResult<()> {
    write_json(&front_path(out, alpha, "json"), &points, true)?;
    let path = front_path(out, alpha, "csv");
    let mut w = csv_writer();
    w.write_record(["alpha", "m_F", "b_F", "C", "rho", "w"]).map_err(|e| csv_err(&path, e))?;
    for p in points {
        w.write_record([
            p.alpha.to_string(),
            p.m_f.to_string(),
            p.b_f.to_string(),
            p.c.to_string(),
            p.rho.to_string(),
            opt(p.weight),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    csv_finish(&path, w)
}

pub fn read_front(out: &Path, alpha: f64) -> CliResult<Option<Vec<ParetoPoint>>> {
    read_json(&front_path(out, alpha, "json"))
}

/// Parse a map CSV back into `(m_F, b_F, value)` rows.
pub fn read_map_csv(path: &Path) -> CliResult<Vec<(f64, f64, Option<f64>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Compute(format!("reading {}: {e}", path.display())))?;
    let bad = |what: &str| CliError::Compute(format!("{}: bad {what}", path.display()));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Compute(format!("reading {}: {e}", path.display())))?;
        let num = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok());
        let value = match rec.get(2) {
            Some("") => None,
            Some(s) => Some(s.parse::<f64>().map_err(|_| bad("value"))?),
            None => return Err(bad("row")),
        };
        rows.push((num(0).ok_or_else(|| bad("m_F"))?, num(1).ok_or_else(|| bad("b_F"))?, value));
    }
    Ok(rows)
}
