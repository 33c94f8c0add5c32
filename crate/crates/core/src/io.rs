//! File formats.
//!
//! - Cloud CSV: header `x0,...,x{D-1}` plus an optional trailing `label`
//!   column (1-based layer index).
//! - Sidecar JSON (same stem, `.json`): [`Sidecar`].
//! - Result and report JSON: serde of the library types.
//! - Evaluation CSV: header [`EVAL_HEADER`], one row per (n, seed, layer).
//!
//! Floats are written in shortest round-trip form, so files are
//! byte-identical across reruns.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Subspace;
use crate::points::PointSet;
use crate::samplers::{ManifoldSpec, PointCloud};

pub const EVAL_HEADER: &str = "n,seed,layer,dim,hausdorff,clustering,tangent,delta,resolution,wall_ms";

/// Ground truth stored next to a cloud CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub ambient: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub specs: Vec<ManifoldSpec>,
    pub weights: Vec<f64>,
    /// Row-major orthonormal tangent basis per point (`dim * ambient`
    /// numbers each).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec<f64>>>,
}

/// `cloud.csv` -> `cloud.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => parse_err(path, line, format!("{other:?}")),
    }
}

/// Writes the CSV and, when the cloud carries specs, its sidecar.
pub fn write_cloud(csv_path: &Path, cloud: &PointCloud) -> Result<()> {
    let amb = cloud.ambient();
    let mut w = csv::Writer::from_writer(create(csv_path)?);
    let mut header: Vec<String> = (0..amb).map(|k| format!("x{k}")).collect();
    if cloud.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(|e| csv_err(csv_path, e))?;
    let mut row: Vec<String> = Vec::with_capacity(amb + 1);
    for i in 0..cloud.len() {
        row.clear();
        row.extend(cloud.points.point(i).iter().map(|x| x.to_string()));
        if let Some(l) = &cloud.labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row).map_err(|e| csv_err(csv_path, e))?;
    }
    w.flush().map_err(|e| Error::io(csv_path, e))?;

    if let Some(specs) = &cloud.specs {
        let side = Sidecar {
            ambient: amb,
            n: cloud.len(),
            seed: cloud.seed,
            specs: specs.clone(),
            weights: cloud.weights.clone().unwrap_or_else(|| vec![1.0 / specs.len() as f64; specs.len()]),
            tangents: cloud
                .tangents
                .as_ref()
                .map(|ts| ts.iter().map(|t| t.basis_flat().to_vec()).collect()),
        };
        write_json(&sidecar_path(csv_path), &side)?;
    }
    Ok(())
}

/// Reads a cloud CSV; attaches the sidecar when one exists.
pub fn read_cloud(csv_path: &Path) -> Result<PointCloud> {
    let mut cloud = read_cloud_csv(csv_path)?;
    let side = sidecar_path(csv_path);
    if side.exists() {
        attach_sidecar(&mut cloud, &side)?;
    }
    Ok(cloud)
}

/// As [`read_cloud`], but the sidecar and labels are mandatory.
pub fn read_truth(csv_path: &Path) -> Result<PointCloud> {
    let side = sidecar_path(csv_path);
    if !side.exists() {
        return Err(Error::io(
            &side,
            std::io::Error::new(std::io::ErrorKind::NotFound, "ground-truth sidecar not found"),
        ));
    }
    let mut cloud = read_cloud_csv(csv_path)?;
    attach_sidecar(&mut cloud, &side)?;
    if cloud.labels.is_none() {
        return Err(Error::MissingLabels);
    }
    Ok(cloud)
}

fn attach_sidecar(cloud: &mut PointCloud, path: &Path) -> Result<()> {
    let side: Sidecar = read_json(path)?;
    if side.ambient != cloud.ambient() {
        return Err(Error::DimensionMismatch {
            expected: cloud.ambient(),
            got: side.ambient,
        });
    }
    if side.n != cloud.len() {
        return Err(parse_err(path, 0, format!("sidecar n = {} but the CSV has {} rows", side.n, cloud.len())));
    }
    for s in &side.specs {
        s.validate()?;
    }
    if let Some(labels) = &cloud.labels {
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > side.specs.len()) {
            return Err(parse_err(path, 0, format!("label {bad} outside 1..={}", side.specs.len())));
        }
    }
    if let Some(ts) = &side.tangents {
        if ts.len() != cloud.len() {
            return Err(parse_err(path, 0, "one tangent basis per point expected"));
        }
        let labels = cloud.labels.as_ref().ok_or(Error::MissingLabels)?;
        let mut out = Vec::with_capacity(ts.len());
        for (i, flat) in ts.iter().enumerate() {
            let d = side.specs[labels[i] - 1].dim();
            if flat.len() != d * side.ambient {
                return Err(parse_err(path, 0, format!("tangent {i} has {} numbers, expected {}", flat.len(), d * side.ambient)));
            }
            let rows: Vec<Vec<f64>> = flat.chunks(side.ambient).map(<[f64]>::to_vec).collect();
            out.push(Subspace::from_orthonormal(side.ambient, &rows)?);
        }
        cloud.tangents = Some(out);
    }
    cloud.specs = Some(side.specs);
    cloud.weights = Some(side.weights);
    cloud.seed = side.seed;
    Ok(())
}

fn read_cloud_csv(path: &Path) -> Result<PointCloud> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let labeled = names.last() == Some(&"label");
    let amb = names.len() - labeled as usize;
    if amb == 0 {
        return Err(parse_err(path, 1, "no coordinate columns"));
    }
    for (k, name) in names[..amb].iter().enumerate() {
        if *name != format!("x{k}") {
            return Err(parse_err(path, 1, format!("expected column `x{k}`, found `{name}`")));
        }
    }
    let mut points = PointSet::new(amb);
    let mut labels = Vec::new();
    let mut p = vec![0.0; amb];
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        for (k, x) in p.iter_mut().enumerate() {
            let field = rec[k].trim();
            *x = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, line, format!("bad coordinate `{field}` in column x{k}")))?;
        }
        points.push(&p)?;
        if labeled {
            let field = rec[amb].trim();
            let l: usize = field
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad label `{field}`")))?;
            labels.push(l);
        }
    }
    let mut cloud = PointCloud::unlabeled(points);
    if labeled {
        cloud.labels = Some(labels);
    }
    Ok(cloud)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_json_with(path, value, true)
}

/// Single-line JSON, for large results.
pub fn write_json_compact<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_json_with(path, value, false)
}

fn write_json_with<T: Serialize + ?Sized>(path: &Path, value: &T, pretty: bool) -> Result<()> {
    let mut w = create(path)?;
    let r = if pretty {
        serde_json::to_writer_pretty(&mut w, value)
    } else {
        serde_json::to_writer(&mut w, value)
    };
    r.map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))
}

/// One evaluation CSV row. Unmeasured losses are empty fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub n: usize,
    pub seed: Option<u64>,
    pub layer: usize,
    pub dim: usize,
    pub hausdorff: Option<f64>,
    pub clustering: f64,
    pub tangent: Option<f64>,
    pub delta: f64,
    pub resolution: f64,
    pub wall_ms: f64,
}

/// Appends rows, writing the header first if the file is new or empty.
pub fn append_eval_rows(path: &Path, rows: &[EvalRow]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Overwrites `path` with the header and `rows`.
pub fn write_eval_rows(path: &Path, rows: &[EvalRow]) -> Result<()> {
    if path.exists() {
        fs::remove_file(path).map_err(|e| Error::io(path, e))?;
    }
    append_eval_rows(path, rows)
}

pub fn read_eval_rows(path: &Path) -> Result<Vec<EvalRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header.join(",") != EVAL_HEADER {
        return Err(parse_err(path, 1, format!("expected header `{EVAL_HEADER}`")));
    }
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}
