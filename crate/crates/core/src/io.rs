//! CSV and JSON output, plus the readers and schema checks the command line
//! tools need.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so files
//! read back to the same bits. `-∞` is the literal `-inf`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::envelope::{EnvelopeError, GridFunction};
use crate::freeboundary::{Diagnostic, SolveReport, SolveStatus, SolverConfig};
use crate::geometry::{BoundaryConstraint, ConvexBody, Direction};
use crate::hull::Point;
use crate::pde::{PotentialField, RingMesh};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
}

type Result<T> = std::result::Result<T, IoError>;

pub const BODY_HEADER: &[&str] = &["i", "theta", "h", "x", "y"];
pub const CONSTRAINT_HEADER: &[&str] = &["i", "theta", "g"];
pub const FIELD_HEADER: &[&str] = &["i", "j", "theta", "s", "x", "y", "u"];
pub const PICARD_HEADER: &[&str] = &["outer_iter", "picard_update_norm", "linear_iters"];
pub const BOUNDARY_HEADER: &[&str] = &["i", "theta", "h", "x", "y", "grad_u", "g", "residual"];
pub const RESIDUALS_HEADER: &[&str] = &["iter", "sup_residual", "inradius"];
pub const GRID_HEADER: &[&str] = &["ix", "iy", "x", "y", "value"];
pub const SWEEP_HEADER: &[&str] = &["R", "inradius", "ratio", "status"];

/// Every CSV layout this crate writes.
pub const SCHEMAS: &[(&str, &[&str])] = &[
    ("body", BODY_HEADER),
    ("constraint", CONSTRAINT_HEADER),
    ("field", FIELD_HEADER),
    ("picard", PICARD_HEADER),
    ("boundary", BOUNDARY_HEADER),
    ("residuals", RESIDUALS_HEADER),
    ("grid", GRID_HEADER),
    ("sweep", SWEEP_HEADER),
];

pub fn fmt_f64(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv { path: path.to_path_buf(), source }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| IoError::Io { path: dir.to_path_buf(), source })
}

pub fn write_body_csv(path: &Path, body: &ConvexBody) -> Result<()> {
    write_csv(
        path,
        BODY_HEADER,
        (0..body.grid_size()).map(|i| {
            let x = body.boundary_point_at(i);
            vec![i.to_string(), fmt_f64(body.theta(i)), fmt_f64(body.support_at(i)), fmt_f64(x.x), fmt_f64(x.y)]
        }),
    )
}

pub fn write_constraint_csv(path: &Path, g: &BoundaryConstraint, m: usize) -> Result<()> {
    write_csv(
        path,
        CONSTRAINT_HEADER,
        (0..m).map(|i| {
            let d = Direction::grid(i, m);
            vec![i.to_string(), fmt_f64(d.angle()), fmt_f64(g.eval(d))]
        }),
    )
}

pub fn write_field_csv(path: &Path, mesh: &RingMesh, field: &PotentialField) -> Result<()> {
    let m = mesh.angular_nodes();
    write_csv(
        path,
        FIELD_HEADER,
        (0..mesh.radial_layers()).flat_map(|j| {
            (0..m).map(move |i| {
                let x = mesh.node(i, j);
                vec![
                    i.to_string(),
                    j.to_string(),
                    fmt_f64(mesh.theta(i)),
                    fmt_f64(mesh.s(j)),
                    fmt_f64(x.x),
                    fmt_f64(x.y),
                    fmt_f64(field.value(i, j)),
                ]
            })
        }),
    )
}

pub fn write_picard_csv(path: &Path, field: &PotentialField) -> Result<()> {
    write_csv(
        path,
        PICARD_HEADER,
        field.picard_log().iter().map(|s| vec![s.outer_iter.to_string(), fmt_f64(s.update_norm), s.linear_iters.to_string()]),
    )
}

pub fn write_boundary_csv(path: &Path, report: &SolveReport) -> Result<()> {
    write_csv(
        path,
        BOUNDARY_HEADER,
        report.profile.iter().map(|n| {
            vec![
                n.i.to_string(),
                fmt_f64(n.theta),
                fmt_f64(n.h),
                fmt_f64(n.x),
                fmt_f64(n.y),
                fmt_f64(n.grad),
                fmt_f64(n.g),
                fmt_f64(n.residual),
            ]
        }),
    )
}

pub fn write_residuals_csv(path: &Path, report: &SolveReport) -> Result<()> {
    write_csv(path, RESIDUALS_HEADER, report.history.iter().map(|r| vec![r.iter.to_string(), fmt_f64(r.sup_residual), fmt_f64(r.inradius)]))
}

pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<()> {
    write_csv(
        path,
        GRID_HEADER,
        (0..f.ny()).flat_map(|iy| {
            (0..f.nx()).map(move |ix| {
                let x = f.node(ix, iy);
                vec![ix.to_string(), iy.to_string(), fmt_f64(x.x), fmt_f64(x.y), fmt_f64(f.value(ix, iy))]
            })
        }),
    )
}

/// One row of a radius sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub radius: f64,
    pub inradius: f64,
    pub ratio: f64,
    pub status: String,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_csv(path, SWEEP_HEADER, rows.iter().map(|r| vec![fmt_f64(r.radius), fmt_f64(r.inradius), fmt_f64(r.ratio), r.status.clone()]))
}

/// The `report.json` document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportSummary {
    pub status: SolveStatus,
    pub iterations: usize,
    pub sup_residual: f64,
    pub p: f64,
    pub inradius: f64,
    pub mesh_tolerance: f64,
    pub max_support: f64,
    pub min_support: f64,
    pub config: SolverConfig,
    pub diagnostics: Vec<Diagnostic>,
}

impl ReportSummary {
    pub fn new(report: &SolveReport) -> Self {
        Self {
            status: report.status,
            iterations: report.iterations,
            sup_residual: report.sup_residual(),
            p: report.p,
            inradius: report.inradius(),
            mesh_tolerance: report.mesh.mesh_tolerance(),
            max_support: report.body.max_support(),
            min_support: report.body.min_support(),
            config: report.config.clone(),
            diagnostics: report.diagnostics.clone(),
        }
    }
}

/// Writes `report.json`, `boundary.csv`, `field.csv`, `residuals.csv`,
/// `picard.csv` and `body.csv` into `dir`.
pub fn write_solve_outputs(dir: &Path, report: &SolveReport) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&dir.join("report.json"), &ReportSummary::new(report))?;
    write_boundary_csv(&dir.join("boundary.csv"), report)?;
    write_field_csv(&dir.join("field.csv"), &report.mesh, &report.field)?;
    write_residuals_csv(&dir.join("residuals.csv"), report)?;
    write_picard_csv(&dir.join("picard.csv"), &report.field)?;
    write_body_csv(&dir.join("body.csv"), &report.body)
}

fn read_rows(path: &Path, expected: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    if header != expected {
        return Err(IoError::Format { path: path.to_path_buf(), message: format!("header {header:?}, expected {expected:?}") });
    }
    r.records().map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()).map_err(csv_err(path))).collect()
}

fn parse<T: std::str::FromStr>(path: &Path, row: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| IoError::Format { path: path.to_path_buf(), message: format!("row {}: cannot parse {s:?}", row + 1) })
}

/// Reads a grid CSV. Rows may come in any order but must cover a full
/// rectangle of indices on a uniform grid.
pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let rows = read_rows(path, GRID_HEADER)?;
    let bad = |message: String| IoError::Format { path: path.to_path_buf(), message };
    let mut entries = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let ix: usize = parse(path, k, &row[0])?;
        let iy: usize = parse(path, k, &row[1])?;
        let x: f64 = parse(path, k, &row[2])?;
        let y: f64 = parse(path, k, &row[3])?;
        let v: f64 = parse(path, k, &row[4])?;
        entries.push((ix, iy, Point::new(x, y), v));
    }
    let nx = entries.iter().map(|e| e.0).max().map_or(0, |v| v + 1);
    let ny = entries.iter().map(|e| e.1).max().map_or(0, |v| v + 1);
    if nx < 2 || ny < 2 || entries.len() != nx * ny {
        return Err(bad(format!("{} rows do not form a full grid", entries.len())));
    }
    let mut values = vec![f64::NAN; nx * ny];
    let mut origin = None;
    let mut step = None;
    for &(ix, iy, p, v) in &entries {
        values[iy * nx + ix] = v;
        if ix == 0 && iy == 0 {
            origin = Some(p);
        }
        if ix == 1 && iy == 0 {
            step = Some(p.x);
        }
    }
    let origin = origin.ok_or_else(|| bad("missing node (0, 0)".into()))?;
    let spacing = step.ok_or_else(|| bad("missing node (1, 0)".into()))? - origin.x;
    for &(ix, iy, p, _) in &entries {
        let expected = origin + spacing * Point::new(ix as f64, iy as f64);
        if (p - expected).norm() > 1e-9 * spacing.abs().max(1.0) * (nx + ny) as f64 {
            return Err(bad(format!("node ({ix}, {iy}) is not on a uniform grid")));
        }
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(bad("duplicate grid indices".into()));
    }
    Ok(GridFunction::new(origin, spacing, nx, ny, values)?)
}

/// Node coordinates and values from a field CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub angular_nodes: usize,
    pub radial_layers: usize,
    /// Indexed `j·m + i`.
    pub nodes: Vec<Point>,
    pub values: Vec<f64>,
}

pub fn read_field_csv(path: &Path) -> Result<FieldDump> {
    let rows = read_rows(path, FIELD_HEADER)?;
    let bad = |message: String| IoError::Format { path: path.to_path_buf(), message };
    let mut entries = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let i: usize = parse(path, k, &row[0])?;
        let j: usize = parse(path, k, &row[1])?;
        let x: f64 = parse(path, k, &row[4])?;
        let y: f64 = parse(path, k, &row[5])?;
        let u: f64 = parse(path, k, &row[6])?;
        entries.push((i, j, Point::new(x, y), u));
    }
    let m = entries.iter().map(|e| e.0).max().map_or(0, |v| v + 1);
    let l = entries.iter().map(|e| e.1).max().map_or(0, |v| v + 1);
    if m < 3 || l < 2 || entries.len() != m * l {
        return Err(bad(format!("{} rows do not form a full ring mesh", entries.len())));
    }
    let mut nodes = vec![Point::ORIGIN; m * l];
    let mut values = vec![f64::NAN; m * l];
    for (i, j, p, u) in entries {
        nodes[j * m + i] = p;
        values[j * m + i] = u;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(bad("duplicate node indices".into()));
    }
    Ok(FieldDump { angular_nodes: m, radial_layers: l, nodes, values })
}

/// Result of a schema check on one file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemaCheck {
    pub path: String,
    pub schema: Option<String>,
    pub rows: usize,
    pub errors: Vec<String>,
}

impl SchemaCheck {
    pub fn ok(&self) -> bool {
        self.schema.is_some() && self.errors.is_empty()
    }
}

/// Identifies the layout of a CSV by its header and checks that every row
/// has the right width and numeric cells (the sweep status column excepted).
pub fn check_csv_schema(path: &Path) -> Result<SchemaCheck> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    let found = SCHEMAS.iter().find(|(_, h)| *h == header.as_slice());
    let mut check = SchemaCheck { path: path.display().to_string(), schema: found.map(|(n, _)| n.to_string()), rows: 0, errors: vec![] };
    let Some((name, cols)) = found else {
        check.errors.push(format!("unknown header {header:?}"));
        return Ok(check);
    };
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        check.rows += 1;
        if rec.len() != cols.len() {
            check.errors.push(format!("row {}: {} fields, expected {}", k + 1, rec.len(), cols.len()));
            continue;
        }
        for (c, cell) in rec.iter().enumerate() {
            if *name == "sweep" && cols[c] == "status" {
                continue;
            }
            if cell.trim().parse::<f64>().is_err() {
                check.errors.push(format!("row {}: column {} is not numeric: {cell:?}", k + 1, cols[c]));
            }
        }
        if check.errors.len() > 20 {
            break;
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_keeps_bits_and_sentinel() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        let f =
            GridFunction::from_fn(
                Point::new(-1.0, -0.5),
                0.1,
                21,
                11,
                |p| if p.x > 0.7 { f64::NEG_INFINITY } else { (p.x * 3.0).sin() / 7.0 },
            )
            .unwrap();
        write_grid_csv(&path, &f).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("ix,iy,x,y,value\n"));
        assert!(text.contains(",-inf\n"));
        let back = read_grid_csv(&path).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!((back.nx(), back.ny()), (21, 11));
        assert!(check_csv_schema(&path).unwrap().ok());
    }

    #[test]
    fn schema_check_flags_problems() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "iter,sup_residual,inradius\n1,0.5,0.3\n2,abc,0.3\n3,1\n").unwrap();
        let check = check_csv_schema(&path).unwrap();
        assert_eq!(check.schema.as_deref(), Some("residuals"));
        assert_eq!(check.errors.len(), 2);
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(!check_csv_schema(&path).unwrap().ok());
        std::fs::write(&path, "R,inradius,ratio,status\n1.0,0.5,0.5,Converged\n").unwrap();
        assert!(check_csv_schema(&path).unwrap().ok());
    }

    #[test]
    fn body_and_constraint_headers() {
        let dir = tempfile::tempdir().unwrap();
        let body = ConvexBody::disk(Point::ORIGIN, 1.0, 16).unwrap();
        write_body_csv(&dir.path().join("b.csv"), &body).unwrap();
        let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
        assert_eq!(text.lines().next(), Some("i,theta,h,x,y"));
        assert_eq!(text.lines().count(), 17);
        let g = BoundaryConstraint::constant(3.0).unwrap();
        write_constraint_csv(&dir.path().join("g.csv"), &g, 16).unwrap();
        let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
        assert_eq!(text.lines().nth(1), Some("0,0.0,3.0"));
    }
}
