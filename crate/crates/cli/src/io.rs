//! CSV files and run manifests.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use manifold_regress::sphere::to_angles;
use manifold_regress::{Dataset, Point, SpaceKind, SpherePoint};
use serde::Serialize;

use crate::fail::Failure;

/// Floats are written with 17 significant digits so they parse back exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn reader(path: &Path) -> Result<csv::Reader<File>, Failure> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), Failure> {
    let mut rdr = reader(path)?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Failure::usage(format!("{}: row {}: {e}", path.display(), line + 1)))?;
        rows.push(row);
    }
    Ok((headers, rows))
}

fn column(headers: &[String], name: &str, path: &Path) -> Result<usize, Failure> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Failure::usage(format!("{}: missing column `{name}`", path.display())))
}

/// Columns `y1..y{k+1}` in order.
fn coord_columns(headers: &[String], path: &Path) -> Result<Vec<usize>, Failure> {
    let cols: Vec<usize> = (1..).map_while(|j| headers.iter().position(|h| *h == format!("y{j}"))).collect();
    if cols.len() < 2 {
        return Err(Failure::usage(format!("{}: expected columns y1, y2, ...", path.display())));
    }
    Ok(cols)
}

/// Dataset CSV with header `x,y1,..,y{k+1}`.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), Failure> {
    let dim = data.space.ambient_dim();
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["x".to_string()];
    header.extend((1..=dim).map(|j| format!("y{j}")));
    w.write_record(&header).map_err(Failure::io)?;
    for (x, y) in data.xs.iter().zip(&data.ys) {
        let mut row = vec![fmt_f64(*x)];
        row.extend(y.coords().iter().map(|c| fmt_f64(*c)));
        w.write_record(&row).map_err(Failure::io)?;
    }
    w.flush().map_err(Failure::io)
}

/// Reads a sphere dataset; the domain is `[0, 1]` unless the covariates
/// leave it.
pub fn read_dataset(path: &Path) -> Result<Dataset, Failure> {
    let (headers, rows) = parse_rows(path)?;
    let xc = column(&headers, "x", path)?;
    let yc = coord_columns(&headers, path)?;
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for row in &rows {
        xs.push(row[xc]);
        let coords: Vec<f64> = yc.iter().map(|&c| row[c]).collect();
        let p = SpherePoint::new(coords).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        ys.push(Point::Sphere(p));
    }
    let lo = xs.iter().copied().fold(0.0, f64::min);
    let hi = xs.iter().copied().fold(1.0, f64::max);
    Dataset::new(xs, ys, SpaceKind::Sphere(yc.len() - 1), (lo, hi))
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// A curve sampled on a grid: header `t[,theta,phi],y1..`.
pub fn write_trace(path: &Path, trace: &[(f64, SpherePoint)]) -> Result<(), Failure> {
    let dim = trace.first().map_or(3, |(_, p)| p.ambient_dim());
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["t".to_string()];
    if dim == 3 {
        header.extend(["theta".to_string(), "phi".to_string()]);
    }
    header.extend((1..=dim).map(|j| format!("y{j}")));
    w.write_record(&header).map_err(Failure::io)?;
    for (t, p) in trace {
        let mut row = vec![fmt_f64(*t)];
        if dim == 3 {
            let a = to_angles(p).map_err(Failure::numeric)?;
            row.extend([fmt_f64(a.theta), fmt_f64(a.phi)]);
        }
        row.extend(p.coords().iter().map(|c| fmt_f64(*c)));
        w.write_record(&row).map_err(Failure::io)?;
    }
    w.flush().map_err(Failure::io)
}

pub fn read_trace(path: &Path) -> Result<Vec<(f64, SpherePoint)>, Failure> {
    let (headers, rows) = parse_rows(path)?;
    let tc = column(&headers, "t", path)?;
    let yc = coord_columns(&headers, path)?;
    rows.iter()
        .map(|row| {
            let p = SpherePoint::new(yc.iter().map(|&c| row[c]).collect())
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            Ok((row[tc], p))
        })
        .collect()
}

/// Plain CSV table from string cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(Failure::io)?;
    for row in rows {
        w.write_record(row).map_err(Failure::io)?;
    }
    w.flush().map_err(Failure::io)
}

/// Column-aligned text rendering of a table.
pub fn render_text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    create(path)?.write_all(text.as_bytes()).map_err(Failure::io)
}

/// `data.csv` → `data.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize, R: Serialize> {
    pub version: &'static str,
    pub seed: u64,
    pub config: C,
    pub started_at: String,
    pub elapsed_s: f64,
    pub outputs: Vec<String>,
    pub results: R,
}

pub fn write_manifest<C: Serialize, R: Serialize>(out: &Path, manifest: &RunManifest<C, R>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| Failure::usage(e.to_string()))?;
    write_text(&manifest_path(out), &(text + "\n"))
}
