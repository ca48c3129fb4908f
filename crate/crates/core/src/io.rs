//! CSV readers and writers.
//!
//! | file          | header                                        |
//! |---------------|-----------------------------------------------|
//! | polyline      | `x,y` (closed implicitly)                      |
//! | decomposition | `cx,cy,side,depth`                             |
//! | jet           | `x,y,f0_re,f0_im,f1_re,f1_im,f2_re,f2_im`      |
//! | field         | `x,y,region,re,im`                             |
//!
//! Floats are written in Rust's shortest round-trip form, so a write/read
//! cycle is lossless and repeated writes are byte-identical.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::geometry::{Curve, DomainDecomposition, GeometryError};
use crate::operators::{FieldOnGrid, RegionTag};
use crate::whitney::{check_jet, WhitneyError, WhitneyJet};

pub const POLYLINE_HEADER: [&str; 2] = ["x", "y"];
pub const DECOMPOSITION_HEADER: [&str; 4] = ["cx", "cy", "side", "depth"];
pub const JET_HEADER: [&str; 8] = ["x", "y", "f0_re", "f0_im", "f1_re", "f1_im", "f2_re", "f2_im"];
pub const FIELD_HEADER: [&str; 5] = ["x", "y", "region", "re", "im"];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: Vec<String>, found: Vec<String> },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("jet vertex {row} at {found} does not match curve vertex {expected}")]
    VertexMismatch { row: usize, expected: Complex64, found: Complex64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Whitney(#[from] WhitneyError),
}

fn open(path: &Path) -> Result<File, IoError> {
    File::open(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

fn reader<R: Read>(r: R, header: &[&str]) -> Result<csv::Reader<R>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(IoError::Header { expected: header.iter().map(|s| s.to_string()).collect(), found });
    }
    Ok(rdr)
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>, IoError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    Ok(wtr)
}

/// Parses every row of a numeric table; `row` numbers count data rows from 1.
fn numeric_rows<R: Read>(rdr: &mut csv::Reader<R>, width: usize) -> Result<Vec<Vec<f64>>, IoError> {
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != width {
            return Err(IoError::Row { row, message: format!("expected {width} columns, found {}", rec.len()) });
        }
        let vals = rec
            .iter()
            .map(|s| {
                let v: f64 = s.parse().map_err(|_| IoError::Row { row, message: format!("not a number: {s:?}") })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(IoError::Row { row, message: format!("not finite: {s}") })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(vals);
    }
    Ok(out)
}

pub fn write_polyline<W: Write>(curve: &Curve, w: W) -> Result<(), IoError> {
    let mut wtr = writer(w, &POLYLINE_HEADER)?;
    for v in curve.vertices() {
        wtr.write_record([v.re.to_string(), v.im.to_string()])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Vertices of a polyline file, in file order.
pub fn read_vertices<R: Read>(r: R) -> Result<Vec<Complex64>, IoError> {
    let mut rdr = reader(r, &POLYLINE_HEADER)?;
    Ok(numeric_rows(&mut rdr, 2)?.into_iter().map(|v| Complex64::new(v[0], v[1])).collect())
}

/// Reads a polyline file and validates it as a closed simple curve.
pub fn read_polyline<R: Read>(r: R) -> Result<Curve, IoError> {
    Ok(Curve::from_vertices(read_vertices(r)?)?)
}

pub fn save_polyline(curve: &Curve, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_polyline(curve, create(path.as_ref())?)
}

pub fn load_polyline(path: impl AsRef<Path>) -> Result<Curve, IoError> {
    read_polyline(open(path.as_ref())?)
}

/// Accepted squares only; residual squares are not exported.
pub fn write_decomposition<W: Write>(decomp: &DomainDecomposition, w: W) -> Result<(), IoError> {
    let mut wtr = writer(w, &DECOMPOSITION_HEADER)?;
    for q in decomp.squares() {
        wtr.write_record([q.center.re.to_string(), q.center.im.to_string(), q.side.to_string(), q.depth.to_string()])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn save_decomposition(decomp: &DomainDecomposition, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_decomposition(decomp, create(path.as_ref())?)
}

pub fn write_jet<W: Write>(jet: &WhitneyJet, w: W) -> Result<(), IoError> {
    let mut wtr = writer(w, &JET_HEADER)?;
    let v = jet.curve().vertices();
    for (i, z) in v.iter().enumerate() {
        let (a, b, c) = (jet.f0()[i], jet.f1()[i], jet.f2()[i]);
        wtr.write_record([z.re, z.im, a.re, a.im, b.re, b.im, c.re, c.im].map(|x| x.to_string()))?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a jet aligned with `curve`'s vertices. The file carries no Lipschitz
/// constant: `lip_constant = None` takes the smallest admissible one found by
/// [`check_jet`].
pub fn read_jet<R: Read>(curve: &Curve, r: R, nu: f64, lip_constant: Option<f64>) -> Result<WhitneyJet, IoError> {
    let mut rdr = reader(r, &JET_HEADER)?;
    let rows = numeric_rows(&mut rdr, 8)?;
    let v = curve.vertices();
    if rows.len() != v.len() {
        return Err(IoError::Row {
            row: rows.len(),
            message: format!("jet has {} rows, curve has {} vertices", rows.len(), v.len()),
        });
    }
    let tol = curve.boundary_tolerance().max(1e-12 * curve.radius());
    let (mut f0, mut f1, mut f2) = (Vec::new(), Vec::new(), Vec::new());
    for (i, (row, &t)) in rows.iter().zip(v).enumerate() {
        let x = Complex64::new(row[0], row[1]);
        if (x - t).norm() > tol {
            return Err(IoError::VertexMismatch { row: i + 1, expected: t, found: x });
        }
        f0.push(Complex64::new(row[2], row[3]));
        f1.push(Complex64::new(row[4], row[5]));
        f2.push(Complex64::new(row[6], row[7]));
    }
    let jet = WhitneyJet::new(curve, f0, f1, f2, nu, lip_constant.unwrap_or(0.0))?;
    Ok(match lip_constant {
        Some(_) => jet,
        None => {
            let c = check_jet(&jet).smallest_c;
            jet.with_lip_constant(c)
        }
    })
}

pub fn save_jet(jet: &WhitneyJet, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_jet(jet, create(path.as_ref())?)
}

pub fn load_jet(
    curve: &Curve,
    path: impl AsRef<Path>,
    nu: f64,
    lip_constant: Option<f64>,
) -> Result<WhitneyJet, IoError> {
    read_jet(curve, open(path.as_ref())?, nu, lip_constant)
}

pub fn write_field<W: Write>(field: &FieldOnGrid, w: W) -> Result<(), IoError> {
    let mut wtr = writer(w, &FIELD_HEADER)?;
    for ((z, r), v) in field.points.iter().zip(&field.regions).zip(&field.values) {
        wtr.write_record([
            z.re.to_string(),
            z.im.to_string(),
            r.as_str().to_owned(),
            v.re.to_string(),
            v.im.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn save_field(field: &FieldOnGrid, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_field(field, create(path.as_ref())?)
}

/// One row of a field file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub z: Complex64,
    pub region: RegionTag,
    pub value: Complex64,
}

pub fn read_field<R: Read>(r: R) -> Result<Vec<FieldRow>, IoError> {
    let mut rdr = reader(r, &FIELD_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let num = |k: usize| -> Result<f64, IoError> {
            let s = rec.get(k).ok_or(IoError::Row { row, message: format!("missing column {k}") })?;
            s.parse().map_err(|_| IoError::Row { row, message: format!("not a number: {s:?}") })
        };
        let region = match rec.get(2) {
            Some("inside") => RegionTag::Inside,
            Some("outside") => RegionTag::Outside,
            other => return Err(IoError::Row { row, message: format!("bad region {other:?}") }),
        };
        out.push(FieldRow { z: Complex64::new(num(0)?, num(1)?), region, value: Complex64::new(num(3)?, num(4)?) });
    }
    Ok(out)
}
