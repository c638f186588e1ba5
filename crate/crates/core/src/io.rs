//! Field dumps, trace tables and boundary data files.
//!
//! A field CSV has one row per node with columns `(x, t, re, im)`; dual axes
//! are labelled `xi` and `tau`. The binary dump is a single line of JSON
//! followed by the values as little-endian `f64` pairs `(re, im)`, row-major
//! with the spatial index outermost.

use crate::error::{Error, Result};
use crate::field::{Representation, SpectralField};
use crate::grid::SpaceTimeGrid;
use crate::series::Profile;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub const CONVENTION: &str = "e^{i(x xi + t tau)}";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub grid: SpaceTimeGrid,
    pub representation: Representation,
    pub convention: String,
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn axis_labels(repr: Representation) -> [&'static str; 2] {
    match repr {
        Representation::Physical => ["x", "t"],
        Representation::SpatialDual => ["xi", "t"],
        Representation::Dual => ["xi", "tau"],
    }
}

fn axes(f: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let g = f.grid;
    match f.repr {
        Representation::Physical => (g.xs(), g.ts()),
        Representation::SpatialDual => (g.xis(), g.ts()),
        Representation::Dual => (g.xis(), g.taus()),
    }
}

pub fn write_field_csv<W: Write>(f: &SpectralField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let [a, b] = axis_labels(f.repr);
    w.write_record([a, b, "re", "im"])?;
    let (xs, ts) = axes(f);
    for (i, x) in xs.iter().enumerate() {
        for (n, t) in ts.iter().enumerate() {
            let v = f.values[[i, n]];
            w.serialize((x, t, v.re, v.im))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_binary<W: Write>(f: &SpectralField, mut out: W) -> Result<()> {
    let header = FieldHeader {
        grid: f.grid,
        representation: f.repr,
        convention: CONVENTION.to_string(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for v in f.values.iter() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_field_binary<R: Read>(input: R) -> Result<SpectralField> {
    let mut reader = BufReader::new(input);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(&line)?;
    if header.convention != CONVENTION {
        return Err(Error::Io(format!("unsupported convention {:?}", header.convention)));
    }
    header.grid.validate()?;
    let g = header.grid;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != g.nx * g.nt * 16 {
        return Err(Error::Io(format!(
            "expected {} bytes of field data, found {}",
            g.nx * g.nt * 16,
            bytes.len()
        )));
    }
    let num = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("eight bytes"));
    let values = Array2::from_shape_fn((g.nx, g.nt), |(i, n)| {
        let k = 2 * (i * g.nt + n);
        C64::new(num(k), num(k + 1))
    });
    SpectralField::from_values(g, header.representation, values)
}

/// A table with a leading `t` column and one column per named series.
pub fn write_series_csv<W: Write>(ts: &[f64], columns: &[(&str, &[f64])], out: W) -> Result<()> {
    if columns.iter().any(|(_, c)| c.len() != ts.len()) {
        return Err(Error::InvalidConfig("every column needs one value per time".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut head = vec!["t"];
    head.extend(columns.iter().map(|(n, _)| *n));
    w.write_record(&head)?;
    for (k, t) in ts.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(columns.iter().map(|(_, c)| c[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Boundary data from a CSV with header `t,h1,h2,h3` on uniform `t ≥ 0` nodes.
pub fn read_boundary_csv<R: Read>(input: R) -> Result<[Profile; 3]> {
    let mut r = csv::Reader::from_reader(input);
    let head: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if head != ["t", "h1", "h2", "h3"] {
        return Err(Error::InvalidConfig(format!(
            "boundary CSV needs the header t,h1,h2,h3, found {}",
            head.join(",")
        )));
    }
    let rows: Vec<[f64; 4]> = r.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.len() < 8 {
        return Err(Error::InvalidConfig("boundary CSV needs at least 8 rows".into()));
    }
    let t0 = rows[0][0];
    let dt = rows[1][0] - t0;
    let uniform = rows
        .iter()
        .enumerate()
        .all(|(k, r)| (r[0] - (t0 + k as f64 * dt)).abs() <= 1e-9 * (1.0 + r[0].abs()));
    if !(dt > 0.0) || !uniform || t0 < 0.0 {
        return Err(Error::InvalidConfig(
            "boundary CSV times must be uniform, increasing and nonnegative".into(),
        ));
    }
    let channel = |c: usize| Profile::Sampled {
        t0,
        dt,
        values: rows.iter().map(|r| r[c]).collect(),
    };
    Ok([channel(1), channel(2), channel(3)])
}

pub fn read_boundary_csv_path(path: &Path) -> Result<[Profile; 3]> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_boundary_csv(file)
}
