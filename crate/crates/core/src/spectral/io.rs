//! Field files: one line of JSON header followed by a CSV body.
//!
//! ```text
//! {"d":1,"L":12.0,"N":1024,"description":"..."}
//! x_1,re,im
//! -12.0,1.2e-31,0.0
//! ...
//! ```
//!
//! Rows are in row-major grid order with `d` coordinate columns. A header may
//! instead carry `"body": "<path>"`, naming a separate CSV file (resolved
//! relative to the header file) with the same columns.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
}

impl FieldHeader {
    pub fn grid(&self) -> Result<Grid> {
        if !self.points.is_power_of_two() {
            return Err(Error::Format(format!("N = {} is not a power of two", self.points)));
        }
        Grid::new(self.d, self.half_width, self.points)
    }
}

/// Writes `field` with an inline CSV body.
pub fn write_field(mut out: impl Write, field: &Field, description: &str) -> Result<()> {
    let g = field.grid();
    let header = FieldHeader {
        d: g.dim(),
        half_width: g.half_width(),
        points: g.points(),
        description: description.to_string(),
        body: None,
    };
    serde_json::to_writer(&mut out, &header)?;
    writeln!(out)?;
    write_body(out, field)
}

fn write_body(out: impl Write, field: &Field) -> Result<()> {
    let g = field.grid();
    let mut w = csv::Writer::from_writer(out);
    let mut names: Vec<String> = (1..=g.dim()).map(|k| format!("x_{k}")).collect();
    names.extend(["re".to_string(), "im".to_string()]);
    w.write_record(&names)?;
    for (i, z) in field.values().iter().enumerate() {
        let c = g.coords(i);
        let mut rec: Vec<String> = c[..g.dim()].iter().map(|v| format!("{v:e}")).collect();
        rec.push(format!("{:e}", z.re));
        rec.push(format!("{:e}", z.im));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_field(path: impl AsRef<Path>, field: &Field, description: &str) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_field(&mut buf, field, description)?;
    buf.flush()?;
    Ok(())
}

/// Parses a field from a header line plus inline body.
pub fn read_field(input: impl Read) -> Result<(FieldHeader, Field)> {
    let mut reader = BufReader::new(input);
    let header = read_header(&mut reader)?;
    if header.body.is_some() {
        return Err(Error::Format("header references an external body; use load_field".into()));
    }
    let field = read_body(reader, &header)?;
    Ok((header, field))
}

pub fn load_field(path: impl AsRef<Path>) -> Result<(FieldHeader, Field)> {
    let path = path.as_ref();
    let mut reader = BufReader::new(fs::File::open(path)?);
    let header = read_header(&mut reader)?;
    let field = match &header.body {
        Some(body) => {
            let body_path = path.parent().unwrap_or(Path::new(".")).join(body);
            read_body(fs::File::open(body_path)?, &header)?
        }
        None => read_body(reader, &header)?,
    };
    Ok((header, field))
}

fn read_header(reader: &mut impl BufRead) -> Result<FieldHeader> {
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim())?;
    header.grid()?;
    Ok(header)
}

fn read_body(input: impl Read, header: &FieldHeader) -> Result<Field> {
    let grid = header.grid()?;
    let d = grid.dim();
    let mut rdr = csv::Reader::from_reader(input);
    let mut values = Vec::with_capacity(grid.len());
    let tol = 1e-9 * grid.half_width();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != d + 2 {
            return Err(Error::Format(format!("row {i}: expected {} columns, got {}", d + 2, rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k].trim().parse::<f64>().map_err(|e| Error::Format(format!("row {i}, column {k}: {e}")))
        };
        if i < grid.len() {
            let c = grid.coords(i);
            for (k, want) in c.iter().take(d).enumerate() {
                if (num(k)? - want).abs() > tol {
                    return Err(Error::Format(format!("row {i}: coordinates out of grid order")));
                }
            }
        }
        values.push(Complex64::new(num(d)?, num(d + 1)?));
    }
    if values.len() != grid.len() {
        return Err(Error::Format(format!("expected {} rows, found {}", grid.len(), values.len())));
    }
    Field::new(grid, values)
}
