//! Matrix (de)serialization: paired real/imaginary CSV files and a JSON form.
//!
//! The CSV layout matches published supplementary tables: one file for the
//! real part and one for the imaginary part, one matrix row per line,
//! comma-separated decimals. JSON uses `{"re": [[..]], "im": [[..]]}`.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Parts {
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let mut re = Vec::with_capacity(self.rows());
        let mut im = Vec::with_capacity(self.rows());
        for i in 0..self.rows() {
            re.push((0..self.cols()).map(|j| self[(i, j)].re).collect());
            im.push((0..self.cols()).map(|j| self[(i, j)].im).collect());
        }
        Parts { re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Parts {
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let parts = Parts::deserialize(deserializer)?;
        if parts.re.len() != parts.im.len() {
            return Err(D::Error::custom("re/im row count mismatch"));
        }
        let rows = parts.re.len();
        let cols = parts.re.first().map_or(0, Vec::len);
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            if parts.re[i].len() != cols || parts.im[i].len() != cols {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for j in 0..cols {
                m[(i, j)] = C64::new(parts.re[i][j], parts.im[i][j]);
            }
        }
        Ok(m)
    }
}

fn write_part_csv(path: &Path, m: &ComplexMatrix, imag: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let v = if imag { m[(i, j)].im } else { m[(i, j)].re };
                format!("{:.12e}", v)
            })
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_part_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let row: Vec<f64> = record
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{s:?} in {}: {e}", path.display())))
            })
            .collect::<Result<_>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Write a matrix as a pair of real/imaginary CSV files.
pub fn write_matrix_csv(m: &ComplexMatrix, re_path: &Path, im_path: &Path) -> Result<()> {
    write_part_csv(re_path, m, false)?;
    write_part_csv(im_path, m, true)
}

/// Read a matrix from a pair of real/imaginary CSV files.
pub fn read_matrix_csv(re_path: &Path, im_path: &Path) -> Result<ComplexMatrix> {
    let re = read_part_csv(re_path)?;
    let im = read_part_csv(im_path)?;
    if re.len() != im.len() {
        return Err(Error::DimensionMismatch(format!(
            "real part has {} rows, imaginary part {}",
            re.len(),
            im.len()
        )));
    }
    let rows = re.len();
    let cols = re.first().map(Vec::len).unwrap_or(0);
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        if re[i].len() != cols || im[i].len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "ragged CSV row {i}: {} / {} columns (expected {cols})",
                re[i].len(),
                im[i].len()
            )));
        }
        for j in 0..cols {
            m[(i, j)] = C64::new(re[i][j], im[i][j]);
        }
    }
    Ok(m)
}

/// Export a 0/1 mask matrix as integer CSV for inspection.
pub fn write_mask_csv(mask: &ComplexMatrix, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    for i in 0..mask.rows() {
        let row: Vec<String> = (0..mask.cols())
            .map(|j| format!("{}", mask[(i, j)].re.round() as i64))
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
