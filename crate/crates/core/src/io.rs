//! Plain numeric CSV and JSON files.
//!
//! Numbers are written with 17 significant digits, enough for every `f64` to
//! read back bit-identical.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::ProbeGrid;
use crate::spectral::ComplexSpectrum;

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::File {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let file = fs::File::create(path).map_err(file_error(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", header.join(",")).map_err(file_error(path))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Parse {
                what: path.display().to_string(),
                message: format!("row has {} fields, header has {}", row.len(), header.len()),
            });
        }
        let line: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        writeln!(out, "{}", line.join(",")).map_err(file_error(path))?;
    }
    out.flush().map_err(file_error(path))?;
    Ok(())
}

/// Header and rows of a numeric CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(file_error(path))?;
    parse_csv(&text).map_err(|message| Error::Parse {
        what: path.display().to_string(),
        message,
    })
}

fn parse_csv(text: &str) -> std::result::Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines
        .enumerate()
        .map(|(n, line)| {
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2)))
                .collect::<std::result::Result<Vec<f64>, String>>()?;
            if row.len() != header.len() {
                return Err(format!("line {}: {} fields, header has {}", n + 2, row.len(), header.len()));
            }
            Ok(row)
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok((header, rows))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(file_error(path))
}

const SPECTRUM_SUFFIXES: [&str; 5] = ["re", "im", "magnitude", "excitation", "phase_unwrapped_rad"];

/// Columns `probe_mhz`, then for each mode `re, im, magnitude, excitation,
/// phase_unwrapped_rad`, prefixed with the mode label.
pub fn write_spectrum_csv(path: &Path, spectrum: &ComplexSpectrum) -> Result<()> {
    let mut header = vec!["probe_mhz".to_string()];
    for label in spectrum.labels() {
        header.extend(SPECTRUM_SUFFIXES.iter().map(|s| format!("{label}_{s}")));
    }
    let modes = spectrum.labels().len();
    let phases: Vec<Vec<f64>> = (0..modes).map(|m| spectrum.phase_unwrapped(m)).collect();
    let probes = spectrum.probes();
    let rows = probes.iter().enumerate().map(|(i, &probe)| {
        let mut row = vec![probe];
        for (m, phase) in phases.iter().enumerate() {
            let a = spectrum.amplitudes(m)[i];
            row.extend([a.re, a.im, a.norm(), a.norm_sqr(), phase[i]]);
        }
        row
    });
    write_csv(path, &header, rows)
}

pub fn read_spectrum_csv(path: &Path) -> Result<ComplexSpectrum> {
    let (header, rows) = read_csv(path)?;
    let bad = |message: String| Error::Parse {
        what: path.display().to_string(),
        message,
    };
    if header.first().map(String::as_str) != Some("probe_mhz") || (header.len() - 1) % SPECTRUM_SUFFIXES.len() != 0 {
        return Err(bad("not a spectrum file".into()));
    }
    let labels: Vec<String> = header[1..]
        .chunks(SPECTRUM_SUFFIXES.len())
        .map(|cols| {
            cols[0]
                .strip_suffix("_re")
                .map(str::to_string)
                .ok_or_else(|| bad(format!("expected a `_re` column, found `{}`", cols[0])))
        })
        .collect::<Result<_>>()?;
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return Err(bad("no data rows".into()));
    };
    let grid = ProbeGrid::new(first[0], last[0], rows.len())?;
    let amplitudes = (0..labels.len())
        .map(|m| {
            let col = 1 + m * SPECTRUM_SUFFIXES.len();
            rows.iter().map(|r| Complex64::new(r[col], r[col + 1])).collect()
        })
        .collect();
    ComplexSpectrum::new(grid, labels, amplitudes)
}
