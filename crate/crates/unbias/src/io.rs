//! CSV ingestion: one file per sample, a header row, numeric rows.

use std::path::Path;

use unbias_core::{BigInt, BigRational, Sample, Scalar};

use crate::error::CliError;

/// Parses a decimal literal such as `-12.5e-3` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut num: BigInt = format!("{int}{frac}").parse().ok()?;
    if neg {
        num = -num;
    }
    let shift = exp - i32::try_from(frac.len()).ok()?;
    let ten = BigInt::from(10);
    let pow = ten.pow(shift.unsigned_abs());
    Some(if shift >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

/// Raw cells of a headed CSV file.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let shown = path.display().to_string();
    let perr = |msg: String| CliError::Parse { path: shown.clone(), msg };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path).map_err(|e| {
        match e.kind() {
            csv::ErrorKind::Io(_) => perr(format!("cannot read: {e}")),
            _ => perr(e.to_string()),
        }
    })?;
    let header: Vec<String> = rdr.headers().map_err(|e| perr(e.to_string()))?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(perr("missing header row".into()));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| perr(e.to_string()))?;
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(perr("no data rows".into()));
    }
    Ok(Table { header, rows })
}

/// Reads one sample. Cells are parsed as exact decimals and converted, so the
/// rational path sees the literal value and the float path the nearest double.
pub fn read_sample<S: Scalar>(path: &Path) -> Result<Sample<S>, CliError> {
    let table = read_table(path)?;
    let shown = path.display().to_string();
    let dim = table.header.len();
    let mut data = Vec::with_capacity(table.rows.len() * dim);
    for (i, row) in table.rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let v = if S::is_exact() {
                parse_decimal(cell).map(|r| S::from_ratio(&r))
            } else {
                cell.parse::<f64>().ok().filter(|v| v.is_finite()).and_then(S::from_f64)
            };
            let v = v.ok_or_else(|| CliError::Parse {
                path: shown.clone(),
                msg: format!("row {}, column '{}': '{cell}' is not a number", i + 2, table.header[j]),
            })?;
            data.push(v);
        }
    }
    Ok(Sample::new(dim, data)?)
}
