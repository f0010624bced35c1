//! Text, CSV and JSON renderings of estimates, coefficient tables and the
//! discrepancy log.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use unbias_core::discrepancy::Discrepancy;
use unbias_core::{BigRational, EstimateReport, Scalar};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (text, csv, json)"))),
        }
    }
}

/// Scalars that can be shown to users: floats as numbers, rationals as num/den.
pub trait Render: Scalar {
    fn text(&self) -> String;
    fn json(&self) -> Value;
}

impl Render for f64 {
    fn text(&self) -> String {
        format!("{self}")
    }
    fn json(&self) -> Value {
        json!(self)
    }
}

impl Render for BigRational {
    fn text(&self) -> String {
        self.to_string()
    }
    fn json(&self) -> Value {
        Value::String(self.to_string())
    }
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn estimate<S: Render>(functional: &str, r: &EstimateReport<S>, format: Format) -> Result<String, CliError> {
    let exact = S::is_exact();
    Ok(match format {
        Format::Text => {
            let mut s = String::new();
            let sizes: Vec<String> = r.sizes.iter().map(ToString::to_string).collect();
            writeln!(s, "functional: {functional}").unwrap();
            writeln!(s, "estimator: {} (p = {})", r.kind, r.p).unwrap();
            writeln!(s, "sample sizes: {}", sizes.join(", ")).unwrap();
            writeln!(s, "plug-in: {}", r.plug_in.text()).unwrap();
            for (order, c) in &r.corrections {
                writeln!(s, "correction order {order}: {}", c.text()).unwrap();
            }
            writeln!(s, "estimate: {}", r.value.text()).unwrap();
            if exact {
                writeln!(s, "estimate (approx): {}", r.value.to_f64()).unwrap();
            }
            writeln!(s, "terms: {} (evaluated {})", r.term_count, r.terms_evaluated).unwrap();
            s
        }
        Format::Json => {
            let mut v = json!({
                "functional": functional,
                "kind": r.kind.as_str(),
                "p": r.p,
                "sizes": r.sizes,
                "exact": exact,
                "plug_in": r.plug_in.json(),
                "value": r.value.json(),
                "corrections": r.corrections.iter().map(|(o, c)| json!({"order": o, "value": c.json()})).collect::<Vec<_>>(),
                "term_count": r.term_count,
                "terms_evaluated": r.terms_evaluated,
            });
            if exact {
                v["value_approx"] = json!(r.value.to_f64());
            }
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                functional: String,
                kind: &'static str,
                p: usize,
                sizes: String,
                plug_in: String,
                value: String,
                corrections: String,
                term_count: usize,
                terms_evaluated: usize,
            }
            let join = |it: Vec<String>| it.join(";");
            csv_string(&[Row {
                functional: functional.into(),
                kind: r.kind.as_str(),
                p: r.p,
                sizes: join(r.sizes.iter().map(ToString::to_string).collect()),
                plug_in: r.plug_in.text(),
                value: r.value.text(),
                corrections: join(r.corrections.iter().map(|(o, c)| format!("{o}:{}", c.text())).collect()),
                term_count: r.term_count,
                terms_evaluated: r.terms_evaluated,
            }])?
        }
    })
}

/// One coefficient: `d` rows are d_{iπ} (order i), `c` rows the V̂_r weights
/// c(π) (order r), `D` rows the T-series weights D_{αi} (order α, sub i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoeffRow {
    pub table: &'static str,
    pub order: usize,
    pub sub: Option<usize>,
    pub partition: String,
    pub coefficient: String,
}

pub fn coefficients(rows: &[CoeffRow], notes: &[String], format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Text => {
            let mut s = String::new();
            for n in notes {
                writeln!(s, "# {n}").unwrap();
            }
            for r in rows {
                match r.sub {
                    Some(i) => writeln!(s, "{}[{}, {}] = {}", r.table, r.order, i, r.coefficient).unwrap(),
                    None => writeln!(s, "{}{} ({}) = {}", r.table, r.order, r.partition, r.coefficient).unwrap(),
                }
            }
            s
        }
        Format::Csv => csv_string(rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "notes": notes, "rows": rows }))?;
            s.push('\n');
            s
        }
    })
}

#[derive(Serialize)]
struct DiscrepancyRow<'a> {
    topic: &'a str,
    item: &'a str,
    printed: &'a str,
    derived: &'a str,
    resolution: &'a str,
}

pub fn discrepancies(list: &[Discrepancy], format: Format) -> Result<String, CliError> {
    let rows: Vec<DiscrepancyRow> = list
        .iter()
        .map(|d| DiscrepancyRow {
            topic: d.topic,
            item: &d.item,
            printed: &d.printed,
            derived: &d.derived,
            resolution: d.resolution,
        })
        .collect();
    Ok(match format {
        Format::Text => {
            let mut s = String::new();
            for d in &rows {
                writeln!(s, "[{}] {}: printed {} | derived {} ({})", d.topic, d.item, d.printed, d.derived, d.resolution)
                    .unwrap();
            }
            s
        }
        Format::Csv => csv_string(&rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
    })
}
