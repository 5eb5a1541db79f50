//! Machine-readable output records for the CLI: CSV and JSON-lines.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a record's value measures. Probability-like quantities are emitted
/// in a log domain (the record's `extra["log"]` names the base); relative
/// errors are plain numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "exact-P")]
    ExactP,
    #[serde(rename = "exact-R")]
    ExactR,
    #[serde(rename = "asym-P")]
    AsymP,
    #[serde(rename = "asym-R")]
    AsymR,
    #[serde(rename = "mc-mean")]
    McMean,
    #[serde(rename = "mc-sigma")]
    McSigma,
    #[serde(rename = "rel-err")]
    RelErr,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quantity::ExactP => "exact-P",
            Quantity::ExactR => "exact-R",
            Quantity::AsymP => "asym-P",
            Quantity::AsymR => "asym-R",
            Quantity::McMean => "mc-mean",
            Quantity::McSigma => "mc-sigma",
            Quantity::RelErr => "rel-err",
        };
        f.write_str(s)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact-P" => Quantity::ExactP,
            "exact-R" => Quantity::ExactR,
            "asym-P" => Quantity::AsymP,
            "asym-R" => Quantity::AsymR,
            "mc-mean" => Quantity::McMean,
            "mc-sigma" => Quantity::McSigma,
            "rel-err" => Quantity::RelErr,
            other => {
                return Err(Error::InvalidArgument(format!("unknown quantity {other:?}")))
            }
        })
    }
}

/// One data point: parameters, a tagged quantity, and its value, plus
/// free-form metadata (sample counts, seeds, discard counts, log base).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub n: u64,
    pub m: u64,
    pub k: f64,
    pub t: f64,
    pub quantity: Quantity,
    pub value: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(n: u64, m: u64, t: f64, quantity: Quantity, value: f64) -> Self {
        Self {
            n,
            m,
            k: m as f64 / n as f64,
            t,
            quantity,
            value,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.insert(key.to_string(), value.to_string());
        self
    }
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "n,m,k,t,quantity,value,extra";

fn extra_to_field(extra: &BTreeMap<String, String>) -> String {
    extra
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn extra_from_field(field: &str) -> Result<BTreeMap<String, String>> {
    let mut extra = BTreeMap::new();
    if field.is_empty() {
        return Ok(extra);
    }
    for pair in field.split(';') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("bad extra field {pair:?}")))?;
        extra.insert(k.to_string(), v.to_string());
    }
    Ok(extra)
}

/// One CSV line per record; '.' decimal separator, no locale, no quoting
/// (no field can contain a comma).
pub fn to_csv_line(record: &OutputRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        record.n,
        record.m,
        record.k,
        record.t,
        record.quantity,
        record.value,
        extra_to_field(&record.extra)
    )
}

pub fn from_csv_line(line: &str) -> Result<OutputRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 7 {
        return Err(Error::InvalidArgument(format!(
            "expected 7 CSV fields, got {} in {line:?}",
            fields.len()
        )));
    }
    let parse_f = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
    };
    let parse_u = |s: &str| -> Result<u64> {
        s.parse()
            .map_err(|e| Error::InvalidArgument(format!("bad count {s:?}: {e}")))
    };
    Ok(OutputRecord {
        n: parse_u(fields[0])?,
        m: parse_u(fields[1])?,
        k: parse_f(fields[2])?,
        t: parse_f(fields[3])?,
        quantity: fields[4].parse()?,
        value: parse_f(fields[5])?,
        extra: extra_from_field(fields[6])?,
    })
}

pub fn to_json_line(record: &OutputRecord) -> String {
    serde_json::to_string(record).expect("record serializes")
}

pub fn from_json_line(line: &str) -> Result<OutputRecord> {
    serde_json::from_str(line).map_err(|e| Error::InvalidArgument(format!("bad JSON line: {e}")))
}

/// Render a record stream in the chosen format, CSV header included.
pub fn render(records: &[OutputRecord], format: Format) -> String {
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str(CSV_HEADER);
        out.push('\n');
    }
    for r in records {
        out.push_str(&match format {
            Format::Csv => to_csv_line(r),
            Format::JsonLines => to_json_line(r),
        });
        out.push('\n');
    }
    out
}

/// Parse output produced by [`render`].
pub fn parse(text: &str, format: Format) -> Result<Vec<OutputRecord>> {
    text.lines()
        .filter(|l| !l.is_empty() && *l != CSV_HEADER)
        .map(|l| match format {
            Format::Csv => from_csv_line(l),
            Format::JsonLines => from_json_line(l),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> OutputRecord {
        OutputRecord::new(2, 4, 1.0, Quantity::McMean, 0.09981)
            .with_extra("S", 40000)
            .with_extra("seed", 7)
            .with_extra("subEnsembles", 200)
            .with_extra("discarded", 0)
    }

    #[test]
    fn csv_round_trip() {
        let r = sample_record();
        assert_eq!(from_csv_line(&to_csv_line(&r)).unwrap(), r);
    }

    #[test]
    fn json_round_trip() {
        let r = sample_record();
        assert_eq!(from_json_line(&to_json_line(&r)).unwrap(), r);
    }

    #[test]
    fn render_parse_round_trip() {
        let records = vec![
            sample_record(),
            OutputRecord::new(3, 6, 0.5, Quantity::ExactP, -2.1),
        ];
        for format in [Format::Csv, Format::JsonLines] {
            assert_eq!(parse(&render(&records, format), format).unwrap(), records);
        }
    }

    #[test]
    fn k_is_m_over_n() {
        let r = OutputRecord::new(3, 6, 1.0, Quantity::ExactP, -1.0);
        assert_eq!(r.k, 2.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(from_csv_line("1,2,3").is_err());
        assert!(from_csv_line("1,2,2.0,1.0,bogus,0.1,").is_err());
        assert!(from_json_line("{").is_err());
    }
}
