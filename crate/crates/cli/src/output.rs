use std::io::Write;

use clap::ValueEnum;
use mrec_core::Error;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Result of a subcommand: flat rows (CSV by default) or nested records
/// (JSON lines only).
pub enum Output {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>> },
    Records(Vec<Value>),
}

impl Output {
    pub fn table(columns: &[&'static str]) -> Output {
        Output::Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn record(v: Value) -> Output {
        Output::Records(vec![v])
    }

    pub fn push(&mut self, row: Vec<Value>) {
        match self {
            Output::Table { columns, rows } => {
                debug_assert_eq!(row.len(), columns.len());
                rows.push(row);
            }
            Output::Records(_) => panic!("push on a record output"),
        }
    }

    pub fn render(&self, format: Option<Format>) -> Result<String, Error> {
        match (self, format) {
            (Output::Table { columns, rows }, None | Some(Format::Csv)) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::InvalidInput(format!("csv output: {e}"));
                w.write_record(columns).map_err(io)?;
                for row in rows {
                    w.write_record(row.iter().map(cell)).map_err(io)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::InvalidInput(format!("csv output: {e}")))?;
                Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
            }
            (Output::Table { columns, rows }, Some(Format::Jsonl)) => {
                let mut out = String::new();
                for row in rows {
                    let obj: Map<String, Value> = columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(row.iter().cloned())
                        .collect();
                    out.push_str(&Value::Object(obj).to_string());
                    out.push('\n');
                }
                Ok(out)
            }
            (Output::Records(recs), None | Some(Format::Jsonl)) => {
                let mut out = String::new();
                for r in recs {
                    out.push_str(&r.to_string());
                    out.push('\n');
                }
                Ok(out)
            }
            (Output::Records(_), Some(Format::Csv)) => Err(Error::Unsupported(
                "this subcommand emits nested records; use --format jsonl".into(),
            )),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write(text: &str, path: Option<&std::path::Path>) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(io)?;
            lock.flush().map_err(io)
        }
    }
}
