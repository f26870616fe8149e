//! Machine-readable output: CSV tables and JSON documents.
//!
//! Every file starts with a header that names the schema and the random
//! seed (when one was used). CSV files carry it as a leading `#` comment
//! line; JSON documents carry it as top-level fields.

use std::io::{self, BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "sisi-report/1";

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: String,
    pub kind: String,
    pub seed: Option<u64>,
    pub data: T,
}

impl<T> Document<T> {
    pub fn new(kind: &str, seed: Option<u64>, data: T) -> Self {
        Document { schema: SCHEMA.to_string(), kind: kind.to_string(), seed, data }
    }
}

pub fn write_json<T: Serialize, W: Write + ?Sized>(out: &mut W, doc: &Document<T>) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc)?;
    writeln!(out)
}

/// Parses a document and checks its schema tag.
pub fn read_json<T: DeserializeOwned>(text: &str) -> Result<Document<T>, String> {
    let doc: Document<T> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.schema != SCHEMA {
        return Err(format!("unexpected schema `{}`", doc.schema));
    }
    Ok(doc)
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub seed: Option<u64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &str, seed: Option<u64>, header: &[&str]) -> Self {
        Table { kind: kind.to_string(), seed, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn comment(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# schema={SCHEMA} kind={} seed={seed}", self.kind)
    }

    pub fn write<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.comment())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    /// Reads a table written by [`Table::write`].
    pub fn read<R: BufRead>(mut input: R) -> Result<Table, String> {
        let mut first = String::new();
        input.read_line(&mut first).map_err(|e| e.to_string())?;
        let mut kind = None;
        let mut seed = None;
        let mut schema = None;
        for field in first.trim().trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("schema", v)) => schema = Some(v.to_string()),
                Some(("kind", v)) => kind = Some(v.to_string()),
                Some(("seed", "none")) => {}
                Some(("seed", v)) => seed = Some(v.parse::<u64>().map_err(|e| e.to_string())?),
                _ => return Err(format!("malformed header field `{field}`")),
            }
        }
        if schema.as_deref() != Some(SCHEMA) {
            return Err("missing or unexpected schema in CSV header".into());
        }
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(|e| e.to_string()))
            .collect::<Result<Vec<Vec<String>>, String>>()?;
        Ok(Table { kind: kind.ok_or("missing kind")?, seed, header, rows })
    }
}
