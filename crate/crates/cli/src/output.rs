use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::{Failure, Format, OutputArgs};

/// A flat record, written as one JSON object or as a header and one CSV row.
pub type Record = Map<String, Value>;

pub fn emit(args: &OutputArgs, default: Format, record: &Record) -> Result<(), Failure> {
    let text = match args.format.unwrap_or(default) {
        Format::Json => serde_json::to_string_pretty(record).expect("record serializes") + "\n",
        Format::Csv => csv_text(&[], &record.keys().cloned().collect::<Vec<_>>(), std::slice::from_ref(record))?,
    };
    write_out(args.out.as_deref(), &text)
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
    }
}

/// `# meta` line from `meta`, then a header and one row per record.
pub fn csv_text(meta: &[(String, String)], columns: &[String], rows: &[Record]) -> Result<String, Failure> {
    let mut out = Vec::new();
    if !meta.is_empty() {
        let fields: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "# meta {}", fields.join(" "))?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let fail = |e: csv::Error| Failure::invalid(format!("csv: {e}"));
        w.write_record(columns).map_err(fail)?;
        for r in rows {
            w.write_record(columns.iter().map(|c| cell(r.get(c)))).map_err(fail)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv is utf-8"))
}
