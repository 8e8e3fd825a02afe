//! Report envelope, CSV flattening, and atomic writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;

/// What a command hands back to `main`.
pub struct Outcome {
    pub pass: bool,
    pub parameters: Value,
    pub result: Value,
    /// One flat object per CSV row.
    pub rows: Vec<Value>,
    /// One-line human summary for stderr.
    pub summary: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: String,
    tool_version: &'static str,
    command: &'a str,
    generated_at: Option<String>,
    pass: bool,
    parameters: &'a Value,
    result: &'a Value,
}

pub fn timestamp() -> String {
    time::OffsetDateTime::now_utc()
        .replace_nanosecond(0)
        .unwrap()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap()
}

pub fn render(command: &str, outcome: &Outcome, format: Format, generated_at: Option<String>) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let env = Envelope {
                schema: format!("schemas/{command}.schema.json"),
                tool_version: env!("CARGO_PKG_VERSION"),
                command,
                generated_at,
                pass: outcome.pass,
                parameters: &outcome.parameters,
                result: &outcome.result,
            };
            let mut out = serde_json::to_vec_pretty(&env).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => to_csv(&outcome.rows),
    }
}

/// Nested objects become dotted column names; arrays are written as JSON
/// text; `null` is an empty field.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        _ => out.push((prefix.to_string(), v.to_string())),
    }
}

pub fn to_csv(rows: &[Value]) -> Result<Vec<u8>, String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        let keys: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
        match &header {
            None => {
                w.write_record(&keys).map_err(|e| e.to_string())?;
                header = Some(keys);
            }
            Some(h) if *h != keys => return Err(format!("CSV rows disagree on columns: {h:?} vs {keys:?}")),
            Some(_) => {}
        }
        w.write_record(cells.iter().map(|(_, v)| v)).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Fails early when the report could not be written.
pub fn check_writable(path: &Path) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(format!("output directory {} does not exist", dir.display()));
    }
    if path.is_dir() {
        return Err(format!("output path {} is a directory", path.display()));
    }
    tempfile::NamedTempFile::new_in(dir)
        .map(drop)
        .map_err(|e| format!("output directory {} is not writable: {e}", dir.display()))
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
