//! CSV and JSON writers. CSV files start with a version line and a header;
//! numbers use the shortest decimal form that parses back to the same `f64`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::sweep::Table;
use crate::Format;

pub const CSV_VERSION_LINE: &str = "# spdc-ng v1";

/// One record: JSON object, or a single CSV row with nested objects
/// flattened to `outer_inner` columns. The `units` record is JSON-only.
pub fn write_record<T: Serialize>(w: &mut impl Write, record: &T, format: Format) -> io::Result<()> {
    let value = serde_json::to_value(record).map_err(io::Error::other)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &value).map_err(io::Error::other)?;
            writeln!(w)
        }
        Format::Csv => {
            let mut cells = Vec::new();
            flatten("", &value, &mut cells);
            let (keys, values): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
            writeln!(w, "{CSV_VERSION_LINE}")?;
            writeln!(w, "{}", keys.join(","))?;
            writeln!(w, "{}", values.join(","))
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if prefix.is_empty() && k == "units" {
                    continue;
                }
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}_{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), "NaN".to_string())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write_table(w: &mut impl Write, table: &Table, format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            let rows: Vec<Value> = table.rows.iter().map(|r| json!({ "values": r.values, "error": r.error })).collect();
            let doc = json!({
                "format": CSV_VERSION_LINE.trim_start_matches("# "),
                "columns": table.columns,
                "units": table.units,
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::other)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "{CSV_VERSION_LINE}")?;
            writeln!(w, "{},error", table.columns.join(","))?;
            for row in &table.rows {
                for v in &row.values {
                    write!(w, "{v:?},")?;
                }
                let msg = row.error.as_deref().unwrap_or("");
                writeln!(w, "{}", msg.replace([',', '\n', '\r', '"'], " "))?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::sweep::Row;

    #[test]
    fn csv_table_layout() {
        let table = Table {
            columns: vec!["p".into(), "epr".into()],
            units: BTreeMap::new(),
            rows: vec![
                Row { values: vec![0.1, 1.0 / 3.0], error: None },
                Row { values: vec![0.2, f64::NAN], error: Some("epr: bad, worse".into()) },
            ],
        };
        let mut buf = Vec::new();
        write_table(&mut buf, &table, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# spdc-ng v1\np,epr,error\n0.1,0.3333333333333333,\n0.2,NaN,epr: bad  worse\n");
        let cell: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(cell, 1.0 / 3.0);
    }

    #[test]
    fn record_flattening() {
        #[derive(Serialize)]
        struct Inner {
            a: f64,
            ok: bool,
        }
        #[derive(Serialize)]
        struct Outer {
            x: f64,
            inner: Inner,
            units: BTreeMap<String, String>,
        }
        let rec = Outer { x: 0.5, inner: Inner { a: 2.0, ok: true }, units: BTreeMap::new() };
        let mut buf = Vec::new();
        write_record(&mut buf, &rec, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# spdc-ng v1\nx,inner_a,inner_ok\n0.5,2.0,true\n");
    }
}
