//! CSV and JSON serialisation. CSV floats use 17 significant digits in
//! scientific notation so files round-trip exactly and compare byte for
//! byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::scenario::{Artifact, Metadata, Table};

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(writer: W, table: &Table) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(table.columns())?;
    for row in table.rows() {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Columns as name → array, in table order.
struct Columns<'a>(&'a Table);

impl Serialize for Columns<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let table = self.0;
        let mut map = serializer.serialize_map(Some(table.columns().len()))?;
        for (idx, name) in table.columns().iter().enumerate() {
            let values: Vec<f64> = table.rows().iter().map(|r| r[idx]).collect();
            map.serialize_entry(name, &values)?;
        }
        map.end()
    }
}

#[derive(serde::Serialize)]
struct JsonDocument<'a> {
    metadata: &'a Metadata,
    columns: Columns<'a>,
}

pub fn write_json<W: Write>(writer: W, table: &Table, metadata: &Metadata) -> serde_json::Result<()> {
    let doc = JsonDocument { metadata, columns: Columns(table) };
    serde_json::to_writer_pretty(writer, &doc)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn write_artifact(artifact: &Artifact, metadata: &Metadata, format: OutputFormat) -> Result<(), CliError> {
    let path = artifact.path.as_path();
    let mut writer = create(path)?;
    let as_io = |e: std::io::Error| CliError::io(path, e);
    match format {
        OutputFormat::Csv => write_csv(&mut writer, &artifact.table).map_err(|e| as_io(e.into()))?,
        OutputFormat::Json => {
            write_json(&mut writer, &artifact.table, metadata).map_err(|e| as_io(e.into()))?;
            writer.write_all(b"\n").map_err(as_io)?;
        }
    }
    writer.flush().map_err(as_io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.5, 1.0 / 3.0, -2.5e-17, std::f64::consts::PI, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let table = Table::new(vec!["tau", "zeta"], vec![vec![0.0, 0.5], vec![1.0, 0.25]]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &table).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "tau,zeta\n0.0000000000000000e0,5.0000000000000000e-1\n1.0000000000000000e0,2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn json_columns_keep_order() {
        let table = Table::new(vec!["tau", "b", "a"], vec![vec![0.0, 1.0, 2.0]]);
        let json = serde_json::to_string(&Columns(&table)).unwrap();
        assert_eq!(json, r#"{"tau":[0.0],"b":[1.0],"a":[2.0]}"#);
    }
}
