//! Sampled observable traces and their CSV form.

use std::io::{self, Write};

use serde::Serialize;

/// Time grid plus named real-valued columns and ordered metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    metadata: Vec<(String, String)>,
}

pub(crate) fn to_compact_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

impl TimeSeries {
    pub fn new(names: impl IntoIterator<Item = String>) -> Self {
        let names: Vec<String> = names.into_iter().collect();
        let columns = vec![Vec::new(); names.len()];
        Self {
            names,
            columns,
            ..Self::default()
        }
    }

    /// Builds a series from whole columns; all must match `times` in length.
    pub fn from_columns(times: Vec<f64>, columns: Vec<(String, Vec<f64>)>) -> Self {
        for (name, col) in &columns {
            assert_eq!(col.len(), times.len(), "column `{name}` has the wrong length");
        }
        let (names, columns) = columns.into_iter().unzip();
        Self {
            times,
            names,
            columns,
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: &[f64]) {
        assert_eq!(values.len(), self.names.len());
        self.times.push(t);
        for (col, &v) in self.columns.iter_mut().zip(values) {
            col.push(v);
        }
    }

    /// Insert or replace a metadata entry, keeping first-insertion order.
    pub fn set_meta(&mut self, key: &str, value: &str) {
        let value = value.replace('\n', " ");
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    /// `# key: value` header lines, then `time_ns,<columns>` and one row
    /// per sample with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        write!(w, "time_ns")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(w, "{}", format_float(*t))?;
            for col in &self.columns {
                write!(w, ",{}", format_float(col[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Decimal scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
