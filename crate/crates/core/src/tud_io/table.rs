use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} values for {expected} columns")]
    RowWidth { row: usize, expected: usize, got: usize },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("row {row}, column {column:?}: cannot parse {value:?}")]
    Value { row: usize, column: String, value: String },
}

/// A header plus string rows; the unit of CSV emission.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        CsvTable {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::RowWidth {
                row: self.rows.len(),
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| TableError::MissingColumn(name.to_string()))
    }

    /// Parses every value of `name` as `T`.
    pub fn parse_column<T: std::str::FromStr>(&self, name: &str) -> Result<Vec<T>, TableError> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r[idx].parse().map_err(|_| TableError::Value {
                    row,
                    column: name.to_string(),
                    value: r[idx].clone(),
                })
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = writer(Vec::new());
        // Writing into a Vec<u8> cannot fail.
        w.write_record(&self.columns).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 input")
    }

    pub fn write(&self, path: &Path) -> Result<(), TableError> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| TableError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self, TableError> {
        let csv_err = |source| TableError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(csv_err)?;
        let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(csv_err)?;
        Ok(CsvTable { columns, rows })
    }
}

fn writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes `rows` under the header `schema` as UTF-8 CSV with `\n` endings.
pub fn write_csv<S: AsRef<str>>(rows: &[Vec<String>], schema: &[S], path: &Path) -> Result<(), TableError> {
    let mut table = CsvTable::new(schema);
    for r in rows {
        table.push(r.clone())?;
    }
    table.write(path)
}

/// Shortest round-trip decimal form, so emitted values parse back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
