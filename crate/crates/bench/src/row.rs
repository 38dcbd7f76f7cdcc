use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::BenchError;

/// First line of every results file.
pub const SCHEMA_LINE: &str = "schema=run_row.v1";

const HEADER: &str = "axis,axis_value,algorithm,seed,revenue,revenue_scaled,matched_tasks,total_tasks,rounds,moves,\
nash_certified,wall_millis,mean_extra_cost_subsidy,served_task_ratio,worker_revenue_spread,status";

/// One solver run. Money columns are in units unless suffixed `_scaled`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub axis: String,
    pub axis_value: String,
    pub algorithm: String,
    pub seed: u64,
    /// Exact decimal rendering of `revenue_scaled`.
    pub revenue: String,
    pub revenue_scaled: i64,
    pub matched_tasks: usize,
    pub total_tasks: usize,
    pub rounds: u64,
    pub moves: u64,
    pub nash_certified: Option<bool>,
    pub wall_millis: f64,
    /// Mean `beta * extra_cost` over assigned workers.
    pub mean_extra_cost_subsidy: f64,
    /// Matched over total tasks, 0 when there are no tasks.
    pub served_task_ratio: f64,
    /// Max minus min revenue over assigned workers.
    pub worker_revenue_spread: f64,
    /// `ok`, `oracle_overflow`, `oracle_timeout` or `error: ...`.
    pub status: String,
}

impl RunRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Appends rows to a results stream, flushing after each one.
pub struct RowWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RowWriter<W> {
    /// Writes the schema line and header, then returns the writer.
    pub fn new(mut out: W) -> Result<Self, BenchError> {
        writeln!(out, "{SCHEMA_LINE}\n{HEADER}").map_err(csv::Error::from)?;
        Ok(Self::headerless(out))
    }

    fn headerless(out: W) -> Self {
        RowWriter {
            inner: csv::WriterBuilder::new().has_headers(false).from_writer(out),
        }
    }

    pub fn write(&mut self, row: &RunRow) -> Result<(), BenchError> {
        self.inner.serialize(row)?;
        self.inner.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

impl RowWriter<File> {
    /// Opens `path` for appending. A new or empty file gets the schema line
    /// and header; an existing file must carry the same ones.
    pub fn append(path: &Path) -> Result<Self, BenchError> {
        let file_err = |source| BenchError::File {
            path: path.to_path_buf(),
            source,
        };
        let mut file = OpenOptions::new().create(true).read(true).append(true).open(path).map_err(file_err)?;
        let mut head = String::new();
        (&mut file).take(SCHEMA_LINE.len() as u64 + HEADER.len() as u64 + 2).read_to_string(&mut head).map_err(file_err)?;
        if head.is_empty() {
            return Self::new(file);
        }
        let mut lines = head.lines();
        if lines.next() != Some(SCHEMA_LINE) || lines.next() != Some(HEADER) {
            return Err(BenchError::Usage(format!(
                "{} exists but is not a {SCHEMA_LINE} results file",
                path.display()
            )));
        }
        Ok(Self::headerless(file))
    }
}

/// Reads a results file written by [`RowWriter`].
pub fn read_rows(path: &Path) -> Result<Vec<RunRow>, BenchError> {
    let file = File::open(path).map_err(|source| BenchError::File {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(csv::Error::from)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(BenchError::Usage(format!("{} lacks the `{SCHEMA_LINE}` line", path.display())));
    }
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
