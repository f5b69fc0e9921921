//! CSV persistence of run records.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::RunRecord;
use crate::error::Result;

pub const CSV_HEADER: [&str; 11] = [
    "experiment", "M", "si_db", "realization", "method", "sum_mse", "sum_se_bits", "iterations", "converged",
    "wall_ms", "seed",
];

fn row(r: &RunRecord) -> [String; 11] {
    [
        r.experiment.to_string(),
        r.num_antennas.to_string(),
        r.si_db.to_string(),
        r.realization_index.to_string(),
        r.method.to_string(),
        format!("{:e}", r.sum_mse),
        format!("{:e}", r.sum_se),
        r.iterations_used.to_string(),
        r.converged.to_string(),
        format!("{:.3}", r.wall_time_ms),
        r.seed_used.to_string(),
    ]
}

/// Streaming writer; the header is written on creation and each record is
/// flushed as it arrives.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl RecordWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(CSV_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &RunRecord) -> Result<()> {
        self.inner.write_record(row(r))?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Writes all records to `w` in the given order.
pub fn write_records<W: Write>(w: W, records: &[RunRecord]) -> Result<W> {
    let mut out = RecordWriter::new(w)?;
    for r in records {
        out.write(r)?;
    }
    out.finish()
}
