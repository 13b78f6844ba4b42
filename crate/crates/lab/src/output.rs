use std::fs;
use std::path::Path;

use crate::error::LabError;
use crate::experiment::{Outcome, Table};

pub fn write_table(dir: &Path, table: &Table) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(dir.join(&table.name)).map_err(csv_err)?;
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e))
}

/// `report.json` plus every table.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<(), LabError> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(&outcome.report).map_err(std::io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    for t in &outcome.tables {
        write_table(dir, t)?;
    }
    Ok(())
}
