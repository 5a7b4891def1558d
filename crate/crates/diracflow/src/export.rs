//! CSV/JSON artifact writers. Floats are written with Rust's shortest
//! round-trip formatting, so identical numbers always serialize to
//! identical bytes and runs with the same seed produce byte-identical
//! artifacts.

use crate::error::Result;
use crate::trajectory::{Trajectory, TrajectoryStatus};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

/// One CSV table: a header row and float-formatted data rows.
pub struct CsvTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_string(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}

/// Corpuscle trajectory CSV: one row per (step, slot) with the slot's
/// position and the guidance density at the step's joint configuration.
pub fn trajectory_table(trajectory: &Trajectory) -> CsvTable {
    let mut table = CsvTable::new(&["t", "slot", "x1", "x2", "x3", "j0"]);
    for step in &trajectory.steps {
        for slot in 0..step.config.n_slots() {
            let x = step.config.slot(slot);
            table.push(vec![step.t, slot as f64, x[0], x[1], x[2], step.j0[slot]]);
        }
    }
    table
}

pub fn status_label(status: &TrajectoryStatus) -> String {
    match status {
        TrajectoryStatus::Completed => "completed".into(),
        TrajectoryStatus::NodeRegion { t, .. } => format!("node-region at t={t}"),
        TrajectoryStatus::StepUnderflow { t } => format!("step-underflow at t={t}"),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_floats_exactly() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec![0.1 + 0.2, 1.0 / 3.0]);
        let text = t.to_string();
        let line = text.lines().nth(1).unwrap();
        let parsed: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed[0], 0.1 + 0.2);
        assert_eq!(parsed[1], 1.0 / 3.0);
    }
}
