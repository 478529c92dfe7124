//! Shot files: one JSON header line, then `basis<TAB>outcome` per shot.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::basis::{format_outcome, parse_outcome, BasisString, MeasurementRecord};
use super::schedule::ScheduleDescriptor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    n: usize,
    seed: u64,
    schedule: ScheduleDescriptor,
}

/// Append-only list of shots sharing one register size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotStore {
    n_qubits: usize,
    seed: u64,
    schedule: ScheduleDescriptor,
    records: Vec<MeasurementRecord>,
}

impl ShotStore {
    pub fn new(n_qubits: usize, seed: u64, schedule: ScheduleDescriptor) -> Self {
        Self {
            n_qubits,
            seed,
            schedule,
            records: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn schedule(&self) -> &ScheduleDescriptor {
        &self.schedule
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<MeasurementRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, record: MeasurementRecord) -> Result<()> {
        if record.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: record.n_qubits(),
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = MeasurementRecord>) -> Result<()> {
        for r in records {
            self.push(r)?;
        }
        Ok(())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let header = Header {
            n: self.n_qubits,
            seed: self.seed,
            schedule: self.schedule.clone(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for r in &self.records {
            writeln!(w, "{}\t{}", r.basis, format_outcome(r.outcome, self.n_qubits))?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Parse("shot file is empty".into()))??;
        let header: Header = serde_json::from_str(&first)?;
        let mut store = ShotStore::new(header.n, header.seed, header.schedule);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (basis, outcome) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse(format!("line {}: expected basis<TAB>outcome", i + 2)))?;
            let basis: BasisString = basis.parse()?;
            if outcome.len() != header.n {
                return Err(Error::Parse(format!(
                    "line {}: outcome {outcome:?} has {} bits, expected {}",
                    i + 2,
                    outcome.len(),
                    header.n
                )));
            }
            store.push(MeasurementRecord {
                basis,
                outcome: parse_outcome(outcome)?,
            })?;
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}
