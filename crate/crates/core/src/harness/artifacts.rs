//! Writing and reading experiment artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::runtime::MeasurementRow;

pub const MEASUREMENTS_CSV: &str = "measurements.csv";
pub const REPORT_JSON: &str = "report.json";
pub const CERTIFICATE_JSON: &str = "certificate.json";
pub const SUMMARY_MD: &str = "summary.md";
pub const FAILURE_JSON: &str = "failure.json";
pub const RUN_LOG: &str = "run.log";

const CSV_HEADER: [&str; 7] = [
    "acceptor",
    "inputId",
    "outcome",
    "steps",
    "maxPosRead",
    "internalOps",
    "inputLength",
];

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// The invariant an experiment found violated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Failure {
    pub experiment: String,
    pub invariant: String,
    pub detail: String,
}

pub struct ArtifactDir {
    dir: PathBuf,
}

impl ArtifactDir {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ArtifactDir { dir: dir.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn io(&self, name: &str) -> impl FnOnce(io::Error) -> ArtifactError {
        let path = self.path(name);
        move |source| ArtifactError::Io { path, source }
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, ArtifactError> {
        let path = self.path(name);
        fs::write(&path, text).map_err(self.io(name))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, ArtifactError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|source| ArtifactError::Json {
            path: self.path(name),
            source,
        })?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_measurements(&self, rows: &[MeasurementRow]) -> Result<PathBuf, ArtifactError> {
        write_measurements_to(&self.path(MEASUREMENTS_CSV), rows)
    }

    /// Appends a timestamped line to the sidecar log.
    pub fn log(&self, line: &str) -> Result<(), ArtifactError> {
        use io::Write;
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.path(RUN_LOG))
            .map_err(self.io(RUN_LOG))?;
        writeln!(f, "{secs} {line}").map_err(self.io(RUN_LOG))
    }

    /// Removes artifacts left by an earlier run.
    pub fn clear(&self) -> Result<(), ArtifactError> {
        for name in [MEASUREMENTS_CSV, REPORT_JSON, CERTIFICATE_JSON, SUMMARY_MD, FAILURE_JSON, RUN_LOG, "levin.csv"] {
            match fs::remove_file(self.path(name)) {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                Err(e) => return Err(self.io(name)(e)),
            }
        }
        Ok(())
    }
}

pub fn write_measurements_to(path: &Path, rows: &[MeasurementRow]) -> Result<PathBuf, ArtifactError> {
    let err = |source| ArtifactError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

pub fn read_measurements(path: &Path) -> Result<Vec<MeasurementRow>, ArtifactError> {
    let err = |source| ArtifactError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().collect::<Result<_, _>>().map_err(err)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ArtifactError> {
    let text = fs::read_to_string(path).map_err(|source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ArtifactError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::Outcome;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            MeasurementRow {
                acceptor: "a".into(),
                input_id: "x:1".into(),
                outcome: Outcome::Accept,
                steps: 12,
                max_pos_read: Some(10),
                internal_ops: 12,
                input_length: 11,
            },
            MeasurementRow {
                acceptor: "b".into(),
                input_id: "x,2".into(),
                outcome: Outcome::BudgetFlag,
                steps: 1,
                max_pos_read: None,
                internal_ops: 1,
                input_length: 0,
            },
        ];
        let path = dir.path().join("m.csv");
        write_measurements_to(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("acceptor,inputId,outcome,steps,maxPosRead,internalOps,inputLength\n"));
        assert!(text.contains("a,x:1,Accept,12,10,12,11\n"));
        assert_eq!(read_measurements(&path).unwrap(), rows);
        write_measurements_to(&path, &[]).unwrap();
        assert!(read_measurements(&path).unwrap().is_empty());
    }
}
