//! Atomic file emission and the CSV layouts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use quasiopt::selection::{EfficiencyHistogram, Method, SelectionReport};
use serde::Serialize;

use crate::error::CliError;

pub const REPLICATION_HEADER: [&str; 6] = [
    "replication",
    "method",
    "chosen_n",
    "oracle_n",
    "efficiency",
    "failed_flag",
];

/// Collects files for one output directory; each write goes to a temporary
/// sibling first and is renamed into place.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp-{}", std::process::id()));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::io(target, e));
        }
        log::info!("wrote {}", target.display());
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

/// A replication's outcome: its report, or the failure message.
pub type Outcome<'a> = (usize, Option<&'a SelectionReport>);

/// Per-replication CSV: one row per method; failed replications carry
/// empty fields and `failed_flag = 1`.
pub fn replications_csv<'a>(outcomes: impl IntoIterator<Item = Outcome<'a>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(REPLICATION_HEADER).map_err(err)?;
    for (i, report) in outcomes {
        for m in Method::ALL {
            let row = match report {
                Some(r) => [
                    i.to_string(),
                    m.name().to_string(),
                    r.chosen(m).to_string(),
                    r.n_oracle.to_string(),
                    r.efficiency.get(m).to_string(),
                    "0".to_string(),
                ],
                None => [
                    i.to_string(),
                    m.name().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "1".to_string(),
                ],
            };
            w.write_record(&row).map_err(err)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Writes `histogram_<method>.csv` for every method.
pub fn write_histograms(out: &mut OutputDir, hist: &[(Method, EfficiencyHistogram)]) -> Result<(), CliError> {
    for (m, h) in hist {
        out.write(&format!("histogram_{}.csv", m.name()), h.to_csv().as_bytes())?;
    }
    Ok(())
}
