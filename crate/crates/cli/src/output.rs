//! CSV and JSON emission.
//!
//! JSON output is a single object `{"command", "status", "data"}` described
//! by `schema/output.schema.json`.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// No band applies (e.g. N below the judged range).
    Report,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    command: &'a str,
    status: CheckStatus,
    data: T,
}

pub struct Emitter {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Emitter {
    /// Write `rows` as CSV or `data` wrapped in the JSON envelope.
    pub fn emit<R: Serialize, D: Serialize>(
        &self,
        command: &str,
        status: CheckStatus,
        rows: impl IntoIterator<Item = R>,
        data: D,
    ) -> Result<()> {
        let bytes = match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in rows {
                    w.serialize(row)?;
                }
                w.into_inner().context("flushing CSV")?
            }
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&Envelope { command, status, data })?;
                text.push('\n');
                text.into_bytes()
            }
        };
        match &self.out {
            Some(path) => std::fs::write(path, bytes)
                .with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&bytes)?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}
