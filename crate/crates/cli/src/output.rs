//! Output artifacts: 17-significant-digit float serialization, CSV writers,
//! and the run summary (results as comments above a re-parseable config echo).

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

/// Serialize a float with 17 significant digits; parsing the text recovers
/// the exact double.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// One stage's wall time plus the artifacts a command produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub command: &'static str,
    pub results: Vec<(String, String)>,
    pub wall_times: Vec<(&'static str, f64)>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn new(command: &'static str) -> Self {
        RunSummary { command, ..Default::default() }
    }

    pub fn result(&mut self, key: &str, value: String) {
        self.results.push((key.to_string(), value));
    }

    pub fn timing(&mut self, stage: &'static str, seconds: f64) {
        self.wall_times.push((stage, seconds));
    }

    pub fn file(&mut self, path: &Path) {
        self.files.push(path.to_path_buf());
    }

    /// Write `summary.txt`: every result line is a `#` comment, followed by
    /// the canonical config echo, so the whole file parses as a config.
    pub fn write(&self, cfg: &RunConfig) -> Result<PathBuf, CliError> {
        let path = cfg.out.join("summary.txt");
        let mut text = String::new();
        text.push_str(&format!("# thermavg {} summary\n", self.command));
        for (key, value) in &self.results {
            text.push_str(&format!("# {key} = {value}\n"));
        }
        for (stage, secs) in &self.wall_times {
            text.push_str(&format!("# wall_seconds.{stage} = {secs:.3}\n"));
        }
        for file in &self.files {
            text.push_str(&format!("# file = {}\n", file.display()));
        }
        text.push_str("# configuration echo (reusable with --config):\n");
        text.push_str(&cfg.echo());
        write_file(&path, &text)?;
        Ok(path)
    }
}

/// Render rows as CSV with a header; `None` cells are left empty.
pub fn csv_text(header: &str, rows: &[Vec<Option<String>>]) -> String {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.clone().unwrap_or_default()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}
