//! `key = value` reports. Numbers use scientific notation with nine
//! significant digits; the resolved configuration is embedded under `config.`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::config::RunConfig;

pub const TOOL_NAME: &str = "vdwgrat";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const CONFIG_PREFIX: &str = "config.";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    /// Starts a report for `command`, recording tool name and version.
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.text("tool", TOOL_NAME);
        r.text("version", TOOL_VERSION);
        r.text("command", command);
        r
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.lines.push((key.to_string(), value.into()));
        self
    }

    pub fn number(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, format_number(value))
    }

    pub fn integer(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.text(key, value.to_string())
    }

    /// Appends every line of the resolved configuration under `config.`.
    pub fn config(&mut self, cfg: &RunConfig) -> &mut Self {
        for line in cfg.to_text().lines() {
            if let Some((k, v)) = line.split_once(" = ") {
                self.lines
                    .push((format!("{CONFIG_PREFIX}{k}"), v.to_string()));
            }
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// Parses rendered report text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let (k, v) = raw.split_once(" = ").ok_or_else(|| Error::Parse {
                line: i + 1,
                key: raw.to_string(),
                message: "expected `key = value`".into(),
            })?;
            lines.push((k.to_string(), v.to_string()));
        }
        Ok(Self { lines })
    }

    /// The embedded configuration as a config document.
    pub fn embedded_config(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            if let Some(key) = k.strip_prefix(CONFIG_PREFIX) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }
}

/// Nine significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.8e}")
}
