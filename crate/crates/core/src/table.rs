//! CSV result tables with a one-line provenance header.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of a config echo; identifies the inputs of a table.
pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Where a table came from. Rendered as the `#` line above the header row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_digest: String,
    pub engine: String,
    pub label: String,
}

impl Provenance {
    fn line(&self) -> String {
        format!(
            "# qraman {VERSION} table={} engine={} config_sha256={}",
            self.label, self.engine, self.config_digest
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub provenance: Provenance,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(provenance: Provenance, columns: &[&str]) -> Self {
        Self {
            provenance,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Values are written with 12 significant digits; negative zero prints as
    /// zero.
    pub fn to_csv(&self) -> String {
        let mut out = self.provenance.line();
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{:.11e}", v + 0.0)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Reads back what [`ResultTable::to_csv`] writes.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("malformed table: {m}"));
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| bad("empty"))?;
        let fields = head.strip_prefix("# qraman ").ok_or_else(|| bad("no provenance line"))?;
        let get = |key: &str| {
            fields
                .split_whitespace()
                .find_map(|f| f.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("provenance lacks {key}")))
        };
        let provenance = Provenance {
            config_digest: get("config_sha256")?,
            engine: get("engine")?,
            label: get("table")?,
        };
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| bad("no header row"))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                let row: Vec<f64> = l
                    .split(',')
                    .map(|c| c.parse::<f64>().map_err(|_| bad(&format!("bad number '{c}'"))))
                    .collect::<Result<_>>()?;
                if row.len() != columns.len() {
                    return Err(bad("row width differs from header"));
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            provenance,
            columns,
            rows,
        })
    }
}
