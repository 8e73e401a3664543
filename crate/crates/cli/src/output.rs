use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use noisyqma::Estimate;
use serde::Serialize;
use serde_json::{json, Value};

use crate::failure::Failure;

pub const SCHEMA: u32 = 1;

/// Everything except `metadata` is a pure function of config and seed.
pub fn envelope<C: Serialize, R: Serialize>(command: &str, seed: u64, config: &C, result: &R) -> Result<Value, Failure> {
    let to_value = |v: serde_json::Result<Value>| v.map_err(|e| Failure::Run(format!("serialising output: {e}")));
    let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(json!({
        "schema": SCHEMA,
        "command": command,
        "seed": seed,
        "config": to_value(serde_json::to_value(config))?,
        "result": to_value(serde_json::to_value(result))?,
        "metadata": {
            "generated_unix": generated,
            "version": env!("CARGO_PKG_VERSION"),
        },
    }))
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

/// Left-aligned columns separated by two spaces, with a rule under the
/// header.
#[derive(Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<S: ToString>(&mut self, cells: &[S]) -> &mut Self {
        self.rows.push(cells.iter().map(ToString::to_string).collect());
        self
    }

    pub fn estimate(&mut self, name: &str, e: &Estimate) -> &mut Self {
        self.row(&[
            name.to_string(),
            format!("{:.4}", e.mean),
            format!("[{:.4}, {:.4}]", e.lower, e.upper),
            format!("{}/{}", e.successes, e.trials),
        ])
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(cols) {
                if i + 1 == cols {
                    s.push_str(c);
                } else {
                    let _ = write!(s, "{c:<w$}  ", w = widths[i]);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_line_up() {
        let mut t = Table::new(&["name", "value"]);
        t.row(&["a", "1"]).row(&["longer", "22"]);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "name    value");
        assert_eq!(lines[2], "a       1");
        assert_eq!(lines[3], "longer  22");
    }

    #[test]
    fn envelope_carries_schema_and_seed() {
        let v = envelope("gap", 9, &json!({}), &json!({"x": 1})).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["seed"], 9);
        assert!(v["metadata"]["generated_unix"].is_u64());
    }
}
