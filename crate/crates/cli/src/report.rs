use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

// keys whose values are operation tables
const GRID_KEYS: &[&str] = &["table", "op", "base_op"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// Output of every subcommand. `--format json` prints it verbatim,
/// `--format text` renders the same fields for reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Value) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            outputs: Value::Null,
            checks: Vec::new(),
            seed: None,
            elapsed_ms: 0,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            pass,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        render_section(&mut out, "inputs", &self.inputs);
        render_section(&mut out, "outputs", &self.outputs);
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                writeln!(out, "  [{mark}] {}", c.name).unwrap();
            }
        }
        if let Some(seed) = self.seed {
            writeln!(out, "seed: {seed}").unwrap();
        }
        writeln!(out, "elapsed_ms: {}", self.elapsed_ms).unwrap();
        out
    }
}

fn render_section(out: &mut String, title: &str, v: &Value) {
    match v {
        Value::Null => {}
        Value::Object(map) if map.is_empty() => {}
        _ => {
            writeln!(out, "{title}:").unwrap();
            render_value(out, v, 1);
        }
    }
}

fn as_grid(v: &Value) -> Option<Vec<Vec<String>>> {
    let rows = v.as_array()?;
    if rows.is_empty() {
        return None;
    }
    rows.iter()
        .map(|r| {
            let r = r.as_array()?;
            r.iter()
                .map(|x| x.as_u64().map(|n| n.to_string()))
                .collect()
        })
        .collect()
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(inner) if !inner.is_empty() => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        render_value(out, val, depth + 1);
                    }
                    _ if GRID_KEYS.contains(&k.as_str()) && as_grid(val).is_some() => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        let grid = as_grid(val).unwrap();
                        let width = grid.iter().flatten().map(String::len).max().unwrap_or(1);
                        for row in grid {
                            let cells: Vec<String> =
                                row.iter().map(|c| format!("{c:>width$}")).collect();
                            writeln!(out, "{pad}  {}", cells.join(" ")).unwrap();
                        }
                    }
                    _ => writeln!(out, "{pad}{k}: {}", inline(val)).unwrap(),
                }
            }
        }
        other => writeln!(out, "{pad}{}", inline(other)).unwrap(),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
