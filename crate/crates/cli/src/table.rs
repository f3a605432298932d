//! Deterministic table emission: CSV with `#` metadata comment lines above a
//! single header row, or a JSON array of row objects. Number formatting is
//! fixed so identical configs produce byte-identical files.

use crate::CliError;

/// One table column: name plus whether the infinite-gain sentinel may
/// legitimately appear in it.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub allow_inf: bool,
}

impl Column {
    pub const fn finite(name: &'static str) -> Self {
        Self {
            name,
            allow_inf: false,
        }
    }

    pub const fn gain(name: &'static str) -> Self {
        Self {
            name,
            allow_inf: true,
        }
    }
}

/// A cell value.
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Rejects non-finite numbers outside the columns that allow the
    /// infinity sentinel.
    pub fn validate(&self) -> Result<(), CliError> {
        for row in &self.rows {
            for (col, val) in self.columns.iter().zip(row) {
                if let Value::Num(x) = val {
                    if x.is_nan() {
                        return Err(CliError::Numeric(format!("NaN in column {}", col.name)));
                    }
                    if x.is_infinite() && !col.allow_inf {
                        return Err(CliError::Numeric(format!(
                            "non-finite value in column {}",
                            col.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Shortest-roundtrip decimal for moderate magnitudes, exponent notation
/// outside; infinities render as "inf".
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Num(x) => fmt_num(*x),
        Value::Text(s) => s.clone(),
    }
}

/// FNV-1a over the canonical config text plus override description; stamped
/// into the output metadata so a golden file records what produced it.
pub fn config_hash(raw_config: &str, overrides: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in raw_config.bytes().chain(overrides.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn to_csv(table: &Table, hash: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("# qamp {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# config-hash {hash:016x}\n"));
    let header: Vec<&str> = table.columns.iter().map(|c| c.name).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(fmt_value).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(table: &Table) -> String {
    let mut out = String::from("[\n");
    for (i, row) in table.rows.iter().enumerate() {
        out.push_str("  {");
        for (j, (col, val)) in table.columns.iter().zip(row).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            match val {
                Value::Num(x) if x.is_finite() => {
                    out.push_str(&format!("\"{}\": {}", col.name, fmt_num(*x)));
                }
                // JSON has no infinity literal; fall back to a string
                Value::Num(x) => {
                    out.push_str(&format!("\"{}\": \"{}\"", col.name, fmt_num(*x)));
                }
                Value::Text(s) => {
                    out.push_str(&format!("\"{}\": \"{}\"", col.name, s.replace('"', "\\\"")));
                }
            }
        }
        out.push('}');
        if i + 1 < table.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}
