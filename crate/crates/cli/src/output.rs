//! Tables (CSV or JSON) and two-column profile dumps.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::config::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.replace([',', '\n'], ";"),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert((*c).to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_csv()
        }
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// One named component of a profile dump.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Plain-text dump: `#` header lines, then per component a `# component NAME`
/// line followed by `node value` rows.
pub fn format_profile(header: &[String], components: &[Component]) -> String {
    let mut s = String::new();
    for h in header {
        let _ = writeln!(s, "# {h}");
    }
    for c in components {
        let _ = writeln!(s, "# component {}", c.name);
        for (x, v) in c.nodes.iter().zip(&c.values) {
            let _ = writeln!(s, "{x:.16e} {v:.16e}");
        }
    }
    s
}

pub fn parse_profile(text: &str) -> Result<Vec<Component>, CliError> {
    let mut out: Vec<Component> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(name) = rest.trim().strip_prefix("component") {
                out.push(Component {
                    name: name.trim().to_string(),
                    nodes: Vec::new(),
                    values: Vec::new(),
                });
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(CliError::Usage(format!("profile line {}: expected two columns", no + 1)));
        };
        let parse = |t: &str| {
            t.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("profile line {}: {e}", no + 1)))
        };
        if out.is_empty() {
            out.push(Component {
                name: "f".into(),
                nodes: Vec::new(),
                values: Vec::new(),
            });
        }
        let c = out.last_mut().expect("component exists");
        c.nodes.push(parse(a)?);
        c.values.push(parse(b)?);
    }
    out.retain(|c| !c.nodes.is_empty());
    if out.is_empty() {
        return Err(CliError::Usage("profile has no data rows".into()));
    }
    Ok(out)
}
