//! Tabular output in CSV or JSON with a fixed float rendering.
//!
//! Floats are written as `{:.16e}` (17 significant digits, round-trip
//! safe); both formats share the renderer so their numbers are identical.

use crate::config::Format;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Str(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, command: &str) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(command),
        }
    }

    fn csv(&self) -> String {
        let mut out = format!("# schema={SCHEMA}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => format_float(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Str(s) if s.contains([',', '"', '\n']) => {
                        format!("\"{}\"", s.replace('"', "\"\""))
                    }
                    Cell::Str(s) => s.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Null => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, command: &str) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("strings always serialize");
        let mut out = format!(
            "{{\"schema\":{SCHEMA},\"command\":{},\"rows\":[",
            quote(command)
        );
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n{");
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let value = match cell {
                    Cell::Float(v) if v.is_finite() => format_float(*v),
                    Cell::Float(_) | Cell::Null => "null".into(),
                    Cell::Int(v) => v.to_string(),
                    Cell::Str(s) => quote(s),
                    Cell::Bool(b) => b.to_string(),
                };
                out.push_str(&format!("{}:{value}", quote(name)));
            }
            out.push('}');
        }
        out.push_str("\n]}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new(&["K", "label"]);
        t.push(vec![0.5.into(), "a,b".into()]);
        assert_eq!(
            t.render(Format::Csv, "x"),
            "# schema=1\nK,label\n5.0000000000000000e-1,\"a,b\"\n"
        );
        let j = t.render(Format::Json, "x");
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"][0]["K"], 0.5);
        assert_eq!(v["rows"][0]["label"], "a,b");
    }
}
