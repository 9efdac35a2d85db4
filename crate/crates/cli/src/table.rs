//! Row output as CSV or JSON.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    /// `-0.0` prints as `0`.
    pub fn num(x: f64) -> Self {
        Cell::Num(if x == 0.0 { 0.0 } else { x })
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::num)
    }

    fn csv(&self) -> String {
        match self {
            // Debug gives the shortest round-trip form, switching to exponents at the extremes
            Cell::Num(x) if x.is_finite() => format!("{x:?}"),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Num(x) => number(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Integral values print without a fraction; non-finite values become null.
pub fn number(x: f64) -> Value {
    let x = if x == 0.0 { 0.0 } else { x };
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        Value::from(x as i64)
    } else {
        Value::from(x)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (h, c) in self.headers.iter().zip(row) {
                        m.insert((*h).to_string(), c.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_floats() {
        let mut t = Table::new(vec!["x", "note"]);
        t.push(vec![Cell::num(0.1 + 0.2), Cell::Text("a,b".into())]);
        t.push(vec![Cell::num(-0.0), Cell::Empty]);
        let s = t.to_csv().unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "0.30000000000000004,\"a,b\"");
        assert_eq!(lines[2], "0.0,");
        let back: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(vec!["y0", "p"]);
        t.push(vec![Cell::num(1.0), Cell::Empty]);
        assert_eq!(t.to_json_value().to_string(), r#"[{"y0":1,"p":null}]"#);
    }
}
