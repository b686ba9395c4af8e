//! Column-oriented results and their CSV/JSON encodings.

use num_complex::Complex64;

use crate::error::{CliError, CliResult};

/// Written in place of values flagged as undefined.
pub const UNDEF: &str = "undef";

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
    Undef,
}

impl Value {
    pub fn opt(v: Option<f64>) -> Self {
        v.filter(|x| x.is_finite()).map_or(Value::Undef, Value::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Value::Num(v) => format_num(*v),
            Value::Text(s) => s.clone(),
            Value::Undef => UNDEF.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Num(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Value::Text(s) => serde_json::Value::String(s.clone()),
            Value::Undef => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::opt(Some(v))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>, E> From<Result<T, E>> for Value {
    fn from(r: Result<T, E>) -> Self {
        r.map_or(Value::Undef, Into::into)
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
pub fn format_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `_re`/`_im` pair for a complex value.
pub fn complex(z: Option<Complex64>) -> [Value; 2] {
    match z {
        Some(z) if z.re.is_finite() && z.im.is_finite() => [Value::Num(z.re), Value::Num(z.im)],
        _ => [Value::Undef, Value::Undef],
    }
}

pub fn complex_columns(name: &str) -> [String; 2] {
    [format!("{name}_re"), format!("{name}_im")]
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::csv_field)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Array of row objects, keys in column order.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self.columns.iter().cloned().zip(r.iter().map(Value::json)).collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("json values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["w_hat", "a_re", "a_im", "flag"]);
        let [re, im] = complex(Some(Complex64::new(1.5, -2e-9)));
        t.push(vec![0.25.into(), re, im, Value::opt(None)]);
        t.push(vec![f64::NAN.into(), Value::Undef, Value::Undef, "x".into()]);
        assert_eq!(t.to_csv().unwrap(), "w_hat,a_re,a_im,flag\n0.25,1.5,-2e-9,undef\nundef,undef,undef,x\n");
        let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["a_im"], -2e-9);
        assert!(json[1]["w_hat"].is_null());
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1.0, -3.25, 1e-12, 6.02e23, 0.1 + 0.2, 123456.789] {
            assert_eq!(format_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
