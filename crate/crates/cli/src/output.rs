//! JSON with 17 significant digits, and CSV tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ncfree::ncalg::{NCPolynomial, Word};
use serde_json::{json, Value};

/// A float printed with 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&format!("{x:.16e}")).expect("scientific notation is valid JSON")
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// `[{"word": "X1X2", "re": .., "im": ..}, ..]` in word order.
pub fn poly(p: &NCPolynomial) -> Value {
    Value::Array(
        p.iter()
            .map(|(w, c)| json!({"word": word(w), "re": num(c.re), "im": num(c.im)}))
            .collect(),
    )
}

pub fn word(w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.to_string()
    }
}

/// Where reports go: stdout always, files only with an output directory.
pub struct Sink {
    dir: Option<PathBuf>,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> std::io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink { dir, written: Vec::new() })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn write(&mut self, name: &str, body: &str) -> std::io::Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::File::create(&path)?.write_all(body.as_bytes())?;
            self.written.push(path);
        }
        Ok(())
    }

    /// Prints the report and stores it as `<name>.json`.
    pub fn json(&mut self, name: &str, value: &Value) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
        print!("{text}");
        self.write(&format!("{name}.json"), &text)
    }

    /// Stores a CSV table as `<name>.csv` (only with an output directory).
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
        let mut text = header.join(",") + "\n";
        for r in rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
        self.write(&format!("{name}.csv"), &text)
    }
}

/// CSV cell for a float, 17 significant digits.
pub fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_17_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(2.0).to_string(), "2.0000000000000000e+0");
        assert_eq!(num(f64::NAN), Value::Null);
        let x = 1.9983987189751801;
        assert_eq!(num(x).to_string().parse::<f64>().unwrap(), x);
    }
}
