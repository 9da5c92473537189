//! `key = value` run configuration. Values from a config file override flags.

use std::path::PathBuf;

use ncfree::generator::DriftVariant;
use ncfree::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub q: f64,
    pub alphabet: usize,
    pub k: usize,
    pub dt: f64,
    pub horizon: f64,
    pub depth: usize,
    pub degree: usize,
    pub seed: u64,
    pub seeds: usize,
    pub drift: DriftVariant,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 0.0,
            alphabet: 2,
            k: 150,
            dt: 1e-3,
            horizon: 1.0,
            depth: 8,
            degree: 4,
            seed: 0,
            seeds: 8,
            drift: DriftVariant::Ito,
            out_dir: None,
        }
    }
}

fn parse<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad value {value:?} for {key}"),
    })
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(Error::Parse {
                line,
                msg: format!("expected key = value, got {body:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "q" => self.q = parse(line, key, value)?,
                "N" | "n" => self.alphabet = parse(line, key, value)?,
                "K" | "k" => self.k = parse(line, key, value)?,
                "dt" => self.dt = parse(line, key, value)?,
                "T" | "horizon" => self.horizon = parse(line, key, value)?,
                "D" | "depth" => self.depth = parse(line, key, value)?,
                "degree" => self.degree = parse(line, key, value)?,
                "seed" => self.seed = parse(line, key, value)?,
                "seeds" => self.seeds = parse(line, key, value)?,
                "drift" => self.drift = parse(line, key, value)?,
                "out_dir" => self.out_dir = Some(PathBuf::from(value)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.q.abs() < 1.0) {
            return bad(format!("|q| must be below 1, got {}", self.q));
        }
        if self.alphabet == 0 {
            return bad("N must be at least 1".into());
        }
        if self.degree == 0 || self.seeds == 0 {
            return bad("degree and seeds must be at least 1".into());
        }
        if self.k < 2 || !(self.dt > 0.0) || !(self.horizon >= 0.0) {
            return bad(format!("need K ≥ 2, dt > 0, T ≥ 0 (got K={}, dt={}, T={})", self.k, self.dt, self.horizon));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override() {
        let mut c = RunConfig::default();
        c.apply_text("# run\nq = 0.02\nN=3\n\nK = 40 # small\ndrift = literal\nout_dir = /tmp/x\n")
            .unwrap();
        assert_eq!((c.q, c.alphabet, c.k, c.drift), (0.02, 3, 40, DriftVariant::Literal));
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/x")));
        assert!(matches!(c.apply_text("q 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(c.apply_text("\nfoo = 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(c.apply_text("K = x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { q: 1.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { alphabet: 0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { k: 1, ..RunConfig::default() }.validate().is_err());
    }
}
