//! Lower bounds on the free entropy dimension of the q-semicircular family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::wick::q_threshold;

/// Statements that follow from a bound above one. They are reported as text;
/// nothing here checks them.
pub const CONSEQUENCES: [&str; 2] = [
    "the generated von Neumann algebra has no Cartan subalgebra (not verified numerically)",
    "the generated von Neumann algebra is prime (not verified numerically)",
];

pub const OUTSIDE_RANGE: &str = "outside proven range";

/// `N (1 − q²N / (1 − q²N))`.
pub fn delta0_lower_bound(q: f64, alphabet: usize) -> Result<f64> {
    let n = alphabet as f64;
    let x = q * q * n;
    if !q.is_finite() || alphabet == 0 || x >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "bound needs N ≥ 1 and q²N < 1, got q={q}, N={alphabet}"
        )));
    }
    Ok(n * (1.0 - x / (1.0 - x)))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DimensionReport {
    pub q: f64,
    pub alphabet: usize,
    pub threshold: f64,
    pub in_range: bool,
    /// `None` outside the proven range.
    pub eta_bound: Option<f64>,
    pub exceeds_one: bool,
    pub notes: Vec<String>,
}

pub fn report(q: f64, alphabet: usize) -> DimensionReport {
    let threshold = q_threshold(alphabet.max(1));
    let in_range = alphabet > 0 && q.abs() < threshold;
    let eta_bound = if in_range { delta0_lower_bound(q, alphabet).ok() } else { None };
    let exceeds_one = eta_bound.is_some_and(|e| e > 1.0);
    let mut notes = Vec::new();
    if !in_range {
        notes.push(format!("{OUTSIDE_RANGE}: |q| = {} ≥ 1/(4N³+2) = {threshold}", q.abs()));
    } else if exceeds_one {
        notes.extend(CONSEQUENCES.iter().map(|s| s.to_string()));
    }
    DimensionReport {
        q,
        alphabet,
        threshold,
        in_range,
        eta_bound,
        exceeds_one,
        notes,
    }
}

/// Reports for each `q` of the grid, plus whether the bound increases
/// monotonically towards `N` as `|q|` decreases along the grid.
pub fn limit_check(alphabet: usize, grid: &[f64]) -> (Vec<DimensionReport>, bool) {
    let mut rows: Vec<DimensionReport> = grid.iter().map(|&q| report(q, alphabet)).collect();
    rows.sort_by(|a, b| b.q.abs().total_cmp(&a.q.abs()));
    let n = alphabet as f64;
    let monotone = rows.iter().all(|r| r.eta_bound.is_some_and(|e| e <= n))
        && rows.windows(2).all(|w| w[0].eta_bound <= w[1].eta_bound);
    (rows, monotone)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(delta0_lower_bound(0.0, 3).unwrap(), 3.0);
        let x = 0.02f64 * 0.02 * 2.0;
        assert_eq!(delta0_lower_bound(0.02, 2).unwrap(), 2.0 * (1.0 - x / (1.0 - x)));
        assert!((delta0_lower_bound(0.02, 2).unwrap() - 1.99840).abs() < 1e-5);
        assert!((delta0_lower_bound(1.0 / 34.0, 2).unwrap() - 1.99654).abs() < 1e-5);
        assert!(delta0_lower_bound(1.0, 1).is_err());
    }

    #[test]
    fn report_examples() {
        let r = report(0.02, 2);
        assert!(r.in_range && r.exceeds_one);
        assert_eq!(r.threshold, 1.0 / 34.0);
        let r = report(0.1, 2);
        assert!(!r.in_range && r.eta_bound.is_none() && !r.exceeds_one);
        assert!(r.notes[0].starts_with(OUTSIDE_RANGE));
        assert_eq!(report(0.0, 4).eta_bound, Some(4.0));
        assert!(report(-1.0 / 34.0, 2).eta_bound.is_none());
    }

    #[test]
    fn limit_examples() {
        let (rows, mono) = limit_check(2, &[0.02, 0.01, 0.001]);
        assert!(mono && rows.len() == 3);
        assert!(rows[2].eta_bound.unwrap() > rows[0].eta_bound.unwrap());
        assert_eq!(limit_check(2, &[0.01]).0.len(), 1);
        assert!(report(0.005, 3).in_range);
        assert!(!limit_check(2, &[0.1, 0.01]).1);
    }
}
