//! Coefficient majorants `φ_f` and the `‖·‖_ρ` seminorms built from them.

use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::series::{Series, SeriesKey};
use crate::error::{Error, Result};

/// Geometric bound `c(d) ≤ scale · ratio^|d|` on every coefficient whose
/// total degree exceeds the truncation degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricTail {
    pub scale: f64,
    pub ratio: f64,
}

/// A power series in `arity` commuting variables with non-negative
/// coefficients, exact up to a truncation degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantSeries {
    arity: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
    tail: Option<GeometricTail>,
    polynomial: bool,
}

impl MajorantSeries {
    pub fn new(arity: usize, degree: usize) -> Self {
        MajorantSeries {
            arity,
            degree,
            coeffs: BTreeMap::new(),
            tail: None,
            polynomial: true,
        }
    }

    /// Builds a majorant from explicit coefficients. Negative values are
    /// rejected; entries above `degree` are ignored.
    pub fn from_coeffs<I>(arity: usize, degree: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut m = Self::new(arity, degree);
        for (d, c) in coeffs {
            if d.len() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: d.len(),
                });
            }
            if !(c >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "majorant coefficient {c} at {d:?} is not non-negative"
                )));
            }
            if d.iter().sum::<usize>() <= degree && c > 0.0 {
                *m.coeffs.entry(d).or_insert(0.0) += c;
            }
        }
        Ok(m)
    }

    /// `Σ_n scale · ratio^n z^n`, kept as a tail beyond degree 0.
    pub fn geometric(scale: f64, ratio: f64) -> Self {
        let mut m = Self::new(1, 0);
        if scale > 0.0 {
            m.coeffs.insert(vec![0], scale);
        }
        m.tail = Some(GeometricTail { scale, ratio });
        m.polynomial = false;
        m
    }

    pub fn with_tail(mut self, tail: GeometricTail) -> Self {
        self.tail = Some(tail);
        self.polynomial = false;
        self
    }

    /// Marks the coefficients as a truncation of a longer series with no
    /// known tail bound.
    pub fn truncation(mut self) -> Self {
        self.polynomial = false;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tail(&self) -> Option<GeometricTail> {
        self.tail
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.coeffs.iter()
    }

    /// Coefficient at a multi-degree; beyond the truncation degree this is the
    /// tail bound (zero without a tail).
    pub fn coeff(&self, d: &[usize]) -> f64 {
        let total: usize = d.iter().sum();
        if total <= self.degree {
            self.coeffs.get(d).copied().unwrap_or(0.0)
        } else {
            self.tail
                .map(|t| t.scale * t.ratio.powi(total as i32))
                .unwrap_or(0.0)
        }
    }

    /// Value at a point with non-negative coordinates; `f64::INFINITY` when the
    /// tail diverges there.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: point.len(),
            });
        }
        let mut sum = 0.0;
        for (d, c) in &self.coeffs {
            let mut term = *c;
            for (k, z) in d.iter().zip(point) {
                term *= z.powi(*k as i32);
            }
            sum += term;
        }
        if let Some(t) = self.tail {
            sum += tail_sum(t, self.arity, self.degree, point);
        }
        Ok(sum)
    }

    /// `self ≺ other`: coefficient-wise domination up to the common
    /// truncation degree, tails included beyond it.
    pub fn dominated_by(&self, other: &Self) -> Result<bool> {
        self.check_arity(other)?;
        let common = self.combined_degree(other, self.degree.max(other.degree));
        for (d, c) in &self.coeffs {
            if d.iter().sum::<usize>() <= common && *c > other.coeff(d) * (1.0 + 1e-12) + 1e-300 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    /// Whether every coefficient beyond the truncation degree is zero.
    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    fn combined_degree(&self, other: &Self, polynomial_degree: usize) -> usize {
        if self.is_polynomial() && other.is_polynomial() {
            polynomial_degree
        } else {
            self.degree.min(other.degree)
        }
    }

    /// Product of series. Two polynomials multiply exactly; otherwise the
    /// result is exact up to the smaller truncation degree and carries no tail.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let degree = self.combined_degree(other, self.degree + other.degree);
        let mut out = Self::new(self.arity, degree);
        out.polynomial = self.polynomial && other.polynomial;
        for (a, ca) in &self.coeffs {
            let da: usize = a.iter().sum();
            for (b, cb) in &other.coeffs {
                if da + b.iter().sum::<usize>() > degree {
                    continue;
                }
                let key: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *out.coeffs.entry(key).or_insert(0.0) += ca * cb;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let degree = self.combined_degree(other, self.degree.max(other.degree));
        let mut out = Self::new(self.arity, degree);
        out.polynomial = self.polynomial && other.polynomial;
        for (d, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if d.iter().sum::<usize>() <= degree {
                *out.coeffs.entry(d.clone()).or_insert(0.0) += c;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        if let Some(t) = &mut out.tail {
            t.scale *= s;
        }
        out
    }

    /// Formal partial derivative in variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::new(self.arity, self.degree.saturating_sub(1));
        out.polynomial = self.polynomial;
        for (d, c) in &self.coeffs {
            if d[var] == 0 {
                continue;
            }
            let mut e = d.clone();
            e[var] -= 1;
            out.coeffs.insert(e, c * d[var] as f64);
        }
        out
    }

    /// Fixes variable `var` at `value`, leaving a series in the remaining
    /// variables.
    pub fn substitute(&self, var: usize, value: f64) -> Result<Self> {
        if var >= self.arity || self.arity == 1 {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: var + 1,
            });
        }
        let mut out = Self::new(self.arity - 1, self.degree);
        out.polynomial = self.polynomial;
        for (d, c) in &self.coeffs {
            let mut e = d.clone();
            let k = e.remove(var);
            *out.coeffs.entry(e).or_insert(0.0) += c * value.powi(k as i32);
        }
        if let Some(t) = self.tail {
            if t.scale > 0.0 {
                return Err(Error::InvalidParameter(
                    "substitution into a series with a tail is not supported".into(),
                ));
            }
        }
        Ok(out)
    }

    /// Exchanges the two variables of an arity-2 series.
    pub fn swap(&self) -> Self {
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(d, c)| (d.iter().rev().copied().collect(), *c))
            .collect();
        out
    }

    /// `‖·‖_ρ`: evaluation at `(Nρ, …, Nρ)`.
    pub fn seminorm(&self, alphabet: usize, rho: f64) -> f64 {
        let z = alphabet as f64 * rho;
        self.eval(&vec![z; self.arity]).expect("arity matches")
    }
}

// Σ over total degree k > degree of scale·ratio^k · Σ_{|d|=k} Π z_i^{d_i},
// bounded by scale · Σ_k C(k+a−1, a−1) (ratio·max z)^k.
fn tail_sum(t: GeometricTail, arity: usize, degree: usize, point: &[f64]) -> f64 {
    let x = t.ratio * point.iter().copied().fold(0.0, f64::max);
    if t.scale == 0.0 || x == 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return f64::INFINITY;
    }
    if arity == 1 {
        return t.scale * x.powi(degree as i32 + 1) / (1.0 - x);
    }
    // sum the series numerically until terms are negligible
    let mut sum = 0.0;
    let mut k = degree + 1;
    loop {
        let mut mult = 1.0;
        for i in 1..arity {
            mult *= (k + i) as f64 / i as f64;
        }
        let term = mult * x.powi(k as i32);
        sum += term;
        if term < 1e-17 * sum && k > degree + 10 {
            break;
        }
        k += 1;
    }
    t.scale * sum
}

/// `φ_f`: at each multi-degree, the largest coefficient modulus over the
/// terms of that multi-degree.
pub fn coefficient_majorant<K: SeriesKey, C: Coeff>(f: &Series<K, C>) -> MajorantSeries {
    let degree = f.cap().or_else(|| f.degree()).unwrap_or(0);
    let mut m = MajorantSeries::new(K::LEGS, degree);
    for (k, c) in f.iter() {
        let e = m.coeffs.entry(k.degrees()).or_insert(0.0);
        *e = e.max(c.modulus());
    }
    m
}

/// `‖f‖_ρ = φ_f(Nρ, …)`.
pub fn seminorm_rho<K: SeriesKey, C: Coeff>(f: &Series<K, C>, rho: f64) -> f64 {
    coefficient_majorant(f).seminorm(f.alphabet(), rho)
}
