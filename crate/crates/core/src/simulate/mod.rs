//! Finite-`K` Hermitian matrix surrogate for the free SDE: sampling,
//! polynomial evaluation, Euler–Maruyama runs and the coupling experiment.

mod coupling;
mod sde;

pub use coupling::{coupling_experiment, rotation_check, rotation_flow, CouplingConfig, CouplingReport, RotationCheck};
pub use sde::{
    burn_in, empirical_moments, euler_step, moment_drift, run_many, run_sde, summarize_drift, DriftReport, MatrixEnsemble, SdeConfig,
    SdeRun,
};

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ncalg::{NCPolynomial, Tensor2Series, Word};

pub type HMatrix = DMatrix<Complex64>;

/// Random stream for trajectory `index` under a master seed; independent of
/// scheduling order.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Hermitian Gaussian matrix whose entries have variance `variance`: real
/// `N(0, v)` on the diagonal, complex with independent `N(0, v/2)` parts off it.
pub fn gue<R: Rng + ?Sized>(k: usize, variance: f64, rng: &mut R) -> HMatrix {
    let mut m = HMatrix::zeros(k, k);
    if variance == 0.0 {
        return m;
    }
    let sd = variance.sqrt();
    let off = (variance / 2.0).sqrt();
    for i in 0..k {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex64::new(sd * d, 0.0);
        for j in (i + 1)..k {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(off * re, off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Increment of Hermitian Brownian motion over `dt`, normalized so that
/// `(1/K) Tr(G²) ≈ dt`.
pub fn brownian_increment<R: Rng + ?Sized>(k: usize, dt: f64, rng: &mut R) -> HMatrix {
    gue(k, dt / k as f64, rng)
}

/// Independent GUE matrices normalized to the standard semicircle.
pub fn semicircular_ensemble<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<HMatrix> {
    (0..n).map(|_| gue(k, 1.0 / k as f64, rng)).collect()
}

/// `(1/K) Tr(a)`.
pub fn normalized_trace(a: &HMatrix) -> Complex64 {
    a.trace() / a.nrows() as f64
}

/// `‖a‖₂ = ((1/K) Tr(a^* a))^{1/2}`.
pub fn l2_norm(a: &HMatrix) -> f64 {
    (a.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.nrows() as f64).sqrt()
}

/// `(a + a^*)/2`.
pub fn hermitian_part(a: &HMatrix) -> HMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest entry of `a − a^*`.
pub fn hermiticity_residual(a: &HMatrix) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm of a Hermitian matrix by power iteration on `a²` from a
/// fixed start vector; accurate to a few digits, used only as a guard.
pub fn spectral_norm_estimate(a: &HMatrix) -> f64 {
    let k = a.nrows();
    if k == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(k, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    let mut estimate = 0.0;
    for _ in 0..40 {
        let w = a * (a * &v);
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        estimate = (n / v.norm()).sqrt();
        v = w / Complex64::new(n, 0.0);
    }
    estimate
}

/// Evaluates words on a tuple of matrices, caching shared suffixes.
pub struct Evaluator<'a> {
    mats: &'a [HMatrix],
    cache: HashMap<Word, HMatrix>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mats: &'a [HMatrix]) -> Self {
        Evaluator {
            mats,
            cache: HashMap::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    /// `X_w` evaluated at the matrices.
    pub fn word(&mut self, w: &Word) -> Result<HMatrix> {
        if let Some(m) = self.cache.get(w) {
            return Ok(m.clone());
        }
        let k = self.size();
        let out = if w.is_empty() {
            HMatrix::identity(k, k)
        } else {
            let first = w.letter(0);
            let x = self.mats.get(first - 1).ok_or(Error::LetterOutOfRange {
                letter: first,
                alphabet: self.mats.len(),
            })?;
            if w.len() == 1 {
                x.clone()
            } else {
                x * self.word(&w.suffix(1))?
            }
        };
        self.cache.insert(w.clone(), out.clone());
        Ok(out)
    }

    pub fn poly(&mut self, p: &NCPolynomial) -> Result<HMatrix> {
        let k = self.size();
        let mut out = HMatrix::zeros(k, k);
        for (w, c) in p.iter() {
            out += self.word(w)? * *c;
        }
        Ok(out)
    }

    /// `Θ # W = Σ c · a W b` over the terms `a ⊗ b` of `Θ`.
    pub fn hash(&mut self, theta: &Tensor2Series, w: &HMatrix) -> Result<HMatrix> {
        let k = self.size();
        let mut out = HMatrix::zeros(k, k);
        for ((a, b), c) in theta.iter() {
            let term = match (a.is_empty(), b.is_empty()) {
                (true, true) => w.clone(),
                (true, false) => w * self.word(b)?,
                (false, true) => self.word(a)? * w,
                (false, false) => self.word(a)? * w * self.word(b)?,
            };
            out += term * *c;
        }
        Ok(out)
    }

    /// `(1/K) Tr(X_w)`.
    pub fn moment(&mut self, w: &Word) -> Result<f64> {
        Ok(normalized_trace(&self.word(w)?).re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_have_the_right_scale() {
        let mut rng = trajectory_rng(7, 0);
        assert_eq!(brownian_increment(5, 0.0, &mut rng), HMatrix::zeros(5, 5));
        let k = 100;
        let mean: f64 = (0..200)
            .map(|_| {
                let g = brownian_increment(k, 0.01, &mut rng);
                normalized_trace(&(&g * &g)).re
            })
            .sum::<f64>()
            / 200.0;
        assert!((mean - 0.01).abs() < 0.002, "{mean}");
        let g = brownian_increment(k, 0.01, &mut rng);
        assert!(hermiticity_residual(&g) <= 1e-15);
    }

    #[test]
    fn streams_are_reproducible() {
        let a = gue(4, 1.0, &mut trajectory_rng(1, 3));
        let b = gue(4, 1.0, &mut trajectory_rng(1, 3));
        let c = gue(4, 1.0, &mut trajectory_rng(1, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn evaluation_examples() {
        let mut rng = trajectory_rng(2, 0);
        let mats = semicircular_ensemble(2, 6, &mut rng);
        let mut ev = Evaluator::new(&mats);
        assert_eq!(ev.word(&Word::single(1)).unwrap(), mats[0]);
        let w = gue(6, 1.0, &mut rng);
        assert_eq!(ev.hash(&Tensor2Series::identity(2), &w).unwrap(), w);
        // commuting diagonal matrices multiply entrywise
        let d1 = HMatrix::from_diagonal(&DVector::from_fn(3, |i, _| Complex64::new(i as f64 + 1.0, 0.0)));
        let d2 = HMatrix::from_diagonal(&DVector::from_fn(3, |i, _| Complex64::new(2.0 - i as f64, 0.0)));
        let diag = [d1, d2];
        let mut ev = Evaluator::new(&diag);
        let p = ev.word(&Word::from_letters(&[1, 2])).unwrap();
        for i in 0..3 {
            assert_eq!(p[(i, i)].re, (i as f64 + 1.0) * (2.0 - i as f64));
        }
    }

    #[test]
    fn power_iteration_matches_eigenvalues() {
        let mut rng = trajectory_rng(3, 0);
        let a = gue(30, 1.0 / 30.0, &mut rng);
        let exact = a
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        assert!((spectral_norm_estimate(&a) - exact).abs() < 0.05 * exact);
    }
}
