use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{brownian_increment, hermitian_part, hermiticity_residual, semicircular_ensemble, spectral_norm_estimate, trajectory_rng, Evaluator, HMatrix};
use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::ncalg::Word;
use crate::trace::WordTrace;

/// An `N`-tuple of `K×K` Hermitian matrices at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEnsemble {
    pub matrices: Vec<HMatrix>,
    pub t: f64,
    pub seed: u64,
}

impl MatrixEnsemble {
    pub fn alphabet(&self) -> usize {
        self.matrices.len()
    }

    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    /// Normalized traces of all words of length `1..=degree`.
    pub fn moments(&self, degree: usize) -> Result<Vec<(Word, f64)>> {
        empirical_moments(&self.matrices, degree)
    }
}

/// `(1/K) Tr(X_w)` for every word of length `1..=degree`. The trace of a
/// product is taken as a Frobenius pairing of its two halves, so no full
/// product is ever formed.
pub fn empirical_moments(mats: &[HMatrix], degree: usize) -> Result<Vec<(Word, f64)>> {
    let mut ev = Evaluator::new(mats);
    let k = ev.size() as f64;
    let mut out = Vec::new();
    for w in Word::all_up_to(degree, mats.len()).filter(|w| !w.is_empty()) {
        let h = w.len() / 2;
        let a = ev.word(&w.prefix(h))?;
        let b = ev.word(&w.suffix(h))?;
        let tr: Complex64 = a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum();
        out.push((w, tr.re / k));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SdeConfig {
    pub dt: f64,
    pub horizon: f64,
    pub k: usize,
    pub seed: u64,
    /// Abort once a spectral norm reaches this value.
    pub norm_guard: f64,
    pub moment_degree: usize,
    /// Moments are recorded every this many steps (and at the end).
    pub sample_every: usize,
    /// The spectral-norm guard is evaluated every this many steps.
    pub guard_every: usize,
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig {
            dt: 1e-3,
            horizon: 1.0,
            k: 150,
            seed: 0,
            norm_guard: 10.0,
            moment_degree: 4,
            sample_every: 100,
            guard_every: 10,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be non-negative, got {}", self.horizon)));
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!("matrix size must be at least 2, got {}", self.k)));
        }
        if !(self.norm_guard > 0.0) {
            return Err(Error::InvalidParameter("norm guard must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Clone, Debug)]
pub struct SdeRun {
    pub times: Vec<f64>,
    pub moments: Vec<Vec<(Word, f64)>>,
    pub last: MatrixEnsemble,
    /// Largest deviation from Hermiticity before re-symmetrizing.
    pub max_hermiticity_residual: f64,
}

/// One Euler–Maruyama step `x_j += Σ_k Ψ_jk(x)#G_k − ½ ξ_j(x) dt`,
/// followed by re-symmetrization. Returns the pre-symmetrization residual.
pub fn euler_step(spec: &GeneratorSpec, x: &mut [HMatrix], increments: &[HMatrix], dt: f64) -> Result<f64> {
    let n = spec.alphabet();
    if x.len() != n || increments.len() != n {
        return Err(Error::AlphabetMismatch {
            left: n,
            right: x.len(),
        });
    }
    let updates = {
        let mut ev = Evaluator::new(x);
        let mut updates = Vec::with_capacity(n);
        for j in 0..n {
            let mut dx = ev.poly(&spec.xi()[j])? * Complex64::new(-0.5 * dt, 0.0);
            for (k, g) in increments.iter().enumerate() {
                let psi = spec.psi(j + 1, k + 1);
                if !psi.is_zero() {
                    dx += ev.hash(psi, g)?;
                }
            }
            updates.push(dx);
        }
        updates
    };
    let mut residual: f64 = 0.0;
    for (xj, dx) in x.iter_mut().zip(updates) {
        *xj += dx;
        residual = residual.max(hermiticity_residual(xj));
        *xj = hermitian_part(xj);
    }
    Ok(residual)
}

pub(super) fn check_state(x: &[HMatrix], step: usize, guard: f64, with_norm: bool) -> Result<()> {
    for (j, m) in x.iter().enumerate() {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        if with_norm {
            let norm = spectral_norm_estimate(m);
            if norm >= guard {
                return Err(Error::NormGuard {
                    index: j + 1,
                    norm,
                    guard,
                });
            }
        }
    }
    Ok(())
}

/// Integrates trajectory `index` of the SDE. Without an initial state the
/// start is an independent GUE tuple drawn from the trajectory's own stream.
pub fn run_sde(spec: &GeneratorSpec, config: &SdeConfig, initial: Option<Vec<HMatrix>>, index: u64) -> Result<SdeRun> {
    config.validate()?;
    let n = spec.alphabet();
    let mut rng = trajectory_rng(config.seed, index);
    let mut x = match initial {
        Some(x) => x,
        None => semicircular_ensemble(n, config.k, &mut rng),
    };
    let steps = config.steps();
    let every = config.sample_every.max(1);
    let guard_every = config.guard_every.max(1);
    check_state(&x, 0, config.norm_guard, true)?;
    let mut times = vec![0.0];
    let mut moments = vec![empirical_moments(&x, config.moment_degree)?];
    let mut max_res: f64 = 0.0;
    for step in 1..=steps {
        let g: Vec<HMatrix> = (0..n).map(|_| brownian_increment(config.k, config.dt, &mut rng)).collect();
        max_res = max_res.max(euler_step(spec, &mut x, &g, config.dt)?);
        check_state(&x, step, config.norm_guard, step % guard_every == 0 || step == steps)?;
        if step % every == 0 || step == steps {
            times.push(step as f64 * config.dt);
            moments.push(empirical_moments(&x, config.moment_degree)?);
        }
    }
    Ok(SdeRun {
        times,
        moments,
        last: MatrixEnsemble {
            matrices: x,
            t: steps as f64 * config.dt,
            seed: config.seed,
        },
        max_hermiticity_residual: max_res,
    })
}

#[derive(Clone, Debug)]
pub struct DriftReport {
    /// Per word: seed-averaged `m(T) − m(0)`.
    pub drifts: Vec<(Word, f64)>,
    pub max_drift: f64,
    pub seeds: usize,
    pub max_hermiticity_residual: f64,
}

/// Runs trajectories `0..seeds` in parallel, all from `initial` if given.
pub fn run_many(spec: &GeneratorSpec, config: &SdeConfig, seeds: usize, initial: Option<&[HMatrix]>) -> Result<Vec<SdeRun>> {
    if seeds == 0 {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    (0..seeds as u64)
        .into_par_iter()
        .map(|i| run_sde(spec, config, initial.map(|x| x.to_vec()), i))
        .collect()
}

/// Seed-averaged change of every moment between the first and last sample.
pub fn summarize_drift(runs: &[SdeRun]) -> DriftReport {
    let seeds = runs.len();
    let mut acc: BTreeMap<Word, f64> = BTreeMap::new();
    for run in runs {
        let first = &run.moments[0];
        let last = run.moments.last().expect("at least one sample");
        for ((w, a), (_, b)) in first.iter().zip(last) {
            *acc.entry(w.clone()).or_default() += (b - a) / seeds as f64;
        }
    }
    let max_drift = acc.values().fold(0.0_f64, |m, d| m.max(d.abs()));
    DriftReport {
        drifts: acc.into_iter().collect(),
        max_drift,
        seeds,
        max_hermiticity_residual: runs.iter().map(|r| r.max_hermiticity_residual).fold(0.0, f64::max),
    }
}

/// Runs `seeds` independent trajectories from GUE starts and averages the
/// change of every moment between time 0 and the horizon.
pub fn moment_drift(spec: &GeneratorSpec, config: &SdeConfig, seeds: usize) -> Result<DriftReport> {
    Ok(summarize_drift(&run_many(spec, config, seeds, None)?))
}

/// Starting state for a deformed law: runs the SDE from GUE data over the
/// configured horizon, then reports the largest gap between the empirical
/// moments (up to `config.moment_degree`) and `tau`.
pub fn burn_in<T: WordTrace<Complex64> + ?Sized>(spec: &GeneratorSpec, config: &SdeConfig, tau: &T) -> Result<(MatrixEnsemble, f64)> {
    let run = run_sde(spec, config, None, u64::MAX)?;
    let last = run.moments.last().expect("at least one sample");
    let gap = last
        .iter()
        .map(|(w, m)| (m - tau.trace_word(w).re).abs())
        .fold(0.0, f64::max);
    Ok((run.last, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::DriftVariant;
    use crate::ncalg::{NCPolynomial, Tensor2Series};

    fn small(seed: u64) -> SdeConfig {
        SdeConfig {
            dt: 1e-2,
            horizon: 0.2,
            k: 20,
            seed,
            moment_degree: 2,
            sample_every: 5,
            ..SdeConfig::default()
        }
    }

    #[test]
    fn frozen_dynamics_is_constant() {
        let psi = vec![vec![Tensor2Series::zero(1)]];
        let xi = vec![NCPolynomial::zero(1)];
        let spec = GeneratorSpec::new(psi, xi, DriftVariant::Ito, 2.0).unwrap();
        let x0 = semicircular_ensemble(1, 10, &mut trajectory_rng(5, 0));
        let run = run_sde(&spec, &small(1), Some(x0.clone()), 0).unwrap();
        assert!((&run.last.matrices[0] - &x0[0]).iter().all(|z| z.norm() <= 1e-15));
    }

    #[test]
    fn burn_in_reaches_the_semicircle() {
        let spec = GeneratorSpec::ornstein_uhlenbeck(1, DriftVariant::Ito);
        let tau = crate::qfock::QTrace::new(crate::qfock::QParams::new(0.0, 1).unwrap());
        let cfg = SdeConfig {
            dt: 1e-2,
            horizon: 0.5,
            k: 80,
            moment_degree: 4,
            ..SdeConfig::default()
        };
        let (x, gap) = burn_in(&spec, &cfg, &tau).unwrap();
        assert_eq!(x.size(), 80);
        assert!(gap < 0.3, "{gap}");
    }

    #[test]
    fn runs_are_deterministic_and_hermitian() {
        let spec = GeneratorSpec::ornstein_uhlenbeck(2, DriftVariant::Ito);
        let a = run_sde(&spec, &small(9), None, 2).unwrap();
        let b = run_sde(&spec, &small(9), None, 2).unwrap();
        assert_eq!(a.last, b.last);
        assert_eq!(a.times.len(), 5);
        assert!(a.max_hermiticity_residual <= 1e-12);
        assert!(a.last.matrices.iter().all(|m| hermiticity_residual(m) == 0.0));
    }

    #[test]
    fn guard_aborts() {
        let spec = GeneratorSpec::ornstein_uhlenbeck(1, DriftVariant::Ito);
        let cfg = SdeConfig {
            norm_guard: 0.5,
            ..small(0)
        };
        assert!(matches!(run_sde(&spec, &cfg, None, 0), Err(Error::NormGuard { .. })));
        assert!(SdeConfig { k: 1, ..small(0) }.validate().is_err());
        assert!(SdeConfig { dt: 0.0, ..small(0) }.validate().is_err());
    }

    #[test]
    fn empirical_moments_match_direct_products() {
        let x = semicircular_ensemble(2, 8, &mut trajectory_rng(4, 1));
        let table = empirical_moments(&x, 3).unwrap();
        assert_eq!(table.len(), 2 + 4 + 8);
        let mut ev = Evaluator::new(&x);
        for (w, m) in &table {
            assert!((ev.moment(w).unwrap() - m).abs() < 1e-12);
        }
    }

    #[test]
    fn ou_keeps_second_moment() {
        let spec = GeneratorSpec::ornstein_uhlenbeck(1, DriftVariant::Ito);
        let cfg = SdeConfig {
            dt: 1e-2,
            horizon: 0.5,
            k: 60,
            moment_degree: 2,
            ..SdeConfig::default()
        };
        let r = moment_drift(&spec, &cfg, 4).unwrap();
        assert!(r.max_drift < 0.1, "{r:?}");
        assert!(moment_drift(&spec, &cfg, 0).is_err());
    }
}
