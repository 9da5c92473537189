use num_complex::Complex64;
use rayon::prelude::*;

use super::sde::{check_state, euler_step};
use super::{brownian_increment, l2_norm, semicircular_ensemble, trajectory_rng, Evaluator, HMatrix};
use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;

#[derive(Clone, Debug)]
pub struct CouplingConfig {
    pub dt: f64,
    pub k: usize,
    pub seed: u64,
    pub seeds: usize,
    pub norm_guard: f64,
    /// Measurement times; each is rounded to the nearest step.
    pub times: Vec<f64>,
}

impl CouplingConfig {
    /// Log-spaced grid of `points` times between `t_min` and `t_max`.
    pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
        if points < 2 {
            return vec![t_max];
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect()
    }
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            dt: 1e-4,
            k: 150,
            seed: 0,
            seeds: 4,
            norm_guard: 10.0,
            times: Self::log_grid(1e-3, 1e-1, 9),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CouplingReport {
    pub times: Vec<f64>,
    /// Seed-averaged `max_j ‖x_j(t) − (x_j(0) + Σ_k Ψ_jk(x(0))#s_k(t))‖₂`.
    pub distances: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(ln t, ln d)`; returns `(slope, intercept)`.
pub fn loglog_fit(times: &[f64], values: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t > 0.0 && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn coupling_path(spec: &GeneratorSpec, cfg: &CouplingConfig, steps: &[usize], index: u64) -> Result<Vec<f64>> {
    let n = spec.alphabet();
    let mut rng = trajectory_rng(cfg.seed, index);
    let x0 = semicircular_ensemble(n, cfg.k, &mut rng);
    let mut x = x0.clone();
    let mut s: Vec<HMatrix> = (0..n).map(|_| HMatrix::zeros(cfg.k, cfg.k)).collect();
    let mut ev0 = Evaluator::new(&x0);
    let last = steps.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(steps.len());
    let mut next = 0;
    for step in 0..=last {
        if step > 0 {
            let g: Vec<HMatrix> = (0..n).map(|_| brownian_increment(cfg.k, cfg.dt, &mut rng)).collect();
            for (sk, gk) in s.iter_mut().zip(&g) {
                *sk += gk;
            }
            euler_step(spec, &mut x, &g, cfg.dt)?;
            check_state(&x, step, cfg.norm_guard, step % 50 == 0)?;
        }
        while next < steps.len() && steps[next] == step {
            let mut d: f64 = 0.0;
            for j in 0..n {
                let mut linear = x0[j].clone();
                for (k, sk) in s.iter().enumerate() {
                    linear += ev0.hash(spec.psi(j + 1, k + 1), sk)?;
                }
                d = d.max(l2_norm(&(&x[j] - linear)));
            }
            out.push(d);
            next += 1;
        }
    }
    Ok(out)
}

/// Drives the SDE and its linearization at time 0 with the same Brownian
/// path and measures how fast they separate.
pub fn coupling_experiment(spec: &GeneratorSpec, cfg: &CouplingConfig) -> Result<CouplingReport> {
    if !(cfg.dt > 0.0) || cfg.k < 2 || cfg.seeds == 0 {
        return Err(Error::InvalidParameter("coupling needs dt > 0, K ≥ 2 and at least one seed".into()));
    }
    let mut grid: Vec<(usize, f64)> = cfg
        .times
        .iter()
        .map(|&t| {
            let s = (t / cfg.dt).round() as usize;
            (s, s as f64 * cfg.dt)
        })
        .collect();
    grid.sort_by_key(|g| g.0);
    grid.dedup_by_key(|g| g.0);
    let steps: Vec<usize> = grid.iter().map(|g| g.0).collect();
    let paths: Vec<Vec<f64>> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|i| coupling_path(spec, cfg, &steps, i))
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = (0..steps.len())
        .map(|i| paths.iter().map(|p| p[i]).sum::<f64>() / cfg.seeds as f64)
        .collect();
    let times: Vec<f64> = grid.iter().map(|g| g.1).collect();
    let (slope, intercept) = loglog_fit(&times, &distances);
    Ok(CouplingReport {
        times,
        distances,
        slope,
        intercept,
    })
}

/// `(cos t · x_j + sin t · s_j, −sin t · x_j + cos t · s_j)`.
pub fn rotation_flow(t: f64, x: &[HMatrix], s: &[HMatrix]) -> (Vec<HMatrix>, Vec<HMatrix>) {
    let (c, si) = (Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0));
    let a = x.iter().zip(s).map(|(xj, sj)| xj * c + sj * si).collect();
    let b = x.iter().zip(s).map(|(xj, sj)| sj * c - xj * si).collect();
    (a, b)
}

#[derive(Clone, Copy, Debug)]
pub struct RotationCheck {
    pub t: f64,
    /// `max_j ‖α_t(x_j) − (x_j + t s_j)‖₂`.
    pub remainder: f64,
    /// `max_j (t²/2) sup_{u ≤ t} ‖α_u(x_j)‖₂`.
    pub bound: f64,
}

impl RotationCheck {
    pub fn holds(&self) -> bool {
        self.remainder <= self.bound * (1.0 + 1e-12)
    }
}

/// Taylor remainder of the rotation flow against its second-order bound.
/// The second derivative of `u ↦ α_u(x_j)` is `−α_u(x_j)`, whose squared norm
/// is a trigonometric polynomial in `2u` and is maximized in closed form.
pub fn rotation_check(t: f64, x: &[HMatrix], s: &[HMatrix]) -> RotationCheck {
    let mut remainder: f64 = 0.0;
    let mut bound: f64 = 0.0;
    let (ct, st) = (Complex64::new(t.cos() - 1.0, 0.0), Complex64::new(t.sin() - t, 0.0));
    for (xj, sj) in x.iter().zip(s) {
        remainder = remainder.max(l2_norm(&(xj * ct + sj * st)));
        let k = xj.nrows() as f64;
        let a = l2_norm(xj).powi(2);
        let b = l2_norm(sj).powi(2);
        let c: f64 = xj.iter().zip(sj.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>() / k;
        // ‖α_u(x)‖² = (a+b)/2 + (a−b)/2 · cos 2u + c · sin 2u
        let (mid, bb) = ((a + b) / 2.0, (a - b) / 2.0);
        let at = |theta: f64| mid + bb * theta.cos() + c * theta.sin();
        let mut best = at(0.0).max(at(2.0 * t));
        let crit = c.atan2(bb);
        for theta in [crit, crit + std::f64::consts::TAU] {
            if (0.0..=2.0 * t).contains(&theta) {
                best = best.max(at(theta));
            }
        }
        bound = bound.max(0.5 * t * t * best.max(0.0).sqrt());
    }
    RotationCheck { t, remainder, bound }
}
