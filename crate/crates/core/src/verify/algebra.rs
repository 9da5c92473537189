use std::time::Duration;

use num_complex::Complex64;
use rand::Rng;

use super::{run, Check, Outcome};
use crate::deriv::DerivationSpec;
use crate::ncalg::{NCPolynomial, Tensor2Series, Word};
use crate::qfock::{gram_brute, gram_recursive, moment_oracle, trace_word, FockVector, QParams, QTrace};
use crate::simulate::trajectory_rng;
use crate::wick::{min_eig_bound, min_eigenvalue, onb_polys, q_threshold, wick_poly, xi_expansion, EigBoundForm};

const CATALAN: [f64; 6] = [1.0, 2.0, 5.0, 14.0, 42.0, 132.0];

/// Fock-space traces against pairing enumeration, and Catalan moments at `q = 0`.
pub fn criterion_1() -> Outcome {
    run(1, "Fock traces equal pairing moments", Duration::from_secs(60), || {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for n in 1..=3 {
            for q in [0.0, 0.1, -0.1, 0.5, -0.5] {
                let params = QParams::new(q, n)?;
                for w in Word::all_up_to(8, n) {
                    let oracle = moment_oracle(&w, &Complex64::new(q, 0.0))?.re;
                    worst = worst.max((trace_word(&w, params) - oracle).abs());
                    count += 1;
                }
            }
        }
        let params = QParams::new(0.0, 1)?;
        let catalan_ok = (1..=6).all(|k| trace_word(&Word::repeat(1, 2 * k), params) == CATALAN[k - 1]);
        Ok(Check::new(
            worst <= 1e-12 && catalan_ok,
            format!("{count} words, max |Fock − oracle| = {worst:.3e} (tol 1e-12); Catalan C1..C6 exact: {catalan_ok}"),
        ))
    })
}

/// Brute-force and recursive Gram matrices, and the smallest-eigenvalue bound.
pub fn criterion_2() -> Outcome {
    run(2, "Gram recursion and eigenvalue bound", Duration::from_secs(120), || {
        let mut worst: f64 = 0.0;
        let mut bound_ok = true;
        let mut slack = f64::INFINITY;
        for n in 1..=5 {
            for alphabet in 1..=3 {
                for q in [0.02, 0.1, 0.3] {
                    let params = QParams::new(q, alphabet)?;
                    let b = gram_brute(n, params)?;
                    let r = gram_recursive(n, params)?;
                    worst = worst.max((&b - &*r).abs().max());
                    let lam = min_eigenvalue(&r);
                    let bound = min_eig_bound(n, q, EigBoundForm::Theta);
                    bound_ok &= lam >= bound;
                    slack = slack.min(lam - bound);
                }
            }
        }
        Ok(Check::new(
            worst <= 1e-12 && bound_ok,
            format!("max |brute − recursive| = {worst:.3e} (tol 1e-12); λ_min ≥ bound everywhere: {bound_ok} (min slack {slack:.3e})"),
        ))
    })
}

/// Wick polynomials create basis tensors, obey the coefficient bound, and the
/// orthonormalized family is orthonormal.
pub fn criterion_3() -> Outcome {
    run(3, "Wick polynomials", Duration::from_secs(120), || {
        let mut wick_err: f64 = 0.0;
        let mut coeff_ok = true;
        let mut counterexample = None;
        let mut norm_ok = true;
        let mut onb_err: f64 = 0.0;
        for alphabet in 1..=2 {
            for q in [0.02, 0.1, 0.3] {
                let params = QParams::new(q, alphabet)?;
                for w in Word::all_up_to(6, alphabet) {
                    let n = w.len();
                    let p = wick_poly(&w, &Complex64::new(q, 0.0), alphabet)?;
                    let got = FockVector::vacuum(alphabet, n).apply_poly(&p, q);
                    wick_err = wick_err.max(got.max_abs_diff(&FockVector::basis(&w, alphabet, n)?));
                    let s = 1.0 / (1.0 - q.abs());
                    for (m, c) in p.iter() {
                        let gap = (n - m.len()) as i32;
                        let bound = (2.0 * s).powi(gap);
                        if c.norm() > bound * (1.0 + 1e-12) {
                            coeff_ok = false;
                            counterexample.get_or_insert(format!(
                                "q={q}: coefficient {:.4} of {m} in W_{w} exceeds {bound:.4}",
                                c.re
                            ));
                        }
                    }
                    norm_ok &= got.inner(&got, q) <= (2.0 * s).powi(n as i32);
                }
                for n in 0..=4 {
                    let vecs: Vec<FockVector> = onb_polys(n, params)?
                        .iter()
                        .map(|p| FockVector::vacuum(alphabet, n).apply_poly(p, q))
                        .collect();
                    for (i, a) in vecs.iter().enumerate() {
                        for (j, b) in vecs.iter().enumerate() {
                            let target = if i == j { 1.0 } else { 0.0 };
                            onb_err = onb_err.max((a.inner(b, q) - target).abs());
                        }
                    }
                }
            }
        }
        Ok(Check::new(
            wick_err <= 1e-12 && coeff_ok && norm_ok && onb_err <= 1e-9,
            format!(
                "max |W_w Ω − e_w| = {wick_err:.3e} (tol 1e-12); coefficient bound (2/(1−|q|))^(n−k) holds: {coeff_ok}{}; L² bound holds: {norm_ok}; orthonormality error {onb_err:.3e} (tol 1e-9)",
                counterexample.map(|c| format!(" [first violation {c}]")).unwrap_or_default()
            ),
        ))
    })
}

/// The truncated kernel acts as `qⁿ` on tensor level `n`.
pub fn criterion_4() -> Outcome {
    run(4, "kernel acts as q^n on level n", Duration::from_secs(120), || {
        let (q, alphabet, cutoff) = (0.02, 2, 8);
        let xi = xi_expansion(QParams::new(q, alphabet)?, cutoff)?;
        let mut rng = trajectory_rng(4, 0);
        let mut worst: f64 = 0.0;
        for n in 0..=6 {
            let mut v = FockVector::zero(alphabet, cutoff);
            for x in v.level_mut(n) {
                *x = rng.random_range(-1.0..1.0);
            }
            let mut expected = v.clone();
            expected.scale(q.powi(n as i32));
            worst = worst.max(xi.apply(&v).max_abs_diff(&expected));
        }
        let threshold = q_threshold(2);
        let threshold_ok = threshold == 1.0 / 34.0 && (threshold * 1000.0).round() == 29.0;
        Ok(Check::new(
            worst <= 1e-9 && threshold_ok,
            format!(
                "max |Ξ v − qⁿ v| = {worst:.3e} (tol 1e-9, omitted-level tail {:.3e}); threshold(2) = {threshold:.6} = 1/34: {threshold_ok}",
                xi.operator_tail()
            ),
        ))
    })
}

/// `⟨1⊗1, ∂_j p⟩ = τ(X_j p)` for the truncated q-semicircular derivation.
pub fn criterion_5() -> Outcome {
    run(5, "conjugate variables are the generators", Duration::from_secs(60), || {
        let alphabet = 2;
        let mut worst: f64 = 0.0;
        let mut worst_mixed: f64 = 0.0;
        for q in [0.0, 0.02] {
            let params = QParams::new(q, alphabet)?;
            let spec = DerivationSpec::q_semicircular(&xi_expansion(params, 8)?)?;
            let tau = QTrace::new(params);
            let one = Tensor2Series::identity(alphabet);
            let mixed = Tensor2Series::tensor(&NCPolynomial::generator(alphabet, 1)?, &NCPolynomial::generator(alphabet, 2)?)?;
            for w in Word::all_up_to(4, alphabet) {
                let p = NCPolynomial::monomial(alphabet, w, Complex64::new(1.0, 0.0))?;
                for j in 1..=alphabet {
                    worst = worst.max(spec.adjoint_residual(j, &one, &p, &tau)?);
                    worst_mixed = worst_mixed.max(spec.adjoint_residual(j, &mixed, &p, &tau)?);
                }
            }
        }
        Ok(Check::new(
            worst <= 1e-10 && worst_mixed <= 1e-6,
            format!("max residual for 1⊗1: {worst:.3e} (tol 1e-10); for X1⊗X2: {worst_mixed:.3e} (tol 1e-6); degree ≤ 4, D = 8"),
        ))
    })
}
