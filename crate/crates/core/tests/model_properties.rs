use ncfree::dimension::{delta0_lower_bound, report, OUTSIDE_RANGE};
use ncfree::generator::{DriftVariant, GeneratorSpec, MajorantGenerator};
use ncfree::ncalg::{coefficient_majorant, NCPolynomial, Word};
use ncfree::qfock::{trace_word, FockVector, QParams, QTrace};
use ncfree::simulate::{empirical_moments, run_sde, semicircular_ensemble, trajectory_rng, SdeConfig};
use ncfree::trace::WordTrace;
use ncfree::wick::{q_threshold, xi_expansion};
use ncfree::deriv::DerivationSpec;
use num_complex::Complex64;
use proptest::prelude::*;

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=n, 0..=max_len).prop_map(|l| Word::from_letters(&l))
}

fn fock(n: usize, depth: usize) -> impl Strategy<Value = FockVector> {
    let size: usize = (0..depth).map(|k| n.pow(k as u32)).sum();
    prop::collection::vec(-1.0f64..1.0, size).prop_map(move |xs| {
        // top level left empty so creation stays inside the truncation
        let mut v = FockVector::zero(n, depth);
        let mut it = xs.into_iter();
        for k in 0..depth {
            for x in v.level_mut(k) {
                *x = it.next().unwrap();
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_tracial(w in word(3, 4), v in word(3, 4), q in -0.5f64..0.5) {
        let p = QParams::new(q, 3).unwrap();
        prop_assert!((trace_word(&w.concat(&v), p) - trace_word(&v.concat(&w), p)).abs() <= 1e-12);
    }

    #[test]
    fn creation_and_annihilation_are_adjoint(u in fock(2, 4), v in fock(2, 4), j in 1usize..=2, q in -0.6f64..0.6) {
        let mut v = v;
        v.level_mut(4).iter_mut().for_each(|x| *x = 0.5);
        let lhs = u.create(j).inner(&v, q);
        let rhs = u.inner(&v.annihilate(j, q), q);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn different_levels_are_orthogonal(u in word(2, 4), v in word(2, 4), q in -0.9f64..0.9) {
        prop_assume!(u.len() != v.len());
        let p = QParams::new(q, 2).unwrap();
        prop_assert_eq!(ncfree::qfock::q_inner_brute(&u, &v, p).unwrap(), 0.0);
    }

    #[test]
    fn generator_is_linear(a in -3.0f64..3.0, w1 in word(2, 4), w2 in word(2, 4)) {
        let tau = QTrace::new(QParams::new(0.0, 2).unwrap());
        let spec = GeneratorSpec::ornstein_uhlenbeck(2, DriftVariant::Ito);
        let c = Complex64::new(a, 0.0);
        let f = NCPolynomial::monomial(2, w1, Complex64::new(1.0, 0.0)).unwrap();
        let g = NCPolynomial::monomial(2, w2, Complex64::new(1.0, 0.0)).unwrap();
        let lhs = spec.apply(&f.try_add(&g.scale(&c)).unwrap(), &tau).unwrap();
        let rhs = spec.apply(&f, &tau).unwrap().try_add(&spec.apply(&g, &tau).unwrap().scale(&c)).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-12);
    }

    #[test]
    fn dimension_bound_decreases_in_q(a in 0.0f64..0.029, b in 0.0f64..0.029) {
        prop_assume!(a < b);
        prop_assert!(delta0_lower_bound(a, 2).unwrap() > delta0_lower_bound(b, 2).unwrap());
        prop_assert!(report(-b, 2).in_range);
    }
}

#[test]
fn reports_outside_threshold_make_no_claim() {
    for q in [1.0 / 34.0, 0.05, 0.1, -0.2] {
        let r = report(q, 2);
        assert!(r.eta_bound.is_none() && !r.exceeds_one);
        assert_eq!(r.notes.len(), 1);
        assert!(r.notes[0].starts_with(OUTSIDE_RANGE));
    }
    assert!(report(0.005, 3).in_range && 0.005 < q_threshold(3));
}

/// `|τ(Lⁿ f)|` and the majorant of `Lⁿ f` at `NR₀` stay below `L̂ⁿφ_f(NR₀)`.
#[test]
fn majorant_dominates_iterated_generator() {
    for q in [0.0, 0.02] {
        let params = QParams::new(q, 2).unwrap();
        let tau = QTrace::new(params);
        let deriv = DerivationSpec::q_semicircular(&xi_expansion(params, 1).unwrap()).unwrap();
        for drift in [DriftVariant::Ito, DriftVariant::Literal] {
            let spec = GeneratorSpec::from_derivation(&deriv, &tau, drift, 2.0 / (1.0 - q)).unwrap();
            let m = MajorantGenerator::from_spec(&spec).unwrap();
            for w in Word::all_up_to(4, 2).filter(|w| !w.is_empty()) {
                let f = NCPolynomial::monomial(2, w.clone(), Complex64::new(1.0, 0.0)).unwrap();
                let phi = coefficient_majorant(&f);
                let mut cur = f;
                for n in 1..=3 {
                    cur = spec.apply(&cur, &tau).unwrap();
                    let bound = m.iterated_bound(&phi, n).unwrap();
                    let t = tau.trace_poly(&cur).norm();
                    let s = coefficient_majorant(&cur).eval(&[m.bound_point()]).unwrap();
                    assert!(t <= bound && s <= bound, "q={q} {drift:?} {w} n={n}: {t} {s} > {bound}");
                }
            }
        }
    }
}

#[test]
fn initial_moments_are_catalan() {
    let k = 100;
    let seeds = 6;
    let mut acc = [0.0; 3];
    let mut sq = [0.0; 3];
    for s in 0..seeds {
        let x = semicircular_ensemble(1, k, &mut trajectory_rng(21, s));
        let m = empirical_moments(&x, 6).unwrap();
        for (i, deg) in [2usize, 4, 6].iter().enumerate() {
            let v = m[deg - 1].1;
            acc[i] += v / seeds as f64;
            sq[i] += v * v / seeds as f64;
        }
    }
    for (i, c) in [1.0, 2.0, 5.0].iter().enumerate() {
        let sigma = (sq[i] - acc[i] * acc[i]).max(0.0).sqrt();
        assert!((acc[i] - c).abs() <= 4.0 / k as f64 * c + 3.0 * sigma + 1e-3, "{i}: {}", acc[i]);
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let spec = GeneratorSpec::ornstein_uhlenbeck(2, DriftVariant::Ito);
    let cfg = SdeConfig { dt: 1e-2, horizon: 0.1, k: 12, seed: 3, moment_degree: 3, ..SdeConfig::default() };
    let a = run_sde(&spec, &cfg, None, 1).unwrap();
    let b = run_sde(&spec, &cfg, None, 1).unwrap();
    assert_eq!(a.moments, b.moments);
    assert_eq!(a.last, b.last);
}
