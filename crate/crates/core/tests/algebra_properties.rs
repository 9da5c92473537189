use ncfree::deriv::DerivationSpec;
use ncfree::ncalg::tensor::{first_quotient, hash_in, hash_out, partial_trace_right, second_quotient};
use ncfree::ncalg::{coefficient_majorant, seminorm_rho, NCPolynomial, Tensor2Series, Word};
use ncfree::qfock::{QParams, QTrace};
use ncfree::trace::ZeroTrace;
use ncfree::wick::xi_expansion;
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 2;

fn letters(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=N, 0..=max_len).prop_map(|l| Word::from_letters(&l))
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-3i32..=3, -2i32..=2).prop_map(|(re, im)| Complex64::new(re as f64, im as f64))
}

fn poly(max_len: usize) -> impl Strategy<Value = NCPolynomial> {
    prop::collection::vec((letters(max_len), coeff()), 0..5)
        .prop_map(|terms| NCPolynomial::from_terms(N, terms).unwrap())
}

fn tensor(max_len: usize) -> impl Strategy<Value = Tensor2Series> {
    prop::collection::vec(((letters(max_len), letters(max_len)), coeff()), 0..4)
        .prop_map(|terms| Tensor2Series::from_terms(N, terms).unwrap())
}

fn one() -> NCPolynomial {
    NCPolynomial::one(N)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seminorm_is_submultiplicative(f in poly(6), g in poly(6), rho in 0.1f64..3.0) {
        let fg = f.multiply(&g).unwrap();
        let lhs = seminorm_rho(&fg, rho);
        let rhs = seminorm_rho(&f, rho) * seminorm_rho(&g, rho);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn second_quotient_coefficients_are_bounded(f in poly(6), i in 1..=N, j in 1..=N) {
        let cf = coefficient_majorant(&f);
        let d = coefficient_majorant(&second_quotient(&f, i, j).unwrap());
        for (deg, c) in d.iter() {
            let (a, b) = (deg[0], deg[1]);
            prop_assert!(*c <= (b + 1) as f64 * cf.coeff(&[a + b + 2]));
        }
    }

    #[test]
    fn hash_products_are_dominated(psi in tensor(3), theta in tensor(3)) {
        let (mp, mt) = (coefficient_majorant(&psi), coefficient_majorant(&theta));
        let inner = coefficient_majorant(&hash_in(&psi, &theta).unwrap());
        prop_assert!(inner.dominated_by(&mp.multiply(&mt).unwrap()).unwrap());
        let outer = coefficient_majorant(&hash_out(&psi, &theta).unwrap());
        prop_assert!(outer.dominated_by(&mp.swap().multiply(&mt).unwrap()).unwrap());
    }

    #[test]
    fn trace_at_zero_keeps_empty_right_legs(theta in tensor(3)) {
        let got = partial_trace_right(&theta, &ZeroTrace);
        let expected = NCPolynomial::from_terms(
            N,
            theta.iter().filter(|((_, b), _)| b.is_empty()).map(|((a, _), c)| (a.clone(), *c)),
        ).unwrap();
        prop_assert_eq!(got.distance(&expected), 0.0);
    }

    #[test]
    fn operations_are_linear(psi in tensor(3), t1 in tensor(3), t2 in tensor(3), f in poly(5), g in poly(5), a in coeff()) {
        let comb = t1.try_add(&t2.scale(&a)).unwrap();
        for op in [hash_in, hash_out] {
            let lhs = op(&psi, &comb).unwrap();
            let rhs = op(&psi, &t1).unwrap().try_add(&op(&psi, &t2).unwrap().scale(&a)).unwrap();
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
        }
        let fg = f.try_add(&g.scale(&a)).unwrap();
        for j in 1..=N {
            let lhs = first_quotient(&fg, j).unwrap();
            let rhs = first_quotient(&f, j).unwrap().try_add(&first_quotient(&g, j).unwrap().scale(&a)).unwrap();
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn derivations_obey_leibniz(f in poly(3), g in poly(3), j in 1..=N) {
        let xi = xi_expansion(QParams::new(0.1, N).unwrap(), 1).unwrap();
        for spec in [DerivationSpec::difference_quotient(N), DerivationSpec::q_semicircular(&xi).unwrap()] {
            let lhs = spec.apply(j, &f.multiply(&g).unwrap()).unwrap();
            let rhs = spec.apply(j, &f).unwrap().bimodule_poly(&one(), &g).unwrap()
                .try_add(&spec.apply(j, &g).unwrap().bimodule_poly(&f, &one()).unwrap()).unwrap();
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
            let star = spec.apply(j, &f.adjoint()).unwrap();
            prop_assert!(star.distance(&spec.apply(j, &f).unwrap().dagger()) <= 1e-12);
        }
    }

    #[test]
    fn difference_quotient_adjoint_is_exact_for_semicircular(eta in tensor(2), p in poly(3), j in 1..=N) {
        let tau = QTrace::new(QParams::new(0.0, N).unwrap());
        let zeta = (1..=N).map(|k| NCPolynomial::generator(N, k).unwrap()).collect();
        let spec = DerivationSpec::difference_quotient(N).with_zeta(zeta).unwrap();
        prop_assert!(spec.adjoint_residual(j, &eta, &p, &tau).unwrap() <= 1e-9);
    }
}
