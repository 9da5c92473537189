//! Derivations on polynomials given by their values on generators, their
//! adjoints, conjugate variables and free Fisher information.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ncalg::tensor::{contract_middle, first_leg_quotient, hash_in_first, hash_in_second, last_leg_quotient, sandwich};
use crate::ncalg::{Coeff, NCPolynomial, Tensor2Series, Tensor3Series, Word};
use crate::trace::WordTrace;
use crate::wick::XiExpansion;

/// A derivation `∂ = (∂_1, …, ∂_N)` into the tensor-square bimodule,
/// determined by `∂_j(X_i)`, together with `ζ_j = ∂_j^*(1⊗1)` when known.
#[derive(Clone, Debug)]
pub struct DerivationSpec<C: Coeff = Complex64> {
    alphabet: usize,
    /// `values[j][i] = ∂_j(X_i)` (0-based indices).
    values: Vec<Vec<Tensor2Series<C>>>,
    zeta: Option<Vec<NCPolynomial<C>>>,
}

impl<C: Coeff> DerivationSpec<C> {
    /// `values[j][i]` is `∂_{j+1}(X_{i+1})`.
    pub fn new(alphabet: usize, values: Vec<Vec<Tensor2Series<C>>>) -> Result<Self> {
        if values.len() != alphabet || values.iter().any(|row| row.len() != alphabet) {
            return Err(Error::InvalidParameter(format!(
                "derivation needs an {alphabet}×{alphabet} table of values"
            )));
        }
        for row in &values {
            for v in row {
                if v.alphabet() != alphabet {
                    return Err(Error::AlphabetMismatch {
                        left: alphabet,
                        right: v.alphabet(),
                    });
                }
            }
        }
        Ok(DerivationSpec {
            alphabet,
            values,
            zeta: None,
        })
    }

    pub fn zero(alphabet: usize) -> Self {
        let values = vec![vec![Tensor2Series::zero(alphabet); alphabet]; alphabet];
        DerivationSpec {
            alphabet,
            values,
            zeta: None,
        }
    }

    /// `∂_j(X_j) = psi`, all other values zero.
    pub fn diagonal(alphabet: usize, psi: &Tensor2Series<C>) -> Result<Self> {
        let mut values = vec![vec![Tensor2Series::zero(alphabet); alphabet]; alphabet];
        for (j, row) in values.iter_mut().enumerate() {
            row[j] = psi.clone();
        }
        Self::new(alphabet, values)
    }

    /// The free difference quotient, `∂_j(X_i) = δ_{ij} 1⊗1`.
    pub fn difference_quotient(alphabet: usize) -> Self {
        Self::diagonal(alphabet, &Tensor2Series::identity(alphabet)).expect("square table")
    }

    pub fn with_zeta(mut self, zeta: Vec<NCPolynomial<C>>) -> Result<Self> {
        if zeta.len() != self.alphabet {
            return Err(Error::InvalidParameter(format!(
                "expected {} values of ζ, got {}",
                self.alphabet,
                zeta.len()
            )));
        }
        self.zeta = Some(zeta);
        Ok(self)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// `∂_j(X_i)`, 1-based.
    pub fn value(&self, j: usize, i: usize) -> &Tensor2Series<C> {
        &self.values[j - 1][i - 1]
    }

    pub fn zeta(&self) -> Option<&[NCPolynomial<C>]> {
        self.zeta.as_deref()
    }

    fn check(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.alphabet {
            return Err(Error::LetterOutOfRange {
                letter: j,
                alphabet: self.alphabet,
            });
        }
        Ok(())
    }

    /// `∂_j(X_w) = Σ_k X_{w_<k} · ∂_j(X_{w_k}) · X_{w_>k}`.
    pub fn apply_word(&self, j: usize, w: &Word) -> Result<Tensor2Series<C>> {
        self.check(j)?;
        let mut out = Tensor2Series::zero(self.alphabet);
        for k in 0..w.len() {
            let v = &self.values[j - 1][w.letter(k) - 1];
            if v.is_zero() {
                continue;
            }
            out.add_scaled(&v.bimodule(&w.prefix(k), &w.suffix(k + 1))?, &C::one())?;
        }
        Ok(out)
    }

    /// `∂_j(f)` by linearity and the Leibniz rule.
    pub fn apply(&self, j: usize, f: &NCPolynomial<C>) -> Result<Tensor2Series<C>> {
        self.check(j)?;
        let mut out = Tensor2Series::zero(self.alphabet);
        for (w, c) in f.iter() {
            out.add_scaled(&self.apply_word(j, w)?, c)?;
        }
        Ok(out)
    }

    fn zeta_of(&self, j: usize) -> Result<&NCPolynomial<C>> {
        self.zeta
            .as_ref()
            .map(|z| &z[j - 1])
            .ok_or(Error::MissingZeta)
    }

    /// `∂_j^*(X_a ⊗ X_b) = X_a ζ_j X_b − (1⊗τ)[∂_j X_a]·X_b − X_a·(τ⊗1)[∂_j X_b]`.
    pub fn adjoint_elementary<T: WordTrace<C> + ?Sized>(
        &self,
        j: usize,
        a: &Word,
        b: &Word,
        tau: &T,
    ) -> Result<NCPolynomial<C>> {
        self.check(j)?;
        let zeta = self.zeta_of(j)?;
        let mut out = zeta.sandwich_words(a, b)?;
        let minus = -C::one();
        for ((l, r), c) in self.apply_word(j, a)?.iter() {
            let t = tau.trace_word(r);
            out.push(l.concat(b), minus.clone() * c.clone() * t)?;
        }
        for ((l, r), c) in self.apply_word(j, b)?.iter() {
            let t = tau.trace_word(l);
            out.push(a.concat(r), minus.clone() * c.clone() * t)?;
        }
        Ok(out)
    }

    /// `∂_j^*(η)`, term by term.
    pub fn adjoint<T: WordTrace<C> + ?Sized>(&self, j: usize, eta: &Tensor2Series<C>, tau: &T) -> Result<NCPolynomial<C>> {
        let mut out = NCPolynomial::zero(self.alphabet);
        for ((a, b), c) in eta.iter() {
            out.add_scaled(&self.adjoint_elementary(j, a, b, tau)?, c)?;
        }
        Ok(out)
    }

    /// `∂_j^*(η)` through triple tensors: the sandwich `m(η)` with `ζ_j`,
    /// minus the middle-traced contractions of
    /// `Σ_s ∂_j(X_s) #_in^(1) D_1^(s) η` and `Σ_s ∂_j(X_s) #_in^(2) D_2^(s) η`.
    pub fn adjoint_via_quotients<T: WordTrace<C> + ?Sized>(
        &self,
        j: usize,
        eta: &Tensor2Series<C>,
        tau: &T,
    ) -> Result<NCPolynomial<C>> {
        self.check(j)?;
        let mut out = sandwich(eta, self.zeta_of(j)?)?;
        let mut first = Tensor3Series::zero(self.alphabet);
        let mut second = Tensor3Series::zero(self.alphabet);
        for s in 1..=self.alphabet {
            let psi = &self.values[j - 1][s - 1];
            if psi.is_zero() {
                continue;
            }
            first.add_scaled(&hash_in_first(psi, &first_leg_quotient(eta, s)?)?, &C::one())?;
            second.add_scaled(&hash_in_second(psi, &last_leg_quotient(eta, s)?)?, &C::one())?;
        }
        let minus = -C::one();
        out.add_scaled(&contract_middle(&first, tau), &minus)?;
        out.add_scaled(&contract_middle(&second, tau), &minus)?;
        Ok(out)
    }

    /// `ξ_j = Σ_s ∂_s^* ∂_s(X_j)`.
    pub fn conjugate_variables<T: WordTrace<C> + ?Sized>(&self, tau: &T) -> Result<Vec<NCPolynomial<C>>> {
        (1..=self.alphabet)
            .map(|j| {
                let mut xi = NCPolynomial::zero(self.alphabet);
                for s in 1..=self.alphabet {
                    xi.add_scaled(&self.adjoint_via_quotients(s, self.value(s, j), tau)?, &C::one())?;
                }
                Ok(xi)
            })
            .collect()
    }

    /// `ξ_j` using the elementary adjoint formula term by term.
    pub fn conjugate_termwise<T: WordTrace<C> + ?Sized>(&self, tau: &T) -> Result<Vec<NCPolynomial<C>>> {
        (1..=self.alphabet)
            .map(|j| {
                let mut xi = NCPolynomial::zero(self.alphabet);
                for s in 1..=self.alphabet {
                    xi.add_scaled(&self.adjoint(s, self.value(s, j), tau)?, &C::one())?;
                }
                Ok(xi)
            })
            .collect()
    }

    /// `|⟨∂_j^* η, p⟩_τ − ⟨η, ∂_j p⟩_{τ⊗τ}|`.
    pub fn adjoint_residual<T: WordTrace<C> + ?Sized>(
        &self,
        j: usize,
        eta: &Tensor2Series<C>,
        p: &NCPolynomial<C>,
        tau: &T,
    ) -> Result<f64> {
        let lhs = l2_inner(&self.adjoint(j, eta, tau)?, p, tau);
        let rhs = tensor_inner(eta, &self.apply(j, p)?, tau);
        Ok((lhs - rhs).modulus())
    }

    /// `Σ_j Σ_i Σ_s ‖(1⊗∂_s + ∂_s⊗1)(∂_i X_j)‖²`.
    pub fn coderivation_norm_sq<T: WordTrace<C> + ?Sized>(&self, tau: &T) -> Result<f64> {
        let mut total = 0.0;
        for row in &self.values {
            for v in row {
                for s in 1..=self.alphabet {
                    let t = self.coderivation(s, v)?;
                    total += tensor3_inner(&t, &t, tau).to_complex().re;
                }
            }
        }
        Ok(total)
    }

    /// `(1⊗∂_s + ∂_s⊗1)(η)`.
    pub fn coderivation(&self, s: usize, eta: &Tensor2Series<C>) -> Result<Tensor3Series<C>> {
        let mut out = Tensor3Series::zero(self.alphabet);
        for ((a, b), c) in eta.iter() {
            for ((l, r), d) in self.apply_word(s, a)?.iter() {
                out.push((l.clone(), r.clone(), b.clone()), c.clone() * d.clone())?;
            }
            for ((l, r), d) in self.apply_word(s, b)?.iter() {
                out.push((a.clone(), l.clone(), r.clone()), c.clone() * d.clone())?;
            }
        }
        Ok(out)
    }
}

impl DerivationSpec<Complex64> {
    /// `∂_j(X_j) = Ξ_D` with `ζ_j = X_j`: the derivation whose conjugate
    /// data describe the q-semicircular family.
    pub fn q_semicircular(xi: &XiExpansion) -> Result<Self> {
        let n = xi.params().alphabet;
        let zeta = (1..=n)
            .map(|j| NCPolynomial::generator(n, j))
            .collect::<Result<Vec<_>>>()?;
        Self::diagonal(n, xi.terms())?.with_zeta(zeta)
    }
}

/// `⟨f, g⟩_τ = τ(f^* g)`.
pub fn l2_inner<C: Coeff, T: WordTrace<C> + ?Sized>(f: &NCPolynomial<C>, g: &NCPolynomial<C>, tau: &T) -> C {
    let mut acc = C::zero();
    for (a, ca) in f.iter() {
        let ra = a.reversed();
        for (b, cb) in g.iter() {
            acc = acc + ca.conj() * cb.clone() * tau.trace_word(&ra.concat(b));
        }
    }
    acc
}

/// `⟨η, θ⟩ = (τ⊗τ)(η^* θ)` with the componentwise involution.
pub fn tensor_inner<C: Coeff, T: WordTrace<C> + ?Sized>(eta: &Tensor2Series<C>, theta: &Tensor2Series<C>, tau: &T) -> C {
    let mut acc = C::zero();
    for ((a, b), c) in eta.iter() {
        let (ra, rb) = (a.reversed(), b.reversed());
        for ((x, y), d) in theta.iter() {
            let t = tau.trace_word(&ra.concat(x)) * tau.trace_word(&rb.concat(y));
            acc = acc + c.conj() * d.clone() * t;
        }
    }
    acc
}

fn tensor3_inner<C: Coeff, T: WordTrace<C> + ?Sized>(eta: &Tensor3Series<C>, theta: &Tensor3Series<C>, tau: &T) -> C {
    let mut acc = C::zero();
    for ((a, b, e), c) in eta.iter() {
        let (ra, rb, re) = (a.reversed(), b.reversed(), e.reversed());
        for ((x, y, z), d) in theta.iter() {
            let t = tau.trace_word(&ra.concat(x)) * tau.trace_word(&rb.concat(y)) * tau.trace_word(&re.concat(z));
            acc = acc + c.conj() * d.clone() * t;
        }
    }
    acc
}

/// Free Fisher information and the transport constant of a derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherReport {
    /// `‖ξ_j‖²_τ` for each generator.
    pub xi_norms_sq: Vec<f64>,
    /// `Φ^* = Σ_j ‖ξ_j‖²`.
    pub phi_star: f64,
    /// `Σ ‖(1⊗∂+∂⊗1)(∂X_j)‖²`.
    pub coderivation_sq: f64,
    /// `C = ½ (Φ^* + coderivation term)^{1/2}`.
    pub constant: f64,
}

/// Fisher information `Φ^*` and the constant `C` bounding the Wasserstein
/// distance travelled per unit time.
pub fn fisher_and_wasserstein_const<T: WordTrace<Complex64> + ?Sized>(
    spec: &DerivationSpec<Complex64>,
    tau: &T,
) -> Result<FisherReport> {
    let xi = spec.conjugate_variables(tau)?;
    let xi_norms_sq: Vec<f64> = xi.iter().map(|x| l2_inner(x, x, tau).re).collect();
    let phi_star: f64 = xi_norms_sq.iter().sum();
    let coderivation_sq = spec.coderivation_norm_sq(tau)?;
    Ok(FisherReport {
        xi_norms_sq,
        phi_star,
        coderivation_sq,
        constant: 0.5 * (phi_star + coderivation_sq).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::rational;
    use crate::qfock::{MomentTrace, QParams, QTrace};
    use crate::wick::xi_expansion;
    use num_rational::BigRational;

    type Q = BigRational;

    fn w(l: &[usize]) -> Word {
        Word::from_letters(l)
    }

    fn semicircular_dq(n: usize) -> DerivationSpec<Q> {
        let zeta = (1..=n).map(|j| NCPolynomial::generator(n, j).unwrap()).collect();
        DerivationSpec::difference_quotient(n).with_zeta(zeta).unwrap()
    }

    fn free() -> MomentTrace<Q> {
        MomentTrace { q: rational(0, 1) }
    }

    #[test]
    fn derivation_examples() {
        let d = DerivationSpec::<Q>::difference_quotient(2);
        let f = NCPolynomial::monomial(2, w(&[1, 2]), rational(1, 1)).unwrap();
        let got = d.apply(1, &f).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got.coeff(&(w(&[]), w(&[2]))), rational(1, 1));
        assert!(d.apply(1, &NCPolynomial::one(2)).unwrap().is_zero());
        let g = NCPolynomial::monomial(2, w(&[1, 1]), rational(1, 1)).unwrap();
        let got = d.apply(1, &g).unwrap();
        assert_eq!(got.coeff(&(w(&[]), w(&[1]))), rational(1, 1));
        assert_eq!(got.coeff(&(w(&[1]), w(&[]))), rational(1, 1));
    }

    #[test]
    fn adjoint_examples() {
        let d = semicircular_dq(1);
        let tau = free();
        let one = d.adjoint_elementary(1, &w(&[]), &w(&[]), &tau).unwrap();
        assert_eq!(one, NCPolynomial::generator(1, 1).unwrap());
        // X ⊗ 1 ↦ X² − 1
        let a = d.adjoint_elementary(1, &w(&[1]), &w(&[]), &tau).unwrap();
        assert_eq!(a.coeff(&w(&[1, 1])), rational(1, 1));
        assert_eq!(a.coeff(&w(&[])), rational(-1, 1));
        // X ⊗ X ↦ X³ − 2X
        let b = d.adjoint_elementary(1, &w(&[1]), &w(&[1]), &tau).unwrap();
        assert_eq!(b.coeff(&w(&[1, 1, 1])), rational(1, 1));
        assert_eq!(b.coeff(&w(&[1])), rational(-2, 1));
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn missing_zeta_is_an_error() {
        let d = DerivationSpec::<Q>::difference_quotient(1);
        assert!(matches!(
            d.adjoint_elementary(1, &w(&[]), &w(&[]), &free()),
            Err(Error::MissingZeta)
        ));
    }

    #[test]
    fn adjoint_is_exact_for_free_difference_quotient() {
        let d = semicircular_dq(2);
        let tau = free();
        let words: Vec<Word> = Word::all_up_to(3, 2).collect();
        for a in &words {
            for b in &words {
                let eta = Tensor2Series::from_terms(2, [((a.clone(), b.clone()), rational(1, 1))]).unwrap();
                for p in Word::all_up_to(4, 2) {
                    let poly = NCPolynomial::monomial(2, p.clone(), rational(1, 1)).unwrap();
                    for j in 1..=2 {
                        let lhs = l2_inner(&d.adjoint(j, &eta, &tau).unwrap(), &poly, &tau);
                        let rhs = tensor_inner(&eta, &d.apply(j, &poly).unwrap(), &tau);
                        assert_eq!(lhs, rhs, "a={a} b={b} p={p} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_route_matches_termwise_adjoint() {
        let params = QParams::new(0.1, 2).unwrap();
        let xi = xi_expansion(params, 2).unwrap();
        let spec = DerivationSpec::q_semicircular(&xi).unwrap();
        let tau = QTrace::new(params);
        let a = spec.conjugate_variables(&tau).unwrap();
        let b = spec.conjugate_termwise(&tau).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.distance(y) < 1e-13);
        }
    }

    #[test]
    fn free_fisher_information() {
        let tau = MomentTrace { q: Complex64::new(0.0, 0.0) };
        for n in 1..=3 {
            let zeta = (1..=n).map(|j| NCPolynomial::generator(n, j).unwrap()).collect();
            let spec = DerivationSpec::difference_quotient(n).with_zeta(zeta).unwrap();
            let r = fisher_and_wasserstein_const(&spec, &tau).unwrap();
            assert_eq!(r.phi_star, n as f64);
            assert_eq!(r.coderivation_sq, 0.0);
            assert_eq!(r.constant, 0.5 * (n as f64).sqrt());
        }
        let zero = DerivationSpec::<Complex64>::zero(2)
            .with_zeta(vec![NCPolynomial::zero(2), NCPolynomial::zero(2)])
            .unwrap();
        let r = fisher_and_wasserstein_const(&zero, &tau).unwrap();
        assert_eq!((r.phi_star, r.constant), (0.0, 0.0));
    }
}
