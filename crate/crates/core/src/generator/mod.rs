//! The trace-level generator of the free SDE
//! `dX_j = Σ_k Ψ_jk(X) # dS_k − ½ ξ_j(X) dt`, its majorant, and the
//! stationarity certificate.

mod fock;
mod majorant;

pub use fock::KernelTraceBackend;
pub use majorant::MajorantGenerator;

use num_complex::Complex64;

use crate::deriv::DerivationSpec;
use crate::error::{Error, Result};
use crate::ncalg::tensor::{first_quotient, hash_in, hash_out, partial_trace_right, second_quotient};
use crate::ncalg::{NCPolynomial, Tensor2Series, Word};
use crate::trace::WordTrace;

/// First-order part of the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DriftVariant {
    /// `−½ Σ_j Σ_{A⊗B ∈ ∂_j f} A ξ_j B`, the Itô first-order term.
    #[default]
    Ito,
    /// `−½ Σ_j ξ_j f`, a plain left product.
    Literal,
}

impl std::str::FromStr for DriftVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ito" => Ok(DriftVariant::Ito),
            "literal" => Ok(DriftVariant::Literal),
            other => Err(Error::InvalidParameter(format!("unknown drift variant `{other}`"))),
        }
    }
}

/// Coefficients of the SDE: diffusion matrix `Ψ` and drift `ξ`.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    alphabet: usize,
    /// `psi[j][k] = Ψ_{j+1,k+1}`.
    psi: Vec<Vec<Tensor2Series>>,
    xi: Vec<NCPolynomial>,
    drift: DriftVariant,
    r0: f64,
}

impl GeneratorSpec {
    /// `r0` bounds the trace on words: `|τ(X_w)| ≤ r0^{|w|}`.
    pub fn new(psi: Vec<Vec<Tensor2Series>>, xi: Vec<NCPolynomial>, drift: DriftVariant, r0: f64) -> Result<Self> {
        let alphabet = xi.len();
        if psi.len() != alphabet || psi.iter().any(|row| row.len() != alphabet) {
            return Err(Error::InvalidParameter(format!(
                "diffusion matrix must be {alphabet}×{alphabet}"
            )));
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter(format!("trace radius must be positive, got {r0}")));
        }
        Ok(GeneratorSpec {
            alphabet,
            psi,
            xi,
            drift,
            r0,
        })
    }

    /// `Ψ_jk = ∂_j(X_k)` and `ξ_j = Σ_s ∂_s^*∂_s(X_j)`.
    pub fn from_derivation<T: WordTrace<Complex64> + ?Sized>(
        spec: &DerivationSpec,
        tau: &T,
        drift: DriftVariant,
        r0: f64,
    ) -> Result<Self> {
        let n = spec.alphabet();
        let psi = (1..=n)
            .map(|j| (1..=n).map(|k| spec.value(j, k).clone()).collect())
            .collect();
        let xi = spec.conjugate_variables(tau)?;
        Self::new(psi, xi, drift, r0)
    }

    /// The free Ornstein–Uhlenbeck process: `Ψ = I`, `ξ_j = X_j`; its
    /// stationary law is the free semicircular family (`R₀ = 2`).
    pub fn ornstein_uhlenbeck(alphabet: usize, drift: DriftVariant) -> Self {
        let psi = (0..alphabet)
            .map(|j| {
                (0..alphabet)
                    .map(|k| {
                        if j == k {
                            Tensor2Series::identity(alphabet)
                        } else {
                            Tensor2Series::zero(alphabet)
                        }
                    })
                    .collect()
            })
            .collect();
        let xi = (1..=alphabet)
            .map(|j| NCPolynomial::generator(alphabet, j).expect("letter in range"))
            .collect();
        GeneratorSpec {
            alphabet,
            psi,
            xi,
            drift,
            r0: 2.0,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn psi(&self, j: usize, k: usize) -> &Tensor2Series {
        &self.psi[j - 1][k - 1]
    }

    pub fn xi(&self) -> &[NCPolynomial] {
        &self.xi
    }

    pub fn drift(&self) -> DriftVariant {
        self.drift
    }

    pub fn with_drift(mut self, drift: DriftVariant) -> Self {
        self.drift = drift;
        self
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `(1⊗τ)(Σ_{ijk} Ψ_jk #_in (Ψ_ki #_out D_ij f))`.
    pub fn second_order<T: WordTrace<Complex64> + ?Sized>(&self, f: &NCPolynomial, tau: &T) -> Result<NCPolynomial> {
        let n = self.alphabet;
        let mut acc = Tensor2Series::zero(n);
        let one = Complex64::new(1.0, 0.0);
        for i in 1..=n {
            for j in 1..=n {
                let d = second_quotient(f, i, j)?;
                if d.is_zero() {
                    continue;
                }
                for k in 1..=n {
                    let (pjk, pki) = (self.psi(j, k), self.psi(k, i));
                    if pjk.is_zero() || pki.is_zero() {
                        continue;
                    }
                    acc.add_scaled(&hash_in(pjk, &hash_out(pki, &d)?)?, &one)?;
                }
            }
        }
        Ok(partial_trace_right(&acc, tau))
    }

    /// The first-order term for the configured drift variant.
    pub fn first_order(&self, f: &NCPolynomial) -> Result<NCPolynomial> {
        let n = self.alphabet;
        let half = Complex64::new(-0.5, 0.0);
        let mut out = NCPolynomial::zero(n);
        for j in 1..=n {
            let xi = &self.xi[j - 1];
            let term = match self.drift {
                DriftVariant::Ito => crate::ncalg::tensor::sandwich(&first_quotient(f, j)?, xi)?,
                DriftVariant::Literal => xi.multiply(f)?,
            };
            out.add_scaled(&term, &half)?;
        }
        Ok(out)
    }

    /// `L f`.
    pub fn apply<T: WordTrace<Complex64> + ?Sized>(&self, f: &NCPolynomial, tau: &T) -> Result<NCPolynomial> {
        let mut out = self.second_order(f, tau)?;
        out.add_scaled(&self.first_order(f)?, &Complex64::new(1.0, 0.0))?;
        Ok(out)
    }

    /// `|τ(L X_w)|` for every word of length `1..=degree`, in canonical order.
    pub fn stationarity_residuals<T: WordTrace<Complex64> + ?Sized>(
        &self,
        degree: usize,
        tau: &T,
    ) -> Result<Vec<(Word, f64)>> {
        Word::all_up_to(degree, self.alphabet)
            .filter(|w| !w.is_empty())
            .map(|w| {
                let f = NCPolynomial::monomial(self.alphabet, w.clone(), Complex64::new(1.0, 0.0))?;
                let lf = self.apply(&f, tau)?;
                Ok((w, tau.trace_poly(&lf).norm()))
            })
            .collect()
    }
}

/// Largest residual of a residual table (0 when empty).
pub fn max_residual(table: &[(Word, f64)]) -> f64 {
    table.iter().map(|(_, r)| *r).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfock::{QParams, QTrace};

    fn x2() -> NCPolynomial {
        NCPolynomial::monomial(1, Word::repeat(1, 2), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn ornstein_uhlenbeck_examples() {
        let tau = QTrace::new(QParams::new(0.0, 1).unwrap());
        let ito = GeneratorSpec::ornstein_uhlenbeck(1, DriftVariant::Ito);
        let lf = ito.apply(&x2(), &tau).unwrap();
        assert_eq!(lf.coeff(&Word::empty()), Complex64::new(1.0, 0.0));
        assert_eq!(lf.coeff(&Word::repeat(1, 2)), Complex64::new(-1.0, 0.0));
        assert_eq!(lf.len(), 2);
        assert_eq!(tau.trace_poly(&lf), Complex64::new(0.0, 0.0));

        let lit = ito.clone().with_drift(DriftVariant::Literal);
        let lf = lit.apply(&x2(), &tau).unwrap();
        assert_eq!(lf.coeff(&Word::repeat(1, 3)), Complex64::new(-0.5, 0.0));
        assert_eq!(tau.trace_poly(&lf), Complex64::new(1.0, 0.0));

        let one = NCPolynomial::one(1);
        assert!(ito.apply(&one, &tau).unwrap().is_zero());
    }

    #[test]
    fn ornstein_uhlenbeck_is_stationary_for_semicircular_law() {
        let tau = QTrace::new(QParams::new(0.0, 2).unwrap());
        let ito = GeneratorSpec::ornstein_uhlenbeck(2, DriftVariant::Ito);
        assert!(max_residual(&ito.stationarity_residuals(6, &tau).unwrap()) < 1e-12);
        let lit = ito.with_drift(DriftVariant::Literal);
        assert!(max_residual(&lit.stationarity_residuals(2, &tau).unwrap()) >= 0.5);
    }

    #[test]
    fn drift_variant_parses() {
        assert_eq!("ito".parse::<DriftVariant>().unwrap(), DriftVariant::Ito);
        assert!("other".parse::<DriftVariant>().is_err());
    }
}
