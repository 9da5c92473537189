use super::GeneratorSpec;
use crate::error::{Error, Result};
use crate::ncalg::{coefficient_majorant, MajorantSeries};

/// The majorant operator `L̂φ = α₁ φ'' + α₂ φ` dominating the generator on
/// coefficient majorants.
#[derive(Clone, Debug)]
pub struct MajorantGenerator {
    alpha1: MajorantSeries,
    alpha2: MajorantSeries,
    alphabet: usize,
    r0: f64,
}

impl MajorantGenerator {
    pub fn new(alpha1: MajorantSeries, alpha2: MajorantSeries, alphabet: usize, r0: f64) -> Result<Self> {
        if alpha1.arity() != 1 || alpha2.arity() != 1 {
            return Err(Error::ArityMismatch {
                left: 1,
                right: alpha1.arity().max(alpha2.arity()),
            });
        }
        Ok(MajorantGenerator {
            alpha1,
            alpha2,
            alphabet,
            r0,
        })
    }

    /// `α₁(z) = Σ_{ijk} φ_{Ψ_jk}(z, NR₀) φ_{Ψ_ki}(NR₀, z)` and
    /// `α₂(z) = ½ Σ_j φ_{ξ_j}(z)`.
    pub fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        let n = spec.alphabet();
        let c = n as f64 * spec.r0();
        let mut alpha1 = MajorantSeries::new(1, 0);
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    let a = coefficient_majorant(spec.psi(j, k)).substitute(1, c)?;
                    let b = coefficient_majorant(spec.psi(k, i)).substitute(0, c)?;
                    alpha1 = alpha1.add(&a.multiply(&b)?)?;
                }
            }
        }
        let mut alpha2 = MajorantSeries::new(1, 0);
        for xi in spec.xi() {
            alpha2 = alpha2.add(&coefficient_majorant(xi))?;
        }
        Self::new(alpha1, alpha2.scale(0.5), n, spec.r0())
    }

    pub fn alpha1(&self) -> &MajorantSeries {
        &self.alpha1
    }

    pub fn alpha2(&self) -> &MajorantSeries {
        &self.alpha2
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `N R₀`, the point at which bounds are evaluated.
    pub fn bound_point(&self) -> f64 {
        self.alphabet as f64 * self.r0
    }

    /// `L̂φ`.
    pub fn apply(&self, phi: &MajorantSeries) -> Result<MajorantSeries> {
        let second = self.alpha1.multiply(&phi.derivative(0).derivative(0))?;
        second.add(&self.alpha2.multiply(phi)?)
    }

    /// `L̂ⁿφ`.
    pub fn iterate(&self, phi: &MajorantSeries, n: usize) -> Result<MajorantSeries> {
        let mut cur = phi.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `L̂ⁿφ(NR₀)`, which dominates `|τ(Lⁿ f)|` when `φ = φ_f`.
    pub fn iterated_bound(&self, phi: &MajorantSeries, n: usize) -> Result<f64> {
        self.iterate(phi, n)?.eval(&[self.bound_point()])
    }

    fn check_radius(&self, rho: f64) -> Result<()> {
        if !(rho > self.r0) {
            return Err(Error::InvalidParameter(format!(
                "need ρ > R₀, got ρ = {rho}, R₀ = {}",
                self.r0
            )));
        }
        Ok(())
    }

    /// `K = max(α₁(ρ), α₂(ρ))`, the supremum of `|α_i|` on `|z| = ρ` since the
    /// coefficients are non-negative.
    pub fn k_constant(&self, rho: f64) -> Result<f64> {
        self.check_radius(rho)?;
        let k = self.alpha1.eval(&[rho])?.max(self.alpha2.eval(&[rho])?);
        if !k.is_finite() {
            return Err(Error::Divergent { radius: rho, value: k });
        }
        Ok(k)
    }

    /// `C = φ(ρ) / (2π(ρ − R₀))`.
    pub fn c_constant(&self, phi: &MajorantSeries, rho: f64) -> Result<f64> {
        self.check_radius(rho)?;
        let v = phi.eval(&[rho])?;
        if !v.is_finite() {
            return Err(Error::Divergent { radius: rho, value: v });
        }
        Ok(v / (2.0 * std::f64::consts::PI * (rho - self.r0)))
    }

    /// `C n! (2K/(ρ − R₀))ⁿ`.
    pub fn cauchy_bound(&self, phi: &MajorantSeries, rho: f64, n: usize) -> Result<f64> {
        let k = self.k_constant(rho)?;
        let c = self.c_constant(phi, rho)?;
        let ratio = 2.0 * k / (rho - self.r0);
        let mut acc = c;
        for m in 1..=n {
            acc *= m as f64 * ratio;
        }
        Ok(acc)
    }

    /// `t₀ = (ρ − R₀)/(2K)`: for `t < t₀` the series `Σ tⁿ/n! · C_n` converges.
    pub fn stationarity_time(&self, rho: f64) -> Result<f64> {
        Ok((rho - self.r0) / (2.0 * self.k_constant(rho)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::DriftVariant;

    fn semicircle_one() -> MajorantGenerator {
        MajorantGenerator::from_spec(&GeneratorSpec::ornstein_uhlenbeck(1, DriftVariant::Ito)).unwrap()
    }

    #[test]
    fn alphas_for_ornstein_uhlenbeck() {
        let m = semicircle_one();
        assert_eq!(m.alpha1().coeff(&[0]), 1.0);
        assert_eq!(m.alpha1().iter().count(), 1);
        assert_eq!(m.alpha2().coeff(&[1]), 0.5);
    }

    #[test]
    fn apply_example() {
        let m = semicircle_one();
        let phi = MajorantSeries::from_coeffs(1, 2, [(vec![2], 1.0)]).unwrap();
        let l = m.apply(&phi).unwrap();
        assert_eq!(l.coeff(&[0]), 2.0);
        assert_eq!(l.coeff(&[3]), 0.5);
        assert_eq!(m.iterated_bound(&phi, 1).unwrap(), 6.0);
        assert_eq!(m.iterated_bound(&MajorantSeries::new(1, 0), 3).unwrap(), 0.0);
    }

    #[test]
    fn stationarity_time_example() {
        let m = semicircle_one();
        assert_eq!(m.k_constant(3.0).unwrap(), 1.5);
        assert_eq!(m.stationarity_time(3.0).unwrap(), 1.0 / 3.0);
        assert!(m.stationarity_time(2.0).is_err());
        let phi = MajorantSeries::from_coeffs(1, 2, [(vec![2], 1.0)]).unwrap();
        let mut prev = 0.0;
        for n in 0..10 {
            let b = m.cauchy_bound(&phi, 3.0, n).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn divergent_alpha_is_reported() {
        let tail = MajorantSeries::geometric(1.0, 1.0);
        let m = MajorantGenerator::new(tail, MajorantSeries::new(1, 0), 1, 2.0).unwrap();
        assert!(matches!(m.k_constant(3.0), Err(Error::Divergent { .. })));
    }
}
