//! Wick polynomials, level Gram matrices, orthonormal polynomial bases and
//! the truncated expansion of `Ξ = Σ_n q^n P_n`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ncalg::{seminorm_rho, Coeff, NCPolynomial, Tensor2Series, Word};
use crate::qfock::{gram_brute, gram_recursive, FockVector, QParams};

/// Longest word for which Wick polynomials are built.
pub const MAX_WICK_LEN: usize = 12;

/// Smallest Gram eigenvalue accepted when inverting.
pub const MIN_GRAM_EIG: f64 = 1e-10;

/// `W_w`, the polynomial with `W_w(X) Ω = h_w`, from
/// `W_{i_1…i_n} = X_{i_1} W_{i_2…i_n} − Σ_{j≥2} q^{j−2} δ(i_1, i_j) W_{i_2…î_j…i_n}`.
pub fn wick_poly<C: Coeff>(w: &Word, q: &C, alphabet: usize) -> Result<NCPolynomial<C>> {
    if w.len() > MAX_WICK_LEN {
        return Err(Error::LengthGuard {
            what: "Wick polynomial",
            len: w.len(),
            limit: MAX_WICK_LEN,
        });
    }
    if w.max_letter() > alphabet {
        return Err(Error::LetterOutOfRange {
            letter: w.max_letter(),
            alphabet,
        });
    }
    let mut memo = HashMap::new();
    Ok(wick_rec(w, q, alphabet, &mut memo))
}

fn wick_rec<C: Coeff>(
    w: &Word,
    q: &C,
    alphabet: usize,
    memo: &mut HashMap<Word, NCPolynomial<C>>,
) -> NCPolynomial<C> {
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let out = if w.is_empty() {
        NCPolynomial::one(alphabet)
    } else {
        let first = w.letter(0);
        let rest = w.suffix(1);
        let head = Word::single(first);
        let mut out = wick_rec(&rest, q, alphabet, memo)
            .sandwich_words(&head, &Word::empty())
            .expect("uncapped");
        let mut weight = C::one();
        for k in 0..rest.len() {
            if rest.letter(k) == first {
                let lower = wick_rec(&rest.without(k), q, alphabet, memo);
                out = &out - &lower.scale(&weight);
            }
            weight = weight * q.clone();
        }
        out
    };
    memo.insert(w.clone(), out.clone());
    out
}

/// All level-`n` Wick polynomials in word-index order.
pub fn wick_level(n: usize, params: QParams) -> Result<Vec<NCPolynomial>> {
    let q = Complex64::new(params.q, 0.0);
    let mut memo = HashMap::new();
    if n > MAX_WICK_LEN {
        return Err(Error::LengthGuard {
            what: "Wick polynomial",
            len: n,
            limit: MAX_WICK_LEN,
        });
    }
    Ok(Word::all(n, params.alphabet)
        .map(|w| wick_rec(&w, &q, params.alphabet, &mut memo))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramMethod {
    Brute,
    Recursive,
}

/// Level-`n` Gram matrix `[⟨h_v, h_w⟩_q]`, words in index order.
pub fn gram(n: usize, params: QParams, method: GramMethod) -> Result<DMatrix<f64>> {
    match method {
        GramMethod::Brute => gram_brute(n, params),
        GramMethod::Recursive => Ok(gram_recursive(n, params)?.as_ref().clone()),
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigBoundForm {
    /// `((1−|q|)^{−1} Π_{k≥1} (1−|q|^k)/(1+|q|^k))^n`
    Theta,
    /// `((1−2|q|)/(1−|q|)²)^n`
    Simplified,
}

/// Closed-form lower estimates for the smallest eigenvalue of `Γ_n`.
pub fn min_eig_bound(n: usize, q: f64, form: EigBoundForm) -> f64 {
    let a = q.abs();
    let base = match form {
        EigBoundForm::Theta => {
            let mut prod = 1.0 / (1.0 - a);
            let mut ak = a;
            loop {
                let factor = (1.0 - ak) / (1.0 + ak);
                prod *= factor;
                if (1.0 - factor).abs() < 1e-16 {
                    break;
                }
                ak *= a;
            }
            prod
        }
        EigBoundForm::Simplified => (1.0 - 2.0 * a) / ((1.0 - a) * (1.0 - a)),
    };
    base.powi(n as i32)
}

/// `|q| < 1/(4N³+2)`, the range where `Ξ` is known to be analytic on a ball
/// larger than the operator norm.
pub fn q_threshold(alphabet: usize) -> f64 {
    let n = alphabet as f64;
    1.0 / (4.0 * n * n * n + 2.0)
}

fn eigen_checked(g: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(g.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < MIN_GRAM_EIG {
        return Err(Error::NearSingular { min_eig: min });
    }
    Ok(eig)
}

/// `Γ_n^{−1/2}`, the change of basis from Wick to orthonormal polynomials.
pub fn onb_matrix(n: usize, params: QParams) -> Result<DMatrix<f64>> {
    let g = gram_recursive(n, params)?;
    let eig = eigen_checked(&g)?;
    let d = eig.eigenvalues.map(|l| 1.0 / l.max(1e-12).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose())
}

/// `p_i = Σ_j B_{j,i} W_j` with `B = Γ_n^{−1/2}`; the vectors `p_i(X)Ω` are
/// orthonormal.
pub fn onb_polys(n: usize, params: QParams) -> Result<Vec<NCPolynomial>> {
    let b = onb_matrix(n, params)?;
    let wick = wick_level(n, params)?;
    let mut out = Vec::with_capacity(wick.len());
    for i in 0..wick.len() {
        let mut p = NCPolynomial::zero(params.alphabet);
        for (j, w) in wick.iter().enumerate() {
            p.add_scaled(w, &Complex64::new(b[(j, i)], 0.0))?;
        }
        out.push(p);
    }
    Ok(out)
}

/// `Ξ_D = Σ_{n≤D} q^n Σ_i p_i ⊗ p_i^*`, the truncated kernel of
/// `Σ_n q^n P_n`, where `P_n` projects onto tensor level `n`.
#[derive(Clone, Debug)]
pub struct XiExpansion {
    params: QParams,
    cutoff: usize,
    /// Unweighted level kernels `Σ_i p_i ⊗ p_i^*`.
    levels: Vec<Tensor2Series>,
    terms: Tensor2Series,
}

/// Builds `Ξ_D`. Level `n` equals `Σ_{v,w} (Γ_n^{−1})_{vw} W_v ⊗ W_{rev w}`,
/// assembled as a product of coefficient matrices.
pub fn xi_expansion(params: QParams, cutoff: usize) -> Result<XiExpansion> {
    let mut levels = Vec::with_capacity(cutoff + 1);
    let mut terms = Tensor2Series::zero(params.alphabet);
    let mut weight = 1.0;
    for n in 0..=cutoff {
        let level = level_kernel(n, params)?;
        terms.add_scaled(&level, &Complex64::new(weight, 0.0))?;
        levels.push(level);
        weight *= params.q;
    }
    Ok(XiExpansion {
        params,
        cutoff,
        levels,
        terms,
    })
}

fn level_kernel(n: usize, params: QParams) -> Result<Tensor2Series> {
    let alphabet = params.alphabet;
    if n == 0 {
        return Ok(Tensor2Series::identity(alphabet));
    }
    let g = gram_recursive(n, params)?;
    let eig = eigen_checked(&g)?;
    let inv = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l))
        * eig.eigenvectors.transpose();
    let wick = wick_level(n, params)?;
    let words: Vec<Word> = Word::all(n, alphabet).collect();
    // monomial index shared by both legs
    let mut index: BTreeMap<Word, usize> = BTreeMap::new();
    for w in &wick {
        for (m, _) in w.iter() {
            let next = index.len();
            index.entry(m.clone()).or_insert(next);
        }
    }
    let monomials: Vec<Word> = {
        let mut v = vec![Word::empty(); index.len()];
        for (m, &i) in &index {
            v[i] = m.clone();
        }
        v
    };
    let size = words.len();
    let mut left = DMatrix::<f64>::zeros(index.len(), size);
    let mut right = DMatrix::<f64>::zeros(index.len(), size);
    for (j, w) in words.iter().enumerate() {
        for (m, c) in wick[j].iter() {
            left[(index[m], j)] = c.re;
        }
        let rev = w.reversed().index(alphabet);
        for (m, c) in wick[rev].iter() {
            right[(index[m], j)] = c.re;
        }
    }
    let kernel = left * inv * right.transpose();
    let mut out = Tensor2Series::zero(alphabet);
    for a in 0..monomials.len() {
        for b in 0..monomials.len() {
            let c = kernel[(a, b)];
            if c.abs() > 1e-15 {
                out.add_term((monomials[a].clone(), monomials[b].clone()), Complex64::new(c, 0.0))?;
            }
        }
    }
    Ok(out)
}

impl XiExpansion {
    pub fn params(&self) -> QParams {
        self.params
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `Σ_{n≤D} q^n P_n` as a tensor series.
    pub fn terms(&self) -> &Tensor2Series {
        &self.terms
    }

    /// The unweighted level kernel `Σ_i p_i ⊗ p_i^*`.
    pub fn level(&self, n: usize) -> &Tensor2Series {
        &self.levels[n]
    }

    /// Operator-norm size of the omitted levels, `Σ_{n>D} |q|^n`, each `P_n`
    /// being an orthogonal projection.
    pub fn operator_tail(&self) -> f64 {
        let a = self.params.q.abs();
        a.powi(self.cutoff as i32 + 1) / (1.0 - a)
    }

    /// `‖·‖_ρ` of each level kernel.
    pub fn level_norms(&self, rho: f64) -> Vec<f64> {
        self.levels.iter().map(|l| seminorm_rho(l, rho)).collect()
    }

    /// Estimated `‖·‖_ρ` size of the omitted levels, extrapolating the growth
    /// ratio of the last two level norms. Infinite when `|q|` times that
    /// ratio is at least one.
    pub fn rho_tail(&self, rho: f64) -> f64 {
        let norms = self.level_norms(rho);
        let a = self.params.q.abs();
        if a == 0.0 {
            return 0.0;
        }
        let last = norms[self.cutoff];
        let ratio = if self.cutoff >= 1 {
            last / norms[self.cutoff - 1]
        } else {
            1.0
        };
        let x = a * ratio;
        if x >= 1.0 {
            return f64::INFINITY;
        }
        last * a.powi(self.cutoff as i32) * x / (1.0 - x)
    }

    /// The action of the kernel on the Fock space, each term `a ⊗ b` acting
    /// as `v ↦ ⟨v, b^*(X)Ω⟩_q a(X)Ω`.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let q = self.params.q;
        let depth = v.depth().max(self.cutoff);
        let vac = FockVector::vacuum(self.params.alphabet, depth);
        let mut pairing: HashMap<&Word, f64> = HashMap::new();
        // collect the scalar in front of each left leg before expanding it
        let mut weights: BTreeMap<&Word, f64> = BTreeMap::new();
        for ((a, b), c) in self.terms.iter() {
            let s = *pairing
                .entry(b)
                .or_insert_with(|| vac.apply_word(&b.reversed(), q).inner(v, q));
            if s != 0.0 {
                *weights.entry(a).or_default() += c.re * s;
            }
        }
        let mut out = FockVector::zero(self.params.alphabet, depth);
        for (a, w) in weights {
            if w != 0.0 {
                out.add_scaled(&vac.apply_word(a, q), w);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::rational;
    use num_rational::BigRational;

    fn p(q: f64, n: usize) -> QParams {
        QParams::new(q, n).unwrap()
    }

    #[test]
    fn wick_examples() {
        let q = rational(1, 5);
        let x = |n: usize| Word::repeat(1, n);
        let w1: NCPolynomial<BigRational> = wick_poly(&x(1), &q, 1).unwrap();
        assert_eq!(w1, NCPolynomial::generator(1, 1).unwrap());
        let w2 = wick_poly(&x(2), &q, 1).unwrap();
        assert_eq!(w2.coeff(&x(2)), rational(1, 1));
        assert_eq!(w2.coeff(&x(0)), rational(-1, 1));
        let w3 = wick_poly(&x(3), &q, 1).unwrap();
        assert_eq!(w3.coeff(&x(3)), rational(1, 1));
        assert_eq!(w3.coeff(&x(1)), rational(-11, 5));
        assert_eq!(w3.len(), 2);
    }

    #[test]
    fn wick_vectors_are_basis_tensors() {
        let params = p(0.3, 2);
        for w in Word::all_up_to(5, 2) {
            let poly = wick_poly(&w, &Complex64::new(0.3, 0.0), 2).unwrap();
            let v = FockVector::vacuum(2, 5).apply_poly(&poly, params.q);
            let e = FockVector::basis(&w, 2, 5).unwrap();
            assert!(v.max_abs_diff(&e) < 1e-12, "{w}");
        }
    }

    #[test]
    fn eigen_bound_examples() {
        assert_eq!(min_eig_bound(4, 0.0, EigBoundForm::Theta), 1.0);
        assert!((min_eig_bound(2, 0.02, EigBoundForm::Theta) - 0.9596).abs() < 1e-4);
        assert!((min_eig_bound(2, 0.02, EigBoundForm::Simplified) - 0.99917).abs() < 1e-5);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(q_threshold(2), 1.0 / 34.0);
        assert_eq!(q_threshold(1), 1.0 / 6.0);
        assert_eq!(q_threshold(3), 1.0 / 110.0);
    }

    #[test]
    fn onb_examples() {
        let q = 0.25;
        let p2 = onb_polys(2, p(q, 1)).unwrap();
        let s = 1.0 / (1.0 + q).sqrt();
        assert!((p2[0].coeff(&Word::repeat(1, 2)).re - s).abs() < 1e-14);
        assert!((p2[0].coeff(&Word::empty()).re + s).abs() < 1e-14);
        let p1 = onb_polys(1, p(q, 2)).unwrap();
        assert_eq!(p1[1], NCPolynomial::generator(2, 2).unwrap());
        let p0 = onb_polys(2, p(0.0, 2)).unwrap();
        let w0 = wick_level(2, p(0.0, 2)).unwrap();
        assert_eq!(p0, w0);
    }

    #[test]
    fn onb_is_orthonormal() {
        let params = p(-0.3, 2);
        let polys = onb_polys(3, params).unwrap();
        let vecs: Vec<FockVector> =
            polys.iter().map(|q| FockVector::vacuum(2, 3).apply_poly(q, params.q)).collect();
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b, params.q) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn xi_examples() {
        let xi = xi_expansion(p(0.0, 2), 3).unwrap();
        assert_eq!(xi.terms(), &Tensor2Series::identity(2));
        let q = 0.3;
        let xi = xi_expansion(p(q, 1), 2).unwrap();
        let x = |n: usize| Word::repeat(1, n);
        let t = xi.terms();
        assert!((t.coeff(&(x(0), x(0))).re - (1.0 + q * q / (1.0 + q))).abs() < 1e-14);
        assert!((t.coeff(&(x(1), x(1))).re - q).abs() < 1e-14);
        assert!((t.coeff(&(x(2), x(2))).re - q * q / (1.0 + q)).abs() < 1e-14);
        assert!((t.coeff(&(x(2), x(0))).re + q * q / (1.0 + q)).abs() < 1e-14);
    }

    #[test]
    fn xi_acts_as_weighted_level_projection() {
        let params = p(0.2, 2);
        let xi = xi_expansion(params, 4).unwrap();
        for w in Word::all_up_to(4, 2) {
            let e = FockVector::basis(&w, 2, 4).unwrap();
            let mut want = e.clone();
            want.scale(params.q.powi(w.len() as i32));
            assert!(xi.apply(&e).max_abs_diff(&want) < 1e-12, "{w}");
        }
    }
}
