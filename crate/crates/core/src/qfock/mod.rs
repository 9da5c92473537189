//! Truncated q-deformed Fock space over `ℝ^N` and the q-semicircular
//! generators `X_j = l_j + l_j^*` acting on it.

mod gram;
mod moment;
mod trace;

pub use gram::{gram_apply, gram_brute, gram_recursive, q_inner_brute, MAX_DENSE_GRAM};
pub use moment::{moment_oracle, MomentTrace, MAX_ORACLE_LEN};
pub use trace::{trace_poly, trace_word, QTrace};

use crate::error::{Error, Result};
use crate::ncalg::{Coeff, NCPolynomial, Word};

/// Deformation parameter and number of generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParams {
    pub q: f64,
    pub alphabet: usize,
}

impl QParams {
    pub fn new(q: f64, alphabet: usize) -> Result<Self> {
        if !(q.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("need |q| < 1, got {q}")));
        }
        if alphabet == 0 {
            return Err(Error::InvalidParameter("alphabet must be non-empty".into()));
        }
        Ok(QParams { q, alphabet })
    }
}

/// Number of pairs `i < j` with `perm[i] > perm[j]`.
pub fn inversions(perm: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                count += 1;
            }
        }
    }
    count
}

/// A vector in the Fock space truncated at a finite tensor depth. Level `k`
/// holds `N^k` coordinates in the basis `h_{i_1}⊗⋯⊗h_{i_k}`, indexed as in
/// [`Word::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    alphabet: usize,
    levels: Vec<Vec<f64>>,
    truncated: bool,
}

impl FockVector {
    pub fn zero(alphabet: usize, depth: usize) -> Self {
        FockVector {
            alphabet,
            levels: (0..=depth).map(|k| vec![0.0; alphabet.pow(k as u32)]).collect(),
            truncated: false,
        }
    }

    /// The vacuum vector `Ω`.
    pub fn vacuum(alphabet: usize, depth: usize) -> Self {
        let mut v = Self::zero(alphabet, depth);
        v.levels[0][0] = 1.0;
        v
    }

    /// The basis tensor `h_w`.
    pub fn basis(word: &Word, alphabet: usize, depth: usize) -> Result<Self> {
        if word.len() > depth {
            return Err(Error::InsufficientDepth {
                depth,
                needed: word.len(),
            });
        }
        let mut v = Self::zero(alphabet, depth);
        v.levels[word.len()][word.index(alphabet)] = 1.0;
        Ok(v)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.levels[k]
    }

    /// Whether some operation pushed mass past the top level.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn coordinate(&self, word: &Word) -> f64 {
        self.levels
            .get(word.len())
            .map_or(0.0, |l| l[word.index(self.alphabet)])
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
        self.truncated |= other.truncated;
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.levels {
            for x in l.iter_mut() {
                *x *= s;
            }
        }
    }

    /// Creation `l_j`: prepends `h_j`. Mass at the top level is dropped and
    /// recorded in [`FockVector::truncated`].
    pub fn create(&self, j: usize) -> Self {
        let n = self.alphabet;
        let mut out = Self::zero(n, self.depth());
        out.truncated = self.truncated || self.levels[self.depth()].iter().any(|&x| x != 0.0);
        for k in 0..self.depth() {
            let block = n.pow(k as u32);
            out.levels[k + 1][(j - 1) * block..j * block].copy_from_slice(&self.levels[k]);
        }
        out
    }

    /// Annihilation `l_j^*`: removes the `k`-th tensor factor when it equals
    /// `h_j`, with weight `q^{k−1}`.
    pub fn annihilate(&self, j: usize, q: f64) -> Self {
        let mut out = Self::zero(self.alphabet, self.depth());
        out.truncated = self.truncated;
        for k in 1..=self.depth() {
            annihilate_level(&self.levels[k], &mut out.levels[k - 1], k, self.alphabet, j, q);
        }
        out
    }

    /// `X_j v = l_j v + l_j^* v`.
    pub fn apply_generator(&self, j: usize, q: f64) -> Self {
        let mut out = self.create(j);
        out.add_scaled(&self.annihilate(j, q), 1.0);
        out
    }

    /// `X_w v`, applying the rightmost letter first.
    pub fn apply_word(&self, w: &Word, q: f64) -> Self {
        let mut v = self.clone();
        for pos in (0..w.len()).rev() {
            v = v.apply_generator(w.letter(pos), q);
        }
        v
    }

    /// `p(X) v` for a polynomial with real coefficients (imaginary parts are
    /// ignored).
    pub fn apply_poly<C: Coeff>(&self, p: &NCPolynomial<C>, q: f64) -> Self {
        let mut out = Self::zero(self.alphabet, self.depth());
        out.truncated = self.truncated;
        for (w, c) in p.iter() {
            out.add_scaled(&self.apply_word(w, q), c.to_complex().re);
        }
        out
    }

    /// Largest coordinate-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        let depth = self.depth().max(other.depth());
        for k in 0..=depth {
            let n = self.alphabet.pow(k as u32);
            for i in 0..n {
                let a = self.levels.get(k).map_or(0.0, |l| l[i]);
                let b = other.levels.get(k).map_or(0.0, |l| l[i]);
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    /// The q-deformed inner product.
    pub fn inner(&self, other: &Self, q: f64) -> f64 {
        let params = QParams {
            q,
            alphabet: self.alphabet,
        };
        let depth = self.depth().min(other.depth());
        let mut total = 0.0;
        for k in 0..=depth {
            if self.levels[k].iter().all(|&x| x == 0.0) || other.levels[k].iter().all(|&x| x == 0.0) {
                continue;
            }
            let g = gram_apply(k, params, &other.levels[k]);
            total += self.levels[k].iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        }
        total
    }
}

/// Adds `Σ_k q^{k−1} [w_k = j] x_w` to the coordinate of `w` with its `k`-th
/// letter removed. `src` has level `k = level`, `dst` level `level − 1`.
pub(crate) fn annihilate_level(src: &[f64], dst: &mut [f64], level: usize, alphabet: usize, j: usize, q: f64) {
    // position p (0-based) splits the index into head (p letters), letter,
    // tail (level − p − 1 letters)
    let mut weight = 1.0;
    for p in 0..level {
        let tail = alphabet.pow((level - p - 1) as u32);
        let heads = alphabet.pow(p as u32);
        for h in 0..heads {
            let src_base = (h * alphabet + (j - 1)) * tail;
            let dst_base = h * tail;
            for t in 0..tail {
                dst[dst_base + t] += weight * src[src_base + t];
            }
        }
        weight *= q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_examples() {
        assert_eq!(inversions(&[0, 1, 2]), 0);
        assert_eq!(inversions(&[1, 0]), 1);
        assert_eq!(inversions(&[3, 2, 1, 0]), 6);
    }

    #[test]
    fn creation_and_annihilation_examples() {
        let q = 0.3;
        let om = FockVector::vacuum(2, 3);
        let h1 = om.create(1);
        assert_eq!(h1, FockVector::basis(&Word::single(1), 2, 3).unwrap());
        let h11 = h1.create(1);
        let a = h11.annihilate(1, q);
        assert!((a.coordinate(&Word::single(1)) - (1.0 + q)).abs() < 1e-15);
        assert!(h1.annihilate(2, q).level(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn generator_examples() {
        let q = -0.4;
        let om = FockVector::vacuum(2, 4);
        let x11 = om.apply_word(&Word::from_letters(&[1, 1]), q);
        assert_eq!(x11.coordinate(&Word::from_letters(&[1, 1])), 1.0);
        assert_eq!(x11.coordinate(&Word::empty()), 1.0);
        let x12 = om.apply_word(&Word::from_letters(&[1, 2]), q);
        assert_eq!(x12.coordinate(&Word::from_letters(&[1, 2])), 1.0);
        assert_eq!(x12.level(0)[0], 0.0);
    }

    #[test]
    fn top_level_overflow_is_flagged() {
        let v = FockVector::vacuum(1, 1).create(1);
        assert!(!v.truncated());
        assert!(v.create(1).truncated());
    }

    #[test]
    fn invalid_q_rejected() {
        assert!(QParams::new(1.0, 2).is_err());
        assert!(QParams::new(0.5, 0).is_err());
    }
}
