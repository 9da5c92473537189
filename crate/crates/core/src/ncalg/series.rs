use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::coeff::Coeff;
use super::word::Word;
use crate::error::{Error, Result};

/// Index of a term: one word per tensor leg.
pub trait SeriesKey: Ord + Clone + Debug + Hash + Send + Sync {
    const LEGS: usize;

    fn legs(&self) -> Vec<&Word>;

    fn from_legs(legs: Vec<Word>) -> Self;

    fn total_degree(&self) -> usize {
        self.legs().iter().map(|w| w.len()).sum()
    }

    fn degrees(&self) -> Vec<usize> {
        self.legs().iter().map(|w| w.len()).collect()
    }

    fn max_letter(&self) -> usize {
        self.legs().iter().map(|w| w.max_letter()).max().unwrap_or(0)
    }
}

impl SeriesKey for Word {
    const LEGS: usize = 1;

    fn legs(&self) -> Vec<&Word> {
        vec![self]
    }

    fn from_legs(mut legs: Vec<Word>) -> Self {
        legs.pop().expect("one leg")
    }

    fn total_degree(&self) -> usize {
        self.len()
    }
}

impl SeriesKey for (Word, Word) {
    const LEGS: usize = 2;

    fn legs(&self) -> Vec<&Word> {
        vec![&self.0, &self.1]
    }

    fn from_legs(legs: Vec<Word>) -> Self {
        let mut it = legs.into_iter();
        (it.next().expect("leg 1"), it.next().expect("leg 2"))
    }

    fn total_degree(&self) -> usize {
        self.0.len() + self.1.len()
    }
}

impl SeriesKey for (Word, Word, Word) {
    const LEGS: usize = 3;

    fn legs(&self) -> Vec<&Word> {
        vec![&self.0, &self.1, &self.2]
    }

    fn from_legs(legs: Vec<Word>) -> Self {
        let mut it = legs.into_iter();
        (
            it.next().expect("leg 1"),
            it.next().expect("leg 2"),
            it.next().expect("leg 3"),
        )
    }
}

/// A sparse, word-indexed series over an alphabet of `N` self-adjoint
/// generators. Stored coefficients are never negligible.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<K: SeriesKey, C: Coeff = Complex64> {
    alphabet: usize,
    cap: Option<usize>,
    terms: BTreeMap<K, C>,
}

/// Element of `F(R)`: a non-commutative polynomial or truncated power series.
pub type NCPolynomial<C = Complex64> = Series<Word, C>;
/// Element of `F'(R)`, valued in the tensor square.
pub type Tensor2Series<C = Complex64> = Series<(Word, Word), C>;
/// Element of `F''(R)`, valued in the triple tensor product.
pub type Tensor3Series<C = Complex64> = Series<(Word, Word, Word), C>;

impl<K: SeriesKey, C: Coeff> Series<K, C> {
    pub fn zero(alphabet: usize) -> Self {
        Series {
            alphabet,
            cap: None,
            terms: BTreeMap::new(),
        }
    }

    /// Sets a total-degree cap. Fails if an existing term already exceeds it.
    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d > cap {
                return Err(Error::CapOverflow { degree: d, cap });
            }
        }
        self.cap = Some(cap);
        Ok(self)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &K) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    /// Highest total degree of a stored term.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.total_degree()).max()
    }

    /// Adds `c` to the coefficient of `key`, checking the alphabet and cap.
    pub fn add_term(&mut self, key: K, c: C) -> Result<()> {
        let letter = key.max_letter();
        if letter > self.alphabet {
            return Err(Error::LetterOutOfRange {
                letter,
                alphabet: self.alphabet,
            });
        }
        if let Some(cap) = self.cap {
            let degree = key.total_degree();
            if degree > cap && !c.negligible() {
                return Err(Error::CapOverflow { degree, cap });
            }
        }
        self.accumulate(key, c);
        Ok(())
    }

    /// Like [`Series::add_term`] but for keys produced internally from
    /// already-validated operands; still honors the cap.
    pub(crate) fn push(&mut self, key: K, c: C) -> Result<()> {
        if let Some(cap) = self.cap {
            let degree = key.total_degree();
            if degree > cap && !c.negligible() {
                return Err(Error::CapOverflow { degree, cap });
            }
        }
        self.accumulate(key, c);
        Ok(())
    }

    fn accumulate(&mut self, key: K, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                if !c.negligible() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.negligible() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (K, C)>>(alphabet: usize, terms: I) -> Result<Self> {
        let mut s = Self::zero(alphabet);
        for (k, c) in terms {
            s.add_term(k, c)?;
        }
        Ok(s)
    }

    /// An empty series with the same alphabet and cap.
    pub(crate) fn like(&self) -> Self {
        Series {
            alphabet: self.alphabet,
            cap: self.cap,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn joint_cap(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub(crate) fn empty_with(alphabet: usize, cap: Option<usize>) -> Self {
        Series {
            alphabet,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn check_alphabet<K2: SeriesKey>(&self, other: &Series<K2, C>) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet,
                right: other.alphabet,
            });
        }
        Ok(())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.like();
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut out = self.clone();
        out.cap = Self::joint_cap(self.cap, other.cap);
        for (k, v) in &other.terms {
            out.push(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    /// `self += c · other`, in place.
    pub fn add_scaled(&mut self, other: &Self, c: &C) -> Result<()> {
        self.check_alphabet(other)?;
        self.cap = Self::joint_cap(self.cap, other.cap);
        for (k, v) in &other.terms {
            self.push(k.clone(), v.clone() * c.clone())?;
        }
        Ok(())
    }

    /// Drops every term of total degree above `cap` and returns the result
    /// together with the largest dropped coefficient modulus.
    pub fn truncate(&self, cap: usize) -> (Self, f64) {
        let mut out = self.like();
        out.cap = Some(cap);
        let mut dropped: f64 = 0.0;
        for (k, v) in &self.terms {
            if k.total_degree() <= cap {
                out.accumulate(k.clone(), v.clone());
            } else {
                dropped = dropped.max(v.modulus());
            }
        }
        (out, dropped)
    }

    /// Applies `map` to every coefficient (used for coefficient-field changes
    /// and conjugation).
    pub fn map_coeffs<C2: Coeff>(&self, map: impl Fn(&C) -> C2) -> Series<K, C2> {
        let mut out = Series::<K, C2>::empty_with(self.alphabet, self.cap);
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), map(v));
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_modulus(&self) -> f64 {
        self.terms.values().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.terms {
            worst = worst.max((v.clone() - other.coeff(k)).modulus());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(v.modulus());
            }
        }
        worst
    }

    pub fn into_terms(self) -> BTreeMap<K, C> {
        self.terms
    }
}

impl<C: Coeff> NCPolynomial<C> {
    pub fn constant(alphabet: usize, c: C) -> Self {
        let mut p = Self::zero(alphabet);
        p.accumulate(Word::empty(), c);
        p
    }

    pub fn one(alphabet: usize) -> Self {
        Self::constant(alphabet, C::one())
    }

    /// The generator `X_letter`.
    pub fn generator(alphabet: usize, letter: usize) -> Result<Self> {
        Self::monomial(alphabet, Word::new(&[letter], alphabet)?, C::one())
    }

    pub fn monomial(alphabet: usize, word: Word, c: C) -> Result<Self> {
        let mut p = Self::zero(alphabet);
        p.add_term(word, c)?;
        Ok(p)
    }

    /// Concatenation product. The degree of a product term is the sum of the
    /// degrees of its factors.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut out = Self::empty_with(self.alphabet, Self::joint_cap(self.cap, other.cap));
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.push(a.concat(b), ca.clone() * cb.clone())?;
            }
        }
        Ok(out)
    }

    /// `f^*`: conjugate coefficients and reverse words.
    pub fn adjoint(&self) -> Self {
        let mut out = self.like();
        for (w, c) in &self.terms {
            out.accumulate(w.reversed(), c.conj());
        }
        out
    }

    /// Multiplies every monomial by fixed words on the left and right.
    pub fn sandwich_words(&self, left: &Word, right: &Word) -> Result<Self> {
        let mut out = self.like();
        for (w, c) in &self.terms {
            out.push(Word::concat3(left, w, right), c.clone())?;
        }
        Ok(out)
    }

    pub fn pow(&self, n: usize) -> Result<Self> {
        let mut acc = Self::one(self.alphabet);
        acc.cap = self.cap;
        for _ in 0..n {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }
}

impl<C: Coeff> Tensor2Series<C> {
    /// `a ⊗ b` for polynomials `a`, `b`.
    pub fn tensor(a: &NCPolynomial<C>, b: &NCPolynomial<C>) -> Result<Self> {
        a.check_alphabet(b)?;
        let mut out = Self::empty_with(a.alphabet, Self::joint_cap(a.cap, b.cap));
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                out.push((wa.clone(), wb.clone()), ca.clone() * cb.clone())?;
            }
        }
        Ok(out)
    }

    /// `1 ⊗ 1`.
    pub fn identity(alphabet: usize) -> Self {
        let mut out = Self::zero(alphabet);
        out.accumulate((Word::empty(), Word::empty()), C::one());
        out
    }

    /// Bimodule action `X_left · (a ⊗ b) · X_right = X_left a ⊗ b X_right`.
    pub fn bimodule(&self, left: &Word, right: &Word) -> Result<Self> {
        let mut out = self.like();
        for ((a, b), c) in &self.terms {
            out.push((left.concat(a), b.concat(right)), c.clone())?;
        }
        Ok(out)
    }

    /// Polynomial bimodule action `p · Θ · r`.
    pub fn bimodule_poly(&self, p: &NCPolynomial<C>, r: &NCPolynomial<C>) -> Result<Self> {
        let mut out = self.like();
        for (wp, cp) in p.iter() {
            for (wr, cr) in r.iter() {
                let factor = cp.clone() * cr.clone();
                for ((a, b), c) in &self.terms {
                    out.push((wp.concat(a), b.concat(wr)), factor.clone() * c.clone())?;
                }
            }
        }
        Ok(out)
    }

    /// The involution `(a ⊗ b)^† = b^* ⊗ a^*`.
    pub fn dagger(&self) -> Self {
        let mut out = self.like();
        for ((a, b), c) in &self.terms {
            out.accumulate((b.reversed(), a.reversed()), c.conj());
        }
        out
    }

    /// Exchanges the two legs.
    pub fn flip(&self) -> Self {
        let mut out = self.like();
        for ((a, b), c) in &self.terms {
            out.accumulate((b.clone(), a.clone()), c.clone());
        }
        out
    }
}

impl<K: SeriesKey, C: Coeff> Add for &Series<K, C> {
    type Output = Series<K, C>;

    /// Panics on alphabet mismatch or cap overflow; use [`Series::try_add`]
    /// to handle those.
    fn add(self, rhs: Self) -> Series<K, C> {
        self.try_add(rhs).expect("series addition")
    }
}

impl<K: SeriesKey, C: Coeff> Neg for &Series<K, C> {
    type Output = Series<K, C>;

    fn neg(self) -> Series<K, C> {
        self.scale(&(-C::one()))
    }
}

impl<K: SeriesKey, C: Coeff> Sub for &Series<K, C> {
    type Output = Series<K, C>;

    fn sub(self, rhs: Self) -> Series<K, C> {
        self.try_add(&-rhs).expect("series subtraction")
    }
}
