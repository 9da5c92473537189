use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A monomial index: a finite sequence of generator letters, each in `1..=N`.
///
/// Words order by length first and lexicographically within a length, which
/// is the canonical order used for serialization.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word and checks every letter against the alphabet size.
    pub fn new(letters: &[usize], alphabet: usize) -> Result<Self> {
        for &letter in letters {
            if letter == 0 || letter > alphabet {
                return Err(Error::LetterOutOfRange { letter, alphabet });
            }
        }
        Ok(Self::from_letters(letters))
    }

    /// Builds a word without range checks. Letters must be in `1..=255`.
    pub fn from_letters(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| l as u8).collect())
    }

    pub fn single(letter: usize) -> Self {
        Word(vec![letter as u8])
    }

    pub fn repeat(letter: usize, n: usize) -> Self {
        Word(vec![letter as u8; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter(&self, pos: usize) -> usize {
        self.0[pos] as usize
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn concat3(a: &Word, b: &Word, c: &Word) -> Word {
        let mut v = Vec::with_capacity(a.0.len() + b.0.len() + c.0.len());
        v.extend_from_slice(&a.0);
        v.extend_from_slice(&b.0);
        v.extend_from_slice(&c.0);
        Word(v)
    }

    /// Letters `start..end` (0-based, half open).
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn prefix(&self, end: usize) -> Word {
        self.slice(0, end)
    }

    pub fn suffix(&self, start: usize) -> Word {
        self.slice(start, self.len())
    }

    /// The word with the letter at `pos` removed.
    pub fn without(&self, pos: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(pos);
        Word(v)
    }

    /// Reversed word; `X_w^* = X_{rev w}` for self-adjoint generators.
    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Positions (0-based) at which `letter` occurs.
    pub fn positions_of(&self, letter: usize) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l as usize == letter)
            .map(|(p, _)| p)
    }

    /// Index of the word among all words of its length, base `alphabet`,
    /// first letter most significant.
    pub fn index(&self, alphabet: usize) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &l| acc * alphabet + (l as usize - 1))
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: usize, len: usize, alphabet: usize) -> Word {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (index % alphabet + 1) as u8;
            index /= alphabet;
        }
        Word(v)
    }

    /// All `alphabet^len` words of a given length in index order.
    pub fn all(len: usize, alphabet: usize) -> impl Iterator<Item = Word> {
        let count = alphabet.pow(len as u32);
        (0..count).map(move |i| Word::from_index(i, len, alphabet))
    }

    /// All words of length at most `max_len`, in canonical order.
    pub fn all_up_to(max_len: usize, alphabet: usize) -> impl Iterator<Item = Word> {
        (0..=max_len).flat_map(move |len| Word::all(len, alphabet))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "X{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_letters() {
        assert!(Word::new(&[1, 3], 2).is_err());
        assert!(Word::new(&[0], 2).is_err());
        assert_eq!(Word::new(&[], 2).unwrap().len(), 0);
    }

    #[test]
    fn canonical_order_is_length_then_lex() {
        let a = Word::from_letters(&[2]);
        let b = Word::from_letters(&[1, 1]);
        let c = Word::from_letters(&[1, 2]);
        assert!(a < b && b < c);
        assert!(Word::empty() < a);
    }

    #[test]
    fn index_round_trip() {
        for w in Word::all(4, 3) {
            assert_eq!(Word::from_index(w.index(3), 4, 3), w);
        }
        assert_eq!(Word::from_letters(&[2, 1]).index(2), 2);
    }
}
