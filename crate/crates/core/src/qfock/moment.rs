use crate::error::{Error, Result};
use crate::ncalg::{Coeff, Word};
use crate::trace::WordTrace;

/// Longest word accepted by [`moment_oracle`].
pub const MAX_ORACLE_LEN: usize = 16;

/// `Σ_π q^{cr(π)}` over pair partitions `π` of the positions of `w` that only
/// pair equal letters, `cr` counting crossing pairs. Works over any
/// coefficient field, so rational `q` gives exact moments.
pub fn moment_oracle<C: Coeff>(w: &Word, q: &C) -> Result<C> {
    if w.len() > MAX_ORACLE_LEN {
        return Err(Error::LengthGuard {
            what: "pair-partition oracle",
            len: w.len(),
            limit: MAX_ORACLE_LEN,
        });
    }
    if w.len() % 2 == 1 {
        return Ok(C::zero());
    }
    let letters: Vec<usize> = w.letters().collect();
    let mut counts = vec![0u64; w.len() * w.len() / 4 + 1];
    let mut partner = vec![usize::MAX; w.len()];
    count_pairings(&letters, &mut partner, &mut Vec::new(), &mut counts);
    // Horner evaluation of Σ_k counts[k] q^k
    let mut acc = C::zero();
    for &c in counts.iter().rev() {
        acc = acc * q.clone() + C::from_f64(c as f64);
    }
    Ok(acc)
}

fn count_pairings(letters: &[usize], partner: &mut [usize], pairs: &mut Vec<(usize, usize)>, counts: &mut [u64]) {
    let Some(a) = partner.iter().position(|&p| p == usize::MAX) else {
        let mut crossings = 0;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for &(c, d) in &pairs[..i] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    crossings += 1;
                }
            }
        }
        counts[crossings] += 1;
        return;
    };
    for b in (a + 1)..letters.len() {
        if partner[b] == usize::MAX && letters[b] == letters[a] {
            partner[a] = b;
            partner[b] = a;
            pairs.push((a, b));
            count_pairings(letters, partner, pairs, counts);
            pairs.pop();
            partner[a] = usize::MAX;
            partner[b] = usize::MAX;
        }
    }
}

/// The q-semicircular trace evaluated through the pair-partition oracle,
/// over an arbitrary coefficient field.
#[derive(Clone, Debug)]
pub struct MomentTrace<C: Coeff> {
    pub q: C,
}

impl<C: Coeff> WordTrace<C> for MomentTrace<C> {
    fn trace_word(&self, w: &Word) -> C {
        moment_oracle(w, &self.q).expect("word within oracle length guard")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::rational;
    use num_complex::Complex64;
    use num_rational::BigRational;

    #[test]
    fn oracle_examples() {
        let q = rational(1, 3);
        assert_eq!(moment_oracle(&Word::repeat(1, 2), &q).unwrap(), rational(1, 1));
        assert_eq!(moment_oracle(&Word::repeat(1, 4), &q).unwrap(), rational(7, 3));
        assert_eq!(moment_oracle(&Word::repeat(1, 3), &q).unwrap(), rational(0, 1));
        assert_eq!(moment_oracle(&Word::from_letters(&[1, 2]), &q).unwrap(), rational(0, 1));
    }

    #[test]
    fn catalan_at_q_zero() {
        let catalan = [1u64, 1, 2, 5, 14, 42, 132];
        let zero = BigRational::from_integer(0.into());
        for (n, c) in catalan.iter().enumerate() {
            let m = moment_oracle(&Word::repeat(1, 2 * n), &zero).unwrap();
            assert_eq!(m, BigRational::from_integer((*c).into()));
        }
    }

    #[test]
    fn length_guard() {
        let q = Complex64::new(0.1, 0.0);
        assert!(moment_oracle(&Word::repeat(1, 18), &q).is_err());
    }
}
