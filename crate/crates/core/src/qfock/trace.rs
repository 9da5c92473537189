use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;

use super::{FockVector, QParams};
use crate::ncalg::{Coeff, NCPolynomial, Word};
use crate::trace::WordTrace;

/// `τ(X_w) = ⟨X_w Ω, Ω⟩_q`, exact: components above the number of letters
/// still to apply can never return to the vacuum and are discarded.
pub fn trace_word(w: &Word, params: QParams) -> f64 {
    let n = w.len();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut v = FockVector::vacuum(params.alphabet, n / 2);
    for (applied, pos) in (0..n).rev().enumerate() {
        v = v.apply_generator(w.letter(pos), params.q);
        let remaining = n - applied - 1;
        for k in (remaining + 1)..=v.depth() {
            v.level_mut(k).iter_mut().for_each(|x| *x = 0.0);
        }
    }
    v.level(0)[0]
}

/// `τ(p)` by linearity.
pub fn trace_poly<C: Coeff>(p: &NCPolynomial<C>, params: QParams) -> C {
    p.iter().fold(C::zero(), |acc, (w, c)| {
        acc + c.clone() * C::from_f64(trace_word(w, params))
    })
}

/// Memoized q-semicircular trace.
#[derive(Debug)]
pub struct QTrace {
    params: QParams,
    memo: RwLock<HashMap<Word, f64>>,
}

impl QTrace {
    pub fn new(params: QParams) -> Self {
        QTrace {
            params,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> QParams {
        self.params
    }

    pub fn value(&self, w: &Word) -> f64 {
        if w.len() % 2 == 1 {
            return 0.0;
        }
        if let Some(v) = self.memo.read().expect("trace memo").get(w) {
            return *v;
        }
        let v = trace_word(w, self.params);
        self.memo.write().expect("trace memo").insert(w.clone(), v);
        v
    }
}

impl WordTrace<Complex64> for QTrace {
    fn trace_word(&self, w: &Word) -> Complex64 {
        Complex64::new(self.value(w), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfock::moment_oracle;

    #[test]
    fn trace_examples() {
        let p = QParams::new(0.3, 1).unwrap();
        assert_eq!(trace_word(&Word::repeat(1, 2), p), 1.0);
        assert_eq!(trace_word(&Word::single(1), p), 0.0);
        assert!((trace_word(&Word::repeat(1, 4), p) - 2.3).abs() < 1e-15);
    }

    #[test]
    fn fock_traces_match_oracle() {
        for &q in &[0.0, 0.1, -0.1, 0.5, -0.5] {
            for alphabet in 1..=3 {
                let p = QParams::new(q, alphabet).unwrap();
                let max_len = if alphabet == 3 { 6 } else { 8 };
                for w in Word::all_up_to(max_len, alphabet) {
                    let a = trace_word(&w, p);
                    let b = moment_oracle(&w, &q_c(q)).unwrap().re;
                    assert!((a - b).abs() < 1e-12, "{w} q={q}: {a} vs {b}");
                }
            }
        }
    }

    fn q_c(q: f64) -> Complex64 {
        Complex64::new(q, 0.0)
    }

    #[test]
    fn memoized_trace_agrees() {
        let p = QParams::new(-0.2, 2).unwrap();
        let t = QTrace::new(p);
        let w = Word::from_letters(&[1, 2, 2, 1, 1, 1]);
        assert_eq!(t.value(&w), trace_word(&w, p));
        assert_eq!(t.value(&w), trace_word(&w, p));
    }
}
