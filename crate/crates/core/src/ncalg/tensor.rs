//! Difference quotients, `#` compositions, partial traces and contractions.

use super::coeff::Coeff;
use super::series::{NCPolynomial, Series, Tensor2Series, Tensor3Series};
use super::word::Word;
use crate::error::{Error, Result};
use crate::trace::WordTrace;

fn check_letter(letter: usize, alphabet: usize) -> Result<()> {
    if letter == 0 || letter > alphabet {
        return Err(Error::LetterOutOfRange { letter, alphabet });
    }
    Ok(())
}

/// Cyclic second difference quotient `D_ij f`.
///
/// For each monomial and each pair of positions `k < l` with letter `i` at
/// `k` and `j` at `l`, emits the word strictly between them on the left leg
/// and the cyclic remainder (after `l`, then before `k`) on the right leg.
pub fn second_quotient<C: Coeff>(f: &NCPolynomial<C>, i: usize, j: usize) -> Result<Tensor2Series<C>> {
    check_letter(i, f.alphabet())?;
    check_letter(j, f.alphabet())?;
    let mut out = Tensor2Series::empty_with(f.alphabet(), f.cap());
    for (w, c) in f.iter() {
        let n = w.len();
        for k in w.positions_of(i) {
            for l in (k + 1)..n {
                if w.letter(l) != j {
                    continue;
                }
                let left = w.slice(k + 1, l);
                let right = w.suffix(l + 1).concat(&w.prefix(k));
                out.push((left, right), c.clone())?;
            }
        }
    }
    Ok(out)
}

/// Free difference quotient `∂_j f` (Leibniz expansion).
pub fn first_quotient<C: Coeff>(f: &NCPolynomial<C>, j: usize) -> Result<Tensor2Series<C>> {
    check_letter(j, f.alphabet())?;
    let mut out = Tensor2Series::empty_with(f.alphabet(), f.cap());
    for (w, c) in f.iter() {
        for k in w.positions_of(j) {
            out.push((w.prefix(k), w.suffix(k + 1)), c.clone())?;
        }
    }
    Ok(out)
}

/// Bilinear extension of a rule on pairs of elementary tensors.
fn compose2<C: Coeff>(
    psi: &Tensor2Series<C>,
    theta: &Tensor2Series<C>,
    rule: impl Fn(&(Word, Word), &(Word, Word)) -> (Word, Word),
) -> Result<Tensor2Series<C>> {
    psi.check_alphabet(theta)?;
    let cap = Series::<(Word, Word), C>::joint_cap(psi.cap(), theta.cap());
    let mut out = Tensor2Series::empty_with(psi.alphabet(), cap);
    for (a, ca) in psi.iter() {
        for (b, cb) in theta.iter() {
            out.push(rule(a, b), ca.clone() * cb.clone())?;
        }
    }
    Ok(out)
}

/// Inside multiplication: `(A⊗B) #_in (P⊗Q) = PA ⊗ BQ`.
pub fn hash_in<C: Coeff>(psi: &Tensor2Series<C>, theta: &Tensor2Series<C>) -> Result<Tensor2Series<C>> {
    compose2(psi, theta, |(a, b), (p, q)| (p.concat(a), b.concat(q)))
}

/// Outside multiplication: `(A⊗B) #_out (P⊗Q) = BP ⊗ QA`.
pub fn hash_out<C: Coeff>(psi: &Tensor2Series<C>, theta: &Tensor2Series<C>) -> Result<Tensor2Series<C>> {
    compose2(psi, theta, |(a, b), (p, q)| (b.concat(p), q.concat(a)))
}

/// `(1⊗τ)(Θ)`: trace out the right leg.
pub fn partial_trace_right<C: Coeff, T: WordTrace<C> + ?Sized>(
    theta: &Tensor2Series<C>,
    tau: &T,
) -> NCPolynomial<C> {
    let mut out = NCPolynomial::empty_with(theta.alphabet(), theta.cap());
    for ((a, b), c) in theta.iter() {
        let t = tau.trace_word(b);
        // a has degree at most the cap of theta, so push cannot overflow
        out.push(a.clone(), c.clone() * t).expect("degree within cap");
    }
    out
}

/// `(τ⊗1)(Θ)`: trace out the left leg.
pub fn partial_trace_left<C: Coeff, T: WordTrace<C> + ?Sized>(
    theta: &Tensor2Series<C>,
    tau: &T,
) -> NCPolynomial<C> {
    let mut out = NCPolynomial::empty_with(theta.alphabet(), theta.cap());
    for ((a, b), c) in theta.iter() {
        let t = tau.trace_word(a);
        out.push(b.clone(), c.clone() * t).expect("degree within cap");
    }
    out
}

/// `m(Θ) = Σ A ζ B` over the terms `A⊗B` of `Θ`.
pub fn sandwich<C: Coeff>(theta: &Tensor2Series<C>, zeta: &NCPolynomial<C>) -> Result<NCPolynomial<C>> {
    theta.check_alphabet(zeta)?;
    let cap = Series::<Word, C>::joint_cap(theta.cap(), zeta.cap());
    let mut out = NCPolynomial::empty_with(theta.alphabet(), cap);
    for ((a, b), c) in theta.iter() {
        for (z, cz) in zeta.iter() {
            out.push(Word::concat3(a, z, b), c.clone() * cz.clone())?;
        }
    }
    Ok(out)
}

/// `D_1^(s)`: difference quotient in the first leg, `A⊗B ↦ ∂_s A ⊗ B`.
pub fn first_leg_quotient<C: Coeff>(psi: &Tensor2Series<C>, s: usize) -> Result<Tensor3Series<C>> {
    check_letter(s, psi.alphabet())?;
    let mut out = Tensor3Series::empty_with(psi.alphabet(), psi.cap());
    for ((a, b), c) in psi.iter() {
        for k in a.positions_of(s) {
            out.push((a.prefix(k), a.suffix(k + 1), b.clone()), c.clone())?;
        }
    }
    Ok(out)
}

/// `D_2^(s)`: difference quotient in the second leg, `A⊗B ↦ A ⊗ ∂_s B`.
pub fn last_leg_quotient<C: Coeff>(psi: &Tensor2Series<C>, s: usize) -> Result<Tensor3Series<C>> {
    check_letter(s, psi.alphabet())?;
    let mut out = Tensor3Series::empty_with(psi.alphabet(), psi.cap());
    for ((a, b), c) in psi.iter() {
        for k in b.positions_of(s) {
            out.push((a.clone(), b.prefix(k), b.suffix(k + 1)), c.clone())?;
        }
    }
    Ok(out)
}

fn compose3<C: Coeff>(
    psi: &Tensor2Series<C>,
    eta: &Tensor3Series<C>,
    rule: impl Fn(&(Word, Word), &(Word, Word, Word)) -> (Word, Word, Word),
) -> Result<Tensor3Series<C>> {
    psi.check_alphabet(eta)?;
    let cap = Series::<Word, C>::joint_cap(psi.cap(), eta.cap());
    let mut out = Tensor3Series::empty_with(psi.alphabet(), cap);
    for (a, ca) in psi.iter() {
        for (t, ct) in eta.iter() {
            out.push(rule(a, t), ca.clone() * ct.clone())?;
        }
    }
    Ok(out)
}

/// Inside multiplication around the first tensor sign:
/// `(A⊗B) #_in^(1) (P⊗Q⊗R) = PA ⊗ BQ ⊗ R`.
pub fn hash_in_first<C: Coeff>(psi: &Tensor2Series<C>, eta: &Tensor3Series<C>) -> Result<Tensor3Series<C>> {
    compose3(psi, eta, |(a, b), (p, q, r)| (p.concat(a), b.concat(q), r.clone()))
}

/// Inside multiplication around the second tensor sign:
/// `(A⊗B) #_in^(2) (P⊗Q⊗R) = P ⊗ QA ⊗ BR`.
pub fn hash_in_second<C: Coeff>(psi: &Tensor2Series<C>, eta: &Tensor3Series<C>) -> Result<Tensor3Series<C>> {
    compose3(psi, eta, |(a, b), (p, q, r)| (p.clone(), q.concat(a), b.concat(r)))
}

/// `P⊗Q⊗R ↦ P τ(Q) R`, the multiplication map with the middle leg traced.
pub fn contract_middle<C: Coeff, T: WordTrace<C> + ?Sized>(eta: &Tensor3Series<C>, tau: &T) -> NCPolynomial<C> {
    let mut out = NCPolynomial::empty_with(eta.alphabet(), eta.cap());
    for ((p, q, r), c) in eta.iter() {
        let t = tau.trace_word(q);
        out.push(p.concat(r), c.clone() * t).expect("degree within cap");
    }
    out
}

/// `M_2(P⊗Q⊗R) = P τ(QR)`.
pub fn contract_last<C: Coeff, T: WordTrace<C> + ?Sized>(eta: &Tensor3Series<C>, tau: &T) -> NCPolynomial<C> {
    let mut out = NCPolynomial::empty_with(eta.alphabet(), eta.cap());
    for ((p, q, r), c) in eta.iter() {
        let t = tau.trace_word(&q.concat(r));
        out.push(p.clone(), c.clone() * t).expect("degree within cap");
    }
    out
}

/// `M_1(P⊗Q⊗R) = τ(PQ) R`.
pub fn contract_first<C: Coeff, T: WordTrace<C> + ?Sized>(eta: &Tensor3Series<C>, tau: &T) -> NCPolynomial<C> {
    let mut out = NCPolynomial::empty_with(eta.alphabet(), eta.cap());
    for ((p, q, r), c) in eta.iter() {
        let t = tau.trace_word(&p.concat(q));
        out.push(r.clone(), c.clone() * t).expect("degree within cap");
    }
    out
}
