//! Trace functionals on words.

use crate::ncalg::{Coeff, NCPolynomial, Word};

/// A linear functional on polynomials, given by its values on words.
pub trait WordTrace<C: Coeff>: Sync {
    fn trace_word(&self, w: &Word) -> C;

    fn trace_poly(&self, p: &NCPolynomial<C>) -> C {
        p.iter()
            .fold(C::zero(), |acc, (w, c)| acc + c.clone() * self.trace_word(w))
    }
}

/// Evaluation at the zero tuple: keeps only the constant term.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroTrace;

impl<C: Coeff> WordTrace<C> for ZeroTrace {
    fn trace_word(&self, w: &Word) -> C {
        if w.is_empty() {
            C::one()
        } else {
            C::zero()
        }
    }
}

/// Wraps a closure as a trace.
pub struct FnTrace<F>(pub F);

impl<C: Coeff, F: Fn(&Word) -> C + Sync> WordTrace<C> for FnTrace<F> {
    fn trace_word(&self, w: &Word) -> C {
        (self.0)(w)
    }
}
