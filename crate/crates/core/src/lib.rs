// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deriv;
pub mod dimension;
pub mod error;
pub mod generator;
pub mod ncalg;
pub mod qfock;
pub mod simulate;
pub mod trace;
pub mod verify;
pub mod wick;

pub use error::{Error, Result};

// Guide chapters are compiled as doctests so their snippets stay current.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/series.md")]
mod book_series {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fock.md")]
mod book_fock {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/kernel.md")]
mod book_kernel {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/derivations.md")]
mod book_derivations {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/generator.md")]
mod book_generator {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/simulation.md")]
mod book_simulation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dimension.md")]
mod book_dimension {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/verification.md")]
mod book_verification {}
