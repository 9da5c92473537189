//! Sparse non-commutative series and the tensor-calculus operations on them.

pub mod coeff;
pub mod majorant;
pub mod series;
pub mod tensor;
pub mod text;
pub mod word;

pub use coeff::{rational, Coeff};
pub use majorant::{coefficient_majorant, seminorm_rho, GeometricTail, MajorantSeries};
pub use series::{NCPolynomial, Series, SeriesKey, Tensor2Series, Tensor3Series};
pub use word::Word;
