//! Product-operator algebra for N spin-1/2 nuclei.

pub mod dense;
mod density;
mod label;
mod operator;
pub mod text;

pub use dense::Matrix;
pub use density::{DensityOperator, Form};
pub use label::{Basis, PauliLabel, Symbol, MAX_SPINS};
pub(crate) use operator::labels_commute;
pub use operator::{SpinOperator, DEFAULT_EPS};
