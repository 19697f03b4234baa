//! Exact constructions of Heisenberg, Weyl-algebra and affine Lie algebra
//! modules at finite truncation, together with checkers for their
//! structural properties.

pub mod affine;
pub mod algebra;
pub mod cartan;
pub mod diagonal;
pub mod error;
pub mod heisenberg;
pub mod loops;
pub mod phi;
pub mod phi_verma;
pub mod roots;
pub mod weyl;

pub use algebra::{LinComb, Label, MultiIndex, Scalar, Truncation};
pub use error::{Error, Result};
