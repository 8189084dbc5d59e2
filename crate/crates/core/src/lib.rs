//! Calculus over finite-dimensional associative algebras.
//!
//! Derivatives are represented as tensor-encoded polylinear maps, series solve
//! the symmetrized exponential family of ODEs, 1-forms integrate along paths,
//! and p-forms carry an exterior differential and the Poincaré homotopy operator.

pub mod algebra;
pub mod calculus;
pub mod complexfield;
pub mod demos;
pub mod error;
pub mod forms;
pub mod integration;
pub mod linalg;
pub mod multilinear;
pub mod parse;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod series_ode;

pub use algebra::{Algebra, AlgebraSpec, Element, NormKind, SlotMap};
pub use calculus::{DerivativeField, NoncommPoly, TensorPoly};
pub use error::{Error, Result};
pub use multilinear::{Permutation, PolyMap, Term};
pub use scalar::Scalar;

pub type Element64 = Element<f64>;
pub type Element32 = Element<f32>;
pub type Algebra64 = Algebra<f64>;
pub type Algebra32 = Algebra<f32>;
pub type PolyMap64 = PolyMap<f64>;
