//! Differentiation: closed forms for noncommutative polynomials, central differences
//! for black-box maps, and Taylor polynomials.

mod numeric;
mod poly;
mod taylor;

use std::fmt;
use std::sync::Arc;

pub use numeric::{derivative_tensor_numeric, gateaux, FiniteDiff};
pub use poly::{diff_poly_k_tensor, diff_poly_tensor, Monomial, NoncommPoly, TensorPoly, TensorTerm};
pub use taylor::{taylor_poly, TaylorPoly};

use crate::algebra::Element;
use crate::error::Result;
use crate::multilinear::PolyMap;
use crate::scalar::Scalar;

type FieldFn<T> = dyn Fn(&Element<T>) -> PolyMap<T> + Send + Sync;

/// The `k`-th derivative as a function of the base point.
#[derive(Clone)]
pub struct DerivativeField<T: Scalar> {
    order: usize,
    field: Arc<FieldFn<T>>,
    tensor: Option<TensorPoly<T>>,
}

impl<T: Scalar> DerivativeField<T> {
    pub fn from_fn(order: usize, f: impl Fn(&Element<T>) -> PolyMap<T> + Send + Sync + 'static) -> Self {
        DerivativeField { order, field: Arc::new(f), tensor: None }
    }

    pub fn from_tensor(tensor: TensorPoly<T>) -> Self {
        let t = tensor.clone();
        DerivativeField { order: tensor.degree(), field: Arc::new(move |x| t.at(x)), tensor: Some(tensor) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, x: &Element<T>) -> PolyMap<T> {
        (self.field)(x)
    }

    pub fn apply_at(&self, x: &Element<T>, args: &[Element<T>]) -> Result<Element<T>> {
        self.at(x).apply(args)
    }

    /// Closed tensor-polynomial form, when the field came from a polynomial.
    pub fn tensor(&self) -> Option<&TensorPoly<T>> {
        self.tensor.as_ref()
    }
}

impl<T: Scalar> fmt::Debug for DerivativeField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DerivativeField").field("order", &self.order).field("tensor", &self.tensor).finish()
    }
}

pub fn eval_poly<T: Scalar>(p: &NoncommPoly<T>, x: &Element<T>) -> Result<Element<T>> {
    p.eval(x)
}

pub fn diff_poly<T: Scalar>(p: &NoncommPoly<T>) -> DerivativeField<T> {
    DerivativeField::from_tensor(diff_poly_tensor(p))
}

/// `k`-th derivative; monomials of degree below `k` contribute nothing.
pub fn diff_poly_k<T: Scalar>(p: &NoncommPoly<T>, k: usize) -> DerivativeField<T> {
    assert!(k >= 1, "derivative order must be at least 1");
    DerivativeField::from_tensor(diff_poly_k_tensor(p, k))
}
