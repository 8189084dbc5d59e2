use crate::algebra::{Element, SlotMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multilinear::{jacobian_to_tensor, PolyMap};
use crate::scalar::Scalar;

/// Central differences with one Richardson level over the steps `t` and `t/2`,
/// where `t = rel_step · max(1, ‖x‖)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiff {
    pub rel_step: f64,
}

impl Default for FiniteDiff {
    fn default() -> Self {
        FiniteDiff { rel_step: 1e-5 }
    }
}

impl FiniteDiff {
    /// Default step for the precision of `T`.
    pub fn for_scalar<T: Scalar>() -> Self {
        if T::epsilon() > T::lit(1e-10) {
            FiniteDiff { rel_step: 1e-2 }
        } else {
            FiniteDiff::default()
        }
    }

    pub fn with_step(rel_step: f64) -> Self {
        FiniteDiff { rel_step }
    }

    pub fn step<T: Scalar>(&self, x: &Element<T>) -> T {
        T::lit(self.rel_step) * T::one().max(x.coord_norm())
    }

    /// Directional derivative `lim (f(x + t a) − f(x)) / t`.
    pub fn gateaux<T: Scalar>(
        &self,
        f: impl Fn(&Element<T>) -> Element<T>,
        x: &Element<T>,
        a: &Element<T>,
    ) -> Result<Element<T>> {
        if !x.same_algebra(a) {
            return Err(Error::AlgebraMismatch);
        }
        let len = a.coord_norm();
        if len == T::zero() {
            return Ok(Element::zero(x.algebra()));
        }
        let u = a.scale(T::one() / len);
        let t = self.step(x);
        let central = |t: T| -> Result<Element<T>> {
            let du = u.scale(t);
            let fp = f(&(x + &du));
            let fm = f(&(x - &du));
            if !fp.is_finite() || !fm.is_finite() {
                return Err(Error::NonFinite);
            }
            Ok((&fp - &fm).scale(T::one() / (T::lit(2.0) * t)))
        };
        let coarse = central(t)?;
        let fine = central(t * T::lit(0.5))?;
        let r = (&fine.scale(T::lit(4.0)) - &coarse).scale(T::one() / T::lit(3.0));
        Ok(r.scale(len))
    }
}

pub fn gateaux<T: Scalar>(f: impl Fn(&Element<T>) -> Element<T>, x: &Element<T>, a: &Element<T>) -> Result<Element<T>> {
    FiniteDiff::for_scalar::<T>().gateaux(f, x, a)
}

/// Tensor form of the numeric derivative at `x` over the given basis-map family.
pub fn derivative_tensor_numeric<T: Scalar>(
    f: impl Fn(&Element<T>) -> Element<T>,
    x: &Element<T>,
    family: &[SlotMap],
) -> Result<PolyMap<T>> {
    let alg = x.algebra();
    let d = alg.dim();
    let mut jac = Matrix::zeros(d, d);
    for i in 0..d {
        let col = gateaux(&f, x, &Element::basis(alg, i))?;
        for (r, v) in col.coords().iter().enumerate() {
            jac[(r, i)] = *v;
        }
    }
    Ok(jacobian_to_tensor(alg, &jac, family)?.map)
}
