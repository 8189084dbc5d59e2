use std::fmt;

use crate::algebra::Element;
use crate::calculus::poly::{diff_poly_k_tensor, Monomial, NoncommPoly};
use crate::error::Result;
use crate::scalar::Scalar;

/// Polynomial in `u = x − center`.
#[derive(Clone, Debug)]
pub struct TaylorPoly<T: Scalar> {
    pub center: Element<T>,
    pub poly: NoncommPoly<T>,
}

impl<T: Scalar> TaylorPoly<T> {
    pub fn eval(&self, x: &Element<T>) -> Result<Element<T>> {
        self.poly.eval(&x.try_sub(&self.center)?)
    }
}

impl<T: Scalar> fmt::Display for TaylorPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at x₀ = {}", self.poly, self.center)
    }
}

/// `Σ_{n ≤ N} (1/n!) dⁿp(x₀) ∘ (x − x₀)ⁿ`
pub fn taylor_poly<T: Scalar>(p: &NoncommPoly<T>, x0: &Element<T>, order: usize) -> Result<TaylorPoly<T>> {
    let alg = p.algebra();
    let mut monomials = vec![Monomial::constant(p.eval(x0)?)];
    let mut fact = T::one();
    for n in 1..=order {
        fact = fact * T::lit(n as f64);
        let dn = diff_poly_k_tensor(p, n).at(x0);
        for t in dn.terms() {
            monomials.push(Monomial { weight: t.weight / fact, coeffs: t.coeffs.clone(), slots: t.slots.clone() });
        }
    }
    Ok(TaylorPoly { center: x0.clone(), poly: NoncommPoly::from_monomials(alg, monomials)?.compact() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quaternion;
    use crate::sampling;

    #[test]
    fn cube_about_zero_is_exact() {
        let qa = quaternion::<f64>();
        let p = NoncommPoly::power(&qa, 3);
        let t = taylor_poly(&p, &Element::zero(&qa), 3).unwrap();
        assert_eq!(t.poly.monomials().len(), 1);
        assert_eq!(t.poly.monomials()[0].degree(), 3);
        assert!((t.poly.monomials()[0].weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reexpansion_reproduces_polynomial() {
        let qa = quaternion::<f64>();
        let mut rng = sampling::rng(3);
        let a = sampling::random_element(&mut rng, &qa, 1.0);
        let p = NoncommPoly::power(&qa, 3).add(&NoncommPoly::constant(a.clone()).mul(&NoncommPoly::x(&qa)));
        let x0 = sampling::random_element(&mut rng, &qa, 1.0);
        let t = taylor_poly(&p, &x0, 3).unwrap();
        for _ in 0..5 {
            let x = sampling::random_element(&mut rng, &qa, 1.0);
            assert!(t.eval(&x).unwrap().approx_eq(&p.eval(&x).unwrap(), 1e-12));
        }
    }
}
