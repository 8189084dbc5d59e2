//! Conversions between linear maps in tensor form and their real Jacobian matrices.

use crate::algebra::{Algebra, Element, SlotMap};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::multilinear::{Permutation, PolyMap, Term};
use crate::scalar::Scalar;

/// Residual above which a basis-map family is reported as deficient.
pub const FIT_TOLERANCE: f64 = 1e-8;

/// `J[j][i]` = coordinate `j` of `f(eᵢ)`.
pub fn tensor_to_jacobian<T: Scalar>(f: &PolyMap<T>) -> Result<Matrix<T>> {
    if f.degree() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: f.degree() });
    }
    let alg = f.algebra();
    let d = alg.dim();
    let mut j = Matrix::zeros(d, d);
    for i in 0..d {
        let col = f.apply(&[Element::basis(alg, i)])?;
        for (r, v) in col.coords().iter().enumerate() {
            j[(r, i)] = *v;
        }
    }
    Ok(j)
}

/// Jacobian from standard components `f^{kr}` of a map with identity slot maps:
/// `∂fʲ/∂xⁱ = f^{kr} C^p_{ki} C^j_{pr}`.
pub fn jacobian_by_contraction<T: Scalar>(f: &PolyMap<T>) -> Result<Matrix<T>> {
    if f.degree() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: f.degree() });
    }
    let alg = f.algebra();
    let d = alg.dim();
    let mut comp = Matrix::<T>::zeros(d, d);
    for t in f.terms() {
        if t.slots[0] != SlotMap::E {
            return Err(Error::UnsupportedSlotMap);
        }
        for k in 0..d {
            for r in 0..d {
                comp[(k, r)] = comp[(k, r)] + t.weight * t.coeffs[0].coords()[k] * t.coeffs[1].coords()[r];
            }
        }
    }
    let mut jac = Matrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            let mut s = T::zero();
            for k in 0..d {
                for r in 0..d {
                    if comp[(k, r)] == T::zero() {
                        continue;
                    }
                    for p in 0..d {
                        s = s + comp[(k, r)] * alg.constant(k, i, p) * alg.constant(p, r, j);
                    }
                }
            }
            jac[(j, i)] = s;
        }
    }
    Ok(jac)
}

/// Result of [`jacobian_to_tensor`].
#[derive(Debug, Clone)]
pub struct TensorFit<T: Scalar> {
    pub map: PolyMap<T>,
    pub residual: T,
}

/// Finds standard components `f^{k,ij}` with `Σ f^{k,ij} eᵢ (F_k ∘ c) eⱼ` having Jacobian `jac`,
/// by minimum-norm least squares.
pub fn jacobian_to_tensor<T: Scalar>(alg: &Algebra<T>, jac: &Matrix<T>, family: &[SlotMap]) -> Result<TensorFit<T>> {
    let d = alg.dim();
    if jac.rows != d || jac.cols != d {
        return Err(Error::ArityMismatch { expected: d, got: jac.rows });
    }
    if family.is_empty() {
        return Err(Error::DeficientFamily { residual: jac.max_abs().as_f64() });
    }
    let unknowns: Vec<(SlotMap, usize, usize)> =
        family.iter().flat_map(|&k| (0..d).flat_map(move |i| (0..d).map(move |j| (k, i, j)))).collect();
    let mut a = Matrix::zeros(d * d, unknowns.len());
    for (col, &(k, i, j)) in unknowns.iter().enumerate() {
        let (ei, ej) = (Element::basis(alg, i), Element::basis(alg, j));
        for q in 0..d {
            let img = &(&ei * &Element::basis(alg, q).apply_slot(k)) * &ej;
            for (p, v) in img.coords().iter().enumerate() {
                a[(p * d + q, col)] = *v;
            }
        }
    }
    let (x, residual) = linalg::lstsq(&a, &jac.data);
    let scale = T::one().max(jac.max_abs());
    if residual > T::lit(FIT_TOLERANCE) * scale {
        return Err(Error::DeficientFamily { residual: residual.as_f64() });
    }
    let drop = T::lit(1e-14) * scale;
    let terms = unknowns
        .iter()
        .zip(&x)
        .filter(|(_, v)| v.abs() > drop)
        .map(|(&(k, i, j), &v)| Term {
            weight: v,
            coeffs: vec![Element::basis(alg, i), Element::basis(alg, j)],
            slots: vec![k],
            perm: Permutation::identity(1),
        })
        .collect();
    Ok(TensorFit { map: PolyMap::from_terms(alg, 1, terms)?, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, quaternion};

    #[test]
    fn complex_multiplication_jacobian() {
        let c = complex::<f64>();
        let a = Element::from_f64(&c, &[2., 3.]);
        let f = PolyMap::simple(vec![a, Element::one(&c)]).unwrap();
        let j = tensor_to_jacobian(&f).unwrap();
        assert_eq!(j.to_rows(), vec![vec![2., -3.], vec![3., 2.]]);
        assert_eq!(jacobian_by_contraction(&f).unwrap(), j);
    }

    #[test]
    fn conjugation_needs_i() {
        let c = complex::<f64>();
        let jac = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert!(matches!(jacobian_to_tensor(&c, &jac, &[SlotMap::E]), Err(Error::DeficientFamily { .. })));
        let fit = jacobian_to_tensor(&c, &jac, &c.slot_maps()).unwrap();
        assert!(fit.residual < 1e-12);
        let z = Element::from_f64(&c, &[0.4, -1.3]);
        assert!(fit.map.apply(std::slice::from_ref(&z)).unwrap().approx_eq(&z.apply_basis_map("I").unwrap(), 1e-12));
    }

    #[test]
    fn quaternion_round_trip() {
        let qa = quaternion::<f64>();
        let a = Element::from_f64(&qa, &[0.3, 1., -2., 0.5]);
        let b = Element::from_f64(&qa, &[1., 0.2, 0.7, -1.]);
        let f = PolyMap::simple(vec![a, b]).unwrap();
        let j = tensor_to_jacobian(&f).unwrap();
        let jc = jacobian_by_contraction(&f).unwrap();
        for (x, y) in j.data.iter().zip(&jc.data) {
            assert!((x - y).abs() < 1e-13);
        }
        let back = jacobian_to_tensor(&qa, &j, &[SlotMap::E]).unwrap().map;
        for i in 0..4 {
            let e = Element::basis(&qa, i);
            assert!(back.apply(std::slice::from_ref(&e)).unwrap().approx_eq(&f.apply(&[e]).unwrap(), 1e-9));
        }
    }
}
