//! The complex field as a real algebra: derivatives split as `a ∘ E + b ∘ I`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{complex, Algebra, Element, SlotMap};
use crate::calculus::FiniteDiff;
use crate::error::{Error, Result};
use crate::forms::{poincare_k, FormP, Smoothness};
use crate::linalg::Matrix;
use crate::multilinear::{PolyMap, Term};
use crate::sampling;
use crate::scalar::Scalar;

pub const CLASSIFY_TOLERANCE: f64 = 1e-7;
pub const INTEGRABLE_TOLERANCE: f64 = 1e-6;

pub type ComplexFn<T> = Arc<dyn Fn(&Element<T>) -> Element<T> + Send + Sync>;

/// `c ↦ a c + b c̄`
#[derive(Debug, Clone, PartialEq)]
pub struct CLinearMap<T: Scalar> {
    pub a: Element<T>,
    pub b: Element<T>,
}

fn conj_slot<T: Scalar>(alg: &Algebra<T>) -> Result<SlotMap> {
    alg.slot_map("I")
}

fn check_complex<T: Scalar>(alg: &Algebra<T>) -> Result<()> {
    if alg.same_product(&complex()) && alg.slot_map("I").is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("algebra '{}' is not the complex field", alg.name())))
    }
}

pub fn conj<T: Scalar>(z: &Element<T>) -> Element<T> {
    let c = z.coords();
    Element::new(z.algebra(), vec![c[0], -c[1]])
}

fn i_unit<T: Scalar>(alg: &Algebra<T>) -> Element<T> {
    Element::basis(alg, 1)
}

impl<T: Scalar> CLinearMap<T> {
    pub fn apply(&self, h: &Element<T>) -> Element<T> {
        &(&self.a * h) + &(&self.b * &conj(h))
    }

    /// Real 2×2 matrix acting on `(h⁰, h¹)`.
    pub fn to_jacobian(&self) -> Matrix<T> {
        let (a, b) = (self.a.coords(), self.b.coords());
        Matrix::from_rows(&[vec![a[0] + b[0], b[1] - a[1]], vec![a[1] + b[1], a[0] - b[0]]])
    }

    pub fn from_jacobian(alg: &Algebra<T>, j: &Matrix<T>) -> Result<Self> {
        check_complex(alg)?;
        if j.rows != 2 || j.cols != 2 {
            return Err(Error::InvalidArgument("expected a 2×2 Jacobian".into()));
        }
        let half = T::lit(0.5);
        let a = Element::new(alg, vec![half * (j[(0, 0)] + j[(1, 1)]), half * (j[(1, 0)] - j[(0, 1)])]);
        let b = Element::new(alg, vec![half * (j[(0, 0)] - j[(1, 1)]), half * (j[(1, 0)] + j[(0, 1)])]);
        Ok(CLinearMap { a, b })
    }

    /// The map as a degree-1 tensor `a ⊗ 1 ∘ E + b ⊗ 1 ∘ I`.
    pub fn to_polymap(&self) -> Result<PolyMap<T>> {
        let alg = self.a.algebra();
        let one = Element::one(alg);
        let mut tb = Term::simple(vec![self.b.clone(), one.clone()]);
        tb.slots = vec![conj_slot(alg)?];
        PolyMap::from_terms(alg, 1, vec![Term::simple(vec![self.a.clone(), one]), tb])
    }
}

impl<T: Scalar> fmt::Display for CLinearMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})∘E + ({})∘I", self.a, self.b)
    }
}

/// Splits `f′(z)` from the partials in `x⁰` and `x¹`:
/// `a = ½(∂₀f − i ∂₁f)`, `b = ½(∂₀f + i ∂₁f)`.
pub fn decompose_derivative<T: Scalar>(f: impl Fn(&Element<T>) -> Element<T>, z: &Element<T>, fd: FiniteDiff) -> Result<CLinearMap<T>> {
    let alg = z.algebra();
    check_complex(alg)?;
    let i = i_unit(alg);
    let d0 = fd.gateaux(&f, z, &Element::one(alg))?;
    let d1 = fd.gateaux(&f, z, &i)?;
    let id1 = &i * &d1;
    let half = T::lit(0.5);
    Ok(CLinearMap { a: (&d0 - &id1).scale(half), b: (&d0 + &id1).scale(half) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Holomorphic,
    ConjugateHolomorphic,
    Neither,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Holomorphic when `‖b‖ < 1e-7` at every probe in the unit disc, conjugate holomorphic when `‖a‖` is.
pub fn classify<T: Scalar>(alg: &Algebra<T>, f: impl Fn(&Element<T>) -> Element<T>, probes: usize, seed: u64) -> Result<Classification> {
    check_complex(alg)?;
    let mut rng = sampling::rng(seed);
    let fd = FiniteDiff::for_scalar::<T>();
    let (mut max_a, mut max_b) = (T::zero(), T::zero());
    for _ in 0..probes.max(1) {
        let z = sampling::random_element(&mut rng, alg, 1.0);
        let d = decompose_derivative(&f, &z, fd)?;
        max_a = max_a.max(d.a.coord_norm());
        max_b = max_b.max(d.b.coord_norm());
    }
    let tol = T::lit(CLASSIFY_TOLERANCE);
    Ok(if max_b < tol {
        Classification::Holomorphic
    } else if max_a < tol {
        Classification::ConjugateHolomorphic
    } else {
        Classification::Neither
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexVerdict<T: Scalar> {
    Certified { max_residual: T, probes: usize },
    Refuted { z: Element<T>, residual: Element<T> },
}

impl<T: Scalar> ComplexVerdict<T> {
    pub fn is_certified(&self) -> bool {
        matches!(self, ComplexVerdict::Certified { .. })
    }
}

/// `∂a/∂x⁰ + i ∂a/∂x¹ − ∂b/∂x⁰ + i ∂b/∂x¹` at `z`.
pub fn integrability_residual<T: Scalar>(a: &ComplexFn<T>, b: &ComplexFn<T>, z: &Element<T>) -> Result<Element<T>> {
    let alg = z.algebra();
    check_complex(alg)?;
    let fd = FiniteDiff::for_scalar::<T>();
    let (e0, i) = (Element::one(alg), i_unit(alg));
    let a0 = fd.gateaux(|x| a(x), z, &e0)?;
    let a1 = fd.gateaux(|x| a(x), z, &i)?;
    let b0 = fd.gateaux(|x| b(x), z, &e0)?;
    let b1 = fd.gateaux(|x| b(x), z, &i)?;
    Ok(&(&(&a0 + &(&i * &a1)) - &b0) + &(&i * &b1))
}

/// Certifies `a ∘ dz + b ∘ dz̄` when the residual modulus stays below `1e-6` over probes in the unit disc.
pub fn form_integrable_complex<T: Scalar>(a: &ComplexFn<T>, b: &ComplexFn<T>, alg: &Algebra<T>, probes: usize, seed: u64) -> Result<ComplexVerdict<T>> {
    check_complex(alg)?;
    let mut rng = sampling::rng(seed);
    let mut worst: Option<(Element<T>, Element<T>)> = None;
    for _ in 0..probes.max(1) {
        let z = sampling::random_element(&mut rng, alg, 1.0);
        let r = integrability_residual(a, b, &z)?;
        if worst.as_ref().is_none_or(|(_, w)| r.coord_norm() > w.coord_norm()) {
            worst = Some((z, r));
        }
    }
    let (z, residual) = worst.expect("at least one probe");
    if residual.coord_norm() < T::lit(INTEGRABLE_TOLERANCE) {
        Ok(ComplexVerdict::Certified { max_residual: residual.coord_norm(), probes: probes.max(1) })
    } else {
        Ok(ComplexVerdict::Refuted { z, residual })
    }
}

/// The 1-form `x ↦ a(x) ∘ E + b(x) ∘ I`.
pub fn complex_form<T: Scalar>(alg: &Algebra<T>, a: &ComplexFn<T>, b: &ComplexFn<T>) -> Result<FormP<T>> {
    check_complex(alg)?;
    let (a, b) = (a.clone(), b.clone());
    Ok(FormP::from_tensor_fn(alg, 1, Smoothness::CInf, move |x| {
        CLinearMap { a: a(x), b: b(x) }.to_polymap().expect("complex algebra checked")
    }))
}

/// Antiderivative with `f(0) = 0`, through the Poincaré operator. Refuses uncertified forms.
pub fn integrate_complex_form<T: Scalar>(alg: &Algebra<T>, a: &ComplexFn<T>, b: &ComplexFn<T>, probes: usize, seed: u64) -> Result<FormP<T>> {
    if !form_integrable_complex(a, b, alg, probes, seed)?.is_certified() {
        return Err(Error::NotCertified);
    }
    poincare_k(&complex_form(alg, a, b)?)
}

/// `(a₁, a₂) ↦ ½((I∘a₁)a₂ − a₁(I∘a₂))`, which equals `i(a₁⁰a₂¹ − a₁¹a₂⁰)`.
pub fn conjugation_skew_map<T: Scalar>(alg: &Algebra<T>) -> Result<PolyMap<T>> {
    check_complex(alg)?;
    let one = Element::one(alg);
    let half = T::lit(0.5);
    let i_slot = conj_slot(alg)?;
    let mut first = Term::simple(vec![one.clone(), one.clone(), one.clone()]);
    first.weight = half;
    first.slots = vec![i_slot, SlotMap::E];
    let mut second = Term::simple(vec![one.clone(), one.clone(), one]);
    second.weight = -half;
    second.slots = vec![SlotMap::E, i_slot];
    PolyMap::from_terms(alg, 2, vec![first, second])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Element<f64> {
        Element::from_f64(&complex(), &[re, im])
    }

    fn cf(f: impl Fn(&Element<f64>) -> Element<f64> + Send + Sync + 'static) -> ComplexFn<f64> {
        Arc::new(f)
    }

    #[test]
    fn decomposition_examples() {
        let z = c(0.4, -1.3);
        let fd = FiniteDiff::default();
        let d = decompose_derivative(|x| x * x, &z, fd).unwrap();
        assert!(d.a.approx_eq(&z.scale(2.0), 1e-9) && d.b.coord_norm() < 1e-9);
        let d = decompose_derivative(|x| conj(x).pow(3), &z, fd).unwrap();
        assert!(d.a.coord_norm() < 1e-9 && d.b.approx_eq(&conj(&z).pow(2).scale(3.0), 1e-9));
        let h = c(0.2, 0.9);
        assert!(d.apply(&h).approx_eq(&fd.gateaux(|x| conj(x).pow(3), &z, &h).unwrap(), 1e-8));
    }

    #[test]
    fn jacobian_round_trip() {
        let m = CLinearMap { a: c(1.5, -0.5), b: c(0.25, 2.0) };
        let back = CLinearMap::from_jacobian(&complex(), &m.to_jacobian()).unwrap();
        assert!(back.a.approx_eq(&m.a, 1e-15) && back.b.approx_eq(&m.b, 1e-15));
        let h = c(-0.3, 0.8);
        let v = m.to_jacobian().mul_vec(h.coords());
        assert!(m.apply(&h).approx_eq(&Element::new(&complex(), v), 1e-15));
        assert!(m.to_polymap().unwrap().apply(std::slice::from_ref(&h)).unwrap().approx_eq(&m.apply(&h), 1e-15));
    }

    #[test]
    fn certification_cases() {
        let alg = complex::<f64>();
        let a = cf(|x| {
            let (x0, x1) = (x.coords()[0], x.coords()[1]);
            Element::from_f64(x.algebra(), &[3.0 * x0 * x0, 6.0 * x0 * x1])
        });
        let b = cf(|x| Element::from_f64(x.algebra(), &[-3.0 * x.coords()[1].powi(2), 0.0]));
        let zero = cf(|x| Element::zero(x.algebra()));
        assert!(form_integrable_complex(&a, &b, &alg, 10, 3).unwrap().is_certified());
        match form_integrable_complex(&a, &zero, &alg, 10, 3).unwrap() {
            ComplexVerdict::Refuted { z, residual } => assert!(residual.approx_eq(&c(0.0, 6.0 * z.coords()[1]), 1e-7)),
            v => panic!("{v:?}"),
        }
        assert_eq!(integrate_complex_form(&alg, &a, &zero, 4, 1).unwrap_err(), Error::NotCertified);
    }

    #[test]
    fn antiderivative_of_two_z() {
        let alg = complex::<f64>();
        let f = integrate_complex_form(&alg, &cf(|x| x.scale(2.0)), &cf(|x| Element::zero(x.algebra())), 6, 2).unwrap();
        let z = c(0.7, -0.2);
        assert!(f.eval_function(&z).unwrap().approx_eq(&(&z * &z), 1e-12));
    }

    #[test]
    fn classification() {
        let alg = complex::<f64>();
        assert_eq!(classify(&alg, |x| x.pow(3), 6, 1).unwrap(), Classification::Holomorphic);
        assert_eq!(classify(&alg, |x| conj(x).pow(2), 6, 1).unwrap(), Classification::ConjugateHolomorphic);
        assert_eq!(classify(&alg, |x| x * &conj(x).pow(2), 6, 1).unwrap(), Classification::Neither);
    }

    #[test]
    fn skew_map_is_i_times_determinant() {
        let alg = complex::<f64>();
        let m = conjugation_skew_map(&alg).unwrap();
        let (p, q) = (c(0.3, -2.0), c(1.7, 0.6));
        let det = 0.3 * 0.6 - (-2.0) * 1.7;
        assert!(m.apply(&[p, q]).unwrap().approx_eq(&c(0.0, det), 1e-12));
    }
}
