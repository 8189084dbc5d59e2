//! Differential p-forms on an algebra: pointwise wedge, exterior differential,
//! integrability certification and the Poincaré homotopy operator.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::calculus::{diff_poly_tensor, FiniteDiff, Monomial, NoncommPoly, TensorPoly, TensorTerm};
use crate::error::{Error, Result};
use crate::multilinear::{shuffles, wedge_unchecked, Permutation, PolyMap, MAX_DEGREE, SKEW_TOLERANCE};
use crate::quadrature::Quadrature;
use crate::sampling;
use crate::scalar::Scalar;

/// `dω` residual below which a 1-form is certified integrable.
pub const INTEGRABLE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_PROBES: usize = 16;

/// Differentiability class asserted by the constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Smoothness {
    C0,
    C1,
    C2,
    CInf,
}

impl Smoothness {
    fn lowered(self) -> Smoothness {
        match self {
            Smoothness::CInf => Smoothness::CInf,
            Smoothness::C2 => Smoothness::C1,
            _ => Smoothness::C0,
        }
    }
}

type TensorFn<T> = dyn Fn(&Element<T>) -> PolyMap<T> + Send + Sync;
type EvalFn<T> = dyn Fn(&Element<T>, &[Element<T>]) -> Result<Element<T>> + Send + Sync;

/// How a form produces its values: a polylinear map per point, or only evaluations.
#[derive(Clone)]
pub enum FormRepr<T: Scalar> {
    Tensor(Arc<TensorFn<T>>),
    Eval(Arc<EvalFn<T>>),
}

#[derive(Clone)]
pub struct FormP<T: Scalar> {
    alg: Algebra<T>,
    degree: usize,
    repr: FormRepr<T>,
    smoothness: Smoothness,
    domain_radius: Option<T>,
    fd: FiniteDiff,
    quad: Quadrature,
    tensor_poly: Option<TensorPoly<T>>,
}

impl<T: Scalar> fmt::Debug for FormP<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormP")
            .field("algebra", &self.alg.name())
            .field("degree", &self.degree)
            .field("smoothness", &self.smoothness)
            .field("tensor", &self.tensor_poly.as_ref().map(|t| t.to_string()))
            .finish()
    }
}

pub type Form1<T> = FormP<T>;

impl<T: Scalar> FormP<T> {
    fn build(alg: &Algebra<T>, degree: usize, smoothness: Smoothness, repr: FormRepr<T>) -> Self {
        FormP {
            alg: alg.clone(),
            degree,
            repr,
            smoothness,
            domain_radius: None,
            fd: FiniteDiff::for_scalar::<T>(),
            quad: Quadrature::default(),
            tensor_poly: None,
        }
    }

    /// Form given by its skew polylinear value at each point.
    pub fn from_tensor_fn(
        alg: &Algebra<T>,
        degree: usize,
        smoothness: Smoothness,
        f: impl Fn(&Element<T>) -> PolyMap<T> + Send + Sync + 'static,
    ) -> Self {
        Self::build(alg, degree, smoothness, FormRepr::Tensor(Arc::new(f)))
    }

    /// Form known only through evaluations `ω(x) ∘ (a₁, …, a_p)`.
    pub fn from_eval_fn(
        alg: &Algebra<T>,
        degree: usize,
        smoothness: Smoothness,
        f: impl Fn(&Element<T>, &[Element<T>]) -> Result<Element<T>> + Send + Sync + 'static,
    ) -> Self {
        Self::build(alg, degree, smoothness, FormRepr::Eval(Arc::new(f)))
    }

    /// Smooth form with polynomial tensor coefficients. Degree ≥ 2 values must already be skew.
    pub fn from_tensor_poly(tp: TensorPoly<T>) -> Self {
        let t = tp.clone();
        let mut f = Self::from_tensor_fn(tp.algebra(), tp.degree(), Smoothness::CInf, move |x| t.at(x));
        f.tensor_poly = Some(tp);
        f
    }

    /// 0-form (function).
    pub fn function(alg: &Algebra<T>, smoothness: Smoothness, f: impl Fn(&Element<T>) -> Element<T> + Send + Sync + 'static) -> Self {
        Self::from_eval_fn(alg, 0, smoothness, move |x, _| Ok(f(x)))
    }

    /// Constant form with value `f` everywhere.
    pub fn constant(f: PolyMap<T>) -> Self {
        Self::from_tensor_poly(TensorPoly::constant(&f))
    }

    pub fn zero(alg: &Algebra<T>, degree: usize) -> Self {
        Self::from_tensor_poly(TensorPoly::zero(alg, degree))
    }

    /// `dp` for a polynomial, from the closed derivative.
    pub fn differential_of(p: &NoncommPoly<T>) -> Self {
        Self::from_tensor_poly(diff_poly_tensor(p))
    }

    /// The constant 1-form `x ↦ 1 ⊗ 1`.
    pub fn identity(alg: &Algebra<T>) -> Self {
        Self::constant(PolyMap::identity(alg))
    }

    pub fn with_domain_radius(mut self, r: T) -> Self {
        self.domain_radius = Some(r);
        self
    }

    pub fn with_finite_diff(mut self, fd: FiniteDiff) -> Self {
        self.fd = fd;
        self
    }

    pub fn with_quadrature(mut self, q: Quadrature) -> Self {
        self.quad = q;
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.alg
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn domain_radius(&self) -> Option<T> {
        self.domain_radius
    }

    pub fn finite_diff(&self) -> FiniteDiff {
        self.fd
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quad
    }

    pub fn tensor_poly(&self) -> Option<&TensorPoly<T>> {
        self.tensor_poly.as_ref()
    }

    /// Polylinear value at `x`, when the form carries one.
    pub fn value_at(&self, x: &Element<T>) -> Option<PolyMap<T>> {
        match &self.repr {
            FormRepr::Tensor(f) => Some(f(x)),
            FormRepr::Eval(_) => None,
        }
    }

    /// `ω(x) ∘ (a₁, …, a_p)`
    pub fn eval(&self, x: &Element<T>, args: &[Element<T>]) -> Result<Element<T>> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: args.len() });
        }
        let probe = Element::zero(&self.alg);
        if !x.same_algebra(&probe) || args.iter().any(|a| !a.same_algebra(&probe)) {
            return Err(Error::AlgebraMismatch);
        }
        match &self.repr {
            FormRepr::Tensor(f) => f(x).apply(args),
            FormRepr::Eval(f) => f(x, args),
        }
    }

    /// Value of a 0-form.
    pub fn eval_function(&self, x: &Element<T>) -> Result<Element<T>> {
        self.eval(x, &[])
    }

    /// Largest relative defect under adjacent argument swaps at random points.
    pub fn skew_residual(&self, probes: usize, seed: u64) -> Result<T> {
        if self.degree < 2 {
            return Ok(T::zero());
        }
        let mut rng = sampling::rng(seed);
        let mut worst = T::zero();
        for _ in 0..probes {
            let x = sampling::random_element(&mut rng, &self.alg, 1.0);
            let args = sampling::random_elements(&mut rng, &self.alg, self.degree, 1.0);
            let base = self.eval(&x, &args)?;
            for i in 0..self.degree - 1 {
                let mut sw = args.clone();
                sw.swap(i, i + 1);
                let other = self.eval(&x, &sw)?;
                let scale = T::one().max(base.coord_norm()).max(other.coord_norm());
                worst = worst.max((&base + &other).coord_norm() / scale);
            }
        }
        Ok(worst)
    }

    fn derived(&self, degree: usize, smoothness: Smoothness, f: impl Fn(&Element<T>, &[Element<T>]) -> Result<Element<T>> + Send + Sync + 'static) -> Self {
        FormP {
            alg: self.alg.clone(),
            degree,
            repr: FormRepr::Eval(Arc::new(f)),
            smoothness,
            domain_radius: self.domain_radius,
            fd: self.fd,
            quad: self.quad,
            tensor_poly: None,
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.degree != o.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: o.degree });
        }
        if !self.alg.same_product(&o.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let (a, b) = (self.clone(), o.clone());
        let mut out = self.derived(self.degree, self.smoothness.min(o.smoothness), move |x, args| a.eval(x, args)?.try_add(&b.eval(x, args)?));
        if let (Some(p), Some(q)) = (&self.tensor_poly, &o.tensor_poly) {
            out = FormP::from_tensor_poly(p.add(q)?);
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        if let Some(p) = &self.tensor_poly {
            return FormP::from_tensor_poly(p.scale(s));
        }
        let a = self.clone();
        self.derived(self.degree, self.smoothness, move |x, args| Ok(a.eval(x, args)?.scale(s)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(-T::one()))
    }

    /// `y ↦ ω(y + a)`, moving the base point `a` to the origin.
    pub fn shifted(&self, a: &Element<T>) -> Self {
        let (w, a) = (self.clone(), a.clone());
        self.derived(self.degree, self.smoothness, move |y, args| w.eval(&(y + &a), args))
    }
}

/// Pointwise `(α ∧ β)(x) = α(x) ∧ β(x)`.
pub fn wedge_forms<T: Scalar>(alpha: &FormP<T>, beta: &FormP<T>) -> Result<FormP<T>> {
    if !alpha.alg.same_product(&beta.alg) {
        return Err(Error::AlgebraMismatch);
    }
    let (p, q) = (alpha.degree, beta.degree);
    if p + q > MAX_DEGREE {
        return Err(Error::TooLarge { n: p + q, max: MAX_DEGREE });
    }
    for f in [alpha, beta] {
        let r = f.skew_residual(3, 0x5eed)?;
        if !(r < T::lit(SKEW_TOLERANCE)) {
            return Err(Error::NotSkew { residual: r.as_f64() });
        }
    }
    let smooth = alpha.smoothness.min(beta.smoothness);
    if let (FormRepr::Tensor(fa), FormRepr::Tensor(fb)) = (&alpha.repr, &beta.repr) {
        let (fa, fb) = (fa.clone(), fb.clone());
        let mut out = FormP::from_tensor_fn(&alpha.alg, p + q, smooth, move |x| {
            wedge_unchecked(&fa(x), &fb(x)).expect("degrees and algebra checked")
        });
        out.domain_radius = alpha.domain_radius;
        out.fd = alpha.fd;
        out.quad = alpha.quad;
        return Ok(out);
    }
    let (a, b) = (alpha.clone(), beta.clone());
    let sh = shuffles(p, q);
    Ok(alpha.derived(p + q, smooth, move |x, args| {
        let mut acc = Element::zero(&a.alg);
        for sigma in &sh {
            let pick = |r: std::ops::Range<usize>| -> Vec<Element<T>> { r.map(|i| args[sigma.apply(i)].clone()).collect() };
            let term = &a.eval(x, &pick(0..p))? * &b.eval(x, &pick(p..p + q))?;
            acc = if sigma.parity() < 0 { &acc - &term } else { &acc + &term };
        }
        Ok(acc)
    }))
}

/// `dω(x) ∘ (a₀, …, a_p) = Σᵢ (−1)ⁱ ∂_{aᵢ}[ω(·) ∘ (a₀, …, âᵢ, …, a_p)](x)` by central differences.
///
/// The result differentiates with ten times the step of `ω`, so that nested differentials
/// stay above the roundoff of the inner layer.
pub fn exterior_differential<T: Scalar>(omega: &FormP<T>) -> Result<FormP<T>> {
    if omega.smoothness < Smoothness::C1 {
        return Err(Error::InvalidArgument("exterior differential needs a C¹ form".into()));
    }
    let w = omega.clone();
    let fd = omega.fd;
    let p = omega.degree;
    let mut out = omega.derived(p + 1, omega.smoothness.lowered(), move |x, args| {
        let alg = &w.alg;
        let mut acc = Element::zero(alg);
        for i in 0..=p {
            let rest: Vec<Element<T>> = args.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, a)| a.clone()).collect();
            let g = |y: &Element<T>| w.eval(y, &rest).unwrap_or_else(|_| nan_element(alg));
            let d = fd.gateaux(g, x, &args[i])?;
            acc = if i % 2 == 1 { &acc - &d } else { &acc + &d };
        }
        Ok(acc)
    });
    out.fd = FiniteDiff::with_step(fd.rel_step * 10.0);
    Ok(out)
}

fn nan_element<T: Scalar>(alg: &Algebra<T>) -> Element<T> {
    Element::new(alg, vec![T::nan(); alg.dim()])
}

/// Exact `dω` of a tensor-polynomial form: `Σᵢ (−1)ⁱ D ∘ τᵢ` with `D` the derivative
/// (direction first) and `τᵢ` moving argument `i` to the front.
pub fn exterior_differential_tensor<T: Scalar>(omega: &TensorPoly<T>) -> TensorPoly<T> {
    let d = omega.derivative();
    let n = omega.degree() + 1;
    let mut out = TensorPoly::zero(omega.algebra(), n);
    for i in 0..n {
        let mut image = vec![i];
        image.extend((0..n).filter(|&k| k != i));
        let tau = Permutation::new(image).expect("cycle");
        let term = d.permute_args(&tau).scale(if i % 2 == 1 { -T::one() } else { T::one() });
        out = out.add(&term).expect("same degree");
    }
    out
}

/// `max ‖d(dω)(x) ∘ (a₀, …)‖ / Π‖aᵢ‖` over random probes.
pub fn d_squared_residual<T: Scalar>(omega: &FormP<T>, probes: usize, seed: u64) -> Result<T> {
    let dd = exterior_differential(&exterior_differential(omega)?)?;
    let mut rng = sampling::rng(seed);
    let radius = omega.domain_radius.map_or(1.0, |r| r.as_f64());
    let mut worst = T::zero();
    for _ in 0..probes {
        let x = sampling::random_element(&mut rng, &omega.alg, radius);
        let args = sampling::random_elements(&mut rng, &omega.alg, omega.degree + 2, 1.0);
        let v = dd.eval(&x, &args)?;
        let scale = args.iter().fold(T::one(), |a, e| a * e.coord_norm());
        worst = worst.max(v.coord_norm() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T: Scalar> {
    pub x: Element<T>,
    pub a1: Element<T>,
    pub a2: Element<T>,
    /// `dω(x) ∘ (a₁, a₂)`
    pub value: Element<T>,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T: Scalar> {
    Certified { max_residual: T, probes: usize },
    Refuted { witness: Witness<T> },
}

impl<T: Scalar> Verdict<T> {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified { .. })
    }
}

/// Probes `dω` at random points; certified when every relative residual is below `1e-6`,
/// otherwise refuted with the worst probe.
pub fn check_integrable<T: Scalar>(omega: &FormP<T>, probes: usize, seed: u64) -> Result<Verdict<T>> {
    if omega.degree != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: omega.degree });
    }
    let d = exterior_differential(omega)?;
    let mut rng = sampling::rng(seed);
    let radius = omega.domain_radius.map_or(1.0, |r| r.as_f64());
    let mut worst: Option<Witness<T>> = None;
    for _ in 0..probes.max(1) {
        let x = random_in_ball(&mut rng, &omega.alg, radius);
        let a1 = sampling::random_element(&mut rng, &omega.alg, 1.0);
        let a2 = sampling::random_element(&mut rng, &omega.alg, 1.0);
        let value = d.eval(&x, &[a1.clone(), a2.clone()])?;
        let residual = value.coord_norm() / (a1.coord_norm() * a2.coord_norm());
        if worst.as_ref().is_none_or(|w| residual > w.residual) {
            worst = Some(Witness { x, a1, a2, value, residual });
        }
    }
    let w = worst.expect("at least one probe");
    if w.residual < T::lit(INTEGRABLE_TOLERANCE) {
        Ok(Verdict::Certified { max_residual: w.residual, probes: probes.max(1) })
    } else {
        Ok(Verdict::Refuted { witness: w })
    }
}

fn random_in_ball<T: Scalar, R: Rng + ?Sized>(rng: &mut R, alg: &Algebra<T>, radius: f64) -> Element<T> {
    let dir: Vec<T> = sampling::random_unit_coords(rng, alg.dim());
    let r = T::lit(radius * rng.gen_range(0.0..1.0f64).powf(1.0 / alg.dim() as f64));
    Element::new(alg, dir.into_iter().map(|c| c * r).collect())
}

/// Poincaré operator: `k(ω)(x) ∘ (a₁, …, a_{p−1}) = ∫₀¹ t^{p−1} ω(t x) ∘ (x, a₁, …, a_{p−1}) dt`.
/// A 0-form maps to the zero 0-form.
pub fn poincare_k<T: Scalar>(omega: &FormP<T>) -> Result<FormP<T>> {
    let p = omega.degree;
    if p == 0 {
        let mut z = FormP::zero(&omega.alg, 0);
        z.domain_radius = omega.domain_radius;
        return Ok(z);
    }
    let w = omega.clone();
    Ok(omega.derived(p - 1, omega.smoothness, move |x, args| {
        if let Some(r) = w.domain_radius {
            if x.coord_norm() > r {
                log::warn!("poincare_k evaluated at ‖x‖ = {} beyond the form's domain radius {}", x.coord_norm(), r);
            }
        }
        let alg = &w.alg;
        let mut full = Vec::with_capacity(p);
        full.push(x.clone());
        full.extend(args.iter().cloned());
        let integrand = |t: T| -> Result<Vec<T>> {
            let v = w.eval(&x.scale(t), &full)?;
            Ok(v.scale(t.powi(p as i32 - 1)).into_coords())
        };
        let r = w.quad.integrate(integrand, alg.dim())?;
        Ok(Element::new(alg, r.value))
    }))
}

/// Components `ω_{i₁…i_p}(x) = ω(x) ∘ (e_{i₁}, …, e_{i_p})`, indexed lexicographically.
#[derive(Debug, Clone)]
pub struct FormCoordinates<T: Scalar> {
    pub dim: usize,
    pub degree: usize,
    pub values: Vec<Element<T>>,
}

impl<T: Scalar> FormCoordinates<T> {
    /// `ω_{i₁…i_p} a₁^{i₁} … a_p^{i_p}`
    pub fn apply(&self, args: &[Element<T>]) -> Element<T> {
        let mut acc = Element::zero(self.values[0].algebra());
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut w = T::one();
            for k in (0..self.degree).rev() {
                w = w * args[k].coords()[rem % self.dim];
                rem /= self.dim;
            }
            if w != T::zero() {
                acc = &acc + &v.scale(w);
            }
        }
        acc
    }
}

pub fn form_coordinates<T: Scalar>(omega: &FormP<T>, x: &Element<T>) -> Result<FormCoordinates<T>> {
    let d = omega.alg.dim();
    let p = omega.degree;
    let count = d.pow(p as u32);
    let mut values = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rem = flat;
        let mut idx = vec![0; p];
        for k in (0..p).rev() {
            idx[k] = rem % d;
            rem /= d;
        }
        let args: Vec<Element<T>> = idx.iter().map(|&i| Element::basis(&omega.alg, i)).collect();
        values.push(omega.eval(x, &args)?);
    }
    Ok(FormCoordinates { dim: d, degree: p, values })
}

/// Random skew tensor-polynomial `p`-form whose coefficient polynomials have total degree ≤ `max_deg`.
pub fn random_polynomial_form<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    alg: &Algebra<T>,
    p: usize,
    max_deg: usize,
    terms: usize,
) -> Result<TensorPoly<T>> {
    let mut out = Vec::new();
    for _ in 0..terms {
        let total = rng.gen_range(0..=max_deg);
        let mut degs = vec![0usize; p + 1];
        for _ in 0..total {
            let k = rng.gen_range(0..=p);
            degs[k] += 1;
        }
        let parts = degs
            .iter()
            .map(|&n| {
                let coeffs = sampling::random_elements(rng, alg, n + 1, 1.0);
                let slots = (0..n).map(|_| alg.slot_maps()[rng.gen_range(0..alg.basis_maps().len())]).collect();
                NoncommPoly::from_monomials(alg, vec![Monomial::new(coeffs, slots).expect("shape")]).expect("same algebra")
            })
            .collect();
        let slots = (0..p).map(|_| alg.slot_maps()[rng.gen_range(0..alg.basis_maps().len())]).collect();
        out.push(TensorTerm { weight: T::one(), parts, slots, perm: Permutation::identity(p) });
    }
    let tp = TensorPoly::from_terms(alg, p, out)?;
    if p >= 2 {
        tp.alternate()
    } else {
        Ok(tp)
    }
}
