//! Power-series solutions of the symmetrized ODE family `dy ∘ h = ½(y h + h y)`
//! and Taylor antiderivatives of polynomial 1-forms.

use std::fmt;
use std::ops::Neg;

use num_traits::Num;

use crate::algebra::{Algebra, Element};
use crate::calculus::{Monomial, NoncommPoly, TensorPoly};
use crate::error::{Error, Result};
use crate::multilinear::{gen_se, SeSym};
use crate::sampling;
use crate::scalar::Scalar;

pub const MAX_ORDER: usize = 64;
pub const DEFAULT_ORDER: usize = 30;
/// `eval_series` refuses arguments longer than this unless explicitly overridden.
pub const EVAL_RADIUS: f64 = 10.0;
/// Probe count for the integrability gate of [`indefinite_integral_taylor`].
pub const SYMMETRY_PROBES: usize = 8;
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// `y' = y`, `y(0) = 1`
    Exp,
    /// `y₁' = y₂`, `y₂' = y₁`, `(y₁, y₂)(0) = (0, 1)`
    Hyperbolic,
    /// `y₁' = y₂`, `y₂' = −y₁`, `(y₁, y₂)(0) = (0, 1)`
    Elliptic,
}

impl SystemKind {
    pub fn components(self) -> usize {
        match self {
            SystemKind::Exp => 1,
            _ => 2,
        }
    }

    fn step<T: Clone + Num + Neg<Output = T>>(self, d: &[T]) -> Vec<T> {
        match self {
            SystemKind::Exp => vec![d[0].clone()],
            SystemKind::Hyperbolic => vec![d[1].clone(), d[0].clone()],
            SystemKind::Elliptic => vec![d[1].clone(), -d[0].clone()],
        }
    }

    fn initial<T: Num>(self) -> Vec<T> {
        match self {
            SystemKind::Exp => vec![T::one()],
            _ => vec![T::zero(), T::one()],
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(SystemKind::Exp),
            "hyperbolic" | "sinh" | "cosh" => Ok(SystemKind::Hyperbolic),
            "elliptic" | "sin" | "cos" => Ok(SystemKind::Elliptic),
            other => Err(Error::InvalidArgument(format!("unknown series kind `{other}`"))),
        }
    }
}

/// `Σ cₙ xⁿ`
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries<T> {
    pub coeffs: Vec<T>,
}

impl<T> ScalarSeries<T> {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl<T: Scalar> ScalarSeries<T> {
    /// The series as a polynomial with scalar coefficients in the given algebra.
    pub fn to_poly(&self, alg: &Algebra<T>) -> NoncommPoly<T> {
        let monomials = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != T::zero())
            .map(|(n, c)| {
                let mut m = Monomial::power(alg, n);
                m.weight = *c;
                m
            })
            .collect();
        NoncommPoly::from_monomials(alg, monomials).expect("well-formed monomials")
    }
}

impl<T: fmt::Display> fmt::Display for ScalarSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// One series per component of the system (`[y]` or `[y₁, y₂]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution<T> {
    pub kind: SystemKind,
    pub components: Vec<ScalarSeries<T>>,
}

/// Taylor coefficients at 0 through order `n`, from `Dₙ = M Dₙ₋₁`, `cₙ = Dₙ / n!`.
/// Works over any field, so `BigRational` gives exact coefficients.
pub fn solve_symmetric_system<T: Clone + Num + Neg<Output = T>>(kind: SystemKind, order: usize) -> Result<SystemSolution<T>> {
    if order > MAX_ORDER {
        return Err(Error::TooLarge { n: order, max: MAX_ORDER });
    }
    let m = kind.components();
    let mut d = kind.initial::<T>();
    let mut fact = T::one();
    let mut comps: Vec<Vec<T>> = vec![Vec::with_capacity(order + 1); m];
    let mut n_t = T::zero();
    for n in 0..=order {
        if n > 0 {
            n_t = n_t + T::one();
            fact = fact * n_t.clone();
            d = kind.step(&d);
        }
        for c in 0..m {
            comps[c].push(d[c].clone() / fact.clone());
        }
    }
    Ok(SystemSolution { kind, components: comps.into_iter().map(|coeffs| ScalarSeries { coeffs }).collect() })
}

/// `dⁿy(0) ∘ (h, …, h)` for each component, summing `2⁻ⁿ w(y, h, …, h)` over the words `w ∈ SE(n)`.
pub fn nth_derivative_by_words<T: Scalar>(kind: SystemKind, n: usize, h: &Element<T>) -> Result<Vec<Element<T>>> {
    let alg = h.algebra();
    let mut y = kind.initial::<T>();
    for _ in 0..n {
        y = kind.step(&y);
    }
    let words = gen_se(n)?;
    let half_n = T::lit(0.5).powi(n as i32);
    Ok(y
        .iter()
        .map(|&yc| {
            words.iter().fold(Element::zero(alg), |acc, w| {
                let term = w.iter().fold(Element::one(alg), |p, s| match s {
                    SeSym::Y => p.scale(yc),
                    SeSym::H(_) => &p * h,
                });
                &acc + &term.scale(half_n)
            })
        })
        .collect())
}

/// Horner evaluation; refuses `‖x‖ > 10`.
pub fn eval_series<T: Scalar>(s: &ScalarSeries<T>, x: &Element<T>) -> Result<Element<T>> {
    if x.coord_norm() > T::lit(EVAL_RADIUS) {
        return Err(Error::InvalidArgument(format!("series argument norm exceeds {EVAL_RADIUS}; use eval_series_unchecked")));
    }
    Ok(eval_series_unchecked(s, x))
}

pub fn eval_series_unchecked<T: Scalar>(s: &ScalarSeries<T>, x: &Element<T>) -> Element<T> {
    let alg = x.algebra();
    let mut acc = Element::zero(alg);
    for c in s.coeffs.iter().rev() {
        acc = &(&acc * x) + &Element::scalar(alg, *c);
    }
    acc
}

/// Term-by-term derivative `Σ cₙ Σₖ xᵏ a xⁿ⁻¹⁻ᵏ` of the series at `x` in direction `a`.
pub fn series_derivative<T: Scalar>(s: &ScalarSeries<T>, x: &Element<T>, a: &Element<T>) -> Element<T> {
    let alg = x.algebra();
    let n = s.coeffs.len();
    let mut powers = vec![Element::one(alg)];
    for k in 1..n {
        powers.push(&powers[k - 1] * x);
    }
    let mut acc = Element::zero(alg);
    for (deg, c) in s.coeffs.iter().enumerate().skip(1) {
        for k in 0..deg {
            acc = &acc + &(&(&powers[k] * a) * &powers[deg - 1 - k]).scale(*c);
        }
    }
    acc
}

fn float_solution<T: Scalar>(kind: SystemKind, order: usize) -> SystemSolution<T> {
    solve_symmetric_system::<T>(kind, order).expect("order within limit")
}

pub fn exp_series<T: Scalar>(order: usize) -> ScalarSeries<T> {
    float_solution(SystemKind::Exp, order).components.remove(0)
}

pub fn sinh_cosh_series<T: Scalar>(order: usize) -> (ScalarSeries<T>, ScalarSeries<T>) {
    let mut c = float_solution(SystemKind::Hyperbolic, order).components;
    let cosh = c.pop().unwrap();
    (c.pop().unwrap(), cosh)
}

pub fn sin_cos_series<T: Scalar>(order: usize) -> (ScalarSeries<T>, ScalarSeries<T>) {
    let mut c = float_solution(SystemKind::Elliptic, order).components;
    let cos = c.pop().unwrap();
    (c.pop().unwrap(), cos)
}

/// Largest asymmetry `‖D(h₁,h₂) − D(h₂,h₁)‖` of the formal second derivative over seeded probes.
pub fn second_derivative_asymmetry<T: Scalar>(g: &TensorPoly<T>, probes: usize, seed: u64) -> T {
    let d = g.derivative();
    let alg = g.algebra();
    let mut rng = sampling::rng(seed);
    let mut worst = T::zero();
    for _ in 0..probes {
        let x = sampling::random_element(&mut rng, alg, 1.0);
        let h1 = sampling::random_element(&mut rng, alg, 1.0);
        let h2 = sampling::random_element(&mut rng, alg, 1.0);
        let at = d.at(&x);
        let a = at.apply(&[h1.clone(), h2.clone()]).expect("degree 2");
        let b = at.apply(&[h2, h1]).expect("degree 2");
        let scale = T::one().max(a.coord_norm()).max(b.coord_norm());
        worst = worst.max(a.dist(&b) / scale);
    }
    worst
}

/// Taylor antiderivative `f` with `df = g` and `f(0) = c`, truncated at degree `order`.
pub fn indefinite_integral_taylor<T: Scalar>(g: &TensorPoly<T>, order: usize, c: &Element<T>) -> Result<NoncommPoly<T>> {
    if g.degree() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: g.degree() });
    }
    let alg = g.algebra();
    if !c.same_algebra(&Element::zero(alg)) {
        return Err(Error::AlgebraMismatch);
    }
    let asym = second_derivative_asymmetry(g, SYMMETRY_PROBES, 0x1d1f);
    if !(asym <= T::lit(SYMMETRY_TOLERANCE)) {
        return Err(Error::NotIntegrable { residual: asym.as_f64() });
    }
    let mut monomials = vec![Monomial::constant(c.clone())];
    for t in g.terms() {
        for l in t.parts[0].monomials() {
            for r in t.parts[1].monomials() {
                let deg = l.degree() + r.degree() + 1;
                if deg > order {
                    continue;
                }
                let mut coeffs = l.coeffs.clone();
                coeffs.extend(r.coeffs.iter().cloned());
                let mut slots = l.slots.clone();
                slots.push(t.slots[0]);
                slots.extend(r.slots.iter().copied());
                monomials.push(Monomial { weight: t.weight * l.weight * r.weight / T::lit(deg as f64), coeffs, slots });
            }
        }
    }
    Ok(NoncommPoly::from_monomials(alg, monomials)?.compact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{quaternion, real};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn fact(n: u64) -> f64 {
        (1..=n).product::<u64>() as f64
    }

    #[test]
    fn exp_coefficients() {
        let s = solve_symmetric_system::<f64>(SystemKind::Exp, 5).unwrap();
        assert_eq!(s.components[0].coeffs, vec![1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0]);
    }

    #[test]
    fn elliptic_coefficients() {
        let (sin, cos) = sin_cos_series::<f64>(4);
        assert_eq!(sin.coeffs, vec![0.0, 1.0, 0.0, -1.0 / 6.0, 0.0]);
        assert_eq!(cos.coeffs, vec![1.0, 0.0, -0.5, 0.0, 1.0 / 24.0]);
        let (sinh, cosh) = sinh_cosh_series::<f64>(0);
        assert_eq!((sinh.coeffs, cosh.coeffs), (vec![0.0], vec![1.0]));
    }

    #[test]
    fn exact_rational_coefficients() {
        let s = solve_symmetric_system::<BigRational>(SystemKind::Elliptic, 7).unwrap();
        let want = BigRational::new(BigInt::from(-1), BigInt::from(5040));
        assert_eq!(s.components[0].coeffs[7], want);
    }

    #[test]
    fn words_agree_with_recurrence() {
        let r = real::<f64>();
        let one = Element::one(&r);
        for kind in [SystemKind::Exp, SystemKind::Hyperbolic, SystemKind::Elliptic] {
            let sol = solve_symmetric_system::<f64>(kind, 6).unwrap();
            for n in 0..=6 {
                let d = nth_derivative_by_words(kind, n, &one).unwrap();
                for (c, comp) in d.iter().zip(&sol.components) {
                    assert!((c.coords()[0] / fact(n as u64) - comp.coeffs[n]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn horner_and_radius() {
        let qa = quaternion::<f64>();
        let x = Element::from_f64(&qa, &[0., std::f64::consts::FRAC_PI_2, 0., 0.]);
        let e = eval_series(&exp_series(DEFAULT_ORDER), &x).unwrap();
        assert!(e.approx_eq(&Element::basis(&qa, 1), 1e-8));
        let big = Element::from_f64(&qa, &[11., 0., 0., 0.]);
        assert!(eval_series(&exp_series(5), &big).is_err());
    }

    #[test]
    fn cube_antiderivative() {
        let qa = quaternion::<f64>();
        let x2 = NoncommPoly::power(&qa, 2);
        let x1 = NoncommPoly::x(&qa);
        let one = NoncommPoly::constant(Element::one(&qa));
        let g = TensorPoly::simple(vec![one.clone(), x2.clone()])
            .unwrap()
            .add(&TensorPoly::simple(vec![x1.clone(), x1]).unwrap())
            .unwrap()
            .add(&TensorPoly::simple(vec![x2.clone(), one]).unwrap())
            .unwrap();
        let c = Element::from_f64(&qa, &[1., 2., 3., 4.]);
        let f = indefinite_integral_taylor(&g, DEFAULT_ORDER, &c).unwrap();
        let x = Element::from_f64(&qa, &[0.3, -0.2, 1.1, 0.5]);
        assert!(f.eval(&x).unwrap().approx_eq(&(&x.pow(3) + &c), 1e-14));
    }

    #[test]
    fn three_x_squared_is_not_integrable() {
        let qa = quaternion::<f64>();
        let three = NoncommPoly::constant(Element::scalar(&qa, 3.0));
        let g = TensorPoly::simple(vec![three, NoncommPoly::power(&qa, 2)]).unwrap();
        assert!(matches!(indefinite_integral_taylor(&g, 10, &Element::zero(&qa)), Err(Error::NotIntegrable { .. })));
    }
}
