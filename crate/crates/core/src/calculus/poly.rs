//! Noncommutative polynomials in one variable and tensor-valued polynomial fields.

use std::fmt;

use crate::algebra::{Algebra, Element, SlotMap};
use crate::error::{Error, Result};
use crate::multilinear::{Permutation, PolyMap, Term};
use crate::scalar::Scalar;

/// `w · a₀ (F₁ ∘ x) a₁ … (Fₙ ∘ x) aₙ`
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T: Scalar> {
    pub weight: T,
    pub coeffs: Vec<Element<T>>,
    pub slots: Vec<SlotMap>,
}

impl<T: Scalar> Monomial<T> {
    pub fn new(coeffs: Vec<Element<T>>, slots: Vec<SlotMap>) -> Result<Self> {
        if coeffs.len() != slots.len() + 1 {
            return Err(Error::ArityMismatch { expected: slots.len() + 1, got: coeffs.len() });
        }
        Ok(Monomial { weight: T::one(), coeffs, slots })
    }

    pub fn constant(c: Element<T>) -> Self {
        Monomial { weight: T::one(), coeffs: vec![c], slots: vec![] }
    }

    /// `xⁿ` with unit coefficients.
    pub fn power(alg: &Algebra<T>, n: usize) -> Self {
        Monomial { weight: T::one(), coeffs: vec![Element::one(alg); n + 1], slots: vec![SlotMap::E; n] }
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    /// `(a₀…aₙ) ⊗̲ (b₀…bₘ) = (a₀, …, aₙb₀, …, bₘ)`
    pub fn join(&self, o: &Self) -> Self {
        let n = self.degree();
        let mut coeffs = self.coeffs[..n].to_vec();
        coeffs.push(&self.coeffs[n] * &o.coeffs[0]);
        coeffs.extend(o.coeffs[1..].iter().cloned());
        let mut slots = self.slots.clone();
        slots.extend(o.slots.iter().copied());
        Monomial { weight: self.weight * o.weight, coeffs, slots }
    }

    fn eval_with(&self, alg: &Algebra<T>, mapped: &mut MappedArg<T>) -> Vec<T> {
        let mut acc = self.coeffs[0].coords().to_vec();
        for (i, s) in self.slots.iter().enumerate() {
            acc = alg.mul_coords(&acc, mapped.get(*s));
            acc = alg.mul_coords(&acc, self.coeffs[i + 1].coords());
        }
        acc.iter_mut().for_each(|v| *v = *v * self.weight);
        acc
    }

    pub fn eval(&self, x: &Element<T>) -> Element<T> {
        let alg = x.algebra().clone();
        let mut m = MappedArg::new(x);
        Element::new(&alg, self.eval_with(&alg, &mut m))
    }
}

/// Caches `F ∘ x` per basis map.
struct MappedArg<'a, T: Scalar> {
    x: &'a Element<T>,
    cache: Vec<Option<Vec<T>>>,
}

impl<'a, T: Scalar> MappedArg<'a, T> {
    fn new(x: &'a Element<T>) -> Self {
        MappedArg { x, cache: vec![None; x.algebra().basis_maps().len()] }
    }

    fn get(&mut self, s: SlotMap) -> &[T] {
        let x = self.x;
        self.cache[s.index()].get_or_insert_with(|| x.apply_slot(s).into_coords())
    }
}

/// Sum of monomials in the single variable `x`.
#[derive(Clone, Debug)]
pub struct NoncommPoly<T: Scalar> {
    alg: Algebra<T>,
    monomials: Vec<Monomial<T>>,
}

impl<T: Scalar> NoncommPoly<T> {
    pub fn zero(alg: &Algebra<T>) -> Self {
        NoncommPoly { alg: alg.clone(), monomials: vec![] }
    }

    pub fn constant(c: Element<T>) -> Self {
        NoncommPoly { alg: c.algebra().clone(), monomials: vec![Monomial::constant(c)] }
    }

    pub fn x(alg: &Algebra<T>) -> Self {
        Self::power(alg, 1)
    }

    pub fn power(alg: &Algebra<T>, n: usize) -> Self {
        NoncommPoly { alg: alg.clone(), monomials: vec![Monomial::power(alg, n)] }
    }

    /// `F ∘ x` for a registered basis map.
    pub fn slot_var(alg: &Algebra<T>, s: SlotMap) -> Self {
        let one = Element::one(alg);
        NoncommPoly { alg: alg.clone(), monomials: vec![Monomial { weight: T::one(), coeffs: vec![one.clone(), one], slots: vec![s] }] }
    }

    pub fn from_monomials(alg: &Algebra<T>, monomials: Vec<Monomial<T>>) -> Result<Self> {
        let probe = Element::zero(alg);
        for m in &monomials {
            if m.coeffs.len() != m.slots.len() + 1 {
                return Err(Error::ArityMismatch { expected: m.slots.len() + 1, got: m.coeffs.len() });
            }
            if m.coeffs.iter().any(|c| !c.same_algebra(&probe)) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(NoncommPoly { alg: alg.clone(), monomials })
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.alg
    }

    pub fn monomials(&self) -> &[Monomial<T>] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.iter().all(|m| m.weight == T::zero() || m.coeffs.iter().any(|c| c.is_zero()))
    }

    /// Largest monomial degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &Element<T>) -> Result<Element<T>> {
        if !x.same_algebra(&Element::zero(&self.alg)) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Element::new(&self.alg, self.eval_coords(x)))
    }

    pub(crate) fn eval_coords(&self, x: &Element<T>) -> Vec<T> {
        let mut mapped = MappedArg::new(x);
        let mut out = vec![T::zero(); self.alg.dim()];
        for m in &self.monomials {
            for (o, v) in out.iter_mut().zip(m.eval_with(&self.alg, &mut mapped)) {
                *o = *o + v;
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.monomials.extend(o.monomials.iter().cloned());
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.monomials.iter_mut().for_each(|m| m.weight = m.weight * s);
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let monomials = self.monomials.iter().flat_map(|a| o.monomials.iter().map(move |b| a.join(b))).collect();
        NoncommPoly { alg: self.alg.clone(), monomials }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = NoncommPoly::constant(Element::one(&self.alg));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Monomials of exactly degree `n`.
    pub fn homogeneous_part(&self, n: usize) -> Self {
        NoncommPoly { alg: self.alg.clone(), monomials: self.monomials.iter().filter(|m| m.degree() == n).cloned().collect() }
    }

    /// Drops monomials of degree above `n`.
    pub fn truncate(&self, n: usize) -> Self {
        NoncommPoly { alg: self.alg.clone(), monomials: self.monomials.iter().filter(|m| m.degree() <= n).cloned().collect() }
    }

    /// Merges monomials with identical coefficients and slot maps; drops zero ones.
    pub fn compact(&self) -> Self {
        let mut out: Vec<Monomial<T>> = Vec::new();
        for m in &self.monomials {
            if let Some(e) = out.iter_mut().find(|e| e.slots == m.slots && e.coeffs == m.coeffs) {
                e.weight = e.weight + m.weight;
            } else {
                out.push(m.clone());
            }
        }
        out.retain(|m| m.weight != T::zero() && m.coeffs.iter().all(|c| !c.is_zero()));
        NoncommPoly { alg: self.alg.clone(), monomials: out }
    }
}

impl<T: Scalar> fmt::Display for Monomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = self.coeffs[0].algebra().clone();
        let one = Element::one(&alg);
        let mut pieces: Vec<String> = Vec::new();
        let mut run = 0usize;
        let flush = |pieces: &mut Vec<String>, run: &mut usize| {
            match *run {
                0 => {}
                1 => pieces.push("x".into()),
                k => pieces.push(format!("x^{k}")),
            }
            *run = 0;
        };
        let coeff_str = |c: &Element<T>, f: &fmt::Formatter<'_>| {
            let s = match f.precision() {
                Some(p) => format!("{:.*}", p, c),
                None => c.to_string(),
            };
            let nonzero = c.coords().iter().filter(|v| **v != T::zero()).count();
            if nonzero == 1 && !s.contains(' ') && !s.starts_with('-') {
                s
            } else {
                format!("({s})")
            }
        };
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != one {
                flush(&mut pieces, &mut run);
                pieces.push(coeff_str(c, f));
            }
            if i < self.slots.len() {
                if self.slots[i] == SlotMap::E {
                    run += 1;
                } else {
                    flush(&mut pieces, &mut run);
                    pieces.push(format!("{}(x)", alg.slot_name(self.slots[i])));
                }
            }
        }
        flush(&mut pieces, &mut run);
        let body = if pieces.is_empty() { "1".to_string() } else { pieces.join(" ") };
        if self.weight == T::one() {
            write!(f, "{body}")
        } else if self.weight == -T::one() {
            write!(f, "-{body}")
        } else {
            write!(f, "{}·{body}", self.weight)
        }
    }
}

impl<T: Scalar> fmt::Display for NoncommPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.monomials.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match f.precision() {
                Some(p) => write!(f, "{:.*}", p, m)?,
                None => write!(f, "{m}")?,
            }
        }
        Ok(())
    }
}

/// One term `w · P₀(x) ⊗ P₁(x) ⊗ … ⊗ P_k(x)` with slot maps and argument permutation.
#[derive(Clone, Debug)]
pub struct TensorTerm<T: Scalar> {
    pub weight: T,
    pub parts: Vec<NoncommPoly<T>>,
    pub slots: Vec<SlotMap>,
    pub perm: Permutation,
}

/// A field `x ↦ PolyMap` whose tensor coefficients are polynomials in `x`.
#[derive(Clone, Debug)]
pub struct TensorPoly<T: Scalar> {
    alg: Algebra<T>,
    degree: usize,
    terms: Vec<TensorTerm<T>>,
}

impl<T: Scalar> TensorPoly<T> {
    pub fn zero(alg: &Algebra<T>, degree: usize) -> Self {
        TensorPoly { alg: alg.clone(), degree, terms: vec![] }
    }

    pub fn from_terms(alg: &Algebra<T>, degree: usize, terms: Vec<TensorTerm<T>>) -> Result<Self> {
        for t in &terms {
            if t.parts.len() != degree + 1 || t.slots.len() != degree || t.perm.len() != degree {
                return Err(Error::ArityMismatch { expected: degree, got: t.slots.len() });
            }
            if t.parts.iter().any(|p| !p.alg.same_product(alg)) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(TensorPoly { alg: alg.clone(), degree, terms })
    }

    /// `P₀ ⊗ … ⊗ P_k` with identity slots and permutation.
    pub fn simple(parts: Vec<NoncommPoly<T>>) -> Result<Self> {
        let alg = parts.first().ok_or_else(|| Error::InvalidArgument("no parts".into()))?.alg.clone();
        let k = parts.len() - 1;
        Self::from_terms(&alg, k, vec![TensorTerm { weight: T::one(), parts, slots: vec![SlotMap::E; k], perm: Permutation::identity(k) }])
    }

    /// The constant field whose value everywhere is `f`.
    pub fn constant(f: &PolyMap<T>) -> Self {
        let terms = f
            .terms()
            .iter()
            .map(|t| TensorTerm {
                weight: t.weight,
                parts: t.coeffs.iter().cloned().map(NoncommPoly::constant).collect(),
                slots: t.slots.clone(),
                perm: t.perm.clone(),
            })
            .collect();
        TensorPoly { alg: f.algebra().clone(), degree: f.degree(), terms }
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.alg
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[TensorTerm<T>] {
        &self.terms
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.degree != o.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: o.degree });
        }
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.weight = t.weight * s);
        out
    }

    /// Value at `x` as a polylinear map.
    pub fn at(&self, x: &Element<T>) -> PolyMap<T> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                weight: t.weight,
                coeffs: t.parts.iter().map(|p| Element::new(&self.alg, p.eval_coords(x))).collect(),
                slots: t.slots.clone(),
                perm: t.perm.clone(),
            })
            .collect();
        PolyMap::from_terms(&self.alg, self.degree, terms).expect("term shapes validated at construction")
    }

    pub fn apply_at(&self, x: &Element<T>, args: &[Element<T>]) -> Result<Element<T>> {
        self.at(x).apply(args)
    }

    /// `x ↦ self(x) ∘ σ`
    pub fn permute_args(&self, sigma: &Permutation) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.perm = sigma.compose(&t.perm));
        out
    }

    /// Pointwise alternation `(1/k!) Σ_σ |σ| self ∘ σ`.
    pub fn alternate(&self) -> Result<Self> {
        let k = self.degree;
        if k > crate::multilinear::MAX_DEGREE {
            return Err(Error::TooLarge { n: k, max: crate::multilinear::MAX_DEGREE });
        }
        let perms = crate::multilinear::gen_s(k)?;
        let norm = T::one() / T::lit(perms.len() as f64);
        let mut terms = Vec::with_capacity(perms.len() * self.terms.len());
        for sigma in &perms {
            let sign = if sigma.parity() < 0 { -norm } else { norm };
            for t in &self.terms {
                terms.push(TensorTerm { weight: t.weight * sign, perm: sigma.compose(&t.perm), ..t.clone() });
            }
        }
        Ok(TensorPoly { alg: self.alg.clone(), degree: k, terms })
    }

    /// Exact derivative `x ↦ (h, a₁…a_k) ↦ ∂ₕ[self(x)(a₁…a_k)]`, with the new direction first.
    pub fn derivative(&self) -> TensorPoly<T> {
        let mut terms = Vec::new();
        for t in &self.terms {
            for (i, part) in t.parts.iter().enumerate() {
                for dt in diff_poly_tensor(part).terms {
                    let mut parts = t.parts[..i].to_vec();
                    parts.extend(dt.parts.iter().cloned());
                    parts.extend(t.parts[i + 1..].iter().cloned());
                    let mut slots = t.slots[..i].to_vec();
                    slots.push(dt.slots[0]);
                    slots.extend(t.slots[i..].iter().copied());
                    let mut image: Vec<usize> = t.perm.image()[..i].iter().map(|v| v + 1).collect();
                    image.push(0);
                    image.extend(t.perm.image()[i..].iter().map(|v| v + 1));
                    terms.push(TensorTerm {
                        weight: t.weight * dt.weight,
                        parts,
                        slots,
                        perm: Permutation::new(image).expect("shifted permutation"),
                    });
                }
            }
        }
        TensorPoly { alg: self.alg.clone(), degree: self.degree + 1, terms }
    }
}

impl<T: Scalar> fmt::Display for TensorPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if t.weight != T::one() {
                write!(f, "{}·", t.weight)?;
            }
            let parts: Vec<String> = t
                .parts
                .iter()
                .map(|p| {
                    let s = match f.precision() {
                        Some(q) => format!("{:.*}", q, p),
                        None => p.to_string(),
                    };
                    if p.monomials.len() > 1 {
                        format!("({s})")
                    } else {
                        s
                    }
                })
                .collect();
            write!(f, "{}", parts.join("⊗"))?;
            if t.slots.iter().any(|s| *s != SlotMap::E) {
                let names: Vec<&str> = t.slots.iter().map(|s| self.alg.slot_name(*s)).collect();
                write!(f, "∘({})", names.join(","))?;
            }
            if !t.perm.is_identity() {
                write!(f, "∘σ{}", t.perm)?;
            }
        }
        Ok(())
    }
}

/// Closed first derivative: the degree-`n` monomial contributes one term per slot.
pub fn diff_poly_tensor<T: Scalar>(p: &NoncommPoly<T>) -> TensorPoly<T> {
    diff_poly_k_tensor(p, 1)
}

/// Closed `k`-th derivative, one term per SO(k, n) placement for each monomial of degree `n ≥ k`.
pub fn diff_poly_k_tensor<T: Scalar>(p: &NoncommPoly<T>, k: usize) -> TensorPoly<T> {
    let alg = &p.alg;
    let mut terms = Vec::new();
    for m in &p.monomials {
        let n = m.degree();
        if n < k {
            continue;
        }
        for placement in crate::multilinear::perm::enumerate_so(k, n).into_iter().rev() {
            let ordered = placement.slots_in_order();
            let mut parts = Vec::with_capacity(k + 1);
            let mut slots = Vec::with_capacity(k);
            let mut image = Vec::with_capacity(k);
            let mut start = 0;
            for &(pos, h) in &ordered {
                parts.push(segment(alg, m, start, pos));
                slots.push(m.slots[pos]);
                image.push(h);
                start = pos + 1;
            }
            parts.push(segment(alg, m, start, n));
            terms.push(TensorTerm { weight: m.weight, parts, slots, perm: Permutation::new(image).expect("placement") });
        }
    }
    TensorPoly { alg: alg.clone(), degree: k, terms }
}

/// Factors `a_start (F x) … a_end` of a monomial, i.e. slots `start..end`.
fn segment<T: Scalar>(alg: &Algebra<T>, m: &Monomial<T>, start: usize, end: usize) -> NoncommPoly<T> {
    let mono = Monomial { weight: T::one(), coeffs: m.coeffs[start..=end].to_vec(), slots: m.slots[start..end].to_vec() };
    NoncommPoly { alg: alg.clone(), monomials: vec![mono] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, quaternion};

    fn q(c: [f64; 4]) -> Element<f64> {
        Element::from_f64(&quaternion(), &c)
    }

    #[test]
    fn cube_of_i_plus_j() {
        let x = q([0., 1., 1., 0.]);
        let p = NoncommPoly::power(&quaternion(), 3);
        assert!(p.eval(&x).unwrap().approx_eq(&x.scale(-2.0), 1e-14));
    }

    #[test]
    fn conjugate_sandwich() {
        let c = complex::<f64>();
        let (a0, a1) = (Element::from_f64(&c, &[1., 2.]), Element::from_f64(&c, &[0., -1.]));
        let m = Monomial::new(vec![a0.clone(), a1.clone()], vec![c.slot_map("I").unwrap()]).unwrap();
        let x = Element::from_f64(&c, &[3., 4.]);
        let want = &(&a0 * &Element::from_f64(&c, &[3., -4.])) * &a1;
        assert!(m.eval(&x).approx_eq(&want, 1e-14));
    }

    #[test]
    fn derivative_display() {
        let qa = quaternion::<f64>();
        assert_eq!(diff_poly_tensor(&NoncommPoly::power(&qa, 2)).to_string(), "x⊗1 + 1⊗x");
        assert_eq!(diff_poly_tensor(&NoncommPoly::power(&qa, 3)).to_string(), "x^2⊗1 + x⊗x + 1⊗x^2");
    }

    #[test]
    fn bxc_derivative_is_constant() {
        let (b, c) = (q([0., 1., 2., 0.]), q([1., 0., 0., -1.]));
        let p = NoncommPoly::from_monomials(&quaternion(), vec![Monomial::new(vec![b.clone(), c.clone()], vec![SlotMap::E]).unwrap()]).unwrap();
        let d = diff_poly_tensor(&p);
        let f = d.at(&q([5., 1., 1., 1.]));
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].coeffs, vec![b, c]);
    }

    #[test]
    fn second_derivative_of_cube() {
        let qa = quaternion::<f64>();
        let d2 = diff_poly_k_tensor(&NoncommPoly::power(&qa, 3), 2);
        assert_eq!(d2.terms().len(), 6);
        let (x, h1, h2) = (q([0.2, 1., -1., 0.5]), q([1., 0.3, 0., 2.]), q([-0.7, 0., 1., 1.]));
        let got = d2.apply_at(&x, &[h1.clone(), h2.clone()]).unwrap();
        let want = [
            &(&h1 * &h2) * &x,
            &(&h1 * &x) * &h2,
            &(&h2 * &h1) * &x,
            &(&x * &h1) * &h2,
            &(&h2 * &x) * &h1,
            &(&x * &h2) * &h1,
        ]
        .into_iter()
        .fold(Element::zero(&qa), |a, b| &a + &b);
        assert!(got.approx_eq(&want, 1e-13));
    }

    #[test]
    fn tensor_derivative_matches_k2() {
        let qa = quaternion::<f64>();
        let p = NoncommPoly::power(&qa, 3);
        let d1 = diff_poly_tensor(&p).derivative();
        let d2 = diff_poly_k_tensor(&p, 2);
        let (x, h1, h2) = (q([0.2, 1., -1., 0.5]), q([1., 0.3, 0., 2.]), q([-0.7, 0., 1., 1.]));
        let a = d1.apply_at(&x, &[h1.clone(), h2.clone()]).unwrap();
        let b = d2.apply_at(&x, &[h1, h2]).unwrap();
        assert!(a.approx_eq(&b, 1e-13));
    }

    #[test]
    fn too_high_order_vanishes() {
        let d = diff_poly_k_tensor(&NoncommPoly::power(&quaternion::<f64>(), 2), 3);
        assert!(d.terms().is_empty());
    }
}
