//! Polylinear maps `Aⁿ → A` in tensor form.
//!
//! A term `w · a₀ ⊗ a₁ ⊗ … ⊗ aₙ` with slot maps `F₁ … Fₙ` and permutation `σ` acts as
//! `w · a₀ (F₁ ∘ x_{σ(1)}) a₁ … (Fₙ ∘ x_{σ(n)}) aₙ`.

mod jacobian;
pub(crate) mod perm;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use jacobian::{jacobian_by_contraction, jacobian_to_tensor, tensor_to_jacobian, TensorFit};
pub use perm::{
    gen_s, gen_se, gen_so, insert_after, insert_before, is_se_word, se_by_filter, so_by_filter, word_to_string,
    Permutation, SeSym, SeWord, SoPlacement, MAX_ENUM,
};

use crate::algebra::{Algebra, Element, SlotMap};
use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::Scalar;

/// Degree limit for [`alternate`], [`symmetrize`] and [`wedge`].
pub const MAX_DEGREE: usize = 6;

/// Residual below which a map counts as skew-symmetric.
pub const SKEW_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Term<T: Scalar> {
    pub weight: T,
    pub coeffs: Vec<Element<T>>,
    pub slots: Vec<SlotMap>,
    pub perm: Permutation,
}

impl<T: Scalar> Term<T> {
    /// Unit weight, identity slot maps and permutation.
    pub fn simple(coeffs: Vec<Element<T>>) -> Self {
        let n = coeffs.len().saturating_sub(1);
        Term { weight: T::one(), coeffs, slots: vec![SlotMap::E; n], perm: Permutation::identity(n) }
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }
}

#[derive(Clone, Debug)]
pub struct PolyMap<T: Scalar> {
    degree: usize,
    terms: Vec<Term<T>>,
    alg: Algebra<T>,
}

impl<T: Scalar> PolyMap<T> {
    pub fn zero(alg: &Algebra<T>, degree: usize) -> Self {
        PolyMap { degree, terms: vec![], alg: alg.clone() }
    }

    pub fn constant(c: Element<T>) -> Self {
        let alg = c.algebra().clone();
        PolyMap { degree: 0, terms: vec![Term::simple(vec![c])], alg }
    }

    /// `1 ⊗ 1`, the identity linear map.
    pub fn identity(alg: &Algebra<T>) -> Self {
        let one = Element::one(alg);
        PolyMap { degree: 1, terms: vec![Term::simple(vec![one.clone(), one])], alg: alg.clone() }
    }

    /// Single unweighted term `c₀ ⊗ … ⊗ cₙ` with identity slots and permutation.
    pub fn simple(coeffs: Vec<Element<T>>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::InvalidArgument("no coefficients".into()))?;
        let alg = first.algebra().clone();
        let n = coeffs.len() - 1;
        Self::from_terms(&alg, n, vec![Term::simple(coeffs)])
    }

    pub fn from_terms(alg: &Algebra<T>, degree: usize, terms: Vec<Term<T>>) -> Result<Self> {
        for t in &terms {
            if t.coeffs.len() != degree + 1 || t.slots.len() != degree || t.perm.len() != degree {
                return Err(Error::ArityMismatch { expected: degree, got: t.slots.len() });
            }
            let probe = Element::zero(alg);
            if t.coeffs.iter().any(|c| !c.same_algebra(&probe)) {
                return Err(Error::AlgebraMismatch);
            }
            if t.slots.iter().any(|s| s.index() >= alg.basis_maps().len()) {
                return Err(Error::UnknownBasisMap(format!("#{}", t.slots.iter().map(|s| s.index()).max().unwrap())));
            }
        }
        Ok(PolyMap { degree, terms, alg: alg.clone() })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.alg
    }

    pub fn push_term(&mut self, t: Term<T>) {
        assert_eq!(t.degree(), self.degree);
        self.terms.push(t);
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if !self.alg.same_product(&o.alg) {
            return Err(Error::AlgebraMismatch);
        }
        if self.degree != o.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: o.degree });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.weight = t.weight * s;
        }
        out
    }

    /// Evaluates the map at `args`.
    pub fn apply(&self, args: &[Element<T>]) -> Result<Element<T>> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: args.len() });
        }
        let probe = Element::zero(&self.alg);
        if args.iter().any(|a| !a.same_algebra(&probe)) {
            return Err(Error::AlgebraMismatch);
        }
        let coords: Vec<&[T]> = args.iter().map(|a| a.coords()).collect();
        Ok(Element::new(&self.alg, self.apply_coords(&coords)))
    }

    pub(crate) fn apply_coords(&self, args: &[&[T]]) -> Vec<T> {
        let alg = &*self.alg;
        let d = alg.dim();
        let nmaps = alg.basis_maps().len();
        // mapped[arg][slot map]
        let mut mapped: Vec<Vec<Option<Vec<T>>>> = vec![vec![None; nmaps]; args.len()];
        let mut out = vec![T::zero(); d];
        for t in &self.terms {
            if t.weight == T::zero() {
                continue;
            }
            let mut acc = t.coeffs[0].coords().to_vec();
            for i in 0..self.degree {
                let a = t.perm.apply(i);
                let s = t.slots[i].index();
                if mapped[a][s].is_none() {
                    mapped[a][s] = Some(if s == 0 {
                        args[a].to_vec()
                    } else {
                        alg.basis_maps()[s].matrix.mul_vec(args[a])
                    });
                }
                acc = alg.mul_coords(&acc, mapped[a][s].as_ref().unwrap());
                acc = alg.mul_coords(&acc, t.coeffs[i + 1].coords());
            }
            for (o, v) in out.iter_mut().zip(acc) {
                *o = *o + t.weight * v;
            }
        }
        out
    }

    /// Merges terms whose coefficients, slot maps and permutation coincide, and drops
    /// zero-weight terms.
    pub fn compact(&self) -> Self {
        let mut terms: Vec<Term<T>> = Vec::new();
        for t in &self.terms {
            if let Some(e) = terms.iter_mut().find(|e| e.slots == t.slots && e.perm == t.perm && e.coeffs == t.coeffs) {
                e.weight = e.weight + t.weight;
            } else {
                terms.push(t.clone());
            }
        }
        terms.retain(|t| t.weight != T::zero() && t.coeffs.iter().all(|c| !c.is_zero()));
        PolyMap { degree: self.degree, terms, alg: self.alg.clone() }
    }

    /// `f ∘ σ`, i.e. `(a₁, …, aₙ) ↦ f(a_{σ(1)}, …, a_{σ(n)})`.
    pub fn permute_args(&self, sigma: &Permutation) -> Self {
        assert_eq!(sigma.len(), self.degree);
        let mut out = self.clone();
        for t in &mut out.terms {
            t.perm = sigma.compose(&t.perm);
        }
        out
    }

    /// Largest relative defect `‖f(…a, b…) + f(…b, a…)‖` over adjacent swaps at random arguments.
    pub fn skew_residual(&self, trials: usize, seed: u64) -> T {
        if self.degree < 2 {
            return T::zero();
        }
        let mut rng = sampling::rng(seed);
        let mut worst = T::zero();
        for _ in 0..trials {
            let args = sampling::random_elements(&mut rng, &self.alg, self.degree, 1.0);
            let base = self.apply(&args).expect("arity checked");
            for i in 0..self.degree - 1 {
                let mut sw = args.clone();
                sw.swap(i, i + 1);
                let other = self.apply(&sw).expect("arity checked");
                let scale = T::one().max(base.coord_norm()).max(other.coord_norm());
                worst = worst.max((&base + &other).coord_norm() / scale);
            }
        }
        worst
    }

    pub fn is_skew(&self) -> bool {
        self.skew_residual(3, 0x5eed) < T::lit(SKEW_TOLERANCE)
    }

    pub fn to_doc(&self) -> PolyMapDoc {
        PolyMapDoc {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|t| TermDoc {
                    w: t.weight.as_f64(),
                    coeffs: t.coeffs.iter().map(|c| c.to_f64_vec()).collect(),
                    slots: t.slots.iter().map(|s| self.alg.slot_name(*s).to_string()).collect(),
                    perm: t.perm.to_one_based(),
                })
                .collect(),
        }
    }

    pub fn from_doc(alg: &Algebra<T>, doc: &PolyMapDoc) -> Result<Self> {
        let mut terms = Vec::new();
        for td in &doc.terms {
            if td.coeffs.iter().any(|c| c.len() != alg.dim()) {
                return Err(Error::MalformedSpec(format!("coefficients must have {} coordinates", alg.dim())));
            }
            let coeffs = td.coeffs.iter().map(|c| Element::try_new(alg, c.iter().map(|&x| T::lit(x)).collect())).collect::<Result<_>>()?;
            let slots = td.slots.iter().map(|s| alg.slot_map(s)).collect::<Result<_>>()?;
            let perm = if td.perm.is_empty() && doc.degree > 0 {
                Permutation::identity(doc.degree)
            } else {
                Permutation::from_one_based(&td.perm)?
            };
            terms.push(Term { weight: T::lit(td.w), coeffs, slots, perm });
        }
        Self::from_terms(alg, doc.degree, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("serializable")
    }

    pub fn from_json(alg: &Algebra<T>, text: &str) -> Result<Self> {
        let doc: PolyMapDoc = serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        Self::from_doc(alg, &doc)
    }
}

/// JSON shape of a [`PolyMap`]. Permutations use 1-based image notation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMapDoc {
    pub degree: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub w: f64,
    pub coeffs: Vec<Vec<f64>>,
    pub slots: Vec<String>,
    #[serde(default)]
    pub perm: Vec<usize>,
}

impl<T: Scalar> fmt::Display for PolyMap<T> {
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
            for (i, c) in t.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, "⊗")?;
                }
                match f.precision() {
                    Some(p) => write!(f, "({:.*})", p, c)?,
                    None => write!(f, "({})", c)?,
                }
            }
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

pub fn apply<T: Scalar>(f: &PolyMap<T>, args: &[Element<T>]) -> Result<Element<T>> {
    f.apply(args)
}

/// `g ∘ f` for two linear maps with identity slot maps.
pub fn compose_linear<T: Scalar>(g: &PolyMap<T>, f: &PolyMap<T>) -> Result<PolyMap<T>> {
    if g.degree != 1 || f.degree != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: if g.degree != 1 { g.degree } else { f.degree } });
    }
    if !g.alg.same_product(&f.alg) {
        return Err(Error::AlgebraMismatch);
    }
    if g.terms.iter().chain(&f.terms).any(|t| t.slots[0] != SlotMap::E) {
        return Err(Error::UnsupportedSlotMap);
    }
    let mut terms = Vec::with_capacity(g.terms.len() * f.terms.len());
    for tg in &g.terms {
        for tf in &f.terms {
            terms.push(Term {
                weight: tg.weight * tf.weight,
                coeffs: vec![&tg.coeffs[0] * &tf.coeffs[0], &tf.coeffs[1] * &tg.coeffs[1]],
                slots: vec![SlotMap::E],
                perm: Permutation::identity(1),
            });
        }
    }
    PolyMap::from_terms(&g.alg, 1, terms)
}

/// The `⊗̲` product: `(p ⊗̲ r)(x₁…xₙ, y₁…yₘ) = p(x₁…xₙ) r(y₁…yₘ)`.
pub fn tensor_join<T: Scalar>(p: &PolyMap<T>, r: &PolyMap<T>) -> Result<PolyMap<T>> {
    if !p.alg.same_product(&r.alg) {
        return Err(Error::AlgebraMismatch);
    }
    let (n, m) = (p.degree, r.degree);
    let mut terms = Vec::with_capacity(p.terms.len() * r.terms.len());
    for a in &p.terms {
        for b in &r.terms {
            let mut coeffs = a.coeffs[..n].to_vec();
            coeffs.push(&a.coeffs[n] * &b.coeffs[0]);
            coeffs.extend(b.coeffs[1..].iter().cloned());
            let mut slots = a.slots.clone();
            slots.extend(b.slots.iter().copied());
            let mut image = a.perm.image().to_vec();
            image.extend(b.perm.shifted(n));
            terms.push(Term { weight: a.weight * b.weight, coeffs, slots, perm: Permutation::new(image)? });
        }
    }
    PolyMap::from_terms(&p.alg, n + m, terms)
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::lit(k as f64))
}

fn average_over_s<T: Scalar>(f: &PolyMap<T>, signed: bool) -> Result<PolyMap<T>> {
    let n = f.degree;
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if n > MAX_DEGREE {
        return Err(Error::TooLarge { n, max: MAX_DEGREE });
    }
    let norm = T::one() / factorial::<T>(n);
    let mut terms = Vec::with_capacity(f.terms.len() * (1..=n).product::<usize>());
    for sigma in gen_s(n)? {
        let sign = if signed && sigma.parity() < 0 { -T::one() } else { T::one() };
        for t in &f.terms {
            terms.push(Term { weight: t.weight * sign * norm, perm: sigma.compose(&t.perm), ..t.clone() });
        }
    }
    PolyMap::from_terms(&f.alg, n, terms)
}

/// `(1/n!) Σ_σ |σ| f ∘ σ`
pub fn alternate<T: Scalar>(f: &PolyMap<T>) -> Result<PolyMap<T>> {
    average_over_s(f, true)
}

/// `(1/n!) Σ_σ f ∘ σ`
pub fn symmetrize<T: Scalar>(f: &PolyMap<T>) -> Result<PolyMap<T>> {
    average_over_s(f, false)
}

/// Order-preserving splits of `{0..p+q−1}` into a `p`-set and a `q`-set, as the
/// permutation listing the `p`-set then the `q`-set.
pub fn shuffles(p: usize, q: usize) -> Vec<Permutation> {
    let n = p + q;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(p);
    fn rec(start: usize, p: usize, n: usize, chosen: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if chosen.len() == p {
            let mut image = chosen.clone();
            image.extend((0..n).filter(|i| !chosen.contains(i)));
            out.push(Permutation::new(image).expect("shuffle is a permutation"));
            return;
        }
        for i in start..n {
            chosen.push(i);
            rec(i + 1, p, n, chosen, out);
            chosen.pop();
        }
    }
    rec(0, p, n, &mut chosen, &mut out);
    out
}

/// Exterior product of skew maps via the shuffle sum.
pub fn wedge<T: Scalar>(f: &PolyMap<T>, g: &PolyMap<T>) -> Result<PolyMap<T>> {
    for h in [f, g] {
        let r = h.skew_residual(3, 0x5eed);
        if !(r < T::lit(SKEW_TOLERANCE)) {
            return Err(Error::NotSkew { residual: r.as_f64() });
        }
    }
    wedge_unchecked(f, g)
}

/// [`wedge`] without the skewness probe.
pub fn wedge_unchecked<T: Scalar>(f: &PolyMap<T>, g: &PolyMap<T>) -> Result<PolyMap<T>> {
    let (p, q) = (f.degree, g.degree);
    if p + q > MAX_DEGREE {
        return Err(Error::TooLarge { n: p + q, max: MAX_DEGREE });
    }
    let fg = tensor_join(f, g)?;
    let mut terms = Vec::new();
    for sigma in shuffles(p, q) {
        let sign = if sigma.parity() < 0 { -T::one() } else { T::one() };
        for t in &fg.terms {
            terms.push(Term { weight: t.weight * sign, perm: sigma.compose(&t.perm), ..t.clone() });
        }
    }
    PolyMap::from_terms(&f.alg, p + q, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, quaternion};

    fn q(c: [f64; 4]) -> Element<f64> {
        Element::from_f64(&quaternion(), &c)
    }

    #[test]
    fn sandwich() {
        let (a, b, c) = (q([1., 2., 0., 0.]), q([0., 0., 1., 3.]), q([0.5, -1., 2., 1.]));
        let f = PolyMap::simple(vec![a.clone(), b.clone()]).unwrap();
        assert!(f.apply(std::slice::from_ref(&c)).unwrap().approx_eq(&(&(&a * &c) * &b), 1e-14));
        let id = PolyMap::identity(&quaternion());
        assert_eq!(id.apply(std::slice::from_ref(&c)).unwrap(), c);
    }

    #[test]
    fn swapped_product() {
        let one = q([1., 0., 0., 0.]);
        let mut f = PolyMap::simple(vec![one.clone(), one.clone(), one]).unwrap();
        f.terms[0].perm = Permutation::new(vec![1, 0]).unwrap();
        let r = f.apply(&[q([0., 1., 0., 0.]), q([0., 0., 1., 0.])]).unwrap();
        assert_eq!(r, q([0., 0., 0., -1.]));
    }

    #[test]
    fn arity_and_algebra_errors() {
        let f = PolyMap::identity(&quaternion::<f64>());
        assert!(matches!(f.apply(&[]), Err(Error::ArityMismatch { .. })));
        let z = Element::one(&complex());
        assert_eq!(f.apply(&[z]), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn compose_pairs() {
        let (a, b, c, d) = (q([0., 1., 0., 0.]), q([1., 0., 1., 0.]), q([0., 0., 2., 1.]), q([1., 1., 1., 1.]));
        let g = PolyMap::simple(vec![a.clone(), b.clone()]).unwrap();
        let f = PolyMap::simple(vec![c.clone(), d.clone()]).unwrap();
        let h = compose_linear(&g, &f).unwrap();
        assert_eq!(h.terms[0].coeffs, vec![&a * &c, &d * &b]);
        let mut conj = PolyMap::identity(&complex::<f64>());
        conj.terms[0].slots[0] = complex::<f64>().slot_map("I").unwrap();
        assert_eq!(compose_linear(&conj, &conj).unwrap_err(), Error::UnsupportedSlotMap);
    }

    #[test]
    fn join_coefficients() {
        let (a0, a1, b0, b1) = (q([0., 1., 0., 0.]), q([1., 0., 1., 0.]), q([0., 0., 2., 1.]), q([1., 1., 1., 1.]));
        let p = PolyMap::simple(vec![a0.clone(), a1.clone()]).unwrap();
        let r = PolyMap::simple(vec![b0.clone(), b1.clone()]).unwrap();
        let j = tensor_join(&p, &r).unwrap();
        assert_eq!(j.degree(), 2);
        assert_eq!(j.terms[0].coeffs, vec![a0, &a1 * &b0, b1]);
    }

    #[test]
    fn alternate_product_is_half_commutator() {
        let one = q([1., 0., 0., 0.]);
        let f = PolyMap::simple(vec![one.clone(), one.clone(), one]).unwrap();
        let (a, b) = (q([0.3, 1., -2., 0.5]), q([1., 0.2, 0.7, -1.]));
        let alt = alternate(&f).unwrap();
        let want = (&(&a * &b) - &(&b * &a)).scale(0.5);
        assert!(alt.apply(&[a.clone(), b.clone()]).unwrap().approx_eq(&want, 1e-14));
        let sym = symmetrize(&f).unwrap();
        let want = (&(&a * &b) + &(&b * &a)).scale(0.5);
        assert!(sym.apply(&[a.clone(), b.clone()]).unwrap().approx_eq(&want, 1e-14));
        assert!(symmetrize(&alt).unwrap().apply(&[a, b]).unwrap().coord_norm() < 1e-14);
    }

    #[test]
    fn identity_wedge_is_commutator() {
        let id = PolyMap::identity(&quaternion());
        let w = wedge(&id, &id).unwrap();
        let (a, b) = (q([0.3, 1., -2., 0.5]), q([1., 0.2, 0.7, -1.]));
        assert!(w.apply(&[a.clone(), b.clone()]).unwrap().approx_eq(&a.commutator(&b), 1e-12));
    }

    #[test]
    fn wedge_rejects_non_skew() {
        let one = q([1., 0., 0., 0.]);
        let f = PolyMap::simple(vec![one.clone(), one.clone(), one]).unwrap();
        assert!(matches!(wedge(&f, &f), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(2, 3).len(), 10);
        assert_eq!(shuffles(0, 3).len(), 1);
    }

    #[test]
    fn compact_merges() {
        let id = PolyMap::identity(&quaternion::<f64>());
        let two = id.add(&id).unwrap().compact();
        assert_eq!(two.terms().len(), 1);
        assert_eq!(two.terms()[0].weight, 2.0);
        assert_eq!(id.sub(&id).unwrap().compact().terms().len(), 0);
    }

    #[test]
    fn json_round_trip() {
        let alg = complex::<f64>();
        let mut f = PolyMap::simple(vec![Element::from_f64(&alg, &[1., 2.]), Element::one(&alg), Element::from_f64(&alg, &[0., 1.])]).unwrap();
        f.terms[0].slots[1] = alg.slot_map("I").unwrap();
        f.terms[0].perm = Permutation::new(vec![1, 0]).unwrap();
        f.terms[0].weight = 0.5;
        let text = f.to_json();
        assert!(text.contains("\"perm\":[2,1]"));
        let back = PolyMap::from_json(&alg, &text).unwrap();
        assert_eq!(back.terms(), f.terms());
    }
}
