//! Finite-dimensional associative algebras over the reals, given by structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::sampling;
use crate::scalar::Scalar;

/// Default number of random samples for [`product_operator_norm`].
pub const DEFAULT_NORM_BUDGET: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub enum NormKind<T> {
    Euclidean,
    /// `sqrt(|x0² − x1² − … |)`
    MinkowskiPseudo,
    /// `sqrt(|xᵀ Q x|)` with a symmetric matrix `Q`.
    Quadratic(Matrix<T>),
}

/// Index of a registered basis map. `SlotMap::E` is always the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotMap(pub(crate) usize);

impl SlotMap {
    pub const E: SlotMap = SlotMap(0);

    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisMap<T> {
    pub name: String,
    pub matrix: Matrix<T>,
}

#[derive(Debug, Clone)]
pub struct AlgebraSpec<T> {
    name: String,
    dim: usize,
    /// `c[(i * dim + j) * dim + p]` is the coefficient of `e_p` in `e_i e_j`.
    c: Vec<T>,
    unit: usize,
    basis_maps: Vec<BasisMap<T>>,
    norm: NormKind<T>,
    norm_scale: T,
    division: bool,
    labels: Vec<String>,
    nonzero: Vec<(usize, usize, usize, T)>,
}

pub type Algebra<T> = Arc<AlgebraSpec<T>>;

/// Builder input for [`AlgebraSpec::new`].
#[derive(Debug, Clone)]
pub struct AlgebraParts<T> {
    pub name: String,
    pub dim: usize,
    pub structure_constants: Vec<T>,
    pub unit: usize,
    pub basis_maps: Vec<BasisMap<T>>,
    pub norm: NormKind<T>,
    pub division: bool,
    pub labels: Option<Vec<String>>,
}

/// JSON algebra description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    #[serde(default)]
    pub unit: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<f64>>>,
    #[serde(default = "default_norm")]
    pub norm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub basis_maps: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub division: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

fn default_norm() -> String {
    "euclidean".into()
}

impl<T: Scalar> AlgebraSpec<T> {
    /// Validates the structure constants and builds the algebra.
    pub fn new(parts: AlgebraParts<T>) -> Result<Algebra<T>> {
        let AlgebraParts { name, dim, structure_constants: c, unit, mut basis_maps, norm, division, labels } = parts;
        if dim == 0 {
            return Err(Error::MalformedSpec("dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::MalformedSpec(format!("expected {} structure constants, got {}", dim * dim * dim, c.len())));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::MalformedSpec("non-finite structure constant".into()));
        }
        if unit >= dim {
            return Err(Error::BadUnit(format!("unit index {unit} out of range for dimension {dim}")));
        }
        let at = |i: usize, j: usize, p: usize| c[(i * dim + j) * dim + p];
        let tiny = T::lit(1e-12);
        for j in 0..dim {
            for p in 0..dim {
                let delta = if j == p { T::one() } else { T::zero() };
                if (at(unit, j, p) - delta).abs() > tiny || (at(j, unit, p) - delta).abs() > tiny {
                    return Err(Error::BadUnit(format!("e{unit} is not a two-sided unit (fails on e{j})")));
                }
            }
        }
        let cmax = c.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let assoc_tol = T::lit(1e-10) * cmax * cmax;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for q in 0..dim {
                        let mut lhs = T::zero();
                        let mut rhs = T::zero();
                        for p in 0..dim {
                            lhs = lhs + at(i, j, p) * at(p, k, q);
                            rhs = rhs + at(j, k, p) * at(i, p, q);
                        }
                        if (lhs - rhs).abs() > assoc_tol {
                            return Err(Error::NonAssociative { i, j, k, q, residual: (lhs - rhs).abs().as_f64() });
                        }
                    }
                }
            }
        }
        let identity = Matrix::<T>::identity(dim);
        if let Some(pos) = basis_maps.iter().position(|m| m.name == "E") {
            if basis_maps[pos].matrix != identity {
                return Err(Error::MalformedSpec("basis map `E` must be the identity".into()));
            }
            basis_maps.remove(pos);
        }
        basis_maps.insert(0, BasisMap { name: "E".into(), matrix: identity });
        for m in &basis_maps {
            if m.matrix.rows != dim || m.matrix.cols != dim {
                return Err(Error::MalformedSpec(format!("basis map `{}` must be {dim}x{dim}", m.name)));
            }
            if m.matrix.data.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedSpec(format!("basis map `{}` is not finite", m.name)));
            }
        }
        for (a, m) in basis_maps.iter().enumerate() {
            if basis_maps[..a].iter().any(|o| o.name == m.name) {
                return Err(Error::MalformedSpec(format!("duplicate basis map `{}`", m.name)));
            }
        }
        if let NormKind::Quadratic(q) = &norm {
            if q.rows != dim || q.cols != dim {
                return Err(Error::MalformedSpec(format!("norm matrix must be {dim}x{dim}")));
            }
        }
        let labels = match labels {
            Some(l) if l.len() == dim => l,
            Some(_) => return Err(Error::MalformedSpec("label count must equal dimension".into())),
            None => (0..dim).map(|i| if i == unit { "1".to_string() } else { format!("e{i}") }).collect(),
        };
        let mut nonzero = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for p in 0..dim {
                    let v = at(i, j, p);
                    if v != T::zero() {
                        nonzero.push((i, j, p, v));
                    }
                }
            }
        }
        Ok(Arc::new(AlgebraSpec {
            name,
            dim,
            c,
            unit,
            basis_maps,
            norm,
            norm_scale: T::one(),
            division,
            labels,
            nonzero,
        }))
    }

    pub fn from_doc(doc: &AlgebraDoc) -> Result<Algebra<T>> {
        let d = doc.dim;
        if doc.c.len() != d || doc.c.iter().any(|r| r.len() != d || r.iter().any(|s| s.len() != d)) {
            return Err(Error::MalformedSpec(format!("`C` must be a {d}x{d}x{d} array")));
        }
        let c = doc.c.iter().flatten().flatten().map(|&x| T::lit(x)).collect();
        let to_matrix = |rows: &Vec<Vec<f64>>, what: &str| -> Result<Matrix<T>> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::MalformedSpec(format!("{what} must be {d}x{d}")));
            }
            Ok(Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect::<Vec<_>>()))
        };
        let mut maps = Vec::new();
        for (name, rows) in &doc.basis_maps {
            maps.push(BasisMap { name: name.clone(), matrix: to_matrix(rows, &format!("basis map `{name}`"))? });
        }
        let norm = match (doc.norm.as_str(), &doc.norm_matrix) {
            ("euclidean", _) => NormKind::Euclidean,
            ("minkowski_pseudo", _) => NormKind::MinkowskiPseudo,
            ("quadratic", Some(q)) => NormKind::Quadratic(to_matrix(q, "norm matrix")?),
            ("quadratic", None) => return Err(Error::MalformedSpec("quadratic norm needs `norm_matrix`".into())),
            (other, _) => return Err(Error::MalformedSpec(format!("unknown norm `{other}`"))),
        };
        Self::new(AlgebraParts {
            name: doc.name.clone().unwrap_or_else(|| "custom".into()),
            dim: d,
            structure_constants: c,
            unit: doc.unit,
            basis_maps: maps,
            norm,
            division: doc.division,
            labels: doc.labels.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Algebra<T>> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn to_doc(&self) -> AlgebraDoc {
        let d = self.dim;
        let c = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|p| self.constant(i, j, p).as_f64()).collect()).collect())
            .collect();
        let rows = |m: &Matrix<T>| m.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.as_f64()).collect()).collect();
        let (norm, norm_matrix) = match &self.norm {
            NormKind::Euclidean => ("euclidean".to_string(), None),
            NormKind::MinkowskiPseudo => ("minkowski_pseudo".to_string(), None),
            NormKind::Quadratic(q) => ("quadratic".to_string(), Some(rows(q))),
        };
        AlgebraDoc {
            name: Some(self.name.clone()),
            dim: d,
            unit: self.unit,
            c,
            norm,
            norm_matrix,
            basis_maps: self.basis_maps.iter().skip(1).map(|m| (m.name.clone(), rows(&m.matrix))).collect(),
            division: self.division,
            labels: Some(self.labels.clone()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn constant(&self, i: usize, j: usize, p: usize) -> T {
        self.c[(i * self.dim + j) * self.dim + p]
    }

    pub fn is_division(&self) -> bool {
        self.division
    }

    pub fn norm_kind(&self) -> &NormKind<T> {
        &self.norm
    }

    pub fn norm_scale(&self) -> T {
        self.norm_scale
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basis_maps(&self) -> &[BasisMap<T>] {
        &self.basis_maps
    }

    pub fn slot_map(&self, name: &str) -> Result<SlotMap> {
        self.basis_maps
            .iter()
            .position(|m| m.name == name)
            .map(SlotMap)
            .ok_or_else(|| Error::UnknownBasisMap(name.to_string()))
    }

    pub fn slot_name(&self, s: SlotMap) -> &str {
        &self.basis_maps[s.0].name
    }

    pub fn slot_maps(&self) -> Vec<SlotMap> {
        (0..self.basis_maps.len()).map(SlotMap).collect()
    }

    /// Whether the norm satisfies `‖x‖ = 0 ⇒ x = 0`.
    pub fn is_true_norm(&self) -> bool {
        match &self.norm {
            NormKind::Euclidean => true,
            NormKind::MinkowskiPseudo => false,
            NormKind::Quadratic(q) => linalg::is_positive_definite(q),
        }
    }

    /// Same product, same basis maps; multiplication between the two is allowed.
    pub fn same_product(&self, other: &AlgebraSpec<T>) -> bool {
        self.dim == other.dim && self.unit == other.unit && self.c == other.c
    }

    pub(crate) fn mul_coords(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for &(i, j, p, c) in &self.nonzero {
            out[p] = out[p] + x[i] * y[j] * c;
        }
        out
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mul_matrix(&self, x: &[T]) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for &(i, j, p, c) in &self.nonzero {
            m[(p, j)] = m[(p, j)] + x[i] * c;
        }
        m
    }

    /// Matrix of `x ↦ x y`.
    pub fn right_mul_matrix(&self, y: &[T]) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for &(i, j, p, c) in &self.nonzero {
            m[(p, i)] = m[(p, i)] + y[j] * c;
        }
        m
    }

    pub(crate) fn norm_coords(&self, x: &[T]) -> T {
        let raw = match &self.norm {
            NormKind::Euclidean => x.iter().fold(T::zero(), |a, v| a + *v * *v).sqrt(),
            NormKind::MinkowskiPseudo => {
                let rest = x.iter().skip(1).fold(T::zero(), |a, v| a + *v * *v);
                (x[0] * x[0] - rest).abs().sqrt()
            }
            NormKind::Quadratic(q) => {
                let qx = q.mul_vec(x);
                x.iter().zip(&qx).fold(T::zero(), |a, (p, r)| a + *p * *r).abs().sqrt()
            }
        };
        raw * self.norm_scale
    }

    pub fn with_norm(&self, norm: NormKind<T>) -> Algebra<T> {
        let mut s = self.clone();
        s.norm = norm;
        s.norm_scale = T::one();
        Arc::new(s)
    }
}

impl<T: PartialEq> PartialEq for AlgebraSpec<T> {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.dim == o.dim
            && self.c == o.c
            && self.unit == o.unit
            && self.basis_maps == o.basis_maps
            && self.norm == o.norm
            && self.norm_scale == o.norm_scale
            && self.division == o.division
    }
}

/// New algebra whose norm is `factor` times the old one.
pub fn rescale_norm<T: Scalar>(alg: &Algebra<T>, factor: T) -> Result<Algebra<T>> {
    if !(factor > T::zero()) || !factor.is_finite() {
        return Err(Error::NonPositiveFactor);
    }
    let mut s = AlgebraSpec::clone(alg);
    s.norm_scale = s.norm_scale * factor;
    Ok(Arc::new(s))
}

/// Estimates `sup ‖ab‖ / (‖a‖‖b‖)` by seeded sphere sampling with coordinate-ascent
/// refinement of every sample that improves on the running best.
///
/// The estimate for budget `n` is the maximum over a prefix of the estimate for any
/// larger budget with the same seed, so it never decreases as the budget grows.
pub fn product_operator_norm<T: Scalar>(alg: &Algebra<T>, budget: usize, seed: u64) -> Result<T> {
    if !alg.is_true_norm() {
        return Err(Error::PseudoNorm);
    }
    let d = alg.dim();
    let ratio = |a: &[T], b: &[T]| {
        let na = alg.norm_coords(a);
        let nb = alg.norm_coords(b);
        if na == T::zero() || nb == T::zero() {
            T::zero()
        } else {
            alg.norm_coords(&alg.mul_coords(a, b)) / (na * nb)
        }
    };
    let mut rng = sampling::rng(seed);
    let mut best = T::zero();
    for _ in 0..budget.max(1) {
        let a: Vec<T> = sampling::random_unit_coords(&mut rng, d);
        let b: Vec<T> = sampling::random_unit_coords(&mut rng, d);
        let r = ratio(&a, &b);
        if r > best {
            best = best.max(refine_ratio(&ratio, a, b, r));
        }
    }
    Ok(best)
}

fn refine_ratio<T: Scalar>(ratio: &impl Fn(&[T], &[T]) -> T, mut a: Vec<T>, mut b: Vec<T>, mut val: T) -> T {
    let d = a.len();
    let mut step = T::lit(0.25);
    let floor = T::lit(1e-10);
    let mut sweeps = 0;
    while step > floor && sweeps < 2000 {
        sweeps += 1;
        let mut improved = false;
        for k in 0..2 * d {
            for dir in [T::one(), -T::one()] {
                let (mut a2, mut b2) = (a.clone(), b.clone());
                if k < d {
                    a2[k] = a2[k] + dir * step;
                } else {
                    b2[k - d] = b2[k - d] + dir * step;
                }
                let v = ratio(&a2, &b2);
                if v > val {
                    a = a2;
                    b = b2;
                    val = v;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step = step * T::lit(0.5);
        }
    }
    val
}

fn matrix_from<T: Scalar>(rows: &[&[f64]]) -> Matrix<T> {
    Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect::<Vec<_>>())
}

fn constants_from<T: Scalar>(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Vec<T> {
    let mut c = vec![T::zero(); dim * dim * dim];
    for &(i, j, p, v) in entries {
        c[(i * dim + j) * dim + p] = T::lit(v);
    }
    c
}

/// The real line as a one-dimensional algebra.
pub fn real<T: Scalar>() -> Algebra<T> {
    AlgebraSpec::new(AlgebraParts {
        name: "real".into(),
        dim: 1,
        structure_constants: vec![T::one()],
        unit: 0,
        basis_maps: vec![],
        norm: NormKind::Euclidean,
        division: true,
        labels: Some(vec!["1".into()]),
    })
    .expect("builtin real algebra is valid")
}

/// Complex numbers with basis `(1, i)` and conjugation `I`.
pub fn complex<T: Scalar>() -> Algebra<T> {
    AlgebraSpec::new(AlgebraParts {
        name: "complex".into(),
        dim: 2,
        structure_constants: constants_from(2, &[(0, 0, 0, 1.0), (0, 1, 1, 1.0), (1, 0, 1, 1.0), (1, 1, 0, -1.0)]),
        unit: 0,
        basis_maps: vec![BasisMap { name: "I".into(), matrix: matrix_from(&[&[1.0, 0.0], &[0.0, -1.0]]) }],
        norm: NormKind::Euclidean,
        division: true,
        labels: Some(vec!["1".into(), "i".into()]),
    })
    .expect("builtin complex algebra is valid")
}

/// Hyperbolic (split-complex) numbers, `j² = 1`, with the euclidean norm.
pub fn hyperbolic<T: Scalar>() -> Algebra<T> {
    AlgebraSpec::new(AlgebraParts {
        name: "hyperbolic".into(),
        dim: 2,
        structure_constants: constants_from(2, &[(0, 0, 0, 1.0), (0, 1, 1, 1.0), (1, 0, 1, 1.0), (1, 1, 0, 1.0)]),
        unit: 0,
        basis_maps: vec![BasisMap { name: "I".into(), matrix: matrix_from(&[&[1.0, 0.0], &[0.0, -1.0]]) }],
        norm: NormKind::Euclidean,
        division: false,
        labels: Some(vec!["1".into(), "j".into()]),
    })
    .expect("builtin hyperbolic algebra is valid")
}

/// Quaternions with basis `(1, i, j, k)`.
pub fn quaternion<T: Scalar>() -> Algebra<T> {
    let mut e = vec![];
    // unit rows and columns
    for a in 0..4 {
        e.push((0, a, a, 1.0));
        if a > 0 {
            e.push((a, 0, a, 1.0));
            e.push((a, a, 0, -1.0));
        }
    }
    e.extend_from_slice(&[
        (1, 2, 3, 1.0),
        (2, 1, 3, -1.0),
        (2, 3, 1, 1.0),
        (3, 2, 1, -1.0),
        (3, 1, 2, 1.0),
        (1, 3, 2, -1.0),
    ]);
    AlgebraSpec::new(AlgebraParts {
        name: "quaternion".into(),
        dim: 4,
        structure_constants: constants_from(4, &e),
        unit: 0,
        basis_maps: vec![],
        norm: NormKind::Euclidean,
        division: true,
        labels: Some(vec!["1".into(), "i".into(), "j".into(), "k".into()]),
    })
    .expect("builtin quaternion algebra is valid")
}

pub const BUILTIN_NAMES: [&str; 4] = ["real", "complex", "hyperbolic", "quaternion"];

pub fn builtin<T: Scalar>(name: &str) -> Result<Algebra<T>> {
    match name {
        "real" => Ok(real()),
        "complex" => Ok(complex()),
        "hyperbolic" => Ok(hyperbolic()),
        "quaternion" => Ok(quaternion()),
        other => Err(Error::MalformedSpec(format!("unknown builtin algebra `{other}`"))),
    }
}

/// An algebra number: coordinates over the basis plus a handle to its algebra.
#[derive(Clone)]
pub struct Element<T: Scalar> {
    coords: Vec<T>,
    alg: Algebra<T>,
}

fn compatible<T: Scalar>(a: &Algebra<T>, b: &Algebra<T>) -> bool {
    Arc::ptr_eq(a, b) || a.same_product(b)
}

impl<T: Scalar> Element<T> {
    pub fn new(alg: &Algebra<T>, coords: Vec<T>) -> Self {
        assert_eq!(coords.len(), alg.dim(), "coordinate count must equal algebra dimension");
        Element { coords, alg: alg.clone() }
    }

    pub fn try_new(alg: &Algebra<T>, coords: Vec<T>) -> Result<Self> {
        if coords.len() != alg.dim() {
            return Err(Error::ArityMismatch { expected: alg.dim(), got: coords.len() });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Element { coords, alg: alg.clone() })
    }

    pub fn from_f64(alg: &Algebra<T>, coords: &[f64]) -> Self {
        Self::new(alg, coords.iter().map(|&x| T::lit(x)).collect())
    }

    pub fn zero(alg: &Algebra<T>) -> Self {
        Self::new(alg, vec![T::zero(); alg.dim()])
    }

    pub fn one(alg: &Algebra<T>) -> Self {
        Self::basis(alg, alg.unit_index())
    }

    pub fn basis(alg: &Algebra<T>, i: usize) -> Self {
        let mut c = vec![T::zero(); alg.dim()];
        c[i] = T::one();
        Self::new(alg, c)
    }

    pub fn scalar(alg: &Algebra<T>, t: T) -> Self {
        Self::one(alg).scale(t)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| *x == T::zero())
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        compatible(&self.alg, &other.alg)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.zip(o, |a, b| a + b))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.zip(o, |a, b| a - b))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Element { coords: self.alg.mul_coords(&self.coords, &o.coords), alg: self.alg.clone() })
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.same_algebra(o) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(T, T) -> T) -> Self {
        Element { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| f(*a, *b)).collect(), alg: self.alg.clone() }
    }

    pub fn scale(&self, t: T) -> Self {
        Element { coords: self.coords.iter().map(|a| *a * t).collect(), alg: self.alg.clone() }
    }

    /// Norm of the owning algebra.
    pub fn norm(&self) -> T {
        self.alg.norm_coords(&self.coords)
    }

    /// Plain euclidean length of the coordinate vector, independent of the algebra norm.
    pub fn coord_norm(&self) -> T {
        self.coords.iter().fold(T::zero(), |a, v| a + *v * *v).sqrt()
    }

    /// Euclidean coordinate distance.
    pub fn dist(&self, o: &Self) -> T {
        self.coords.iter().zip(&o.coords).fold(T::zero(), |a, (p, q)| a + (*p - *q) * (*p - *q)).sqrt()
    }

    pub fn approx_eq(&self, o: &Self, tol: T) -> bool {
        self.same_algebra(o) && self.dist(o) <= tol
    }

    /// Two-sided inverse via the linear system of left multiplication.
    pub fn inv(&self) -> Result<Self> {
        if self.norm() < T::lit(1e-12) || self.coord_norm() < T::lit(1e-12) {
            return Err(Error::SingularElement);
        }
        let lm = self.alg.left_mul_matrix(&self.coords);
        let one = Self::one(&self.alg);
        let y = linalg::lu_solve(&lm, one.coords()).ok_or(Error::SingularElement)?;
        if !self.alg.is_division() {
            return Err(Error::NotDivisionAlgebra);
        }
        let y = Element { coords: y, alg: self.alg.clone() };
        let scale = T::one().max(self.coord_norm() * y.coord_norm());
        if (&y * self).dist(&one) > T::lit(1e-9) * scale {
            return Err(Error::SingularElement);
        }
        Ok(y)
    }

    pub fn apply_basis_map(&self, name: &str) -> Result<Self> {
        let s = self.alg.slot_map(name)?;
        Ok(self.apply_slot(s))
    }

    pub fn apply_slot(&self, s: SlotMap) -> Self {
        if s == SlotMap::E {
            return self.clone();
        }
        let m = &self.alg.basis_maps[s.0].matrix;
        Element { coords: m.mul_vec(&self.coords), alg: self.alg.clone() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.alg);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `[a, b] = ab − ba`
    pub fn commutator(&self, o: &Self) -> Self {
        &(self * o) - &(o * self)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|x| x.as_f64()).collect()
    }
}

impl<T: Scalar> PartialEq for Element<T> {
    fn eq(&self, o: &Self) -> bool {
        self.same_algebra(o) && self.coords == o.coords
    }
}

impl<T: Scalar> fmt::Debug for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({}, {:?})", self.alg.name(), self.coords)
    }
}

impl<T: Scalar> fmt::Display for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, label) in self.coords.iter().zip(self.alg.labels()) {
            if *c == T::zero() {
                continue;
            }
            let (neg, mag) = if *c < T::zero() { (true, -*c) } else { (false, *c) };
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let num = match f.precision() {
                Some(p) => format!("{:.*}", p, mag),
                None => format!("{}", mag),
            };
            if label == "1" {
                write!(f, "{sign}{num}")?;
            } else if mag == T::one() {
                write!(f, "{sign}{label}")?;
            } else {
                write!(f, "{sign}{num}{label}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a, T: Scalar> $tr<&'a Element<T>> for &'a Element<T> {
            type Output = Element<T>;
            /// Panics when the operands belong to different algebras.
            fn $m(self, o: &'a Element<T>) -> Element<T> {
                self.$try(o).expect("arithmetic between elements of different algebras")
            }
        }
        impl<T: Scalar> $tr<Element<T>> for Element<T> {
            type Output = Element<T>;
            fn $m(self, o: Element<T>) -> Element<T> {
                (&self).$m(&o)
            }
        }
        impl<'a, T: Scalar> $tr<&'a Element<T>> for Element<T> {
            type Output = Element<T>;
            fn $m(self, o: &'a Element<T>) -> Element<T> {
                (&self).$m(o)
            }
        }
        impl<'a, T: Scalar> $tr<Element<T>> for &'a Element<T> {
            type Output = Element<T>;
            fn $m(self, o: Element<T>) -> Element<T> {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<T: Scalar> Neg for &Element<T> {
    type Output = Element<T>;
    fn neg(self) -> Element<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Neg for Element<T> {
    type Output = Element<T>;
    fn neg(self) -> Element<T> {
        self.scale(-T::one())
    }
}

/// Checked product `xy`.
pub fn mul<T: Scalar>(x: &Element<T>, y: &Element<T>) -> Result<Element<T>> {
    x.try_mul(y)
}

pub fn inv<T: Scalar>(x: &Element<T>) -> Result<Element<T>> {
    x.inv()
}

pub fn norm<T: Scalar>(x: &Element<T>) -> T {
    x.norm()
}

pub fn apply_basis_map<T: Scalar>(name: &str, x: &Element<T>) -> Result<Element<T>> {
    x.apply_basis_map(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: [f64; 4]) -> Element<f64> {
        Element::from_f64(&quaternion(), &c)
    }

    #[test]
    fn complex_i_squared() {
        let c = complex::<f64>();
        let i = Element::basis(&c, 1);
        assert_eq!((&i * &i).coords(), &[-1.0, 0.0]);
    }

    #[test]
    fn hyperbolic_j_squared() {
        let h = hyperbolic::<f64>();
        let j = Element::basis(&h, 1);
        assert_eq!((&j * &j).coords(), &[1.0, 0.0]);
    }

    #[test]
    fn quaternion_table() {
        let (i, j, k) = (q([0., 1., 0., 0.]), q([0., 0., 1., 0.]), q([0., 0., 0., 1.]));
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
        assert_eq!(&j * &k, i);
        assert_eq!(&k * &i, j);
        assert_eq!(&i * &i, q([-1., 0., 0., 0.]));
        assert_eq!(q([1., 1., 0., 0.]) * q([1., 0., 1., 0.]), q([1., 1., 1., 1.]));
    }

    #[test]
    fn inverse_cases() {
        let c = complex::<f64>();
        let i = Element::basis(&c, 1);
        assert!(i.inv().unwrap().approx_eq(&Element::from_f64(&c, &[0., -1.]), 1e-15));
        let y = q([0., 1., 1., 0.]).inv().unwrap();
        assert!(y.approx_eq(&q([0., -0.5, -0.5, 0.]), 1e-15));
        let h = hyperbolic::<f64>();
        assert_eq!(Element::from_f64(&h, &[1., 1.]).inv(), Err(Error::SingularElement));
        assert_eq!(Element::from_f64(&h, &[2., 1.]).inv(), Err(Error::NotDivisionAlgebra));
        assert_eq!(Element::zero(&c).inv(), Err(Error::SingularElement));
    }

    #[test]
    fn norms() {
        let h = hyperbolic::<f64>();
        let x = Element::from_f64(&h, &[3., 4.]);
        assert_eq!(x.norm(), 5.0);
        let hm = h.with_norm(NormKind::MinkowskiPseudo);
        assert_eq!(Element::from_f64(&hm, &[1., 1.]).norm(), 0.0);
        assert!(!hm.is_true_norm());
        let c2 = rescale_norm(&complex::<f64>(), 2.0).unwrap();
        assert_eq!(Element::one(&c2).norm(), 2.0);
        assert_eq!(rescale_norm(&c2, 0.0).unwrap_err(), Error::NonPositiveFactor);
    }

    #[test]
    fn conjugation_maps() {
        let c = complex::<f64>();
        let x = Element::from_f64(&c, &[2., 3.]);
        assert_eq!(x.apply_basis_map("I").unwrap().coords(), &[2., -3.]);
        assert_eq!(x.apply_basis_map("E").unwrap(), x);
        assert!(matches!(x.apply_basis_map("Q"), Err(Error::UnknownBasisMap(_))));
        assert!(quaternion::<f64>().slot_map("I").is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        // e1 e1 = e2, e2 e1 = e1, e1 e2 = 0
        let doc = r#"{"dim":3,"C":[[[1,0,0],[0,1,0],[0,0,1]],[[0,1,0],[0,0,1],[0,0,0]],[[0,0,1],[0,1,0],[0,0,0]]]}"#;
        assert!(matches!(AlgebraSpec::<f64>::from_json(doc), Err(Error::NonAssociative { .. })));
        let doc = r#"{"dim":2,"unit":1,"C":[[[1,0],[0,1]],[[0,1],[-1,0]]]}"#;
        assert!(matches!(AlgebraSpec::<f64>::from_json(doc), Err(Error::BadUnit(_))));
        let doc = r#"{"dim":2,"C":[[[1,0]]]}"#;
        assert!(matches!(AlgebraSpec::<f64>::from_json(doc), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = complex::<f64>();
        let text = serde_json::to_string(&c.to_doc()).unwrap();
        let back = AlgebraSpec::<f64>::from_json(&text).unwrap();
        assert_eq!(*back, *c);
    }

    #[test]
    fn display() {
        assert_eq!(q([1., -2., 0., 1.]).to_string(), "1 - 2i + k");
        assert_eq!(Element::zero(&complex::<f64>()).to_string(), "0");
    }

    #[test]
    fn operator_norm_estimates() {
        let h = hyperbolic::<f64>();
        let est = product_operator_norm(&h, 200, 7).unwrap();
        assert!((est - 2f64.sqrt()).abs() < 1e-3, "{est}");
        let small = product_operator_norm(&h, 5, 7).unwrap();
        assert!(small <= est);
        let hm = h.with_norm(NormKind::MinkowskiPseudo);
        assert_eq!(product_operator_norm(&hm, 10, 1), Err(Error::PseudoNorm));
    }

    #[test]
    fn works_in_f32() {
        let qa = quaternion::<f32>();
        let i = Element::basis(&qa, 1);
        let j = Element::basis(&qa, 2);
        assert_eq!((&i * &j).coords(), &[0.0f32, 0.0, 0.0, 1.0]);
    }
}
