//! Line integrals of 1-forms along piecewise-linear and smooth paths.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::forms::{FormP, Verdict};
use crate::quadrature::{QuadStep, Quadrature};
use crate::scalar::Scalar;

/// Endpoints closer than this make a path closed.
pub const CLOSED_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_PANELS: usize = 4;
const VELOCITY_STEP: f64 = 1e-5;

type CurveFn<T> = dyn Fn(T) -> Element<T> + Send + Sync;

#[derive(Clone)]
pub enum Path<T: Scalar> {
    /// Legs traversed in order, each taking an equal share of `[0, 1]`.
    Polyline { waypoints: Vec<Element<T>>, closed: bool },
    Smooth { curve: Arc<CurveFn<T>>, velocity: Option<Arc<CurveFn<T>>>, closed: bool },
}

impl<T: Scalar> fmt::Debug for Path<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Polyline { waypoints, closed } => f
                .debug_struct("Polyline")
                .field("waypoints", &waypoints.iter().map(|w| w.to_string()).collect::<Vec<_>>())
                .field("closed", closed)
                .finish(),
            Path::Smooth { closed, .. } => f.debug_struct("Smooth").field("closed", closed).finish(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathDoc {
    pub waypoints: Vec<Vec<f64>>,
    #[serde(default)]
    pub closed: Option<bool>,
}

fn ends_meet<T: Scalar>(a: &Element<T>, b: &Element<T>) -> bool {
    a.dist(b) <= T::lit(CLOSED_TOLERANCE)
}

impl<T: Scalar> Path<T> {
    pub fn polyline(waypoints: Vec<Element<T>>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two waypoints".into()));
        }
        if waypoints.iter().any(|w| !w.same_algebra(&waypoints[0])) {
            return Err(Error::AlgebraMismatch);
        }
        let closed = ends_meet(&waypoints[0], waypoints.last().unwrap());
        Ok(Path::Polyline { waypoints, closed })
    }

    pub fn linear(a: &Element<T>, b: &Element<T>) -> Result<Self> {
        Self::polyline(vec![a.clone(), b.clone()])
    }

    /// Curve `t ↦ γ(t)` on `[0, 1]`; velocity by central differences unless given.
    pub fn smooth(
        curve: impl Fn(T) -> Element<T> + Send + Sync + 'static,
        velocity: Option<Arc<CurveFn<T>>>,
    ) -> Self {
        let closed = ends_meet(&curve(T::zero()), &curve(T::one()));
        Path::Smooth { curve: Arc::new(curve), velocity, closed }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Path::Polyline { closed, .. } | Path::Smooth { closed, .. } => *closed,
        }
    }

    pub fn point(&self, t: T) -> Element<T> {
        match self {
            Path::Polyline { waypoints, .. } => {
                let legs = waypoints.len() - 1;
                let s = t.max(T::zero()).min(T::one()) * T::lit(legs as f64);
                let k = (s.floor().as_f64() as usize).min(legs - 1);
                let u = s - T::lit(k as f64);
                &waypoints[k] + &(&waypoints[k + 1] - &waypoints[k]).scale(u)
            }
            Path::Smooth { curve, .. } => curve(t),
        }
    }

    pub fn start(&self) -> Element<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Element<T> {
        self.point(T::one())
    }

    pub fn from_doc(alg: &Algebra<T>, doc: &PathDoc) -> Result<Self> {
        let pts = doc
            .waypoints
            .iter()
            .map(|w| {
                if w.len() != alg.dim() {
                    return Err(Error::MalformedSpec(format!("waypoint has {} coordinates, algebra has {}", w.len(), alg.dim())));
                }
                Ok(Element::from_f64(alg, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let path = Self::polyline(pts)?;
        match doc.closed {
            Some(true) if !path.is_closed() => Err(Error::NotClosed),
            Some(false) if path.is_closed() => Err(Error::MalformedSpec("endpoints coincide but path is marked open".into())),
            _ => Ok(path),
        }
    }

    pub fn from_json(alg: &Algebra<T>, s: &str) -> Result<Self> {
        let doc: PathDoc = serde_json::from_str(s).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        Self::from_doc(alg, &doc)
    }

    /// Only polylines serialize.
    pub fn to_doc(&self) -> Option<PathDoc> {
        match self {
            Path::Polyline { waypoints, closed } => Some(PathDoc {
                waypoints: waypoints.iter().map(|w| w.to_f64_vec()).collect(),
                closed: Some(*closed),
            }),
            Path::Smooth { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathIntegral<T: Scalar> {
    pub value: Element<T>,
    /// Panels used, summed over legs.
    pub panels: usize,
    pub history: Vec<QuadStep>,
}

fn smooth_velocity<T: Scalar>(curve: &CurveFn<T>, t: T) -> Element<T> {
    let h = T::lit(VELOCITY_STEP).min(t / T::lit(2.0)).min((T::one() - t) / T::lit(2.0));
    let d = |h: T| (&curve(t + h) - &curve(t - h)).scale(T::one() / (h + h));
    let (d1, d2) = (d(h), d(h / T::lit(2.0)));
    (&d2.scale(T::lit(4.0)) - &d1).scale(T::one() / T::lit(3.0))
}

/// `∫_γ g(y) ∘ dy = ∫₀¹ g(γ(t)) ∘ γ′(t) dt` by composite Gauss–Legendre with panel doubling.
pub fn integrate_along_path<T: Scalar>(g: &FormP<T>, path: &Path<T>, min_panels: usize) -> Result<PathIntegral<T>> {
    if g.degree() != 1 {
        return Err(Error::ArityMismatch { expected: 1, got: g.degree() });
    }
    if min_panels < 4 {
        return Err(Error::InvalidArgument(format!("at least 4 panels required, got {min_panels}")));
    }
    let quad = Quadrature { min_panels, ..g.quadrature() };
    let alg = g.algebra().clone();
    let probe = Element::zero(&alg);
    if !path.start().same_algebra(&probe) {
        return Err(Error::AlgebraMismatch);
    }
    let dim = alg.dim();
    match path {
        Path::Polyline { waypoints, .. } => {
            let mut total = Element::zero(&alg);
            let mut panels = 0;
            let mut history = vec![];
            for leg in waypoints.windows(2) {
                let delta = &leg[1] - &leg[0];
                if delta.coord_norm() == T::zero() {
                    continue;
                }
                let r = quad.integrate(
                    |t: T| Ok(g.eval(&(&leg[0] + &delta.scale(t)), std::slice::from_ref(&delta))?.into_coords()),
                    dim,
                )?;
                total = &total + &Element::new(&alg, r.value);
                panels += r.panels;
                history.extend(r.history);
            }
            Ok(PathIntegral { value: total, panels, history })
        }
        Path::Smooth { curve, velocity, .. } => {
            let r = quad.integrate(
                |t: T| {
                    let v = match velocity {
                        Some(v) => v(t),
                        None => smooth_velocity(curve.as_ref(), t),
                    };
                    Ok(g.eval(&curve(t), &[v])?.into_coords())
                },
                dim,
            )?;
            Ok(PathIntegral { value: Element::new(&alg, r.value), panels: r.panels, history: r.history })
        }
    }
}

/// `∫ₐᵇ ω` along the straight segment, for a form whose integrability has been certified.
pub fn definite_integral<T: Scalar>(g: &FormP<T>, verdict: &Verdict<T>, a: &Element<T>, b: &Element<T>) -> Result<Element<T>> {
    if !verdict.is_certified() {
        return Err(Error::NotCertified);
    }
    if a.dist(b) == T::zero() {
        return Ok(Element::zero(g.algebra()));
    }
    Ok(integrate_along_path(g, &Path::linear(a, b)?, DEFAULT_PANELS)?.value)
}

pub fn loop_integral<T: Scalar>(g: &FormP<T>, path: &Path<T>) -> Result<Element<T>> {
    if !path.is_closed() {
        return Err(Error::NotClosed);
    }
    Ok(integrate_along_path(g, path, DEFAULT_PANELS)?.value)
}

/// Two-leg `0 → a → x` integral minus the straight `0 → x` integral.
pub fn path_dependence_gap<T: Scalar>(g: &FormP<T>, a: &Element<T>, x: &Element<T>) -> Result<Element<T>> {
    let o = Element::zero(g.algebra());
    let bent = integrate_along_path(g, &Path::polyline(vec![o.clone(), a.clone(), x.clone()])?, DEFAULT_PANELS)?;
    let straight = integrate_along_path(g, &Path::linear(&o, x)?, DEFAULT_PANELS)?;
    Ok(&bent.value - &straight.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, quaternion};
    use crate::calculus::{NoncommPoly, TensorPoly};

    fn q(c: [f64; 4]) -> Element<f64> {
        Element::from_f64(&quaternion(), &c)
    }

    fn three_x2(alg: &Algebra<f64>) -> FormP<f64> {
        let three = NoncommPoly::constant(Element::scalar(alg, 3.0));
        FormP::from_tensor_poly(TensorPoly::simple(vec![three, NoncommPoly::power(alg, 2)]).unwrap())
    }

    #[test]
    fn linear_path_gives_cube() {
        let g = FormP::differential_of(&NoncommPoly::power(&quaternion(), 3));
        let x = q([0.2, -0.7, 0.4, 1.1]);
        let r = integrate_along_path(&g, &Path::linear(&Element::zero(&quaternion()), &x).unwrap(), 4).unwrap();
        assert!(r.value.approx_eq(&x.pow(3), 1e-12));
        assert!(r.panels >= 8);
    }

    #[test]
    fn smooth_path_matches_endpoints() {
        let qa = quaternion::<f64>();
        let g = FormP::differential_of(&NoncommPoly::power(&qa, 2));
        let alg = qa.clone();
        let path = Path::smooth(move |t: f64| Element::from_f64(&alg, &[t.cos(), t.sin(), t * t, 0.5 * t]), None);
        let r = integrate_along_path(&g, &path, 4).unwrap();
        let (a, b) = (path.start(), path.end());
        assert!(r.value.approx_eq(&(&b * &b - &a * &a), 1e-8));
    }

    #[test]
    fn gap_vanishes_for_commuting_algebra() {
        let c = complex::<f64>();
        let gap = path_dependence_gap(&three_x2(&c), &Element::from_f64(&c, &[0.3, 1.0]), &Element::from_f64(&c, &[-1.0, 0.5])).unwrap();
        assert!(gap.coord_norm() < 1e-9);
    }

    #[test]
    fn open_loop_refused_and_json() {
        let qa = quaternion::<f64>();
        let g = three_x2(&qa);
        let open = Path::linear(&q([0.; 4]), &q([1., 0., 0., 0.])).unwrap();
        assert_eq!(loop_integral(&g, &open), Err(Error::NotClosed));
        let bad = r#"{"waypoints":[[0,0,0,0],[1,0,0,0]],"closed":true}"#;
        assert_eq!(Path::from_json(&qa, bad).unwrap_err(), Error::NotClosed);
        let ok = r#"{"waypoints":[[0,0,0,0],[1,0,0,0],[0,0,0,0]]}"#;
        let p = Path::from_json(&qa, ok).unwrap();
        assert!(p.is_closed());
        assert!(loop_integral(&g, &p).unwrap().coord_norm() < 1e-12);
    }

    #[test]
    fn too_few_panels() {
        let qa = quaternion::<f64>();
        let p = Path::linear(&q([0.; 4]), &q([1., 0., 0., 0.])).unwrap();
        assert!(matches!(integrate_along_path(&three_x2(&qa), &p, 2), Err(Error::InvalidArgument(_))));
    }
}
