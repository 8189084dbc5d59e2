//! Composite 3-point Gauss–Legendre quadrature on `[0, 1]` with panel doubling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub min_panels: usize,
    pub max_panels: usize,
    /// Accept when successive estimates differ by less than `tol · max(1, ‖estimate‖)`.
    /// Never tighter than `64 ε` of the scalar type.
    pub tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { min_panels: 4, max_panels: 1 << 14, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadStep {
    pub panels: usize,
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<T> {
    pub value: Vec<T>,
    pub panels: usize,
    pub history: Vec<QuadStep>,
}

fn nodes<T: Scalar>() -> [(T, T); 3] {
    let r = T::lit(0.6).sqrt();
    let half = T::lit(0.5);
    [
        (half * (T::one() - r), T::lit(5.0 / 18.0)),
        (half, T::lit(8.0 / 18.0)),
        (half * (T::one() + r), T::lit(5.0 / 18.0)),
    ]
}

fn panel<T: Scalar, F>(f: &F, k: usize, panels: usize, dim: usize) -> Result<Vec<T>>
where
    F: Fn(T) -> Result<Vec<T>>,
{
    let width = T::one() / T::lit(panels as f64);
    let left = width * T::lit(k as f64);
    let mut acc = vec![T::zero(); dim];
    for (x, w) in nodes::<T>() {
        let v = f(left + width * x)?;
        if v.len() != dim {
            return Err(Error::ArityMismatch { expected: dim, got: v.len() });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (a, c) in acc.iter_mut().zip(v) {
            *a = *a + w * width * c;
        }
    }
    Ok(acc)
}

/// Fixed composite rule with `panels` equal panels.
pub fn gauss_legendre<T: Scalar, F>(f: &F, dim: usize, panels: usize) -> Result<Vec<T>>
where
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    let parts: Vec<Result<Vec<T>>> = panel_values(f, dim, panels);
    let mut total = vec![T::zero(); dim];
    for p in parts {
        for (t, v) in total.iter_mut().zip(p?) {
            *t = *t + v;
        }
    }
    Ok(total)
}

#[cfg(feature = "parallel")]
fn panel_values<T: Scalar, F>(f: &F, dim: usize, panels: usize) -> Vec<Result<Vec<T>>>
where
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    use rayon::prelude::*;
    if panels >= 64 {
        (0..panels).into_par_iter().map(|k| panel(f, k, panels, dim)).collect()
    } else {
        (0..panels).map(|k| panel(f, k, panels, dim)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn panel_values<T: Scalar, F>(f: &F, dim: usize, panels: usize) -> Vec<Result<Vec<T>>>
where
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    (0..panels).map(|k| panel(f, k, panels, dim)).collect()
}

impl Quadrature {
    pub fn with_min_panels(min_panels: usize) -> Self {
        Quadrature { min_panels, ..Default::default() }
    }

    /// Integrates a vector-valued `f` over `[0, 1]`, doubling panels until converged.
    pub fn integrate<T: Scalar, F>(&self, f: F, dim: usize) -> Result<QuadResult<T>>
    where
        F: Fn(T) -> Result<Vec<T>> + Sync,
    {
        let tol = T::lit(self.tol).max(T::epsilon() * T::lit(64.0));
        let mut panels = self.min_panels.max(1);
        let mut prev = gauss_legendre(&f, dim, panels)?;
        let mut history = vec![];
        loop {
            let next_panels = panels * 2;
            if next_panels > self.max_panels {
                return Err(Error::NoConvergence { panels });
            }
            let next = gauss_legendre(&f, dim, next_panels)?;
            let change = next.iter().zip(&prev).fold(T::zero(), |a, (p, q)| a + (*p - *q) * (*p - *q)).sqrt();
            let size = next.iter().fold(T::zero(), |a, p| a + *p * *p).sqrt();
            history.push(QuadStep { panels: next_panels, change: change.as_f64() });
            panels = next_panels;
            prev = next;
            if change < tol * T::one().max(size) {
                return Ok(QuadResult { value: prev, panels, history });
            }
        }
    }
}
