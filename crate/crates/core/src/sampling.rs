//! Seeded random sampling of algebra elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Element};
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates drawn uniformly from `[-scale, scale]^dim`.
pub fn random_coords<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Vec<T> {
    (0..dim).map(|_| T::lit(rng.gen_range(-scale..=scale))).collect()
}

/// Uniform point on the euclidean unit sphere (rejection from the cube).
pub fn random_unit_coords<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 > 1e-6 && r2 <= 1.0 {
            let r = r2.sqrt();
            return v.into_iter().map(|x| T::lit(x / r)).collect();
        }
    }
}

pub fn random_element<T: Scalar, R: Rng + ?Sized>(rng: &mut R, alg: &Algebra<T>, scale: f64) -> Element<T> {
    Element::new(alg, random_coords(rng, alg.dim(), scale))
}

pub fn random_elements<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    alg: &Algebra<T>,
    n: usize,
    scale: f64,
) -> Vec<Element<T>> {
    (0..n).map(|_| random_element(rng, alg, scale)).collect()
}
