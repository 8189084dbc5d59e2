//! Small dense linear algebra: LU solves and an SVD-based least-squares solver.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a x = b` for square `a` by LU with partial pivoting.
/// Returns `None` when a pivot falls below the relative singularity threshold.
pub fn lu_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    assert_eq!(a.cols, n, "lu_solve needs a square matrix");
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let tol = m.max_abs() * T::epsilon() * T::lit(16.0 * n.max(1) as f64);
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| m[(r, col)].abs().partial_cmp(&m[(s, col)].abs()).unwrap())?;
        if !(m[(piv, col)].abs() > tol) {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
            }
            x.swap(piv, col);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] = m[(r, j)] - f * v;
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for r in (0..n).rev() {
        let s = (r + 1..n).fold(x[r], |acc, j| acc - m[(r, j)] * x[j]);
        x[r] = s / m[(r, r)];
    }
    Some(x)
}

/// Thin SVD `a = u diag(s) vᵀ` by one-sided Jacobi rotations on the columns.
/// `u` is rows×cols, `v` is cols×cols.
pub fn jacobi_svd<T: Scalar>(a: &Matrix<T>) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    alpha = alpha + up * up;
                    beta = beta + uq * uq;
                    gamma = gamma + up * uq;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s = vec![T::zero(); n];
    for j in 0..n {
        let norm = (0..m).fold(T::zero(), |acc, i| acc + u[(i, j)] * u[(i, j)]).sqrt();
        s[j] = norm;
        if norm > T::zero() {
            for i in 0..m {
                u[(i, j)] = u[(i, j)] / norm;
            }
        }
    }
    (u, s, v)
}

/// Minimum-norm least-squares solution of `a x ≈ b` via the pseudoinverse.
/// Returns the solution and the euclidean residual `‖a x − b‖`.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T]) -> (Vec<T>, T) {
    assert_eq!(b.len(), a.rows);
    let (u, s, v) = jacobi_svd(a);
    let smax = s.iter().fold(T::zero(), |m, x| m.max(*x));
    let cutoff = smax * T::epsilon() * T::lit((a.rows.max(a.cols) * 4) as f64);
    let mut x = vec![T::zero(); a.cols];
    for (j, &sj) in s.iter().enumerate() {
        if sj <= cutoff || sj == T::zero() {
            continue;
        }
        let coef = (0..a.rows).fold(T::zero(), |acc, i| acc + u[(i, j)] * b[i]) / sj;
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = *xk + coef * v[(k, j)];
        }
    }
    let ax = a.mul_vec(&x);
    let resid = ax.iter().zip(b).fold(T::zero(), |acc, (p, q)| acc + (*p - *q) * (*p - *q)).sqrt();
    (x, resid)
}

/// Cholesky test for symmetric positive definiteness.
pub fn is_positive_definite<T: Scalar>(a: &Matrix<T>) -> bool {
    let n = a.rows;
    if a.cols != n {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > T::epsilon() * T::lit(64.0) * a.max_abs() {
                return false;
            }
        }
    }
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let d = (0..j).fold(a[(j, j)], |acc, k| acc - l[(j, k)] * l[(j, k)]);
        if !(d > T::zero()) {
            return false;
        }
        l[(j, j)] = d.sqrt();
        for i in j + 1..n {
            let s = (0..j).fold(a[(i, j)], |acc, k| acc - l[(i, k)] * l[(j, k)]);
            l[(i, j)] = s / l[(j, j)];
        }
    }
    true
}
