//! Dense vector and small square-matrix helpers.
//!
//! Problem dimensions handled by the solver are small (tens of variables), so
//! plain `Vec<T>` storage with straightforward loops is all that is needed.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `a + b`
pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// `a - b`
pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Real>(a: &[T], factor: T) -> Vec<T> {
    a.iter().map(|&x| x * factor).collect()
}

/// `y += alpha * x`
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn is_zero<T: Real>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn all_finite<T: Real>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must have n*n entries");
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n.max(1))
            .take(self.n)
            .map(|row| dot(row, x))
            .collect()
    }

    /// `<x, A x>`
    pub fn quad_form(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }

    /// `A += alpha * u v^T`
    pub fn rank_one_update(&mut self, alpha: T, u: &[T], v: &[T]) {
        for i in 0..self.n {
            let ui = alpha * u[i];
            for j in 0..self.n {
                self.data[i * self.n + j] += ui * v[j];
            }
        }
    }

    /// Replaces the matrix with `(A + A^T) / 2`.
    pub fn symmetrize(&mut self) {
        let half = T::lit(0.5);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let avg = (self[(i, j)] + self[(j, i)]) * half;
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        norm(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    /// Whether `‖A − Aᵀ‖_max ≤ 1e−12 (1 + ‖A‖_max)`.
    pub fn is_symmetric(&self) -> bool {
        let tol = T::lit(1e-12) * (T::one() + self.max_abs());
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Eigenvalues of a symmetric matrix (cyclic Jacobi), in ascending order.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.clone();
        a.symmetrize();
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let mut off = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() <= eps * a.frobenius() || off.is_zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.is_zero() {
                        continue;
                    }
                    let app = a[(p, p)];
                    let aqq = a[(q, q)];
                    let theta = (aqq - app) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        eig
    }

    /// Spectral norm of a symmetric matrix.
    pub fn spectral_norm(&self) -> T {
        self.symmetric_eigenvalues()
            .into_iter()
            .fold(T::zero(), |acc, l| acc.max(l.abs()))
    }

    /// Lower estimate of the spectral radius from `iterations` power steps.
    pub fn power_iteration_radius(&self, iterations: usize) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        // Deterministic start vector with no special alignment to coordinate axes.
        let mut v: Vec<T> = (0..n)
            .map(|i| T::one() + T::from_count(i) * T::lit(0.618_033_988_749_895))
            .collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut radius = T::zero();
        for _ in 0..iterations {
            let w = self.matvec(&v);
            let nw = norm(&w);
            if nw.is_zero() || !nw.is_finite() {
                return radius.max(nw);
            }
            radius = nw;
            v = scale(&w, T::one() / nw);
        }
        radius
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let eig = m.symmetric_eigenvalues();
        assert_relative_eq!(eig[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(eig[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(m.spectral_norm(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_norm_picks_largest_magnitude() {
        let m = Matrix::from_diagonal(&[1.0, -4.0, 2.0]);
        assert_relative_eq!(m.spectral_norm(), 4.0);
        assert_relative_eq!(m.power_iteration_radius(30), 4.0, epsilon = 1e-3);
    }

    #[test]
    fn power_iteration_handles_opposite_eigenvalues() {
        let m = Matrix::from_diagonal(&[1.0, -1.0]);
        assert_relative_eq!(m.power_iteration_radius(30), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_one_and_symmetrize() {
        let mut m = Matrix::<f64>::identity(2);
        m.rank_one_update(2.0, &[1.0, 0.0], &[0.0, 1.0]);
        assert!(!m.is_symmetric());
        m.symmetrize();
        assert!(m.is_symmetric());
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m.quad_form(&[1.0, 1.0]), 4.0);
    }
}
