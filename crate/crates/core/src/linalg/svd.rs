//! Singular value decomposition by one-sided (Hestenes) Jacobi.

use super::eig::{jacobi_rotation, max_eigenvalue_unchecked};
use super::matrix::{complete_orthonormal, dot, norm, ComplexMatrix, C64};
use crate::error::{BjError, Result};

/// Thin SVD `A = sum_i sigma_i u_i v_i*` with `k = min(rows, cols)` terms.
///
/// Singular values are descending. Each right vector is phase-normalised so
/// that its first entry of modulus above `1e-12` is real and non-negative; the
/// matching left vector carries the same phase so the product is unchanged.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub left_vectors: ComplexMatrix,
    pub right_vectors: ComplexMatrix,
}

impl SvdResult {
    pub fn rank_tol(&self, rel: f64) -> usize {
        let s1 = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().filter(|&&s| s > rel * s1 && s > 0.0).count()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn u(&self, k: usize) -> Vec<C64> {
        self.left_vectors.column(k)
    }

    pub fn v(&self, k: usize) -> Vec<C64> {
        self.right_vectors.column(k)
    }

    /// The rank-one term `sigma_k u_k v_k*`.
    pub fn term(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.u(k), &self.v(k)).scale_real(self.singular_values[k])
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.left_vectors.rows(), self.right_vectors.rows());
        let mut out = ComplexMatrix::zeros(m, n);
        for k in 0..self.singular_values.len() {
            out = &out + &self.term(k);
        }
        out
    }
}

const MAX_SWEEPS: usize = 80;

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(BjError::NonFinite);
    }
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint());
        return Ok(SvdResult { singular_values: t.singular_values, left_vectors: t.right_vectors, right_vectors: t.left_vectors }
            .phase_normalised());
    }
    Ok(svd_tall(a).phase_normalised())
}

/// Largest singular value via the top eigenvalue of `A*A`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let g = if a.cols() <= a.rows() { a.adjoint_mul(a) } else { a.matmul(&a.adjoint()) };
    max_eigenvalue_unchecked(&g).max(0.0).sqrt()
}

fn svd_tall(a: &ComplexMatrix) -> SvdResult {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let wp = w.column(p);
                let wq = w.column(q);
                let alpha = dot(&wp, &wp).re;
                let beta = dot(&wq, &wq).re;
                let gamma = dot(&wp, &wq);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (g00, g01, g10, g11) = jacobi_rotation(alpha, beta, gamma);
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = x * g00 + y * g10;
                    w[(i, q)] = x * g01 + y * g11;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * g00 + y * g10;
                    v[(i, q)] = x * g01 + y * g11;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let smax = norms.get(order[0]).copied().unwrap_or(0.0);

    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut right = ComplexMatrix::zeros(n, n);
    let mut deficient = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        right.set_column(k, &v.column(j));
        if s > 1e-14 * smax && s > 0.0 {
            left.push(w.column(j).iter().map(|z| z / s).collect());
            sigma.push(s);
        } else {
            deficient.push(k);
            left.push(Vec::new());
            sigma.push(0.0);
        }
    }
    if !deficient.is_empty() {
        let known: Vec<Vec<C64>> = left.iter().filter(|c| !c.is_empty()).cloned().collect();
        let full = complete_orthonormal(m, &known);
        let mut extra = full.into_iter().skip(known.len());
        for k in deficient {
            left[k] = extra.next().expect("orthonormal completion too short");
        }
    }
    SvdResult { singular_values: sigma, left_vectors: ComplexMatrix::from_columns(m, &left), right_vectors: right }
}

impl SvdResult {
    fn phase_normalised(mut self) -> Self {
        for k in 0..self.singular_values.len() {
            let v = self.right_vectors.column(k);
            if let Some(first) = v.iter().find(|z| z.norm() > 1e-12) {
                let phase = first.conj() / first.norm();
                let v2: Vec<C64> = v.iter().map(|z| z * phase).collect();
                let u2: Vec<C64> = self.left_vectors.column(k).iter().map(|z| z * phase).collect();
                self.right_vectors.set_column(k, &v2);
                self.left_vectors.set_column(k, &u2);
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matrix_unit() {
        let s = svd(&ComplexMatrix::unit(2, 0, 0)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 0.0]);
        assert!((s.u(0)[0] - ONE).norm() < 1e-15);
        assert!((s.v(0)[0] - ONE).norm() < 1e-15);
    }

    #[test]
    fn fibonacci_matrix() {
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]]);
        let s = svd(&a).unwrap();
        let s5 = 5f64.sqrt();
        assert!((s.singular_values[0].powi(2) - (3.0 + s5) / 2.0).abs() < 1e-13);
        assert!((s.singular_values[1].powi(2) - (3.0 - s5) / 2.0).abs() < 1e-13);
        assert!(s.singular_values[0] > s.singular_values[1]);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let h = 1.0 / 2f64.sqrt();
        let u = ComplexMatrix::from_rows(&[[c(h, 0.0), c(0.0, h)], [c(0.0, h), c(h, 0.0)]]);
        let s = svd(&u).unwrap();
        for sv in s.singular_values {
            assert!((sv - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_matrix_and_phase_convention() {
        let a = ComplexMatrix::from_rows(&[[c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5)], [c(0.5, 0.0), c(1.0, -1.0), c(0.0, 0.0)]]);
        let s = svd(&a).unwrap();
        assert_eq!(s.singular_values.len(), 2);
        assert!(s.reconstruct().distance(&a) < 1e-13);
        for k in 0..2 {
            let v = s.v(k);
            let first = v.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
        assert!((spectral_norm(&a) - s.singular_values[0]).abs() < 1e-13);
    }

    #[test]
    fn rank_deficient_left_vectors_are_completed() {
        let a = ComplexMatrix::outer(&[c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)], &[c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = svd(&a).unwrap();
        let u = &s.left_vectors;
        let gram = u.adjoint_mul(u);
        assert!(gram.distance(&ComplexMatrix::identity(3)) < 1e-12);
        assert_eq!(s.rank_tol(1e-10), 1);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = ComplexMatrix::identity(2);
        a[(1, 0)] = c(0.0, f64::NAN);
        assert_eq!(svd(&a).unwrap_err(), BjError::NonFinite);
    }
}
