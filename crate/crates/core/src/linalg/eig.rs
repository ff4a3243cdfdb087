//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{BjError, Result};
use crate::tol::EPS_HERM;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("empty decomposition")
    }
}

const MAX_SWEEPS: usize = 64;

/// Validates `h` and returns its eigendecomposition.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEigen> {
    check_hermitian(h)?;
    Ok(jacobi(h.clone(), true))
}

/// Eigenvalues only (ascending). Skips the eigenvector accumulation.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    Ok(jacobi(h.clone(), false).eigenvalues)
}

/// Largest eigenvalue of a Hermitian matrix the caller already trusts to be
/// Hermitian (e.g. built by [`ComplexMatrix::hermitian_part`]).
pub(crate) fn max_eigenvalue_unchecked(h: &ComplexMatrix) -> f64 {
    if h.rows() == 1 {
        return h[(0, 0)].re;
    }
    if h.rows() == 2 {
        let a = h[(0, 0)].re;
        let d = h[(1, 1)].re;
        let b = h[(0, 1)].norm();
        return 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt();
    }
    let mut buf = h.as_slice().to_vec();
    max_eigenvalue_in_place(h.rows(), &mut buf)
}

/// Largest eigenvalue of the Hermitian matrix stored row-major in `a`, which
/// is overwritten. Only the lower triangle is read.
///
/// Householder reduction to tridiagonal form, then Newton iteration on the
/// tridiagonal characteristic polynomial.
/// Both steps are backward stable, so the error is of order `eps * ‖H‖`.
pub(crate) fn max_eigenvalue_in_place(n: usize, a: &mut [C64]) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    if n == 1 {
        return a[0].re;
    }
    if n == 2 {
        let (p, q, b) = (a[0].re, a[3].re, a[2].norm());
        return 0.5 * (p + q) + (0.25 * (p - q) * (p - q) + b * b).sqrt();
    }
    for i in 0..n {
        for j in 0..i {
            a[j * n + i] = a[i * n + j].conj();
        }
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k * n + k].re;
        e[k] = alpha;
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a[i * n + k];
        }
        v[0] += phase * alpha;
        let vn = v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..m] {
            *z /= vn;
        }
        // p = T v on the trailing block T = a[k+1.., k+1..]
        for (r, i) in (k + 1..n).enumerate() {
            let mut s = ZERO;
            for (c, j) in (k + 1..n).enumerate() {
                s += a[i * n + j] * v[c];
            }
            p[r] = s;
        }
        let beta: f64 = v[..m].iter().zip(&p[..m]).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for t in 0..m {
            p[t] = (p[t] - v[t] * beta) * 2.0;
        }
        // T <- T - v w* - w v*
        for (r, i) in (k + 1..n).enumerate() {
            for (c, j) in (k + 1..n).enumerate() {
                a[i * n + j] -= v[r] * p[c].conj() + p[r] * v[c].conj();
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2].re;
        e[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    d[n - 1] = a[(n - 1) * n + n - 1].re;
    max_eigenvalue_tridiagonal(&d, &e)
}

fn max_eigenvalue_tridiagonal(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { 0.0 } + if i + 1 < n { e[i] } else { 0.0 };
        hi = hi.max(d[i] + r);
        lo = lo.min(d[i] - r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    if hi - lo <= f64::EPSILON * scale {
        return hi;
    }
    // Newton on det(T - x I) started above the spectrum: the characteristic
    // polynomial is real-rooted, so the iterates decrease monotonically to the
    // largest root. The ratio p/p' comes from the LDL* recurrence.
    let mut x = hi + f64::EPSILON * scale;
    for _ in 0..200 {
        let mut q = d[0] - x;
        let mut dq = -1.0;
        let mut ratio = dq / q;
        for i in 1..n {
            let e2 = e[i - 1] * e[i - 1];
            let q_prev = q;
            q = d[i] - x - e2 / q_prev;
            dq = -1.0 + e2 * dq / (q_prev * q_prev);
            ratio += dq / q;
        }
        // ratio = p'/p = sum 1/(x - lambda_i) > 0 above the spectrum.
        let step = 1.0 / ratio;
        if !step.is_finite() || step <= 0.0 {
            break;
        }
        x -= step;
        if step <= 2.0 * f64::EPSILON * scale {
            break;
        }
    }
    x
}

/// Top eigen-pair of a trusted Hermitian matrix.
pub(crate) fn top_eigenpair_unchecked(h: &ComplexMatrix) -> (f64, Vec<C64>) {
    if h.rows() == 1 {
        return (h[(0, 0)].re, vec![ONE]);
    }
    let e = jacobi(h.clone(), true);
    let k = e.dim() - 1;
    (e.eigenvalues[k], e.vector(k))
}

pub(crate) fn eig_unchecked(h: &ComplexMatrix) -> HermEigen {
    jacobi(h.clone(), true)
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(BjError::NonSquare { rows: h.rows(), cols: h.cols() });
    }
    if !h.is_finite() {
        return Err(BjError::NonFinite);
    }
    let scale = h.frobenius_norm();
    let asym = h.distance(&h.adjoint());
    if asym > EPS_HERM * scale {
        return Err(BjError::NonHermitian { asymmetry: if scale > 0.0 { asym / scale } else { asym } });
    }
    Ok(())
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Unitary `G` acting on coordinates `(p, q)` that diagonalises the Hermitian
/// 2x2 block `[[app, apq], [conj(apq), aqq]]`. Returned as
/// `(g_pp, g_pq, g_qp, g_qq)`.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let t_abs = apq.norm();
    if t_abs == 0.0 {
        return (ONE, ZERO, ZERO, ONE);
    }
    // apq = |apq| e^{i phi}; block = D R D* with D = diag(1, e^{-i phi}) and
    // R real symmetric. Rotate R, then G = D Q.
    let phase = apq / t_abs;
    let zeta = (aqq - app) / (2.0 * t_abs);
    let t = if zeta >= 0.0 { 1.0 / (zeta + (1.0 + zeta * zeta).sqrt()) } else { -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let d = phase.conj();
    // Q = [[c, s], [-s, c]]
    (C64::new(c, 0.0), C64::new(s, 0.0), d * (-s), d * c)
}

fn jacobi(mut a: ComplexMatrix, want_vectors: bool) -> HermEigen {
    let n = a.rows();
    let mut v = if want_vectors { ComplexMatrix::identity(n) } else { ComplexMatrix::zeros(0, 0) };
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let target = (f64::EPSILON * scale).powi(2);
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm_sqr(&a) <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.norm() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let (g00, g01, g10, g11) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                    // a <- a G
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * g00 + aiq * g10;
                        a[(i, q)] = aip * g01 + aiq * g11;
                    }
                    // a <- G* a
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = g00.conj() * apj + g10.conj() * aqj;
                        a[(q, j)] = g01.conj() * apj + g11.conj() * aqj;
                    }
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                    if want_vectors {
                        for i in 0..n {
                            let vip = v[(i, p)];
                            let viq = v[(i, q)];
                            v[(i, p)] = vip * g00 + viq * g10;
                            v[(i, q)] = vip * g01 + viq * g11;
                        }
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = if want_vectors {
        let mut sorted = ComplexMatrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            sorted.set_column(k, &v.column(i));
        }
        sorted
    } else {
        ComplexMatrix::zeros(0, 0)
    };
    HermEigen { eigenvalues, eigenvectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_case() {
        let h = ComplexMatrix::diag_real(&[2.0, 1.0]);
        let e = herm_eig(&h).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);
        // eigenvectors e2, e1 up to phase
        assert!((e.vector(0)[1].norm() - 1.0).abs() < 1e-15);
        assert!((e.vector(1)[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_matrix() {
        let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let e = herm_eig(&h).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_of_fibonacci_matrix() {
        // B*B for B = [[0,1],[1,1]] is [[1,1],[1,2]]; characteristic
        // polynomial t^2 - 3t + 1.
        let b = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]]);
        let e = herm_eig(&b.adjoint_mul(&b)).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e.eigenvalues[0] - (3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - (3.0 + s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn complex_off_diagonal_residual() {
        let h = ComplexMatrix::from_rows(&[
            [c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            [c(1.0, -1.0), c(-1.0, 0.0), c(0.25, 0.0)],
            [c(0.0, 0.5), c(0.25, 0.0), c(0.5, 0.0)],
        ]);
        let e = herm_eig(&h).unwrap();
        for k in 0..3 {
            let v = e.vector(k);
            let hv = h.mul_vec(&v);
            let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-13, "residual {res}");
        }
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian_and_non_finite() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(BjError::NonHermitian { .. })));
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 0)] = c(f64::INFINITY, 0.0);
        assert!(matches!(herm_eig(&bad), Err(BjError::NonFinite)));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&rect), Err(BjError::NonSquare { .. })));
    }

    #[test]
    fn top_eigenvalue_matches_jacobi() {
        let h = ComplexMatrix::from_rows(&[
            [c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5), c(0.3, 0.1)],
            [c(1.0, -1.0), c(-1.0, 0.0), c(0.25, 0.0), c(0.0, 0.7)],
            [c(0.0, 0.5), c(0.25, 0.0), c(0.5, 0.0), c(-0.2, 0.0)],
            [c(0.3, -0.1), c(0.0, -0.7), c(-0.2, 0.0), c(1.5, 0.0)],
        ]);
        let jac = herm_eigenvalues(&h).unwrap();
        assert!((max_eigenvalue_unchecked(&h) - jac[3]).abs() < 1e-13, "{} {:?}", max_eigenvalue_unchecked(&h), jac);
        let three = h.block(0, 0, 3, 3);
        let jac3 = herm_eigenvalues(&three).unwrap();
        assert!((max_eigenvalue_unchecked(&three) - jac3[2]).abs() < 1e-13);
        // repeated top eigenvalue
        let rep = ComplexMatrix::diag_real(&[3.0, 3.0, -1.0, 0.0]);
        assert!((max_eigenvalue_unchecked(&rep) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_two_by_two_matches_jacobi() {
        let h = ComplexMatrix::from_rows(&[[c(0.3, 0.0), c(0.2, -0.7)], [c(0.2, 0.7), c(-1.1, 0.0)]]);
        let jac = herm_eigenvalues(&h).unwrap();
        assert!((max_eigenvalue_unchecked(&h) - jac[1]).abs() < 1e-14);
        let (lam, v) = top_eigenpair_unchecked(&h);
        assert!((lam - jac[1]).abs() < 1e-14);
        assert!((crate::linalg::matrix::norm(&v) - 1.0).abs() < 1e-14);
    }
}
