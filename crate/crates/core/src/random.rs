//! Seeded random generators for matrices, vectors and unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::{complete_orthonormal, norm, project_out, ComplexMatrix, C64};

pub type BjRng = ChaCha8Rng;

/// Default seed used by the CLI when neither `--seed` nor `BJ_SEED` is given.
pub const DEFAULT_SEED: u64 = 20240917;

pub fn rng_from_seed(seed: u64) -> BjRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` of a batch seeded by `seed`.
pub fn substream(seed: u64, index: u64) -> BjRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v = gaussian_vector(rng, n);
        let nv = norm(&v);
        if nv > 1e-6 {
            return v.iter().map(|z| z / nv).collect();
        }
    }
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian entries")
}

/// Haar-distributed unitary via Gram-Schmidt of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(rng, n);
        project_out(&mut v, &cols);
        project_out(&mut v, &cols);
        let nv = norm(&v);
        if nv > 1e-6 {
            cols.push(v.iter().map(|z| z / nv).collect());
        }
    }
    ComplexMatrix::from_columns(n, &cols)
}

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random unit vector orthogonal to the given orthonormal set.
pub fn unit_vector_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, n: usize, basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..16 {
        let mut v = gaussian_vector(rng, n);
        project_out(&mut v, basis);
        project_out(&mut v, basis);
        let nv = norm(&v);
        if nv > 1e-6 {
            return Some(v.iter().map(|z| z / nv).collect());
        }
    }
    complete_orthonormal(n, basis).into_iter().nth(basis.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(7);
        let u = unitary(&mut rng, 4);
        assert!(u.adjoint_mul(&u).distance(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn seeding_is_reproducible() {
        let a = gaussian_matrix(&mut rng_from_seed(3), 3, 3);
        let b = gaussian_matrix(&mut rng_from_seed(3), 3, 3);
        assert_eq!(a, b);
        let c = gaussian_matrix(&mut substream(3, 0), 3, 3);
        let d = gaussian_matrix(&mut substream(3, 1), 3, 3);
        assert_ne!(c, d);
    }

    #[test]
    fn orthogonal_unit_vector() {
        let mut rng = rng_from_seed(11);
        let e1 = crate::linalg::basis_vector(3, 0);
        let v = unit_vector_orthogonal_to(&mut rng, 3, &[e1]).unwrap();
        assert!(v[0].norm() < 1e-14);
        assert!((norm(&v) - 1.0).abs() < 1e-14);
    }
}
