//! Random test instances: generic pairs, engineered orthogonal pairs and
//! engineered non-orthogonal pairs, for single matrices and direct sums.

use rand::Rng;

use crate::bj::norm_attain_set;
use crate::cstar::{joint_norming_subspace, AlgebraElement, AlgebraShape};
use crate::linalg::matrix::{dot, norm, ComplexMatrix, C64};
use crate::linalg::svd::spectral_norm;
use crate::random::{gaussian, gaussian_matrix, unimodular, unit_vector, unitary};
use crate::tol::EPS_RANK;

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> AlgebraElement {
    let blocks = shape.block_sizes().iter().map(|&n| gaussian_matrix(rng, n, n)).collect();
    AlgebraElement::new(shape.clone(), blocks).expect("blocks match shape")
}

/// `U diag(1, ..., 1, s_{d+1}, ..., s_n) V*` with `d` unit singular values and
/// the rest drawn from `(0.05, 0.95)`, so `dim M₀ = d`.
pub fn matrix_with_m0_dim<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> ComplexMatrix {
    let s: Vec<f64> = (0..n).map(|k| if k < d { 1.0 } else { rng.random_range(0.05..0.95) }).collect();
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    u.matmul(&ComplexMatrix::diag_real(&s)).matmul(&v.adjoint())
}

/// Random element whose first `norming` blocks (after a random permutation)
/// share the norm 1 while the others have norm in `(0.1, 0.9)`.
pub fn element_with_norming_blocks<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape, norming: usize) -> AlgebraElement {
    let l = shape.num_blocks();
    let mut order: Vec<usize> = (0..l).collect();
    for i in (1..l).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut target = vec![0.0; l];
    for (rank, &k) in order.iter().enumerate() {
        target[k] = if rank < norming.max(1) { 1.0 } else { rng.random_range(0.1..0.9) };
    }
    let mut x = random_element(rng, shape);
    x = x.map_blocks(|k, b| b.scale_real(target[k] / spectral_norm(b)));
    x
}

/// Corrects `b` so that `⟨Ax, Bx⟩ = 0` for a random unit `x ∈ M₀(A)`, which
/// forces `A ⊥ B`. Returns `b` unchanged when `A = 0`.
pub fn make_orthogonal_to<R: Rng + ?Sized>(rng: &mut R, a: &ComplexMatrix, mut b: ComplexMatrix) -> ComplexMatrix {
    let Ok(m0) = norm_attain_set(a, EPS_RANK) else { return b };
    let coeffs = unit_vector(rng, m0.dim());
    let x = m0.basis.mul_vec(&coeffs);
    let ax = a.mul_vec(&x);
    let t = dot(&ax, &b.mul_vec(&x));
    let denom = dot(&ax, &ax).re * dot(&x, &x).re;
    let corr = ComplexMatrix::outer(&ax, &x).scale(t / denom);
    b = &b - &corr;
    b
}

pub fn orthogonal_partner<R: Rng + ?Sized>(rng: &mut R, a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let b = gaussian_matrix(rng, n, n);
    make_orthogonal_to(rng, a, b)
}

/// `e^{iφ}A + 0.3‖A‖G/‖G‖`: every unit `x ∈ M₀(A)` has
/// `|⟨Ax, Bx⟩| ≥ 0.7‖A‖²`, so `A ⊥ B` fails decisively.
pub fn non_orthogonal_partner<R: Rng + ?Sized>(rng: &mut R, a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let g = gaussian_matrix(rng, n, n);
    let ng = spectral_norm(&g).max(f64::MIN_POSITIVE);
    &a.scale(unimodular(rng)) + &g.scale_real(0.3 * spectral_norm(a) / ng)
}

/// Element version of [`make_orthogonal_to`]: the correction is applied in a
/// single block so the result stays block diagonal.
pub fn make_orthogonal_to_alg<R: Rng + ?Sized>(rng: &mut R, a: &AlgebraElement, b: AlgebraElement) -> AlgebraElement {
    let Ok(joint) = joint_norming_subspace(a, EPS_RANK) else { return b };
    let shape = a.shape().clone();
    let offsets = shape.offsets();
    let coeffs = unit_vector(rng, joint.dim());
    let x = joint.basis.mul_vec(&coeffs);
    let parts: Vec<Vec<C64>> = shape.block_sizes().iter().zip(&offsets).map(|(&n, &o)| x[o..o + n].to_vec()).collect();
    let mut total = C64::new(0.0, 0.0);
    let mut best = 0;
    let mut best_weight = -1.0;
    for (k, xk) in parts.iter().enumerate() {
        let axk = a.block(k).mul_vec(xk);
        total += dot(&axk, &b.block(k).mul_vec(xk));
        let w = norm(&axk) * norm(xk);
        if w > best_weight {
            best_weight = w;
            best = k;
        }
    }
    let xk = &parts[best];
    let axk = a.block(best).mul_vec(xk);
    let denom = dot(&axk, &axk).re * dot(xk, xk).re;
    let corr = ComplexMatrix::outer(&axk, xk).scale(total / denom);
    b.map_blocks(|k, blk| if k == best { blk - &corr } else { blk.clone() })
}

pub fn orthogonal_partner_alg<R: Rng + ?Sized>(rng: &mut R, a: &AlgebraElement) -> AlgebraElement {
    let b = random_element(rng, a.shape());
    make_orthogonal_to_alg(rng, a, b)
}

pub fn non_orthogonal_partner_alg<R: Rng + ?Sized>(rng: &mut R, a: &AlgebraElement) -> AlgebraElement {
    let g = random_element(rng, a.shape());
    let ng = g.norm().max(f64::MIN_POSITIVE);
    let phase = unimodular(rng);
    let na = a.norm();
    a.scale(phase).add(&g.scale_real(0.3 * na / ng)).expect("same shape")
}

/// Rank-one pair `(x, y, X)` with `x*Xy = 0` built by projection.
pub fn rank_one_orthogonal_triple<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Vec<C64>, Vec<C64>, ComplexMatrix) {
    let x: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let y: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let m = gaussian_matrix(rng, n, n);
    let t = m.sesquilinear(&x, &y);
    let corr = ComplexMatrix::outer(&x, &y).scale(t / (dot(&x, &x).re * dot(&y, &y).re));
    (x, y, &m - &corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bj::{bj_orthogonal_criterion, BjState};
    use crate::cstar::bj_orthogonal_alg;
    use crate::random::rng_from_seed;

    #[test]
    fn engineered_pairs_have_the_intended_verdicts() {
        let mut rng = rng_from_seed(5);
        for n in 2..=4 {
            for d in 1..=2 {
                let a = matrix_with_m0_dim(&mut rng, n, d);
                assert_eq!(norm_attain_set(&a, EPS_RANK).unwrap().dim(), d);
                let b = orthogonal_partner(&mut rng, &a);
                assert_eq!(bj_orthogonal_criterion(&a, &b).unwrap().state, BjState::Orthogonal);
                let c = non_orthogonal_partner(&mut rng, &a);
                assert_eq!(bj_orthogonal_criterion(&a, &c).unwrap().state, BjState::NotOrthogonal);
            }
        }
    }

    #[test]
    fn engineered_element_pairs() {
        let mut rng = rng_from_seed(6);
        let shape = AlgebraShape::new(vec![2, 3]).unwrap();
        for norming in 1..=2 {
            let a = element_with_norming_blocks(&mut rng, &shape, norming);
            let (_, blocks) = crate::cstar::alg_norm_and_norming_blocks(&a, EPS_RANK);
            assert_eq!(blocks.len(), norming);
            let b = orthogonal_partner_alg(&mut rng, &a);
            assert_eq!(bj_orthogonal_alg(&a, &b).unwrap().state, BjState::Orthogonal);
            let c = non_orthogonal_partner_alg(&mut rng, &a);
            assert_eq!(bj_orthogonal_alg(&a, &c).unwrap().state, BjState::NotOrthogonal);
        }
    }

    #[test]
    fn rank_one_triple_is_orthogonal() {
        let mut rng = rng_from_seed(8);
        let (x, y, m) = rank_one_orthogonal_triple(&mut rng, 3);
        assert!(m.sesquilinear(&x, &y).norm() < 1e-13);
    }
}
