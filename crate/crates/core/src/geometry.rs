//! Geometry of the outgoing and incoming neighbourhoods in `M_n(ℂ)`.

use std::f64::consts::TAU;

use rand::Rng;

use crate::bj::{bj_orthogonal_criterion, norm_attain_set, BjState};
use crate::error::{BjError, Result};
use crate::linalg::matrix::{dot, norm, normalized, project_out, ComplexMatrix, C64, ZERO};
use crate::linalg::numrange::support;
use crate::linalg::svd::{spectral_norm, svd, SvdResult};
use crate::random::{gaussian_matrix, rng_from_seed, unit_vector, BjRng};
use crate::tol::{DELTA_MARGIN, DELTA_ZERO, EPS_RANK};

/// `𝒱 = { X : v_i* X u_i = 0 for every constraint (v_i, u_i) }`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutgoingSpaceSpec {
    n: usize,
    constraints: Vec<(Vec<C64>, Vec<C64>)>,
}

impl OutgoingSpaceSpec {
    pub fn new(n: usize, constraints: Vec<(Vec<C64>, Vec<C64>)>) -> Result<Self> {
        for (v, u) in &constraints {
            if v.len() != n || u.len() != n {
                return Err(BjError::ShapeMismatch(format!("constraint vectors must have length {n}")));
            }
            if norm(v) == 0.0 || norm(u) == 0.0 {
                return Err(BjError::ZeroVector);
            }
        }
        Ok(OutgoingSpaceSpec { n, constraints })
    }

    /// The whole algebra `M_n(ℂ)` (no constraints).
    pub fn full(n: usize) -> Self {
        OutgoingSpaceSpec { n, constraints: Vec::new() }
    }

    /// `𝒱_p`: zeros at the first-row positions `(1,p), ..., (1,n)`
    /// (one-based `p`).
    pub fn first_row_zeros(n: usize, p: usize) -> Result<Self> {
        if p < 1 || p > n {
            return Err(BjError::InvalidShape(format!("p = {p} outside 1..={n}")));
        }
        let e = |i: usize| crate::linalg::basis_vector(n, i);
        Self::new(n, (p - 1..n).map(|j| (e(0), e(j))).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[(Vec<C64>, Vec<C64>)] {
        &self.constraints
    }

    /// Largest normalised constraint violation `|v*Xu| / (‖v‖‖u‖)`.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        self.constraints.iter().map(|(v, u)| x.sesquilinear(v, u).norm() / (norm(v) * norm(u))).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &ComplexMatrix) -> bool {
        self.residual(x) <= DELTA_MARGIN * spectral_norm(x).max(DELTA_ZERO)
    }

    /// Image under `X ↦ U X W*`: each `(v, u)` becomes `(Uv, Wu)`.
    pub fn transport(&self, u: &ComplexMatrix, w: &ComplexMatrix) -> Self {
        let constraints = self.constraints.iter().map(|(v, uu)| (u.mul_vec(v), w.mul_vec(uu))).collect();
        OutgoingSpaceSpec { n: self.n, constraints }
    }

    /// Orthogonal (Frobenius) projection onto `𝒱` intersected with the extra
    /// constraints. Constraint `v*Xu = 0` is `⟨vu*, X⟩_F = 0`.
    pub fn project_with(&self, x: &ComplexMatrix, extra: &[(Vec<C64>, Vec<C64>)]) -> ComplexMatrix {
        let n = self.n;
        let mut gens: Vec<Vec<C64>> = Vec::new();
        for (v, u) in self.constraints.iter().chain(extra) {
            let mut g = ComplexMatrix::outer(v, u).as_slice().to_vec();
            project_out(&mut g, &gens);
            project_out(&mut g, &gens);
            if let Some(q) = normalized(&g) {
                if norm(&g) > 1e-10 * norm(v) * norm(u) {
                    gens.push(q);
                }
            }
        }
        let mut data = x.as_slice().to_vec();
        project_out(&mut data, &gens);
        ComplexMatrix::from_vec(n, n, data).expect("finite projection")
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.project_with(x, &[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftSymmetryVerdict {
    Falsified,
    NotFalsified,
}

#[derive(Debug, Clone)]
pub struct LeftSymmetryReport {
    pub verdict: LeftSymmetryVerdict,
    /// `B ∈ 𝒱` with `A ⊥ B` and `B ⊥̸ A`.
    pub counterexample: Option<ComplexMatrix>,
    /// Candidates examined, deterministic constructions included.
    pub trials: usize,
}

/// Accepts `b` only when every claim is decisive: membership, `A ⊥ B`, and
/// `B ⊥̸ A`.
fn certifies_counterexample(a: &ComplexMatrix, b: &ComplexMatrix, space: &OutgoingSpaceSpec) -> bool {
    if spectral_norm(b) <= 1e-8 * spectral_norm(a) || !space.contains(b) {
        return false;
    }
    let forward = match bj_orthogonal_criterion(a, b) {
        Ok(v) => v.state,
        Err(_) => return false,
    };
    if forward != BjState::Orthogonal {
        return false;
    }
    matches!(bj_orthogonal_criterion(b, a), Ok(v) if v.state == BjState::NotOrthogonal)
}

/// The rank-one and difference candidates used in the proofs: `x' y_i*` with
/// `x'` the part of `x_i` orthogonal to every `v_j`, `x_i y'*` likewise for
/// the `u_j`, and `A - σ₁ x₁ y₁*`.
fn deterministic_candidates(a: &ComplexMatrix, s: &SvdResult, space: &OutgoingSpaceSpec) -> Vec<ComplexMatrix> {
    let ortho = |vs: Vec<Vec<C64>>| {
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for mut v in vs {
            project_out(&mut v, &basis);
            project_out(&mut v, &basis);
            if norm(&v) > 1e-10 {
                basis.push(normalized(&v).unwrap());
            }
        }
        basis
    };
    let vs = ortho(space.constraints.iter().map(|(v, _)| v.clone()).collect());
    let us = ortho(space.constraints.iter().map(|(_, u)| u.clone()).collect());
    let s1 = s.sigma_max();
    let mut out = Vec::new();
    for i in 0..s.singular_values.len() {
        let (x, y) = (s.u(i), s.v(i));
        let mut xp = x.clone();
        project_out(&mut xp, &vs);
        if norm(&xp) > 1e-8 {
            out.push(ComplexMatrix::outer(&xp, &y));
        }
        let mut yp = y.clone();
        project_out(&mut yp, &us);
        if norm(&yp) > 1e-8 {
            out.push(ComplexMatrix::outer(&x, &yp));
        }
        if i > 0 && s.singular_values[i] > 1e-12 * s1 {
            out.push(ComplexMatrix::outer(&x, &y));
        }
    }
    out.push(a - &s.term(0));
    out
}

/// Randomised refutation of left-symmetry of `A` relative to `𝒱`.
/// `NotFalsified` is not a proof of left-symmetry.
pub fn left_symmetric_falsify(a: &ComplexMatrix, space: &OutgoingSpaceSpec, trials: usize, seed: u64) -> Result<LeftSymmetryReport> {
    left_symmetric_falsify_with(a, space, trials, &mut rng_from_seed(seed))
}

pub fn left_symmetric_falsify_with(
    a: &ComplexMatrix,
    space: &OutgoingSpaceSpec,
    trials: usize,
    rng: &mut BjRng,
) -> Result<LeftSymmetryReport> {
    if a.shape() != (space.n, space.n) {
        return Err(BjError::ShapeMismatch(format!("{}x{} matrix in M_{}", a.rows(), a.cols(), space.n)));
    }
    let na = spectral_norm(a);
    let residual = space.residual(a);
    if residual > DELTA_MARGIN * na.max(DELTA_ZERO) {
        return Err(BjError::NotMember { residual });
    }
    let mut examined = 0;
    let found = |b: ComplexMatrix, examined: usize| LeftSymmetryReport {
        verdict: LeftSymmetryVerdict::Falsified,
        counterexample: Some(b),
        trials: examined,
    };
    if na <= DELTA_ZERO {
        return Ok(LeftSymmetryReport { verdict: LeftSymmetryVerdict::NotFalsified, counterexample: None, trials: 0 });
    }
    let s = svd(a)?;
    for b in deterministic_candidates(a, &s, space) {
        examined += 1;
        if certifies_counterexample(a, &b, space) {
            return Ok(found(b, examined));
        }
    }
    let m0 = norm_attain_set(a, EPS_RANK)?;
    let n = space.n;
    for _ in 0..trials {
        examined += 1;
        let x = m0.basis.mul_vec(&unit_vector(rng, m0.dim()));
        let ax = a.mul_vec(&x);
        let g = gaussian_matrix(rng, n, n);
        let b = space.project_with(&g, &[(ax, x)]);
        if certifies_counterexample(a, &b, space) {
            return Ok(found(b, examined));
        }
    }
    Ok(LeftSymmetryReport { verdict: LeftSymmetryVerdict::NotFalsified, counterexample: None, trials: examined })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `B±` together with the two-term SVD claimed for it.
#[derive(Debug, Clone)]
pub struct BpmConstruction {
    pub matrix: ComplexMatrix,
    pub claimed_svd: SvdResult,
    /// Max-entry distance between `B±` and its claimed SVD expansion.
    pub reconstruction_error: f64,
}

/// `B± = c̄E_{1n} - s̄E_{(n-1)n} ± s̄E_{n1} + c̄E_{nn}` with its explicit SVD
/// `√(1+|c|) u₁v₁* + √(1-|c|) u₂v₂*`.
pub fn construct_bpm(c: C64, s: C64, n: usize, sign: Sign) -> Result<BpmConstruction> {
    if n < 3 {
        return Err(BjError::InvalidShape(format!("n = {n} < 3")));
    }
    if c.norm() <= 1e-12 || s.norm() <= 1e-12 {
        return Err(BjError::DegenerateParams(format!("c s = 0 for c = {c}, s = {s}")));
    }
    if (c.norm_sqr() + s.norm_sqr() - 1.0).abs() > 1e-12 {
        return Err(BjError::DegenerateParams(format!("|c|² + |s|² = {} ≠ 1", c.norm_sqr() + s.norm_sqr())));
    }
    let pm = sign.value();
    let (cb, sb) = (c.conj(), s.conj());
    let (first, penult, last) = (0, n - 2, n - 1);
    let mut b = ComplexMatrix::zeros(n, n);
    b[(first, last)] = cb;
    b[(penult, last)] = -sb;
    b[(last, first)] = sb * pm;
    b[(last, last)] = cb;

    let ac = c.norm();
    let r2 = std::f64::consts::SQRT_2;
    let vec_with = |entries: &[(usize, C64)]| {
        let mut v = vec![ZERO; n];
        for &(i, z) in entries {
            v[i] += z;
        }
        v
    };
    let u1 = vec_with(&[(first, cb * ac), (penult, -sb * ac), (last, cb)]).into_iter().map(|z| z / (cb * r2)).collect::<Vec<_>>();
    let v1 = vec_with(&[(first, cb * s * pm), (last, C64::new(ac * ac + ac, 0.0))])
        .into_iter()
        .map(|z| z / (cb * (2.0 * (1.0 + ac)).sqrt()))
        .collect::<Vec<_>>();
    let u2 = vec_with(&[(first, -cb * ac), (penult, sb * ac), (last, cb)]).into_iter().map(|z| z / (cb * r2)).collect::<Vec<_>>();
    let v2 = vec_with(&[(first, cb * s * pm), (last, C64::new(ac * ac - ac, 0.0))])
        .into_iter()
        .map(|z| z / (cb * (2.0 * (1.0 - ac)).sqrt()))
        .collect::<Vec<_>>();
    let claimed = SvdResult {
        singular_values: vec![(1.0 + ac).sqrt(), (1.0 - ac).sqrt()],
        left_vectors: ComplexMatrix::from_columns(n, &[u1, u2]),
        right_vectors: ComplexMatrix::from_columns(n, &[v1, v2]),
    };
    let err = (&claimed.reconstruct() - &b).max_abs();
    if err > 1e-10 {
        return Err(BjError::DegenerateParams(format!("claimed SVD reconstructs to {err:e}")));
    }
    Ok(BpmConstruction { matrix: b, claimed_svd: claimed, reconstruction_error: err })
}

/// `A = σ₂E₁₁ + x₁y₁*` with `x₁ = c e_{n-1} + s e_n` and
/// `y₁ = c_y e_{n-1} + s_y e_n`: the normal form reached before `B±` is built.
pub fn bpm_partner_matrix(n: usize, sigma2: f64, c: C64, s: C64, cy: C64, sy: C64) -> ComplexMatrix {
    let mut x1 = vec![ZERO; n];
    x1[n - 2] = c;
    x1[n - 1] = s;
    let mut y1 = vec![ZERO; n];
    y1[n - 2] = cy;
    y1[n - 1] = sy;
    let mut a = ComplexMatrix::outer(&x1, &y1);
    a[(0, 0)] += C64::new(sigma2, 0.0);
    a
}

/// Closed form of `⟨B±b±, Ab±⟩ = c̄s̄(±σ₂c + |s|²s_y) / (2|c|)`.
pub fn bpm_inner_product(c: C64, s: C64, sigma2: f64, sy: C64, sign: Sign) -> C64 {
    c.conj() * s.conj() * (c * (sign.value() * sigma2) + sy * s.norm_sqr()) / (2.0 * c.norm())
}

/// For `B = xe_n* + e_ny*` with nonzero `(1n), (n1), (nn)` entries: whether
/// the top singular value is simple and both SVD terms have a nonzero
/// `(1,1)` entry.
pub fn lastrow_svd_check(b: &ComplexMatrix) -> Result<bool> {
    if !b.is_square() {
        return Err(BjError::NonSquare { rows: b.rows(), cols: b.cols() });
    }
    let n = b.rows();
    if n < 2 {
        return Err(BjError::NotInForm("n must be at least 2".into()));
    }
    let scale = b.max_abs();
    let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            if b[(i, j)].norm() > tiny {
                return Err(BjError::NotInForm(format!("entry ({}, {}) is nonzero", i + 1, j + 1)));
            }
        }
    }
    for (i, j) in [(0, n - 1), (n - 1, 0), (n - 1, n - 1)] {
        if b[(i, j)].norm() <= tiny {
            return Err(BjError::NotInForm(format!("entry ({}, {}) vanishes", i + 1, j + 1)));
        }
    }
    let s = svd(b)?;
    let s1 = s.sigma_max();
    let gap = s1 - s.singular_values[1] > DELTA_MARGIN * s1;
    let corner = |k: usize| (s.u(k)[0] * s.v(k)[0].conj()).norm() * s.singular_values[k];
    Ok(gap && corner(0) > DELTA_MARGIN * s1 && corner(1) > DELTA_MARGIN * s1)
}

/// Least-squares `μ` minimising `‖A - μB‖_F`, and the relative residual.
pub fn scalar_multiple_fit(a: &ComplexMatrix, b: &ComplexMatrix) -> (C64, f64) {
    let na = a.frobenius_norm();
    let nb2 = b.frobenius_inner(b).re;
    if nb2 == 0.0 {
        return (ZERO, if na == 0.0 { 0.0 } else { 1.0 });
    }
    let mu = b.frobenius_inner(a) / nb2;
    let res = (a - &b.scale(mu)).frobenius_norm();
    (mu, if na == 0.0 { res } else { res / na })
}

fn parallel(p: &[C64], q: &[C64], scale_p: f64, scale_q: f64) -> bool {
    let (np, nq) = (norm(p), norm(q));
    let zp = np <= 1e-10 * scale_p;
    let zq = nq <= 1e-10 * scale_q;
    if zp || zq {
        return zp == zq;
    }
    let cos = (dot(p, q).norm() / (np * nq)).min(1.0);
    (1.0 - cos * cos).max(0.0).sqrt() <= DELTA_MARGIN
}

/// Whether `Ay` and `By` are parallel (with matching vanishing) for every
/// probe `y`: the standard basis, the right singular vectors of both
/// matrices, and `trials` random unit vectors. For matrices this is
/// equivalent to `ℂA = ℂB`.
pub fn locally_dependent_equiv(a: &ComplexMatrix, b: &ComplexMatrix, trials: usize) -> Result<bool> {
    locally_dependent_equiv_with(a, b, trials, &mut rng_from_seed(0x10ca1))
}

pub fn locally_dependent_equiv_with<R: Rng + ?Sized>(a: &ComplexMatrix, b: &ComplexMatrix, trials: usize, rng: &mut R) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(BjError::ShapeMismatch(format!("{}x{} versus {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    let (na, nb) = (spectral_norm(a), spectral_norm(b));
    if na <= DELTA_ZERO || nb <= DELTA_ZERO {
        return Ok(na <= DELTA_ZERO && nb <= DELTA_ZERO);
    }
    let n = a.cols();
    let mut probes: Vec<Vec<C64>> = (0..n).map(|i| crate::linalg::basis_vector(n, i)).collect();
    for m in [a, b] {
        let s = svd(m)?;
        probes.extend((0..s.singular_values.len()).map(|k| s.v(k)));
    }
    for _ in 0..trials {
        probes.push(unit_vector(rng, n));
    }
    Ok(probes.iter().all(|y| parallel(&a.mul_vec(y), &b.mul_vec(y), na, nb)))
}

/// Right-symmetric elements of `M_n(ℂ)` are the scalar multiples of unitaries.
pub fn right_symmetric_check(a: &ComplexMatrix) -> Result<bool> {
    if !a.is_square() {
        return Err(BjError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let s1 = spectral_norm(a);
    if s1 <= DELTA_ZERO {
        return Err(BjError::ZeroMatrix { norm: s1 });
    }
    let g = &a.adjoint_mul(a).scale_real(1.0 / (s1 * s1)) - &ComplexMatrix::identity(a.rows());
    Ok(spectral_norm(&g) <= DELTA_MARGIN)
}

/// `W(xy*)` is the elliptic disc with foci `0` and `y*x` and minor axis
/// `√(‖x‖²‖y‖² - |y*x|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub focus1: C64,
    pub focus2: C64,
    /// Full length of the minor axis.
    pub minor_axis: f64,
}

impl Ellipse {
    pub fn center(&self) -> C64 {
        (self.focus1 + self.focus2) / 2.0
    }

    pub fn semi_minor(&self) -> f64 {
        self.minor_axis / 2.0
    }

    pub fn semi_major(&self) -> f64 {
        (self.minor_axis.powi(2) + (self.focus2 - self.focus1).norm_sqr()).sqrt() / 2.0
    }

    /// Support function `max Re(e^{-iθ} z)` over the disc.
    pub fn support(&self, theta: f64) -> f64 {
        let d = self.focus2 - self.focus1;
        let phi = if d.norm() > 0.0 { d.arg() } else { 0.0 };
        let (a, b) = (self.semi_major(), self.semi_minor());
        let t = theta - phi;
        (C64::from_polar(1.0, -theta) * self.center()).re + (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt()
    }
}

pub fn rank_one_ellipse(x: &[C64], y: &[C64]) -> Result<Ellipse> {
    if x.len() != y.len() {
        return Err(BjError::ShapeMismatch(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(BjError::ZeroVector);
    }
    let f = dot(y, x);
    let minor = ((nx * ny).powi(2) - f.norm_sqr()).max(0.0).sqrt();
    Ok(Ellipse { focus1: ZERO, focus2: f, minor_axis: minor })
}

/// Hausdorff distance between `W(xy*)` and the analytic ellipse, as the sup of
/// the support-function difference over `samples` angles.
pub fn ellipse_hausdorff(x: &[C64], y: &[C64], samples: usize) -> Result<f64> {
    let e = rank_one_ellipse(x, y)?;
    let m = ComplexMatrix::outer(x, y);
    let k = samples.max(8);
    Ok((0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            (support(&m, t) - e.support(t)).abs()
        })
        .fold(0.0, f64::max))
}

/// Angle in `[0, π/2]` between the lines `ℂx` and `ℂy`.
pub fn line_angle(x: &[C64], y: &[C64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(BjError::ShapeMismatch(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(BjError::ZeroVector);
    }
    Ok((dot(x, y).norm() / (nx * ny)).min(1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn first_row_space_membership_and_projection() {
        let v = OutgoingSpaceSpec::first_row_zeros(3, 2).unwrap();
        assert_eq!(v.constraints().len(), 2);
        assert!(v.contains(&ComplexMatrix::unit(3, 0, 0)));
        assert!(!v.contains(&ComplexMatrix::unit(3, 0, 2)));
        let g = ComplexMatrix::from_real_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]);
        let p = v.project(&g);
        assert!(v.residual(&p) < 1e-14);
        assert_eq!(p[(0, 0)], c(1.0, 0.0));
        assert_eq!(p[(1, 1)], c(5.0, 0.0));
    }

    #[test]
    fn e11_is_not_falsified_in_v2() {
        let v = OutgoingSpaceSpec::first_row_zeros(3, 2).unwrap();
        let r = left_symmetric_falsify(&ComplexMatrix::unit(3, 0, 0), &v, 200, 1).unwrap();
        assert_eq!(r.verdict, LeftSymmetryVerdict::NotFalsified);
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn rank_two_in_v3_is_falsified() {
        let v = OutgoingSpaceSpec::first_row_zeros(3, 3).unwrap();
        let a = ComplexMatrix::diag_real(&[1.0, 0.5, 0.0]);
        let r = left_symmetric_falsify(&a, &v, 200, 1).unwrap();
        assert_eq!(r.verdict, LeftSymmetryVerdict::Falsified);
        let b = r.counterexample.unwrap();
        assert!(v.contains(&b));
        assert_eq!(bj_orthogonal_criterion(&a, &b).unwrap().state, BjState::Orthogonal);
        assert_eq!(bj_orthogonal_criterion(&b, &a).unwrap().state, BjState::NotOrthogonal);
    }

    #[test]
    fn identity_in_full_algebra_is_falsified() {
        let r = left_symmetric_falsify(&ComplexMatrix::identity(2), &OutgoingSpaceSpec::full(2), 50, 3).unwrap();
        assert_eq!(r.verdict, LeftSymmetryVerdict::Falsified);
    }

    #[test]
    fn non_member_is_rejected() {
        let v = OutgoingSpaceSpec::first_row_zeros(3, 2).unwrap();
        assert!(matches!(left_symmetric_falsify(&ComplexMatrix::unit(3, 0, 1), &v, 10, 1), Err(BjError::NotMember { .. })));
    }

    #[test]
    fn bpm_first_singular_value_and_reconstruction() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let b = construct_bpm(h, h, 3, Sign::Plus).unwrap();
        assert!(b.reconstruction_error <= 1e-12);
        let s = svd(&b.matrix).unwrap();
        assert!((s.singular_values[0] - (1.0 + FRAC_1_SQRT_2).sqrt()).abs() < 1e-12);
        assert!((s.singular_values[1] - (1.0 - FRAC_1_SQRT_2).sqrt()).abs() < 1e-12);
        assert!(matches!(construct_bpm(c(1.0, 0.0), c(0.0, 0.0), 3, Sign::Plus), Err(BjError::DegenerateParams(_))));
    }

    #[test]
    fn bpm_verdict_chain() {
        // s_y = σ₂ c / |s|² makes the minus sign vanish and the plus sign not.
        let h = c(FRAC_1_SQRT_2, 0.0);
        let sigma2 = 0.5;
        let sy = h * sigma2 / h.norm_sqr();
        let cy = c((1.0 - sy.norm_sqr()).sqrt(), 0.0);
        let a = bpm_partner_matrix(3, sigma2, h, h, cy, sy);
        for (sign, nonzero) in [(Sign::Plus, true), (Sign::Minus, false)] {
            let b = construct_bpm(h, h, 3, sign).unwrap().matrix;
            assert_eq!(bj_orthogonal_criterion(&a, &b).unwrap().state, BjState::Orthogonal);
            let closed = bpm_inner_product(h, h, sigma2, sy, sign);
            let bb = construct_bpm(h, h, 3, sign).unwrap().claimed_svd.v(0);
            let direct = dot(&a.mul_vec(&bb), &b.mul_vec(&bb));
            assert!((closed - direct).norm() < 1e-12);
            assert_eq!(closed.norm() > 1e-9, nonzero);
            let back = bj_orthogonal_criterion(&b, &a).unwrap().state;
            assert_eq!(back == BjState::NotOrthogonal, nonzero);
        }
    }

    #[test]
    fn lastrow_examples() {
        assert!(lastrow_svd_check(&ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]])).unwrap());
        let b = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0]]);
        assert!(lastrow_svd_check(&b).unwrap());
        let bad = &ComplexMatrix::unit(2, 0, 1) + &ComplexMatrix::unit(2, 1, 0);
        assert!(matches!(lastrow_svd_check(&bad), Err(BjError::NotInForm(_))));
        assert!(matches!(lastrow_svd_check(&ComplexMatrix::identity(3)), Err(BjError::NotInForm(_))));
    }

    #[test]
    fn local_dependence_examples() {
        let a = ComplexMatrix::from_rows(&[[c(1.0, 2.0), c(0.0, 1.0)], [c(-1.0, 0.0), c(0.5, 0.5)]]);
        assert!(locally_dependent_equiv(&a, &a.scale(c(0.0, 3.0)), 20).unwrap());
        assert!(!locally_dependent_equiv(&ComplexMatrix::unit(2, 0, 0), &ComplexMatrix::identity(2), 20).unwrap());
        let e1 = basis_vector(2, 0);
        let r1 = ComplexMatrix::outer(&e1, &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(!locally_dependent_equiv(&r1, &ComplexMatrix::outer(&e1, &e1), 20).unwrap());
        let (mu, res) = scalar_multiple_fit(&a.scale(c(0.0, 3.0)), &a);
        assert!((mu - c(0.0, 3.0)).norm() < 1e-14 && res < 1e-15);
    }

    #[test]
    fn right_symmetry_examples() {
        assert!(right_symmetric_check(&ComplexMatrix::identity(2)).unwrap());
        assert!(!right_symmetric_check(&ComplexMatrix::diag_real(&[1.0, 0.5])).unwrap());
        let h = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, -1.0]]).scale_real(FRAC_1_SQRT_2);
        assert!(right_symmetric_check(&h).unwrap());
        assert!(matches!(right_symmetric_check(&ComplexMatrix::zeros(2, 2)), Err(BjError::ZeroMatrix { .. })));
    }

    #[test]
    fn ellipse_examples() {
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        let el = rank_one_ellipse(&e1, &e1).unwrap();
        assert_eq!((el.focus2, el.minor_axis), (c(1.0, 0.0), 0.0));
        let el = rank_one_ellipse(&e1, &e2).unwrap();
        assert_eq!((el.focus2, el.minor_axis), (c(0.0, 0.0), 1.0));
        assert!((el.semi_major() - 0.5).abs() < 1e-15);

        let x = [c(0.6, 0.0), c(0.8, 0.0)];
        let y = [c(5.0 / 13.0, 0.0), c(12.0 / 13.0, 0.0)];
        let el = rank_one_ellipse(&x, &y).unwrap();
        assert!((el.focus2 - c(63.0 / 65.0, 0.0)).norm() < 1e-15);
        assert!((el.minor_axis - (1.0 - (63.0f64 / 65.0).powi(2)).sqrt()).abs() < 1e-15);
        assert!(ellipse_hausdorff(&x, &y, 720).unwrap() < 1e-12);
        assert!(ellipse_hausdorff(&e1, &e2, 720).unwrap() < 1e-12);
    }

    #[test]
    fn angle_examples() {
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        assert_eq!(line_angle(&e1, &e1).unwrap(), 0.0);
        assert!((line_angle(&e1, &e2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let d = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        assert!((line_angle(&e1, &d).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(line_angle(&e1, &[c(0.0, 0.0); 2]).unwrap_err(), BjError::ZeroVector);
    }
}
