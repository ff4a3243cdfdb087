//! Birkhoff-James orthogonality oracles for single matrices.
//!
//! `A ⊥ B` means `‖A + λB‖ ≥ ‖A‖` for every complex `λ`. Two independent
//! deciders are provided: the criterion oracle, which checks whether some unit
//! `x` in the norm-attainment subspace `M₀(A)` satisfies `⟨Ax, Bx⟩ = 0`, and
//! the minimisation oracle, which minimises `‖A + λB‖` directly.

use std::fmt;

use crate::error::{BjError, Result};
use crate::linalg::eig::{eig_unchecked, max_eigenvalue_in_place};
use crate::linalg::matrix::{basis_vector, dot, norm, normalized, ComplexMatrix, C64};
use crate::linalg::numrange::{zero_in_numrange, zero_preimage, Membership};
use crate::linalg::svd::spectral_norm;
use crate::tol::{DELTA_MARGIN, DELTA_ZERO, EPS_RANK, FLAT_FLOOR, NOISE_FLOOR, NUMRANGE_GRID, NUMRANGE_REFINE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BjState {
    Orthogonal,
    NotOrthogonal,
    Borderline,
}

impl fmt::Display for BjState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BjState::Orthogonal => "Orthogonal",
            BjState::NotOrthogonal => "NotOrthogonal",
            BjState::Borderline => "Borderline",
        })
    }
}

/// Outcome of an orthogonality query.
///
/// The meaning of `margin` depends on the oracle: the criterion oracle reports
/// the signed distance of 0 from the compressed numerical range (negative
/// means outside), the minimisation oracle reports `(min ‖A+λB‖ - ‖A‖)/‖A‖`,
/// and [`rank_one_perp`] reports the normalised modulus `|x*Xy|`.
#[derive(Debug, Clone, PartialEq)]
pub struct BjVerdict {
    pub state: BjState,
    pub margin: f64,
    pub witness: Option<Vec<C64>>,
}

impl BjVerdict {
    pub fn is_orthogonal(&self) -> bool {
        self.state == BjState::Orthogonal
    }

    pub fn is_decisive(&self) -> bool {
        self.state != BjState::Borderline
    }

    /// Verdict for a pair where one side is zero.
    pub(crate) fn trivial(dim: usize) -> Self {
        BjVerdict { state: BjState::Orthogonal, margin: 0.0, witness: (dim > 0).then(|| basis_vector(dim, 0)) }
    }
}

/// Orthonormal basis of `M₀(A) = Ker(‖A‖² I - A*A)`.
#[derive(Debug, Clone)]
pub struct NormingSubspace {
    pub ambient_dim: usize,
    pub basis: ComplexMatrix,
    pub norm_value: f64,
}

impl NormingSubspace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|k| self.basis.column(k)).collect()
    }
}

/// Eigenvectors of `A*A` whose eigenvalues lie within a relative `eps_rank`
/// of the top one.
pub fn norm_attain_set(a: &ComplexMatrix, eps_rank: f64) -> Result<NormingSubspace> {
    if !a.is_finite() {
        return Err(BjError::NonFinite);
    }
    let g = a.adjoint_mul(a).hermitian_part();
    let e = eig_unchecked(&g);
    let top = e.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let norm_value = top.sqrt();
    if norm_value <= DELTA_ZERO {
        return Err(BjError::ZeroMatrix { norm: norm_value });
    }
    let cut = top * (1.0 - eps_rank);
    let cols: Vec<Vec<C64>> = (0..e.dim()).rev().filter(|&k| e.eigenvalues[k] >= cut).map(|k| e.vector(k)).collect();
    Ok(NormingSubspace { ambient_dim: a.cols(), basis: ComplexMatrix::from_columns(a.cols(), &cols), norm_value })
}

fn check_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(BjError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.shape() != b.shape() {
        return Err(BjError::ShapeMismatch(format!("{}x{} versus {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(BjError::NonFinite);
    }
    Ok(())
}

/// Maps the compression `C = P*(B*A)P` (built from unit-norm `A`, `B`) to a
/// verdict, lifting the numerical-range witness `y` to `x = Py`.
pub(crate) fn decide_compressed(c: &ComplexMatrix, p: &ComplexMatrix) -> BjVerdict {
    let nr = zero_in_numrange(c, NUMRANGE_GRID, NUMRANGE_REFINE).expect("compression is square");
    let state = match nr.contains_zero {
        Membership::Excludes => BjState::NotOrthogonal,
        Membership::Borderline => BjState::Borderline,
        Membership::Contains => BjState::Orthogonal,
    };
    if state != BjState::Orthogonal {
        return BjVerdict { state, margin: nr.margin, witness: None };
    }
    let witness = zero_preimage(c, NUMRANGE_GRID).and_then(|y| {
        let y = normalized(&y)?;
        let residual = c.sesquilinear(&y, &y).norm();
        if residual > DELTA_MARGIN {
            return None;
        }
        normalized(&p.mul_vec(&y))
    });
    match witness {
        Some(x) => BjVerdict { state, margin: nr.margin, witness: Some(x) },
        None => BjVerdict { state: BjState::Borderline, margin: nr.margin, witness: None },
    }
}

/// Criterion oracle: `A ⊥ B` iff `0 ∈ W(P*(B*A)P)` with `P` a basis of `M₀(A)`.
pub fn bj_orthogonal_criterion(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<BjVerdict> {
    check_pair(a, b)?;
    let na = spectral_norm(a);
    let nb = spectral_norm(b);
    if na <= DELTA_ZERO || nb <= DELTA_ZERO {
        return Ok(BjVerdict::trivial(a.cols()));
    }
    let a = a.scale_real(1.0 / na);
    let b = b.scale_real(1.0 / nb);
    let m0 = norm_attain_set(&a, EPS_RANK)?;
    let p = &m0.basis;
    let c = p.adjoint_mul(&b.adjoint_mul(&a).matmul(p));
    Ok(decide_compressed(&c, p))
}

/// Search parameters of the minimisation oracle.
#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Golden-section searches stop once the bracket is below `rel_tol` times
    /// the search radius.
    pub rel_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { rel_tol: 1e-10 }
    }
}

/// `λ ↦ ‖A + λB‖` evaluated through the Gram expansion
/// `(A+λB)*(A+λB) = A*A + λ A*B + conj(λ) B*A + |λ|² B*B`.
struct Pencil {
    n: usize,
    aa: Vec<C64>,
    ab: Vec<C64>,
    bb: Vec<C64>,
}

impl Pencil {
    fn new(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        Pencil {
            n: a.cols(),
            aa: a.adjoint_mul(a).as_slice().to_vec(),
            ab: a.adjoint_mul(b).as_slice().to_vec(),
            bb: b.adjoint_mul(b).as_slice().to_vec(),
        }
    }

    fn value(&self, lam: C64, buf: &mut [C64]) -> f64 {
        let n = self.n;
        let l2 = lam.norm_sqr();
        for i in 0..n {
            for j in 0..=i {
                let k = i * n + j;
                buf[k] = self.aa[k] + lam * self.ab[k] + (lam * self.ab[j * n + i]).conj() + self.bb[k] * l2;
            }
        }
        max_eigenvalue_in_place(n, buf).max(0.0).sqrt()
    }
}

/// Golden-section minimum of `f` on `[lo, hi]`, as `(argmin, min)`.
/// Exact up to `tol` for convex `f`.
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimises `λ ↦ ‖A + λB‖` over `|λ| ≤ 2‖A‖/‖B‖`, returning `(λ*, min)`.
///
/// Outside that disk `‖A + λB‖ ≥ |λ|‖B‖ - ‖A‖ > ‖A‖`, so the minimum over the
/// enclosing square is the global one. The function is convex on `ℝ²`, so
/// `x ↦ min_y f(x + iy)` is convex too and nested golden-section searches
/// find the minimum. `λ = 0` is kept as a candidate and the reported minimum
/// is re-evaluated directly.
pub fn minimize_pencil_norm(a: &ComplexMatrix, b: &ComplexMatrix, opts: MinimizeOptions) -> (C64, f64) {
    let na = spectral_norm(a);
    let nb = spectral_norm(b);
    if nb <= DELTA_ZERO {
        return (C64::new(0.0, 0.0), na);
    }
    let radius = 2.0 * na / nb;
    let tol = opts.rel_tol * radius;
    let pencil = Pencil::new(a, b);
    let mut buf = vec![C64::new(0.0, 0.0); pencil.n * pencil.n];
    let mut f = |lam: C64| pencil.value(lam, &mut buf);

    let (x, _) = golden_min(|x| golden_min(|y| f(C64::new(x, y)), -radius, radius, tol).1, -radius, radius, tol);
    let (y, _) = golden_min(|y| f(C64::new(x, y)), -radius, radius, tol);
    let lam = C64::new(x, y);
    let direct = spectral_norm(&(a + &b.scale(lam)));
    if direct < na {
        (lam, direct)
    } else {
        (C64::new(0.0, 0.0), na)
    }
}

/// Minimisation oracle with the default search parameters.
pub fn bj_orthogonal_minimize(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<BjVerdict> {
    bj_orthogonal_minimize_with(a, b, MinimizeOptions::default())
}

/// Minimisation oracle. The relative decrease is quadratic in the criterion
/// margin, hence the tighter noise floor.
pub fn bj_orthogonal_minimize_with(a: &ComplexMatrix, b: &ComplexMatrix, opts: MinimizeOptions) -> Result<BjVerdict> {
    check_pair(a, b)?;
    let na = spectral_norm(a);
    let nb = spectral_norm(b);
    if na <= DELTA_ZERO || nb <= DELTA_ZERO {
        return Ok(BjVerdict::trivial(a.cols()));
    }
    let a = a.scale_real(1.0 / na);
    let b = b.scale_real(1.0 / nb);
    let (_, fmin) = minimize_pencil_norm(&a, &b, opts);
    let margin = fmin - spectral_norm(&a);
    let state = if margin >= -FLAT_FLOOR {
        BjState::Orthogonal
    } else if margin <= -DELTA_MARGIN {
        BjState::NotOrthogonal
    } else {
        BjState::Borderline
    };
    Ok(BjVerdict { state, margin, witness: None })
}

/// Orthogonality of the rank-one `xy*` to `X`: `xy* ⊥ X` iff `x*Xy = 0`.
pub fn rank_one_perp(x: &[C64], y: &[C64], m: &ComplexMatrix) -> Result<BjVerdict> {
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(BjError::ZeroVector);
    }
    if x.len() != m.rows() || y.len() != m.cols() {
        return Err(BjError::ShapeMismatch(format!(
            "vectors of length {} and {} against a {}x{} matrix",
            x.len(),
            y.len(),
            m.rows(),
            m.cols()
        )));
    }
    let witness = Some(y.iter().map(|z| z / ny).collect());
    let nm = spectral_norm(m);
    if nm <= DELTA_ZERO {
        return Ok(BjVerdict { state: BjState::Orthogonal, margin: 0.0, witness });
    }
    let margin = m.sesquilinear(x, y).norm() / (nx * ny * nm);
    let state = if margin <= NOISE_FLOOR {
        BjState::Orthogonal
    } else if margin >= DELTA_MARGIN {
        BjState::NotOrthogonal
    } else {
        BjState::Borderline
    };
    Ok(BjVerdict { state, margin, witness: (state == BjState::Orthogonal).then_some(witness).flatten() })
}

/// Whether `x` certifies `A ⊥ B`: it lies in `M₀(A)` and `|⟨Ax, Bx⟩| ≤ δ ‖A‖‖B‖`.
pub fn witness_certifies(a: &ComplexMatrix, b: &ComplexMatrix, x: &[C64]) -> bool {
    let Some(x) = normalized(x) else { return false };
    let na = spectral_norm(a);
    let nb = spectral_norm(b);
    if na <= DELTA_ZERO || nb <= DELTA_ZERO {
        return true;
    }
    let ax = a.mul_vec(&x);
    let bx = b.mul_vec(&x);
    let attains = norm(&ax) >= na * (1.0 - 1e-8);
    attains && dot(&bx, &ax).norm() <= DELTA_MARGIN * na * nb
}
