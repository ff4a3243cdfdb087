//! Maps preserving BJ orthogonality: isometries of a direct sum of matrix
//! algebras, gauge-twisted isometries, two maps that preserve orthogonality
//! without being isometries up to scalars, and tools to test and dissect
//! such maps.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::bj::BjState;
use crate::cstar::{alg_norm_and_norming_blocks, bj_orthogonal_alg, central_gauge_check, AlgebraElement, AlgebraShape, CentralElement};
use crate::error::{BjError, Result};
use crate::geometry::scalar_multiple_fit;
use crate::linalg::matrix::{dot, ComplexMatrix, C64};
use crate::linalg::svd::svd;
use crate::random::{gaussian_vector, substream, unimodular, unitary, BjRng};
use crate::sampling::{element_with_norming_blocks, non_orthogonal_partner_alg, orthogonal_partner_alg, random_element};
use crate::tol::{DELTA_ZERO, EPS_RANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Identity,
    Adjoint,
    Conjugate,
    Transpose,
}

impl Flavor {
    pub const ALL: [Flavor; 4] = [Flavor::Identity, Flavor::Adjoint, Flavor::Conjugate, Flavor::Transpose];

    pub fn apply(self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Flavor::Identity => m.clone(),
            Flavor::Adjoint => m.adjoint(),
            Flavor::Conjugate => m.conj(),
            Flavor::Transpose => m.transpose(),
        }
    }

    pub fn is_conjugate_linear(self) -> bool {
        matches!(self, Flavor::Adjoint | Flavor::Conjugate)
    }

    /// Whether rows are sent to columns.
    pub fn swaps_rows(self) -> bool {
        matches!(self, Flavor::Adjoint | Flavor::Transpose)
    }

    fn from_parts(swaps_rows: bool, conjugate: bool) -> Self {
        match (swaps_rows, conjugate) {
            (false, false) => Flavor::Identity,
            (false, true) => Flavor::Conjugate,
            (true, false) => Flavor::Transpose,
            (true, true) => Flavor::Adjoint,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::Identity => "id",
            Flavor::Adjoint => "adjoint",
            Flavor::Conjugate => "conjugate",
            Flavor::Transpose => "transpose",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockIsometry {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub flavor: Flavor,
}

/// `Ψ(X)_{σ(k)} = U_k f_k(X_k) V_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometrySpec {
    shape: AlgebraShape,
    permutation: Vec<usize>,
    blocks: Vec<BlockIsometry>,
}

fn is_unitary(u: &ComplexMatrix) -> bool {
    u.is_square() && u.adjoint_mul(u).distance(&ComplexMatrix::identity(u.rows())) <= 1e-10
}

impl IsometrySpec {
    pub fn new(shape: AlgebraShape, permutation: Vec<usize>, blocks: Vec<BlockIsometry>) -> Result<Self> {
        let l = shape.num_blocks();
        if permutation.len() != l || blocks.len() != l {
            return Err(BjError::ShapeMismatch(format!("{l} blocks expected in shape {shape}")));
        }
        let mut seen = vec![false; l];
        for &t in &permutation {
            if t >= l || seen[t] {
                return Err(BjError::InvalidShape(format!("{permutation:?} is not a permutation")));
            }
            seen[t] = true;
        }
        let sizes = shape.block_sizes();
        for (k, &t) in permutation.iter().enumerate() {
            if sizes[k] != sizes[t] {
                return Err(BjError::SizeViolation(format!("block {k} of size {} sent to block {t} of size {}", sizes[k], sizes[t])));
            }
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.u.rows() != sizes[k] || b.v.rows() != sizes[k] {
                return Err(BjError::ShapeMismatch(format!("unitaries of block {k} must be {0}x{0}", sizes[k])));
            }
            if !is_unitary(&b.u) || !is_unitary(&b.v) {
                return Err(BjError::DegenerateParams(format!("unitaries of block {k} are not unitary")));
            }
        }
        Ok(IsometrySpec { shape, permutation, blocks })
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .block_sizes()
            .iter()
            .map(|&n| BlockIsometry { u: ComplexMatrix::identity(n), v: ComplexMatrix::identity(n), flavor: Flavor::Identity })
            .collect();
        IsometrySpec { shape: shape.clone(), permutation: (0..shape.num_blocks()).collect(), blocks }
    }

    /// Random spec with Haar unitaries, a random size-preserving permutation
    /// and flavors of a single parity (all linear or all conjugate-linear).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Self {
        let sizes = shape.block_sizes();
        let l = sizes.len();
        let mut permutation: Vec<usize> = (0..l).collect();
        for k in (1..l).rev() {
            let same: Vec<usize> = (0..=k).filter(|&j| sizes[j] == sizes[k]).collect();
            let j = same[rng.random_range(0..same.len())];
            permutation.swap(k, j);
        }
        let conjugate = rng.random_bool(0.5);
        let blocks = sizes
            .iter()
            .map(|&n| BlockIsometry { u: unitary(rng, n), v: unitary(rng, n), flavor: Flavor::from_parts(rng.random_bool(0.5), conjugate) })
            .collect();
        IsometrySpec { shape: shape.clone(), permutation, blocks }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn blocks(&self) -> &[BlockIsometry] {
        &self.blocks
    }

    /// Whether all blocks are linear or all are conjugate-linear. Mixed parity
    /// still gives a real-linear isometry but not an orthogonality preserver.
    pub fn is_parity_uniform(&self) -> bool {
        let first = self.blocks.first().map(|b| b.flavor.is_conjugate_linear());
        self.blocks.iter().all(|b| Some(b.flavor.is_conjugate_linear()) == first)
    }

    pub fn inverse_apply(&self, y: &AlgebraElement) -> Result<AlgebraElement> {
        if *y.shape() != self.shape {
            return Err(BjError::ShapeMismatch(format!("element {} versus spec {}", y.shape(), self.shape)));
        }
        let blocks = (0..self.blocks.len())
            .map(|k| {
                let b = &self.blocks[k];
                b.flavor.apply(&b.u.adjoint_mul(&y.block(self.permutation[k]).matmul(&b.v)))
            })
            .collect();
        AlgebraElement::new(self.shape.clone(), blocks)
    }
}

pub fn apply_isometry(spec: &IsometrySpec, x: &AlgebraElement) -> Result<AlgebraElement> {
    if *x.shape() != spec.shape {
        return Err(BjError::ShapeMismatch(format!("element {} versus spec {}", x.shape(), spec.shape)));
    }
    let mut out: Vec<Option<ComplexMatrix>> = vec![None; spec.blocks.len()];
    for (k, b) in spec.blocks.iter().enumerate() {
        out[spec.permutation[k]] = Some(b.u.matmul(&b.flavor.apply(x.block(k)).matmul(&b.v.adjoint())));
    }
    AlgebraElement::new(spec.shape.clone(), out.into_iter().map(|b| b.expect("permutation is onto")).collect())
}

pub type ElementFn = Arc<dyn Fn(&AlgebraElement) -> Result<AlgebraElement> + Send + Sync>;
pub type GammaFn = Arc<dyn Fn(&AlgebraElement) -> C64 + Send + Sync>;
pub type CentralFn = Arc<dyn Fn(&AlgebraElement) -> CentralElement + Send + Sync>;
pub type ProbeFn = Arc<dyn Fn(&mut BjRng) -> AlgebraElement + Send + Sync>;

/// The pair `γ: 𝒜 → 𝕋`, `P: 𝒜 → Z(𝒜)` of a gauge-twisted isometry, with an
/// optional inverse of `X ↦ γ(X)P(X)X`.
#[derive(Clone)]
pub struct GaugeSpec {
    gamma: GammaFn,
    p: CentralFn,
    undo: Option<ElementFn>,
}

impl fmt::Debug for GaugeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeSpec").field("invertible", &self.undo.is_some()).finish()
    }
}

impl GaugeSpec {
    pub fn new(gamma: GammaFn, p: CentralFn) -> Self {
        GaugeSpec { gamma, p, undo: None }
    }

    pub fn with_inverse(mut self, undo: ElementFn) -> Self {
        self.undo = Some(undo);
        self
    }

    /// `γ ≡ 1`, `P ≡ I`.
    pub fn trivial() -> Self {
        GaugeSpec::new(Arc::new(|_| C64::new(1.0, 0.0)), Arc::new(|x| CentralElement::identity(x.shape())))
            .with_inverse(Arc::new(|x| Ok(x.clone())))
    }

    /// Constant `γ` and `P`.
    pub fn constant(gamma: C64, p: CentralElement) -> Self {
        let pi = p.clone();
        let inv = CentralElement::new(p.shape().clone(), p.scalars().iter().map(|z| 1.0 / z).collect());
        GaugeSpec::new(Arc::new(move |_| gamma), Arc::new(move |_| pi.clone())).with_inverse(Arc::new(move |z| {
            let inv = inv.clone()?;
            Ok(inv.apply(z)?.scale(gamma.conj()))
        }))
    }

    /// Random invertible gauge on `shape`. The phase is a sawtooth in `‖X‖`,
    /// so `γ` is discontinuous. On a block that does not attain the norm,
    /// `p_k = r^{a_k - 1}` with `r = ‖X_k‖/‖X‖`, which maps `r` to `r^{a_k}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Self {
        let c0 = rng.random_range(0.0..TAU);
        let c1 = rng.random_range(0.5..5.0);
        let exps: Vec<f64> = (0..shape.num_blocks()).map(|_| rng.random_range(0.5..3.0)).collect();
        let phase = move |norm: f64| C64::from_polar(1.0, c0 + TAU * (c1 * norm).fract());
        let exps_fwd = exps.clone();
        let p = move |x: &AlgebraElement| {
            let (top, norming) = alg_norm_and_norming_blocks(x, EPS_RANK);
            let scalars: Vec<f64> = x
                .block_norms()
                .iter()
                .enumerate()
                .map(
                    |(k, &nk)| {
                        if norming.contains(&k) || nk <= DELTA_ZERO * top.max(1.0) {
                            1.0
                        } else {
                            (nk / top).powf(exps_fwd[k] - 1.0)
                        }
                    },
                )
                .collect();
            CentralElement::from_real(x.shape().clone(), &scalars).expect("one scalar per block")
        };
        let undo = move |z: &AlgebraElement| {
            let (top, norming) = alg_norm_and_norming_blocks(z, EPS_RANK);
            let w = z.scale(phase(top).conj());
            Ok(w.map_blocks(|k, b| {
                let s = crate::linalg::spectral_norm(b);
                if norming.contains(&k) || s <= DELTA_ZERO * top.max(1.0) {
                    b.clone()
                } else {
                    let r = (s / top).powf(1.0 / exps[k]);
                    b.scale_real(1.0 / r.powf(exps[k] - 1.0))
                }
            }))
        };
        GaugeSpec::new(Arc::new(move |x| phase(x.norm())), Arc::new(p)).with_inverse(Arc::new(undo))
    }

    pub fn gamma(&self, x: &AlgebraElement) -> C64 {
        (self.gamma)(x)
    }

    pub fn p(&self, x: &AlgebraElement) -> CentralElement {
        (self.p)(x)
    }

    /// `γ(X)P(X)X`, after checking the gauge invariants at `X`.
    pub fn gauge(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let g = self.gamma(x);
        if (g.norm() - 1.0).abs() > 1e-12 {
            return Err(BjError::GaugeViolation(format!("|γ(X)| = {}", g.norm())));
        }
        let p = self.p(x);
        if !p.is_positive_definite() {
            return Err(BjError::GaugeViolation(format!("P(X) = {:?} is not positive", p.scalars())));
        }
        if !central_gauge_check(x, &p)? {
            return Err(BjError::GaugeViolation(format!("P(X) = {:?} moves the norming blocks", p.scalars())));
        }
        Ok(p.apply(x)?.scale(g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Isometry,
    TheoremForm,
    GaugeCounterexample,
    AbelianCounterexample,
    Custom,
}

/// A map on the elements of one algebra shape. `probe` samples points where
/// the map does something unusual, so that tests can aim at them.
#[derive(Clone)]
pub struct BjMap {
    pub kind: MapKind,
    shape: AlgebraShape,
    forward: ElementFn,
    inverse: Option<ElementFn>,
    probe: Option<ProbeFn>,
}

impl fmt::Debug for BjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BjMap").field("kind", &self.kind).field("shape", &self.shape).finish()
    }
}

impl BjMap {
    pub fn custom(shape: AlgebraShape, f: ElementFn) -> Self {
        BjMap { kind: MapKind::Custom, shape, forward: f, inverse: None, probe: None }
    }

    pub fn with_inverse(mut self, inverse: ElementFn) -> Self {
        self.inverse = Some(inverse);
        self
    }

    pub fn with_probe(mut self, probe: ProbeFn) -> Self {
        self.probe = Some(probe);
        self
    }

    pub fn isometry(spec: IsometrySpec) -> Self {
        let shape = spec.shape().clone();
        let fwd = spec.clone();
        BjMap {
            kind: MapKind::Isometry,
            shape,
            forward: Arc::new(move |x| apply_isometry(&fwd, x)),
            inverse: Some(Arc::new(move |y| spec.inverse_apply(y))),
            probe: None,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if *x.shape() != self.shape {
            return Err(BjError::ShapeMismatch(format!("element {} versus map on {}", x.shape(), self.shape)));
        }
        (self.forward)(x)
    }

    pub fn apply_inverse(&self, y: &AlgebraElement) -> Option<Result<AlgebraElement>> {
        self.inverse.as_ref().map(|f| f(y))
    }

    pub fn probe(&self, rng: &mut BjRng) -> Option<AlgebraElement> {
        self.probe.as_ref().map(|p| p(rng))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &BjMap) -> Result<BjMap> {
        if self.shape != other.shape {
            return Err(BjError::ShapeMismatch(format!("maps on {} and {}", self.shape, other.shape)));
        }
        let (f, g) = (self.forward.clone(), other.forward.clone());
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(fi), Some(gi)) => {
                let (fi, gi) = (fi.clone(), gi.clone());
                Some(Arc::new(move |y: &AlgebraElement| fi(&gi(y)?)) as ElementFn)
            }
            _ => None,
        };
        let kind = if self.kind == MapKind::Isometry && other.kind == MapKind::Isometry { MapKind::Isometry } else { MapKind::Custom };
        Ok(BjMap { kind, shape: self.shape.clone(), forward: Arc::new(move |x| g(&f(x)?)), inverse, probe: None })
    }
}

/// `Φ(X) = Ψ(γ(X)P(X)X)`. Gauge invariants are checked at every evaluation.
pub fn build_theorem_map(psi: &IsometrySpec, gauge: &GaugeSpec) -> BjMap {
    let (fwd_psi, fwd_gauge) = (psi.clone(), gauge.clone());
    let forward: ElementFn = Arc::new(move |x| apply_isometry(&fwd_psi, &fwd_gauge.gauge(x)?));
    let inverse = gauge.undo.clone().map(|undo| {
        let psi = psi.clone();
        Arc::new(move |y: &AlgebraElement| undo(&psi.inverse_apply(y)?)) as ElementFn
    });
    BjMap { kind: MapKind::TheoremForm, shape: psi.shape().clone(), forward, inverse, probe: None }
}

/// A bijection of the open interval `(0, 1)` with its inverse.
#[derive(Clone)]
pub struct IntervalBijection {
    pub forward: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub inverse: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl IntervalBijection {
    pub fn identity() -> Self {
        IntervalBijection { forward: Arc::new(|r| r), inverse: Arc::new(|r| r) }
    }

    /// `r ↦ r^e` for `e > 0`.
    pub fn power(e: f64) -> Self {
        IntervalBijection { forward: Arc::new(move |r| r.powf(e)), inverse: Arc::new(move |r| r.powf(1.0 / e)) }
    }
}

/// `r` if `x = I ⊕ rI` with `r ∈ (0, 1)` up to `1e-12` entrywise.
pub fn identity_plus_scalar_parameter(x: &AlgebraElement) -> Option<f64> {
    if x.shape().num_blocks() != 2 {
        return None;
    }
    let tol = 1e-12;
    let (b1, b2) = (x.block(0), x.block(1));
    if b1.distance(&ComplexMatrix::identity(b1.rows())) > tol {
        return None;
    }
    let r = b2[(0, 0)];
    if r.im.abs() > tol || !(r.re > 0.0 && r.re < 1.0) {
        return None;
    }
    let rr = C64::new(r.re, 0.0);
    if b2.distance(&ComplexMatrix::identity(b2.rows()).scale(rr)) > tol {
        return None;
    }
    Some(r.re)
}

fn identity_plus_scalar(shape: &AlgebraShape, r: f64) -> AlgebraElement {
    let s = shape.block_sizes();
    AlgebraElement::new(shape.clone(), vec![ComplexMatrix::identity(s[0]), ComplexMatrix::identity(s[1]).scale_real(r)])
        .expect("shape has two blocks")
}

/// The map fixing everything except `I ⊕ rI`, `r ∈ (0,1)`, which goes to
/// `I ⊕ γ(r)I`.
pub fn counterexample_gauge_map(n1: usize, n2: usize, gamma: IntervalBijection) -> Result<BjMap> {
    if n1.min(n2) < 2 {
        return Err(BjError::InvalidShape(format!("blocks ({n1}, {n2}) must both have size at least 2")));
    }
    let shape = AlgebraShape::new(vec![n1, n2])?;
    let twist = |f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, shape: AlgebraShape| -> ElementFn {
        Arc::new(move |x: &AlgebraElement| {
            Ok(match identity_plus_scalar_parameter(x) {
                Some(r) => identity_plus_scalar(&shape, f(r)),
                None => x.clone(),
            })
        })
    };
    let probe_shape = shape.clone();
    Ok(BjMap {
        kind: MapKind::GaugeCounterexample,
        forward: twist(gamma.forward, shape.clone()),
        inverse: Some(twist(gamma.inverse, shape.clone())),
        probe: Some(Arc::new(move |rng| identity_plus_scalar(&probe_shape, rng.random_range(0.01..0.99)))),
        shape,
    })
}

/// Whether `x = t(1, ri)` for some nonzero `t ∈ ℂ` and real `r ≠ 0`, i.e.
/// `x₂/x₁` is purely imaginary, up to a relative `1e-12`.
pub fn on_abelian_exceptional_set(x: &AlgebraElement) -> bool {
    if x.shape().block_sizes() != [1, 1] {
        return false;
    }
    let (a, b) = (x.block(0)[(0, 0)], x.block(1)[(0, 0)]);
    let scale = a.norm() * b.norm();
    scale > 0.0 && (b * a.conj()).re.abs() <= 1e-12 * scale
}

/// On `ℂ ⊕ ℂ`: `Φ(X) = (1, -1)X` on the complex lines through `(1, ri)`,
/// every other element fixed. The map is an involution.
pub fn counterexample_abelian_map() -> BjMap {
    let shape = AlgebraShape::new(vec![1, 1]).expect("valid shape");
    let f: ElementFn = Arc::new(|x: &AlgebraElement| {
        Ok(if on_abelian_exceptional_set(x) { x.map_blocks(|k, b| if k == 1 { b.scale_real(-1.0) } else { b.clone() }) } else { x.clone() })
    });
    let probe_shape = shape.clone();
    BjMap {
        kind: MapKind::AbelianCounterexample,
        forward: f.clone(),
        inverse: Some(f),
        probe: Some(Arc::new(move |rng| {
            let r = match rng.random_range(0..3) {
                0 => 1.0,
                1 => -1.0,
                _ => rng.random_range(-2.0..2.0),
            };
            let t = if rng.random_bool(0.5) { C64::new(1.0, 0.0) } else { crate::random::gaussian(rng) };
            let blocks =
                vec![ComplexMatrix::from_vec(1, 1, vec![t]).unwrap(), ComplexMatrix::from_vec(1, 1, vec![t * C64::new(0.0, r)]).unwrap()];
            AlgebraElement::new(probe_shape.clone(), blocks).unwrap()
        })),
        shape,
    }
}

/// `min_c ‖Y - cX‖_F / ‖Y‖_F`: how far `Y` is from the line through `X`.
pub fn scalar_fit_residual(y: &AlgebraElement, x: &AlgebraElement) -> f64 {
    scalar_multiple_fit(&y.embed(), &x.embed()).1
}

#[derive(Debug, Clone)]
pub struct PreservationReport {
    pub pairs: usize,
    pub violations: usize,
    pub borderline: usize,
    /// Evaluations where the map itself failed (e.g. a gauge violation).
    pub map_errors: usize,
    /// First violating pair, if any.
    pub first_violation: Option<(AlgebraElement, AlgebraElement)>,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.map_errors == 0
    }

    pub fn borderline_rate(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.borderline as f64 / self.pairs as f64
        }
    }
}

enum PairOutcome {
    Agree,
    Violation(AlgebraElement, AlgebraElement),
    Borderline,
    MapError,
}

/// `xy* ⊕ 0` in a random block together with `X` satisfying `x*X_k y = 0`.
fn rank_one_orthogonal_pair<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> (AlgebraElement, AlgebraElement) {
    let k = rng.random_range(0..shape.num_blocks());
    let n = shape.block_sizes()[k];
    let x = gaussian_vector(rng, n);
    let y = gaussian_vector(rng, n);
    let a = AlgebraElement::zeros(shape).map_blocks(|j, z| if j == k { ComplexMatrix::outer(&x, &y) } else { z.clone() });
    let b = random_element(rng, shape).map_blocks(|j, m| {
        if j != k {
            return m.clone();
        }
        let t = m.sesquilinear(&x, &y) / (dot(&x, &x).re * dot(&y, &y).re);
        m - &ComplexMatrix::outer(&x, &y).scale(t)
    });
    (a, b)
}

fn sample_pair(map: &BjMap, shape: &AlgebraShape, i: usize, rng: &mut BjRng) -> (AlgebraElement, AlgebraElement) {
    let l = shape.num_blocks();
    match i % 5 {
        0 => (random_element(rng, shape), random_element(rng, shape)),
        1 => rank_one_orthogonal_pair(rng, shape),
        2 => {
            let norming = rng.random_range(1..=l);
            let a = element_with_norming_blocks(rng, shape, norming);
            let b = orthogonal_partner_alg(rng, &a);
            (a, b)
        }
        3 => {
            let a = random_element(rng, shape);
            let b = non_orthogonal_partner_alg(rng, &a);
            (a, b)
        }
        _ => match map.probe(rng) {
            Some(p) => match rng.random_range(0..4) {
                0 => {
                    let q = map.probe(rng).expect("probe present");
                    (p, q)
                }
                1 => {
                    let b = orthogonal_partner_alg(rng, &p);
                    (p, b)
                }
                2 => {
                    let a = random_element(rng, shape);
                    (a, p)
                }
                _ => {
                    let b = p.clone();
                    let a = orthogonal_partner_alg(rng, &b);
                    (b.scale(unimodular(rng)), a)
                }
            },
            None => {
                let a = element_with_norming_blocks(rng, shape, 1);
                let b = orthogonal_partner_alg(rng, &a);
                (b, a)
            }
        },
    }
}

fn check_pair(map: &BjMap, a: &AlgebraElement, b: &AlgebraElement) -> PairOutcome {
    let (Ok(fa), Ok(fb)) = (map.apply(a), map.apply(b)) else { return PairOutcome::MapError };
    let (Ok(before), Ok(after)) = (bj_orthogonal_alg(a, b), bj_orthogonal_alg(&fa, &fb)) else { return PairOutcome::MapError };
    if before.state == BjState::Borderline || after.state == BjState::Borderline {
        PairOutcome::Borderline
    } else if before.state == after.state {
        PairOutcome::Agree
    } else {
        PairOutcome::Violation(a.clone(), b.clone())
    }
}

/// Samples `n_pairs` pairs and counts those where `A ⊥ B` and `Φ(A) ⊥ Φ(B)`
/// disagree. The mix cycles through uniform pairs, rank-one orthogonal pairs,
/// engineered orthogonal and non-orthogonal pairs, and pairs built from the
/// map's probe points. Pair `i` uses its own substream of `seed`.
pub fn strong_preservation_test(map: &BjMap, shape: &AlgebraShape, n_pairs: usize, seed: u64) -> PreservationReport {
    let outcomes: Vec<PairOutcome> = (0..n_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let (a, b) = sample_pair(map, shape, i, &mut rng);
            check_pair(map, &a, &b)
        })
        .collect();
    let mut report = PreservationReport { pairs: n_pairs, violations: 0, borderline: 0, map_errors: 0, first_violation: None };
    for o in outcomes {
        match o {
            PairOutcome::Agree => {}
            PairOutcome::Borderline => report.borderline += 1,
            PairOutcome::MapError => report.map_errors += 1,
            PairOutcome::Violation(a, b) => {
                report.violations += 1;
                report.first_violation.get_or_insert((a, b));
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlavor {
    RowPreserving,
    RowToColumn,
}

#[derive(Debug, Clone)]
pub struct RankOneStructure {
    pub row_flavor: RowFlavor,
    /// Row behaviour combined with linearity detected on random rank-one probes.
    pub flavor: Flavor,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    /// Largest relative distance from `Φ(P)` to the line through the fitted
    /// model over all probes `P`.
    pub residual: f64,
}

const RANK_ONE_PROBES: usize = 8;

fn rank_one_image(map: &BjMap, m: ComplexMatrix) -> Result<ComplexMatrix> {
    let y = map.apply(&AlgebraElement::from_matrix(m)?)?;
    if y.shape().num_blocks() != 1 {
        return Err(BjError::NotRankOnePreserving("image is not a single block".into()));
    }
    let y = y.into_blocks().remove(0);
    let s = svd(&y)?;
    let s1 = s.sigma_max();
    if s1 <= DELTA_ZERO || s.singular_values.get(1).is_some_and(|&s2| s2 > 1e-8 * s1) {
        return Err(BjError::NotRankOnePreserving(format!("image has singular values {:?}", s.singular_values)));
    }
    Ok(y)
}

fn top_vectors(m: &ComplexMatrix) -> (Vec<C64>, Vec<C64>) {
    let s = svd(m).expect("finite image");
    (s.u(0), s.v(0))
}

fn parallel(a: &[C64], b: &[C64]) -> bool {
    dot(a, b).norm() > 1.0 - 1e-8
}

/// Reads off `U`, `V` and the flavor of a map on `M_n`, `n ≥ 3`, that sends
/// rank-ones to rank-ones, from its values on the matrix units and on random
/// rank-one probes. `U`, `V` are determined up to a common phase.
pub fn recover_rank_one_structure(map: &BjMap, seed: u64) -> Result<RankOneStructure> {
    let sizes = map.shape().block_sizes();
    if sizes.len() != 1 || sizes[0] < 3 {
        return Err(BjError::InvalidShape(format!("need M_n with n ≥ 3, got {}", map.shape())));
    }
    let n = sizes[0];
    let mut images = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            images.push(rank_one_image(map, ComplexMatrix::unit(n, i, j))?);
        }
    }
    let mut rng = substream(seed, 0);
    let probes: Vec<ComplexMatrix> =
        (0..RANK_ONE_PROBES).map(|_| ComplexMatrix::outer(&gaussian_vector(&mut rng, n), &gaussian_vector(&mut rng, n))).collect();
    let probe_images = probes.iter().map(|p| rank_one_image(map, p.clone())).collect::<Result<Vec<_>>>()?;

    let (l11, r11) = top_vectors(&images[0]);
    let (l12, r12) = top_vectors(&images[1]);
    let row_flavor = match (parallel(&l11, &l12), parallel(&r11, &r12)) {
        (true, false) => RowFlavor::RowPreserving,
        (false, true) => RowFlavor::RowToColumn,
        _ => return Err(BjError::NotRankOnePreserving("first row is not sent to a row or a column".into())),
    };
    let f = |i: usize, j: usize| match row_flavor {
        RowFlavor::RowPreserving => &images[i * n + j],
        RowFlavor::RowToColumn => &images[j * n + i],
    };
    let v1 = top_vectors(f(0, 0)).1;
    let us: Vec<Vec<C64>> = (0..n).map(|i| crate::linalg::normalized(&f(i, 0).mul_vec(&v1)).unwrap()).collect();
    let vs: Vec<Vec<C64>> = (0..n).map(|j| crate::linalg::normalized(&f(0, j).adjoint().mul_vec(&us[0])).unwrap()).collect();
    let u = ComplexMatrix::from_columns(n, &us);
    let v = ComplexMatrix::from_columns(n, &vs);

    let mut residual: f64 = 0.0;
    for (i, ui) in us.iter().enumerate() {
        for (j, vj) in vs.iter().enumerate() {
            residual = residual.max(scalar_multiple_fit(f(i, j), &ComplexMatrix::outer(ui, vj)).1);
        }
    }
    let swaps = row_flavor == RowFlavor::RowToColumn;
    let model = |flavor: Flavor, p: &ComplexMatrix| u.matmul(&flavor.apply(p)).matmul(&v.adjoint());
    let fit =
        |flavor: Flavor| probes.iter().zip(&probe_images).map(|(p, y)| scalar_multiple_fit(y, &model(flavor, p)).1).fold(0.0, f64::max);
    let (lin, conj) = (fit(Flavor::from_parts(swaps, false)), fit(Flavor::from_parts(swaps, true)));
    let conjugate = conj < lin;
    residual = residual.max(lin.min(conj));
    if residual > 1e-6 {
        return Err(BjError::AmbiguousFit { residual });
    }
    Ok(RankOneStructure { row_flavor, flavor: Flavor::from_parts(swaps, conjugate), u, v, residual })
}

/// `max ‖U_fit - U D‖` over the best diagonal phase `D` (and likewise for
/// `V`, with the same `D` up to the common phase).
pub fn phase_gauge_residual(fit: &ComplexMatrix, truth: &ComplexMatrix) -> f64 {
    let n = fit.cols();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let (a, b) = (fit.column(j), truth.column(j));
        let ph = dot(&b, &a);
        let ph = if ph.norm() > 0.0 { ph / ph.norm() } else { C64::new(1.0, 0.0) };
        let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y * ph).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(d);
    }
    worst
}
