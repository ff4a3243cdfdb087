//! Finite-dimensional C*-algebras `⊕ M_{n_k}(ℂ)` under the spectral norm.
//!
//! Elements are block lists. The norm of a direct sum is the largest block
//! norm, and orthogonality only sees the blocks where that maximum is
//! attained.

use std::fmt;

use crate::bj::{decide_compressed, BjVerdict};
use crate::error::{BjError, Result};
use crate::linalg::eig::eig_unchecked;
use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};
use crate::linalg::svd::spectral_norm;
use crate::tol::{DELTA_ZERO, EPS_RANK};

/// Block sizes `(n_1, ..., n_l)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape(Vec<usize>);

impl AlgebraShape {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(BjError::InvalidShape("an algebra needs at least one block".into()));
        }
        if block_sizes.contains(&0) {
            return Err(BjError::InvalidShape(format!("zero-sized block in {block_sizes:?}")));
        }
        Ok(AlgebraShape(block_sizes))
    }

    /// The simple algebra `M_n(ℂ)`.
    pub fn simple(n: usize) -> Self {
        AlgebraShape(vec![n.max(1)])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().sum()
    }

    /// Row/column offset of each block inside the embedding `M_N(ℂ)`.
    pub fn offsets(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect()
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `A = A_1 ⊕ ... ⊕ A_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(shape: AlgebraShape, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(BjError::ShapeMismatch(format!("{} blocks for shape {shape}", blocks.len())));
        }
        for (k, (b, &n)) in blocks.iter().zip(shape.block_sizes()).enumerate() {
            if b.shape() != (n, n) {
                return Err(BjError::ShapeMismatch(format!(
                    "block {} is {}x{}, shape {shape} requires {n}x{n}",
                    k + 1,
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(BjError::NonFinite);
            }
        }
        Ok(AlgebraElement { shape, blocks })
    }

    /// Builds an element from square blocks, inferring the shape.
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let sizes = blocks.iter().map(|b| b.rows()).collect();
        Self::new(AlgebraShape::new(sizes)?, blocks)
    }

    /// A single matrix viewed as an element of `M_n(ℂ)`.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(BjError::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        Self::from_blocks(vec![m])
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_sizes().iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        AlgebraElement { shape: shape.clone(), blocks }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_sizes().iter().map(|&n| ComplexMatrix::identity(n)).collect();
        AlgebraElement { shape: shape.clone(), blocks }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &ComplexMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix> {
        self.blocks
    }

    /// Block-diagonal matrix in `M_N(ℂ)`.
    pub fn embed(&self) -> ComplexMatrix {
        ComplexMatrix::direct_sum(&self.blocks)
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(spectral_norm).collect()
    }

    pub fn norm(&self) -> f64 {
        self.block_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.norm() <= DELTA_ZERO
    }

    pub fn map_blocks<F: FnMut(usize, &ComplexMatrix) -> ComplexMatrix>(&self, mut f: F) -> Self {
        let blocks = self.blocks.iter().enumerate().map(|(k, b)| f(k, b)).collect();
        AlgebraElement { shape: self.shape.clone(), blocks }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_blocks(|_, b| b.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map_blocks(|_, b| b.scale_real(s))
    }

    fn zip_with<F: Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix>(&self, other: &Self, f: F) -> Result<Self> {
        self.require_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(AlgebraElement { shape: self.shape.clone(), blocks })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.matmul(b))
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|_, b| b.adjoint())
    }

    /// Spectral-norm distance `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(BjError::ShapeMismatch(format!("{} versus {}", self.shape, other.shape)));
        }
        Ok(())
    }
}

/// Central element `⊕ c_k I_{n_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralElement {
    shape: AlgebraShape,
    scalars: Vec<C64>,
}

impl CentralElement {
    pub fn new(shape: AlgebraShape, scalars: Vec<C64>) -> Result<Self> {
        if scalars.len() != shape.num_blocks() {
            return Err(BjError::ShapeMismatch(format!("{} scalars for shape {shape}", scalars.len())));
        }
        Ok(CentralElement { shape, scalars })
    }

    pub fn from_real(shape: AlgebraShape, scalars: &[f64]) -> Result<Self> {
        Self::new(shape, scalars.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        CentralElement { shape: shape.clone(), scalars: vec![C64::new(1.0, 0.0); shape.num_blocks()] }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn scalars(&self) -> &[C64] {
        &self.scalars
    }

    pub fn is_positive_definite(&self) -> bool {
        self.scalars.iter().all(|z| z.im == 0.0 && z.re > 0.0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.scalars.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12)
    }

    /// Blockwise product `(P·A)_k = p_k A_k`.
    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if self.shape != *a.shape() {
            return Err(BjError::ShapeMismatch(format!("central {} versus element {}", self.shape, a.shape())));
        }
        Ok(a.map_blocks(|k, b| b.scale(self.scalars[k])))
    }

    pub fn to_element(&self) -> AlgebraElement {
        let blocks = self.shape.block_sizes().iter().zip(&self.scalars).map(|(&n, &c)| ComplexMatrix::identity(n).scale(c)).collect();
        AlgebraElement { shape: self.shape.clone(), blocks }
    }
}

/// `‖A‖` and the indices (zero-based) of the blocks attaining it up to a
/// relative `eps_rank`.
pub fn alg_norm_and_norming_blocks(a: &AlgebraElement, eps_rank: f64) -> (f64, Vec<usize>) {
    let norms = a.block_norms();
    let top = norms.iter().copied().fold(0.0, f64::max);
    if top <= DELTA_ZERO {
        return (top, Vec::new());
    }
    let blocks = norms.iter().enumerate().filter(|(_, &n)| n >= top * (1.0 - eps_rank)).map(|(k, _)| k).collect();
    (top, blocks)
}

/// Orthonormal basis of `M₀(A) ⊆ ℂᴺ`, assembled from the norming blocks.
#[derive(Debug, Clone)]
pub struct JointNormingSubspace {
    pub basis: ComplexMatrix,
    /// Block index of each basis column.
    pub tags: Vec<usize>,
    pub norm_value: f64,
}

impl JointNormingSubspace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Basis vectors restricted to block `k`, in block coordinates.
    pub fn block_vectors(&self, shape: &AlgebraShape, k: usize) -> Vec<Vec<C64>> {
        let off = shape.offsets()[k];
        let n = shape.block_sizes()[k];
        self.tags.iter().enumerate().filter(|(_, &t)| t == k).map(|(c, _)| self.basis.column(c)[off..off + n].to_vec()).collect()
    }
}

pub fn joint_norming_subspace(a: &AlgebraElement, eps_rank: f64) -> Result<JointNormingSubspace> {
    let (top, norming) = alg_norm_and_norming_blocks(a, eps_rank);
    if norming.is_empty() {
        return Err(BjError::ZeroElement);
    }
    let shape = a.shape();
    let offsets = shape.offsets();
    let big_n = shape.total_dim();
    let cut = (top * (1.0 - eps_rank)).powi(2);
    let mut cols = Vec::new();
    let mut tags = Vec::new();
    for &k in &norming {
        let b = a.block(k);
        let e = eig_unchecked(&b.adjoint_mul(b).hermitian_part());
        for idx in (0..e.dim()).rev() {
            if e.eigenvalues[idx] < cut {
                break;
            }
            let mut v = vec![ZERO; big_n];
            v[offsets[k]..offsets[k] + b.rows()].copy_from_slice(&e.vector(idx));
            cols.push(v);
            tags.push(k);
        }
    }
    Ok(JointNormingSubspace { basis: ComplexMatrix::from_columns(big_n, &cols), tags, norm_value: top })
}

/// Orthogonality in the direct sum, reduced to the norming blocks of `A`.
pub fn bj_orthogonal_alg(a: &AlgebraElement, b: &AlgebraElement) -> Result<BjVerdict> {
    a.require_same_shape(b)?;
    let na = a.norm();
    let nb = b.norm();
    let big_n = a.shape().total_dim();
    if na <= DELTA_ZERO || nb <= DELTA_ZERO {
        return Ok(BjVerdict::trivial(big_n));
    }
    let a = a.scale_real(1.0 / na);
    let b = b.scale_real(1.0 / nb);
    let joint = joint_norming_subspace(&a, EPS_RANK)?;
    let p = &joint.basis;
    let ba = b.adjoint().mul(&a)?.embed();
    let c = p.adjoint_mul(&ba.matmul(p));
    Ok(decide_compressed(&c, p))
}

/// Evidence that `A` is smooth: the unique norming block `j`, the unit vector
/// spanning `M₀(A_j)`, and `0 ⊕ (A_j x_j) x_j* ⊕ 0`, which has the same
/// outgoing neighbourhood as `A`.
#[derive(Debug, Clone)]
pub struct SmoothCertificate {
    pub block: usize,
    pub vector: Vec<C64>,
    pub representative: AlgebraElement,
}

#[derive(Debug, Clone)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub norming_blocks: Vec<usize>,
    /// `dim M₀(A_k)` for each norming block, in the order of `norming_blocks`.
    pub m0_dims: Vec<usize>,
    pub certificate: Option<SmoothCertificate>,
}

pub fn is_smooth(a: &AlgebraElement) -> Result<SmoothnessReport> {
    if a.is_zero() {
        return Err(BjError::ZeroElement);
    }
    let joint = joint_norming_subspace(a, EPS_RANK)?;
    let (_, norming) = alg_norm_and_norming_blocks(a, EPS_RANK);
    let m0_dims: Vec<usize> = norming.iter().map(|&k| joint.tags.iter().filter(|&&t| t == k).count()).collect();
    let smooth = norming.len() == 1 && m0_dims[0] == 1;
    let certificate = smooth.then(|| {
        let j = norming[0];
        let x = joint.block_vectors(a.shape(), j).remove(0);
        let ax = a.block(j).mul_vec(&x);
        let rep = AlgebraElement::zeros(a.shape()).map_blocks(|k, z| if k == j { ComplexMatrix::outer(&ax, &x) } else { z.clone() });
        SmoothCertificate { block: j, vector: x, representative: rep }
    });
    Ok(SmoothnessReport { smooth, norming_blocks: norming, m0_dims, certificate })
}

/// Whether `A` and `P·A` attain their norms at the same summands.
pub fn central_gauge_check(a: &AlgebraElement, p: &CentralElement) -> Result<bool> {
    if !p.is_positive_definite() {
        return Err(BjError::NonPositiveGauge(format!("{:?}", p.scalars())));
    }
    let pa = p.apply(a)?;
    let (_, before) = alg_norm_and_norming_blocks(a, EPS_RANK);
    let (_, after) = alg_norm_and_norming_blocks(&pa, EPS_RANK);
    Ok(before == after)
}

pub fn has_abelian_summand(shape: &AlgebraShape) -> bool {
    shape.block_sizes().contains(&1)
}
