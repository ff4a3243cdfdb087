//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by a verdict lives here so the decision bands can be
//! audited in one place.

/// Relative Hermitian-symmetry tolerance accepted by [`crate::linalg::herm_eig`].
pub const EPS_HERM: f64 = 1e-12;

/// Eigen-pair residual bound, relative to the matrix norm.
pub const EPS_EIG: f64 = 1e-9;

/// SVD reconstruction bound, relative to the largest singular value.
pub const EPS_SVD: f64 = 1e-9;

/// Relative gap used to cluster the top eigenvalue of `A*A` (norm-attainment)
/// and to decide which blocks of a direct sum attain the norm.
pub const EPS_RANK: f64 = 1e-10;

/// Decision threshold: a distance (of 0 from a numerical range, or a relative
/// norm decrease) beyond this is a decisive non-orthogonality.
pub const DELTA_MARGIN: f64 = 1e-7;

/// Solver noise floor for the criterion oracle. Signed margins in
/// `(-DELTA_MARGIN, -NOISE_FLOOR)` are reported as borderline.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Noise floor for the minimisation oracle's relative norm decrease. The
/// decrease is quadratic in the criterion margin, so it gets a tighter floor.
pub const FLAT_FLOOR: f64 = 1e-13;

/// Absolute norm below which a matrix or algebra element is treated as zero.
pub const DELTA_ZERO: f64 = 1e-14;

/// Default number of angles sampled by the numerical-range support scan.
pub const NUMRANGE_GRID: usize = 720;

/// Default angular tolerance of the golden-section refinement.
pub const NUMRANGE_REFINE: f64 = 1e-10;
