//! Numerical range `W(M) = { x*Mx : |x| = 1 }` through its support function
//!
//! `h(theta) = lambda_max( (e^{-i theta} M + e^{i theta} M*) / 2 )`.
//!
//! `W(M)` is convex and compact, so `min_theta h(theta)` is the signed distance
//! from the origin to the boundary of `W(M)`: positive inside, negative
//! outside. Membership of zero is decided from that margin.

use std::f64::consts::{PI, TAU};

use super::eig::{max_eigenvalue_unchecked, top_eigenpair_unchecked};
use super::matrix::{dot, normalized, ComplexMatrix, C64, ONE};
use crate::error::{BjError, Result};
use crate::tol::{DELTA_MARGIN, NOISE_FLOOR};

/// Three-way answer to "is 0 in W(M)?".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Contains,
    Excludes,
    Borderline,
}

impl Membership {
    /// Classifies a signed margin `min h`.
    pub fn from_margin(margin: f64) -> Self {
        if margin >= -NOISE_FLOOR {
            Membership::Contains
        } else if margin <= -DELTA_MARGIN {
            Membership::Excludes
        } else {
            Membership::Borderline
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumRangeVerdict {
    pub contains_zero: Membership,
    /// `min_theta h(theta)`: signed distance of 0 to the boundary of W(M).
    pub margin: f64,
    /// Angle at which the support function attains its minimum.
    pub theta_min: f64,
}

/// A boundary point of `W(M)` in direction `theta` with a generating unit vector.
#[derive(Debug, Clone)]
pub struct SupportPoint {
    pub theta: f64,
    pub h: f64,
    pub z: C64,
    pub x: Vec<C64>,
}

fn rotated_hermitian(m: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    m.scale(C64::from_polar(1.0, -theta)).hermitian_part()
}

/// Support function `h(theta)`.
pub fn support(m: &ComplexMatrix, theta: f64) -> f64 {
    max_eigenvalue_unchecked(&rotated_hermitian(m, theta))
}

pub fn support_point(m: &ComplexMatrix, theta: f64) -> SupportPoint {
    let (h, x) = top_eigenpair_unchecked(&rotated_hermitian(m, theta));
    let z = m.sesquilinear(&x, &x);
    SupportPoint { theta, h, z, x }
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(BjError::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(BjError::NonFinite);
    }
    Ok(())
}

/// Decides whether `0 ∈ W(M)` from a uniform scan of `grid` angles followed by
/// golden-section refinement of the best bracket down to `refine_tol`.
pub fn zero_in_numrange(m: &ComplexMatrix, grid: usize, refine_tol: f64) -> Result<NumRangeVerdict> {
    check_square(m)?;
    if grid < 16 {
        return Err(BjError::InvalidShape(format!("numerical-range grid {grid} < 16")));
    }
    if m.rows() == 0 {
        return Err(BjError::NonSquare { rows: 0, cols: 0 });
    }
    if m.rows() == 1 {
        // W is the single point m; h(theta) = Re(e^{-i theta} m).
        let z = m[(0, 0)];
        let theta_min = if z.norm() > 0.0 { (z.arg() + PI).rem_euclid(TAU) } else { 0.0 };
        let margin = -z.norm();
        return Ok(NumRangeVerdict { contains_zero: Membership::from_margin(margin), margin, theta_min });
    }

    let step = TAU / grid as f64;
    let values: Vec<f64> = (0..grid).map(|k| support(m, k as f64 * step)).collect();
    let (kmin, &hmin) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("grid is non-empty");

    let (theta, h) = golden_section(|t| support(m, t), (kmin as f64 - 1.0) * step, (kmin as f64 + 1.0) * step, refine_tol);
    let (margin, theta_min) = if h < hmin { (h, theta) } else { (hmin, kmin as f64 * step) };
    Ok(NumRangeVerdict { contains_zero: Membership::from_margin(margin), margin, theta_min: theta_min.rem_euclid(TAU) })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `K` support points at the angles `2 pi k / K`, used for boundary export.
pub fn boundary(m: &ComplexMatrix, samples: usize) -> Result<Vec<SupportPoint>> {
    check_square(m)?;
    let step = TAU / samples.max(1) as f64;
    Ok((0..samples).map(|k| support_point(m, k as f64 * step)).collect())
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Finds a unit vector `y` whose Rayleigh value `y*My` lies on the segment
/// between those of `x1` and `x2` at the point `target`.
///
/// Works in `span{x1, x2}`: with `D = M - target I` and `y = x1 + s e^{i phi} x2`,
/// the phase is chosen so the cross term is collinear with the segment and the
/// real quadratic in `s` has a root because the endpoints sit on opposite sides.
pub(crate) fn realize_on_segment(m: &ComplexMatrix, x1: &[C64], x2: &[C64], target: C64) -> Vec<C64> {
    let rq = |x: &[C64]| m.sesquilinear(x, x) / dot(x, x).re;
    let z1 = rq(x1) - target;
    let z2 = rq(x2) - target;
    let tiny = 1e-15 * (1.0 + target.norm());
    if z1.norm() <= tiny {
        return x1.to_vec();
    }
    if z2.norm() <= tiny {
        return x2.to_vec();
    }
    let u = z1 / z1.norm();
    let d_sesq = |x: &[C64], y: &[C64]| m.sesquilinear(x, y) - target * dot(x, y);
    let a = d_sesq(x1, x2);
    let b = d_sesq(x2, x1);
    let p = u.conj() * a;
    let r = u.conj() * b;
    let g = p - r.conj();
    let phi = if g.norm() > 0.0 { -g.arg() } else { 0.0 };
    let w = C64::from_polar(1.0, phi);
    let lin = (p * w + r * w.conj()).re;
    // x1, x2 are unit vectors here, so the constant and quadratic terms are z1, z2.
    let n1 = dot(x1, x1).re;
    let n2 = dot(x2, x2).re;
    let c0 = z1.norm() * n1;
    let c2 = (u.conj() * z2).re * n2;
    if c2 >= 0.0 {
        return if z1.norm() <= z2.norm() { x1.to_vec() } else { x2.to_vec() };
    }
    let disc = (lin * lin - 4.0 * c2 * c0).max(0.0);
    let s = (lin + disc.sqrt()) / (2.0 * -c2);
    let y: Vec<C64> = x1.iter().zip(x2).map(|(p1, p2)| p1 + w * s * p2).collect();
    normalized(&y).unwrap_or_else(|| x1.to_vec())
}

fn barycentric_origin(a: C64, b: C64, c: C64) -> Option<(f64, f64, f64)> {
    let e1 = b - a;
    let e2 = c - a;
    let det = cross(e1, e2);
    let scale = e1.norm_sqr().max(e2.norm_sqr());
    if det.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let rhs = -a;
    let beta = cross(rhs, e2) / det;
    let gamma = cross(e1, rhs) / det;
    Some((1.0 - beta - gamma, beta, gamma))
}

fn realize_in_triangle(
    m: &ComplexMatrix,
    pa: &SupportPoint,
    pb: &SupportPoint,
    pc: &SupportPoint,
    (_alpha, beta, gamma): (f64, f64, f64),
) -> Vec<C64> {
    let bg = beta + gamma;
    if bg <= 1e-15 {
        return pa.x.clone();
    }
    let w = (pb.z * beta + pc.z * gamma) / bg;
    let y_bc = realize_on_segment(m, &pb.x, &pc.x, w);
    realize_on_segment(m, &pa.x, &y_bc, C64::new(0.0, 0.0))
}

/// Searches for a unit vector `y` with `y*My` as close to 0 as the numerical
/// range allows. Returns `None` only for an empty matrix. Callers must check
/// the residual `|y*My|` themselves.
pub fn zero_preimage(m: &ComplexMatrix, grid: usize) -> Option<Vec<C64>> {
    let d = m.rows();
    if d == 0 {
        return None;
    }
    if d == 1 {
        return Some(vec![ONE]);
    }
    let grid = grid.max(16);
    let step = TAU / grid as f64;
    let pts: Vec<SupportPoint> = (0..grid).map(|k| support_point(m, k as f64 * step)).collect();
    let scale = pts.iter().map(|p| p.z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    // W(M) is (numerically) a single point.
    let far =
        pts.iter().enumerate().max_by(|a, b| (a.1.z - pts[0].z).norm().total_cmp(&(b.1.z - pts[0].z).norm())).map(|(i, _)| i).unwrap_or(0);
    let span = (pts[far].z - pts[0].z).norm();
    if span <= 1e-13 * scale {
        return Some(pts[0].x.clone());
    }

    // W(M) is (numerically) a segment.
    let dir = (pts[far].z - pts[0].z) / span;
    let collinear = pts.iter().all(|p| cross(dir, p.z - pts[0].z).abs() <= 1e-12 * scale);
    if collinear {
        let proj = |z: C64| (dir.conj() * (z - pts[0].z)).re;
        let lo = pts.iter().min_by(|a, b| proj(a.z).total_cmp(&proj(b.z))).unwrap();
        let hi = pts.iter().max_by(|a, b| proj(a.z).total_cmp(&proj(b.z))).unwrap();
        let t0 = proj(C64::new(0.0, 0.0)).clamp(proj(lo.z), proj(hi.z));
        let target = pts[0].z + dir * t0;
        return Some(realize_on_segment(m, &lo.x, &hi.x, target));
    }

    // Fan triangulation of the inscribed polygon.
    for k in 1..grid - 1 {
        if let Some(bary) = barycentric_origin(pts[0].z, pts[k].z, pts[k + 1].z) {
            if bary.0 >= -1e-12 && bary.1 >= -1e-12 && bary.2 >= -1e-12 {
                return Some(realize_in_triangle(m, &pts[0], &pts[k], &pts[k + 1], bary));
            }
        }
    }

    // The origin is in a cap between the polygon and the curved boundary, or
    // outside W(M). Refine the edge that sees it from outside.
    let mut best: Option<(usize, f64)> = None;
    for k in 0..grid {
        let a = pts[k].z;
        let b = pts[(k + 1) % grid].z;
        let e = b - a;
        if e.norm() <= 1e-15 * scale {
            continue;
        }
        let signed = cross(e, -a) / e.norm();
        if best.is_none_or(|(_, s)| signed < s) {
            best = Some((k, signed));
        }
    }
    let (k, _) = best?;
    let mut a = pts[k].clone();
    let mut b = pts[(k + 1) % grid].clone();
    if b.theta < a.theta {
        b.theta += TAU;
    }
    for _ in 0..80 {
        if (b.z - a.z).norm() <= 1e-15 * scale {
            break;
        }
        let mid = support_point(m, 0.5 * (a.theta + b.theta));
        if let Some(bary) = barycentric_origin(a.z, mid.z, b.z) {
            if bary.0 >= -1e-12 && bary.1 >= -1e-12 && bary.2 >= -1e-12 {
                return Some(realize_in_triangle(m, &a, &mid, &b, bary));
            }
        }
        if cross(mid.z - a.z, -a.z) < 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    // Closest point of the final chord.
    let e = b.z - a.z;
    let t = if e.norm_sqr() > 0.0 { ((e.conj() * (-a.z)).re / e.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
    Some(realize_on_segment(m, &a.x, &b.x, a.z + e * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::{NUMRANGE_GRID, NUMRANGE_REFINE};

    fn verdict(m: &ComplexMatrix) -> NumRangeVerdict {
        zero_in_numrange(m, NUMRANGE_GRID, NUMRANGE_REFINE).unwrap()
    }

    fn rayleigh_abs(m: &ComplexMatrix, y: &[C64]) -> f64 {
        (m.sesquilinear(y, y) / dot(y, y).re).norm()
    }

    #[test]
    fn hermitian_with_mixed_signs_contains_zero() {
        let m = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let v = verdict(&m);
        assert_eq!(v.contains_zero, Membership::Contains);
        let y = zero_preimage(&m, 64).unwrap();
        assert!(rayleigh_abs(&m, &y) < 1e-14);
    }

    #[test]
    fn identity_excludes_zero_with_unit_margin() {
        let v = verdict(&ComplexMatrix::identity(2));
        assert_eq!(v.contains_zero, Membership::Excludes);
        assert!((v.margin + 1.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_jordan_block_is_a_disc() {
        // W([[0,1],[0,0]]) is the disc of radius 1/2; brute force over unit
        // vectors x = (cos a, e^{ib} sin a) confirms the max modulus.
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let mut max_mod: f64 = 0.0;
        for i in 0..200 {
            for j in 0..200 {
                let a = PI * i as f64 / 200.0;
                let b = TAU * j as f64 / 200.0;
                let x = [C64::new(a.cos(), 0.0), C64::from_polar(a.sin(), b)];
                max_mod = max_mod.max(m.sesquilinear(&x, &x).norm());
            }
        }
        assert!((max_mod - 0.5).abs() < 1e-3);
        let v = verdict(&m);
        assert_eq!(v.contains_zero, Membership::Contains);
        assert!((v.margin - 0.5).abs() < 1e-9);
        for theta in [0.0, 1.0, 2.5, 4.0] {
            assert!((support(&m, theta) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn support_function_is_periodic() {
        let m = ComplexMatrix::from_rows(&[[C64::new(1.0, 2.0), C64::new(0.5, 0.0)], [C64::new(0.0, -1.0), C64::new(-0.3, 0.2)]]);
        assert!((support(&m, 0.0) - support(&m, TAU)).abs() <= 1e-12 * 3.0);
    }

    #[test]
    fn point_range_fast_path() {
        let m = ComplexMatrix::from_rows(&[[C64::new(0.0, 2.0)]]);
        let v = verdict(&m);
        assert_eq!(v.contains_zero, Membership::Excludes);
        assert!((v.margin + 2.0).abs() < 1e-15);
        assert!((v.theta_min - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(zero_in_numrange(&ComplexMatrix::zeros(2, 3), 720, 1e-10), Err(BjError::NonSquare { .. })));
        assert!(zero_in_numrange(&ComplexMatrix::identity(2), 8, 1e-10).is_err());
    }

    #[test]
    fn preimage_of_zero_inside_ellipse() {
        let m = ComplexMatrix::from_rows(&[
            [C64::new(1.0, 0.5), C64::new(0.3, 0.0), C64::new(0.0, 0.2)],
            [C64::new(0.0, 0.0), C64::new(-0.7, 0.4), C64::new(0.1, 0.0)],
            [C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.1, -0.9)],
        ]);
        let v = verdict(&m);
        assert_eq!(v.contains_zero, Membership::Contains);
        let y = zero_preimage(&m, 720).unwrap();
        assert!(rayleigh_abs(&m, &y) < 1e-12);
    }

    #[test]
    fn preimage_near_curved_boundary() {
        // Disc of radius 1/2 centred at 0.5 - 1e-6: the origin sits 1e-6 inside.
        let shift = 0.5 - 1e-6;
        let mut m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        m[(0, 0)] += shift;
        m[(1, 1)] += shift;
        let v = verdict(&m);
        assert!((v.margin - 1e-6).abs() < 1e-9, "margin {}", v.margin);
        let y = zero_preimage(&m, 720).unwrap();
        assert!(rayleigh_abs(&m, &y) < 1e-12, "residual {}", rayleigh_abs(&m, &y));
    }
}
