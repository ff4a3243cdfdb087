use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;

use bjorth::bj::{bj_orthogonal_criterion, bj_orthogonal_minimize, norm_attain_set, rank_one_perp, BjState};
use bjorth::cstar::{bj_orthogonal_alg, central_gauge_check, is_smooth, AlgebraElement, AlgebraShape, CentralElement};
use bjorth::geometry::{ellipse_hausdorff, locally_dependent_equiv_with, scalar_multiple_fit};
use bjorth::io::{parse_algebra, serialize_algebra};
use bjorth::linalg::numrange::support;
use bjorth::linalg::{herm_eig, spectral_norm, svd, zero_in_numrange, ComplexMatrix, Membership, C64};
use bjorth::maps::{apply_isometry, IsometrySpec};
use bjorth::random::{gaussian, gaussian_matrix, rng_from_seed, unit_vector, unitary, BjRng};
use bjorth::sampling::{non_orthogonal_partner, orthogonal_partner, random_element, rank_one_orthogonal_triple};
use bjorth::tol::{NUMRANGE_GRID, NUMRANGE_REFINE};

fn config(cases: u32, seed: u64) -> Config {
    Config { cases, failure_persistence: None, rng_seed: RngSeed::Fixed(seed), ..Config::default() }
}

fn hermitian(rng: &mut BjRng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

/// Agreement between the two decisive verdicts, ignoring borderline answers.
fn consistent(a: BjState, b: BjState) -> bool {
    a == b || a == BjState::Borderline || b == BjState::Borderline
}

/// Whether 0 lies in the convex hull of the sampled points `x*Mx`.
fn sampled_hull_contains_zero(m: &ComplexMatrix, rng: &mut BjRng, samples: usize) -> bool {
    let mut angles = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = unit_vector(rng, m.rows());
        let z = m.sesquilinear(&x, &x);
        if z.norm() == 0.0 {
            return true;
        }
        angles.push(z.arg());
    }
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + TAU - angles[angles.len() - 1];
    let widest = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    widest < PI
}

proptest! {
    #![proptest_config(config(64, 0x11a1))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let h = hermitian(&mut rng, n);
        let e = herm_eig(&h).unwrap();
        let lambda = ComplexMatrix::diag_real(&e.eigenvalues);
        let back = e.eigenvectors.matmul(&lambda).matmul(&e.eigenvectors.adjoint());
        prop_assert!(back.distance(&h) <= 1e-10 * spectral_norm(&h).max(1.0));
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectral_norm_matches_gram_eigenvalue(seed in any::<u64>(), r in 1usize..=6, c in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, r, c);
        let gram = a.adjoint_mul(&a).hermitian_part();
        let top = herm_eig(&gram).unwrap().max_eigenvalue().sqrt();
        let s = svd(&a).unwrap();
        prop_assert!((s.sigma_max() - top).abs() <= 1e-10 * top);
        prop_assert!(s.reconstruct().distance(&a) <= 1e-10 * top);
    }

    #[test]
    fn numrange_membership_agrees_with_sampled_hull(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let shift = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mut shifted = gaussian_matrix(&mut rng, n, n);
        for i in 0..n {
            shifted.as_mut_slice()[i * n + i] += shift;
        }
        let v = zero_in_numrange(&shifted, NUMRANGE_GRID, NUMRANGE_REFINE).unwrap();
        let sampled = sampled_hull_contains_zero(&shifted, &mut rng, 10_000);
        if sampled {
            prop_assert_ne!(v.contains_zero, Membership::Excludes);
        }
        if v.margin.abs() > 1e-6 {
            prop_assert_eq!(v.contains_zero == Membership::Contains, sampled, "margin {:e}", v.margin);
        }
    }

    #[test]
    fn support_function_is_periodic(seed in any::<u64>(), n in 1usize..=5, theta in 0.0f64..TAU) {
        let mut rng = rng_from_seed(seed);
        let m = gaussian_matrix(&mut rng, n, n);
        let (h0, h1) = (support(&m, theta), support(&m, theta + TAU));
        prop_assert!((h0 - h1).abs() <= 1e-12 * spectral_norm(&m).max(1.0));
    }
}

proptest! {
    #![proptest_config(config(96, 0xb1))]

    #[test]
    fn orthogonality_is_homogeneous(seed in any::<u64>(), n in 2usize..=5, partner in 0u8..2) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let b = if partner == 0 { orthogonal_partner(&mut rng, &a) } else { gaussian_matrix(&mut rng, n, n) };
        let (alpha, beta) = (gaussian(&mut rng), gaussian(&mut rng));
        let base = bj_orthogonal_criterion(&a, &b).unwrap().state;
        let scaled = bj_orthogonal_criterion(&a.scale(alpha), &b.scale(beta)).unwrap().state;
        prop_assert!(consistent(base, scaled), "{base} vs {scaled}");
    }

    #[test]
    fn nonzero_matrix_is_not_orthogonal_to_itself(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        prop_assert_eq!(bj_orthogonal_criterion(&a, &a).unwrap().state, BjState::NotOrthogonal);
        prop_assert_eq!(bj_orthogonal_criterion(&a, &ComplexMatrix::zeros(n, n)).unwrap().state, BjState::Orthogonal);
    }

    #[test]
    fn rank_one_oracle_matches_criterion(seed in any::<u64>(), n in 2usize..=5, engineered in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let (x, y, m) = if engineered {
            rank_one_orthogonal_triple(&mut rng, n)
        } else {
            (unit_vector(&mut rng, n), unit_vector(&mut rng, n), gaussian_matrix(&mut rng, n, n))
        };
        let r = rank_one_perp(&x, &y, &m).unwrap().state;
        let c = bj_orthogonal_criterion(&ComplexMatrix::outer(&x, &y), &m).unwrap().state;
        prop_assert!(consistent(r, c), "{r} vs {c}");
        if engineered {
            prop_assert_eq!(r, BjState::Orthogonal);
        }
    }

    #[test]
    fn orthogonality_is_unitarily_and_adjoint_invariant(seed in any::<u64>(), n in 2usize..=5, partner in 0u8..3) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let b = match partner {
            0 => orthogonal_partner(&mut rng, &a),
            1 => non_orthogonal_partner(&mut rng, &a),
            _ => gaussian_matrix(&mut rng, n, n),
        };
        let (u, v) = (unitary(&mut rng, n), unitary(&mut rng, n));
        let base = bj_orthogonal_criterion(&a, &b).unwrap().state;
        let moved = bj_orthogonal_criterion(&u.matmul(&a).matmul(&v), &u.matmul(&b).matmul(&v)).unwrap().state;
        let adj = bj_orthogonal_criterion(&a.adjoint(), &b.adjoint()).unwrap().state;
        prop_assert!(consistent(base, moved), "{base} vs {moved}");
        prop_assert!(consistent(base, adj), "{base} vs {adj}");
    }

    #[test]
    fn oracles_agree(seed in any::<u64>(), n in 2usize..=5, partner in 0u8..3) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let b = match partner {
            0 => orthogonal_partner(&mut rng, &a),
            1 => non_orthogonal_partner(&mut rng, &a),
            _ => gaussian_matrix(&mut rng, n, n),
        };
        let c = bj_orthogonal_criterion(&a, &b).unwrap().state;
        let m = bj_orthogonal_minimize(&a, &b).unwrap().state;
        prop_assert!(consistent(c, m), "criterion {c}, minimize {m}");
    }

    #[test]
    fn norm_attainment_vectors_attain_the_norm(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let m0 = norm_attain_set(&a, 1e-10).unwrap();
        let norm = spectral_norm(&a);
        for x in m0.vectors() {
            let ax = a.mul_vec(&x);
            prop_assert!((bjorth::linalg::norm(&ax) - norm).abs() <= 1e-9 * norm);
        }
    }
}

proptest! {
    #![proptest_config(config(64, 0xc5))]

    #[test]
    fn algebra_oracle_matches_embedding(seed in any::<u64>(), sizes in shape_strategy(), partner in 0u8..2) {
        let mut rng = rng_from_seed(seed);
        let shape = AlgebraShape::new(sizes).unwrap();
        let a = random_element(&mut rng, &shape);
        let b = if partner == 0 {
            bjorth::sampling::orthogonal_partner_alg(&mut rng, &a)
        } else {
            random_element(&mut rng, &shape)
        };
        let alg = bj_orthogonal_alg(&a, &b).unwrap().state;
        let emb = bj_orthogonal_criterion(&a.embed(), &b.embed()).unwrap().state;
        prop_assert!(consistent(alg, emb), "{alg} vs {emb}");
    }

    #[test]
    fn strictly_dominant_block_decides(seed in any::<u64>(), sizes in shape_strategy(), pick in any::<prop::sample::Index>()) {
        let mut rng = rng_from_seed(seed);
        let shape = AlgebraShape::new(sizes).unwrap();
        let j = pick.index(shape.num_blocks());
        let a = random_element(&mut rng, &shape);
        let top = a.norm();
        let a = a.map_blocks(|k, x| if k == j { x.scale_real(2.0 * top / spectral_norm(x)) } else { x.clone() });
        let b = random_element(&mut rng, &shape);
        let b = if rng.random_bool(0.5) {
            b.map_blocks(|k, x| if k == j { orthogonal_partner(&mut rng, a.block(j)) } else { x.clone() })
        } else {
            b
        };
        let alg = bj_orthogonal_alg(&a, &b).unwrap().state;
        let local = bj_orthogonal_criterion(a.block(j), b.block(j)).unwrap().state;
        prop_assert!(consistent(alg, local), "{alg} vs {local}");
    }

    #[test]
    fn smooth_representative_has_same_partners(seed in any::<u64>(), sizes in shape_strategy()) {
        let mut rng = rng_from_seed(seed);
        let shape = AlgebraShape::new(sizes).unwrap();
        let a = random_element(&mut rng, &shape);
        let report = is_smooth(&a).unwrap();
        prop_assume!(report.smooth);
        let rep = report.certificate.unwrap().representative;
        for i in 0..20 {
            let b = if i % 2 == 0 {
                bjorth::sampling::orthogonal_partner_alg(&mut rng, &a)
            } else {
                random_element(&mut rng, &shape)
            };
            let x = bj_orthogonal_alg(&a, &b).unwrap().state;
            let y = bj_orthogonal_alg(&rep, &b).unwrap().state;
            prop_assert!(consistent(x, y), "{x} vs {y}");
        }
    }

    #[test]
    fn identity_gauge_keeps_norming_blocks(seed in any::<u64>(), sizes in shape_strategy()) {
        let mut rng = rng_from_seed(seed);
        let shape = AlgebraShape::new(sizes).unwrap();
        let a = random_element(&mut rng, &shape);
        prop_assert!(central_gauge_check(&a, &CentralElement::identity(&shape)).unwrap());
        let t = rng.random_range(0.1..10.0);
        let uniform = CentralElement::from_real(shape.clone(), &vec![t; shape.num_blocks()]).unwrap();
        prop_assert!(central_gauge_check(&a, &uniform).unwrap());
    }

    #[test]
    fn isometries_preserve_norm(seed in any::<u64>(), sizes in shape_strategy()) {
        let mut rng = rng_from_seed(seed);
        let shape = AlgebraShape::new(sizes).unwrap();
        let spec = IsometrySpec::random(&mut rng, &shape);
        let x = random_element(&mut rng, &shape);
        let y = apply_isometry(&spec, &x).unwrap();
        prop_assert!((y.norm() - x.norm()).abs() <= 1e-10 * x.norm());
        prop_assert!(spec.inverse_apply(&y).unwrap().distance(&x).unwrap() <= 1e-10 * x.norm());
    }
}

fn finite_entry() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #![proptest_config(config(128, 0x10))]

    #[test]
    fn serialization_round_trips_exactly(sizes in shape_strategy(), raw in prop::collection::vec(finite_entry(), 54)) {
        let shape = AlgebraShape::new(sizes).unwrap();
        let mut entries = raw.chunks(2).map(|p| C64::new(p[0], p[1]));
        let mut next = || entries.next().unwrap();
        let blocks: Vec<ComplexMatrix> = shape
            .block_sizes()
            .iter()
            .map(|&n| ComplexMatrix::from_vec(n, n, (0..n * n).map(|_| next()).collect()).unwrap())
            .collect();
        let x = AlgebraElement::new(shape, blocks).unwrap();
        let back = parse_algebra(&serialize_algebra(&x)).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn local_dependence_matches_scalar_fit(seed in any::<u64>(), n in 2usize..=4, dependent in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let b = if dependent { a.scale(gaussian(&mut rng)) } else { gaussian_matrix(&mut rng, n, n) };
        let (_, residual) = scalar_multiple_fit(&a, &b);
        let ld = locally_dependent_equiv_with(&a, &b, 200, &mut rng).unwrap();
        prop_assert_eq!(ld, residual <= 1e-8, "residual {:e}", residual);
    }

    #[test]
    fn rank_one_range_is_the_predicted_ellipse(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = rng_from_seed(seed);
        let x = unit_vector(&mut rng, n);
        let y = unit_vector(&mut rng, n);
        prop_assert!(ellipse_hausdorff(&x, &y, 720).unwrap() <= 1e-8);
    }
}
