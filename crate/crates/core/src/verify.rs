//! Seeded verification suites. Each check draws item `i` from its own
//! substream, so reports do not depend on thread scheduling.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::bj::{bj_orthogonal_criterion, bj_orthogonal_minimize, rank_one_perp, BjState};
use crate::cstar::{bj_orthogonal_alg, AlgebraElement, AlgebraShape};
use crate::error::{BjError, Result};
use crate::geometry::{
    bpm_inner_product, bpm_partner_matrix, construct_bpm, ellipse_hausdorff, lastrow_svd_check, left_symmetric_falsify_with,
    locally_dependent_equiv_with, scalar_multiple_fit, LeftSymmetryVerdict, OutgoingSpaceSpec, Sign,
};
use crate::linalg::matrix::{basis_vector, dot, norm, ComplexMatrix, C64};
use crate::linalg::svd::{spectral_norm, svd};
use crate::maps::{
    apply_isometry, build_theorem_map, counterexample_abelian_map, counterexample_gauge_map, phase_gauge_residual,
    recover_rank_one_structure, scalar_fit_residual, strong_preservation_test, BjMap, GaugeSpec, IntervalBijection, IsometrySpec,
};
use crate::random::{gaussian, gaussian_matrix, gaussian_vector, substream, unimodular, unit_vector, unitary, BjRng};
use crate::sampling::{matrix_with_m0_dim, non_orthogonal_partner, orthogonal_partner, random_element, rank_one_orthogonal_triple};

/// Suite names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "oracle",
    "rank-one",
    "laws",
    "lemma3.1",
    "lemma3.2",
    "lemma3.5",
    "transport",
    "n2-vset",
    "lemma3.7",
    "lemma6.1",
    "ellipse",
    "thm1.1",
    "examples7",
    "recover",
];

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Overrides the main sample count of every check run.
    pub trials: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub trials: usize,
    pub violations: usize,
    pub borderline: usize,
    pub note: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.trials += other.trials;
        self.violations += other.violations;
        self.borderline += other.borderline;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    Ok,
    Violation,
    Borderline,
}

fn tally(items: impl IntoIterator<Item = Item>) -> Outcome {
    let mut o = Outcome::default();
    for it in items {
        o.trials += 1;
        match it {
            Item::Ok => {}
            Item::Violation => o.violations += 1,
            Item::Borderline => o.borderline += 1,
        }
    }
    o
}

fn par_items<F>(count: usize, seed: u64, f: F) -> Outcome
where
    F: Fn(usize, &mut BjRng) -> Item + Sync,
{
    let items: Vec<Item> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            f(i, &mut rng)
        })
        .collect();
    tally(items)
}

/// Compares two verdict states, skipping pairs where either is Borderline.
fn agreement(a: BjState, b: BjState) -> Item {
    if a == BjState::Borderline || b == BjState::Borderline {
        Item::Borderline
    } else if a == b {
        Item::Ok
    } else {
        Item::Violation
    }
}

fn expect(ok: bool) -> Item {
    if ok {
        Item::Ok
    } else {
        Item::Violation
    }
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub id: String,
    pub trials: usize,
    pub violations: usize,
    pub borderline: usize,
    pub seed: u64,
    pub wall_time: Duration,
    pub note: String,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn total_time(&self) -> Duration {
        self.checks.iter().map(|c| c.wall_time).sum()
    }

    /// The report without timings; identical for identical seeds.
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "suite {} seed {}", self.suite, self.seed).unwrap();
        writeln!(s, "{:<10} {:>8} {:>10} {:>10} {:>20}  result  note", "check", "trials", "violations", "borderline", "seed").unwrap();
        for c in &self.checks {
            writeln!(
                s,
                "{:<10} {:>8} {:>10} {:>10} {:>20}  {:<6}  {}",
                c.id,
                c.trials,
                c.violations,
                c.borderline,
                c.seed,
                if c.passed() { "pass" } else { "FAIL" },
                c.note
            )
            .unwrap();
        }
        writeln!(s, "overall {}", if self.passed() { "pass" } else { "FAIL" }).unwrap();
        s
    }

    pub fn render_timings(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            writeln!(s, "{:<10} {:>10.3} s", c.id, c.wall_time.as_secs_f64()).unwrap();
        }
        writeln!(s, "{:<10} {:>10.3} s", "total", self.total_time().as_secs_f64()).unwrap();
        s
    }
}

/// Seed of check `id` derived from the suite seed (FNV-1a over the name).
pub fn check_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    seed ^ h
}

pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<SuiteReport> {
    let ids: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if let Some(&id) = SUITES.iter().find(|&&s| s == name) {
        vec![id]
    } else {
        return Err(BjError::UnknownSuite(name.to_string()));
    };
    let checks = ids
        .into_iter()
        .map(|id| {
            let seed = check_seed(opts.seed, id);
            let start = Instant::now();
            let o = run_check(id, opts.trials, seed);
            CheckRecord {
                id: id.to_string(),
                trials: o.trials,
                violations: o.violations,
                borderline: o.borderline,
                seed,
                wall_time: start.elapsed(),
                note: o.note,
            }
        })
        .collect();
    Ok(SuiteReport { suite: name.to_string(), seed: opts.seed, checks })
}

fn run_check(id: &str, trials: Option<usize>, seed: u64) -> Outcome {
    match id {
        "oracle" => check_oracle(trials.unwrap_or(200), seed),
        "rank-one" => check_rank_one(trials.unwrap_or(500), seed),
        "laws" => check_laws(trials.unwrap_or(1000), seed),
        "lemma3.1" => check_lastrow(trials.unwrap_or(200), seed),
        "lemma3.2" => check_bpm(trials.unwrap_or(200), seed),
        "lemma3.5" => check_dichotomy(trials.unwrap_or(100), 2000, seed),
        "transport" => check_transport(trials.unwrap_or(40), seed),
        "n2-vset" => check_n2_vset(trials.unwrap_or(60), seed),
        "lemma3.7" => check_local_dependence(trials.unwrap_or(300), seed),
        "lemma6.1" => check_unimodular_sweep(trials.unwrap_or(360), seed),
        "ellipse" => check_ellipse(trials.unwrap_or(100), seed),
        "thm1.1" => check_theorem_maps(20, trials.unwrap_or(1000), seed),
        "examples7" => check_examples(trials.unwrap_or(2000), seed),
        "recover" => check_recover(trials.unwrap_or(50), seed),
        _ => unreachable!("suite names are validated"),
    }
}

/// Pairs mixing generic, orthogonal-by-construction, and two-dimensional
/// `M₀` cases.
pub fn oracle_pair(rng: &mut BjRng, n: usize, i: usize) -> (ComplexMatrix, ComplexMatrix) {
    match i % 5 {
        0 => (gaussian_matrix(rng, n, n), gaussian_matrix(rng, n, n)),
        1 => {
            let a = gaussian_matrix(rng, n, n);
            let b = orthogonal_partner(rng, &a);
            (a, b)
        }
        2 => {
            let a = matrix_with_m0_dim(rng, n, 2.min(n));
            (a, gaussian_matrix(rng, n, n))
        }
        3 => {
            let a = matrix_with_m0_dim(rng, n, 2.min(n));
            let b = orthogonal_partner(rng, &a);
            (a, b)
        }
        _ => {
            let d = rng.random_range(1..=n);
            let a = matrix_with_m0_dim(rng, n, d);
            let b = non_orthogonal_partner(rng, &a);
            (a, b)
        }
    }
}

/// Criterion versus minimisation, `per_n` pairs for each `n` in `2..=5`.
pub fn check_oracle(per_n: usize, seed: u64) -> Outcome {
    (2..=5)
        .map(|n| {
            par_items(per_n, seed ^ n as u64, |i, rng| {
                let (a, b) = oracle_pair(rng, n, i);
                match (bj_orthogonal_criterion(&a, &b), bj_orthogonal_minimize(&a, &b)) {
                    (Ok(c), Ok(m)) => agreement(c.state, m.state),
                    _ => Item::Violation,
                }
            })
        })
        .fold(Outcome::default(), Outcome::merge)
}

pub fn check_rank_one(per_n: usize, seed: u64) -> Outcome {
    (2..=4)
        .map(|n| {
            par_items(per_n, seed ^ n as u64, |i, rng| {
                let (x, y, m) = if i % 2 == 0 {
                    rank_one_orthogonal_triple(rng, n)
                } else {
                    (gaussian_vector(rng, n), gaussian_vector(rng, n), gaussian_matrix(rng, n, n))
                };
                match (rank_one_perp(&x, &y, &m), bj_orthogonal_criterion(&ComplexMatrix::outer(&x, &y), &m)) {
                    (Ok(r), Ok(c)) => agreement(r.state, c.state),
                    _ => Item::Violation,
                }
            })
        })
        .fold(Outcome::default(), Outcome::merge)
}

/// Homogeneity, `A ⊥ A ⟺ A = 0`, unitary invariance and adjoint invariance,
/// `count` cases each.
pub fn check_laws(count: usize, seed: u64) -> Outcome {
    let verdict = |a: &ComplexMatrix, b: &ComplexMatrix| bj_orthogonal_criterion(a, b).map(|v| v.state).unwrap_or(BjState::Borderline);
    let pair = |rng: &mut BjRng, i: usize| {
        let n = rng.random_range(2..=4);
        oracle_pair(rng, n, i)
    };
    let homogeneity = par_items(count, seed, |i, rng| {
        let (a, b) = pair(rng, i);
        let (al, be) = (gaussian(rng) * 3.0, gaussian(rng) * 3.0);
        agreement(verdict(&a, &b), verdict(&a.scale(al), &b.scale(be)))
    });
    let self_orth = par_items(count, seed ^ 1, |i, rng| {
        let n = rng.random_range(1..=4);
        if i % 10 == 0 {
            let z = ComplexMatrix::zeros(n, n);
            expect(verdict(&z, &z) == BjState::Orthogonal)
        } else {
            let a = gaussian_matrix(rng, n, n);
            expect(verdict(&a, &a) == BjState::NotOrthogonal)
        }
    });
    let unitary_inv = par_items(count, seed ^ 2, |i, rng| {
        let (a, b) = pair(rng, i);
        let n = a.rows();
        let (u, v) = (unitary(rng, n), unitary(rng, n));
        let t = |m: &ComplexMatrix| u.matmul(m).matmul(&v);
        agreement(verdict(&a, &b), verdict(&t(&a), &t(&b)))
    });
    let adjoint_inv = par_items(count, seed ^ 3, |i, rng| {
        let (a, b) = pair(rng, i);
        agreement(verdict(&a, &b), verdict(&a.adjoint(), &b.adjoint()))
    });
    let total = homogeneity.clone().merge(self_orth.clone()).merge(unitary_inv.clone()).merge(adjoint_inv.clone());
    Outcome {
        note: format!(
            "violations homogeneity={} self={} unitary={} adjoint={}",
            homogeneity.violations, self_orth.violations, unitary_inv.violations, adjoint_inv.violations
        ),
        ..total
    }
}

/// `x e_n* + e_n y*` with Gaussian `x`, `y`.
pub fn lastrow_matrix(rng: &mut BjRng, n: usize) -> ComplexMatrix {
    let x = gaussian_vector(rng, n);
    let y = gaussian_vector(rng, n);
    let en = basis_vector(n, n - 1);
    &ComplexMatrix::outer(&x, &en) + &ComplexMatrix::outer(&en, &y)
}

pub fn check_lastrow(per_n: usize, seed: u64) -> Outcome {
    (2..=5)
        .map(|n| {
            par_items(per_n, seed ^ n as u64, |_, rng| {
                let b = lastrow_matrix(rng, n);
                let ok = lastrow_svd_check(&b).unwrap_or(false);
                let s = svd(&b).expect("finite");
                expect(ok && s.singular_values[0] - s.singular_values[1] > 1e-7 * s.singular_values[0])
            })
        })
        .fold(Outcome::default(), Outcome::merge)
}

fn random_unit_pair(rng: &mut BjRng) -> (C64, C64) {
    loop {
        let v = unit_vector(rng, 2);
        if v[0].norm() > 0.05 && v[1].norm() > 0.05 {
            return (v[0], v[1]);
        }
    }
}

/// Checks every claim about `B±` on one parameter set: the explicit SVD,
/// `A ⊥ B±`, the closed form of `⟨B±b±, Ab±⟩`, and that `B± ⊥ A` exactly when
/// it vanishes.
fn bpm_item(c: C64, s: C64, cy: C64, sy: C64, sigma2: f64, n: usize) -> Item {
    let a = bpm_partner_matrix(n, sigma2, c, s, cy, sy);
    let mut any_fails = false;
    let mut borderline = false;
    for sign in [Sign::Plus, Sign::Minus] {
        let Ok(con) = construct_bpm(c, s, n, sign) else { return Item::Violation };
        let sv = svd(&con.matrix).expect("finite").singular_values;
        let claimed = &con.claimed_svd.singular_values;
        if (sv[0] - claimed[0]).abs() > 1e-10 || (sv[1] - claimed[1]).abs() > 1e-10 {
            return Item::Violation;
        }
        let b = &con.matrix;
        match bj_orthogonal_criterion(&a, b).map(|v| v.state) {
            Ok(BjState::Orthogonal) => {}
            Ok(BjState::Borderline) => borderline = true,
            _ => return Item::Violation,
        }
        let bb = con.claimed_svd.v(0);
        let direct = dot(&a.mul_vec(&bb), &b.mul_vec(&bb));
        let closed = bpm_inner_product(c, s, sigma2, sy, sign);
        if (closed - direct).norm() > 1e-10 {
            return Item::Violation;
        }
        let back = bj_orthogonal_criterion(b, &a).map(|v| v.state).unwrap_or(BjState::Borderline);
        let rel = closed.norm() / (spectral_norm(b) * spectral_norm(&a));
        let expected = if rel <= 1e-12 {
            BjState::Orthogonal
        } else if rel >= 1e-6 {
            BjState::NotOrthogonal
        } else {
            BjState::Borderline
        };
        match agreement(expected, back) {
            Item::Violation => return Item::Violation,
            Item::Borderline => borderline = true,
            Item::Ok => {}
        }
        any_fails |= back == BjState::NotOrthogonal;
    }
    if borderline {
        Item::Borderline
    } else {
        expect(any_fails)
    }
}

pub fn check_bpm(count: usize, seed: u64) -> Outcome {
    // Real parameters with s_y = σ₂c/|s|², where exactly B₋ is orthogonal to A.
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sy = h * 0.5 / h.norm_sqr();
    let cy = C64::new((1.0 - sy.norm_sqr()).sqrt(), 0.0);
    let a = bpm_partner_matrix(3, 0.5, h, h, cy, sy);
    let states: Vec<BjState> = [Sign::Plus, Sign::Minus]
        .iter()
        .map(|&sg| bj_orthogonal_criterion(&construct_bpm(h, h, 3, sg).unwrap().matrix, &a).unwrap().state)
        .collect();
    let exactly_one = states == [BjState::NotOrthogonal, BjState::Orthogonal];
    let mut o = par_items(count, seed, |_, rng| {
        let (c, s) = random_unit_pair(rng);
        let (cy, sy) = random_unit_pair(rng);
        let sigma2 = rng.random_range(0.05..0.95);
        let n = rng.random_range(3..=5);
        bpm_item(c, s, cy, sy, sigma2, n)
    });
    o.trials += 1;
    if !exactly_one {
        o.violations += 1;
    }
    o.note = format!("exactly-one example: B+ {} / B- {}", states[0], states[1]);
    o
}

/// Gaussian matrix projected onto the space.
fn random_member(rng: &mut BjRng, space: &OutgoingSpaceSpec) -> ComplexMatrix {
    let n = space.dim();
    space.project(&gaussian_matrix(rng, n, n))
}

/// For `n ∈ {3, 4}`: `samples` random members of `𝒱_p`, `p ≥ 3`, must be
/// refuted; a few multiples of `E₁₁` in `𝒱₂` must survive `search` trials.
pub fn check_dichotomy(samples: usize, search: usize, seed: u64) -> Outcome {
    let refuted = [3usize, 4]
        .iter()
        .map(|&n| {
            par_items(samples, seed ^ n as u64, |_, rng| {
                let p = rng.random_range(3..=n);
                let space = OutgoingSpaceSpec::first_row_zeros(n, p).expect("valid p");
                let a = random_member(rng, &space);
                match left_symmetric_falsify_with(&a, &space, search, rng) {
                    Ok(r) => expect(r.verdict == LeftSymmetryVerdict::Falsified),
                    Err(_) => Item::Violation,
                }
            })
        })
        .fold(Outcome::default(), Outcome::merge);
    let multiples = (samples / 20).max(1);
    let kept = [3usize, 4]
        .iter()
        .map(|&n| {
            par_items(multiples, seed ^ (n as u64) << 8, |_, rng| {
                let space = OutgoingSpaceSpec::first_row_zeros(n, 2).expect("valid p");
                let a = ComplexMatrix::unit(n, 0, 0).scale(gaussian(rng) * 2.0);
                match left_symmetric_falsify_with(&a, &space, search, rng) {
                    Ok(r) => expect(r.verdict == LeftSymmetryVerdict::NotFalsified),
                    Err(_) => Item::Violation,
                }
            })
        })
        .fold(Outcome::default(), Outcome::merge);
    Outcome {
        note: format!(
            "refuted {}/{}; E11 multiples kept {}/{}",
            refuted.trials - refuted.violations,
            refuted.trials,
            kept.trials - kept.violations,
            kept.trials
        ),
        ..refuted.merge(kept)
    }
}

/// The falsifier's verdict is unchanged by `(A, 𝒱) ↦ (UAW*, U𝒱W*)`.
pub fn check_transport(count: usize, seed: u64) -> Outcome {
    par_items(count, seed, |i, rng| {
        let n = rng.random_range(3..=4);
        let (a, space) = if i % 2 == 0 {
            let space = OutgoingSpaceSpec::first_row_zeros(n, rng.random_range(3..=n)).unwrap();
            (random_member(rng, &space), space)
        } else {
            let space = OutgoingSpaceSpec::first_row_zeros(n, 2).unwrap();
            (ComplexMatrix::unit(n, 0, 0).scale(unimodular(rng)), space)
        };
        let (u, w) = (unitary(rng, n), unitary(rng, n));
        let moved = u.matmul(&a).matmul(&w.adjoint());
        let moved_space = space.transport(&u, &w);
        let search = 500;
        let before = left_symmetric_falsify_with(&a, &space, search, rng).map(|r| r.verdict);
        let after = left_symmetric_falsify_with(&moved, &moved_space, search, rng).map(|r| r.verdict);
        match (before, after) {
            (Ok(x), Ok(y)) => expect(x == y),
            _ => Item::Violation,
        }
    })
}

/// Empirical check of the `n = 2` description of the left-symmetric points of
/// `𝒱₂ = {X : x₁₂ = 0}`: multiples of `E₁₁`, `E₂₁`, `E₂₂` survive, generic
/// lower-triangular matrices are refuted.
pub fn check_n2_vset(count: usize, seed: u64) -> Outcome {
    let space = OutgoingSpaceSpec::first_row_zeros(2, 2).unwrap();
    par_items(count, seed, |i, rng| {
        let t = gaussian(rng) * 2.0;
        let (a, symmetric) = match i % 4 {
            0 => (ComplexMatrix::unit(2, 0, 0).scale(t), true),
            1 => (ComplexMatrix::unit(2, 1, 0).scale(t), true),
            2 => (ComplexMatrix::unit(2, 1, 1).scale(t), true),
            _ => (random_member(rng, &space), false),
        };
        match left_symmetric_falsify_with(&a, &space, 500, rng) {
            Ok(r) => expect((r.verdict == LeftSymmetryVerdict::NotFalsified) == symmetric),
            Err(_) => Item::Violation,
        }
    })
}

/// Random `n×n` matrix of rank `r`.
fn random_rank(rng: &mut BjRng, n: usize, r: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, r).matmul(&gaussian_matrix(rng, r, n))
}

/// Local dependence of `Ay` and `By` against the scalar-multiple fit, on
/// pairs of every rank.
pub fn check_local_dependence(count: usize, seed: u64) -> Outcome {
    par_items(count, seed, |i, rng| {
        let n = rng.random_range(2..=4);
        let r = rng.random_range(1..=n);
        let a = random_rank(rng, n, r);
        let b = match i % 4 {
            0 => a.scale(gaussian(rng) * 3.0),
            1 => random_rank(rng, n, r),
            2 => {
                let x = gaussian_vector(rng, n);
                let y = gaussian_vector(rng, n);
                let a1 = ComplexMatrix::outer(&x, &y);
                return local_dependence_item(&a1, &ComplexMatrix::outer(&x, &gaussian_vector(rng, n)), rng);
            }
            _ => &a + &random_rank(rng, n, 1).scale_real(1e-3),
        };
        local_dependence_item(&a, &b, rng)
    })
}

fn local_dependence_item(a: &ComplexMatrix, b: &ComplexMatrix, rng: &mut BjRng) -> Item {
    let Ok(local) = locally_dependent_equiv_with(a, b, 16, rng) else { return Item::Violation };
    let fit = scalar_multiple_fit(a, b).1 <= 1e-8;
    expect(local == fit)
}

/// `θ ↦ x x* ⊕ e^{iθ} y y*` against the identity on a `grid`-point sweep.
/// Returns `(θ, state, margin)` per grid point.
pub fn unimodular_sweep(grid: usize, x: &[C64], y: &[C64]) -> Vec<(f64, BjState, f64)> {
    let px = ComplexMatrix::outer(x, x);
    let py = ComplexMatrix::outer(y, y);
    let id = AlgebraElement::identity(&AlgebraShape::new(vec![x.len(), y.len()]).unwrap());
    (0..grid)
        .into_par_iter()
        .map(|k| {
            let theta = TAU * k as f64 / grid as f64;
            let a = AlgebraElement::from_blocks(vec![px.clone(), py.scale(C64::from_polar(1.0, theta))]).unwrap();
            let v = bj_orthogonal_alg(&a, &id).expect("nonzero pair");
            (theta, v.state, v.margin)
        })
        .collect()
}

pub fn check_unimodular_sweep(grid: usize, seed: u64) -> Outcome {
    let mut rng = substream(seed, 0);
    let x = unit_vector(&mut rng, 2);
    let y = unit_vector(&mut rng, 3);
    let grid = grid.max(4);
    let half_cell = PI / grid as f64;
    let sweep = unimodular_sweep(grid, &x, &y);
    let mut o = tally(sweep.iter().map(|&(theta, state, margin)| {
        let in_pi_cell = (theta - PI).abs() < half_cell;
        if in_pi_cell && (theta - PI).abs() < 1e-12 {
            expect(state == BjState::Orthogonal)
        } else if in_pi_cell {
            Item::Ok
        } else {
            expect(state == BjState::NotOrthogonal && -margin > 1e-4)
        }
    }));
    let exact = {
        let a = AlgebraElement::from_blocks(vec![ComplexMatrix::outer(&x, &x), ComplexMatrix::outer(&y, &y).scale_real(-1.0)]).unwrap();
        let id = AlgebraElement::identity(a.shape());
        bj_orthogonal_alg(&a, &id).map(|v| v.state)
    };
    o.trials += 1;
    if exact != Ok(BjState::Orthogonal) {
        o.violations += 1;
    }
    let orth: Vec<String> = sweep.iter().filter(|s| s.1 == BjState::Orthogonal).map(|s| format!("{:.6}", s.0)).collect();
    let min_off = sweep.iter().filter(|s| (s.0 - PI).abs() >= half_cell).map(|s| -s.2).fold(f64::INFINITY, f64::min);
    o.note = format!("orthogonal at theta=[{}]; min distance elsewhere {:.3e}", orth.join(","), min_off);
    o
}

pub fn check_ellipse(count: usize, seed: u64) -> Outcome {
    par_items(count, seed, |_, rng| {
        let n = rng.random_range(2..=4);
        let x: Vec<C64> = gaussian_vector(rng, n).iter().map(|z| z * 3.0).collect();
        let y = gaussian_vector(rng, n);
        match ellipse_hausdorff(&x, &y, 720) {
            Ok(d) => expect(d <= 1e-6 * norm(&x) * norm(&y)),
            Err(_) => Item::Violation,
        }
    })
}

/// Random gauge-times-isometry maps on `(2,2)`, `(2,3)`, `(3,3)`, plus compositions
/// of random isometries, each tested on `pairs` pairs.
pub fn check_theorem_maps(maps_per_shape: usize, pairs: usize, seed: u64) -> Outcome {
    let shapes = [[2usize, 2], [2, 3], [3, 3]];
    let mut total = Outcome::default();
    let mut worst_rate: f64 = 0.0;
    for (si, s) in shapes.iter().enumerate() {
        let shape = AlgebraShape::new(s.to_vec()).unwrap();
        for m in 0..=maps_per_shape {
            let map_seed = seed ^ ((si as u64) << 32) ^ m as u64;
            let mut rng = substream(map_seed, u64::MAX - 1);
            let map = if m < maps_per_shape {
                let gauge = if m == 0 { GaugeSpec::trivial() } else { GaugeSpec::random(&mut rng, &shape) };
                build_theorem_map(&IsometrySpec::random(&mut rng, &shape), &gauge)
            } else {
                let f = BjMap::isometry(IsometrySpec::random(&mut rng, &shape));
                let g = BjMap::isometry(IsometrySpec::random(&mut rng, &shape));
                f.then(&g).expect("same shape")
            };
            let r = strong_preservation_test(&map, &shape, pairs, map_seed);
            worst_rate = worst_rate.max(r.borderline_rate());
            total = total.merge(Outcome {
                trials: r.pairs,
                violations: r.violations + r.map_errors,
                borderline: r.borderline,
                note: String::new(),
            });
        }
    }
    if worst_rate >= 0.02 {
        total.violations += 1;
    }
    total.note = format!("worst borderline rate {:.4}", worst_rate);
    total
}

/// Largest scalar-fit residual of the gauge counterexample over probes
/// `I ⊕ rI`.
pub fn gauge_map_nonscalar_residual(map: &BjMap) -> f64 {
    (1..10)
        .map(|k| {
            let r = k as f64 / 10.0;
            let s = map.shape().block_sizes();
            let x = AlgebraElement::from_blocks(vec![ComplexMatrix::identity(s[0]), ComplexMatrix::identity(s[1]).scale_real(r)]).unwrap();
            scalar_fit_residual(&map.apply(&x).expect("total map"), &x)
        })
        .fold(0.0, f64::max)
}

pub fn check_examples(pairs: usize, seed: u64) -> Outcome {
    let gauge = counterexample_gauge_map(2, 2, IntervalBijection::power(2.0)).unwrap();
    let identity = counterexample_gauge_map(2, 2, IntervalBijection::identity()).unwrap();
    let abelian = counterexample_abelian_map();
    let reports = [
        strong_preservation_test(&gauge, gauge.shape(), pairs, seed),
        strong_preservation_test(&identity, identity.shape(), (pairs / 4).max(1), seed ^ 1),
        strong_preservation_test(&abelian, abelian.shape(), pairs, seed ^ 2),
    ];
    let mut o = reports
        .iter()
        .map(|r| Outcome { trials: r.pairs, violations: r.violations + r.map_errors, borderline: r.borderline, note: String::new() })
        .fold(Outcome::default(), Outcome::merge);
    let gauge_res = gauge_map_nonscalar_residual(&gauge);
    let x = AlgebraElement::from_blocks(vec![ComplexMatrix::identity(1), ComplexMatrix::identity(1).scale(C64::new(0.0, 1.0))]).unwrap();
    let abelian_res = scalar_fit_residual(&abelian.apply(&x).unwrap(), &x);
    o.trials += 2;
    o.violations += usize::from(gauge_res <= 1e-6) + usize::from(abelian_res <= 1e-6);
    o.note = format!("non-scalar residual gauge={gauge_res:.3e} abelian={abelian_res:.3e}");
    o
}

/// `count` random isometries on each of `M₃`, `M₄`: flavor, `U` and `V` are
/// recovered up to diagonal phases.
pub fn check_recover(count: usize, seed: u64) -> Outcome {
    [3usize, 4]
        .iter()
        .map(|&n| {
            par_items(count, seed ^ n as u64, |_, rng| {
                let shape = AlgebraShape::simple(n);
                let spec = IsometrySpec::random(rng, &shape);
                let Ok(s) = recover_rank_one_structure(&BjMap::isometry(spec.clone()), rng.random()) else { return Item::Violation };
                let truth = &spec.blocks()[0];
                let x = random_element(rng, &shape);
                let rebuilt = s.u.matmul(&s.flavor.apply(x.block(0))).matmul(&s.v.adjoint());
                let image = apply_isometry(&spec, &x).unwrap();
                expect(
                    s.flavor == truth.flavor
                        && s.residual <= 1e-8
                        && phase_gauge_residual(&s.u, &truth.u) <= 1e-8
                        && phase_gauge_residual(&s.v, &truth.v) <= 1e-8
                        && scalar_multiple_fit(image.block(0), &rebuilt).1 <= 1e-8,
                )
            })
        })
        .fold(Outcome::default(), Outcome::merge)
}
