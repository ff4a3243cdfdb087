use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bjorth::bj::{bj_orthogonal_minimize, BjState, BjVerdict};
use bjorth::cstar::{bj_orthogonal_alg, is_smooth, joint_norming_subspace, AlgebraElement};
use bjorth::io::{numrange_csv, read_algebra, serialize_algebra};
use bjorth::linalg::numrange::boundary;
use bjorth::linalg::C64;
use bjorth::maps::{
    counterexample_abelian_map, counterexample_gauge_map, scalar_fit_residual, strong_preservation_test, IntervalBijection,
};
use bjorth::random::DEFAULT_SEED;
use bjorth::tol::EPS_RANK;
use bjorth::verify::{run_suite, SuiteOptions};
use bjorth::BjError;

const EXIT_USAGE: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_SHAPE: u8 = 5;
const EXIT_IO: u8 = 6;
const EXIT_NUMERICAL: u8 = 7;

/// Birkhoff-James orthogonality on direct sums of matrix algebras.
#[derive(Parser)]
#[command(name = "bjorth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Criterion,
    Minimize,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Gauge,
    Abelian,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether A ⊥ B. Exit status 0 = Orthogonal, 1 = NotOrthogonal, 2 = Borderline.
    Check {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "criterion")]
        method: Method,
    },
    /// Print ‖A‖, the blocks attaining it, and an orthonormal basis of M₀(A).
    M0 { a: PathBuf },
    /// Report whether A is smooth.
    Smooth { a: PathBuf },
    /// Write boundary points of the numerical range as `theta,re,im` lines.
    Numrange {
        a: PathBuf,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites. Exit status 0 iff every check passes.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "BJ_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Demonstrate an orthogonality-preserving map that is not an isometry times a scalar.
    Counterexample {
        #[arg(value_enum)]
        which: Example,
        #[arg(long, default_value_t = 2000)]
        pairs: usize,
        #[arg(long, env = "BJ_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn error_code(e: &BjError) -> u8 {
    match e {
        BjError::Parse(_) => EXIT_PARSE,
        BjError::ShapeMismatch(_) | BjError::NonSquare { .. } | BjError::InvalidShape(_) => EXIT_SHAPE,
        BjError::Io(_) => EXIT_IO,
        BjError::UnknownSuite(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn state_code(s: BjState) -> u8 {
    match s {
        BjState::Orthogonal => 0,
        BjState::NotOrthogonal => 1,
        BjState::Borderline => 2,
    }
}

fn vector_json(v: &[C64]) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("[{:e},{:e}]", z.re, z.im)).collect();
    format!("[{}]", parts.join(","))
}

fn verdict_line(label: &str, v: &BjVerdict) -> String {
    let mut s = format!("{label}{} margin={:e}", v.state, v.margin);
    if let Some(w) = &v.witness {
        s.push_str(&format!(" witness={}", vector_json(w)));
    }
    s
}

fn check(a: &Path, b: &Path, method: Method) -> Result<u8, BjError> {
    let (a, b) = (read_algebra(a)?, read_algebra(b)?);
    a.require_same_shape(&b)?;
    let crit = || bj_orthogonal_alg(&a, &b);
    let mini = || bj_orthogonal_minimize(&a.embed(), &b.embed());
    let state = match method {
        Method::Criterion => {
            let v = crit()?;
            println!("{}", verdict_line("", &v));
            v.state
        }
        Method::Minimize => {
            let v = mini()?;
            println!("{}", verdict_line("", &v));
            v.state
        }
        Method::Both => {
            let (c, m) = (crit()?, mini()?);
            println!("{}", verdict_line("criterion ", &c));
            println!("{}", verdict_line("minimize ", &m));
            let agree = c.state == m.state || c.state == BjState::Borderline || m.state == BjState::Borderline;
            println!("agreement={agree}");
            c.state
        }
    };
    Ok(state_code(state))
}

fn m0(path: &Path) -> Result<u8, BjError> {
    let a = read_algebra(path)?;
    let j = joint_norming_subspace(&a, EPS_RANK)?;
    let mut blocks: Vec<usize> = j.tags.clone();
    blocks.dedup();
    println!("norm={:e}", j.norm_value);
    println!("norming_blocks={blocks:?}");
    println!("dim={}", j.dim());
    for (c, &k) in j.tags.iter().enumerate() {
        println!("block={k} vector={}", vector_json(&j.block_vectors(a.shape(), k)[j.tags[..c].iter().filter(|&&t| t == k).count()]));
    }
    Ok(0)
}

fn smooth(path: &Path) -> Result<u8, BjError> {
    let r = is_smooth(&read_algebra(path)?)?;
    println!("smooth={}", r.smooth);
    println!("norming_blocks={:?}", r.norming_blocks);
    println!("m0_dims={:?}", r.m0_dims);
    if let Some(c) = r.certificate {
        println!("certificate block={} vector={}", c.block, vector_json(&c.vector));
    }
    Ok(0)
}

fn numrange(path: &Path, samples: usize, out: Option<&Path>) -> Result<u8, BjError> {
    let a = read_algebra(path)?;
    let csv = numrange_csv(&boundary(&a.embed(), samples)?);
    match out {
        Some(p) => fs::write(p, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(0)
}

fn verify(suite: &str, trials: Option<usize>, seed: u64) -> Result<u8, BjError> {
    let report = run_suite(suite, SuiteOptions { trials, seed })?;
    print!("{}", report.render());
    eprint!("{}", report.render_timings());
    Ok(if report.passed() { 0 } else { 1 })
}

fn counterexample(which: Example, pairs: usize, seed: u64) -> Result<u8, BjError> {
    let (map, probe) = match which {
        Example::Gauge => {
            let map = counterexample_gauge_map(2, 2, IntervalBijection::power(2.0))?;
            let s = map.shape().clone();
            let probe = AlgebraElement::identity(&s).map_blocks(|k, b| if k == 1 { b.scale_real(0.5) } else { b.clone() });
            println!("map: I ⊕ rI ↦ I ⊕ r²I on M_2 ⊕ M_2, identity elsewhere");
            (map, probe)
        }
        Example::Abelian => {
            let map = counterexample_abelian_map();
            let s = map.shape().clone();
            let probe = AlgebraElement::identity(&s).map_blocks(|k, b| if k == 1 { b.scale(C64::new(0.0, 1.0)) } else { b.clone() });
            println!("map: t(1, ri) ↦ t(1, -ri) on C ⊕ C, identity elsewhere");
            (map, probe)
        }
    };
    let image = map.apply(&probe)?;
    println!("probe={}", serialize_algebra(&probe));
    println!("image={}", serialize_algebra(&image));
    println!("scalar_fit_residual={:e}", scalar_fit_residual(&image, &probe));
    let r = strong_preservation_test(&map, map.shape(), pairs, seed);
    println!(
        "preservation pairs={} violations={} borderline={} map_errors={} seed={seed}",
        r.pairs, r.violations, r.borderline, r.map_errors
    );
    Ok(if r.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Check { a, b, method } => check(a, b, *method),
        Command::M0 { a } => m0(a),
        Command::Smooth { a } => smooth(a),
        Command::Numrange { a, samples, out } => numrange(a, *samples, out.as_deref()),
        Command::Verify { suite, trials, seed } => verify(suite, *trials, *seed),
        Command::Counterexample { which, pairs, seed } => counterexample(*which, *pairs, *seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
