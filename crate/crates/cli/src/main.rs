//! `racah-frames` command-line tool.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a search did not
//! converge, 2 usage, I/O or schema error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use racah_frames::family::{encode_matrix, FamilyFile, Kind};
use racah_frames::frame::{self, vectorize, Target};
use racah_frames::mub;
use racah_frames::report::{Check, Report};
use racah_frames::sic::{self, SearchConfig, SearchMode};
use racah_frames::tensor::{self, basis};
use racah_frames::wigner::{run_identity_suite, six_j, three_jm, Exactness, HalfInt, SignedSqrtRational, SuiteOptions};

const THREADS_ENV: &str = "RACAH_FRAMES_THREADS";

#[derive(Parser)]
#[command(name = "racah-frames", version, about = "Exact Wigner symbols, unit tensors, SIC and MUB frame checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact 3-jm and 6-j symbols.
    #[command(subcommand)]
    Wigner(WignerCmd),
    /// Exact 3-jm/6-j identity suite plus the unit-tensor battery.
    Identities(IdentitiesArgs),
    /// Unit-tensor matrices.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Mutually unbiased bases for prime dimensions.
    #[command(subcommand)]
    Mub(MubCmd),
    /// SIC-POVM search and verification.
    #[command(subcommand)]
    Sic(SicCmd),
    /// Frame-vector checks on any family file.
    #[command(subcommand)]
    Frame(FrameCmd),
}

#[derive(Subcommand)]
enum WignerCmd {
    /// (j1 j2 j3; m1 m2 m3)
    #[command(name = "3jm")]
    ThreeJm {
        #[arg(long)]
        j1: HalfInt,
        #[arg(long)]
        j2: HalfInt,
        #[arg(long)]
        j3: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m1: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m2: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m3: HalfInt,
    },
    /// {j1 j2 j3; j4 j5 j6}
    #[command(name = "6j")]
    SixJ {
        #[arg(long)]
        j1: HalfInt,
        #[arg(long)]
        j2: HalfInt,
        #[arg(long)]
        j3: HalfInt,
        #[arg(long)]
        j4: HalfInt,
        #[arg(long)]
        j5: HalfInt,
        #[arg(long)]
        j6: HalfInt,
    },
}

#[derive(Args)]
struct ReportOut {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 8)]
    max_two_j: u32,
    /// Compare in floating point instead of exactly.
    #[arg(long)]
    float: bool,
    /// Negative control: corrupt one tabulated 3-jm sign.
    #[arg(long)]
    inject_sign_flip: bool,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Dump u^(k)_q matrices as JSON (all of them unless --k/--q given).
    Dump {
        #[arg(long)]
        two_j: u32,
        #[arg(long, requires = "q")]
        k: Option<u32>,
        #[arg(long, requires = "k", allow_hyphen_values = true)]
        q: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MubCmd {
    /// Build the d+1 bases for prime d.
    Build {
        #[arg(short)]
        d: usize,
        /// Also store the expansion coefficients of every member.
        #[arg(long)]
        coefficients: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify unbiasedness and the frame battery.
    Verify {
        file: PathBuf,
        /// Tolerance for the overlap table and identity decomposition.
        #[arg(long, default_value_t = mub::DEFAULT_TOLERANCE)]
        overlap_tol: f64,
        /// Tolerance for the frame battery.
        #[arg(long, default_value_t = frame::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Also compare every coefficient with the closed form.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Attach expansion coefficients to every member.
    Coeffs {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SicCmd {
    /// Search for a SIC by gradient descent with random restarts.
    Search {
        #[arg(short)]
        d: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 20_000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optimize a Weyl–Heisenberg fiducial (default).
        #[arg(long, conflicts_with = "free")]
        covariant: bool,
        /// Optimize all d^2 states independently.
        #[arg(long)]
        free: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify overlaps, identity decomposition and the frame battery.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = frame::SEARCH_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        spectrum_tol: f64,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Attach expansion coefficients to every member.
    Coeffs {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Run the frame battery on a family file, detecting its kind.
    Check {
        file: PathBuf,
        /// Defaults to 1e-8 for SIC families and 1e-10 otherwise.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        spectrum_tol: f64,
        #[command(flatten)]
        report: ReportOut,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("{THREADS_ENV}={raw:?} is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn command_echo() -> Vec<String> {
    std::env::args().skip(1).collect()
}

/// Write via a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read_family(path: &Path) -> Result<FamilyFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FamilyFile::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn finish(mut report: Report, started: Instant, out: &ReportOut) -> Result<bool> {
    report.wall_time_s = started.elapsed().as_secs_f64();
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(out.out.as_deref(), &text)?;
    for c in report.failures() {
        eprintln!(
            "FAIL {} ({}): residual {:e} > {:e} at {}",
            c.name,
            c.relation,
            c.residual,
            c.tolerance,
            c.location.as_deref().unwrap_or("-")
        );
    }
    Ok(report.pass)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Wigner(w) => cmd_wigner(w),
        Command::Identities(a) => cmd_identities(a),
        Command::Tensor(TensorCmd::Dump { two_j, k, q, out }) => cmd_tensor_dump(two_j, k.zip(q), out),
        Command::Mub(m) => cmd_mub(m),
        Command::Sic(s) => cmd_sic(s),
        Command::Frame(FrameCmd::Check {
            file,
            tol,
            spectrum_tol,
            report,
        }) => cmd_frame_check(&file, tol, spectrum_tol, &report),
    }
}

fn print_symbol(v: &SignedSqrtRational) {
    println!("{v}");
    println!("sign: {}", v.sign());
    println!("square: {}", v.square());
    println!("decimal: {}", v.to_f64());
}

fn cmd_wigner(w: WignerCmd) -> Result<bool> {
    let v = match w {
        WignerCmd::ThreeJm { j1, j2, j3, m1, m2, m3 } => three_jm(j1, j2, j3, m1, m2, m3)?,
        WignerCmd::SixJ { j1, j2, j3, j4, j5, j6 } => six_j(j1, j2, j3, j4, j5, j6)?,
    };
    print_symbol(&v);
    Ok(true)
}

fn cmd_identities(a: IdentitiesArgs) -> Result<bool> {
    let started = Instant::now();
    let exactness = if a.float { Exactness::Float } else { Exactness::Exact };
    let suite = run_identity_suite(SuiteOptions {
        max_two_j: a.max_two_j,
        exactness,
        inject_sign_flip: a.inject_sign_flip,
    });
    let mut entries = suite.checks();
    for two_j in 0..=a.max_two_j {
        entries.extend(tensor::tensor_battery(two_j, tensor::DEFAULT_TOLERANCE));
    }
    let mut report = Report::new(command_echo(), entries);
    let counts: Value = suite
        .tallies
        .iter()
        .map(|t| (t.name.to_string(), json!({"checked": t.checked, "failed": t.failed, "inexact": t.inexact})))
        .collect::<serde_json::Map<_, _>>()
        .into();
    report.details.insert("identity_counts".into(), counts);
    finish(report, started, &a.report)
}

fn cmd_tensor_dump(two_j: u32, only: Option<(u32, i32)>, out: Option<PathBuf>) -> Result<bool> {
    let tensors = match only {
        Some((k, q)) => vec![tensor::unit_tensor(two_j, k, q)?],
        None => basis(two_j).tensors.clone(),
    };
    let doc = json!({
        "j": {"two_j": two_j},
        "tensors": tensors.iter().map(|t| json!({
            "i": frame::frame_index(t.k, t.q) + 1,
            "k": t.k,
            "q": t.q,
            "matrix": encode_matrix(&t.matrix),
        })).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(out.as_deref(), &text)?;
    Ok(true)
}

fn attach_and_write(mut f: FamilyFile, out: Option<&Path>) -> Result<bool> {
    let coeffs = f.coefficients()?;
    f.attach_coefficients(&coeffs)?;
    emit(out, &f.to_json())?;
    Ok(true)
}

fn cmd_mub(m: MubCmd) -> Result<bool> {
    match m {
        MubCmd::Build { d, coefficients, out } => {
            let set = mub::build_prime_mubs(d)?;
            let f = FamilyFile::from_mub(&set);
            if coefficients {
                return attach_and_write(f, out.as_deref());
            }
            emit(out.as_deref(), &f.to_json())?;
            Ok(true)
        }
        MubCmd::Verify {
            file,
            overlap_tol,
            tol,
            closed_form,
            report,
        } => {
            let started = Instant::now();
            let f = read_family(&file)?;
            let set = f.to_mub()?;
            let mut entries = mub::verify_mubs(&set, overlap_tol)?;
            entries.extend(mub::verify_mub_battery(&set, tol)?);
            if closed_form {
                let coeffs = mub::mub_coefficients(&set)?;
                entries.push(mub::check_dual_route(&set, &coeffs, overlap_tol)?);
            }
            finish(Report::new(command_echo(), entries), started, &report)
        }
        MubCmd::Coeffs { file, out } => attach_and_write(read_family(&file)?, out.as_deref()),
    }
}

fn cmd_sic(s: SicCmd) -> Result<bool> {
    match s {
        SicCmd::Search {
            d,
            restarts,
            max_iterations,
            tol,
            seed,
            covariant: _,
            free,
            out,
        } => {
            let config = SearchConfig {
                d,
                restarts,
                max_iterations,
                tolerance: tol,
                seed,
                mode: if free { SearchMode::Free } else { SearchMode::Covariant },
            };
            let c = sic::search_fiducial(&config)?;
            emit(out.as_deref(), &FamilyFile::from_sic(&c).to_json())?;
            eprintln!(
                "d={d} residual={:e} {}",
                c.residual,
                if c.converged { "converged" } else { "NOT converged" }
            );
            Ok(c.converged)
        }
        SicCmd::Verify {
            file,
            tol,
            spectrum_tol,
            report,
        } => {
            let started = Instant::now();
            let c = read_family(&file)?.to_sic()?;
            let mut entries = sic::verify_sic(&c, tol)?;
            entries.extend(sic::verify_sic_battery(&c, tol, spectrum_tol)?);
            let mut r = Report::new(command_echo(), entries);
            r.details.insert("residual".into(), c.residual.into());
            finish(r, started, &report)
        }
        SicCmd::Coeffs { file, out } => attach_and_write(read_family(&file)?, out.as_deref()),
    }
}

fn cmd_frame_check(file: &Path, tol: Option<f64>, spectrum_tol: f64, out: &ReportOut) -> Result<bool> {
    let started = Instant::now();
    let f = read_family(file)?;
    if f.members.is_empty() {
        bail!("{} has no members", file.display());
    }
    let tol = tol.unwrap_or(match f.kind {
        Kind::Sic => frame::SEARCH_TOLERANCE,
        _ => frame::DEFAULT_TOLERANCE,
    });
    let target = f.target()?;
    let coeffs = f.coefficients()?;
    let vectors: Vec<_> = coeffs.iter().map(vectorize).collect();
    let mut entries = frame::battery(&coeffs, &target, tol)?;
    let g = frame::gram(&vectors, &target)?;
    if !matches!(target, Target::Generic) {
        entries.push(Check::within(
            "gram_target",
            "Gram matrix of frame vectors against the family target",
            g.max_deviation,
            tol,
            g.location.clone(),
        ));
    }
    if let Target::Sic { d } = target {
        entries.push(frame::check_spectrum(&g, &frame::sic_gram_spectrum(d), spectrum_tol));
    }
    let completeness = frame::check_informational_completeness(&vectors)?;
    if !matches!(target, Target::Generic) {
        entries.push(completeness.check());
    }
    let mut report = Report::new(command_echo(), entries);
    report.details.insert("kind".into(), f.kind.to_string().into());
    report.details.insert("gram_spectrum".into(), g.eigen_spectrum.clone().into());
    report.details.insert("rank".into(), completeness.rank.into());
    finish(report, started, out)
}
