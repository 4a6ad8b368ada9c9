//! Plain-Rust halves of the exports, testable off the browser.

use racah_frames::frame::{self, vectorize, Target};
use racah_frames::linalg::CVector;
use racah_frames::mub::{self, build_prime_mubs};
use racah_frames::sic::{self, SearchConfig};
use racah_frames::wigner::{six_j, three_jm, HalfInt, SignedSqrtRational};
use serde_json::json;

/// Largest dimension the page offers; keeps searches interactive.
pub const MAX_DEMO_DIM: usize = 8;

fn parse(args: [&str; 6]) -> Result<[HalfInt; 6], String> {
    let mut out = [HalfInt::default(); 6];
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    }
    Ok(out)
}

fn symbol_json(v: SignedSqrtRational) -> String {
    json!({
        "exact": v.to_string(),
        "square": v.square().to_string(),
        "decimal": v.to_f64(),
    })
    .to_string()
}

pub fn three_jm_json(args: [&str; 6]) -> Result<String, String> {
    let [j1, j2, j3, m1, m2, m3] = parse(args)?;
    three_jm(j1, j2, j3, m1, m2, m3).map(symbol_json).map_err(|e| e.to_string())
}

pub fn six_j_json(args: [&str; 6]) -> Result<String, String> {
    let [a, b, c, d, e, f] = parse(args)?;
    six_j(a, b, c, d, e, f).map(symbol_json).map_err(|e| e.to_string())
}

/// Row-major `|<x|y>|^2` over a list of unit vectors.
fn overlaps(states: &[CVector]) -> Vec<f64> {
    states.iter().flat_map(|u| states.iter().map(move |v| u.dotc(v).norm_sqr())).collect()
}

pub fn mub_overlaps_json(d: usize) -> Result<String, String> {
    if d > 2 * MAX_DEMO_DIM {
        return Err(format!("d = {d} is too large for the demo"));
    }
    let set = build_prime_mubs(d).map_err(|e| e.to_string())?;
    let states: Vec<CVector> = set.members().map(|(_, _, v)| v.clone()).collect();
    let labels: Vec<String> = set.members().map(|(a, alpha, _)| format!("a={a},alpha={alpha}")).collect();
    let worst = mub::verify_mubs(&set, mub::DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    Ok(json!({ "d": d, "n": states.len(), "labels": labels, "overlaps": overlaps(&states), "worst_residual": worst })
        .to_string())
}

pub fn sic_search_json(d: usize, seed: u64) -> Result<String, String> {
    if !(1..=MAX_DEMO_DIM).contains(&d) {
        return Err(format!("d must be between 1 and {MAX_DEMO_DIM}"));
    }
    let mut config = SearchConfig::new(d);
    config.restarts = 8;
    config.seed = seed;
    let c = sic::search_fiducial(&config).map_err(|e| e.to_string())?;
    let vectors: Vec<_> = sic::sic_coefficients(&c).map_err(|e| e.to_string())?.iter().map(vectorize).collect();
    let g = frame::gram(&vectors, &Target::Sic { d }).map_err(|e| e.to_string())?;
    let rank = frame::check_informational_completeness(&vectors).map_err(|e| e.to_string())?.rank;
    Ok(json!({
        "d": d,
        "n": c.states.len(),
        "converged": c.converged,
        "residual": c.residual,
        "overlaps": overlaps(&c.states),
        "gram_deviation": g.max_deviation,
        "rank": rank,
        "fiducial": c.fiducial.as_ref().map(|f| f.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()),
    })
    .to_string())
}
