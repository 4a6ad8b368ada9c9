//! SIC-POVM candidates: Weyl–Heisenberg orbits, verification, and a numerical
//! fiducial search.
//!
//! The covariant search minimizes
//! `F(z) = sum_{(a,b) != 0} (|<z|X^a Z^b|z>|^2 / |z|^4 - 1/(d+1))^2`
//! over the fiducial only; the free mode optimizes all `d^2` states directly.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{self, expand_labeled, vectorize, Target, TensorCoefficients};
use crate::linalg::{max_abs_diff, phase_half_turns, projector, CMatrix, CVector, C64};
use crate::report::{Check, Worst};

/// Absolute slack on the unit-norm requirement for fiducials.
pub const NORM_SLACK: f64 = 1e-10;
/// Restarts run in fixed-size chunks; the search stops after the first chunk
/// holding a converged run, so results do not depend on the thread count.
pub const RESTART_CHUNK: usize = 8;
/// Iteration cap for the Levenberg–Marquardt polish after gradient descent.
pub const LM_ITERATIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SicError {
    #[error("fiducial norm is {0}, expected 1")]
    NotUnit(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("candidate has {got} states, expected {expected}")]
    WrongCount { expected: usize, got: usize },
    #[error("state {index} has dimension {got}, expected {expected}")]
    WrongDimension { index: usize, expected: usize, got: usize },
    #[error("invalid search configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Optimize one fiducial; states are its Weyl–Heisenberg orbit.
    Covariant,
    /// Optimize all `d^2` states independently.
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub d: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub mode: SearchMode,
}

impl SearchConfig {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            restarts: 50,
            max_iterations: 20_000,
            tolerance: 1e-8,
            seed: 42,
            mode: SearchMode::Covariant,
        }
    }

    fn validate(&self) -> Result<(), SicError> {
        if self.d == 0 {
            return Err(SicError::ZeroDimension);
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(SicError::Config("tolerance must be positive".into()));
        }
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(SicError::Config("restarts and max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Orbit,
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SicCandidate {
    pub d: usize,
    /// `x = a d + b` holds `X^a Z^b |fiducial>` for orbit candidates.
    pub states: Vec<CVector>,
    pub provenance: Provenance,
    pub fiducial: Option<CVector>,
    /// `max_{x != y} | |<x|y>|^2 - 1/(d+1) |`, recomputed from `states`.
    pub residual: f64,
    pub converged: bool,
    pub search: Option<SearchOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    pub restart: usize,
    pub iterations: usize,
    pub restarts_run: usize,
    pub objective: f64,
}

impl SicCandidate {
    pub fn two_j(&self) -> u32 {
        (self.d - 1) as u32
    }

    pub fn from_states(d: usize, states: Vec<CVector>) -> Result<Self, SicError> {
        validate_states(d, &states)?;
        Ok(Self {
            d,
            residual: overlap_residual(d, &states),
            states,
            provenance: Provenance::Explicit,
            fiducial: None,
            converged: false,
            search: None,
        })
    }

    pub fn from_fiducial(fiducial: &CVector) -> Result<Self, SicError> {
        let states = wh_orbit(fiducial)?;
        let d = fiducial.len();
        Ok(Self {
            d,
            residual: overlap_residual(d, &states),
            states,
            provenance: Provenance::Orbit,
            fiducial: Some(fiducial.clone()),
            converged: false,
            search: None,
        })
    }
}

fn validate_states(d: usize, states: &[CVector]) -> Result<(), SicError> {
    if d == 0 {
        return Err(SicError::ZeroDimension);
    }
    if states.len() != d * d {
        return Err(SicError::WrongCount {
            expected: d * d,
            got: states.len(),
        });
    }
    for (index, s) in states.iter().enumerate() {
        if s.len() != d {
            return Err(SicError::WrongDimension {
                index,
                expected: d,
                got: s.len(),
            });
        }
    }
    Ok(())
}

/// `omega^e` for `omega = exp(2 pi i / d)`.
fn omega_pow(d: usize, e: i64) -> C64 {
    phase_half_turns(2 * e, d as i64)
}

/// `X^a Z^b |phi>`: `(X^a Z^b phi)_m = omega^{b(m-a)} phi_{m-a}`.
pub fn displace(phi: &CVector, a: usize, b: usize) -> CVector {
    let d = phi.len();
    CVector::from_fn(d, |m, _| {
        let n = (m + d - a % d) % d;
        omega_pow(d, (b * n) as i64) * phi[n]
    })
}

/// All `d^2` states `X^a Z^b |fiducial>`, index `a d + b`.
pub fn wh_orbit(fiducial: &CVector) -> Result<Vec<CVector>, SicError> {
    let d = fiducial.len();
    if d == 0 {
        return Err(SicError::ZeroDimension);
    }
    let norm = fiducial.norm();
    if (norm - 1.0).abs() > NORM_SLACK {
        return Err(SicError::NotUnit(norm));
    }
    Ok((0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| displace(fiducial, a, b)).collect())
}

/// `max_{x != y} | |<x|y>|^2 - 1/(d+1) |`.
pub fn overlap_residual(d: usize, states: &[CVector]) -> f64 {
    let target = 1.0 / (d as f64 + 1.0);
    let mut worst: f64 = 0.0;
    for (x, u) in states.iter().enumerate() {
        for v in &states[x + 1..] {
            let dev = (u.dotc(v).norm_sqr() - target).abs();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

/// Pairwise overlaps, normalization, identity decomposition, and informational
/// completeness.
pub fn verify_sic(candidate: &SicCandidate, tolerance: f64) -> Result<Vec<Check>, SicError> {
    let d = candidate.d;
    validate_states(d, &candidate.states)?;
    let target = 1.0 / (d as f64 + 1.0);
    let mut norm = Worst::default();
    let mut overlap = Worst::default();
    let mut sum = CMatrix::zeros(d, d);
    for (x, u) in candidate.states.iter().enumerate() {
        norm.update((u.norm_squared() - 1.0).abs(), || format!("x={x}"));
        for (y, v) in candidate.states.iter().enumerate().skip(x + 1) {
            overlap.update((u.dotc(v).norm_sqr() - target).abs(), || format!("x={x} / x={y}"));
        }
        sum += projector(u);
    }
    let identity = max_abs_diff(&(sum / C64::new(d as f64, 0.0)), &CMatrix::identity(d, d));
    let vectors: Vec<_> = sic_coefficients(candidate)?.iter().map(vectorize).collect();
    let completeness = frame::check_informational_completeness(&vectors).expect("validated family");
    Ok(vec![
        norm.into_check("normalization", "unit-trace projectors Tr(P_x^2) = 1", tolerance),
        overlap.into_check("overlap", "symmetric overlaps |<x|y>|^2 = 1/(d+1)", tolerance),
        Check::within("identity_decomposition", "(1/d) sum P_x = identity", identity, tolerance, None),
        completeness.check(),
    ])
}

/// `c_kq(x) = (2k+1) conj(<x|u^(k)_q|x>)`, in state order.
pub fn sic_coefficients(candidate: &SicCandidate) -> Result<Vec<TensorCoefficients>, SicError> {
    validate_states(candidate.d, &candidate.states)?;
    let two_j = candidate.two_j();
    Ok(candidate
        .states
        .iter()
        .enumerate()
        .map(|(x, s)| expand_labeled(&projector(s), two_j, format!("x={x}")).expect("dimension checked"))
        .collect())
}

/// The shared frame battery with the SIC target, the Gram spectrum
/// `{d, d/(d+1) x (d^2-1)}` at `spectrum_tolerance`, and completeness.
pub fn verify_sic_battery(candidate: &SicCandidate, tolerance: f64, spectrum_tolerance: f64) -> Result<Vec<Check>, SicError> {
    let coeffs = sic_coefficients(candidate)?;
    let target = Target::Sic { d: candidate.d };
    let mut checks = frame::battery(&coeffs, &target, tolerance).expect("validated family");
    let vectors: Vec<_> = coeffs.iter().map(vectorize).collect();
    let g = frame::gram(&vectors, &target).expect("validated family");
    checks.push(Check::within(
        "gram_target",
        "Gram matrix of frame vectors (d delta + 1)/(d + 1)",
        g.max_deviation,
        tolerance,
        g.location.clone(),
    ));
    checks.push(frame::check_spectrum(&g, &frame::sic_gram_spectrum(candidate.d), spectrum_tolerance));
    checks.push(frame::check_informational_completeness(&vectors).expect("validated family").check());
    Ok(checks)
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Normalize and rotate the global phase so the first nonzero-able component
/// is real and nonnegative.
fn gauge_fix(z: &mut CVector) {
    let n = z.norm();
    let ph = if z[0].norm() > 0.0 { z[0].conj() / z[0].norm() } else { C64::new(1.0, 0.0) };
    *z *= ph / n;
}

/// Objective of the covariant search and its Wirtinger gradient `dF/d conj(z)`.
struct Covariant {
    d: usize,
    omega: Vec<C64>,
    target: f64,
}

impl Covariant {
    fn new(d: usize) -> Self {
        Self {
            d,
            omega: (0..d).map(|e| omega_pow(d, e as i64)).collect(),
            target: 1.0 / (d as f64 + 1.0),
        }
    }

    /// `(F, max |h - target|)`, with the gradient written into `grad` if given.
    fn eval(&self, z: &CVector, mut grad: Option<&mut CVector>) -> (f64, f64) {
        let d = self.d;
        let n = z.norm_squared();
        let mut f = 0.0;
        let mut worst: f64 = 0.0;
        if let Some(g) = grad.as_deref_mut() {
            g.fill(C64::new(0.0, 0.0));
        }
        let mut az = CVector::zeros(d);
        let mut adz = CVector::zeros(d);
        for a in 0..d {
            for b in 0..d {
                if a == 0 && b == 0 {
                    continue;
                }
                // (A z)_m = omega^{b(m-a)} z_{m-a}; (A^† z)_m = omega^{-bm} z_{m+a}
                for m in 0..d {
                    let src = (m + d - a) % d;
                    az[m] = self.omega[(b * src) % d] * z[src];
                    adz[m] = self.omega[(d - (b * m) % d) % d] * z[(m + a) % d];
                }
                let g = z.dotc(&az);
                let h = g.norm_sqr() / (n * n);
                let e = h - self.target;
                f += e * e;
                worst = worst.max(e.abs());
                if let Some(grad) = grad.as_deref_mut() {
                    let s = 2.0 * e;
                    for m in 0..d {
                        let dh = (az[m] * g.conj() + adz[m] * g) / (n * n) - z[m] * (2.0 * g.norm_sqr() / (n * n * n));
                        grad[m] += dh * s;
                    }
                }
            }
        }
        (f, worst)
    }
}

impl Covariant {
    /// Residuals `h_ab - 1/(d+1)` for `(a,b) != 0` and their Jacobian with
    /// respect to `(Re z, Im z)`.
    fn residuals(&self, z: &CVector) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.d;
        let n = z.norm_squared();
        let rows = d * d - 1;
        let mut r = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, 2 * d);
        let mut az = CVector::zeros(d);
        let mut adz = CVector::zeros(d);
        for (row, (a, b)) in (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).skip(1).enumerate() {
            for m in 0..d {
                let src = (m + d - a) % d;
                az[m] = self.omega[(b * src) % d] * z[src];
                adz[m] = self.omega[(d - (b * m) % d) % d] * z[(m + a) % d];
            }
            let g = z.dotc(&az);
            r[row] = g.norm_sqr() / (n * n) - self.target;
            for m in 0..d {
                let dh = (az[m] * g.conj() + adz[m] * g) / (n * n) - z[m] * (2.0 * g.norm_sqr() / (n * n * n));
                jac[(row, m)] = 2.0 * dh.re;
                jac[(row, d + m)] = 2.0 * dh.im;
            }
        }
        (r, jac)
    }
}

/// Levenberg–Marquardt on the covariant residuals. Used after gradient descent
/// when the minimum is degenerate and descent slows to a crawl. Returns the
/// polished fiducial and the number of iterations taken.
fn polish_covariant(obj: &Covariant, mut z: CVector, max_iterations: usize, target: f64) -> (CVector, usize) {
    let d = obj.d;
    let (mut r, mut jac) = obj.residuals(&z);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut it = 0;
    while it < max_iterations && r.amax() > target && lambda < 1e16 {
        it += 1;
        let jt = jac.transpose();
        let mut normal = &jt * &jac;
        let rhs = -(&jt * &r);
        let scale = normal.diagonal().max().max(f64::MIN_POSITIVE);
        for i in 0..2 * d {
            normal[(i, i)] += lambda * scale;
        }
        let Some(chol) = normal.cholesky() else {
            lambda *= 4.0;
            continue;
        };
        let delta = chol.solve(&rhs);
        let mut trial = CVector::from_fn(d, |m, _| z[m] + C64::new(delta[m], delta[d + m]));
        gauge_fix(&mut trial);
        let (rt, jt2) = obj.residuals(&trial);
        let ct = rt.norm_squared();
        if ct < cost {
            z = trial;
            r = rt;
            jac = jt2;
            cost = ct;
            lambda = (lambda / 3.0).max(1e-15);
        } else {
            lambda *= 4.0;
        }
    }
    (z, it)
}

/// Objective over all `d^2` states; states are kept normalized.
struct Free {
    d: usize,
    target: f64,
}

impl Free {
    fn eval(&self, states: &[CVector], mut grad: Option<&mut [CVector]>) -> (f64, f64) {
        let mut f = 0.0;
        let mut worst: f64 = 0.0;
        if let Some(g) = grad.as_deref_mut() {
            for v in g.iter_mut() {
                v.fill(C64::new(0.0, 0.0));
            }
        }
        let norms: Vec<f64> = states.iter().map(|s| s.norm_squared()).collect();
        for x in 0..states.len() {
            for y in x + 1..states.len() {
                let s = states[x].dotc(&states[y]);
                let nn = norms[x] * norms[y];
                let h = s.norm_sqr() / nn;
                let e = h - self.target;
                f += e * e;
                worst = worst.max(e.abs());
                if let Some(g) = grad.as_deref_mut() {
                    let w = 2.0 * e;
                    // d|s|^2/d conj(z_x) = z_y conj(s); d|s|^2/d conj(z_y) = z_x s
                    let gx = (&states[y] * s.conj()) / C64::new(nn, 0.0) - &states[x] * C64::new(h / norms[x], 0.0);
                    let gy = (&states[x] * s) / C64::new(nn, 0.0) - &states[y] * C64::new(h / norms[y], 0.0);
                    g[x] += gx * C64::new(w, 0.0);
                    g[y] += gy * C64::new(w, 0.0);
                }
            }
        }
        let _ = self.d;
        (f, worst)
    }
}

struct RunResult {
    restart: usize,
    states: Vec<CVector>,
    fiducial: Option<CVector>,
    objective: f64,
    iterations: usize,
}

/// Adaptive-step gradient descent: grow the step by 1.1 on an accepted move,
/// halve it on a rejected one. Stops once the max overlap deviation drops below
/// `polish`, the step underflows, or the budget runs out.
fn descend<P: Clone>(
    mut point: P,
    max_iterations: usize,
    polish: f64,
    mut eval: impl FnMut(&P, Option<&mut P>) -> (f64, f64),
    mut step: impl FnMut(&P, &P, f64) -> P,
) -> (P, f64, usize) {
    let mut grad = point.clone();
    let (mut f, mut worst) = eval(&point, Some(&mut grad));
    let mut eta = 0.1;
    let mut it = 0;
    while it < max_iterations && worst > polish && eta > 1e-30 {
        it += 1;
        let trial = step(&point, &grad, eta);
        let (ft, _) = eval(&trial, None);
        if ft < f {
            point = trial;
            let (f2, w2) = eval(&point, Some(&mut grad));
            f = f2;
            worst = w2;
            eta *= 1.1;
        } else {
            eta *= 0.5;
        }
    }
    (point, f, it)
}

fn run_covariant(cfg: &SearchConfig, restart: usize) -> RunResult {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut z = random_state(&mut rng, d);
    gauge_fix(&mut z);
    let obj = Covariant::new(d);
    let polish = cfg.tolerance * 1e-3;
    let (z, _, mut iterations) = descend(
        z,
        cfg.max_iterations,
        polish,
        |z, g| obj.eval(z, g),
        |z, g, eta| {
            let mut t = z - g * C64::new(eta, 0.0);
            gauge_fix(&mut t);
            t
        },
    );
    let (z, extra) = polish_covariant(&obj, z, LM_ITERATIONS, polish);
    iterations += extra;
    let (objective, _) = obj.eval(&z, None);
    RunResult {
        restart,
        states: wh_orbit(&z).expect("normalized"),
        fiducial: Some(z),
        objective,
        iterations,
    }
}

fn run_free(cfg: &SearchConfig, restart: usize) -> RunResult {
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut states: Vec<CVector> = (0..d * d).map(|_| random_state(&mut rng, d)).collect();
    states.iter_mut().for_each(gauge_fix);
    let obj = Free {
        d,
        target: 1.0 / (d as f64 + 1.0),
    };
    let (states, objective, iterations) = descend(
        states,
        cfg.max_iterations,
        cfg.tolerance * 1e-3,
        |s, g| obj.eval(s, g.map(|v| v.as_mut_slice())),
        |s, g, eta| {
            s.iter()
                .zip(g)
                .map(|(z, gz)| {
                    let mut t = z - gz * C64::new(eta, 0.0);
                    gauge_fix(&mut t);
                    t
                })
                .collect()
        },
    );
    RunResult {
        restart,
        states,
        fiducial: None,
        objective,
        iterations,
    }
}

#[cfg(feature = "parallel")]
fn run_chunk(cfg: &SearchConfig, range: std::ops::Range<usize>) -> Vec<RunResult> {
    use rayon::prelude::*;
    range.into_par_iter().map(|i| run_one(cfg, i)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_chunk(cfg: &SearchConfig, range: std::ops::Range<usize>) -> Vec<RunResult> {
    range.map(|i| run_one(cfg, i)).collect()
}

fn run_one(cfg: &SearchConfig, restart: usize) -> RunResult {
    match cfg.mode {
        SearchMode::Covariant => run_covariant(cfg, restart),
        SearchMode::Free => run_free(cfg, restart),
    }
}

/// Best candidate over seeded restarts (`seed + i` for restart `i`), chosen by
/// minimum residual with ties going to the lowest restart index.
pub fn search_fiducial(config: &SearchConfig) -> Result<SicCandidate, SicError> {
    config.validate()?;
    let d = config.d;
    if d == 1 {
        let one = CVector::from_element(1, C64::new(1.0, 0.0));
        let mut c = SicCandidate::from_fiducial(&one)?;
        c.converged = true;
        c.search = Some(SearchOutcome {
            config: config.clone(),
            restart: 0,
            iterations: 0,
            restarts_run: 0,
            objective: 0.0,
        });
        return Ok(c);
    }
    let mut best: Option<(f64, RunResult)> = None;
    let mut start = 0;
    while start < config.restarts {
        let end = (start + RESTART_CHUNK).min(config.restarts);
        for run in run_chunk(config, start..end) {
            let r = overlap_residual(d, &run.states);
            // strict comparison keeps the lowest index on ties; NaN never wins
            if best.as_ref().is_none_or(|(b, _)| r < *b || b.is_nan()) {
                best = Some((r, run));
            }
        }
        start = end;
        if best.as_ref().is_some_and(|(r, _)| *r < config.tolerance) {
            break;
        }
    }
    let (residual, run) = best.expect("at least one restart");
    Ok(SicCandidate {
        d,
        states: run.states,
        provenance: match run.fiducial {
            Some(_) => Provenance::Orbit,
            None => Provenance::Explicit,
        },
        fiducial: run.fiducial,
        residual,
        converged: residual < config.tolerance,
        search: Some(SearchOutcome {
            config: config.clone(),
            restart: run.restart,
            iterations: run.iterations,
            restarts_run: start,
            objective: run.objective,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Qubit state with Bloch vector `(1,1,1)/sqrt(3)`.
    fn tetrahedron_fiducial() -> CVector {
        let theta = (1.0f64 / 3f64.sqrt()).acos();
        CVector::from_vec(vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), std::f64::consts::FRAC_PI_4),
        ])
    }

    #[test]
    fn basis_fiducial_is_degenerate() {
        let e0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let orbit = wh_orbit(&e0).unwrap();
        assert_eq!(orbit.len(), 4);
        assert_eq!(orbit[1], CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
        assert!((orbit[2][1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        // Z fixes e0, so X Z e0 = e1 as well
        assert!((orbit[3][1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let c = SicCandidate::from_fiducial(&e0).unwrap();
        assert!((c.residual - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_unit_fiducial_rejected() {
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(wh_orbit(&v), Err(SicError::NotUnit(_))));
    }

    #[test]
    fn tetrahedron_orbit() {
        let c = SicCandidate::from_fiducial(&tetrahedron_fiducial()).unwrap();
        assert!(c.residual < 1e-15, "{}", c.residual);
        for check in verify_sic(&c, 1e-12).unwrap() {
            assert!(check.pass, "{check:?}");
        }
        for check in verify_sic_battery(&c, 1e-12, 1e-12).unwrap() {
            assert!(check.pass, "{check:?}");
        }
    }

    #[test]
    fn padded_basis_fails_with_location() {
        let d = 2;
        let mut states: Vec<CVector> = (0..d)
            .map(|i| CVector::from_fn(d, |r, _| C64::new(if r == i { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        states.extend(wh_orbit(&tetrahedron_fiducial()).unwrap().into_iter().take(2));
        let c = SicCandidate::from_states(d, states).unwrap();
        let checks = verify_sic(&c, 1e-10).unwrap();
        let overlap = checks.iter().find(|c| c.name == "overlap").unwrap();
        assert!(!overlap.pass);
        assert!(overlap.location.as_deref().is_some_and(|l| l.starts_with("x=0 /")));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = 4;
        let obj = Covariant::new(d);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = random_state(&mut rng, d);
        let mut g = CVector::zeros(d);
        obj.eval(&z, Some(&mut g));
        let h = 1e-6;
        for m in 0..d {
            for (dir, part) in [(C64::new(1.0, 0.0), 0), (C64::new(0.0, 1.0), 1)] {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[m] += dir * h;
                zm[m] -= dir * h;
                let fd = (obj.eval(&zp, None).0 - obj.eval(&zm, None).0) / (2.0 * h);
                // dF/dRe = 2 Re(dF/dzbar), dF/dIm = 2 Im(dF/dzbar)
                let analytic = if part == 0 { 2.0 * g[m].re } else { 2.0 * g[m].im };
                assert!((fd - analytic).abs() < 1e-7, "m={m} part={part} fd={fd} an={analytic}");
            }
        }
    }

    #[test]
    fn free_gradient_matches_finite_differences() {
        let d = 2;
        let obj = Free { d, target: 1.0 / 3.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let states: Vec<CVector> = (0..4).map(|_| random_state(&mut rng, d)).collect();
        let mut g = vec![CVector::zeros(d); 4];
        obj.eval(&states, Some(&mut g));
        let h = 1e-6;
        for x in 0..4 {
            for m in 0..d {
                let mut sp = states.clone();
                let mut sm = states.clone();
                sp[x][m] += C64::new(0.0, h);
                sm[x][m] -= C64::new(0.0, h);
                let fd = (obj.eval(&sp, None).0 - obj.eval(&sm, None).0) / (2.0 * h);
                assert!((fd - 2.0 * g[x][m].im).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn trivial_dimension() {
        let c = search_fiducial(&SearchConfig::new(1)).unwrap();
        assert_eq!(c.states.len(), 1);
        assert_eq!(c.residual, 0.0);
        assert!(c.converged);
    }

    #[test]
    fn qubit_and_qutrit_searches_converge() {
        for d in [2, 3] {
            let c = search_fiducial(&SearchConfig::new(d)).unwrap();
            assert!(c.converged && c.residual < 1e-8, "d={d} residual={}", c.residual);
            assert_eq!(c.residual, overlap_residual(d, &c.states));
            for check in verify_sic(&c, 1e-8).unwrap() {
                assert!(check.pass, "{check:?}");
            }
        }
    }

    #[test]
    fn free_mode_qubit() {
        let mut cfg = SearchConfig::new(2);
        cfg.mode = SearchMode::Free;
        let c = search_fiducial(&cfg).unwrap();
        assert!(c.converged, "{}", c.residual);
        assert_eq!(c.provenance, Provenance::Explicit);
    }

    #[test]
    fn search_is_deterministic() {
        let cfg = SearchConfig::new(3);
        let a = search_fiducial(&cfg).unwrap();
        let b = search_fiducial(&cfg).unwrap();
        assert_eq!(a, b);
    }
}
