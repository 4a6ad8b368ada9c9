//! Complete sets of `d + 1` mutually unbiased bases for prime `d`.
//!
//! With `n = j + m` (so row `r = d - 1 - n`), member `|a alpha>` for `a < d` has
//! amplitude `omega^t / sqrt(d)` where `2t = n(d - n) a + 2 n alpha`; the basis
//! `a = d` is the computational basis with `alpha = n`. Exponents are kept as
//! exact integers `2t` and reduced modulo `2d` before exponentiation, so the
//! half-integral exponents that occur at `d = 2` need no special case.

use thiserror::Error;

use crate::frame::{self, expand_labeled, vectorize, Target, TensorCoefficients};
use crate::linalg::{max_abs_diff, phase_half_turns, projector, CMatrix, CVector, C64};
use crate::report::{Check, Worst};
use crate::tensor::basis;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MubError {
    #[error("d must be prime for this construction (got {0})")]
    NotPrime(usize),
    #[error("set has {got} bases of dimension {d}, expected at least one")]
    Empty { d: usize, got: usize },
    #[error("basis {basis} has {got} vectors, expected {d}")]
    Ragged { basis: usize, d: usize, got: usize },
    #[error("index out of range: a = {a}, alpha = {alpha}, d = {d}")]
    IndexOutOfRange { d: usize, a: usize, alpha: usize },
}

/// `bases[a][alpha]` is the unit vector `|a alpha>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    pub d: usize,
    pub bases: Vec<Vec<CVector>>,
}

impl MubSet {
    pub fn two_j(&self) -> u32 {
        (self.d - 1) as u32
    }

    /// Members in `(a, alpha)` order.
    pub fn members(&self) -> impl Iterator<Item = (usize, usize, &CVector)> {
        self.bases
            .iter()
            .enumerate()
            .flat_map(|(a, b)| b.iter().enumerate().map(move |(alpha, v)| (a, alpha, v)))
    }

    pub fn len(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<(), MubError> {
        if self.bases.is_empty() {
            return Err(MubError::Empty { d: self.d, got: 0 });
        }
        for (a, b) in self.bases.iter().enumerate() {
            if b.len() != self.d || b.iter().any(|v| v.len() != self.d) {
                return Err(MubError::Ragged {
                    basis: a,
                    d: self.d,
                    got: b.len(),
                });
            }
        }
        Ok(())
    }
}

/// Deterministic trial division.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Twice the exponent `t` of `omega` for `n = j + m`.
fn twice_exponent(d: usize, a: usize, alpha: usize, n: usize) -> i64 {
    let (d, a, alpha, n) = (d as i64, a as i64, alpha as i64, n as i64);
    n * (d - n) * a + 2 * n * alpha
}

pub fn mub_vector(d: usize, a: usize, alpha: usize) -> Result<CVector, MubError> {
    if !is_prime(d) {
        return Err(MubError::NotPrime(d));
    }
    if a > d || alpha >= d {
        return Err(MubError::IndexOutOfRange { d, a, alpha });
    }
    if a == d {
        // row r holds n = d - 1 - r
        return Ok(CVector::from_fn(d, |r, _| C64::new(if d - 1 - r == alpha { 1.0 } else { 0.0 }, 0.0)));
    }
    let scale = 1.0 / (d as f64).sqrt();
    // omega^t = exp(2 pi i t / d) = exp(i pi (2t) / d)
    Ok(CVector::from_fn(d, |r, _| {
        phase_half_turns(twice_exponent(d, a, alpha, d - 1 - r), d as i64) * scale
    }))
}

pub fn build_prime_mubs(d: usize) -> Result<MubSet, MubError> {
    if !is_prime(d) {
        return Err(MubError::NotPrime(d));
    }
    let bases = (0..=d)
        .map(|a| (0..d).map(|alpha| mub_vector(d, a, alpha)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MubSet { d, bases })
}

/// Overlap table `|<a alpha|b beta>|^2` against its target, and the identity
/// decomposition `(1/(d+1)) sum P = I` (only meaningful for complete sets).
pub fn verify_mubs(set: &MubSet, tolerance: f64) -> Result<Vec<Check>, MubError> {
    set.validate()?;
    let d = set.d;
    let members: Vec<_> = set.members().collect();
    let mut norm = Worst::default();
    let mut within = Worst::default();
    let mut across = Worst::default();
    for &(a, alpha, u) in &members {
        norm.update((u.norm_squared() - 1.0).abs(), || format!("a={a},alpha={alpha}"));
        for &(b, beta, v) in &members {
            if (a, alpha) >= (b, beta) {
                continue;
            }
            let o = u.dotc(v).norm_sqr();
            let loc = || format!("a={a},alpha={alpha} / a={b},alpha={beta}");
            if a == b {
                within.update(o, loc);
            } else {
                across.update((o - 1.0 / d as f64).abs(), loc);
            }
        }
    }
    let mut sum = CMatrix::zeros(d, d);
    for &(_, _, v) in &members {
        sum += projector(v);
    }
    let identity_residual = max_abs_diff(&(sum / C64::new(set.bases.len() as f64, 0.0)), &CMatrix::identity(d, d));
    Ok(vec![
        norm.into_check("normalization", "unit-norm basis vectors", tolerance),
        within.into_check("orthogonality", "orthonormal bases", tolerance),
        across.into_check("unbiasedness", "mutual unbiasedness |<a alpha|b beta>|^2 = 1/d", tolerance),
        Check::within(
            "identity_decomposition",
            "(1/(d+1)) sum of all projectors = identity",
            identity_residual,
            tolerance,
            None,
        ),
    ])
}

/// `d_kq(a alpha) = (2k+1) conj(<a alpha|u^(k)_q|a alpha>)`, in `(a, alpha)` order.
pub fn mub_coefficients(set: &MubSet) -> Result<Vec<TensorCoefficients>, MubError> {
    set.validate()?;
    let two_j = set.two_j();
    Ok(set
        .members()
        .map(|(a, alpha, v)| expand_labeled(&projector(v), two_j, format!("a={a},alpha={alpha}")).expect("dimension checked"))
        .collect())
}

/// `d_kq(a alpha)` from the closed-form double sum over `(m, m')` with phase
/// `omega^{theta(m, m')}`, `theta = (m - m')[(1 - m - m') a/2 + alpha]`; for
/// `a = d` only `q = 0` survives.
pub fn closed_form_dkq(d: usize, a: usize, alpha: usize, k: u32, q: i32) -> Result<C64, MubError> {
    if !is_prime(d) {
        return Err(MubError::NotPrime(d));
    }
    if a > d || alpha >= d {
        return Err(MubError::IndexOutOfRange { d, a, alpha });
    }
    let b = basis((d - 1) as u32);
    let u = &b.get(k, q).matrix;
    let weight = f64::from(2 * k + 1);
    if a == d {
        if q != 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let r = d - 1 - alpha;
        return Ok(C64::new(weight * u[(r, r)].re, 0.0));
    }
    // u already carries (-1)^{j-m}. With M = 2m, M' = 2m':
    // 2 theta = (M - M') ((2 - M - M') a + 4 alpha) / 4, an integer since M - M'
    // and M + M' are both even.
    let two_j = (d - 1) as i64;
    let mut sum = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            let entry = u[(r, c)].re;
            if entry == 0.0 {
                continue;
            }
            let big_m = two_j - 2 * r as i64;
            let big_mp = two_j - 2 * c as i64;
            let num = (big_m - big_mp) * ((2 - big_m - big_mp) * a as i64 + 4 * alpha as i64);
            // omega^theta = exp(i pi (2 theta) / d)
            sum += phase_half_turns(num / 4, d as i64) * entry;
        }
    }
    Ok(sum * (weight / d as f64))
}

/// Both routes to `d_kq` at every `(a, alpha, k, q)`; worst absolute difference.
pub fn check_dual_route(set: &MubSet, coeffs: &[TensorCoefficients], tolerance: f64) -> Result<Check, MubError> {
    let mut worst = Worst::default();
    for ((a, alpha, _), c) in set.members().zip(coeffs) {
        for (k, q, z) in c.iter() {
            let closed = closed_form_dkq(set.d, a, alpha, k, q)?;
            worst.update((closed - z).norm(), || format!("a={a},alpha={alpha},k={k},q={q}"));
        }
    }
    Ok(worst.into_check("dual_route", "expansion coefficients agree with closed form", tolerance))
}

/// The shared frame battery with MUB targets, plus informational completeness.
pub fn verify_mub_battery(set: &MubSet, tolerance: f64) -> Result<Vec<Check>, MubError> {
    let coeffs = mub_coefficients(set)?;
    let target = Target::Mub {
        d: set.d,
        basis_of: set.members().map(|(a, _, _)| a).collect(),
    };
    let mut checks = frame::battery(&coeffs, &target, tolerance).expect("validated family");
    let vectors: Vec<_> = coeffs.iter().map(vectorize).collect();
    checks.push(
        frame::check_informational_completeness(&vectors)
            .expect("validated family")
            .check(),
    );
    Ok(checks)
}
