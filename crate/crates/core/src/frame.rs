//! Operators expanded in the unit-tensor basis, their frame vectors in
//! `C^{(2j+1)^2}`, and the structural checks shared by SIC and MUB families.

use thiserror::Error;

use crate::linalg::{hermitian_spectrum, hs_inner, rank, CMatrix, C64};
use crate::report::{Check, Worst};
use crate::tensor::{basis, coupling_table, TensorBasis};

/// Tolerance for checks on constructed (not optimized) inputs.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Tolerance for checks on inputs produced by numerical search.
pub const SEARCH_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("operator is {rows}x{cols}, expected {d}x{d}")]
    DimensionMismatch { d: usize, rows: usize, cols: usize },
    #[error("vector has {got} components, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("members mix different spins")]
    MixedSpins,
}

/// Zero-based position of `(k, q)`: `k^2 + k + q`. Serialized indices add one.
pub fn frame_index(k: u32, q: i32) -> usize {
    let k = k as i64;
    (k * k + k + i64::from(q)) as usize
}

/// Inverse of [`frame_index`].
pub fn frame_kq(i: usize) -> (u32, i32) {
    let k = (i as f64).sqrt() as u32;
    // guard against float rounding at perfect squares
    let k = if (k as usize + 1).pow(2) <= i { k + 1 } else { k };
    let k = if (k as usize).pow(2) > i { k - 1 } else { k };
    (k, i as i32 - (k * k + k) as i32)
}

/// Coefficients `c_kq` of `A = sum c_kq u^(k)_q`, stored in frame-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorCoefficients {
    pub two_j: u32,
    pub coeffs: Vec<C64>,
    pub label: String,
}

impl TensorCoefficients {
    pub fn zeros(two_j: u32, label: impl Into<String>) -> Self {
        Self {
            two_j,
            coeffs: vec![C64::new(0.0, 0.0); (two_j as usize + 1).pow(2)],
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn get(&self, k: u32, q: i32) -> C64 {
        self.coeffs[frame_index(k, q)]
    }

    pub fn set(&mut self, k: u32, q: i32, value: C64) {
        self.coeffs[frame_index(k, q)] = value;
    }

    /// `(k, q, c_kq)` in frame-index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, C64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| {
            let (k, q) = frame_kq(i);
            (k, q, c)
        })
    }
}

/// `v_i = c_kq / sqrt(2k+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameVector {
    pub two_j: u32,
    pub components: Vec<C64>,
}

impl FrameVector {
    pub fn dot(&self, other: &FrameVector) -> C64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn expand(operator: &CMatrix, two_j: u32) -> Result<TensorCoefficients, FrameError> {
    expand_labeled(operator, two_j, String::new())
}

pub fn expand_labeled(operator: &CMatrix, two_j: u32, label: String) -> Result<TensorCoefficients, FrameError> {
    let d = two_j as usize + 1;
    if operator.shape() != (d, d) {
        return Err(FrameError::DimensionMismatch {
            d,
            rows: operator.nrows(),
            cols: operator.ncols(),
        });
    }
    Ok(expand_with(&basis(two_j), operator, label))
}

/// `c_kq = (2k+1) Tr(u^(k)_q^† A)`, which makes [`reconstruct`] an exact inverse.
pub(crate) fn expand_with(b: &TensorBasis, operator: &CMatrix, label: String) -> TensorCoefficients {
    let coeffs = b
        .tensors
        .iter()
        .map(|u| hs_inner(&u.matrix, operator) * f64::from(2 * u.k + 1))
        .collect();
    TensorCoefficients {
        two_j: b.two_j,
        coeffs,
        label,
    }
}

pub fn reconstruct(coeffs: &TensorCoefficients) -> CMatrix {
    let b = basis(coeffs.two_j);
    let mut out = CMatrix::zeros(b.dim(), b.dim());
    for (u, &c) in b.tensors.iter().zip(&coeffs.coeffs) {
        if c != C64::new(0.0, 0.0) {
            out += &u.matrix * c;
        }
    }
    out
}

pub fn vectorize(coeffs: &TensorCoefficients) -> FrameVector {
    let components = coeffs
        .iter()
        .map(|(k, _, c)| c / f64::from(2 * k + 1).sqrt())
        .collect();
    FrameVector {
        two_j: coeffs.two_j,
        components,
    }
}

pub fn devectorize(v: &FrameVector, label: impl Into<String>) -> Result<TensorCoefficients, FrameError> {
    let expected = (v.two_j as usize + 1).pow(2);
    if v.components.len() != expected {
        return Err(FrameError::LengthMismatch {
            expected,
            got: v.components.len(),
        });
    }
    let coeffs = v
        .components
        .iter()
        .enumerate()
        .map(|(i, &z)| z * f64::from(2 * frame_kq(i).0 + 1).sqrt())
        .collect();
    Ok(TensorCoefficients {
        two_j: v.two_j,
        coeffs,
        label: label.into(),
    })
}

/// Expected pairwise structure of a family.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// `(d delta_xy + 1) / (d + 1)`.
    Sic { d: usize },
    /// `delta_ab delta_alphabeta + (1 - delta_ab) / d`; `basis_of[i]` is the
    /// basis index `a` of member `i`.
    Mub { d: usize, basis_of: Vec<usize> },
    /// No pairwise expectation.
    Generic,
}

impl Target {
    pub fn mub_complete(d: usize) -> Self {
        Target::Mub {
            d,
            basis_of: (0..d * (d + 1)).map(|i| i / d).collect(),
        }
    }

    pub fn expected(&self, x: usize, y: usize) -> Option<f64> {
        match self {
            Target::Sic { d } => Some(if x == y { 1.0 } else { 1.0 / (*d as f64 + 1.0) }),
            Target::Mub { d, basis_of } => Some(if x == y {
                1.0
            } else if basis_of[x] == basis_of[y] {
                0.0
            } else {
                1.0 / *d as f64
            }),
            Target::Generic => None,
        }
    }

    /// Multiple of the identity the complete family sums to.
    pub fn identity_multiple(&self) -> Option<f64> {
        match self {
            Target::Sic { d } => Some(*d as f64),
            Target::Mub { d, .. } => Some(*d as f64 + 1.0),
            Target::Generic => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Target::Sic { d } => format!("(d delta + 1)/(d + 1), d = {d}"),
            Target::Mub { d, .. } => format!("delta delta + (1 - delta)/d, d = {d}"),
            Target::Generic => "none".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramReport {
    pub matrix: CMatrix,
    pub target: String,
    /// Max entry deviation from the target; zero when there is no target.
    pub max_deviation: f64,
    pub location: Option<String>,
    pub hermiticity_residual: f64,
    /// Descending.
    pub eigen_spectrum: Vec<f64>,
}

pub fn gram(vectors: &[FrameVector], target: &Target) -> Result<GramReport, FrameError> {
    let first = vectors.first().ok_or(FrameError::Empty)?;
    if vectors.iter().any(|v| v.two_j != first.two_j) {
        return Err(FrameError::MixedSpins);
    }
    let n = vectors.len();
    let matrix = CMatrix::from_fn(n, n, |x, y| vectors[x].dot(&vectors[y]));
    let mut worst = Worst::default();
    for x in 0..n {
        for y in 0..n {
            if let Some(e) = target.expected(x, y) {
                worst.update((matrix[(x, y)] - C64::new(e, 0.0)).norm(), || format!("x={x},y={y}"));
            }
        }
    }
    let hermiticity_residual = crate::linalg::max_abs_diff(&matrix, &matrix.adjoint());
    Ok(GramReport {
        eigen_spectrum: hermitian_spectrum(&matrix),
        target: target.describe(),
        max_deviation: worst.value,
        location: worst.location,
        hermiticity_residual,
        matrix,
    })
}

/// Expected Gram spectrum of a SIC: `d` once, `d/(d+1)` with multiplicity `d^2 - 1`.
pub fn sic_gram_spectrum(d: usize) -> Vec<f64> {
    let mut s = vec![d as f64];
    s.extend(std::iter::repeat_n(d as f64 / (d as f64 + 1.0), d * d - 1));
    s
}

pub fn check_spectrum(report: &GramReport, expected: &[f64], tolerance: f64) -> Check {
    if report.eigen_spectrum.len() != expected.len() {
        return Check::flag(
            "gram_spectrum",
            "Gram spectrum",
            false,
            Some(format!("{} eigenvalues, expected {}", report.eigen_spectrum.len(), expected.len())),
        );
    }
    let mut worst = Worst::default();
    for (i, (a, b)) in report.eigen_spectrum.iter().zip(expected).enumerate() {
        worst.update((a - b).abs(), || format!("eigenvalue {i}"));
    }
    worst.into_check("gram_spectrum", "Gram spectrum", tolerance)
}

/// `c_00 = 1/sqrt(2j+1)` (trace one).
pub fn check_first_component(coeffs: &TensorCoefficients, tolerance: f64) -> Check {
    let expected = 1.0 / (coeffs.dim() as f64).sqrt();
    Check::within(
        "first_component",
        "first component c_00 = 1/sqrt(2j+1)",
        (coeffs.get(0, 0) - C64::new(expected, 0.0)).norm(),
        tolerance,
        Some(coeffs.label.clone()),
    )
}

/// `conj(c_kq) = (-1)^q c_{k,-q}`.
pub fn check_conjugation(coeffs: &TensorCoefficients, tolerance: f64) -> Check {
    let mut worst = Worst::default();
    for (k, q, c) in coeffs.iter() {
        let s = if q % 2 == 0 { 1.0 } else { -1.0 };
        let dev = (c.conj() - coeffs.get(k, -q) * s).norm();
        worst.update(dev, || format!("{} k={k} q={q}", coeffs.label));
    }
    worst.into_check("conjugation", "complex conjugation property", tolerance)
}

/// `sum_k 1/(2k+1) sum_q conj(c_kq(x)) c_kq(y)`.
pub fn invariant_product(x: &TensorCoefficients, y: &TensorCoefficients) -> C64 {
    x.iter()
        .zip(&y.coeffs)
        .map(|((k, _, a), b)| a.conj() * b / f64::from(2 * k + 1))
        .sum()
}

pub fn check_rotational_invariance(x: &TensorCoefficients, y: &TensorCoefficients, expected: f64, tolerance: f64) -> Check {
    Check::within(
        "rotational_invariance",
        "rotationally invariant pair product",
        (invariant_product(x, y) - C64::new(expected, 0.0)).norm(),
        tolerance,
        Some(format!("{} / {}", x.label, y.label)),
    )
}

/// Per-`(K, Q)` residuals of `c_KQ/(2K+1) = sum (-1)^{2j-Q} 3jm 6j c_kq c_lp`.
pub fn quadratic_residuals(coeffs: &TensorCoefficients) -> Vec<C64> {
    let table = coupling_table(coeffs.two_j);
    let n = table.basis_len();
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    for (a, &ca) in coeffs.coeffs.iter().enumerate() {
        if ca == C64::new(0.0, 0.0) {
            continue;
        }
        for (b, &cb) in coeffs.coeffs.iter().enumerate() {
            let prod = ca * cb;
            for t in table.terms(a * n + b) {
                rhs[t.out] += prod * t.factor;
            }
        }
    }
    coeffs
        .iter()
        .zip(rhs)
        .map(|((k, _, c), r)| c / f64::from(2 * k + 1) - r)
        .collect()
}

pub fn check_quadratic_system(coeffs: &TensorCoefficients, tolerance: f64) -> Check {
    let mut worst = Worst::default();
    for (i, r) in quadratic_residuals(coeffs).iter().enumerate() {
        let (k, q) = frame_kq(i);
        worst.update(r.norm(), || format!("{} K={k} Q={q}", coeffs.label));
    }
    worst.into_check("quadratic_system", "idempotency nonlinear system", tolerance)
}

/// `||v||^2 = 1`, the `K = 0` consequence of the quadratic system.
pub fn check_normalization(coeffs: &TensorCoefficients, tolerance: f64) -> Check {
    Check::within(
        "normalization",
        "frame vector normalization",
        (vectorize(coeffs).norm_sqr() - 1.0).abs(),
        tolerance,
        Some(coeffs.label.clone()),
    )
}

/// `sum_x sum_kq c_kq(x) (j k j; -m q m') = (-1)^{j-m} s delta_{mm'}`, with `s`
/// the multiple of the identity the family resolves.
pub fn check_sum_rule(family: &[TensorCoefficients], identity_multiple: f64, tolerance: f64) -> Result<Check, FrameError> {
    let first = family.first().ok_or(FrameError::Empty)?;
    if family.iter().any(|c| c.two_j != first.two_j) {
        return Err(FrameError::MixedSpins);
    }
    let b = basis(first.two_j);
    let d = b.dim();
    let mut total = TensorCoefficients::zeros(first.two_j, "sum");
    for c in family {
        for (t, z) in total.coeffs.iter_mut().zip(&c.coeffs) {
            *t += z;
        }
    }
    let mut worst = Worst::default();
    for r in 0..d {
        // Row r is m = j - r, so (-1)^{j-m} = (-1)^r; u entries already carry it.
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        for c in 0..d {
            let lhs: C64 = b
                .tensors
                .iter()
                .zip(&total.coeffs)
                .map(|(u, z)| z * u.matrix[(r, c)] * sign)
                .sum();
            let rhs = if r == c { sign * identity_multiple } else { 0.0 };
            worst.update((lhs - C64::new(rhs, 0.0)).norm(), || format!("row={r},col={c}"));
        }
    }
    Ok(worst.into_check("sum_rule", "sum rule over the whole family", tolerance))
}

#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub rank: usize,
    pub required: usize,
    pub complete: bool,
}

impl CompletenessReport {
    pub fn check(&self) -> Check {
        Check::flag(
            "informational_completeness",
            "family spans the operator space",
            self.complete,
            Some(format!("rank={} of {}", self.rank, self.required)),
        )
    }
}

pub fn check_informational_completeness(vectors: &[FrameVector]) -> Result<CompletenessReport, FrameError> {
    let first = vectors.first().ok_or(FrameError::Empty)?;
    let n = (first.two_j as usize + 1).pow(2);
    if vectors.iter().any(|v| v.components.len() != n) {
        return Err(FrameError::MixedSpins);
    }
    let m = CMatrix::from_fn(vectors.len(), n, |r, c| vectors[r].components[c]);
    let r = rank(&m, 1e-9);
    Ok(CompletenessReport {
        rank: r,
        required: n,
        complete: r == n,
    })
}

/// Worst-case aggregation of a per-member check.
fn worst_of(name: &str, relation: &str, checks: impl Iterator<Item = Check>, tolerance: f64) -> Check {
    let mut worst = Worst::default();
    for c in checks {
        worst.update(c.residual, || c.location.clone().unwrap_or_default());
    }
    worst.into_check(name, relation, tolerance)
}

/// The five structural checks (first component, conjugation, rotational
/// invariance, quadratic system, sum rule) plus normalization, each reduced to
/// its worst member.
pub fn battery(family: &[TensorCoefficients], target: &Target, tolerance: f64) -> Result<Vec<Check>, FrameError> {
    let first = family.first().ok_or(FrameError::Empty)?;
    if family.iter().any(|c| c.two_j != first.two_j) {
        return Err(FrameError::MixedSpins);
    }
    let mut out = vec![
        worst_of(
            "first_component",
            "first component c_00 = 1/sqrt(2j+1)",
            family.iter().map(|c| check_first_component(c, tolerance)),
            tolerance,
        ),
        worst_of(
            "conjugation",
            "complex conjugation property",
            family.iter().map(|c| check_conjugation(c, tolerance)),
            tolerance,
        ),
    ];
    if target.expected(0, 0).is_some() {
        let mut worst = Worst::default();
        for (x, cx) in family.iter().enumerate() {
            for (y, cy) in family.iter().enumerate() {
                let e = target.expected(x, y).unwrap();
                let dev = (invariant_product(cx, cy) - C64::new(e, 0.0)).norm();
                worst.update(dev, || format!("{} / {}", cx.label, cy.label));
            }
        }
        out.push(worst.into_check("rotational_invariance", "rotationally invariant pair product", tolerance));
    }
    out.push(worst_of(
        "quadratic_system",
        "idempotency nonlinear system",
        family.iter().map(|c| check_quadratic_system(c, tolerance)),
        tolerance,
    ));
    out.push(worst_of(
        "normalization",
        "frame vector normalization",
        family.iter().map(|c| check_normalization(c, tolerance)),
        tolerance,
    ));
    if let Some(s) = target.identity_multiple() {
        out.push(check_sum_rule(family, s, tolerance)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, projector, CVector};
    use crate::wigner::{three_jm, HalfInt};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn index_map() {
        assert_eq!(frame_index(0, 0) + 1, 1);
        assert_eq!(frame_index(1, 1) + 1, 4);
        assert_eq!(frame_index(2, -2) + 1, 5);
        for i in 0..400 {
            let (k, q) = frame_kq(i);
            assert_eq!(frame_index(k, q), i);
        }
    }

    #[test]
    fn expand_identity() {
        let e = expand(&CMatrix::identity(2, 2), 1).unwrap();
        assert!((e.get(0, 0) - c(2f64.sqrt())).norm() < 1e-15);
        assert!(e.coeffs[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn expand_spin_up_projector() {
        let p = projector(&CVector::from_vec(vec![c(1.0), c(0.0)]));
        let e = expand(&p, 1).unwrap();
        let h = HalfInt::from_twice(1);
        let three = three_jm(h, HalfInt::from_int(1), h, -h, HalfInt::from_int(0), h).unwrap().to_f64();
        // c_10 = 3 * u_10[0,0] = 3 * (+1) * (1/2 1 1/2; -1/2 0 1/2)
        assert!((e.get(0, 0) - c(1.0 / 2f64.sqrt())).norm() < 1e-15);
        assert!((e.get(1, 0) - c(3.0 * three)).norm() < 1e-15);
        assert!((e.get(1, 0).norm() - (3.0f64 / 2.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.get(1, 1), c(0.0));
        assert_eq!(e.get(1, -1), c(0.0));
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            expand(&CMatrix::identity(3, 3), 1).unwrap_err(),
            FrameError::DimensionMismatch { d: 2, rows: 3, cols: 3 }
        );
        let v = FrameVector {
            two_j: 1,
            components: vec![c(1.0); 3],
        };
        assert!(matches!(devectorize(&v, ""), Err(FrameError::LengthMismatch { expected: 4, got: 3 })));
    }

    #[test]
    fn reconstruct_examples() {
        let mut t = TensorCoefficients::zeros(1, "");
        t.set(0, 0, c(1.0 / 2f64.sqrt()));
        assert!(max_abs_diff(&reconstruct(&t), &(CMatrix::identity(2, 2) * c(0.5))) < 1e-15);
        assert_eq!(reconstruct(&TensorCoefficients::zeros(2, "")), CMatrix::zeros(3, 3));
    }

    #[test]
    fn first_component_and_conjugation() {
        for two_j in 1..=2 {
            let d = two_j as usize + 1;
            let p = projector(&CVector::from_fn(d, |i, _| c(if i == 0 { 1.0 } else { 0.0 })));
            let e = expand(&p, two_j).unwrap();
            assert!(check_first_component(&e, 1e-14).pass);
            assert!(check_conjugation(&e, 1e-14).pass);
            // diagonal operator: every q != 0 coefficient vanishes
            assert!(e.iter().all(|(_, q, z)| q == 0 || z.norm() < 1e-15));
        }
        let traceless = expand(&CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-1.0)])), 1).unwrap();
        assert!(!check_first_component(&traceless, 1e-10).pass);
        let mut shift = CMatrix::zeros(2, 2);
        shift[(0, 1)] = c(1.0);
        assert!(!check_conjugation(&expand(&shift, 1).unwrap(), 1e-10).pass);
    }

    #[test]
    fn quadratic_system_on_projectors() {
        for two_j in 0..=4u32 {
            let d = two_j as usize + 1;
            for m in 0..d {
                let p = projector(&CVector::from_fn(d, |i, _| c(if i == m { 1.0 } else { 0.0 })));
                let e = expand(&p, two_j).unwrap();
                assert!(check_quadratic_system(&e, 1e-12).pass);
                assert!(check_normalization(&e, 1e-12).pass);
            }
        }
        let half = expand(&(CMatrix::identity(2, 2) * c(0.5)), 1).unwrap();
        assert!(!check_quadratic_system(&half, 1e-10).pass);
    }

    #[test]
    fn k0_equation_is_normalization() {
        // For a Hermitian trace-one operator the K = 0 equation reads
        // (1 - ||v||^2) / sqrt(d) = 0.
        let d = 3;
        let op = CMatrix::from_fn(d, d, |r, c_| C64::new((r + c_) as f64, r as f64 - c_ as f64));
        let op = &op / op.trace();
        let e = expand(&op, 2).unwrap();
        let r0 = quadratic_residuals(&e)[0];
        let norm = vectorize(&e).norm_sqr();
        assert!((r0 - c((1.0 - norm) / (d as f64).sqrt())).norm() < 1e-12);
    }

    #[test]
    fn gram_single_and_empty() {
        let v = FrameVector {
            two_j: 0,
            components: vec![c(2.0)],
        };
        let g = gram(&[v], &Target::Generic).unwrap();
        assert_eq!(g.matrix[(0, 0)], c(4.0));
        assert!(matches!(gram(&[], &Target::Generic), Err(FrameError::Empty)));
    }

    #[test]
    fn completeness_rank() {
        let vs: Vec<_> = (0..3)
            .map(|i| {
                let p = projector(&CVector::from_fn(2, |r, _| c(if r == i % 2 { 1.0 } else { 0.0 })));
                vectorize(&expand(&p, 1).unwrap())
            })
            .collect();
        let r = check_informational_completeness(&vs).unwrap();
        assert_eq!(r.rank, 2);
        assert!(!r.complete);
    }

    #[test]
    fn degenerate_spin_zero() {
        let e = expand(&CMatrix::identity(1, 1), 0).unwrap();
        let checks = battery(&[e], &Target::Sic { d: 1 }, 1e-12).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }
}
