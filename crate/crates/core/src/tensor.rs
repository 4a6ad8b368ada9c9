//! Racah unit tensors `u^(k)_q` as dense matrices on the spin-`j` space.
//!
//! Rows and columns are ordered by descending projection, index `r` holding
//! `m = j - r`. Entry `(m, m')` is `(-1)^{j-m} (j k j; -m q m')`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::frame::{frame_index, TensorCoefficients};
use crate::linalg::{hs_inner, max_abs_diff, rank, CMatrix, C64};
use crate::report::{Check, Worst};
use crate::wigner::{six_j_surd, three_jm_surd};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor order k = {k} out of range for 2j = {two_j}")]
    OrderOutOfRange { two_j: u32, k: u32 },
    #[error("component q = {q} out of range for k = {k}")]
    ComponentOutOfRange { k: u32, q: i32 },
}

#[derive(Clone, Debug)]
pub struct UnitTensor {
    pub two_j: u32,
    pub k: u32,
    pub q: i32,
    pub matrix: CMatrix,
}

fn check_indices(two_j: u32, k: u32, q: i32) -> Result<(), TensorError> {
    if k > two_j {
        return Err(TensorError::OrderOutOfRange { two_j, k });
    }
    if q.unsigned_abs() > k {
        return Err(TensorError::ComponentOutOfRange { k, q });
    }
    Ok(())
}

/// `(-1)^{j-m} (j k j; -m q m')` for row `r` and column `c`.
fn element(two_j: u32, k: u32, q: i32, r: usize, c: usize) -> f64 {
    let j = two_j as i32;
    let m = j - 2 * r as i32;
    let mp = j - 2 * c as i32;
    let v = three_jm_surd([j, 2 * k as i32, j], [-m, 2 * q, mp]).to_f64();
    if r.is_multiple_of(2) {
        v
    } else {
        -v
    }
}

pub fn unit_tensor(two_j: u32, k: u32, q: i32) -> Result<UnitTensor, TensorError> {
    check_indices(two_j, k, q)?;
    let d = two_j as usize + 1;
    let mut matrix = CMatrix::zeros(d, d);
    for c in 0..d {
        // Only m = m' + q survives: r = c - q.
        let r = c as i64 - i64::from(q);
        if (0..d as i64).contains(&r) {
            matrix[(r as usize, c)] = C64::new(element(two_j, k, q, r as usize, c), 0.0);
        }
    }
    Ok(UnitTensor { two_j, k, q, matrix })
}

/// All `(2j+1)^2` unit tensors in frame-index order `k^2 + k + q`.
#[derive(Debug)]
pub struct TensorBasis {
    pub two_j: u32,
    pub tensors: Vec<UnitTensor>,
}

impl TensorBasis {
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn get(&self, k: u32, q: i32) -> &UnitTensor {
        &self.tensors[frame_index(k, q)]
    }
}

static BASES: OnceLock<Mutex<HashMap<u32, Arc<TensorBasis>>>> = OnceLock::new();

/// The cached unit-tensor basis for `two_j`.
pub fn basis(two_j: u32) -> Arc<TensorBasis> {
    let cache = BASES.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&two_j) {
        return b.clone();
    }
    let mut tensors = Vec::with_capacity((two_j as usize + 1).pow(2));
    for k in 0..=two_j {
        for q in -(k as i32)..=k as i32 {
            tensors.push(unit_tensor(two_j, k, q).expect("indices in range"));
        }
    }
    let b = Arc::new(TensorBasis { two_j, tensors });
    cache.lock().unwrap().entry(two_j).or_insert(b).clone()
}

fn sign(q: i32) -> f64 {
    if q % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `u^(k)_q^† = (-1)^q u^(k)_{-q}`.
pub fn check_hermitian_conjugation(two_j: u32, k: u32, q: i32, tolerance: f64) -> Result<Check, TensorError> {
    check_indices(two_j, k, q)?;
    let b = basis(two_j);
    let lhs = b.get(k, q).matrix.adjoint();
    let rhs = &b.get(k, -q).matrix * C64::new(sign(q), 0.0);
    Ok(Check::within(
        "hermitian_conjugation",
        "unit-tensor Hermitian conjugation",
        max_abs_diff(&lhs, &rhs),
        tolerance,
        Some(format!("2j={two_j} k={k} q={q}")),
    ))
}

/// Expected `Tr(u^(k)_q^† u^(l)_p)`.
pub fn expected_trace(k: u32, q: i32, l: u32, p: i32) -> f64 {
    if k == l && q == p {
        1.0 / f64::from(2 * k + 1)
    } else {
        0.0
    }
}

/// `Tr(u^(k)_q^† u^(l)_p) = delta_{kl} delta_{qp} / (2k+1)` over all pairs.
pub fn check_trace_orthogonality(two_j: u32, tolerance: f64) -> Check {
    let b = basis(two_j);
    let mut worst = Worst::default();
    for a in &b.tensors {
        for c in &b.tensors {
            let t = hs_inner(&a.matrix, &c.matrix);
            let dev = (t - C64::new(expected_trace(a.k, a.q, c.k, c.q), 0.0)).norm();
            worst.update(dev, || format!("2j={two_j} (k,q)=({},{}) (l,p)=({},{})", a.k, a.q, c.k, c.q));
        }
    }
    worst.into_check("trace_orthogonality", "unit-tensor trace orthogonality", tolerance)
}

/// Expansion of `u^(k)_q u^(l)_p` in the unit-tensor basis:
/// coefficient of `u^(K)_Q` is `(-1)^{2j-Q} (2K+1) (k l K; -q -p Q) {k l K; j j j}`.
pub fn couple(two_j: u32, k: u32, q: i32, l: u32, p: i32) -> Result<TensorCoefficients, TensorError> {
    check_indices(two_j, k, q)?;
    check_indices(two_j, l, p)?;
    let mut out = TensorCoefficients::zeros(two_j, format!("u({k},{q}) u({l},{p})"));
    let big_q = q + p;
    let j = two_j as i32;
    for big_k in k.abs_diff(l)..=(k + l).min(two_j) {
        if big_q.unsigned_abs() > big_k {
            continue;
        }
        let g = coupling_factor(j, k as i32, q, l as i32, p, big_k as i32);
        out.set(big_k, big_q, C64::new(f64::from(2 * big_k + 1) * g, 0.0));
    }
    Ok(out)
}

/// `(-1)^{2j-Q} (k l K; -q -p Q) {k l K; j j j}` with `Q = q + p`; `j` twice-valued,
/// everything else integer.
fn coupling_factor(two_j: i32, k: i32, q: i32, l: i32, p: i32, big_k: i32) -> f64 {
    let big_q = q + p;
    let three = three_jm_surd([2 * k, 2 * l, 2 * big_k], [-2 * q, -2 * p, 2 * big_q]);
    if three.is_zero() {
        return 0.0;
    }
    let six = six_j_surd([2 * k, 2 * l, 2 * big_k, two_j, two_j, two_j]);
    let v = three.mul(&six).to_f64();
    if (two_j - big_q).rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

/// Coupling-relation reconstruction of every product `u^(k)_q u^(l)_p`.
pub fn check_coupling(two_j: u32, tolerance: f64) -> Check {
    let b = basis(two_j);
    let table = coupling_table(two_j);
    let n = b.tensors.len();
    let mut worst = Worst::default();
    for (ia, a) in b.tensors.iter().enumerate() {
        for (ib, c) in b.tensors.iter().enumerate() {
            let direct = &a.matrix * &c.matrix;
            let mut sum = CMatrix::zeros(b.dim(), b.dim());
            for t in table.terms(ia * n + ib) {
                let big = &b.tensors[t.out];
                sum += &big.matrix * C64::new(f64::from(2 * big.k + 1) * t.factor, 0.0);
            }
            let dev = max_abs_diff(&direct, &sum);
            worst.update(dev, || format!("2j={two_j} (k,q)=({},{}) (l,p)=({},{})", a.k, a.q, c.k, c.q));
        }
    }
    worst.into_check("coupling_relation", "unit-tensor coupling relation", tolerance)
}

/// The `K = 0` term of the coupling relation against the trace relation:
/// `Tr(u^(k)_q u^(l)_p) = sqrt(2j+1) * coeff_{00}`.
pub fn check_coupling_trace_consistency(two_j: u32, tolerance: f64) -> Check {
    let b = basis(two_j);
    let sqrt_d = (b.dim() as f64).sqrt();
    let mut worst = Worst::default();
    for a in &b.tensors {
        for c in &b.tensors {
            // u_q^(k) = (-1)^q u_{-q}^(k)^†
            let expected = sign(a.q) * expected_trace(a.k, -a.q, c.k, c.q);
            let coeff = couple(two_j, a.k, a.q, c.k, c.q).expect("indices in range").get(0, 0);
            let dev = (coeff * sqrt_d - C64::new(expected, 0.0)).norm();
            worst.update(dev, || format!("2j={two_j} (k,q)=({},{}) (l,p)=({},{})", a.k, a.q, c.k, c.q));
        }
    }
    worst.into_check("coupling_k0_trace", "coupling relation at K=0 reproduces trace relation", tolerance)
}

#[derive(Clone, Debug)]
pub struct LieClosureReport {
    pub two_j: u32,
    pub rank: usize,
    pub max_commutator_residual: f64,
    pub checks: Vec<Check>,
}

/// Commutators of unit tensors expand in the unit-tensor basis, and the
/// `(2j+1)^2` tensors are linearly independent.
pub fn check_lie_closure(two_j: u32, tolerance: f64) -> LieClosureReport {
    let b = basis(two_j);
    let n = b.tensors.len();
    let mut gram = CMatrix::zeros(n, n);
    for (i, a) in b.tensors.iter().enumerate() {
        for (k, c) in b.tensors.iter().enumerate() {
            gram[(i, k)] = hs_inner(&a.matrix, &c.matrix);
        }
    }
    let r = rank(&gram, 1e-10);
    let mut worst = Worst::default();
    for a in &b.tensors {
        for c in &b.tensors {
            let comm = &a.matrix * &c.matrix - &c.matrix * &a.matrix;
            let projected = crate::frame::reconstruct(&crate::frame::expand_with(&b, &comm, String::new()));
            let dev = max_abs_diff(&comm, &projected);
            worst.update(dev, || format!("[u({},{}), u({},{})]", a.k, a.q, c.k, c.q));
        }
    }
    let max_commutator_residual = worst.value;
    let checks = vec![
        worst.into_check("lie_closure", "commutators close on the unit-tensor span", tolerance),
        Check::within(
            "basis_rank",
            "unit tensors are linearly independent",
            (n - r) as f64,
            0.0,
            Some(format!("2j={two_j} rank={r} of {n}")),
        ),
    ];
    LieClosureReport {
        two_j,
        rank: r,
        max_commutator_residual,
        checks,
    }
}

/// Numerical coupling factors for every `(k q)(l p) -> (K Q)`, used by the
/// idempotency system of rank-one projectors.
#[derive(Debug)]
pub struct CouplingTable {
    pub two_j: u32,
    /// Start offset into `terms` for each pair index `a * n + b`.
    offsets: Vec<usize>,
    terms: Vec<CouplingTerm>,
}

#[derive(Clone, Copy, Debug)]
pub struct CouplingTerm {
    /// Frame index of the output tensor `(K, Q)`.
    pub out: usize,
    /// `(-1)^{2j-Q} (k l K; -q -p Q) {k l K; j j j}`, without the `2K+1`.
    pub factor: f64,
}

impl CouplingTable {
    fn build(two_j: u32) -> Self {
        let j = two_j as i32;
        let idx: Vec<(u32, i32)> = (0..=two_j).flat_map(|k| (-(k as i32)..=k as i32).map(move |q| (k, q))).collect();
        let mut six = HashMap::new();
        let mut offsets = Vec::with_capacity(idx.len() * idx.len() + 1);
        let mut terms = Vec::new();
        for &(k, q) in &idx {
            for &(l, p) in &idx {
                offsets.push(terms.len());
                let big_q = q + p;
                for big_k in k.abs_diff(l)..=(k + l).min(two_j) {
                    if big_q.unsigned_abs() > big_k {
                        continue;
                    }
                    let three = three_jm_surd([2 * k as i32, 2 * l as i32, 2 * big_k as i32], [-2 * q, -2 * p, 2 * big_q]);
                    if three.is_zero() {
                        continue;
                    }
                    let s = six
                        .entry((k, l, big_k))
                        .or_insert_with(|| six_j_surd([2 * k as i32, 2 * l as i32, 2 * big_k as i32, j, j, j]));
                    let mut factor = three.mul(s).to_f64();
                    if (j - big_q).rem_euclid(2) != 0 {
                        factor = -factor;
                    }
                    terms.push(CouplingTerm {
                        out: frame_index(big_k, big_q),
                        factor,
                    });
                }
            }
        }
        offsets.push(terms.len());
        Self { two_j, offsets, terms }
    }

    pub fn terms(&self, pair: usize) -> &[CouplingTerm] {
        &self.terms[self.offsets[pair]..self.offsets[pair + 1]]
    }

    pub fn basis_len(&self) -> usize {
        (self.two_j as usize + 1).pow(2)
    }
}

static COUPLING: OnceLock<Mutex<HashMap<u32, Arc<CouplingTable>>>> = OnceLock::new();

/// The cached coupling table for `two_j`.
pub fn coupling_table(two_j: u32) -> Arc<CouplingTable> {
    let cache = COUPLING.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&two_j) {
        return t.clone();
    }
    let t = Arc::new(CouplingTable::build(two_j));
    cache.lock().unwrap().entry(two_j).or_insert(t).clone()
}

/// Every unit-tensor relation for one `two_j`.
pub fn tensor_battery(two_j: u32, tolerance: f64) -> Vec<Check> {
    let b = basis(two_j);
    let mut herm = Worst::default();
    for t in &b.tensors {
        let c = check_hermitian_conjugation(two_j, t.k, t.q, tolerance).expect("indices in range");
        herm.update(c.residual, || c.location.clone().unwrap_or_default());
    }
    let mut checks = vec![
        herm.into_check("hermitian_conjugation", "unit-tensor Hermitian conjugation", tolerance),
        check_trace_orthogonality(two_j, tolerance),
        check_coupling(two_j, tolerance),
        check_coupling_trace_consistency(two_j, tolerance),
    ];
    checks.extend(check_lie_closure(two_j, tolerance).checks);
    for c in &mut checks {
        c.name = format!("{}[2j={two_j}]", c.name);
    }
    checks
}
