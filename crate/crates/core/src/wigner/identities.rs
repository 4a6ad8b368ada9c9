//! Checks of the standard 3-jm / 6-j relations the unit-tensor calculus
//! rests on: both orthogonality relations, the barycenter sum rule and the
//! contraction of three 3-jm symbols into a 3-jm times a 6-j symbol.
//!
//! Every sum here has a single radical shared by all of its terms (the
//! magnetic factorials pair up), so [`ExactSum`] reduces each side to one
//! rational multiple of one square root and the comparison is exact.

use std::borrow::Cow;
use std::collections::HashMap;

use super::half_int::HalfInt;
use super::primes::{self, Exps};
use super::surd::{ExactSum, Surd};
use super::symbols::{six_j_surd, three_jm_surd, triangle_twice};
use crate::report::Check;

/// Outcome of one identity evaluation.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub lhs: ExactSum,
    pub rhs: ExactSum,
    pub pass: bool,
    /// False when a term could not be kept in exact form.
    pub exact: bool,
}

impl IdentityCheck {
    fn compare(lhs: ExactSum, rhs: ExactSum) -> Self {
        let exact = lhs.is_exact() && rhs.is_exact();
        let pass = lhs.equals(&rhs);
        Self { lhs, rhs, pass, exact }
    }
}

/// Comparison mode for the identity suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    /// Rational equality, tolerance zero.
    Exact,
    /// Double precision with absolute tolerance `1e-12`.
    Float,
}

pub(crate) const FLOAT_TOLERANCE: f64 = 1e-12;

/// Where the 3-jm and 6-j values come from.
pub(crate) trait SymbolSource {
    fn three_jm(&self, j: [i32; 3], m: [i32; 3]) -> Cow<'_, Surd>;
    fn six_j(&self, j: [i32; 6]) -> Cow<'_, Surd>;
}

struct Direct;

impl SymbolSource for Direct {
    fn three_jm(&self, j: [i32; 3], m: [i32; 3]) -> Cow<'_, Surd> {
        Cow::Owned(three_jm_surd(j, m))
    }

    fn six_j(&self, j: [i32; 6]) -> Cow<'_, Surd> {
        Cow::Owned(six_j_surd(j))
    }
}

fn sign(negative: bool) -> i64 {
    if negative {
        -1
    } else {
        1
    }
}

/// `(-1)^(x/2)` for an even twice-valued `x`.
fn phase(twice: i32) -> i64 {
    debug_assert!(twice % 2 == 0);
    sign((twice / 2).rem_euclid(2) == 1)
}

fn rational(num: i64, den: i64) -> Surd {
    // Exponents are halved on evaluation, so den^-1 is stored as -2 per prime.
    let mut s = Surd::from_int(num);
    let (e, rest) = primes::factor_small(&num_bigint::BigUint::from(den as u64), 64);
    assert!(rest == num_bigint::BigUint::from(1u32), "denominator {den} has a large prime");
    let mut exps = Exps::new();
    primes::add_scaled(&mut exps, &e, -2);
    s.exps = exps;
    s
}

/// `sqrt(n)` as a surd.
fn sqrt_int(n: i64) -> Surd {
    let (e, rest) = primes::factor_small(&num_bigint::BigUint::from(n as u64), 64);
    assert!(rest == num_bigint::BigUint::from(1u32), "{n} has a large prime");
    Surd {
        int: 1.into(),
        exps: e,
    }
}

fn orthogonality_mm_with(src: &impl SymbolSource, j: i32, jp: i32, k: i32, q: i32, l: i32, p: i32) -> IdentityCheck {
    let mut lhs = ExactSum::new();
    for m in (-j..=j).step_by(2) {
        for mp in (-jp..=jp).step_by(2) {
            let a = src.three_jm([j, jp, k], [m, mp, q]);
            if a.is_zero() {
                continue;
            }
            let b = src.three_jm([j, jp, l], [m, mp, p]);
            lhs.push_surd(&a.mul(&b));
        }
    }
    let mut rhs = ExactSum::new();
    if k == l && q == p && triangle_twice(j, jp, k) && q.abs() <= k {
        rhs.push_surd(&rational(1, i64::from(k) + 1));
    }
    IdentityCheck::compare(lhs, rhs)
}

fn orthogonality_kq_with(src: &impl SymbolSource, j: i32, jp: i32, m: [i32; 2], big_m: [i32; 2]) -> IdentityCheck {
    let mut lhs = ExactSum::new();
    let q = -(m[0] + m[1]);
    if q == -(big_m[0] + big_m[1]) {
        for k in ((j - jp).abs()..=j + jp).step_by(2) {
            let a = src.three_jm([j, jp, k], [m[0], m[1], q]);
            if a.is_zero() {
                continue;
            }
            let b = src.three_jm([j, jp, k], [big_m[0], big_m[1], q]);
            lhs.push_surd(&a.mul(&b).scale(i64::from(k) + 1));
        }
    }
    let mut rhs = ExactSum::new();
    if m == big_m {
        rhs.push_surd(&Surd::from_int(1));
    }
    IdentityCheck::compare(lhs, rhs)
}

fn barycenter_with(src: &impl SymbolSource, j: i32, k: i32, q: i32) -> IdentityCheck {
    let mut lhs = ExactSum::new();
    for m in (-j..=j).step_by(2) {
        let v = src.three_jm([j, k, j], [-m, q, m]);
        lhs.push_surd(&v.scale(phase(j - m)));
    }
    let mut rhs = ExactSum::new();
    if k == 0 && q == 0 && j >= 0 {
        rhs.push_surd(&sqrt_int(i64::from(j) + 1));
    }
    IdentityCheck::compare(lhs, rhs)
}

#[allow(clippy::too_many_arguments)]
fn contraction_with(
    src: &impl SymbolSource,
    j: i32,
    k: i32,
    l: i32,
    big_k: i32,
    q: i32,
    p: i32,
    big_q: i32,
) -> IdentityCheck {
    let mut lhs = ExactSum::new();
    for m in (-j..=j).step_by(2) {
        // (j k j; -m q M) forces M = m - q; (j l j; -M p m') forces m' = M - p.
        let big_m = m - q;
        let mp = big_m - p;
        if big_m.abs() > j || mp.abs() > j {
            continue;
        }
        let a = src.three_jm([j, k, j], [-m, q, big_m]);
        if a.is_zero() {
            continue;
        }
        let b = src.three_jm([j, l, j], [-big_m, p, mp]);
        if b.is_zero() {
            continue;
        }
        let c = src.three_jm([j, big_k, j], [-m, big_q, mp]);
        lhs.push_surd(&a.mul(&b).mul(&c).scale(phase(j - big_m)));
    }
    let rhs_value = src
        .three_jm([k, l, big_k], [-q, -p, big_q])
        .mul(&src.six_j([k, l, big_k, j, j, j]))
        .scale(phase(2 * j - big_q));
    IdentityCheck::compare(lhs, ExactSum::from_surd(rhs_value))
}

fn tw(h: HalfInt) -> i32 {
    h.twice()
}

/// `sum_{m m'} (j j' k; m m' q)(j j' l; m m' p) = delta_{kl} delta_{qp} Delta(j j' k) / (2k+1)`.
pub fn identity_orthogonality_mm(j: HalfInt, jp: HalfInt, k: HalfInt, q: HalfInt, l: HalfInt, p: HalfInt) -> IdentityCheck {
    orthogonality_mm_with(&Direct, tw(j), tw(jp), tw(k), tw(q), tw(l), tw(p))
}

/// `sum_{k q} (2k+1)(j j' k; m m' q)(j j' k; M M' q) = delta_{mM} delta_{m'M'}`.
pub fn identity_orthogonality_kq(j: HalfInt, jp: HalfInt, m: HalfInt, mp: HalfInt, big_m: HalfInt, big_mp: HalfInt) -> IdentityCheck {
    orthogonality_kq_with(&Direct, tw(j), tw(jp), [tw(m), tw(mp)], [tw(big_m), tw(big_mp)])
}

/// Barycenter theorem `sum_m (-1)^{j-m} (j k j; -m q m) = sqrt(2j+1) delta_{k0} delta_{q0}`.
pub fn identity_barycenter(j: HalfInt, k: HalfInt, q: HalfInt) -> IdentityCheck {
    barycenter_with(&Direct, tw(j), tw(k), tw(q))
}

/// `sum_{m m' M} (-1)^{j-M} (j k j; -m q M)(j l j; -M p m')(j K j; -m Q m')
///  = (-1)^{2j-Q} (k l K; -q -p Q) {k l K; j j j}`.
#[allow(clippy::too_many_arguments)]
pub fn identity_contraction(
    j: HalfInt,
    k: HalfInt,
    l: HalfInt,
    big_k: HalfInt,
    q: HalfInt,
    p: HalfInt,
    big_q: HalfInt,
) -> IdentityCheck {
    contraction_with(&Direct, tw(j), tw(k), tw(l), tw(big_k), tw(q), tw(p), tw(big_q))
}

// ---------------------------------------------------------------------------
// Suite

/// Options for [`run_identity_suite`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub max_two_j: u32,
    pub exactness: Exactness,
    /// Negative control: flips the sign of one tabulated 3-jm symbol.
    pub inject_sign_flip: bool,
}

/// Aggregate over all evaluations of one identity.
#[derive(Clone, Debug)]
pub struct IdentityTally {
    pub name: &'static str,
    pub relation: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub inexact: usize,
    pub max_abs_deviation: f64,
    pub first_failure: Option<String>,
}

impl IdentityTally {
    fn new(name: &'static str, relation: &'static str) -> Self {
        Self {
            name,
            relation,
            checked: 0,
            failed: 0,
            inexact: 0,
            max_abs_deviation: 0.0,
            first_failure: None,
        }
    }

    fn record(&mut self, check: &IdentityCheck, exactness: Exactness, location: impl FnOnce() -> String) {
        self.checked += 1;
        let deviation = match exactness {
            Exactness::Exact => {
                if !check.exact {
                    self.inexact += 1;
                }
                if check.pass {
                    0.0
                } else {
                    (check.lhs.to_f64() - check.rhs.to_f64()).abs()
                }
            }
            Exactness::Float => (check.lhs.to_f64() - check.rhs.to_f64()).abs(),
        };
        let pass = match exactness {
            Exactness::Exact => check.pass,
            Exactness::Float => deviation <= FLOAT_TOLERANCE,
        };
        self.max_abs_deviation = self.max_abs_deviation.max(deviation);
        if !pass {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{}: lhs = {}, rhs = {}", location(), check.lhs, check.rhs));
            }
        }
    }

    fn merge(&mut self, other: IdentityTally) {
        self.checked += other.checked;
        self.failed += other.failed;
        self.inexact += other.inexact;
        self.max_abs_deviation = self.max_abs_deviation.max(other.max_abs_deviation);
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    pub fn pass(&self) -> bool {
        self.failed == 0
    }

    /// Report entry; the location carries the first failure, or the counts.
    pub fn to_check(&self, exactness: Exactness) -> Check {
        Check {
            name: self.name.to_string(),
            relation: self.relation.to_string(),
            // an exact run only counts when no sum fell back to floating point
            pass: self.pass() && (exactness == Exactness::Float || self.inexact == 0),
            residual: self.max_abs_deviation,
            tolerance: match exactness {
                Exactness::Exact => 0.0,
                Exactness::Float => FLOAT_TOLERANCE,
            },
            location: Some(self.first_failure.clone().unwrap_or_else(|| {
                format!("checked={} inexact={}", self.checked, self.inexact)
            })),
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentitySuiteReport {
    pub options: SuiteOptions,
    pub tallies: Vec<IdentityTally>,
}

impl IdentitySuiteReport {
    pub fn pass(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }

    pub fn checks(&self) -> Vec<Check> {
        self.tallies.iter().map(|t| t.to_check(self.options.exactness)).collect()
    }
}

/// 3-jm symbols `(j1 j2 k; m1 m2 q)` for fixed `j1`, `j2` and every `k`,
/// indexed by `(k, m1, m2)`; `q = -(m1 + m2)`.
struct PairTable {
    j: [i32; 2],
    k_min: i32,
    k_count: usize,
    values: Vec<Surd>,
}

impl PairTable {
    fn new(j1: i32, j2: i32) -> Self {
        let k_min = (j1 - j2).abs();
        let k_count = ((j1 + j2 - k_min) / 2 + 1) as usize;
        let (d1, d2) = ((j1 + 1) as usize, (j2 + 1) as usize);
        let mut values = Vec::with_capacity(k_count * d1 * d2);
        for ki in 0..k_count {
            let k = k_min + 2 * ki as i32;
            for r1 in 0..d1 {
                for r2 in 0..d2 {
                    let (m1, m2) = (j1 - 2 * r1 as i32, j2 - 2 * r2 as i32);
                    values.push(three_jm_surd([j1, j2, k], [m1, m2, -(m1 + m2)]));
                }
            }
        }
        Self {
            j: [j1, j2],
            k_min,
            k_count,
            values,
        }
    }

    fn get(&self, k: i32, m1: i32, m2: i32) -> Option<&Surd> {
        let [j1, j2] = self.j;
        if k < self.k_min || (k - self.k_min) % 2 != 0 || m1.abs() > j1 || m2.abs() > j2 {
            return None;
        }
        let ki = ((k - self.k_min) / 2) as usize;
        if ki >= self.k_count {
            return None;
        }
        let (d1, d2) = ((j1 + 1) as usize, (j2 + 1) as usize);
        let (r1, r2) = (((j1 - m1) / 2) as usize, ((j2 - m2) / 2) as usize);
        Some(&self.values[(ki * d1 + r1) * d2 + r2])
    }
}

struct PairSource<'a> {
    table: &'a PairTable,
}

impl SymbolSource for PairSource<'_> {
    fn three_jm(&self, j: [i32; 3], m: [i32; 3]) -> Cow<'_, Surd> {
        if [j[0], j[1]] == self.table.j && m[0] + m[1] + m[2] == 0 {
            if let Some(v) = self.table.get(j[2], m[0], m[1]) {
                return Cow::Borrowed(v);
            }
        }
        Cow::Owned(three_jm_surd(j, m))
    }

    fn six_j(&self, j: [i32; 6]) -> Cow<'_, Surd> {
        Cow::Owned(six_j_surd(j))
    }
}

/// Symbols `(j k j; -m q m')` for one `j`, plus `{k l K; j j j}` and a
/// per-call override for the right-hand 3-jm symbol.
struct SpinTable {
    j: i32,
    /// Indexed by `(k, r(m), r(m'))` with `r(m) = (j - m)/2`.
    values: Vec<Surd>,
    six: HashMap<[i32; 3], Surd>,
}

impl SpinTable {
    fn new(j: i32, flip: bool) -> Self {
        let d = (j + 1) as usize;
        let mut values = Vec::with_capacity(d * d * d);
        for k in 0..=j {
            for r in 0..d {
                for rp in 0..d {
                    let (m, mp) = (j - 2 * r as i32, j - 2 * rp as i32);
                    values.push(three_jm_surd([j, 2 * k, j], [-m, m - mp, mp]));
                }
            }
        }
        if flip {
            // (j 0 j; -j 0 j)
            values[0] = values[0].clone().neg();
        }
        let mut six = HashMap::new();
        for k in 0..=j {
            for l in 0..=j {
                for big_k in (k - l).abs()..=(k + l).min(j) {
                    let key = [2 * k, 2 * l, 2 * big_k];
                    six.insert(key, six_j_surd([2 * k, 2 * l, 2 * big_k, j, j, j]));
                }
            }
        }
        Self { j, values, six }
    }

    fn get(&self, k: i32, m: i32, mp: i32) -> Option<&Surd> {
        let j = self.j;
        if k % 2 != 0 || k < 0 || k > 2 * j || m.abs() > j || mp.abs() > j {
            return None;
        }
        let d = (j + 1) as usize;
        let (r, rp) = (((j - m) / 2) as usize, ((j - mp) / 2) as usize);
        Some(&self.values[((k / 2) as usize * d + r) * d + rp])
    }
}

struct SpinSource<'a> {
    table: &'a SpinTable,
    rhs: Option<&'a Surd>,
}

impl SymbolSource for SpinSource<'_> {
    fn three_jm(&self, j: [i32; 3], m: [i32; 3]) -> Cow<'_, Surd> {
        let t = self.table;
        if j[0] == t.j && j[2] == t.j && m[0] + m[1] + m[2] == 0 {
            if let Some(v) = t.get(j[1], -m[0], m[2]) {
                return Cow::Borrowed(v);
            }
        }
        if let Some(v) = self.rhs {
            return Cow::Borrowed(v);
        }
        Cow::Owned(three_jm_surd(j, m))
    }

    fn six_j(&self, j: [i32; 6]) -> Cow<'_, Surd> {
        match self.table.six.get(&[j[0], j[1], j[2]]) {
            Some(v) if j[3..] == [self.table.j; 3] => Cow::Borrowed(v),
            _ => Cow::Owned(six_j_surd(j)),
        }
    }
}

#[cfg(feature = "parallel")]
fn map_collect<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_collect<T, R>(items: Vec<T>, f: impl Fn(T) -> R) -> Vec<R> {
    items.into_iter().map(f).collect()
}

fn fmt_twice(t: i32) -> String {
    HalfInt::from_twice(t).to_string()
}

fn orthogonality_for_pair(j: i32, jp: i32, exactness: Exactness) -> (IdentityTally, IdentityTally) {
    let table = PairTable::new(j, jp);
    let src = PairSource { table: &table };
    let mut mm = IdentityTally::new("orthogonality_mm", "3-jm orthogonality over (m, m')");
    let mut kq = IdentityTally::new("orthogonality_kq", "3-jm orthogonality over (k, q)");
    let ks: Vec<i32> = ((j - jp).abs()..=j + jp).step_by(2).collect();
    for &k in &ks {
        for &l in &ks {
            let top = k.min(l);
            for q in (-top..=top).step_by(2) {
                let check = orthogonality_mm_with(&src, j, jp, k, q, l, q);
                mm.record(&check, exactness, || {
                    format!("j={} j'={} k={} l={} q=p={}", fmt_twice(j), fmt_twice(jp), fmt_twice(k), fmt_twice(l), fmt_twice(q))
                });
            }
        }
    }
    for m in (-j..=j).step_by(2) {
        for mp in (-jp..=jp).step_by(2) {
            for big_m in (-j..=j).step_by(2) {
                let big_mp = m + mp - big_m;
                if big_mp.abs() > jp {
                    continue;
                }
                let check = orthogonality_kq_with(&src, j, jp, [m, mp], [big_m, big_mp]);
                kq.record(&check, exactness, || {
                    format!(
                        "j={} j'={} m={} m'={} M={} M'={}",
                        fmt_twice(j),
                        fmt_twice(jp),
                        fmt_twice(m),
                        fmt_twice(mp),
                        fmt_twice(big_m),
                        fmt_twice(big_mp)
                    )
                });
            }
        }
    }
    (mm, kq)
}

fn spin_identities(j: i32, exactness: Exactness, flip: bool) -> (IdentityTally, IdentityTally) {
    let table = SpinTable::new(j, flip);
    let mut bary = IdentityTally::new("barycenter", "barycenter theorem");
    let mut contraction = IdentityTally::new("contraction", "3-jm x 3-jm x 3-jm = 3-jm x 6-j contraction");
    for k in (0..=2 * j).step_by(2) {
        for q in (-k..=k).step_by(2) {
            let src = SpinSource { table: &table, rhs: None };
            let check = barycenter_with(&src, j, k, q);
            bary.record(&check, exactness, || format!("j={} k={} q={}", fmt_twice(j), fmt_twice(k), fmt_twice(q)));
        }
    }
    for k in (0..=2 * j).step_by(2) {
        for l in (0..=2 * j).step_by(2) {
            for big_k in ((k - l).abs()..=(k + l).min(2 * j)).step_by(2) {
                for q in (-k..=k).step_by(2) {
                    for p in (-l..=l).step_by(2) {
                        let big_q = q + p;
                        if big_q.abs() > big_k {
                            continue;
                        }
                        let rhs3 = three_jm_surd([k, l, big_k], [-q, -p, big_q]);
                        let src = SpinSource {
                            table: &table,
                            rhs: Some(&rhs3),
                        };
                        let check = contraction_with(&src, j, k, l, big_k, q, p, big_q);
                        contraction.record(&check, exactness, || {
                            format!(
                                "j={} k={} l={} K={} q={} p={} Q={}",
                                fmt_twice(j),
                                fmt_twice(k),
                                fmt_twice(l),
                                fmt_twice(big_k),
                                fmt_twice(q),
                                fmt_twice(p),
                                fmt_twice(big_q)
                            )
                        });
                    }
                }
            }
        }
    }
    (bary, contraction)
}

/// Runs the four identities over every `j, j' <= max_two_j / 2` and every
/// admissible set of the remaining quantum numbers (those obeying the
/// magnetic selection rules; the others vanish on both sides trivially).
pub fn run_identity_suite(options: SuiteOptions) -> IdentitySuiteReport {
    let max = options.max_two_j as i32;
    let pairs: Vec<(i32, i32)> = (0..=max).flat_map(|j| (0..=max).map(move |jp| (j, jp))).collect();
    let pair_results = map_collect(pairs, |(j, jp)| orthogonality_for_pair(j, jp, options.exactness));
    let spins: Vec<i32> = (0..=max).collect();
    let spin_results = map_collect(spins, |j| {
        spin_identities(j, options.exactness, options.inject_sign_flip && j == max)
    });

    let mut mm = IdentityTally::new("orthogonality_mm", "3-jm orthogonality over (m, m')");
    let mut kq = IdentityTally::new("orthogonality_kq", "3-jm orthogonality over (k, q)");
    for (a, b) in pair_results {
        mm.merge(a);
        kq.merge(b);
    }
    let mut bary = IdentityTally::new("barycenter", "barycenter theorem");
    let mut contraction = IdentityTally::new("contraction", "3-jm x 3-jm x 3-jm = 3-jm x 6-j contraction");
    for (a, b) in spin_results {
        bary.merge(a);
        contraction.merge(b);
    }
    IdentitySuiteReport {
        options,
        tallies: vec![mm, kq, bary, contraction],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn orthogonality_mm_examples() {
        let c = identity_orthogonality_mm(h(1), h(1), h(2), h(0), h(2), h(0));
        assert!(c.pass);
        assert_eq!(c.lhs.as_rational(), Some(rat(1, 3)));
        let c = identity_orthogonality_mm(h(1), h(1), h(2), h(0), h(0), h(0));
        assert!(c.pass && c.lhs.is_zero());
        let c = identity_orthogonality_mm(h(1), h(1), h(4), h(0), h(4), h(0));
        assert!(c.pass && c.lhs.is_zero() && c.rhs.is_zero());
    }

    #[test]
    fn orthogonality_kq_examples() {
        let c = identity_orthogonality_kq(h(1), h(1), h(1), h(-1), h(1), h(-1));
        assert!(c.pass);
        assert_eq!(c.lhs.as_rational(), Some(rat(1, 1)));
        let c = identity_orthogonality_kq(h(1), h(1), h(1), h(-1), h(-1), h(1));
        assert!(c.pass && c.lhs.is_zero());
        let c = identity_orthogonality_kq(h(0), h(0), h(0), h(0), h(0), h(0));
        assert!(c.pass);
        assert_eq!(c.lhs.as_rational(), Some(rat(1, 1)));
    }

    #[test]
    fn barycenter_examples() {
        let c = identity_barycenter(h(1), h(0), h(0));
        assert!(c.pass);
        assert_eq!(c.lhs.as_single().unwrap().square(), &rat(2, 1));
        assert!(identity_barycenter(h(1), h(2), h(0)).lhs.is_zero());
        assert!(identity_barycenter(h(2), h(4), h(2)).pass);
    }

    #[test]
    fn contraction_examples() {
        assert!(identity_contraction(h(1), h(2), h(2), h(0), h(0), h(0), h(0)).pass);
        let c = identity_contraction(h(1), h(2), h(2), h(2), h(2), h(-2), h(0));
        assert!(c.pass && !c.lhs.is_zero());
        let c = identity_contraction(h(2), h(2), h(2), h(2), h(2), h(0), h(0));
        assert!(c.pass && c.lhs.is_zero() && c.rhs.is_zero());
    }

    #[test]
    fn small_suite_passes_exactly() {
        let report = run_identity_suite(SuiteOptions {
            max_two_j: 4,
            exactness: Exactness::Exact,
            inject_sign_flip: false,
        });
        for t in &report.tallies {
            assert!(t.pass(), "{}: {:?}", t.name, t.first_failure);
            assert_eq!(t.inexact, 0);
            assert!(t.checked > 0);
        }
    }

    #[test]
    fn sign_flip_is_detected() {
        let report = run_identity_suite(SuiteOptions {
            max_two_j: 2,
            exactness: Exactness::Exact,
            inject_sign_flip: true,
        });
        assert!(!report.pass());
        let float = run_identity_suite(SuiteOptions {
            max_two_j: 2,
            exactness: Exactness::Float,
            inject_sign_flip: true,
        });
        assert!(!float.pass());
    }
}
