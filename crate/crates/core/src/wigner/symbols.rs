//! 3-jm and 6-j symbols from Racah's single-sum formulas, in exact
//! arithmetic. Condon-Shortley phases throughout.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::half_int::HalfInt;
use super::primes::{self, factorial_exps, Exps};
use super::surd::{SignedSqrtRational, Surd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WignerError {
    #[error("angular momentum {0} is negative")]
    NegativeMomentum(HalfInt),
    #[error("projection {m} is not a valid projection of j = {j}")]
    InvalidProjection { j: HalfInt, m: HalfInt },
}

/// Triangle coefficient: one when `a`, `b`, `c` satisfy the triangle
/// inequality and `a + b + c` is an integer, zero otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Delta(bool);

impl Delta {
    pub fn value(self) -> u8 {
        self.0 as u8
    }

    pub fn is_one(self) -> bool {
        self.0
    }
}

pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> Delta {
    Delta(triangle_twice(a.twice(), b.twice(), c.twice()))
}

pub(crate) fn triangle_twice(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c >= (a - b).abs() && c <= a + b
}

fn check_pair(j: HalfInt, m: HalfInt) -> Result<(), WignerError> {
    if j.twice() < 0 {
        return Err(WignerError::NegativeMomentum(j));
    }
    if !HalfInt::is_valid_projection(j, m) {
        return Err(WignerError::InvalidProjection { j, m });
    }
    Ok(())
}

/// Wigner 3-jm symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn three_jm(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<SignedSqrtRational, WignerError> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    check_pair(j3, m3)?;
    Ok(three_jm_surd([j1.twice(), j2.twice(), j3.twice()], [m1.twice(), m2.twice(), m3.twice()]).to_ssr())
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn six_j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<SignedSqrtRational, WignerError> {
    for j in [j1, j2, j3, j4, j5, j6] {
        if j.twice() < 0 {
            return Err(WignerError::NegativeMomentum(j));
        }
    }
    Ok(six_j_surd([j1, j2, j3, j4, j5, j6].map(HalfInt::twice)).to_ssr())
}

/// One term of a Racah sum: sign and the factorials in numerator and
/// denominator, all arguments as plain integers.
struct RacahTerm<'a> {
    negative: bool,
    num: &'a [i32],
    den: &'a [i32],
}

/// `sum_t (-1)^t prod num! / prod den!` as `int * prod p^(emin)`, returned as
/// the integer and the exponent vector `emin`.
fn racah_sum<'a>(terms: impl Iterator<Item = RacahTerm<'a>>) -> (BigInt, Exps) {
    let mut signed = Vec::new();
    for t in terms {
        let mut e = Exps::new();
        for &n in t.num {
            primes::add_scaled(&mut e, &factorial_exps(n as u32), 1);
        }
        for &n in t.den {
            primes::add_scaled(&mut e, &factorial_exps(n as u32), -1);
        }
        signed.push((t.negative, e));
    }
    let width = signed.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut emin: Exps = smallvec::smallvec![0; width];
    for (i, slot) in emin.iter_mut().enumerate() {
        *slot = signed
            .iter()
            .map(|(_, e)| e.get(i).copied().unwrap_or(0))
            .min()
            .unwrap_or(0);
    }
    let mut total = BigInt::zero();
    for (negative, e) in &signed {
        let lift = (0..width).filter_map(|i| {
            let d = e.get(i).copied().unwrap_or(0) - emin[i];
            (d > 0).then_some((i, d as u32))
        });
        let v = BigInt::from(primes::power_product(lift));
        if *negative {
            total -= v;
        } else {
            total += v;
        }
    }
    (total, emin)
}

/// Exponents of `(a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!`, twice-valued inputs.
fn triangle_exps(a: i32, b: i32, c: i32) -> Exps {
    let mut e = Exps::new();
    for n in [(a + b - c) / 2, (a - b + c) / 2, (-a + b + c) / 2] {
        primes::add_scaled(&mut e, &factorial_exps(n as u32), 1);
    }
    primes::add_scaled(&mut e, &factorial_exps(((a + b + c) / 2 + 1) as u32), -1);
    e
}

/// 3-jm symbol from twice-valued arguments. Returns zero for any input that
/// violates a selection rule, including `|m| > j`.
pub(crate) fn three_jm_surd(j: [i32; 3], m: [i32; 3]) -> Surd {
    if m[0] + m[1] + m[2] != 0 || !triangle_twice(j[0], j[1], j[2]) {
        return Surd::zero();
    }
    for i in 0..3 {
        if m[i].abs() > j[i] || (j[i] - m[i]) % 2 != 0 {
            return Surd::zero();
        }
    }
    let half = |x: i32| x / 2;
    let (j1, j2, j3) = (j[0], j[1], j[2]);
    let (m1, m2, m3) = (m[0], m[1], m[2]);

    let mut radicand = triangle_exps(j1, j2, j3);
    for i in 0..3 {
        primes::add_scaled(&mut radicand, &factorial_exps(half(j[i] + m[i]) as u32), 1);
        primes::add_scaled(&mut radicand, &factorial_exps(half(j[i] - m[i]) as u32), 1);
    }

    let t_min = 0.max(half(j2 - j3 - m1)).max(half(j1 - j3 + m2));
    let t_max = half(j1 + j2 - j3).min(half(j1 - m1)).min(half(j2 + m2));
    if t_min > t_max {
        return Surd::zero();
    }
    let dens: Vec<[i32; 6]> = (t_min..=t_max)
        .map(|t| {
            [
                t,
                half(j3 - j2 + m1) + t,
                half(j3 - j1 - m2) + t,
                half(j1 + j2 - j3) - t,
                half(j1 - m1) - t,
                half(j2 + m2) - t,
            ]
        })
        .collect();
    let (sum, emin) = racah_sum((t_min..=t_max).zip(&dens).map(|(t, d)| RacahTerm {
        negative: t % 2 != 0,
        num: &[],
        den: d,
    }));
    if sum.is_zero() {
        return Surd::zero();
    }
    let mut exps = radicand;
    primes::add_scaled(&mut exps, &emin, 2);
    let phase_negative = half(j1 - j2 - m3) % 2 != 0;
    Surd {
        int: if phase_negative { -sum } else { sum },
        exps,
    }
}

/// 6-j symbol from twice-valued arguments.
pub(crate) fn six_j_surd(j: [i32; 6]) -> Surd {
    let [j1, j2, j3, j4, j5, j6] = j;
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle_twice(a, b, c)) {
        return Surd::zero();
    }
    let mut radicand = Exps::new();
    for &(a, b, c) in &triads {
        primes::add_scaled(&mut radicand, &triangle_exps(a, b, c), 1);
    }
    let alphas = triads.map(|(a, b, c)| (a + b + c) / 2);
    let betas = [(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2, (j3 + j1 + j6 + j4) / 2];
    let t_min = *alphas.iter().max().unwrap();
    let t_max = *betas.iter().min().unwrap();
    if t_min > t_max {
        return Surd::zero();
    }
    let parts: Vec<([i32; 1], [i32; 7])> = (t_min..=t_max)
        .map(|t| {
            (
                [t + 1],
                [
                    t - alphas[0],
                    t - alphas[1],
                    t - alphas[2],
                    t - alphas[3],
                    betas[0] - t,
                    betas[1] - t,
                    betas[2] - t,
                ],
            )
        })
        .collect();
    let (sum, emin) = racah_sum((t_min..=t_max).zip(&parts).map(|(t, (n, d))| RacahTerm {
        negative: t % 2 != 0,
        num: n,
        den: d,
    }));
    if sum.is_zero() {
        return Surd::zero();
    }
    let mut exps = radicand;
    primes::add_scaled(&mut exps, &emin, 2);
    Surd { int: sum, exps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn ssr(sign: i8, n: i64, d: i64) -> SignedSqrtRational {
        SignedSqrtRational::new(sign, BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn triangle_examples() {
        assert!(triangle(h(1), h(1), h(2)).is_one());
        assert!(!triangle(h(1), h(1), h(4)).is_one());
        assert!(triangle(h(2), h(2), h(0)).is_one());
        assert!(!triangle(h(1), h(1), h(1)).is_one(), "half-integer perimeter");
        assert_eq!(triangle(h(-2), h(2), h(0)).value(), 0);
    }

    #[test]
    fn three_jm_examples() {
        // (1 1 0; 1 -1 0) = +1/sqrt(3)
        assert_eq!(three_jm(h(2), h(2), h(0), h(2), h(-2), h(0)).unwrap(), ssr(1, 1, 3));
        // triangle violated
        assert!(three_jm(h(1), h(1), h(4), h(1), h(-1), h(0)).unwrap().is_zero());
        // (1/2 1/2 1; 1/2 1/2 -1) = -1/sqrt(3)
        assert_eq!(three_jm(h(1), h(1), h(2), h(1), h(1), h(-2)).unwrap(), ssr(-1, 1, 3));
    }

    #[test]
    fn three_jm_rejects_bad_projections() {
        assert_eq!(
            three_jm(h(2), h(2), h(0), h(1), h(-1), h(0)),
            Err(WignerError::InvalidProjection { j: h(2), m: h(1) })
        );
        assert!(matches!(
            three_jm(h(2), h(2), h(2), h(4), h(-4), h(0)),
            Err(WignerError::InvalidProjection { .. })
        ));
        assert!(matches!(
            three_jm(h(-2), h(2), h(0), h(0), h(0), h(0)),
            Err(WignerError::NegativeMomentum(_))
        ));
    }

    #[test]
    fn three_jm_nonzero_msum_is_zero() {
        assert!(three_jm(h(2), h(2), h(2), h(2), h(0), h(0)).unwrap().is_zero());
    }

    #[test]
    fn six_j_examples() {
        assert_eq!(six_j(h(2), h(2), h(0), h(2), h(2), h(2)).unwrap(), ssr(-1, 1, 9));
        assert!(six_j(h(2), h(2), h(6), h(2), h(2), h(2)).unwrap().is_zero());
        // {1 1 2; 1 1 1} = 1/6, from the Racah-W oracle in tests/wigner_oracle.rs
        assert_eq!(six_j(h(2), h(2), h(4), h(2), h(2), h(2)).unwrap(), ssr(1, 1, 36));
    }

    #[test]
    fn six_j_half_integer_value() {
        // {k k 0; j j J} = (-1)^{j+k+J} / sqrt((2k+1)(2j+1))
        assert_eq!(six_j(h(1), h(1), h(0), h(1), h(1), h(2)).unwrap(), ssr(1, 1, 4));
    }
}
