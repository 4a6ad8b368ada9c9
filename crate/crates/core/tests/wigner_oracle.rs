//! Cross-checks the symbol evaluators against independently written
//! formulas: Wigner's form of the Clebsch-Gordan sum for 3-jm symbols and
//! Racah's W-coefficient sum for 6-j symbols, both with plain rational
//! arithmetic on explicit factorials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use racah_frames::wigner::{six_j, three_jm, HalfInt, SignedSqrtRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fact(n: i64) -> BigInt {
    assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn r(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `(sign, square)` of `<j1 m1 j2 m2 | J M>` from Wigner's sum, twice-valued
/// inputs.
fn clebsch_gordan_oracle(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> (i32, BigRational) {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return (0, BigRational::zero());
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return (0, BigRational::zero());
    }
    let h = |x: i64| {
        assert!(x % 2 == 0, "odd twice-value {x}");
        x / 2
    };
    let pre = r(BigInt::from(j + 1))
        * r(fact(h(j + j1 - j2)) * fact(h(j - j1 + j2)) * fact(h(j1 + j2 - j)) * fact(h(j + m)) * fact(h(j - m)))
        / r(fact(h(j1 + j2 + j) + 1) * fact(h(j1 - m1)) * fact(h(j1 + m1)) * fact(h(j2 - m2)) * fact(h(j2 + m2)));
    let mut sum = BigRational::zero();
    for k in 0..=200 {
        let d = [k, h(j - j1 + j2) - k, h(j + m) - k, k + h(j1 - j2 - m)];
        let n = [h(j2 + j + m1) - k, h(j1 - m1) + k];
        if d.iter().chain(n.iter()).any(|&x| x < 0) {
            if d[1] < 0 || d[2] < 0 {
                break;
            }
            continue;
        }
        let term = r(fact(n[0]) * fact(n[1])) / r(d.iter().map(|&x| fact(x)).product::<BigInt>());
        if (k + h(j2 + m2)) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if sum.is_zero() {
        0
    } else if sum.is_positive() {
        1
    } else {
        -1
    };
    (sign, &sum * &sum * pre)
}

/// `(sign, square)` of the 3-jm symbol through the Clebsch-Gordan oracle.
fn three_jm_oracle(j: [i64; 3], m: [i64; 3]) -> (i32, BigRational) {
    let (s, sq) = clebsch_gordan_oracle(j[0], m[0], j[1], m[1], j[2], -m[2]);
    let phase = if ((j[0] - j[1] - m[2]) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
    (s * phase, sq / r(BigInt::from(j[2] + 1)))
}

fn triangle_oracle(a: i64, b: i64, c: i64) -> Option<BigRational> {
    if (a + b + c) % 2 != 0 || c < (a - b).abs() || c > a + b {
        return None;
    }
    Some(r(fact((a + b - c) / 2) * fact((a - b + c) / 2) * fact((b + c - a) / 2)) / r(fact((a + b + c) / 2 + 1)))
}

/// Racah `W(a b c d; e f)` as `(sign, square)`, twice-valued.
fn racah_w_oracle(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> (i32, BigRational) {
    let deltas = [
        triangle_oracle(a, b, e),
        triangle_oracle(c, d, e),
        triangle_oracle(a, c, f),
        triangle_oracle(b, d, f),
    ];
    if deltas.iter().any(Option::is_none) {
        return (0, BigRational::zero());
    }
    let pre = deltas.into_iter().map(Option::unwrap).fold(BigRational::one(), |x, y| x * y);
    let lo = [a + b + e, c + d + e, a + c + f, b + d + f].into_iter().max().unwrap() / 2;
    let hi = [a + b + c + d, a + d + e + f, b + c + e + f].into_iter().min().unwrap() / 2;
    let mut sum = BigRational::zero();
    for z in lo..=hi {
        let den = fact(z - (a + b + e) / 2)
            * fact(z - (c + d + e) / 2)
            * fact(z - (a + c + f) / 2)
            * fact(z - (b + d + f) / 2)
            * fact((a + b + c + d) / 2 - z)
            * fact((a + d + e + f) / 2 - z)
            * fact((b + c + e + f) / 2 - z);
        let term = r(fact(z + 1)) / r(den);
        if (z + (a + b + c + d) / 2) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if sum.is_zero() {
        0
    } else if sum.is_positive() {
        1
    } else {
        -1
    };
    (sign, &sum * &sum * pre)
}

/// `{j1 j2 j3; j4 j5 j6} = (-1)^{j1+j2+j4+j5} W(j1 j2 j5 j4; j3 j6)`.
fn six_j_oracle(j: [i64; 6]) -> (i32, BigRational) {
    let (s, sq) = racah_w_oracle(j[0], j[1], j[4], j[3], j[2], j[5]);
    let phase = if ((j[0] + j[1] + j[3] + j[4]) / 2) % 2 == 0 { 1 } else { -1 };
    (s * phase, sq)
}

fn as_pair(v: &SignedSqrtRational) -> (i32, BigRational) {
    (i32::from(v.sign()), v.square().clone())
}

fn h(t: i64) -> HalfInt {
    HalfInt::from_twice(t as i32)
}

fn eval_3jm(j: [i64; 3], m: [i64; 3]) -> SignedSqrtRational {
    three_jm(h(j[0]), h(j[1]), h(j[2]), h(m[0]), h(m[1]), h(m[2])).unwrap()
}

fn eval_6j(j: [i64; 6]) -> SignedSqrtRational {
    six_j(h(j[0]), h(j[1]), h(j[2]), h(j[3]), h(j[4]), h(j[5])).unwrap()
}

/// Random valid 3-jm arguments with twice-values up to `max`, biased toward
/// nonzero symbols.
fn random_3jm(rng: &mut ChaCha8Rng, max: i64) -> ([i64; 3], [i64; 3]) {
    loop {
        let j1 = rng.random_range(0..=max);
        let j2 = rng.random_range(0..=max);
        let lo = (j1 - j2).abs();
        let hi = (j1 + j2).min(max);
        if lo > hi {
            continue;
        }
        let j3 = lo + 2 * rng.random_range(0..=(hi - lo) / 2);
        let m1 = -j1 + 2 * rng.random_range(0..=j1);
        let m2 = -j2 + 2 * rng.random_range(0..=j2);
        let m3 = -(m1 + m2);
        if m3.abs() > j3 {
            continue;
        }
        return ([j1, j2, j3], [m1, m2, m3]);
    }
}

fn random_6j(rng: &mut ChaCha8Rng, max: i64) -> [i64; 6] {
    loop {
        let v: [i64; 6] = std::array::from_fn(|_| rng.random_range(0..=max));
        let triads = [(0, 1, 2), (0, 4, 5), (3, 1, 5), (3, 4, 2)];
        if triads.iter().all(|&(a, b, c)| triangle_oracle(v[a], v[b], v[c]).is_some()) {
            return v;
        }
    }
}

#[test]
fn fixture_values_from_oracle() {
    // (1/2 1/2 1; 1/2 1/2 -1) = -sqrt(1/3)
    let (s, sq) = three_jm_oracle([1, 1, 2], [1, 1, -2]);
    assert_eq!((s, sq), (-1, BigRational::new(1.into(), 3.into())));
    // {1 1 2; 1 1 1} = 1/6
    let (s, sq) = six_j_oracle([2, 2, 4, 2, 2, 2]);
    assert_eq!((s, sq), (1, BigRational::new(1.into(), 36.into())));
    assert_eq!(as_pair(&eval_6j([2, 2, 4, 2, 2, 2])), (1, BigRational::new(1.into(), 36.into())));
}

#[test]
fn three_jm_matches_oracle_on_random_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1200 {
        let (j, m) = random_3jm(&mut rng, 20);
        assert_eq!(as_pair(&eval_3jm(j, m)), three_jm_oracle(j, m), "j={j:?} m={m:?}");
    }
}

#[test]
fn six_j_matches_oracle_on_random_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1200 {
        let j = random_6j(&mut rng, 20);
        assert_eq!(as_pair(&eval_6j(j)), six_j_oracle(j), "j={j:?}");
    }
}

fn odd_phase(j: [i64; 3]) -> i8 {
    if ((j[0] + j[1] + j[2]) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(v: &SignedSqrtRational, s: i8) -> SignedSqrtRational {
    SignedSqrtRational::new(v.sign() * s, v.square().clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn three_jm_column_symmetries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (j, m) = random_3jm(&mut rng, 14);
        let base = eval_3jm(j, m);
        let phase = odd_phase(j);
        // cyclic permutations
        prop_assert_eq!(&eval_3jm([j[1], j[2], j[0]], [m[1], m[2], m[0]]), &base);
        prop_assert_eq!(&eval_3jm([j[2], j[0], j[1]], [m[2], m[0], m[1]]), &base);
        // odd permutations and reflection pick up (-1)^{j1+j2+j3}
        prop_assert_eq!(eval_3jm([j[1], j[0], j[2]], [m[1], m[0], m[2]]), signed(&base, phase));
        prop_assert_eq!(eval_3jm([j[0], j[2], j[1]], [m[0], m[2], m[1]]), signed(&base, phase));
        prop_assert_eq!(eval_3jm(j, [-m[0], -m[1], -m[2]]), signed(&base, phase));
    }

    #[test]
    fn six_j_column_permutations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_6j(&mut rng, 14);
        let base = eval_6j(v);
        let cols = [(v[0], v[3]), (v[1], v[4]), (v[2], v[5])];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            let w = [cols[p[0]].0, cols[p[1]].0, cols[p[2]].0, cols[p[0]].1, cols[p[1]].1, cols[p[2]].1];
            prop_assert_eq!(&eval_6j(w), &base);
        }
        // swapping upper and lower entries in two columns
        prop_assert_eq!(&eval_6j([v[3], v[4], v[2], v[0], v[1], v[5]]), &base);
    }

    #[test]
    fn three_jm_nonzero_msum_vanishes(j1 in 0i64..10, j2 in 0i64..10, shift in 1i64..4) {
        let j3 = j1 + j2;
        let (m1, m2) = (j1, -j2);
        let m3 = -(m1 + m2) + 2 * shift;
        if m3.abs() <= j3 {
            prop_assert!(eval_3jm([j1, j2, j3], [m1, m2, m3]).is_zero());
        }
    }
}
