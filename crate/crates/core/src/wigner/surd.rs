//! Exact values of the form `sign * sqrt(rational)` and sums of them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::{self, Exps};

/// Signed square root of a nonnegative rational, `sign * sqrt(square)`.
///
/// The square of every 3-jm and 6-j symbol is rational, so this type holds
/// them without loss. `sign == 0` exactly when `square == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: i8,
    square: BigRational,
}

impl SignedSqrtRational {
    /// Builds `sign * sqrt(square)`. Panics if `square` is negative.
    pub fn new(sign: i8, square: BigRational) -> Self {
        assert!(!square.is_negative(), "radicand must be nonnegative");
        if sign == 0 || square.is_zero() {
            return Self::zero();
        }
        Self {
            sign: sign.signum(),
            square,
        }
    }

    pub fn zero() -> Self {
        Self {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    /// The exact rational `r` as `sign(r) * sqrt(r^2)`.
    pub fn from_rational(r: &BigRational) -> Self {
        let sign = match r.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        Self::new(sign, r * r)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn square(&self) -> &BigRational {
        &self.square
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The value itself when the radicand is a perfect square.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.square.numer().magnitude();
        let d = self.square.denom().magnitude();
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            let r = BigRational::new(BigInt::from(rn), BigInt::from(rd));
            Some(if self.sign < 0 { -r } else { r })
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        // Surd route extracts square factors first, which keeps the float
        // conversion accurate for large radicands.
        match Surd::try_from_ssr(self) {
            Some(s) => s.to_f64(),
            None => f64::from(self.sign) * self.square.to_f64().unwrap_or(f64::NAN).sqrt(),
        }
    }
}

impl Mul for &SignedSqrtRational {
    type Output = SignedSqrtRational;

    fn mul(self, rhs: Self) -> SignedSqrtRational {
        SignedSqrtRational::new(self.sign * rhs.sign, &self.square * &rhs.square)
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let s = if self.sign < 0 { '-' } else { '+' };
        write!(f, "{s}sqrt({})", self.square)
    }
}

/// `int * prod_i p_i^(exps_i / 2)`: an integer times the square root of a
/// rational whose factorization is known. Odd exponents form the radical.
#[derive(Clone, Debug)]
pub(crate) struct Surd {
    pub(crate) int: BigInt,
    pub(crate) exps: Exps,
}

impl Surd {
    pub(crate) fn zero() -> Self {
        Self {
            int: BigInt::zero(),
            exps: Exps::new(),
        }
    }

    pub(crate) fn from_int(n: i64) -> Self {
        Self {
            int: BigInt::from(n),
            exps: Exps::new(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.int.is_zero()
    }

    pub(crate) fn neg(mut self) -> Self {
        self.int = -self.int;
        self
    }

    pub(crate) fn mul(&self, other: &Surd) -> Surd {
        if self.is_zero() || other.is_zero() {
            return Surd::zero();
        }
        let mut exps = self.exps.clone();
        primes::add_scaled(&mut exps, &other.exps, 1);
        Surd {
            int: &self.int * &other.int,
            exps,
        }
    }

    pub(crate) fn scale(&self, factor: i64) -> Surd {
        Surd {
            int: &self.int * factor,
            exps: self.exps.clone(),
        }
    }

    fn exp(&self, i: usize) -> i32 {
        self.exps.get(i).copied().unwrap_or(0)
    }

    /// Same radical (squarefree kernel) as `other`.
    fn same_kernel(&self, other: &Surd) -> bool {
        let n = self.exps.len().max(other.exps.len());
        (0..n).all(|i| (self.exp(i) - other.exp(i)).rem_euclid(2) == 0)
    }

    /// Adds `other` assuming both share a kernel.
    fn add_same_kernel(&mut self, other: &Surd) {
        if other.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = other.clone();
            return;
        }
        let n = self.exps.len().max(other.exps.len());
        let mut base = Exps::with_capacity(n);
        let mut lift_self = Vec::new();
        let mut lift_other = Vec::new();
        for i in 0..n {
            let (a, b) = (self.exp(i), other.exp(i));
            let m = a.min(b);
            base.push(m);
            if a > m {
                lift_self.push((i, ((a - m) / 2) as u32));
            }
            if b > m {
                lift_other.push((i, ((b - m) / 2) as u32));
            }
        }
        let lhs = if lift_self.is_empty() {
            self.int.clone()
        } else {
            &self.int * BigInt::from(primes::power_product(lift_self))
        };
        let rhs = if lift_other.is_empty() {
            other.int.clone()
        } else {
            &other.int * BigInt::from(primes::power_product(lift_other))
        };
        self.int = lhs + rhs;
        self.exps = base;
        if self.int.is_zero() {
            self.exps.clear();
        }
    }

    /// `(rational coefficient, squarefree kernel)` with value `coeff * sqrt(kernel)`.
    pub(crate) fn split(&self) -> (BigRational, BigUint) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut ker = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            let half = e.div_euclid(2);
            if e.rem_euclid(2) == 1 {
                ker.push((i, 1));
            }
            match half.cmp(&0) {
                Ordering::Greater => num.push((i, half as u32)),
                Ordering::Less => den.push((i, (-half) as u32)),
                Ordering::Equal => {}
            }
        }
        let n = &self.int * BigInt::from(primes::power_product(num));
        let d = BigInt::from(primes::power_product(den));
        (BigRational::new(n, d), primes::power_product(ker))
    }

    pub(crate) fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (coeff, kernel) = self.split();
        coeff.to_f64().unwrap_or(f64::NAN) * kernel.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub(crate) fn to_ssr(&self) -> SignedSqrtRational {
        if self.is_zero() {
            return SignedSqrtRational::zero();
        }
        let (coeff, kernel) = self.split();
        let sign = if coeff.is_negative() { -1 } else { 1 };
        let square = &coeff * &coeff * BigRational::from_integer(BigInt::from(kernel));
        SignedSqrtRational::new(sign, square)
    }

    /// Factors the radicand over small primes. Fails when a cofactor outside
    /// the searched primes is not a perfect square.
    pub(crate) fn try_from_ssr(v: &SignedSqrtRational) -> Option<Surd> {
        const SEARCHED_PRIMES: usize = 168; // primes below 1000
        if v.is_zero() {
            return Some(Surd::zero());
        }
        let (ne, nrest) = primes::factor_small(v.square.numer().magnitude(), SEARCHED_PRIMES);
        let (de, drest) = primes::factor_small(v.square.denom().magnitude(), SEARCHED_PRIMES);
        let nr = nrest.sqrt();
        if &nr * &nr != nrest || !drest.is_one() {
            return None;
        }
        let mut exps = ne;
        primes::add_scaled(&mut exps, &de, -1);
        let sign = if v.sign < 0 { Sign::Minus } else { Sign::Plus };
        Some(Surd {
            int: BigInt::from_biguint(sign, nr),
            exps,
        })
    }
}

/// An exact sum of signed surds, grouped by radical.
///
/// Terms that share a squarefree kernel collapse into one; when a term cannot
/// be factored the sum keeps a high-precision rational approximation of it
/// and reports itself as inexact.
#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    groups: Vec<Surd>,
    approx: Option<BigRational>,
}

/// Decimal digits kept by the approximate fallback.
const APPROX_DIGITS: u32 = 40;

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_surd(s: Surd) -> Self {
        let mut out = Self::new();
        out.push_surd(&s);
        out
    }

    pub(crate) fn push_surd(&mut self, s: &Surd) {
        if s.is_zero() {
            return;
        }
        for g in &mut self.groups {
            if g.same_kernel(s) {
                g.add_same_kernel(s);
                return;
            }
        }
        self.groups.push(s.clone());
    }

    pub fn push(&mut self, v: &SignedSqrtRational) {
        match Surd::try_from_ssr(v) {
            Some(s) => self.push_surd(&s),
            None => {
                let approx = approx_sqrt(v.square(), APPROX_DIGITS) * BigInt::from(v.sign());
                *self.approx.get_or_insert_with(BigRational::zero) += approx;
            }
        }
    }

    /// False once any term had to be approximated.
    pub fn is_exact(&self) -> bool {
        self.approx.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(Surd::is_zero) && self.approx.as_ref().is_none_or(Zero::is_zero)
    }

    /// The value when it reduces to a rational number.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_exact() {
            return None;
        }
        let mut total = BigRational::zero();
        for g in self.groups.iter().filter(|g| !g.is_zero()) {
            let (c, k) = g.split();
            if !k.is_one() {
                return None;
            }
            total += c;
        }
        Some(total)
    }

    /// The value as a single signed surd, if it has at most one radical.
    pub fn as_single(&self) -> Option<SignedSqrtRational> {
        if !self.is_exact() {
            return None;
        }
        let live: Vec<_> = self.groups.iter().filter(|g| !g.is_zero()).collect();
        match live.len() {
            0 => Some(SignedSqrtRational::zero()),
            1 => Some(live[0].to_ssr()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let exact: f64 = self.groups.iter().map(Surd::to_f64).sum();
        exact + self.approx.as_ref().map_or(0.0, |a| a.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact comparison when both sides are exact; otherwise agreement of the
    /// approximations to within `1e-20`.
    pub fn equals(&self, other: &ExactSum) -> bool {
        let mut diff = self.clone();
        for g in &other.groups {
            diff.push_surd(&g.clone().neg());
        }
        if let Some(a) = &other.approx {
            *diff.approx.get_or_insert_with(BigRational::zero) -= a;
        }
        if diff.is_exact() {
            return diff.is_zero();
        }
        let mut total = diff.approx.clone().unwrap_or_else(BigRational::zero);
        for g in diff.groups.iter().filter(|g| !g.is_zero()) {
            let (c, k) = g.split();
            total += c * approx_sqrt(&BigRational::from_integer(k.into()), APPROX_DIGITS);
        }
        total.abs() < BigRational::new(BigInt::one(), BigInt::from(10).pow(20))
    }
}

impl fmt::Display for ExactSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let live: Vec<_> = self.groups.iter().filter(|g| !g.is_zero()).collect();
        if live.is_empty() && self.approx.is_none() {
            return write!(f, "0");
        }
        for (n, g) in live.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", g.to_ssr())?;
        }
        if let Some(a) = &self.approx {
            write!(f, " ~{:.20e}", a.to_f64().unwrap_or(f64::NAN))?;
        }
        Ok(())
    }
}

/// `sqrt(r)` truncated to `digits` decimal places.
fn approx_sqrt(r: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10).pow(digits);
    let scaled = r.numer() * &scale * &scale / r.denom();
    BigRational::new(scaled.sqrt(), scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn display_forms() {
        assert_eq!(SignedSqrtRational::new(1, rat(1, 3)).to_string(), "+sqrt(1/3)");
        assert_eq!(SignedSqrtRational::new(-1, rat(1, 9)).to_string(), "-1/3");
        assert_eq!(SignedSqrtRational::zero().to_string(), "0");
    }

    #[test]
    fn surd_roundtrip_through_ssr() {
        let v = SignedSqrtRational::new(-1, rat(50, 27));
        let s = Surd::try_from_ssr(&v).unwrap();
        assert_eq!(s.to_ssr(), v);
        assert!((s.to_f64() + (50.0f64 / 27.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sums_collapse_by_kernel() {
        let mut s = ExactSum::new();
        s.push(&SignedSqrtRational::new(1, rat(1, 2)));
        s.push(&SignedSqrtRational::new(1, rat(1, 8)));
        s.push(&SignedSqrtRational::new(1, rat(1, 3)));
        s.push(&SignedSqrtRational::new(-1, rat(1, 3)));
        let single = s.as_single().unwrap();
        // 1/sqrt(2) + 1/(2 sqrt(2)) = 3/(2 sqrt 2) = sqrt(9/8)
        assert_eq!(single, SignedSqrtRational::new(1, rat(9, 8)));
        assert!(s.is_exact());
    }

    #[test]
    fn unfactorable_radicand_falls_back() {
        let big_prime = 1_000_003i64;
        let mut s = ExactSum::new();
        s.push(&SignedSqrtRational::new(1, rat(big_prime, 1)));
        assert!(!s.is_exact());
        let mut t = ExactSum::new();
        t.push(&SignedSqrtRational::new(1, rat(big_prime, 1)));
        assert!(s.equals(&t));
        t.push(&SignedSqrtRational::new(1, rat(1, 1_000_000)));
        assert!(!s.equals(&t));
    }
}
