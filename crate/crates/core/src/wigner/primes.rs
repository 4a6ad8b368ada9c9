//! Prime tables and factorials in prime-exponent form.
//!
//! Every factorial that enters a Racah sum is stored as the vector of its
//! prime exponents (Legendre's formula), so products and quotients of
//! factorials are integer vector additions. Both tables grow on demand and
//! are shared by all threads; entries never change once inserted.

use std::sync::RwLock;

use num_bigint::BigUint;
use smallvec::SmallVec;

/// Prime exponents, index `i` refers to the `i`-th prime (2, 3, 5, ...).
/// Missing trailing entries are zero.
pub(crate) type Exps = SmallVec<[i32; 16]>;

static PRIMES: RwLock<Vec<u32>> = RwLock::new(Vec::new());
static FACTORIALS: RwLock<Vec<Exps>> = RwLock::new(Vec::new());

/// The `i`-th prime (zero-based). Grows the prime table if needed.
pub(crate) fn prime(i: usize) -> u32 {
    if let Some(&p) = PRIMES.read().unwrap().get(i) {
        return p;
    }
    let mut table = PRIMES.write().unwrap();
    while table.len() <= i {
        let mut candidate = table.last().map_or(2, |&p| p + 1);
        while !is_prime_with(&table, candidate) {
            candidate += 1;
        }
        table.push(candidate);
    }
    table[i]
}

fn is_prime_with(known: &[u32], n: u32) -> bool {
    if n < 2 {
        return false;
    }
    for &p in known {
        if (p as u64) * (p as u64) > n as u64 {
            break;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    true
}

/// Primes not exceeding `n`, in increasing order.
pub(crate) fn primes_upto(n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let p = prime(i);
        if p > n {
            return out;
        }
        out.push(p);
        i += 1;
    }
}

/// Prime exponents of `n!`.
pub(crate) fn factorial_exps(n: u32) -> Exps {
    if let Some(e) = FACTORIALS.read().unwrap().get(n as usize) {
        return e.clone();
    }
    let mut table = FACTORIALS.write().unwrap();
    while table.len() <= n as usize {
        let m = table.len() as u32;
        let mut e = Exps::new();
        for p in primes_upto(m) {
            // Legendre: sum of floor(m / p^i).
            let mut count = 0i32;
            let mut pk = p as u64;
            while pk <= m as u64 {
                count += (m as u64 / pk) as i32;
                pk *= p as u64;
            }
            e.push(count);
        }
        table.push(e);
    }
    table[n as usize].clone()
}

/// `acc += sign * other` elementwise, padding with zeros.
pub(crate) fn add_scaled(acc: &mut Exps, other: &Exps, sign: i32) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, &b) in acc.iter_mut().zip(other.iter()) {
        *a += sign * b;
    }
}

/// Product of `p_i^{e_i}` for nonnegative exponents.
pub(crate) fn power_product<I>(exps: I) -> BigUint
where
    I: IntoIterator<Item = (usize, u32)>,
{
    let mut big = BigUint::from(1u32);
    let mut small: u64 = 1;
    for (i, e) in exps {
        let p = prime(i) as u64;
        for _ in 0..e {
            match small.checked_mul(p) {
                Some(v) => small = v,
                None => {
                    big *= small;
                    small = p;
                }
            }
        }
    }
    if small != 1 {
        big *= small;
    }
    big
}

/// Trial-divides `n` by the first `limit` primes. Returns the exponents found
/// and the remaining cofactor.
pub(crate) fn factor_small(n: &BigUint, limit: usize) -> (Exps, BigUint) {
    let mut rest = n.clone();
    let mut exps = Exps::new();
    let zero = BigUint::from(0u32);
    for i in 0..limit {
        if rest == BigUint::from(1u32) {
            break;
        }
        let p = BigUint::from(prime(i));
        let mut e = 0;
        while &rest % &p == zero {
            rest /= &p;
            e += 1;
        }
        if exps.len() <= i {
            exps.resize(i + 1, 0);
        }
        exps[i] = e;
    }
    while exps.last() == Some(&0) {
        exps.pop();
    }
    (exps, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(primes_upto(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn factorial_exponents_match_direct_product() {
        for n in 0..40u32 {
            let direct: BigUint = (1..=n).map(BigUint::from).product();
            let e = factorial_exps(n);
            let rebuilt = power_product(e.iter().enumerate().map(|(i, &x)| (i, x as u32)));
            assert_eq!(direct, rebuilt, "{n}!");
        }
    }

    #[test]
    fn small_factoring_leaves_cofactor() {
        let n = BigUint::from(2u32 * 2 * 3 * 1009);
        let (e, rest) = factor_small(&n, 10);
        assert_eq!(&e[..], &[2, 1]);
        assert_eq!(rest, BigUint::from(1009u32));
    }
}
