//! Primes, p-adic valuations and small-scale integer factorization.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Trial division runs up to this bound before falling back to a primality test.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// A positive rational prime, certified at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime_u64(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_int(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` in the requested scalar type.
    pub fn power<T: Scalar>(self, k: u32) -> Option<T> {
        let p = T::from_u64_exact(self.0)?;
        Some(crate::scalar::pow(&p, k))
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `v_p(n)`, which is infinite exactly for `n = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }

    pub fn is_positive(self) -> bool {
        self != Valuation::Finite(0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn padic_valuation<T: Scalar>(n: &T, p: Prime) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let Some(pt) = T::from_u64_exact(p.get()) else {
        // p is larger than any representable value, so it cannot divide n.
        return Valuation::Finite(0);
    };
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&pt);
        if !r.is_zero() {
            return Valuation::Finite(k);
        }
        m = q;
        k += 1;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `|n|` for `n != 0`.
///
/// Trial division up to [`TRIAL_DIVISION_BOUND`]; a leftover cofactor is
/// accepted only if it is a certified `u64` prime.
pub fn factor_integer(n: &BigInt) -> Result<BTreeMap<Prime, u32>> {
    if n.is_zero() {
        return Err(Error::ZeroConstant);
    }
    let mut m = n.abs();
    let mut out = BTreeMap::new();
    let mut d: u64 = 2;
    while d <= TRIAL_DIVISION_BOUND {
        let bd = BigInt::from(d);
        if &bd * &bd > m {
            break;
        }
        let mut k = 0;
        while (&m % &bd).is_zero() {
            m /= &bd;
            k += 1;
        }
        if k > 0 {
            out.insert(Prime(d), k);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        match m.to_u64() {
            Some(r) if is_prime_u64(r) => {
                *out.entry(Prime(r)).or_insert(0) += 1;
            }
            _ => return Err(Error::FactorizationBound(n.to_string())),
        }
    }
    Ok(out)
}

/// Divisors of a positive `u64` given its factorization.
pub(crate) fn divisors_u64(n: u64) -> Option<Vec<u64>> {
    let fac = factor_integer(&BigInt::from(n)).ok()?;
    let mut divs = vec![1u64];
    for (p, e) in fac {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk = pk.saturating_mul(p.get());
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    Some(divs)
}
