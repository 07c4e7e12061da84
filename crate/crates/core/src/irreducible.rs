//! Best-effort irreducibility certificates for numerator factors in `Z[x]`.
//!
//! A `Proven` answer is always sound. `Unknown` means no certificate was
//! found, not that the polynomial is reducible.


use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::prime::{divisors_u64, is_prime_u64};
use crate::scalar::Scalar;

/// Largest modulus tried by the finite-field test.
pub const MODULAR_PRIME_BOUND: u64 = 100;
/// Largest degree handled by the finite-field test.
pub const MODULAR_DEGREE_BOUND: usize = 12;
/// Rational-root candidates are only enumerated when both end coefficients
/// are at most this large.
pub const ROOT_SEARCH_BOUND: u64 = 1_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Proven,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSearch<T> {
    /// `numerator / denominator` is a root, denominator positive.
    Root(T, T),
    NoRoot,
    Inconclusive,
}

pub fn verify_irreducible_best_effort<T: Scalar>(g: &Poly<T>) -> Result<Irreducibility> {
    let deg = match g.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantFactor(g.to_string())),
        Some(d) => d,
    };
    if !g.is_primitive() {
        return Err(Error::NotPrimitive(g.to_string()));
    }
    if deg == 1 {
        return Ok(Irreducibility::Proven);
    }
    if deg <= 3 {
        match rational_root(g) {
            RootSearch::NoRoot => return Ok(Irreducibility::Proven),
            RootSearch::Root(..) => return Ok(Irreducibility::Unknown),
            RootSearch::Inconclusive => {}
        }
    }
    if deg <= MODULAR_DEGREE_BOUND && irreducible_mod_some_prime(g) {
        return Ok(Irreducibility::Proven);
    }
    Ok(Irreducibility::Unknown)
}

/// Rational-root test: candidates `s/t` with `s | g(0)` and `t | lc(g)`.
pub fn rational_root<T: Scalar>(g: &Poly<T>) -> RootSearch<T> {
    let Some(deg) = g.degree() else {
        return RootSearch::Inconclusive;
    };
    if deg == 0 {
        return RootSearch::NoRoot;
    }
    let a0 = g.constant_term();
    if a0.is_zero() {
        return RootSearch::Root(T::zero(), T::one());
    }
    let lead = g.leading().expect("nonzero").clone();
    let (Some(a0u), Some(lu)) = (a0.abs().to_u64(), lead.abs().to_u64()) else {
        return RootSearch::Inconclusive;
    };
    if a0u > ROOT_SEARCH_BOUND || lu > ROOT_SEARCH_BOUND {
        return RootSearch::Inconclusive;
    }
    let (Some(nums), Some(dens)) = (divisors_u64(a0u), divisors_u64(lu)) else {
        return RootSearch::Inconclusive;
    };
    for &t in &dens {
        for &s in &nums {
            if num_integer::gcd(s, t) != 1 {
                continue;
            }
            let tt = T::from_u64_exact(t).expect("fits");
            for s in [s as i128, -(s as i128)] {
                let ss = T::from_i128(s).expect("fits");
                if homogeneous_eval(g, &ss, &tt).is_zero() {
                    return RootSearch::Root(ss, tt);
                }
            }
        }
    }
    RootSearch::NoRoot
}

/// `t^deg * g(s/t)`.
fn homogeneous_eval<T: Scalar>(g: &Poly<T>, s: &T, t: &T) -> T {
    let deg = g.degree().unwrap_or(0);
    let mut acc = T::zero();
    let mut s_pow = T::one();
    for (k, c) in g.coeffs().iter().enumerate() {
        let t_pow = crate::scalar::pow(t, (deg - k) as u32);
        acc = acc + c.clone() * s_pow.clone() * t_pow;
        s_pow = s_pow * s.clone();
    }
    acc
}

/// Splits off rational linear factors of a polynomial of degree at most 3.
/// Returns primitive factors with positive leading coefficients, or the
/// input unchanged when no root is found.
pub fn split_rational_roots<T: Scalar>(g: &Poly<T>) -> Vec<Poly<T>> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    while rest.degree().is_some_and(|d| (2..=3).contains(&d)) {
        let RootSearch::Root(s, t) = rational_root(&rest) else {
            break;
        };
        let linear = Poly::new(vec![-s, t]);
        match rest.div_exact(&linear) {
            Some(q) => {
                out.push(linear);
                rest = q;
            }
            None => break,
        }
    }
    out.push(rest);
    out
}

fn irreducible_mod_some_prime<T: Scalar>(g: &Poly<T>) -> bool {
    (2..=MODULAR_PRIME_BOUND)
        .filter(|&p| is_prime_u64(p))
        .any(|p| match reduce_mod(g, p) {
            Some(f) if f.len() == g.coeffs().len() => fp::is_irreducible(&f, p),
            _ => false,
        })
}

fn reduce_mod<T: Scalar>(g: &Poly<T>, p: u64) -> Option<Vec<u64>> {
    let pt = T::from_u64_exact(p)?;
    let mut v = g
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(&pt).to_u64())
        .collect::<Option<Vec<u64>>>()?;
    while v.last() == Some(&0) {
        v.pop();
    }
    Some(v)
}

/// Dense polynomial arithmetic over `F_p` for small `p`.
mod fp {
    type P = Vec<u64>;

    fn trim(mut a: P) -> P {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> P {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        let li = inv(m[dm], p);
        while r.len() > dm && !r.is_empty() {
            let top = *r.last().unwrap();
            if top == 0 {
                r.pop();
                continue;
            }
            let q = top * li % p;
            let shift = r.len() - 1 - dm;
            for (j, &c) in m.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - q * c % p) % p;
            }
            r.pop();
        }
        trim(r)
    }

    fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> P {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    fn pow_x_mod(base: &[u64], e: u64, m: &[u64], p: u64) -> P {
        let mut acc = rem(&[1], m, p);
        let mut b = base.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> P {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: `f` of degree `n` is irreducible over `F_p` iff
    /// `gcd(f, x^(p^i) - x) = 1` for every `1 <= i <= n/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = rem(&[0, 1], f, p);
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = pow_x_mod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let d = gcd(f, &trim(diff), p);
            if d.len() > 1 {
                return false;
            }
        }
        true
    }

}
