//! Dense univariate polynomials with exact integer coefficients.

use std::fmt;
use std::ops::{Mul, Neg};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Polynomial in `x` with coefficients in `T`.
///
/// `coeffs[i]` is the coefficient of `x^i`. The zero polynomial is the
/// empty vector; otherwise the last entry is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| T::from_i64(c).expect("coefficient fits scalar"))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self {
            coeffs: vec![T::zero(), T::one()],
        }
    }

    /// `x - c`.
    pub fn linear_root(c: T) -> Self {
        Self::new(vec![-c, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> T {
        self.coeffs.first().cloned().unwrap_or_else(T::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, w: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * w.clone() + c.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Positive gcd of the coefficients.
    pub fn content(&self) -> Result<T> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self
            .coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc.gcd(c));
        Ok(g)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_ok_and(|c| c.is_one())
    }

    /// Splits `self = unit_content * primitive_part` with the primitive part
    /// having a positive leading coefficient.
    pub fn primitive_decomposition(&self) -> Result<(T, Self)> {
        let c = self.content()?;
        let signed = if self.leading().is_some_and(|l| l.is_negative()) {
            -c
        } else {
            c
        };
        let part = Self::new(self.coeffs.iter().map(|a| a.clone() / signed.clone()).collect());
        Ok((signed, part))
    }

    pub fn primitive_part(&self) -> Result<Self> {
        Ok(self.primitive_decomposition()?.1)
    }

    /// Exact division in `Z[x]`; `None` when the quotient is not integral
    /// or a remainder is left.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let nd = self.degree()?;
        if nd < dd {
            return None;
        }
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let top = rem[k + dd].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - q.clone() * c.clone();
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Coefficient-wise conversion to another scalar type.
    pub fn convert<U: Scalar>(&self) -> Option<Poly<U>> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.to_i128().and_then(U::from_i128))
            .collect::<Option<Vec<_>>>()?;
        Some(Poly::new(coeffs))
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Mul for Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: Poly<T>) -> Poly<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> std::iter::Product for Poly<T> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Poly::one(), |acc, p| &acc * &p)
    }
}

impl<'a, T: Scalar> std::iter::Product<&'a Poly<T>> for Poly<T> {
    fn product<I: Iterator<Item = &'a Poly<T>>>(iter: I) -> Self {
        iter.fold(Poly::one(), |acc, p| &acc * p)
    }
}

/// Renders in the input grammar, e.g. `2*x^3 - x + 5`.
impl<T: Scalar> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
