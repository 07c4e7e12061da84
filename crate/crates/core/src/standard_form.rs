//! Standard form `a * prod(g_i) / b`, fixed divisors and `Int(Z)` membership.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::prime::{factor_integer, padic_valuation, Prime};
use crate::scalar::Scalar;
use crate::{Int, IntPoly};

/// Fixed divisor of a polynomial in `Z[x]`: the positive gcd of all its
/// values, computed as `gcd(g(0), g(1), ..., g(deg g))`.
///
/// The finite formula holds because `g` is a `Z`-combination of the
/// binomial polynomials `C(x, k)`, `k <= deg g`, whose coefficients are the
/// forward differences of `g` at 0.
pub fn fixed_divisor<T: Scalar>(g: &Poly<T>) -> Result<T> {
    let deg = g.degree().ok_or(Error::ZeroPolynomial)?;
    let mut acc = T::zero();
    let mut w = T::zero();
    for _ in 0..=deg {
        acc = acc.gcd(&g.eval(&w));
        if acc.is_one() {
            break;
        }
        w = w + T::one();
    }
    Ok(acc)
}

/// `v_p` of the fixed divisor.
pub fn fixed_divisor_p<T: Scalar>(g: &Poly<T>, p: Prime) -> Result<u32> {
    let fd = fixed_divisor(g)?;
    Ok(padic_valuation(&fd, p).finite().expect("fixed divisor is nonzero"))
}

/// Primes dividing the fixed divisor of `g`.
pub fn relevant_primes(g: &IntPoly) -> Result<BTreeSet<Prime>> {
    let fd = fixed_divisor(g)?;
    Ok(factor_integer(&fd)?.into_keys().collect())
}

/// `f = constant * prod(factors) / prod(p^e_p)` with `gcd(constant, b) = 1`,
/// each factor primitive with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardForm {
    constant: Int,
    denom: BTreeMap<Prime, u32>,
    factors: Vec<IntPoly>,
}

/// Result of the `Int(Z)` membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub is_member: bool,
    pub is_image_primitive: bool,
    /// `fd_p` of the numerator for every prime dividing it or the denominator.
    pub fd_numerator: BTreeMap<Prime, u32>,
    /// Positive generator of `fd(f)`; present for members.
    pub fd_of_f: Option<Int>,
}

impl StandardForm {
    /// Brings `raw_constant * prod(raw_factors) / raw_denom` into standard form.
    ///
    /// Factor contents move into the constant, the constant and denominator
    /// are reduced, the denominator is made positive and factored.
    pub fn normalize(raw_constant: &Int, raw_factors: Vec<IntPoly>, raw_denom: &Int) -> Result<Self> {
        if raw_denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if raw_constant.is_zero() {
            return Err(Error::ZeroConstant);
        }
        let mut constant = raw_constant.clone();
        let mut factors = Vec::with_capacity(raw_factors.len());
        for f in raw_factors {
            match f.degree() {
                None => return Err(Error::ZeroConstant),
                Some(0) => return Err(Error::ConstantFactor(f.to_string())),
                Some(_) => {}
            }
            let (c, g) = f.primitive_decomposition()?;
            constant *= c;
            factors.push(g);
        }
        let mut denom = raw_denom.clone();
        let g = constant.gcd(&denom);
        constant /= &g;
        denom /= &g;
        if denom.is_negative() {
            denom = -denom;
            constant = -constant;
        }
        let denom = factor_integer(&denom)?;
        Ok(Self {
            constant,
            denom,
            factors,
        })
    }

    /// Builds a standard form from already-normalized parts, checking the invariants.
    pub fn from_parts(constant: Int, denom: BTreeMap<Prime, u32>, factors: Vec<IntPoly>) -> Result<Self> {
        let sf = Self {
            constant,
            denom: denom.into_iter().filter(|&(_, e)| e > 0).collect(),
            factors,
        };
        if sf.constant.is_zero() {
            return Err(Error::ZeroConstant);
        }
        for g in &sf.factors {
            if g.degree().unwrap_or(0) == 0 {
                return Err(Error::ConstantFactor(g.to_string()));
            }
            if !g.is_primitive() || g.leading().is_some_and(|l| l.is_negative()) {
                return Err(Error::NotPrimitive(g.to_string()));
            }
        }
        if !sf.constant.gcd(&sf.denominator()).is_one() {
            return Err(Error::Precondition(format!(
                "constant {} and denominator {} are not coprime",
                sf.constant,
                sf.denominator()
            )));
        }
        Ok(sf)
    }

    pub fn constant(&self) -> &Int {
        &self.constant
    }

    pub fn denom(&self) -> &BTreeMap<Prime, u32> {
        &self.denom
    }

    pub fn factors(&self) -> &[IntPoly] {
        &self.factors
    }

    pub fn denominator(&self) -> Int {
        self.denom
            .iter()
            .map(|(p, e)| p.power::<Int>(*e).expect("fits"))
            .product()
    }

    pub fn exponent(&self, p: Prime) -> u32 {
        self.denom.get(&p).copied().unwrap_or(0)
    }

    pub fn numerator_product(&self) -> IntPoly {
        self.factors.iter().product()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_squarefree_denominator(&self) -> bool {
        self.denom.values().all(|&e| e == 1)
    }

    /// The prime `p` when the denominator is exactly `p`.
    pub fn prime_denominator(&self) -> Option<Prime> {
        match self.denom.iter().collect::<Vec<_>>().as_slice() {
            [(p, 1)] => Some(**p),
            _ => None,
        }
    }

    pub fn is_member(&self) -> MembershipReport {
        let num = self.numerator_product();
        let fd_num = fixed_divisor(&num).expect("numerator is nonzero");
        // A product of primitive polynomials has fd dividing deg!, which
        // always factors.
        let mut fd_numerator: BTreeMap<Prime, u32> = factor_integer(&fd_num).unwrap_or_default();
        for &p in self.denom.keys() {
            fd_numerator.entry(p).or_insert_with(|| {
                padic_valuation(&fd_num, p).finite().expect("nonzero")
            });
        }
        let is_member = self
            .denom
            .iter()
            .all(|(p, e)| *e <= fd_numerator.get(p).copied().unwrap_or(0));
        let is_image_primitive = is_member
            && self.constant.abs().is_one()
            && fd_numerator
                .iter()
                .all(|(p, v)| *v == self.exponent(*p));
        let fd_of_f = is_member.then(|| self.constant.abs() * &fd_num / self.denominator());
        MembershipReport {
            is_member,
            is_image_primitive,
            fd_numerator,
            fd_of_f,
        }
    }

    /// `f^n`, factors repeated in index order.
    pub fn pow(&self, n: u32) -> Self {
        let mut factors = Vec::with_capacity(self.factors.len() * n as usize);
        for _ in 0..n {
            factors.extend(self.factors.iter().cloned());
        }
        Self {
            constant: crate::scalar::pow(&self.constant, n),
            denom: self.denom.iter().map(|(p, e)| (*p, e * n)).collect(),
            factors,
        }
    }

    /// Exact value `f(w)` as a reduced fraction `(numerator, denominator)`.
    pub fn eval(&self, w: &Int) -> (Int, Int) {
        let num: Int = self.constant.clone() * self.factors.iter().map(|g| g.eval(w)).product::<Int>();
        let den = self.denominator();
        let g = num.gcd(&den);
        if g.is_zero() {
            return (num, den);
        }
        (num / &g, den / g)
    }

    /// Same element of `Q[x]`, compared by cross-multiplying expanded numerators.
    pub fn same_rational_function(&self, other: &StandardForm) -> bool {
        let lhs = self.numerator_product().scale(&(self.constant.clone() * other.denominator()));
        let rhs = other.numerator_product().scale(&(other.constant.clone() * self.denominator()));
        lhs == rhs
    }

    /// Rendering in the input grammar, re-parseable.
    pub fn to_expression(&self) -> String {
        let mut s = String::new();
        if !self.constant.is_one() || self.factors.is_empty() {
            s.push_str(&self.constant.to_string());
            if !self.factors.is_empty() {
                s.push('*');
            }
        }
        let mut i = 0;
        let mut first = true;
        while i < self.factors.len() {
            let mut run = 1;
            while i + run < self.factors.len() && self.factors[i + run] == self.factors[i] {
                run += 1;
            }
            if !first {
                s.push('*');
            }
            first = false;
            s.push_str(&format!("({})", self.factors[i]));
            if run > 1 {
                s.push_str(&format!("^{run}"));
            }
            i += run;
        }
        let b = self.denominator();
        if !b.is_one() {
            s.push_str(&format!("/{b}"));
        }
        s
    }
}

impl fmt::Display for StandardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expression())
    }
}
