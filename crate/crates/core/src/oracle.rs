//! Brute-force ground truth for factorizations of powers of an
//! image-primitive `f = prod(g_i) / prod(p^e_p)`.
//!
//! Every divisor `h` of `f^n` in `Int(Z)` is `prod(g^gamma) / prod(p^beta)`
//! up to sign, so divisors are enumerated as exponent shapes rather than
//! coefficient vectors. Equal numerator factors are merged into one group
//! with a multiplicity; shapes index groups, not input positions.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed};

use crate::criteria::FactorizationWitness;
use crate::error::{Error, Result};
use crate::essential::{ClassificationGrid, Kind};
use crate::prime::{padic_valuation, Prime, Valuation};
use crate::standard_form::StandardForm;
use crate::{Int, IntPoly};

pub const DEFAULT_GUARD: u64 = 10_000_000;
pub const MAX_POWER: u32 = 4;

/// Exponents of a divisor: `gamma[k]` for factor group `k`, `beta[t]` for
/// the `t`-th denominator prime.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorShape {
    pub gamma: Vec<u32>,
    pub beta: Vec<u32>,
}

impl DivisorShape {
    pub fn is_unit(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0) && self.beta.iter().all(|&b| b == 0)
    }

    fn le(&self, other: &Self) -> bool {
        self.gamma.iter().zip(&other.gamma).all(|(a, b)| a <= b)
            && self.beta.iter().zip(&other.beta).all(|(a, b)| a <= b)
    }

    fn sub(&self, other: &Self) -> Self {
        Self {
            gamma: self.gamma.iter().zip(&other.gamma).map(|(a, b)| a - b).collect(),
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A factorization of `f^n` into atoms; atoms sorted, so two
/// factorizations are essentially the same iff their atom lists are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub atoms: Vec<DivisorShape>,
    /// The unit in front, `+1` or `-1`.
    pub sign: i8,
}

/// Equal length and atoms matched up to sign. Shapes carry no sign, so
/// association of atoms is shape equality.
pub fn essentially_same(a: &Factorization, b: &Factorization) -> bool {
    if a.atoms.len() != b.atoms.len() {
        return false;
    }
    let mut x = a.atoms.clone();
    let mut y = b.atoms.clone();
    x.sort();
    y.sort();
    x == y
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanResult {
    DisprovenAt(u32, Factorization),
    NoCounterexampleUpTo(u32),
}

/// A failed instance of `beta_q(h) = e_q * gamma_j(h)` or
/// `gamma_j(h) = gamma_k(h)` for quintessential `j`, `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaViolation {
    DenominatorExponent {
        shape: DivisorShape,
        prime: Prime,
        factor_index: usize,
    },
    UnequalExponents {
        shape: DivisorShape,
        prime: Prime,
        first: usize,
        second: usize,
    },
}

/// Search context for one image-primitive `f`.
pub struct Oracle {
    form: StandardForm,
    groups: Vec<IntPoly>,
    multiplicity: Vec<u32>,
    group_of: Vec<usize>,
    primes: Vec<Prime>,
    exponents: Vec<u32>,
    guard: u64,
    /// `valuations[k][t][w] = v_{primes[t]}(groups[k](w))`.
    valuations: RefCell<Vec<Vec<Vec<Valuation>>>>,
    fd_cache: RefCell<HashMap<Vec<u32>, Vec<u32>>>,
    atom_cache: RefCell<HashMap<DivisorShape, bool>>,
}

impl Oracle {
    pub fn new(sf: &StandardForm, guard: u64) -> Result<Self> {
        if sf.is_constant() {
            return Err(Error::ConstantInput);
        }
        let m = sf.is_member();
        if !m.is_member {
            return Err(Error::NotMember);
        }
        if !m.is_image_primitive {
            return Err(Error::NotImagePrimitive);
        }
        let mut groups: Vec<IntPoly> = Vec::new();
        let mut multiplicity = Vec::new();
        let mut group_of = Vec::new();
        for g in sf.factors() {
            match groups.iter().position(|h| h == g) {
                Some(k) => {
                    multiplicity[k] += 1;
                    group_of.push(k);
                }
                None => {
                    groups.push(g.clone());
                    multiplicity.push(1);
                    group_of.push(groups.len() - 1);
                }
            }
        }
        let (primes, exponents) = sf.denom().iter().map(|(p, e)| (*p, *e)).unzip();
        Ok(Self {
            form: sf.clone(),
            valuations: RefCell::new(vec![Vec::new(); groups.len()]),
            groups,
            multiplicity,
            group_of,
            primes,
            exponents,
            guard,
            fd_cache: RefCell::new(HashMap::new()),
            atom_cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn form(&self) -> &StandardForm {
        &self.form
    }

    pub fn groups(&self) -> &[IntPoly] {
        &self.groups
    }

    pub fn group_of(&self, factor_index: usize) -> usize {
        self.group_of[factor_index]
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }

    /// Shape of `f^n` itself.
    pub fn power_shape(&self, n: u32) -> DivisorShape {
        DivisorShape {
            gamma: self.multiplicity.iter().map(|m| m * n).collect(),
            beta: self.exponents.iter().map(|e| e * n).collect(),
        }
    }

    fn check_power(&self, n: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::Precondition("power must be at least 1".into()));
        }
        if n > MAX_POWER {
            return Err(Error::PowerTooLarge { n, max: MAX_POWER });
        }
        let size: u128 = self
            .multiplicity
            .iter()
            .chain(&self.exponents)
            .map(|&m| (m * n) as u128 + 1)
            .product();
        if size > self.guard as u128 {
            return Err(Error::GuardExceeded {
                size,
                guard: self.guard,
            });
        }
        Ok(())
    }

    /// `fd_p` of `prod(groups[k]^gamma[k])` for each denominator prime.
    fn fd_exponents(&self, gamma: &[u32]) -> Vec<u32> {
        if let Some(v) = self.fd_cache.borrow().get(gamma) {
            return v.clone();
        }
        let degree: usize = gamma
            .iter()
            .zip(&self.groups)
            .map(|(&c, g)| c as usize * g.degree().unwrap_or(0))
            .sum();
        self.extend_valuations(degree);
        let vals = self.valuations.borrow();
        let out: Vec<u32> = (0..self.primes.len())
            .map(|t| {
                (0..=degree)
                    .filter_map(|w| {
                        let mut acc = 0u32;
                        for (k, &c) in gamma.iter().enumerate() {
                            if c == 0 {
                                continue;
                            }
                            match vals[k][t][w] {
                                Valuation::Finite(v) => acc += c * v,
                                Valuation::Infinite => return None,
                            }
                        }
                        Some(acc)
                    })
                    .min()
                    .expect("a nonzero polynomial of degree d has a nonzero value among d+1 points")
            })
            .collect();
        self.fd_cache.borrow_mut().insert(gamma.to_vec(), out.clone());
        out
    }

    fn extend_valuations(&self, degree: usize) {
        let mut vals = self.valuations.borrow_mut();
        for (k, g) in self.groups.iter().enumerate() {
            if vals[k].is_empty() {
                vals[k] = vec![Vec::new(); self.primes.len()];
            }
            for (t, &p) in self.primes.iter().enumerate() {
                let row = &mut vals[k][t];
                for w in row.len()..=degree {
                    row.push(padic_valuation(&g.eval(&Int::from(w)), p));
                }
            }
        }
    }

    /// `h` is an element of `Int(Z)`.
    fn is_member_shape(&self, h: &DivisorShape) -> bool {
        let fd = self.fd_exponents(&h.gamma);
        h.beta.iter().zip(&fd).all(|(b, f)| b <= f)
    }

    /// All `(gamma, beta)` with `h` and `f^n / h` both in `Int(Z)`, sorted.
    pub fn enumerate_divisors(&self, n: u32) -> Result<Vec<DivisorShape>> {
        self.check_power(n)?;
        let full = self.power_shape(n);
        let mut out = Vec::new();
        for gamma in boxes(&full.gamma) {
            let co_gamma: Vec<u32> = full.gamma.iter().zip(&gamma).map(|(a, b)| a - b).collect();
            let fd_h = self.fd_exponents(&gamma);
            let fd_k = self.fd_exponents(&co_gamma);
            let ranges: Vec<(u32, u32)> = (0..self.primes.len())
                .map(|t| {
                    let total = full.beta[t];
                    (total.saturating_sub(fd_k[t]), fd_h[t].min(total))
                })
                .collect();
            if ranges.iter().any(|(lo, hi)| lo > hi) {
                continue;
            }
            for beta in ranges_product(&ranges) {
                out.push(DivisorShape {
                    gamma: gamma.clone(),
                    beta,
                });
            }
        }
        out.sort();
        Ok(out)
    }

    /// `h` is a non-unit with no split `h = d * (h/d)` into non-units of `Int(Z)`.
    pub fn is_atom(&self, h: &DivisorShape) -> bool {
        if h.is_unit() || !self.is_member_shape(h) {
            return false;
        }
        if let Some(&v) = self.atom_cache.borrow().get(h) {
            return v;
        }
        let atom = self.find_split(h).is_none();
        self.atom_cache.borrow_mut().insert(h.clone(), atom);
        atom
    }

    /// A proper divisor `d` of `h` with `d` and `h/d` both non-unit members.
    pub fn find_split(&self, h: &DivisorShape) -> Option<(DivisorShape, DivisorShape)> {
        for gamma in boxes(&h.gamma) {
            let fd_d = self.fd_exponents(&gamma);
            let ranges: Vec<(u32, u32)> = h.beta.iter().zip(&fd_d).map(|(&b, &f)| (0, b.min(f))).collect();
            for beta in ranges_product(&ranges) {
                let d = DivisorShape {
                    gamma: gamma.clone(),
                    beta,
                };
                if d.is_unit() || d == *h {
                    continue;
                }
                let rest = h.sub(&d);
                if self.is_member_shape(&rest) {
                    return Some((d, rest));
                }
            }
        }
        None
    }

    /// All factorizations of `f^n` into atoms, up to essential sameness,
    /// in lexicographic order of their sorted atom lists.
    pub fn enumerate_factorizations(&self, n: u32) -> Result<Vec<Factorization>> {
        let atoms: Vec<DivisorShape> = self
            .enumerate_divisors(n)?
            .into_iter()
            .filter(|h| self.is_atom(h))
            .collect();
        let sign = if self.form.constant().is_negative() && n % 2 == 1 { -1 } else { 1 };
        let mut memo: HashMap<(DivisorShape, usize), Vec<Vec<usize>>> = HashMap::new();
        let mut budget = self.guard;
        let lists = decompose(&atoms, &self.power_shape(n), 0, &mut memo, &mut budget)
            .ok_or(Error::GuardExceeded {
                size: self.guard as u128 + 1,
                guard: self.guard,
            })?;
        let mut out: Vec<Factorization> = lists
            .into_iter()
            .map(|idx| Factorization {
                atoms: idx.into_iter().map(|i| atoms[i].clone()).collect(),
                sign,
            })
            .collect();
        out.sort_by(|a, b| a.atoms.cmp(&b.atoms));
        Ok(out)
    }

    /// Smallest `n <= n_max` at which `f^n` has a factorization other than
    /// `f * ... * f`.
    pub fn absolute_irreducibility_scan(&self, n_max: u32) -> Result<ScanResult> {
        if n_max > MAX_POWER {
            return Err(Error::PowerTooLarge { n: n_max, max: MAX_POWER });
        }
        if !self.is_atom(&self.power_shape(1)) {
            return Err(Error::Precondition("f is not irreducible".into()));
        }
        for n in 1..=n_max {
            let trivial = Factorization {
                atoms: vec![self.power_shape(1); n as usize],
                sign: 1,
            };
            if let Some(f) = self
                .enumerate_factorizations(n)?
                .into_iter()
                .find(|f| !essentially_same(f, &trivial))
            {
                return Ok(ScanResult::DisprovenAt(n, f));
            }
        }
        Ok(ScanResult::NoCounterexampleUpTo(n_max))
    }

    /// Checks the exponent identities for quintessential factors on every
    /// divisor of `f^n`.
    pub fn verify_lemma_exponents(&self, n: u32) -> Result<Vec<LemmaViolation>> {
        let shapes = self.enumerate_divisors(n)?;
        self.lemma_violations(&shapes)
    }

    /// Same check on caller-supplied shapes.
    pub fn lemma_violations(&self, shapes: &[DivisorShape]) -> Result<Vec<LemmaViolation>> {
        let primes = self.primes.iter().copied().collect();
        let grid = ClassificationGrid::compute(self.form.factors(), &primes)?;
        let mut out = Vec::new();
        for (t, &q) in self.primes.iter().enumerate() {
            let e = self.exponents[t];
            let quint: Vec<usize> = (0..self.form.factors().len())
                .filter(|&j| grid.kind(j, q) == Kind::Quintessential)
                .collect();
            for h in shapes {
                for &j in &quint {
                    if h.beta[t] != e * h.gamma[self.group_of[j]] {
                        out.push(LemmaViolation::DenominatorExponent {
                            shape: h.clone(),
                            prime: q,
                            factor_index: j,
                        });
                    }
                }
                for (a, &j) in quint.iter().enumerate() {
                    for &k in &quint[a + 1..] {
                        if h.gamma[self.group_of[j]] != h.gamma[self.group_of[k]] {
                            out.push(LemmaViolation::UnequalExponents {
                                shape: h.clone(),
                                prime: q,
                                first: j,
                                second: k,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The element of `Int(Z)` a shape denotes, with the given sign.
    pub fn shape_to_form(&self, h: &DivisorShape, negative: bool) -> Result<StandardForm> {
        let mut factors = Vec::new();
        for (k, &c) in h.gamma.iter().enumerate() {
            for _ in 0..c {
                factors.push(self.groups[k].clone());
            }
        }
        let denom: BTreeMap<Prime, u32> = self.primes.iter().copied().zip(h.beta.iter().copied()).collect();
        let constant = if negative { -Int::one() } else { Int::one() };
        StandardForm::from_parts(constant, denom, factors)
    }

    /// Multiplies the atoms out and checks them against `f^n` coefficientwise.
    pub fn to_witness(&self, n: u32, fac: &Factorization) -> Result<FactorizationWitness> {
        let parts = fac
            .atoms
            .iter()
            .enumerate()
            .map(|(i, h)| self.shape_to_form(h, i == 0 && fac.sign < 0))
            .collect::<Result<Vec<_>>>()?;
        let w = FactorizationWitness {
            power: n,
            parts,
            note: format!("factorization of f^{n} into {} atoms found by exhaustive search", fac.atoms.len()),
        };
        Ok(w)
    }
}

/// Every vector `v` with `0 <= v[i] <= upper[i]`, lexicographic order.
fn boxes(upper: &[u32]) -> Vec<Vec<u32>> {
    ranges_product(&upper.iter().map(|&u| (0, u)).collect::<Vec<_>>())
}

fn ranges_product(ranges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi.saturating_sub(lo) as usize + 1));
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Multisets of atom indices (non-decreasing from `start`) summing to `rest`;
/// `None` once `budget` results have been produced.
fn decompose(
    atoms: &[DivisorShape],
    rest: &DivisorShape,
    start: usize,
    memo: &mut HashMap<(DivisorShape, usize), Vec<Vec<usize>>>,
    budget: &mut u64,
) -> Option<Vec<Vec<usize>>> {
    if rest.is_unit() {
        return Some(vec![Vec::new()]);
    }
    let key = (rest.clone(), start);
    if let Some(v) = memo.get(&key) {
        return Some(v.clone());
    }
    let mut out = Vec::new();
    for i in start..atoms.len() {
        if !atoms[i].le(rest) {
            continue;
        }
        let tails = decompose(atoms, &rest.sub(&atoms[i]), i, memo, budget)?;
        for t in tails {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut v = Vec::with_capacity(t.len() + 1);
            v.push(i);
            v.extend(t);
            out.push(v);
        }
    }
    memo.insert(key, out.clone());
    Some(out)
}

pub fn enumerate_divisors(sf: &StandardForm, n: u32) -> Result<Vec<DivisorShape>> {
    Oracle::new(sf, DEFAULT_GUARD)?.enumerate_divisors(n)
}

pub fn is_atom_bruteforce(h: &DivisorShape, sf: &StandardForm) -> Result<bool> {
    Ok(Oracle::new(sf, DEFAULT_GUARD)?.is_atom(h))
}

pub fn enumerate_factorizations(sf: &StandardForm, n: u32) -> Result<Vec<Factorization>> {
    Oracle::new(sf, DEFAULT_GUARD)?.enumerate_factorizations(n)
}

pub fn absolute_irreducibility_scan(sf: &StandardForm, n_max: u32) -> Result<ScanResult> {
    Oracle::new(sf, DEFAULT_GUARD)?.absolute_irreducibility_scan(n_max)
}

pub fn verify_lemma_exponents(sf: &StandardForm, n: u32) -> Result<Vec<LemmaViolation>> {
    Oracle::new(sf, DEFAULT_GUARD)?.verify_lemma_exponents(n)
}
