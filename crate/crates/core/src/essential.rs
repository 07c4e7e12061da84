//! Essential and quintessential factors, their witnesses, and the graphs
//! they induce on the factor indices.
//!
//! For a prime `p` with `e = fd_p(prod g)`: `g_i` is essential for `p` if
//! some `w` has `p | g_i(w)` and `p` dividing no other `g_j(w)`; it is
//! quintessential if moreover `v_p(g_i(w)) = e` exactly.
//!
//! `g(w) mod p^k` depends only on `w mod p^k`, so the coprimality
//! conditions are decided mod `p` and the exact valuation mod `p^(e+1)`.
//! The searches below are therefore complete; they return the least
//! non-negative witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::prime::{padic_valuation, Prime, Valuation};
use crate::standard_form::fixed_divisor_p;
use crate::{Int, IntPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    NotEssential,
    Essential,
    Quintessential,
}

impl Kind {
    pub fn is_essential(self) -> bool {
        self >= Kind::Essential
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::NotEssential => "not-essential",
            Kind::Essential => "essential",
            Kind::Quintessential => "quintessential",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict for one `(factor, prime)` pair. `factor_index` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub factor_index: usize,
    pub prime: Prime,
    pub kind: Kind,
    /// Least non-negative witness for `kind`; `None` iff not essential.
    pub witness: Option<Int>,
    /// Least witness for plain essentiality (equals `witness` unless the
    /// factor is quintessential with a larger least witness).
    pub essential_witness: Option<Int>,
    /// `fd_p` of the full numerator.
    pub fd_exponent: u32,
}

impl Classification {
    /// Re-checks the witness against the defining valuation conditions.
    /// A `NotEssential` claim is re-checked by brute force over all residues mod `p`.
    pub fn verify(&self, factors: &[IntPoly]) -> bool {
        let Some(g) = factors.get(self.factor_index) else {
            return false;
        };
        let others_coprime = |w: &Int| {
            factors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != self.factor_index)
                .all(|(_, h)| padic_valuation(&h.eval(w), self.prime) == Valuation::Finite(0))
        };
        let essential_ok = |w: &Int| padic_valuation(&g.eval(w), self.prime).is_positive() && others_coprime(w);
        match (self.kind, &self.witness) {
            (Kind::NotEssential, None) => {
                self.essential_witness.is_none()
                    && (0..self.prime.get()).all(|r| !essential_ok(&Int::from(r)))
            }
            (Kind::Essential, Some(w)) => essential_ok(w),
            (Kind::Quintessential, Some(w)) => {
                padic_valuation(&g.eval(w), self.prime) == Valuation::Finite(self.fd_exponent)
                    && others_coprime(w)
                    && self.essential_witness.as_ref().is_some_and(essential_ok)
            }
            _ => false,
        }
    }
}

/// Classifies factor `i` (0-based) for the prime `p`.
///
/// Fails with [`Error::PrimeDoesNotDivideFixedDivisor`] when `p` does not
/// divide the fixed divisor of the product; the notions are only defined
/// for such primes.
pub fn classify(factors: &[IntPoly], p: Prime, i: usize) -> Result<Classification> {
    if i >= factors.len() {
        return Err(Error::FactorIndex {
            index: i,
            len: factors.len(),
        });
    }
    let product: IntPoly = factors.iter().product();
    let e = fixed_divisor_p(&product, p)?;
    if e == 0 {
        return Err(Error::PrimeDoesNotDivideFixedDivisor { prime: p });
    }
    Ok(classify_with_exponent(factors, p, e, i))
}

fn classify_with_exponent(factors: &[IntPoly], p: Prime, e: u32, i: usize) -> Classification {
    let pi = p.to_int();
    let g = &factors[i];
    // Residues mod p at which g_i vanishes mod p and every other factor does not.
    let base: Vec<Int> = (0..p.get())
        .map(Int::from)
        .filter(|r| {
            g.eval(r).is_multiple_of(&pi)
                && factors
                    .iter()
                    .enumerate()
                    .all(|(j, h)| j == i || !h.eval(r).is_multiple_of(&pi))
        })
        .collect();
    let mut out = Classification {
        factor_index: i,
        prime: p,
        kind: Kind::NotEssential,
        witness: None,
        essential_witness: None,
        fd_exponent: e,
    };
    let Some(least) = base.first() else {
        return out;
    };
    out.kind = Kind::Essential;
    out.witness = Some(least.clone());
    out.essential_witness = Some(least.clone());

    // Lift residues mod p^k with p^k | g_i(r) up to k = e.
    let mut level = base;
    let mut modulus = pi.clone();
    for _ in 1..e {
        let next_mod = &modulus * &pi;
        let mut next = Vec::new();
        for r in &level {
            for t in 0..p.get() {
                let cand = r + &modulus * Int::from(t);
                if g.eval(&cand).is_multiple_of(&next_mod) {
                    next.push(cand);
                }
            }
        }
        level = next;
        modulus = next_mod;
    }
    // Final digit: v_p(g_i(w)) must be exactly e.
    let top = &modulus * &pi;
    let m = &modulus;
    let exact = level
        .iter()
        .flat_map(|r| (0..p.get()).map(move |t| r + m * Int::from(t)))
        .filter(|w| {
            let v = g.eval(w);
            v.is_multiple_of(&modulus) && !(v.is_zero() || v.is_multiple_of(&top))
        })
        .min();
    if let Some(w) = exact {
        out.kind = Kind::Quintessential;
        out.witness = Some(w);
    }
    out
}

/// Classification of every factor for every relevant prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationGrid {
    factor_count: usize,
    exponents: BTreeMap<Prime, u32>,
    cells: BTreeMap<(Prime, usize), Classification>,
}

impl ClassificationGrid {
    pub fn compute(factors: &[IntPoly], primes: &BTreeSet<Prime>) -> Result<Self> {
        let product: IntPoly = factors.iter().product();
        let mut exponents = BTreeMap::new();
        let mut cells = BTreeMap::new();
        for &p in primes {
            let e = fixed_divisor_p(&product, p)?;
            if e == 0 {
                return Err(Error::PrimeDoesNotDivideFixedDivisor { prime: p });
            }
            exponents.insert(p, e);
            for i in 0..factors.len() {
                cells.insert((p, i), classify_with_exponent(factors, p, e, i));
            }
        }
        Ok(Self {
            factor_count: factors.len(),
            exponents,
            cells,
        })
    }

    pub fn factor_count(&self) -> usize {
        self.factor_count
    }

    pub fn primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.exponents.keys().copied()
    }

    pub fn exponent(&self, p: Prime) -> Option<u32> {
        self.exponents.get(&p).copied()
    }

    pub fn get(&self, i: usize, p: Prime) -> Option<&Classification> {
        self.cells.get(&(p, i))
    }

    pub fn kind(&self, i: usize, p: Prime) -> Kind {
        self.get(i, p).map_or(Kind::NotEssential, |c| c.kind)
    }

    /// Cells ordered by prime, then factor index.
    pub fn iter(&self) -> impl Iterator<Item = &Classification> {
        self.cells.values()
    }

    fn graph(&self, min_kind: Kind) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.factor_count);
        for p in self.primes() {
            let members: Vec<usize> = (0..self.factor_count)
                .filter(|&i| self.kind(i, p) >= min_kind)
                .collect();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    g.add_edge(i, j, p);
                }
            }
        }
        g
    }

    pub fn essential_graph(&self) -> LabeledGraph {
        self.graph(Kind::Essential)
    }

    pub fn quintessential_graph(&self) -> LabeledGraph {
        self.graph(Kind::Quintessential)
    }
}

pub fn essential_graph(factors: &[IntPoly], primes: &BTreeSet<Prime>) -> Result<LabeledGraph> {
    Ok(ClassificationGrid::compute(factors, primes)?.essential_graph())
}

pub fn quintessential_graph(factors: &[IntPoly], primes: &BTreeSet<Prime>) -> Result<LabeledGraph> {
    Ok(ClassificationGrid::compute(factors, primes)?.quintessential_graph())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_form::relevant_primes;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn prime(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn example() -> Vec<IntPoly> {
        vec![p(&[-19, 0, 0, 1]), p(&[9, 0, 1]), p(&[1, 0, 1]), p(&[-5, 1])]
    }

    fn primes_of(factors: &[IntPoly]) -> BTreeSet<Prime> {
        relevant_primes(&factors.iter().product()).unwrap()
    }

    #[test]
    fn example_classifications() {
        let f = example();
        let c = classify(&f, prime(5), 1).unwrap();
        assert_eq!((c.kind, c.witness), (Kind::Quintessential, Some(Int::from(1))));
        assert_eq!(classify(&f, prime(5), 0).unwrap().kind, Kind::NotEssential);
        let c = classify(&f, prime(3), 1).unwrap();
        assert_eq!((c.kind, c.witness), (Kind::Essential, Some(Int::from(0))));
        assert_eq!(classify(&f, prime(3), 2).unwrap().kind, Kind::NotEssential);
        assert_eq!(classify(&f, prime(3), 3).unwrap().kind, Kind::Quintessential);
    }

    #[test]
    fn duplicate_factor_is_never_essential() {
        let f = vec![p(&[0, 1]), p(&[0, 1]), p(&[3, 0, 1])];
        assert_eq!(classify(&f, prime(2), 0).unwrap().kind, Kind::NotEssential);
        assert_eq!(classify(&f, prime(2), 1).unwrap().kind, Kind::NotEssential);
        let q = quintessential_graph(&f, &primes_of(&f)).unwrap();
        assert!(q.edges().is_empty());
        assert!(!q.is_connected());
    }

    #[test]
    fn misuse_is_an_error() {
        let f = example();
        assert_eq!(
            classify(&f, prime(7), 0),
            Err(Error::PrimeDoesNotDivideFixedDivisor { prime: prime(7) })
        );
        assert!(matches!(classify(&f, prime(3), 9), Err(Error::FactorIndex { .. })));
    }

    #[test]
    fn example_graphs() {
        let f = example();
        let primes = primes_of(&f);
        let ess = essential_graph(&f, &primes).unwrap();
        let edges: Vec<(usize, usize)> = ess.edges().keys().copied().collect();
        assert_eq!(edges, vec![(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(ess.is_connected());
        assert_eq!(ess.label(1, 3).unwrap(), &BTreeSet::from([prime(3), prime(5)]));

        let quint = quintessential_graph(&f, &primes).unwrap();
        let edges: Vec<(usize, usize)> = quint.edges().keys().copied().collect();
        assert_eq!(edges, vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(quint.label(1, 3).unwrap(), &BTreeSet::from([prime(5)]));
        assert_eq!(quint.connected_components().unwrap(), vec![vec![0], vec![1, 2, 3]]);
    }

    #[test]
    fn small_graphs() {
        let single = vec![p(&[0, 1, 1])];
        let g = essential_graph(&single, &primes_of(&single)).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().is_empty() && g.is_connected());

        let binom = vec![p(&[0, 1]), p(&[-1, 1])];
        let primes = primes_of(&binom);
        assert!(essential_graph(&binom, &primes).unwrap().has_edge(0, 1));
        assert!(quintessential_graph(&binom, &primes).unwrap().has_edge(0, 1));
        // w = 1 is a root of x - 1, so v_2 is infinite there.
        let c = classify(&binom, prime(2), 1).unwrap();
        assert_eq!(c.essential_witness, Some(Int::from(1)));
        assert_eq!(c.witness, Some(Int::from(3)));
    }

    #[test]
    fn higher_exponent_lifting() {
        // fd_2(x^2 (x^2 + 3)) = 2; x^2 + 3 has v_2 = 2 at w = 1.
        let f = vec![p(&[0, 0, 1]), p(&[3, 0, 1])];
        let c = classify(&f, prime(2), 1).unwrap();
        assert_eq!(c.fd_exponent, 2);
        assert_eq!((c.kind, c.witness.clone()), (Kind::Quintessential, Some(Int::from(1))));
        assert!(c.verify(&f));
    }

    /// Independent search over a full period `[0, p^(e+2))`.
    fn brute_force(factors: &[IntPoly], q: Prime, i: usize) -> (Option<i64>, Option<i64>) {
        let product: IntPoly = factors.iter().product();
        let e = fixed_divisor_p(&product, q).unwrap();
        let bound = (q.get() as i64).pow(e + 2);
        let mut ess = None;
        let mut quint = None;
        for w in 0..bound {
            let wi = Int::from(w);
            let others = factors
                .iter()
                .enumerate()
                .all(|(j, h)| j == i || padic_valuation(&h.eval(&wi), q) == Valuation::Finite(0));
            if !others {
                continue;
            }
            let v = padic_valuation(&factors[i].eval(&wi), q);
            if ess.is_none() && v.is_positive() {
                ess = Some(w);
            }
            if quint.is_none() && v == Valuation::Finite(e) {
                quint = Some(w);
            }
        }
        (ess, quint)
    }

    fn check_against_brute_force(factors: &[IntPoly]) -> std::result::Result<(), TestCaseError> {
        for q in primes_of(factors) {
            for i in 0..factors.len() {
                let c = classify(factors, q, i).unwrap();
                prop_assert!(c.verify(factors), "witness fails to verify: {:?}", c);
                let (ess, quint) = brute_force(factors, q, i);
                let expected = match (ess, quint) {
                    (_, Some(w)) => (Kind::Quintessential, Some(w)),
                    (Some(w), None) => (Kind::Essential, Some(w)),
                    (None, None) => (Kind::NotEssential, None),
                };
                prop_assert_eq!((c.kind, c.witness.clone()), (expected.0, expected.1.map(Int::from)));
                prop_assert_eq!(c.essential_witness.clone(), ess.map(Int::from));
                if let Some(w) = &c.witness {
                    // Shifting by a full period keeps the certificate valid.
                    let shifted = Classification {
                        witness: Some(w + q.power::<Int>(c.fd_exponent + 1).unwrap()),
                        ..c.clone()
                    };
                    prop_assert!(shifted.verify(factors));
                }
            }
        }
        Ok(())
    }

    #[test]
    fn brute_force_agrees_on_known_examples() {
        check_against_brute_force(&example()).unwrap();
        check_against_brute_force(&[p(&[0, 1]), p(&[0, 1]), p(&[3, 0, 1])]).unwrap();
        check_against_brute_force(&[p(&[0, 1]), p(&[-1, 1]), p(&[-2, 1])]).unwrap();
        check_against_brute_force(&[p(&[0, 1]), p(&[-1, 1]), p(&[-2, 1]), p(&[-3, 1]), p(&[-4, 1])]).unwrap();
    }

    fn factor() -> impl Strategy<Value = IntPoly> {
        (1usize..=3)
            .prop_flat_map(|d| (prop::collection::vec(-6i64..=6, d), 1i64..=3))
            .prop_map(|(mut c, lead)| {
                c.push(lead);
                IntPoly::from_i64s(&c).primitive_part().unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn brute_force_agrees_on_random_factors(fs in prop::collection::vec(factor(), 1..=3)) {
            check_against_brute_force(&fs)?;
        }

        #[test]
        fn quintessential_edges_are_essential(fs in prop::collection::vec(factor(), 1..=4)) {
            let primes = primes_of(&fs);
            let ess = essential_graph(&fs, &primes).unwrap();
            let quint = quintessential_graph(&fs, &primes).unwrap();
            for ((i, j), label) in quint.edges() {
                let outer = ess.label(*i, *j).unwrap();
                prop_assert!(label.is_subset(outer));
            }
        }

        #[test]
        fn associated_factors_are_excluded(fs in prop::collection::vec(factor(), 1..=2), dup in 0usize..2) {
            let mut fs = fs;
            let d = fs[dup % fs.len()].clone();
            fs.push(d);
            let last = fs.len() - 1;
            for q in primes_of(&fs) {
                prop_assert_eq!(classify(&fs, q, last).unwrap().kind, Kind::NotEssential);
                prop_assert_eq!(classify(&fs, q, dup % (fs.len() - 1)).unwrap().kind, Kind::NotEssential);
            }
        }
    }
}
