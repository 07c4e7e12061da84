//! Three-valued irreducibility verdicts with re-checkable certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::essential::{Classification, ClassificationGrid, Kind};
use crate::graph::LabeledGraph;
use crate::prime::{factor_integer, is_prime_u64, Prime};
use crate::standard_form::{relevant_primes, MembershipReport, StandardForm};
use crate::{Int, IntPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Proven,
    Disproven,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proven => "proven",
            Status::Disproven => "disproven",
            Status::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which argument produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// A prime divides `fd(f)`, so `f = p * (f/p)`.
    NotImagePrimitive,
    /// One numerator factor and `fd(f) = 1`.
    SingleFactor,
    EssentialGraphConnected,
    /// Square-free denominator and a factor essential for no prime splits off.
    InessentialSplitOff,
    /// Prime denominator `p`: irreducible iff every factor is essential for `p`.
    PrimeDenominator,
    QuintessentialGraphConnected,
    /// Square-free denominator and disconnected quintessential graph.
    SquarefreeDisconnected,
    /// Prime denominator `p`: absolutely irreducible iff every factor is quintessential for `p`.
    PrimeDenominatorQuintessential,
    /// Constant inputs: decided by integer factorization.
    Constant,
    /// Exhaustive search by the oracle.
    OracleSearch,
    NoRuleApplies,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::NotImagePrimitive => "not-image-primitive",
            Rule::SingleFactor => "single-factor",
            Rule::EssentialGraphConnected => "essential-graph-connected",
            Rule::InessentialSplitOff => "inessential-split-off",
            Rule::PrimeDenominator => "prime-denominator",
            Rule::QuintessentialGraphConnected => "quintessential-graph-connected",
            Rule::SquarefreeDisconnected => "squarefree-disconnected",
            Rule::PrimeDenominatorQuintessential => "prime-denominator-quintessential",
            Rule::Constant => "constant",
            Rule::OracleSearch => "oracle-search",
            Rule::NoRuleApplies => "no-rule-applies",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `f^power = parts[0] * parts[1] * ...` in `Int(Z)`, essentially different
/// from `f * ... * f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationWitness {
    pub power: u32,
    pub parts: Vec<StandardForm>,
    pub note: String,
}

impl FactorizationWitness {
    /// Re-verifies the witness against `f`: the parts multiply to `f^power`
    /// coefficientwise, each part is a non-unit member of `Int(Z)`, and the
    /// parts are not `power` associates of `f`.
    pub fn verify(&self, f: &StandardForm) -> Result<()> {
        if self.power == 0 || self.parts.is_empty() {
            return Err(Error::Internal("empty factorization witness".into()));
        }
        let target = f.pow(self.power);
        let mut num = IntPoly::constant(Int::one());
        let mut den = Int::one();
        for part in &self.parts {
            num = &num * &part.numerator_product().scale(part.constant());
            den *= part.denominator();
        }
        let lhs = num.scale(&target.denominator());
        let rhs = target.numerator_product().scale(&(target.constant() * &den));
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "parts do not multiply to f^{}",
                self.power
            )));
        }
        for part in &self.parts {
            if !part.is_member().is_member {
                return Err(Error::Internal(format!("part {part} is not in Int(Z)")));
            }
            if is_unit(part) {
                return Err(Error::Internal(format!("part {part} is a unit")));
            }
        }
        // Refining the parts into atoms must produce an atom not associated
        // to f, which happens exactly when some part is not a multiple of f.
        if self.parts.iter().all(|p| divides(f, p)) {
            return Err(Error::Internal(
                "every part is a multiple of f, so the factorization may refine to f^n".into(),
            ));
        }
        Ok(())
    }
}

/// Whether `h / d` lies in `Int(Z)`, treating the factors as irreducible.
pub fn divides(d: &StandardForm, h: &StandardForm) -> bool {
    let mut rest = h.factors().to_vec();
    for g in d.factors() {
        match rest.iter().position(|r| r == g) {
            Some(k) => {
                rest.remove(k);
            }
            None => return false,
        }
    }
    let constant = h.constant() * d.denominator();
    let denom = d.constant() * h.denominator();
    match StandardForm::normalize(&constant, rest, &denom) {
        Ok(q) => q.is_member().is_member,
        Err(_) => false,
    }
}

fn is_unit(sf: &StandardForm) -> bool {
    sf.is_constant() && sf.constant().abs().is_one() && sf.denom().is_empty()
}

/// Equal up to sign.
pub fn associated(a: &StandardForm, b: &StandardForm) -> bool {
    let mut fa = a.factors().to_vec();
    let mut fb = b.factors().to_vec();
    fa.sort();
    fb.sort();
    fa == fb && a.denom() == b.denom() && a.constant().abs() == b.constant().abs()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A connected graph whose edges are backed by the listed witnesses,
    /// each of at least `kind`.
    ConnectedGraph {
        kind: Kind,
        graph: LabeledGraph,
        witnesses: Vec<Classification>,
    },
    Splitting(FactorizationWitness),
    /// Factor (0-based) essential for no prime of a square-free denominator.
    InessentialFactor(usize),
    /// A prime dividing `fd(f)`.
    NotImagePrimitive(Prime),
    /// Prime factorization of a constant's absolute value.
    IntegerFactorization(BTreeMap<Prime, u32>),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub rule: Rule,
    pub certificate: Certificate,
    /// Why no rule decided, for `Unknown`; otherwise a short explanation.
    pub reason: String,
}

impl Verdict {
    fn unknown(reason: impl Into<String>) -> Self {
        Self {
            status: Status::Unknown,
            rule: Rule::NoRuleApplies,
            certificate: Certificate::None,
            reason: reason.into(),
        }
    }

    /// Re-checks the certificate against `f` from scratch.
    pub fn recheck(&self, f: &StandardForm) -> Result<()> {
        let fail = |m: &str| Err(Error::Internal(format!("{} certificate: {m}", self.rule)));
        match (&self.status, &self.certificate) {
            (Status::Unknown, Certificate::None) => Ok(()),
            (Status::Unknown, _) => fail("unknown verdict carries a certificate"),
            (_, Certificate::None) => fail("decided verdict without certificate"),
            (Status::Proven, Certificate::ConnectedGraph { kind, graph, witnesses }) => {
                if graph.vertex_count() != f.factors().len() || !graph.is_connected() {
                    return fail("graph is not connected on the factor set");
                }
                if !f.is_member().is_image_primitive {
                    return fail("f is not image-primitive");
                }
                for w in witnesses {
                    if w.kind < *kind || !w.verify(f.factors()) {
                        return fail("witness does not verify");
                    }
                }
                for ((i, j), primes) in graph.edges() {
                    for p in primes {
                        let backed = |v: usize| {
                            witnesses
                                .iter()
                                .any(|w| w.factor_index == v && w.prime == *p && w.kind >= *kind)
                        };
                        if !backed(*i) || !backed(*j) {
                            return fail("edge without witnesses");
                        }
                    }
                }
                Ok(())
            }
            (Status::Disproven, Certificate::Splitting(w)) => w.verify(f),
            (Status::Disproven, Certificate::NotImagePrimitive(p)) => {
                let m = f.is_member();
                match m.fd_of_f {
                    Some(fd) if !f.is_constant() && fd.is_multiple_of(&p.to_int()) => Ok(()),
                    _ => fail("prime does not divide fd(f)"),
                }
            }
            (Status::Disproven, Certificate::InessentialFactor(i)) => {
                if !f.is_squarefree_denominator() || *i >= f.factors().len() || f.factors().len() < 2 {
                    return fail("preconditions of the split-off do not hold");
                }
                for &p in f.denom().keys() {
                    let c = crate::essential::classify(f.factors(), p, *i)?;
                    if c.kind != Kind::NotEssential || !c.verify(f.factors()) {
                        return fail("factor is essential");
                    }
                }
                Ok(())
            }
            (s, Certificate::IntegerFactorization(fac)) => {
                let value = constant_value(f).ok_or_else(|| Error::Internal("not an integer".into()))?;
                let back: Int = fac.iter().map(|(p, e)| p.power::<Int>(*e).expect("fits")).product();
                let total: u32 = fac.values().sum();
                let ok = back == value.abs() && fac.keys().all(|p| is_prime_u64(p.get()));
                match (ok, s, total) {
                    (true, Status::Proven, 1) | (true, Status::Disproven, 0) => Ok(()),
                    (true, Status::Disproven, t) if t >= 2 => Ok(()),
                    _ => fail("factorization does not support the verdict"),
                }
            }
            _ => fail("certificate does not match status"),
        }
    }
}

fn constant_value(f: &StandardForm) -> Option<Int> {
    if !f.is_constant() {
        return None;
    }
    let (q, r) = f.constant().div_rem(&f.denominator());
    r.is_zero().then_some(q)
}

/// Everything the graph criteria need, computed once.
#[derive(Clone, Debug)]
pub struct CriteriaContext {
    pub form: StandardForm,
    pub membership: MembershipReport,
    pub primes: BTreeSet<Prime>,
    pub grid: ClassificationGrid,
    pub essential: LabeledGraph,
    pub quintessential: LabeledGraph,
}

impl CriteriaContext {
    /// Fails on constant inputs and on non-members.
    pub fn new(sf: &StandardForm) -> Result<Self> {
        if sf.is_constant() {
            return Err(Error::ConstantInput);
        }
        let membership = sf.is_member();
        if !membership.is_member {
            return Err(Error::NotMember);
        }
        let primes = relevant_primes(&sf.numerator_product())?;
        let grid = ClassificationGrid::compute(sf.factors(), &primes)?;
        Ok(Self {
            form: sf.clone(),
            membership,
            essential: grid.essential_graph(),
            quintessential: grid.quintessential_graph(),
            primes,
            grid,
        })
    }

    fn witnesses(&self, kind: Kind) -> Vec<Classification> {
        self.grid.iter().filter(|c| c.kind >= kind).cloned().collect()
    }

    fn connected_certificate(&self, kind: Kind) -> Certificate {
        let graph = match kind {
            Kind::Quintessential => self.quintessential.clone(),
            _ => self.essential.clone(),
        };
        Certificate::ConnectedGraph {
            kind,
            graph,
            witnesses: self.witnesses(kind),
        }
    }

    fn not_image_primitive(&self) -> Result<Option<Verdict>> {
        if self.membership.is_image_primitive {
            return Ok(None);
        }
        let fd = self.membership.fd_of_f.clone().expect("member");
        let p = *factor_integer(&fd)?.keys().next().expect("fd(f) > 1");
        Ok(Some(Verdict {
            status: Status::Disproven,
            rule: Rule::NotImagePrimitive,
            certificate: Certificate::NotImagePrimitive(p),
            reason: format!("fd(f) = {fd}, so f = {p} * (f/{p})"),
        }))
    }

    /// The first factor that is essential for no prime, if any.
    fn inessential_factor(&self) -> Option<usize> {
        (0..self.form.factors().len())
            .find(|&i| self.grid.primes().all(|p| !self.grid.kind(i, p).is_essential()))
    }

    pub fn check_irreducible(&self) -> Result<Verdict> {
        if let Some(v) = self.not_image_primitive()? {
            return Ok(v);
        }
        let sf = &self.form;
        if sf.factors().len() == 1 {
            return Ok(Verdict {
                status: Status::Proven,
                rule: Rule::SingleFactor,
                certificate: self.connected_certificate(Kind::Essential),
                reason: "irreducible in Q[x] and image-primitive".into(),
            });
        }
        if self.essential.is_connected() {
            return Ok(Verdict {
                status: Status::Proven,
                rule: Rule::EssentialGraphConnected,
                certificate: self.connected_certificate(Kind::Essential),
                reason: "essential graph is connected".into(),
            });
        }
        if sf.is_squarefree_denominator() {
            if let Some(i) = self.inessential_factor() {
                let witness = split_off(sf, i)?;
                witness.verify(sf)?;
                return Ok(Verdict {
                    status: Status::Disproven,
                    rule: Rule::InessentialSplitOff,
                    certificate: Certificate::Splitting(witness),
                    reason: format!("factor {} is essential for no prime", i + 1),
                });
            }
        }
        if let Some(p) = sf.prime_denominator() {
            // With fd(f) = 1 and b = p, a connected essential graph is the
            // only way for every factor to be essential; the remaining case
            // is an inessential factor, which the split-off above handles.
            let i = (0..sf.factors().len())
                .find(|&i| !self.grid.kind(i, p).is_essential())
                .ok_or_else(|| Error::Internal("prime denominator with all factors essential".into()))?;
            return Ok(Verdict {
                status: Status::Disproven,
                rule: Rule::PrimeDenominator,
                certificate: Certificate::InessentialFactor(i),
                reason: format!("factor {} is not essential for {p}", i + 1),
            });
        }
        Ok(Verdict::unknown(
            "essential graph is disconnected and the denominator is not square-free",
        ))
    }

    pub fn check_absolutely_irreducible(&self) -> Result<Verdict> {
        if let Some(v) = self.not_image_primitive()? {
            return Ok(v);
        }
        if self.quintessential.is_connected() {
            return Ok(Verdict {
                status: Status::Proven,
                rule: Rule::QuintessentialGraphConnected,
                certificate: self.connected_certificate(Kind::Quintessential),
                reason: "quintessential graph is connected".into(),
            });
        }
        if self.form.is_squarefree_denominator() {
            let irreducible = self.check_irreducible()?;
            if irreducible.status == Status::Disproven {
                return Ok(Verdict {
                    reason: format!("not irreducible: {}", irreducible.reason),
                    ..irreducible
                });
            }
            let witness = self.construct_counterexample()?;
            return Ok(Verdict {
                status: Status::Disproven,
                rule: Rule::SquarefreeDisconnected,
                certificate: Certificate::Splitting(witness),
                reason: "quintessential graph is disconnected and the denominator is square-free".into(),
            });
        }
        Ok(Verdict::unknown(
            "quintessential graph is disconnected and the denominator is not square-free",
        ))
    }

    /// Splits the factor set along a disconnection of the quintessential
    /// graph and returns the two-part factorization of `f^3`.
    pub fn construct_counterexample(&self) -> Result<FactorizationWitness> {
        let sf = &self.form;
        if !self.membership.is_image_primitive {
            return Err(Error::NotImagePrimitive);
        }
        if !sf.is_squarefree_denominator() {
            return Err(Error::Precondition("denominator is not square-free".into()));
        }
        if sf.factors().len() < 2 {
            return Err(Error::Precondition("needs at least two factors".into()));
        }
        let components = self.quintessential.connected_components()?;
        if components.len() < 2 {
            return Err(Error::Precondition("quintessential graph is connected".into()));
        }
        let first: BTreeSet<usize> = components[0].iter().copied().collect();
        let mut t1 = BTreeMap::new();
        let mut t2 = BTreeMap::new();
        for &p in sf.denom().keys() {
            let quint: Vec<usize> = (0..sf.factors().len())
                .filter(|&i| self.grid.kind(i, p) == Kind::Quintessential)
                .collect();
            let in_first = quint.iter().any(|i| first.contains(i));
            let in_rest = quint.iter().any(|i| !first.contains(i));
            match (in_first, in_rest) {
                (true, true) => {
                    return Err(Error::Internal(format!(
                        "prime {p} is quintessential on both sides of a disconnection"
                    )))
                }
                (false, true) => {
                    t2.insert(p, 1);
                }
                _ => {
                    t1.insert(p, 1);
                }
            }
        }
        let build = |heavy: &BTreeSet<usize>, heavy_primes: &BTreeMap<Prime, u32>, light_primes: &BTreeMap<Prime, u32>| {
            let mut factors = Vec::new();
            for (i, g) in sf.factors().iter().enumerate() {
                factors.push(g.clone());
                if heavy.contains(&i) {
                    factors.push(g.clone());
                }
            }
            let mut denom = BTreeMap::new();
            for &p in heavy_primes.keys() {
                denom.insert(p, 2);
            }
            for &p in light_primes.keys() {
                denom.insert(p, 1);
            }
            StandardForm::from_parts(Int::one(), denom, factors)
        };
        let rest: BTreeSet<usize> = (0..sf.factors().len()).filter(|i| !first.contains(i)).collect();
        let mut h1 = build(&first, &t1, &t2)?;
        let h2 = build(&rest, &t2, &t1)?;
        if sf.constant().is_negative() {
            h1 = StandardForm::from_parts(-Int::one(), h1.denom().clone(), h1.factors().to_vec())?;
        }
        let fmt_set = |s: &BTreeSet<usize>| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        let fmt_primes = |s: &BTreeMap<Prime, u32>| s.keys().map(Prime::to_string).collect::<Vec<_>>().join(",");
        let witness = FactorizationWitness {
            power: 3,
            parts: vec![h1, h2],
            note: format!(
                "J1={{{}}} J2={{{}}} T1={{{}}} T2={{{}}}; refining both parts into atoms gives a factorization of f^3 essentially different from f*f*f",
                fmt_set(&first),
                fmt_set(&rest),
                fmt_primes(&t1),
                fmt_primes(&t2)
            ),
        };
        witness
            .verify(sf)
            .map_err(|e| Error::Internal(format!("counterexample failed verification: {e}")))?;
        Ok(witness)
    }
}

/// `f = g_i * (f / g_i)`.
fn split_off(sf: &StandardForm, i: usize) -> Result<FactorizationWitness> {
    let single = StandardForm::from_parts(Int::one(), BTreeMap::new(), vec![sf.factors()[i].clone()])?;
    let mut rest_factors = sf.factors().to_vec();
    rest_factors.remove(i);
    let rest = StandardForm::from_parts(sf.constant().clone(), sf.denom().clone(), rest_factors)?;
    Ok(FactorizationWitness {
        power: 1,
        parts: vec![single, rest],
        note: format!("factor {} splits off", i + 1),
    })
}

pub fn check_irreducible(sf: &StandardForm) -> Result<Verdict> {
    CriteriaContext::new(sf)?.check_irreducible()
}

pub fn check_absolutely_irreducible(sf: &StandardForm) -> Result<Verdict> {
    CriteriaContext::new(sf)?.check_absolutely_irreducible()
}

pub fn construct_counterexample(sf: &StandardForm) -> Result<FactorizationWitness> {
    CriteriaContext::new(sf)?.construct_counterexample()
}

/// Direct test for a prime denominator `p` and unit constant: `f` is
/// absolutely irreducible iff `fd(prod g) = p` and every factor is
/// quintessential for `p`.
pub fn check_absolutely_irreducible_prime_denominator(sf: &StandardForm) -> Result<Verdict> {
    let p = sf
        .prime_denominator()
        .ok_or_else(|| Error::Precondition("denominator is not a prime".into()))?;
    let ctx = CriteriaContext::new(sf)?;
    if let Some(v) = ctx.not_image_primitive()? {
        return Ok(v);
    }
    let all_quint = (0..sf.factors().len()).all(|i| ctx.grid.kind(i, p) == Kind::Quintessential);
    if all_quint {
        Ok(Verdict {
            status: Status::Proven,
            rule: Rule::PrimeDenominatorQuintessential,
            certificate: ctx.connected_certificate(Kind::Quintessential),
            reason: format!("every factor is quintessential for {p}"),
        })
    } else {
        let v = ctx.check_absolutely_irreducible()?;
        Ok(Verdict {
            rule: Rule::PrimeDenominatorQuintessential,
            reason: format!("some factor is not quintessential for {p}"),
            ..v
        })
    }
}

/// A constant `c` is irreducible (and absolutely irreducible) in `Int(Z)`
/// iff `|c|` is prime: any factorization of `c^n` consists of constants by
/// degree additivity.
pub fn check_constant(value: &Int) -> Verdict {
    if value.is_zero() {
        return Verdict::unknown("zero is neither a unit nor irreducible");
    }
    match factor_integer(value) {
        Ok(fac) => {
            let total: u32 = fac.values().sum();
            let (status, reason) = match total {
                0 => (Status::Disproven, "a unit is not irreducible".to_string()),
                1 => (Status::Proven, format!("{} is prime", value.abs())),
                _ => (Status::Disproven, format!("{} is composite", value.abs())),
            };
            Verdict {
                status,
                rule: Rule::Constant,
                certificate: Certificate::IntegerFactorization(fac),
                reason,
            }
        }
        Err(_) => Verdict::unknown(format!(
            "{} has no factor below the trial-division bound and exceeds 64 bits",
            value.abs()
        )),
    }
}

/// Value of a constant standard form when it lies in `Z`.
pub fn constant_in_z(sf: &StandardForm) -> Option<Int> {
    constant_value(sf)
}
