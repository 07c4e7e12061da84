//! End-to-end analysis of an input expression and its text, JSON and DOT
//! renderings.
//!
//! JSON reports carry `"schema": "ivp-atoms/1"`, keep a fixed field order,
//! and serialize every integer of unbounded size as a decimal string.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::criteria::{Certificate, CriteriaContext, FactorizationWitness, Rule, Status, Verdict};
use crate::error::{Error, Result};
use crate::essential::{Classification, ClassificationGrid};
use crate::graph::LabeledGraph;
use crate::irreducible::{split_rational_roots, verify_irreducible_best_effort, Irreducibility};
use crate::oracle::{Oracle, ScanResult, DEFAULT_GUARD};
use crate::parse::parse;
use crate::prime::Prime;
use crate::standard_form::{MembershipReport, StandardForm};
use crate::{criteria, Int};

pub const SCHEMA_VERSION: &str = "ivp-atoms/1";

/// JSON Schema for [`AnalysisReport::to_json`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/ivp-atoms-1.schema.json");

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Run the brute-force oracle up to this power.
    pub oracle: Option<u32>,
    pub guard: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            oracle: None,
            guard: DEFAULT_GUARD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Essential,
    Quintessential,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Essential => "essential",
            GraphKind::Quintessential => "quintessential",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleScan {
    NotRun(String),
    DisprovenAt(u32, FactorizationWitness),
    NoCounterexampleUpTo(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSummary {
    pub power_bound: u32,
    pub is_atom: bool,
    pub scan: OracleScan,
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub input: String,
    pub form: StandardForm,
    pub factor_irreducibility: Vec<Irreducibility>,
    pub membership: MembershipReport,
    pub grid: Option<ClassificationGrid>,
    pub essential: Option<LabeledGraph>,
    pub quintessential: Option<LabeledGraph>,
    pub irreducible: Option<Verdict>,
    pub absolutely_irreducible: Option<Verdict>,
    pub counterexample: Option<FactorizationWitness>,
    pub oracle: Option<OracleSummary>,
    pub warnings: Vec<String>,
}

/// Parses, splits rational roots off low-degree factors, and normalizes.
pub fn prepare(source: &str) -> Result<(StandardForm, Vec<Irreducibility>, Vec<String>)> {
    let expr = parse(source)?;
    let mut warnings = Vec::new();
    let mut raw = Vec::new();
    for g in expr.expanded_factors() {
        let parts = split_rational_roots(&g);
        if parts.len() > 1 {
            warnings.push(format!(
                "factor ({g}) has a rational root and was split into {}",
                parts.iter().map(|p| format!("({p})")).collect::<Vec<_>>().join("*")
            ));
        }
        raw.extend(parts);
    }
    let constant = expr.constant.clone().unwrap_or_else(|| Int::from(1));
    let denom = expr.denominator.clone().unwrap_or_else(|| Int::from(1));
    let form = StandardForm::normalize(&constant, raw, &denom)?;
    let mut verdicts = Vec::with_capacity(form.factors().len());
    for (i, g) in form.factors().iter().enumerate() {
        let v = verify_irreducible_best_effort(g)?;
        if v == Irreducibility::Unknown {
            warnings.push(format!(
                "factor {} ({g}) could not be certified irreducible; results assume it is",
                i + 1
            ));
        }
        verdicts.push(v);
    }
    Ok((form, verdicts, warnings))
}

pub fn analyze(source: &str, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let (form, factor_irreducibility, warnings) = prepare(source)?;
    let membership = form.is_member();
    let mut report = AnalysisReport {
        input: source.to_string(),
        form: form.clone(),
        factor_irreducibility,
        membership: membership.clone(),
        grid: None,
        essential: None,
        quintessential: None,
        irreducible: None,
        absolutely_irreducible: None,
        counterexample: None,
        oracle: None,
        warnings,
    };
    if !membership.is_member {
        return Ok(report);
    }
    if form.is_constant() {
        let value = criteria::constant_in_z(&form).expect("member constants are integers");
        let v = criteria::check_constant(&value);
        report.irreducible = Some(v.clone());
        report.absolutely_irreducible = Some(v);
        return Ok(report);
    }
    let ctx = CriteriaContext::new(&form)?;
    let irreducible = ctx.check_irreducible()?;
    let absolute = ctx.check_absolutely_irreducible()?;
    if absolute.rule == Rule::SquarefreeDisconnected {
        if let Certificate::Splitting(w) = &absolute.certificate {
            report.counterexample = Some(w.clone());
        }
    }
    report.irreducible = Some(irreducible);
    report.absolutely_irreducible = Some(absolute);
    report.grid = Some(ctx.grid.clone());
    report.essential = Some(ctx.essential.clone());
    report.quintessential = Some(ctx.quintessential.clone());
    if let Some(n_max) = options.oracle {
        run_oracle(&mut report, n_max, options.guard)?;
    }
    Ok(report)
}

/// Runs the oracle and upgrades `Unknown` verdicts to `Disproven` when it
/// finds a verified splitting.
fn run_oracle(report: &mut AnalysisReport, n_max: u32, guard: u64) -> Result<()> {
    if !report.membership.is_image_primitive {
        report.oracle = Some(OracleSummary {
            power_bound: n_max,
            is_atom: false,
            scan: OracleScan::NotRun("f is not image-primitive".into()),
        });
        return Ok(());
    }
    let oracle = Oracle::new(&report.form, guard)?;
    let whole = oracle.power_shape(1);
    let is_atom = oracle.is_atom(&whole);
    if !is_atom {
        if let Some((d, rest)) = oracle.find_split(&whole) {
            let witness = FactorizationWitness {
                power: 1,
                parts: vec![
                    oracle.shape_to_form(&d, report.form.constant() < &Int::from(0))?,
                    oracle.shape_to_form(&rest, false)?,
                ],
                note: "split found by exhaustive divisor search".into(),
            };
            witness.verify(&report.form)?;
            for slot in [&mut report.irreducible, &mut report.absolutely_irreducible] {
                if slot.as_ref().is_some_and(|v| v.status == Status::Unknown) {
                    *slot = Some(Verdict {
                        status: Status::Disproven,
                        rule: Rule::OracleSearch,
                        certificate: Certificate::Splitting(witness.clone()),
                        reason: "not irreducible: exhaustive divisor search found a split".into(),
                    });
                }
            }
        }
        report.oracle = Some(OracleSummary {
            power_bound: n_max,
            is_atom,
            scan: OracleScan::NotRun("f is not irreducible".into()),
        });
        return Ok(());
    }
    let scan = match oracle.absolute_irreducibility_scan(n_max)? {
        ScanResult::NoCounterexampleUpTo(n) => OracleScan::NoCounterexampleUpTo(n),
        ScanResult::DisprovenAt(n, fac) => {
            let witness = oracle.to_witness(n, &fac)?;
            witness.verify(&report.form)?;
            if report
                .absolutely_irreducible
                .as_ref()
                .is_some_and(|v| v.status == Status::Unknown)
            {
                report.absolutely_irreducible = Some(Verdict {
                    status: Status::Disproven,
                    rule: Rule::OracleSearch,
                    certificate: Certificate::Splitting(witness.clone()),
                    reason: format!("exhaustive search found a second factorization of f^{n}"),
                });
            }
            OracleScan::DisprovenAt(n, witness)
        }
    };
    report.oracle = Some(OracleSummary {
        power_bound: n_max,
        is_atom,
        scan,
    });
    Ok(())
}

fn prime_exponents(map: &BTreeMap<Prime, u32>) -> Value {
    Value::Array(
        map.iter()
            .map(|(p, e)| json!({ "prime": p.to_string(), "exponent": e }))
            .collect(),
    )
}

fn form_json(sf: &StandardForm) -> Value {
    json!({
        "expression": sf.to_expression(),
        "constant": sf.constant().to_string(),
        "denominator": sf.denominator().to_string(),
        "denominator_factors": prime_exponents(sf.denom()),
        "factors": sf.factors().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    })
}

fn classification_json(c: &Classification) -> Value {
    json!({
        "factor": c.factor_index + 1,
        "prime": c.prime.to_string(),
        "kind": c.kind.as_str(),
        "witness": c.witness.as_ref().map(|w| w.to_string()),
        "fd_exponent": c.fd_exponent,
    })
}

pub fn graph_json(kind: GraphKind, g: &LabeledGraph) -> Value {
    let components = g.connected_components().unwrap_or_default();
    json!({
        "kind": kind.as_str(),
        "vertices": (1..=g.vertex_count()).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|((i, j), primes)| json!({
            "source": i + 1,
            "target": j + 1,
            "primes": primes.iter().map(Prime::to_string).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "components": components
            .iter()
            .map(|c| c.iter().map(|v| v + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "connected": components.len() == 1,
    })
}

fn witness_json(w: &FactorizationWitness) -> Value {
    json!({
        "power": w.power,
        "parts": w.parts.iter().map(form_json).collect::<Vec<_>>(),
        "note": w.note,
    })
}

fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::ConnectedGraph { kind, witnesses, .. } => json!({
            "type": "connected-graph",
            "graph_kind": kind.as_str(),
            "witnesses": witnesses.iter().map(classification_json).collect::<Vec<_>>(),
        }),
        Certificate::Splitting(w) => json!({ "type": "splitting", "witness": witness_json(w) }),
        Certificate::InessentialFactor(i) => json!({ "type": "inessential-factor", "factor": i + 1 }),
        Certificate::NotImagePrimitive(p) => json!({ "type": "not-image-primitive", "prime": p.to_string() }),
        Certificate::IntegerFactorization(f) => json!({ "type": "integer-factorization", "factors": prime_exponents(f) }),
        Certificate::None => json!({ "type": "none" }),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "status": v.status.as_str(),
        "rule": v.rule.as_str(),
        "reason": v.reason,
        "certificate": certificate_json(&v.certificate),
    })
}

fn oracle_json(o: &OracleSummary) -> Value {
    let scan = match &o.scan {
        OracleScan::NotRun(reason) => json!({ "result": "not-run", "reason": reason }),
        OracleScan::DisprovenAt(n, w) => json!({ "result": "disproven-at", "power": n, "factorization": witness_json(w) }),
        OracleScan::NoCounterexampleUpTo(n) => json!({ "result": "no-counterexample", "up_to": n }),
    };
    json!({ "power_bound": o.power_bound, "is_atom": o.is_atom, "scan": scan })
}

fn membership_json(m: &MembershipReport) -> Value {
    json!({
        "is_member": m.is_member,
        "is_image_primitive": m.is_image_primitive,
        "fd_numerator": prime_exponents(&m.fd_numerator),
        "fd_of_f": m.fd_of_f.as_ref().map(|v| v.to_string()),
    })
}

fn irreducibility_str(v: Irreducibility) -> &'static str {
    match v {
        Irreducibility::Proven => "proven",
        Irreducibility::Unknown => "unknown",
    }
}

impl AnalysisReport {
    pub fn to_json_value(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "input": self.input,
            "standard_form": form_json(&self.form),
            "factor_irreducibility": self.factor_irreducibility.iter().map(|v| irreducibility_str(*v)).collect::<Vec<_>>(),
            "membership": membership_json(&self.membership),
            "classifications": self.grid.as_ref().map(|g| g.iter().map(classification_json).collect::<Vec<_>>()),
            "essential_graph": self.essential.as_ref().map(|g| graph_json(GraphKind::Essential, g)),
            "quintessential_graph": self.quintessential.as_ref().map(|g| graph_json(GraphKind::Quintessential, g)),
            "irreducible": self.irreducible.as_ref().map(verdict_json),
            "absolutely_irreducible": self.absolutely_irreducible.as_ref().map(verdict_json),
            "counterexample": self.counterexample.as_ref().map(witness_json),
            "oracle": self.oracle.as_ref().map(oracle_json),
            "warnings": self.warnings,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.form;
        let _ = writeln!(s, "input:           {}", self.input);
        let _ = writeln!(s, "standard form:   {}", f.to_expression());
        let _ = writeln!(s, "constant:        {}", f.constant());
        let _ = writeln!(s, "denominator:     {}", render_factorization(f.denom(), &f.denominator().to_string()));
        for (i, g) in f.factors().iter().enumerate() {
            let cert = match self.factor_irreducibility.get(i) {
                Some(Irreducibility::Proven) => "irreducible",
                _ => "irreducibility unverified",
            };
            let _ = writeln!(s, "  g{} = {g}  [{cert}]", i + 1);
        }
        let m = &self.membership;
        let _ = writeln!(s, "member of Int(Z): {}", yes_no(m.is_member));
        let _ = writeln!(s, "image-primitive:  {}", yes_no(m.is_image_primitive));
        if let Some(fd) = &m.fd_of_f {
            let _ = writeln!(s, "fd(f):            {fd}");
        }
        if !m.fd_numerator.is_empty() {
            let parts: Vec<String> = m.fd_numerator.iter().map(|(p, e)| format!("v_{p} = {e}")).collect();
            let _ = writeln!(s, "fd(numerator):    {}", parts.join(", "));
        }
        if let Some(grid) = &self.grid {
            let _ = writeln!(s, "classification:");
            for p in grid.primes() {
                let _ = writeln!(s, "  p = {p} (fd_p = {}):", grid.exponent(p).unwrap_or(0));
                for i in 0..grid.factor_count() {
                    let c = grid.get(i, p).expect("complete grid");
                    match &c.witness {
                        Some(w) => {
                            let _ = writeln!(s, "    g{}: {} (w = {w})", i + 1, c.kind);
                        }
                        None => {
                            let _ = writeln!(s, "    g{}: {}", i + 1, c.kind);
                        }
                    }
                }
            }
        }
        for (name, g) in [("essential", &self.essential), ("quintessential", &self.quintessential)] {
            if let Some(g) = g {
                let _ = writeln!(s, "{name} graph: {}", render_graph(g));
            }
        }
        if let Some(v) = &self.irreducible {
            let _ = writeln!(s, "irreducible:            {} [{}] {}", v.status, v.rule, v.reason);
        }
        if let Some(v) = &self.absolutely_irreducible {
            let _ = writeln!(s, "absolutely irreducible: {} [{}] {}", v.status, v.rule, v.reason);
            if let Certificate::Splitting(w) = &v.certificate {
                write_witness(&mut s, w);
            }
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "oracle (n <= {}): atom = {}", o.power_bound, yes_no(o.is_atom));
            match &o.scan {
                OracleScan::NotRun(r) => {
                    let _ = writeln!(s, "  scan not run: {r}");
                }
                OracleScan::NoCounterexampleUpTo(n) => {
                    let _ = writeln!(s, "  no essentially different factorization of f^n for n <= {n}");
                }
                OracleScan::DisprovenAt(n, w) => {
                    let _ = writeln!(s, "  second factorization of f^{n} found:");
                    write_witness(&mut s, w);
                }
            }
        }
        if self.warnings.is_empty() {
            let _ = writeln!(s, "warnings: none");
        } else {
            let _ = writeln!(s, "warnings:");
            for w in &self.warnings {
                let _ = writeln!(s, "  - {w}");
            }
        }
        s
    }
}

fn write_witness(s: &mut String, w: &FactorizationWitness) {
    let _ = writeln!(s, "  f^{} = product of:", w.power);
    for part in &w.parts {
        let _ = writeln!(s, "    {}", part.to_expression());
    }
    let _ = writeln!(s, "  {}", w.note);
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_factorization(map: &BTreeMap<Prime, u32>, value: &str) -> String {
    if map.is_empty() || (map.len() == 1 && map.values().all(|e| *e == 1)) {
        return value.to_string();
    }
    let parts: Vec<String> = map
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    format!("{value} = {}", parts.join(" * "))
}

fn render_graph(g: &LabeledGraph) -> String {
    let edges: Vec<String> = g
        .edges()
        .iter()
        .map(|((i, j), ps)| {
            let label: Vec<String> = ps.iter().map(Prime::to_string).collect();
            format!("{}-{} {{{}}}", i + 1, j + 1, label.join(","))
        })
        .collect();
    let comps: Vec<String> = g
        .connected_components()
        .unwrap_or_default()
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let edges = if edges.is_empty() { "none".to_string() } else { edges.join(", ") };
    let status = if comps.len() == 1 { "connected".to_string() } else { format!("components {}", comps.join(" ")) };
    format!("edges {edges}; {status}")
}

/// The essential or quintessential graph of a member input.
pub fn graph_command(source: &str, kind: GraphKind, format: GraphFormat) -> Result<String> {
    let (form, _, _) = prepare(source)?;
    let ctx = CriteriaContext::new(&form)?;
    let g = match kind {
        GraphKind::Essential => &ctx.essential,
        GraphKind::Quintessential => &ctx.quintessential,
    };
    Ok(match format {
        GraphFormat::Dot => {
            let names: Vec<String> = form.factors().iter().map(|g| g.to_string()).collect();
            g.to_dot(kind.as_str(), &names)
        }
        GraphFormat::Json => {
            let mut v = graph_json(kind, g);
            if let Value::Object(map) = &mut v {
                map.insert("factors".into(), json!(form.factors().iter().map(|g| g.to_string()).collect::<Vec<_>>()));
            }
            let mut s = serde_json::to_string_pretty(&json!({ "schema": SCHEMA_VERSION, "graph": v })).expect("serializable");
            s.push('\n');
            s
        }
    })
}

pub fn member_command(source: &str, as_json: bool) -> Result<String> {
    let (form, _, _) = prepare(source)?;
    let m = form.is_member();
    if as_json {
        let mut s = serde_json::to_string_pretty(&json!({
            "schema": SCHEMA_VERSION,
            "standard_form": form_json(&form),
            "membership": membership_json(&m),
        }))
        .expect("serializable");
        s.push('\n');
        return Ok(s);
    }
    let mut s = String::new();
    let _ = writeln!(s, "standard form:    {}", form.to_expression());
    let _ = writeln!(s, "member of Int(Z): {}", yes_no(m.is_member));
    let _ = writeln!(s, "image-primitive:  {}", yes_no(m.is_image_primitive));
    if let Some(fd) = &m.fd_of_f {
        let _ = writeln!(s, "fd(f):            {fd}");
    }
    Ok(s)
}

pub fn fd_command(source: &str, as_json: bool) -> Result<String> {
    let g = crate::parse::parse_poly(source.trim().trim_start_matches('(').trim_end_matches(')'))?;
    let fd = crate::standard_form::fixed_divisor(&g)?;
    let fac = crate::prime::factor_integer(&fd)?;
    if as_json {
        let mut s = serde_json::to_string_pretty(&json!({
            "schema": SCHEMA_VERSION,
            "polynomial": g.to_string(),
            "fixed_divisor": fd.to_string(),
            "factors": prime_exponents(&fac),
        }))
        .expect("serializable");
        s.push('\n');
        return Ok(s);
    }
    Ok(format!("fd({g}) = {}\n", render_factorization(&fac, &fd.to_string())))
}

pub fn oracle_command(source: &str, power: u32, guard: u64, as_json: bool) -> Result<String> {
    let (form, _, _) = prepare(source)?;
    if form.is_constant() {
        return Err(Error::ConstantInput);
    }
    let oracle = Oracle::new(&form, guard)?;
    let facs = oracle.enumerate_factorizations(power)?;
    let trivial = oracle.power_shape(1);
    let rendered: Vec<Vec<String>> = facs
        .iter()
        .map(|f| {
            f.atoms
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    oracle
                        .shape_to_form(h, i == 0 && f.sign < 0)
                        .map(|sf| sf.to_expression())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let is_trivial = |f: &crate::oracle::Factorization| f.atoms.iter().all(|a| *a == trivial);
    if as_json {
        let mut s = serde_json::to_string_pretty(&json!({
            "schema": SCHEMA_VERSION,
            "standard_form": form_json(&form),
            "power": power,
            "is_atom": oracle.is_atom(&trivial),
            "factorizations": facs.iter().zip(&rendered).map(|(f, atoms)| json!({
                "trivial": is_trivial(f) && f.atoms.len() as u32 == power,
                "atoms": atoms,
            })).collect::<Vec<_>>(),
        }))
        .expect("serializable");
        s.push('\n');
        return Ok(s);
    }
    let mut s = String::new();
    let _ = writeln!(s, "f = {}", form.to_expression());
    let _ = writeln!(s, "f is an atom: {}", yes_no(oracle.is_atom(&trivial)));
    let _ = writeln!(s, "factorizations of f^{power} up to associates: {}", facs.len());
    for (f, atoms) in facs.iter().zip(&rendered) {
        let mark = if is_trivial(f) && f.atoms.len() as u32 == power { " (f^n)" } else { "" };
        let _ = writeln!(s, "  {}{mark}", atoms.iter().map(|a| format!("[{a}]")).collect::<Vec<_>>().join(" * "));
    }
    Ok(s)
}
