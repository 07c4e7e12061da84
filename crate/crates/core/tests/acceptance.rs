//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, even on success.
//!
//! Reference values are computed here by direct evaluation, independently of
//! the library's residue lifting and exponent-shape machinery.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ivp_atoms::criteria::{
    check_absolutely_irreducible, check_irreducible, Certificate, CriteriaContext, Rule, Status,
};
use ivp_atoms::irreducible::{verify_irreducible_best_effort, Irreducibility};
use ivp_atoms::oracle::{
    absolute_irreducibility_scan, is_atom_bruteforce, verify_lemma_exponents, Oracle, ScanResult,
    DEFAULT_GUARD,
};
use ivp_atoms::{fixed_divisor, fixed_divisor_p, Int, IntPoly, Kind, Prime, StandardForm};

// ---------------------------------------------------------------------------
// Independent reference computations
// ---------------------------------------------------------------------------

fn eval(c: &[i64], w: i64) -> Int {
    let w = Int::from(w);
    c.iter().rev().fold(Int::zero(), |acc, a| acc * &w + Int::from(*a))
}

fn vp(n: &Int, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = Int::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while n.is_multiple_of(&p) {
        n /= &p;
        k += 1;
    }
    Some(k)
}

fn ref_fd(c: &[i64]) -> Int {
    (0..c.len() as i64).fold(Int::zero(), |g, w| g.gcd(&eval(c, w)))
}

fn ref_fd_big(c: &[Int]) -> Int {
    let eval = |w: i64| {
        let w = Int::from(w);
        c.iter().rev().fold(Int::zero(), |acc, a| acc * &w + a)
    };
    (0..c.len() as i64).fold(Int::zero(), |g, w| g.gcd(&eval(w)))
}

fn mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn big(c: &[i64]) -> Vec<Int> {
    c.iter().map(|&v| Int::from(v)).collect()
}

/// Kind of `gs[i]` for `p` by scanning w over [0, p^(e+2)).
fn ref_kind(gs: &[Vec<i64>], p: u64, i: usize) -> Kind {
    let e = {
        let prod = gs.iter().fold(vec![Int::one()], |acc, g| mul(&acc, &big(g)));
        vp(&ref_fd_big(&prod), p).unwrap()
    };
    let mut kind = Kind::NotEssential;
    for w in 0..p.pow(e + 2) as i64 {
        let vi = vp(&eval(&gs[i], w), p);
        if vi == Some(0) {
            continue;
        }
        let others_coprime = (0..gs.len())
            .filter(|&j| j != i)
            .all(|j| vp(&eval(&gs[j], w), p) == Some(0));
        if !others_coprime {
            continue;
        }
        if vi == Some(e) {
            return Kind::Quintessential;
        }
        kind = Kind::Essential;
    }
    kind
}

fn poly(c: &[i64]) -> IntPoly {
    IntPoly::from_i64s(c)
}

fn form(factors: &[&[i64]], b: i64) -> StandardForm {
    StandardForm::normalize(&Int::one(), factors.iter().map(|c| poly(c)).collect(), &Int::from(b)).unwrap()
}

const G: [&[i64]; 4] = [&[-19, 0, 0, 1], &[9, 0, 1], &[1, 0, 1], &[-5, 1]];

fn quartet_f() -> StandardForm {
    form(&G, 15)
}

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn edge_set(g: &ivp_atoms::LabeledGraph) -> BTreeSet<(usize, usize)> {
    g.edges().keys().map(|&(i, j)| (i + 1, j + 1)).collect()
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

fn criterion_1() -> Result<(), String> {
    let gs: Vec<Vec<i64>> = G.iter().map(|c| c.to_vec()).collect();
    let product = gs.iter().fold(vec![Int::one()], |acc, g| mul(&acc, &big(g)));
    let fd_ref = ref_fd_big(&product);
    let g: IntPoly = G.iter().map(|c| poly(c)).product();
    check(fixed_divisor(&g).unwrap() == Int::from(15) && fd_ref == Int::from(15), "fd(g) = 15")?;

    let sf = form(&G, 1);
    let ctx = CriteriaContext::new(&sf).map_err(|e| e.to_string())?;
    let expected: [(u64, [Kind; 4]); 2] = [
        (5, [Kind::NotEssential, Kind::Quintessential, Kind::Quintessential, Kind::Quintessential]),
        (3, [Kind::Essential, Kind::Essential, Kind::NotEssential, Kind::Quintessential]),
    ];
    for (p, kinds) in expected {
        for (i, k) in kinds.iter().enumerate() {
            let got = ctx.grid.kind(i, prime(p));
            check(got == *k, &format!("g{} for {p}: got {got:?}, want {k:?}", i + 1))?;
            check(ref_kind(&gs, p, i) == *k, &format!("reference kind of g{} for {p}", i + 1))?;
            if let Some(c) = ctx.grid.get(i, prime(p)) {
                check(c.verify(sf.factors()), "witness verifies")?;
            }
        }
    }
    let ess: BTreeSet<_> = [(1, 2), (1, 4), (2, 4), (2, 3), (3, 4)].into();
    let quint: BTreeSet<_> = [(2, 3), (2, 4), (3, 4)].into();
    check(edge_set(&ctx.essential) == ess, "essential edge set")?;
    check(edge_set(&ctx.quintessential) == quint, "quintessential edge set")?;
    let comps = ctx.quintessential.connected_components().unwrap();
    check(comps.contains(&vec![0]), "vertex 1 isolated in the quintessential graph")
}

fn criterion_2() -> Result<(), String> {
    let f = quartet_f();
    let irr = check_irreducible(&f).map_err(|e| e.to_string())?;
    check(irr.status == Status::Proven && irr.rule == Rule::EssentialGraphConnected, "irreducible via essential graph")?;
    irr.recheck(&f).map_err(|e| e.to_string())?;
    let abs = check_absolutely_irreducible(&f).map_err(|e| e.to_string())?;
    check(abs.status == Status::Disproven && abs.rule == Rule::SquarefreeDisconnected, "absolute: disproven")?;
    abs.recheck(&f).map_err(|e| e.to_string())?;
    let Certificate::Splitting(w) = &abs.certificate else {
        return Err("no splitting certificate".into());
    };
    check(w.power == 3, "witness at power 3")?;

    // parts multiply to f^3 coefficientwise, by independent arithmetic
    let mut num = vec![Int::one()];
    let mut den = Int::one();
    for part in &w.parts {
        num = mul(&num, &[part.constant().clone()]);
        for g in part.factors() {
            num = mul(&num, g.coeffs());
        }
        den *= part.denominator();
        // each part is an Int(Z) member: fd of its numerator is a multiple of its denominator
        let pn = part
            .factors()
            .iter()
            .fold(vec![Int::one()], |acc, g| mul(&acc, g.coeffs()));
        check(ref_fd_big(&pn).is_multiple_of(&part.denominator()), "part is integer-valued")?;
    }
    let g3 = (0..3).fold(vec![Int::one()], |acc, _| {
        G.iter().fold(acc, |a, c| mul(&a, &big(c)))
    });
    let lhs: Vec<Int> = num.iter().map(|c| c * Int::from(15i64.pow(3))).collect();
    let rhs: Vec<Int> = g3.iter().map(|c| c * &den).collect();
    check(lhs == rhs, "parts multiply to f^3")
}

fn binomial(p: i64) -> StandardForm {
    let factors: Vec<IntPoly> = (0..p).map(|k| poly(&[-k, 1])).collect();
    let fact: i64 = (1..=p).product();
    StandardForm::normalize(&Int::one(), factors, &Int::from(fact)).unwrap()
}

fn criterion_3() -> Result<(), String> {
    for p in [2, 3, 5] {
        let f = binomial(p);
        let v = check_absolutely_irreducible(&f).map_err(|e| e.to_string())?;
        check(
            v.status == Status::Proven && v.rule == Rule::QuintessentialGraphConnected,
            &format!("binomial {p}: proven via quintessential graph"),
        )?;
        v.recheck(&f).map_err(|e| e.to_string())?;
    }
    for p in [2, 3] {
        let scan = absolute_irreducibility_scan(&binomial(p), 3).map_err(|e| e.to_string())?;
        check(scan == ScanResult::NoCounterexampleUpTo(3), &format!("binomial {p}: oracle scan"))?;
    }
    Ok(())
}

fn criterion_4() -> Result<(), String> {
    let f = form(&[&[0, 1], &[0, 1], &[3, 0, 1]], 4);
    let ctx = CriteriaContext::new(&f).map_err(|e| e.to_string())?;
    check(!ctx.quintessential.is_connected(), "quintessential graph disconnected")?;
    let v = ctx.check_absolutely_irreducible().map_err(|e| e.to_string())?;
    check(v.status == Status::Unknown, &format!("verdict is Unknown, got {:?}", v.status))?;
    let scan = absolute_irreducibility_scan(&f, 3).map_err(|e| e.to_string())?;
    check(scan == ScanResult::NoCounterexampleUpTo(3), "oracle finds no counterexample")
}

/// A random non-constant primitive polynomial with positive leading coefficient.
fn random_factor(rng: &mut ChaCha8Rng, max_deg: usize, bound: i64) -> Vec<i64> {
    loop {
        let deg = rng.random_range(1..=max_deg);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-bound..=bound)).collect();
        if c[deg] == 0 {
            continue;
        }
        if c[deg] < 0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        let content = c.iter().fold(0i64, |g, v| g.gcd(v));
        if content == 1 {
            return c;
        }
    }
}

fn random_member(rng: &mut ChaCha8Rng) -> StandardForm {
    loop {
        let k = rng.random_range(1..=3);
        let mut factors = Vec::new();
        for _ in 0..k {
            // linear factors x - c make non-trivial fixed divisors likely
            let c = if rng.random_bool(0.5) {
                vec![-rng.random_range(0..=4), 1]
            } else {
                random_factor(rng, 3, 6)
            };
            factors.push(c);
        }
        let polys: Vec<IntPoly> = factors.iter().map(|c| poly(c)).collect();
        if polys
            .iter()
            .any(|g| verify_irreducible_best_effort(g).ok() != Some(Irreducibility::Proven))
        {
            continue;
        }
        let product = factors.iter().fold(vec![Int::one()], |acc, g| mul(&acc, &big(g)));
        let fd = ref_fd_big(&product);
        if fd.is_one() {
            continue;
        }
        return StandardForm::normalize(&Int::one(), polys, &fd).unwrap();
    }
}

fn criterion_5() -> Result<(), String> {
    let f = quartet_f();
    for n in 1..=3 {
        let v = verify_lemma_exponents(&f, n).map_err(|e| e.to_string())?;
        check(v.is_empty(), &format!("example, n = {n}: {v:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d_a70b5);
    for _ in 0..25 {
        let f = random_member(&mut rng);
        let m = f.is_member();
        check(m.is_member && m.is_image_primitive, "generated member is image-primitive")?;
        for n in 1..=2 {
            let v = verify_lemma_exponents(&f, n).map_err(|e| e.to_string())?;
            check(v.is_empty(), &format!("{f}, n = {n}: {v:?}"))?;
        }
    }
    Ok(())
}

fn criterion_6() -> Result<(), String> {
    let pool: [&[i64]; 6] = [&[0, 1], &[-1, 1], &[-2, 1], &[1, 1], &[1, 0, 1], &[1, 1, 1]];
    let mut multisets: Vec<Vec<usize>> = Vec::new();
    for a in 0..6 {
        multisets.push(vec![a]);
        for b in a..6 {
            multisets.push(vec![a, b]);
            for c in b..6 {
                multisets.push(vec![a, b, c]);
            }
        }
    }
    let (mut compared, mut decided) = (0, 0);
    for idx in &multisets {
        for b in [1, 2, 3, 6] {
            let factors: Vec<&[i64]> = idx.iter().map(|&i| pool[i]).collect();
            let f = form(&factors, b);
            let m = f.is_member();
            if !m.is_member {
                continue;
            }
            let irr = check_irreducible(&f).map_err(|e| e.to_string())?;
            let abs = check_absolutely_irreducible(&f).map_err(|e| e.to_string())?;
            irr.recheck(&f).map_err(|e| format!("{f}: {e}"))?;
            abs.recheck(&f).map_err(|e| format!("{f}: {e}"))?;
            if !m.is_image_primitive {
                // the oracle needs image-primitive input; a constant factor splits off
                check(irr.status == Status::Disproven, &format!("{f}: not image-primitive"))?;
                check(abs.status == Status::Disproven, &format!("{f}: not image-primitive"))?;
                continue;
            }
            compared += 1;
            let oracle = Oracle::new(&f, DEFAULT_GUARD).map_err(|e| e.to_string())?;
            let atom = is_atom_bruteforce(&oracle.power_shape(1), &f).map_err(|e| e.to_string())?;
            let abs_oracle = atom
                && absolute_irreducibility_scan(&f, 3).map_err(|e| e.to_string())?
                    == ScanResult::NoCounterexampleUpTo(3);
            match irr.status {
                Status::Proven => check(atom, &format!("{f}: proven irreducible but oracle splits it"))?,
                Status::Disproven => check(!atom, &format!("{f}: disproven but oracle says atom"))?,
                Status::Unknown => {}
            }
            match abs.status {
                Status::Proven => check(abs_oracle, &format!("{f}: proven absolutely irreducible, oracle disagrees"))?,
                Status::Disproven => check(!abs_oracle, &format!("{f}: disproven, oracle finds nothing up to 3"))?,
                Status::Unknown => {}
            }
            decided += (irr.status != Status::Unknown) as u32 + (abs.status != Status::Unknown) as u32;
        }
    }
    check(compared > 50 && decided > 50, &format!("family too small: {compared} inputs, {decided} verdicts"))?;
    println!("  criterion 6: {compared} image-primitive inputs, {decided} decided verdicts compared");
    Ok(())
}

fn criterion_7() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = random_factor(&mut rng, 4, 50);
        let b = random_factor(&mut rng, 4, 50);
        let (pa, pb) = (poly(&a), poly(&b));
        let fa = fixed_divisor(&pa).unwrap();
        let fb = fixed_divisor(&pb).unwrap();
        check(fa == ref_fd(&a) && fb == ref_fd(&b), "fd agrees with direct gcd")?;
        let prod = &pa * &pb;
        let fab = fixed_divisor(&prod).unwrap();
        check(fab.is_multiple_of(&(&fa * &fb)), &format!("fd({a:?}) fd({b:?}) | fd(product)"))?;

        // f = a*b/fd(a*b) is an image-primitive member
        let f = StandardForm::normalize(&Int::one(), vec![pa.clone(), pb.clone()], &fab).unwrap();
        check(f.is_member().is_image_primitive, "image-primitive by construction")?;
        for n in [2u32, 3] {
            let pow = prod.pow(n);
            for (&p, &e) in f.denom() {
                let got = fixed_divisor_p(&pow, p).unwrap();
                check(got == n * e, &format!("v_{p} fd((ab)^{n}) = {got}, want {}", n * e))?;
                let direct = vp(&ref_fd_big(pow.coeffs()), p.get()).unwrap();
                check(direct == n * e, "direct valuation of fd((ab)^n)")?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CLI contract
// ---------------------------------------------------------------------------

const QUARTET_G: &str = "(x^3-19)*(x^2+9)*(x^2+1)*(x-5)";
const QUARTET_F: &str = "(x^3-19)*(x^2+9)*(x^2+1)*(x-5)/15";

fn run_cli(args: &[&str], env: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ivp-atoms"));
    cmd.args(args).env_remove("IVP_ATOMS_GUARD");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

fn golden_cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("quartet_g_essential.dot", vec!["graph", QUARTET_G, "--kind", "essential", "--format", "dot"]),
        ("quartet_g_quintessential.dot", vec!["graph", QUARTET_G, "--kind", "quintessential", "--format", "dot"]),
        ("quartet_g_quintessential.json", vec!["graph", QUARTET_G, "--kind", "quintessential", "--format", "json"]),
        ("quartet_g_analyze.txt", vec!["analyze", QUARTET_G]),
        ("quartet_f_analyze.txt", vec!["analyze", QUARTET_F]),
        ("quartet_f_analyze.json", vec!["analyze", QUARTET_F, "--json"]),
        ("quartet_f_essential.dot", vec!["graph", QUARTET_F, "--kind", "essential", "--format", "dot"]),
    ]
}

type ExitCase = (&'static [&'static str], &'static [(&'static str, &'static str)], i32);

fn criterion_8() -> Result<(), String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in golden_cases() {
        let (code, first) = run_cli(&args, &[]);
        check(code == 0, &format!("{name}: exit code {code}"))?;
        let (_, second) = run_cli(&args, &[]);
        check(first == second, &format!("{name}: output differs between runs"))?;
        let path = dir.join(name);
        if update {
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            std::fs::write(&path, &first).map_err(|e| e.to_string())?;
        }
        let expected = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
        check(expected == first, &format!("{name}: output does not match golden file"))?;
    }
    let guard_matrix: [ExitCase; 10] = [
        (&["analyze", QUARTET_F], &[], 0),
        (&["analyze", "(x^2+1)/2"], &[], 0),
        (&["analyze", "(x^4+1)*(x)/2", "--quiet"], &[], 0),
        (&["analyze", "(x"], &[], 2),
        (&["analyze", "(x+y)"], &[], 2),
        (&["member", "(x)/0"], &[], 2),
        (&["graph", "(x^2+1)/2"], &[], 2),
        (&["oracle", QUARTET_F, "--power", "9"], &[], 3),
        (&["oracle", QUARTET_F, "--power", "3"], &[("IVP_ATOMS_GUARD", "10")], 3),
        (&["analyze", QUARTET_F], &[("IVP_ATOMS_GUARD", "lots")], 2),
    ];
    for (args, env, want) in guard_matrix {
        let (code, _) = run_cli(args, env);
        check(code == want, &format!("{args:?}: exit {code}, want {want}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn check(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

type Criterion = (u32, &'static str, fn() -> Result<(), String>, Duration);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "graph example reproduction", criterion_1, Duration::from_secs(1)),
        (2, "irreducible but not absolutely irreducible", criterion_2, Duration::from_secs(1)),
        (3, "binomial family", criterion_3, Duration::from_secs(10)),
        (4, "converse failure guard", criterion_4, Duration::from_secs(30)),
        (5, "divisor exponent property suite", criterion_5, Duration::from_secs(60)),
        (6, "oracle/criteria equivalence", criterion_6, Duration::from_secs(300)),
        (7, "fixed-divisor properties", criterion_7, Duration::from_secs(60)),
        (8, "CLI contract", criterion_8, Duration::from_secs(120)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (id, name, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|_| {
            check(elapsed <= limit, &format!("took {elapsed:.2?}, limit {limit:?}"))
        });
        match result {
            Ok(()) => println!("criterion {id} ({name}): PASS [{elapsed:.2?}]"),
            Err(e) => {
                failures += 1;
                println!("criterion {id} ({name}): FAIL [{elapsed:.2?}] {e}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
