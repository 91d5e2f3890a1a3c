//! Acceptance suite: one line per criterion, nonzero exit status if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use pea_core::criteria::{Analyzer, Gk, GkReport, Value};
use pea_core::groebner::{buchberger, Ideal};
use pea_core::pea::{Pea, Rewrite};
use pea_core::poly::{rat, Monomial, MonomialOrder, Polynomial, Rational};
use pea_core::presentation::PoissonPresentation;
use pea_core::structure::{derel_failures, rank_data};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{corpus, gen, gwpa, sl2, weyl2, weyl2_loc_x};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn weyl_recovery() -> Outcome {
    let w = weyl2();
    let e = Pea::new(&w);
    let (x, y, dx, dy) = (e.x(0), e.x(1), e.d(0), e.d(1));
    let one = e.one();
    let cases = [
        ("[d_y, x] = 1", &dy, &x, one.clone()),
        ("[d_x, y] = -1", &dx, &y, one.neg()),
        ("[d_x, d_y] = 0", &dx, &dy, e.zero()),
        ("[d_x, x] = 0", &dx, &x, e.zero()),
        ("[d_y, y] = 0", &dy, &y, e.zero()),
    ];
    for (name, a, b, expect) in cases {
        let c = ok(e.commutator(a, b))?;
        ensure(ok(e.is_zero(&c.sub(&expect)))?, || format!("{name} fails: got {}", e.format(&c)))?;
    }
    ensure(e.format(&ok(e.mul(&dy, &x))?) == "x*d2 + 1", || "d_y*x does not normalize to x*d2 + 1".into())?;
    Ok("all five Weyl relations hold".into())
}

fn associativity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA550C);
    let mut total = 0;
    for (name, p) in [("weyl2", weyl2()), ("sl2", sl2()), ("gwpa_h1", gwpa("H", "1"))] {
        let eager = Pea::new(&p);
        let lazy = Pea::with_mode(&p, Rewrite::Lazy);
        for k in 0..200 {
            let u = gen::element(&mut rng, &eager, 2, 2, 3);
            let v = gen::element(&mut rng, &eager, 2, 2, 3);
            let w = gen::element(&mut rng, &eager, 2, 2, 3);
            let left = ok(eager.mul(&ok(eager.mul(&u, &v))?, &w))?;
            let right = ok(eager.mul(&u, &ok(eager.mul(&v, &w))?))?;
            ensure(ok(eager.equal(&left, &right))?, || format!("{name}: triple {k} is not associative"))?;
            let lv = ok(lazy.mul(&u, &v))?;
            ensure(ok(eager.equal(&ok(eager.mul(&u, &v))?, &lv))?, || format!("{name}: eager and lazy differ on pair {k}"))?;
            total += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}, budget 60 s"))?;
    Ok(format!("{total} triples, eager = lazy, {:.1} s", elapsed.as_secs_f64()))
}

fn centralizer() -> Outcome {
    let mut checked = 0;
    for (name, p) in corpus() {
        let e = Pea::new(&p);
        let n = p.nvars();
        for (s, f) in p.relations().iter().enumerate() {
            let df = e.delta_of(f);
            for j in 0..n {
                let c = ok(e.commutator(&df, &e.x(j)))?;
                ensure(ok(e.is_zero(&c))?, || format!("{name}: [d f_{s}, x_{j}] is nonzero"))?;
                let bracket = p.bracket_raw(f, &p.var(j));
                let mut expect = e.zero();
                for k in 0..n {
                    expect.add_term(Monomial::var(n, k), p.reduce(&bracket.derivative(k)));
                }
                let c = ok(e.commutator(&df, &e.d(j)))?;
                ensure(ok(e.equal(&c, &expect))?, || format!("{name}: [d f_{s}, d_{j}] differs from the gradient formula"))?;
                let act = ok(e.act_on(&df, &p.var(j)))?;
                ensure(act.is_zero(), || format!("{name}: d f_{s} acts nontrivially on x_{j}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} relation/variable pairs"))
}

fn gradient_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6AD);
    let corpus = corpus();
    for (name, p) in &corpus {
        let n = p.nvars();
        for _ in 0..100 {
            let f = gen::poly(&mut rng, n, 4, 5);
            let mut sum = p.zero();
            for j in 0..n {
                sum = sum + p.bracket_raw(&f.derivative(j), &p.var(j));
            }
            ensure(p.in_ideal(&sum), || format!("{name}: identity fails for {}", p.fmt(&f)))?;
        }
    }
    Ok(format!("100 polynomials on each of {} presentations", corpus.len()))
}

fn opposite_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0BB);
    let corpus = corpus();
    for (name, p) in &corpus {
        let e = Pea::new(p);
        for k in 0..100 {
            let u = gen::element(&mut rng, &e, 2, 2, 2);
            let v = gen::element(&mut rng, &e, 2, 2, 2);
            let lhs = ok(e.opposite_image(&ok(e.mul(&u, &v))?))?;
            let rhs = ok(e.mul(&ok(e.opposite_image(&v))?, &ok(e.opposite_image(&u))?))?;
            ensure(ok(e.equal(&lhs, &rhs))?, || format!("{name}: pair {k} violates the anti-involution law"))?;
            ensure(ok(e.equal(&ok(e.opposite_image(&ok(e.opposite_image(&u))?))?, &u))?, || format!("{name}: not an involution"))?;
        }
    }
    Ok(format!("100 pairs on each of {} presentations", corpus.len()))
}

fn gwpa_table() -> Outcome {
    for (a, expect) in [("H", true), ("H^2", false), ("H^2 - 1", true)] {
        let v = ok(Analyzer::new(&gwpa(a, "1")).and_then(|z| z.regular()))?;
        ensure(v.value == Value::from_bool(expect), || format!("regular(a = {a}) = {:?}", v.value))?;
    }
    for (b, expect) in [("1", true), ("2/3", true), ("H", false), ("0", false)] {
        let an = ok(Analyzer::new(&gwpa("H", b)))?;
        let v = ok(an.symplectic())?;
        ensure(v.value == Value::from_bool(expect), || format!("symplectic(b = {b}) = {:?}", v.value))?;
        ensure((an.rank().d == 2) == (b != "0"), || format!("d = {} for b = {b}", an.rank().d))?;
    }
    Ok("3 regularity, 4 symplecticity and 4 rank instances".into())
}

fn dual_paths() -> Outcome {
    let mut evaluated = 0;
    for (name, p) in corpus() {
        let paths = ok(Analyzer::new(&p).and_then(|a| a.symplectic_paths()))?;
        ensure(paths.minor_ideal_path == paths.radical_path, || format!("{name}: {paths:?}"))?;
        if paths.minor_ideal_path != Value::Unknown {
            evaluated += 1;
        }
    }
    ensure(evaluated >= 5, || format!("only {evaluated} presentations reached both paths"))?;
    Ok(format!("{evaluated} regular presentations, both paths agree"))
}

fn kernel_criterion() -> Outcome {
    let verdict = |p: &PoissonPresentation, which: &str| -> Result<Value, String> {
        Ok(ok(ok(Analyzer::new(p))?.check(which).unwrap())?.value)
    };
    let cases = [
        ("weyl2", weyl2(), "kernel_zero", Value::True),
        ("gwpa_h1", gwpa("H", "1"), "kernel_zero", Value::True),
        ("sl2", sl2(), "kernel_zero", Value::False),
        ("weyl2", weyl2(), "u_equals_d", Value::True),
        ("gwpa_h1", gwpa("H", "1"), "u_equals_d", Value::True),
        ("gwpa_h_bh", gwpa("H", "H"), "u_equals_d", Value::False),
    ];
    for (name, p, which, expect) in &cases {
        let v = verdict(p, which)?;
        ensure(v == *expect, || format!("{which}({name}) = {v:?}"))?;
    }
    Ok(format!("{} verdicts", cases.len()))
}

fn gk_formulas() -> Outcome {
    let known = |a, u, pd| GkReport { gk_a: Gk::Known(a), gk_u: Gk::Known(u), gk_pd: Gk::Known(pd) };
    for (name, p, expect) in [
        ("weyl2", weyl2(), known(2, 4, 4)),
        ("sl2", sl2(), known(3, 6, 5)),
        ("gwpa_h1", gwpa("H", "1"), known(2, 4, 4)),
    ] {
        let got = ok(Analyzer::new(&p))?.gk();
        ensure(got == expect, || format!("{name}: {got:?}"))?;
    }
    Ok("(2,4,4), (3,6,5), (2,4,4)".into())
}

fn commutativity() -> Outcome {
    let t = PoissonPresentation::trivial(&["x", "y", "z"]).unwrap();
    ensure(ok(ok(Analyzer::new(&t))?.pea_commutative())?.is_true(), || "trivial P_3 is not commutative".into())?;
    let mut nontrivial = 0;
    for (name, p) in corpus() {
        let v = ok(ok(Analyzer::new(&p))?.pea_commutative())?;
        let expect = Value::from_bool(p.bracket_trivial());
        ensure(v.value == expect, || format!("{name}: {:?}", v.value))?;
        if !p.bracket_trivial() {
            nontrivial += 1;
        }
    }
    Ok(format!("trivial P_3 commutative, {nontrivial} nontrivial examples are not"))
}

fn derel() -> Outcome {
    let mut total = 0;
    for (name, p) in [("gwpa_h1", gwpa("H", "1")), ("weyl2_loc_x", weyl2_loc_x())] {
        let rank = ok(rank_data(&p))?;
        ensure(rank.r == 1, || format!("{name}: r = {}", rank.r))?;
        let (checked, failures) = ok(derel_failures(&p, &rank))?;
        ensure(checked > 0 && failures.is_empty(), || format!("{name}: {} of {checked} fail", failures.len()))?;
        total += checked;
    }
    Ok(format!("{total} index quadruples"))
}

/// All monomials in `n` variables of degree at most `d`.
fn monomials(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(n)];
    let mut frontier = out.clone();
    for _ in 0..d {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.support().last().unwrap_or(0);
            for i in last..n {
                next.push(m * &Monomial::var(n, i));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Solves `p = Σ q_i g_i` with `deg q_i ≤ d` by exact Gaussian elimination.
fn brute_force_member(p: &Polynomial, gens: &[Polynomial], d: u32) -> bool {
    let n = p.nvars();
    let mut cols: Vec<Polynomial> = Vec::new();
    for g in gens {
        for m in monomials(n, d) {
            cols.push(g.mul_term(&m, &rat(1)));
        }
    }
    let mut rows: Vec<Monomial> = cols.iter().chain([p]).flat_map(|c| c.terms().map(|(m, _)| m.clone())).collect();
    rows.sort();
    rows.dedup();
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| cols.iter().chain([p]).map(|c| c.coefficient(r)).collect())
        .collect();
    let width = cols.len();
    let mut pivot_row = 0;
    for c in 0..width {
        let Some(k) = (pivot_row..mat.len()).find(|&k| !mat[k][c].is_zero()) else { continue };
        mat.swap(pivot_row, k);
        let pv = mat[pivot_row][c].clone();
        for v in mat[pivot_row].iter_mut() {
            *v = &*v / &pv;
        }
        for k in 0..mat.len() {
            if k != pivot_row && !mat[k][c].is_zero() {
                let f = mat[k][c].clone();
                let src = mat[pivot_row].clone();
                for (v, s) in mat[k].iter_mut().zip(&src) {
                    *v = &*v - &(&f * s);
                }
            }
        }
        pivot_row += 1;
    }
    mat[pivot_row..].iter().all(|row| row[width].is_zero())
}

fn groebner_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6B);
    let (mut members, mut others) = (0, 0);
    for k in 0..20 {
        let n = rng.gen_range(1..=3);
        let gens: Vec<Polynomial> = (0..rng.gen_range(1..=3)).map(|_| gen::poly(&mut rng, n, 3, 3)).collect();
        let gb = ok(buchberger(&Ideal::new(n, gens.clone()), &MonomialOrder::DegRevLex, true))?;
        let mut candidates: Vec<Polynomial> = (0..3).map(|_| gen::poly(&mut rng, n, 3, 3)).collect();
        let mut combo = Polynomial::zero(n);
        for g in &gens {
            combo = combo + &gen::poly(&mut rng, n, 1, 2) * g;
        }
        candidates.push(combo);
        for c in &candidates {
            let (_, witness) = ok(gb.normal_form(c))?;
            let bound = witness.combination.iter().filter_map(Polynomial::total_degree).max().unwrap_or(0);
            let found = brute_force_member(c, &gens, 3) || (witness.member && brute_force_member(c, &gens, bound));
            ensure(found == witness.member, || format!("ideal {k}: disagreement on a candidate"))?;
            if witness.member {
                members += 1;
            } else {
                others += 1;
            }
        }
    }
    Ok(format!("20 ideals, {members} members and {others} non-members agree"))
}

fn localization() -> Outcome {
    let p = weyl2_loc_x();
    ensure(p.validate().ok, || "localized presentation fails validation".into())?;
    let v = ok(ok(Analyzer::new(&p))?.kernel_zero())?;
    ensure(v.is_true(), || format!("kernel_zero = {:?}: {}", v.value, v.reason))?;
    Ok("validate ok, kernel_zero true".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("weyl_recovery", weyl_recovery),
        ("pbw_associativity", associativity),
        ("centralizer_identities", centralizer),
        ("gradient_bracket_identity", gradient_identity),
        ("opposite_anti_involution", opposite_law),
        ("gwpa_table", gwpa_table),
        ("symplectic_dual_paths", dual_paths),
        ("kernel_criterion", kernel_criterion),
        ("gk_formulas", gk_formulas),
        ("commutativity_criterion", commutativity),
        ("derivation_relations", derel),
        ("groebner_oracle", groebner_oracle),
        ("localization_coherence", localization),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}) [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
