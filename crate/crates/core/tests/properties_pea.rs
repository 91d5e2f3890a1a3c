mod common;

use std::sync::OnceLock;

use pea_core::criteria::{analyze, Analyzer, Gk, Value};
use pea_core::pea::Pea;
use pea_core::poly::{rat, Polynomial};
use pea_core::presentation::PoissonPresentation;
use pea_core::structure::OmegaElement;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::gen;

fn engines() -> &'static [(&'static str, Pea)] {
    static ENGINES: OnceLock<Vec<(&'static str, Pea)>> = OnceLock::new();
    ENGINES.get_or_init(|| common::corpus().into_iter().map(|(name, p)| (name, Pea::new(&p))).collect())
}

fn pick() -> impl Strategy<Value = (usize, u64)> {
    (0..engines().len(), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn free_case_zero_is_syntactic((k, seed) in pick()) {
        let e = &engines()[k].1;
        prop_assume!(e.presentation().relations().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = gen::element(&mut rng, e, 3, 2, 3);
        prop_assert_eq!(e.is_zero(&u).unwrap(), u.is_empty());
        prop_assert!(e.is_zero(&u.sub(&u)).unwrap());
    }

    #[test]
    fn action_is_a_homomorphism((k, seed) in pick()) {
        let e = &engines()[k].1;
        let p = e.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = gen::element(&mut rng, e, 2, 2, 2);
        let v = gen::element(&mut rng, e, 2, 2, 2);
        let f = gen::poly(&mut rng, p.nvars(), 3, 3);
        let lhs = e.act_on(&e.mul(&u, &v).unwrap(), &f).unwrap();
        let rhs = e.act_on(&u, &e.act_on(&v, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn printed_elements_reparse((k, seed) in pick()) {
        let e = &engines()[k].1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = gen::element(&mut rng, e, 2, 2, 3);
        let back = e.parse(&e.format(&u)).unwrap();
        prop_assert!(e.equal(&u, &back).unwrap());
    }

    #[test]
    fn delta_is_a_derivation((k, seed) in pick()) {
        let e = &engines()[k].1;
        let p = e.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (gen::poly(&mut rng, p.nvars(), 2, 3), gen::poly(&mut rng, p.nvars(), 2, 3));
        let lhs = e.delta_of(&(&a * &b));
        let rhs = e.delta_of(&b).left_mul_poly(&a).add(&e.delta_of(&a).left_mul_poly(&b));
        prop_assert!(e.equal(&lhs, &e.normalize(&rhs)).unwrap());
        let comm = e.commutator(&e.delta_of(&a), &e.coeff(&b)).unwrap();
        prop_assert!(e.equal(&comm, &e.coeff(&p.bracket(&a, &b))).unwrap());
    }

    #[test]
    fn omega_bracket_matches_closed_formula((k, seed) in pick()) {
        let e = &engines()[k].1;
        let p = e.presentation();
        let n = p.nvars();
        prop_assume!(n > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a1, b1) = (gen::poly(&mut rng, n, 2, 2), gen::poly(&mut rng, n, 2, 2));
        let (i, j) = (seed as usize % n, (seed >> 8) as usize % n);
        let w1 = OmegaElement::dx(n, i).scale(&a1);
        let w2 = OmegaElement::dx(n, j).scale(&b1);
        let (omega, zero) = e.omega_bracket(&w1, &w2).unwrap();
        prop_assert!(p.in_ideal(&zero));
        let expect = OmegaElement::dx(n, j)
            .scale(&(&a1 * &p.bracket_raw(&p.var(i), &b1)))
            .sub(&OmegaElement::dx(n, i).scale(&(&b1 * &p.bracket_raw(&p.var(j), &a1))))
            .add(&OmegaElement::differential(p.c(i, j)).scale(&(&a1 * &b1)));
        prop_assert!(e.omega_is_zero(&omega.sub(&expect)).unwrap());
    }

    #[test]
    fn graded_bracket_is_lie((k, seed) in pick()) {
        let e = &engines()[k].1;
        let n = e.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<_> = (0..3).map(|_| e.graded(&gen::poly(&mut rng, 2 * n, 2, 2)).unwrap()).collect();
        let b = |x: &_, y: &_| e.gr_bracket(x, y).unwrap();
        let neg = e.graded(&-b(&g[1], &g[0]).poly()).unwrap();
        prop_assert_eq!(b(&g[0], &g[1]), neg);
        let s = b(&g[0], &b(&g[1], &g[2])).poly() + b(&g[1], &b(&g[2], &g[0])).poly();
        let s = &s + b(&g[2], &b(&g[0], &g[1])).poly();
        prop_assert!(e.graded(&s).unwrap().is_zero());
    }

    #[test]
    fn translation_lifts_to_a_homomorphism(seed in any::<u64>(), c in -3i64..=3) {
        let e = &engines()[0].1;
        let p = e.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = vec![&p.var(0) + &p.constant(rat(c)), p.var(1)];
        let u = gen::element(&mut rng, e, 2, 2, 2);
        let v = gen::element(&mut rng, e, 2, 2, 2);
        let lhs = e.lift_endomorphism(&sigma, &e.mul(&u, &v).unwrap()).unwrap();
        let rhs = e.mul(&e.lift_endomorphism(&sigma, &u).unwrap(), &e.lift_endomorphism(&sigma, &v).unwrap()).unwrap();
        prop_assert!(e.equal(&lhs, &rhs).unwrap());
    }
}

#[test]
fn graded_generators_follow_the_bracket() {
    for (name, e) in engines() {
        let p = e.presentation();
        let n = e.nvars();
        let var = |k| e.graded(&Polynomial::var(2 * n, k)).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(e.gr_bracket(&var(i), &var(j)).unwrap().is_zero(), "{name}");
                let got = e.gr_bracket(&var(n + i), &var(j)).unwrap();
                assert_eq!(got, e.graded(&p.c(i, j).extend(n)).unwrap(), "{name}");
            }
        }
    }
}

#[test]
fn commutativity_detection() {
    for (name, e) in engines() {
        let p = e.presentation();
        let n = e.nvars();
        let table_zero = (0..n).all(|i| (0..n).all(|j| p.in_ideal(p.c(i, j))));
        let mut gens: Vec<_> = (0..n).map(|i| e.x(i)).collect();
        gens.extend((0..n).map(|i| e.d(i)));
        let commute = gens.iter().all(|a| gens.iter().all(|b| e.is_zero(&e.commutator(a, b).unwrap()).unwrap()));
        assert_eq!(commute, table_zero, "{name}");
    }
}

#[test]
fn criteria_are_consistent() {
    for (name, p) in common::corpus() {
        let a = Analyzer::new(&p).unwrap();
        let v = a.verdicts().unwrap();
        if v.symplectic.is_true() {
            assert_eq!(a.rank().d, a.rank().n - a.rank().r, "{name}");
        }
        if v.u_equals_d.is_true() {
            assert!(v.kernel_zero.is_true(), "{name}");
        }
        if v.kernel_zero.is_true() {
            let gk = a.gk();
            assert!(matches!((gk.gk_u, gk.gk_pd), (Gk::Known(x), Gk::Known(y)) if x == y), "{name}");
        }
        for verdict in [&v.regular, &v.symplectic, &v.u_domain, &v.kernel_zero, &v.u_equals_d] {
            if verdict.value == Value::Unknown {
                assert!(!verdict.reason.is_empty(), "{name}");
            }
        }
        let paths = a.symplectic_paths().unwrap();
        assert_eq!(paths.minor_ideal_path, paths.radical_path, "{name}");
        assert_eq!(analyze(&p).unwrap().to_json(), a.report().unwrap().to_json(), "{name}");
    }
}

#[test]
fn rejected_endomorphisms_name_the_pair() {
    let w: PoissonPresentation = common::weyl2();
    let e = Pea::new(&w);
    let sq = vec![w.parse("x^2").unwrap(), w.var(1)];
    let err = e.lift_endomorphism(&sq, &e.d(0)).unwrap_err().to_string();
    assert!(err.contains("{x, y}"), "{err}");
    let g = common::gwpa("H", "1");
    let e = Pea::new(&g);
    let bad = vec![g.var(0), g.var(2), g.var(1)];
    let err = e.lift_endomorphism(&bad, &e.d(0)).unwrap_err().to_string();
    assert!(err.contains("not a Poisson endomorphism"), "{err}");
}
