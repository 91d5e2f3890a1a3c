#![allow(dead_code)]

use std::path::PathBuf;

use pea_core::parse::parse_polynomial;
use pea_core::poly::rat;
use pea_core::presentation::{Flags, PoissonPresentation};

pub fn sl2() -> PoissonPresentation {
    let mut c = vec![vec![vec![rat(0); 3]; 3]; 3];
    c[0][1][0] = rat(-2);
    c[1][0][0] = rat(2);
    c[0][2][1] = rat(1);
    c[2][0][1] = rat(-1);
    c[1][2][2] = rat(-2);
    c[2][1][2] = rat(2);
    PoissonPresentation::lie_poisson(&["e", "h", "f"], &c).unwrap()
}

pub fn gwpa(a: &str, b: &str) -> PoissonPresentation {
    let h = vec!["H".to_string()];
    let a = parse_polynomial(a, &h).unwrap();
    let b = parse_polynomial(b, &h).unwrap();
    PoissonPresentation::gwpa(&[a], &[b]).unwrap()
}

pub fn weyl2() -> PoissonPresentation {
    PoissonPresentation::weyl(1).unwrap()
}

pub fn weyl2_loc_x() -> PoissonPresentation {
    let w = weyl2();
    w.localize(&w.var(0)).unwrap()
}

/// The bundled presentation files, keyed by file stem.
pub fn corpus() -> Vec<(&'static str, PoissonPresentation)> {
    let h2 = gwpa("H^2", "1");
    let h2_cm = h2.with_flags(Flags { cohen_macaulay: true, ..h2.flags().clone() });
    vec![
        ("weyl2", weyl2()),
        ("weyl4", PoissonPresentation::weyl(2).unwrap()),
        ("sl2", sl2()),
        ("gwpa_h1", gwpa("H", "1")),
        ("gwpa_h_b23", gwpa("H", "2/3")),
        ("gwpa_h_bh", gwpa("H", "H")),
        ("gwpa_h_b0", gwpa("H", "0")),
        ("gwpa_h2", h2),
        ("gwpa_h2_cm", h2_cm),
        ("gwpa_h2m1", gwpa("H^2 - 1", "1")),
        ("trivial3", PoissonPresentation::trivial(&["x", "y", "z"]).unwrap()),
        ("weyl2_loc_x", weyl2_loc_x()),
    ]
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presentations")
}

pub mod gen {
    use pea_core::pea::{Pea, PeaElement};
    use pea_core::poly::{rat, Monomial, Polynomial};
    use rand::Rng;

    pub fn monomial(rng: &mut impl Rng, nvars: usize, max_deg: u32) -> Monomial {
        let mut exps = vec![0u32; nvars];
        if nvars > 0 {
            for _ in 0..rng.gen_range(0..=max_deg) {
                exps[rng.gen_range(0..nvars)] += 1;
            }
        }
        Monomial::from_exps(exps)
    }

    pub fn poly(rng: &mut impl Rng, nvars: usize, max_deg: u32, max_terms: usize) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for _ in 0..rng.gen_range(1..=max_terms) {
            let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            p.add_term(monomial(rng, nvars, max_deg), rat(c));
        }
        p
    }

    /// Sum of up to `max_terms` terms `c(x)·δ^α` with `|α| ≤ max_delta` and `deg c ≤ max_coeff`.
    pub fn element(rng: &mut impl Rng, e: &Pea, max_delta: u32, max_coeff: u32, max_terms: usize) -> PeaElement {
        let n = e.nvars();
        let mut u = e.zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let alpha = monomial(rng, n, max_delta);
            u.add_term(alpha, poly(rng, n, max_coeff, 2));
        }
        e.normalize(&u)
    }
}
