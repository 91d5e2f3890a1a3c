//! The Poisson enveloping algebra `U(A)` in normal-ordered form `Σ c_α(x)·δ_1^{α_1}···δ_n^{α_n}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::groebner::{buchberger, GroebnerBasis, Ideal};
use crate::parse::{parse_expr, Evaluator};
use crate::poly::{write_term, Monomial, MonomialOrder, Polynomial, Rational};
use crate::presentation::PoissonPresentation;
use crate::structure::OmegaElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeaElement {
    nvars: usize,
    terms: BTreeMap<Monomial, Polynomial>,
}

impl PeaElement {
    pub fn zero(nvars: usize) -> Self {
        PeaElement { nvars, terms: BTreeMap::new() }
    }

    pub fn from_poly(c: Polynomial) -> Self {
        let mut out = PeaElement::zero(c.nvars());
        out.add_term(Monomial::one(c.nvars()), c);
        out
    }

    /// The generator `δ_i` (0-based).
    pub fn delta(nvars: usize, i: usize) -> Self {
        let mut out = PeaElement::zero(nvars);
        out.add_term(Monomial::var(nvars, i), Polynomial::one(nvars));
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &Monomial) -> Polynomial {
        self.terms.get(alpha).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Top total δ-degree; `None` for the zero element.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The part of δ-degree exactly `t`.
    pub fn homogeneous(&self, t: u32) -> PeaElement {
        let terms = self.terms.iter().filter(|(a, _)| a.degree() == t).map(|(a, c)| (a.clone(), c.clone())).collect();
        PeaElement { nvars: self.nvars, terms }
    }

    pub fn add_term(&mut self, alpha: Monomial, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(q))
    }

    /// Left multiplication by a coefficient, `c·u`.
    pub fn left_mul_poly(&self, c: &Polynomial) -> Self {
        self.map_coeffs(|v| c * v)
    }

    fn map_coeffs(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        let mut out = PeaElement::zero(self.nvars);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    /// Commutative image in `K[x, δ]`, variables ordered `x_1..x_n, δ_1..δ_n`.
    pub fn to_commutative(&self) -> Polynomial {
        let n = self.nvars;
        let mut out = Polynomial::zero(2 * n);
        for (alpha, c) in &self.terms {
            for (m, q) in c.terms() {
                let exps = m.exps().iter().chain(alpha.exps()).copied().collect();
                out.add_term(Monomial::from_exps(exps), q.clone());
            }
        }
        out
    }

    /// Reads a commutative polynomial in `x, δ` as the normal-ordered element with the same terms.
    pub fn from_commutative(g: &Polynomial) -> Self {
        let n = g.nvars() / 2;
        let mut out = PeaElement::zero(n);
        for (m, q) in g.terms() {
            let (x, d) = m.exps().split_at(n);
            let c = Polynomial::monomial(Monomial::from_exps(x.to_vec()), q.clone());
            out.add_term(Monomial::from_exps(d.to_vec()), c);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rewrite {
    #[default]
    Eager,
    Lazy,
}

/// An element of `gr U(A) ≅ Sym_A(Ω_A)`, as a polynomial in `x, δ` reduced modulo `(f_s, δ_{f_s})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement {
    poly: Polynomial,
}

impl GradedElement {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

pub struct Pea {
    p: PoissonPresentation,
    mode: Rewrite,
    memo: Mutex<HashMap<(usize, Monomial), PeaElement>>,
    descent: OnceLock<Result<GroebnerBasis>>,
}

fn delta_degree(g: &Polynomial, n: usize) -> Option<u32> {
    let mut degs = g.terms().map(|(m, _)| m.exps()[n..].iter().sum::<u32>());
    let d = degs.next()?;
    degs.all(|e| e == d).then_some(d)
}

fn delta_part(g: &Polynomial, n: usize, t: u32) -> Polynomial {
    Polynomial::from_terms(
        g.nvars(),
        g.terms().filter(|(m, _)| m.exps()[n..].iter().sum::<u32>() == t).map(|(m, q)| (m.clone(), q.clone())),
    )
}

impl Pea {
    pub fn new(p: &PoissonPresentation) -> Self {
        Pea::with_mode(p, Rewrite::Eager)
    }

    pub fn with_mode(p: &PoissonPresentation, mode: Rewrite) -> Self {
        Pea { p: p.clone(), mode, memo: Mutex::new(HashMap::new()), descent: OnceLock::new() }
    }

    pub fn presentation(&self) -> &PoissonPresentation {
        &self.p
    }

    pub fn mode(&self) -> Rewrite {
        self.mode
    }

    pub fn nvars(&self) -> usize {
        self.p.nvars()
    }

    pub fn zero(&self) -> PeaElement {
        PeaElement::zero(self.nvars())
    }

    pub fn one(&self) -> PeaElement {
        PeaElement::from_poly(Polynomial::one(self.nvars()))
    }

    pub fn x(&self, i: usize) -> PeaElement {
        PeaElement::from_poly(self.p.var(i))
    }

    pub fn d(&self, i: usize) -> PeaElement {
        PeaElement::delta(self.nvars(), i)
    }

    pub fn coeff(&self, c: &Polynomial) -> PeaElement {
        PeaElement::from_poly(self.p.reduce(c))
    }

    fn fix(&self, c: Polynomial) -> Polynomial {
        match self.mode {
            Rewrite::Eager => self.p.reduce(&c),
            Rewrite::Lazy => c,
        }
    }

    /// Reduces every coefficient modulo `I` and drops the ones that vanish.
    pub fn normalize(&self, u: &PeaElement) -> PeaElement {
        u.map_coeffs(|c| self.p.reduce(c))
    }

    fn check(&self, u: &PeaElement) -> Result<()> {
        if u.nvars != self.nvars() {
            return Err(Error::AmbientMismatch(u.nvars, self.nvars()));
        }
        Ok(())
    }

    /// `δ_i·δ^β` in normal order.
    fn delta_mono(&self, i: usize, beta: &Monomial) -> PeaElement {
        let n = self.nvars();
        let k = match beta.support().next() {
            Some(k) if k < i => k,
            _ => {
                let mut out = PeaElement::zero(n);
                out.add_term(beta * &Monomial::var(n, i), Polynomial::one(n));
                return out;
            }
        };
        let key = (i, beta.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let mut rest = beta.exps().to_vec();
        rest[k] -= 1;
        let rest = Monomial::from_exps(rest);
        let inner = self.delta_mono(i, &rest);
        let mut out = self.left_delta(k, &inner);
        let cik = self.p.c(i, k);
        for l in 0..n {
            let dl = cik.derivative(l);
            if dl.is_zero() {
                continue;
            }
            let t = self.delta_mono(l, &rest);
            for (a, c) in t.terms {
                out.add_term(a, self.fix(&dl * &c));
            }
        }
        self.memo.lock().unwrap().insert(key, out.clone());
        out
    }

    /// `δ_i·w` for a normal-ordered `w`.
    fn left_delta(&self, i: usize, w: &PeaElement) -> PeaElement {
        let mut out = PeaElement::zero(self.nvars());
        for (beta, c) in &w.terms {
            for (a, d) in self.delta_mono(i, beta).terms {
                out.add_term(a, self.fix(c * &d));
            }
            out.add_term(beta.clone(), self.fix(self.p.bracket_var_raw(i, c)));
        }
        out
    }

    /// `δ^α·w`, applying `δ_n` first.
    fn left_word(&self, alpha: &Monomial, w: &PeaElement) -> PeaElement {
        let mut w = w.clone();
        for i in (0..self.nvars()).rev() {
            for _ in 0..alpha.exps()[i] {
                w = self.left_delta(i, &w);
            }
        }
        w
    }

    pub fn mul(&self, u: &PeaElement, v: &PeaElement) -> Result<PeaElement> {
        self.check(u)?;
        self.check(v)?;
        let mut out = self.zero();
        for (alpha, c) in &u.terms {
            for (a, d) in self.left_word(alpha, v).terms {
                out.add_term(a, self.fix(c * &d));
            }
        }
        Ok(match self.mode {
            Rewrite::Eager => out,
            Rewrite::Lazy => self.normalize(&out),
        })
    }

    /// Product of a list of factors, left to right.
    pub fn product(&self, factors: &[PeaElement]) -> Result<PeaElement> {
        let mut acc = self.one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, u: &PeaElement, v: &PeaElement) -> Result<PeaElement> {
        Ok(self.mul(u, v)?.sub(&self.mul(v, u)?))
    }

    /// `δ_a = Σ ∂_i a · δ_i`.
    pub fn delta_of(&self, a: &Polynomial) -> PeaElement {
        let mut out = self.zero();
        for i in 0..self.nvars() {
            out.add_term(Monomial::var(self.nvars(), i), self.p.reduce(&a.derivative(i)));
        }
        out
    }

    /// The operator image of `u` acting on `A`, with `δ_i ↦ {x_i, ·}`.
    pub fn act_on(&self, u: &PeaElement, f: &Polynomial) -> Result<Polynomial> {
        self.check(u)?;
        if f.nvars() != self.nvars() {
            return Err(Error::AmbientMismatch(f.nvars(), self.nvars()));
        }
        let mut out = self.p.zero();
        for (alpha, c) in &u.terms {
            let mut g = self.p.reduce(f);
            for i in (0..self.nvars()).rev() {
                for _ in 0..alpha.exps()[i] {
                    g = self.p.reduce(&self.p.bracket_var_raw(i, &g));
                }
            }
            out = out + c * &g;
        }
        Ok(self.p.reduce(&out))
    }

    /// Anti-automorphism fixing `A` and sending `δ_i ↦ -δ_i`.
    pub fn opposite_image(&self, u: &PeaElement) -> Result<PeaElement> {
        self.check(u)?;
        let mut out = self.zero();
        for (alpha, c) in &u.terms {
            let mut w = PeaElement::from_poly(c.clone());
            for i in 0..self.nvars() {
                for _ in 0..alpha.exps()[i] {
                    w = self.left_delta(i, &w);
                }
            }
            if alpha.degree() % 2 == 1 {
                w = w.neg();
            }
            out = out.add(&w);
        }
        Ok(self.normalize(&out))
    }

    /// Cofactor-tracked basis of `(f_s, δ_{f_s})` in `K[x, δ]`, δ-block leading.
    pub fn descent_basis(&self) -> Result<&GroebnerBasis> {
        self.descent
            .get_or_init(|| {
                let n = self.nvars();
                let mut gens = Vec::new();
                for f in self.p.relations() {
                    gens.push(f.extend(n));
                    gens.push(PeaElement::to_commutative(&self.delta_of(f)));
                }
                let order = MonomialOrder::Block((0..2 * n).map(|k| k >= n).collect());
                buchberger(&Ideal::new(2 * n, gens), &order, true)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Graded descent: peels the top δ-degree part against `(f_s, δ_{f_s})` until nothing is left.
    pub fn is_zero(&self, u: &PeaElement) -> Result<bool> {
        self.check(u)?;
        let n = self.nvars();
        let mut u = self.normalize(u);
        if self.p.relations().is_empty() {
            return Ok(u.is_empty());
        }
        let gb = self.descent_basis()?;
        while let Some(t) = u.degree() {
            let top = u.homogeneous(t).to_commutative();
            let (rem, witness) = gb.normal_form(&top)?;
            if !rem.is_zero() {
                return Ok(false);
            }
            let mut w = self.zero();
            for (g, q) in gb.generators().iter().zip(&witness.combination) {
                if t == 0 || delta_degree(g, n) != Some(1) {
                    continue;
                }
                let q = delta_part(q, n, t - 1);
                if q.is_zero() {
                    continue;
                }
                let qe = self.normalize(&PeaElement::from_commutative(&q));
                w = w.add(&self.mul(&qe, &PeaElement::from_commutative(g))?);
            }
            let next = self.normalize(&u.sub(&w));
            if let Some(s) = next.degree() {
                if s >= t {
                    return Err(Error::DescentInvariant { from: t, to: s });
                }
            }
            u = next;
        }
        Ok(true)
    }

    pub fn equal(&self, u: &PeaElement, v: &PeaElement) -> Result<bool> {
        self.is_zero(&u.sub(v))
    }

    /// Whether `Σ ω_i dx_i` vanishes in `Ω_A`, i.e. lies in `G_A + I·Ω`.
    pub fn omega_is_zero(&self, w: &OmegaElement) -> Result<bool> {
        let mut u = self.zero();
        for (i, c) in w.coeffs().iter().enumerate() {
            u.add_term(Monomial::var(self.nvars(), i), self.p.reduce(c));
        }
        self.is_zero(&u)
    }

    fn omega_to_pea(&self, w: &OmegaElement) -> Result<PeaElement> {
        if w.coeffs().len() != self.nvars() {
            return Err(Error::AmbientMismatch(w.coeffs().len(), self.nvars()));
        }
        let mut u = self.zero();
        for (i, c) in w.coeffs().iter().enumerate() {
            u.add_term(Monomial::var(self.nvars(), i), self.p.reduce(c));
        }
        Ok(u)
    }

    /// Commutator of two degree-one elements, split into its `Ω` and `A` parts.
    pub fn omega_bracket(&self, w1: &OmegaElement, w2: &OmegaElement) -> Result<(OmegaElement, Polynomial)> {
        let c = self.commutator(&self.omega_to_pea(w1)?, &self.omega_to_pea(w2)?)?;
        if let Some(t) = c.degree() {
            if t > 1 {
                return Err(Error::DescentInvariant { from: 1, to: t });
            }
        }
        let n = self.nvars();
        let omega = OmegaElement::new((0..n).map(|i| c.coefficient(&Monomial::var(n, i))).collect());
        Ok((omega, c.coefficient(&Monomial::one(n))))
    }

    /// Symbol of `u` in `gr U(A)`: its top-degree part.
    pub fn symbol(&self, u: &PeaElement) -> Result<GradedElement> {
        self.check(u)?;
        let u = self.normalize(u);
        match u.degree() {
            Some(t) => self.graded(&u.homogeneous(t).to_commutative()),
            None => Ok(GradedElement { poly: Polynomial::zero(2 * self.nvars()) }),
        }
    }

    /// A graded element from a polynomial in `x_1..x_n, δ_1..δ_n`.
    pub fn graded(&self, g: &Polynomial) -> Result<GradedElement> {
        if g.nvars() != 2 * self.nvars() {
            return Err(Error::AmbientMismatch(g.nvars(), 2 * self.nvars()));
        }
        Ok(GradedElement { poly: self.descent_basis()?.reduce(g) })
    }

    /// Biderivation bracket with `{x_i, x_j} = 0`, `{δ_i, x_j} = c_ij`, `{δ_i, δ_j} = Σ_k ∂_k c_ij δ_k`.
    pub fn gr_bracket(&self, g1: &GradedElement, g2: &GradedElement) -> Result<GradedElement> {
        let n = self.nvars();
        let lift = |c: &Polynomial| c.extend(n);
        let d1: Vec<Polynomial> = (0..2 * n).map(|a| g1.poly.derivative(a)).collect();
        let d2: Vec<Polynomial> = (0..2 * n).map(|a| g2.poly.derivative(a)).collect();
        let mut out = Polynomial::zero(2 * n);
        for i in 0..n {
            for j in 0..n {
                let c = self.p.c(i, j);
                if c.is_zero() {
                    continue;
                }
                let cl = lift(c);
                let mixed = &d1[n + i] * &d2[j] - &d1[j] * &d2[n + i];
                if !mixed.is_zero() {
                    out = out + &mixed * &cl;
                }
                if i < j {
                    let dd = &d1[n + i] * &d2[n + j] - &d1[n + j] * &d2[n + i];
                    if dd.is_zero() {
                        continue;
                    }
                    let mut dc = Polynomial::zero(2 * n);
                    for k in 0..n {
                        dc = dc + &lift(&c.derivative(k)) * &Polynomial::var(2 * n, n + k);
                    }
                    out = out + &dd * &dc;
                }
            }
        }
        self.graded(&out)
    }

    /// Lifts `x_i ↦ σ_i` to `U(A)` via `δ_i ↦ δ_{σ_i}` after checking that `σ` is a Poisson endomorphism.
    pub fn lift_endomorphism(&self, sigma: &[Polynomial], u: &PeaElement) -> Result<PeaElement> {
        self.check(u)?;
        let n = self.nvars();
        if sigma.len() != n {
            return Err(Error::NotPoissonEndomorphism(format!("{} images given for {} variables", sigma.len(), n)));
        }
        if let Some(s) = sigma.iter().find(|s| s.nvars() != n) {
            return Err(Error::AmbientMismatch(s.nvars(), n));
        }
        let vars = self.p.vars();
        for (s, f) in self.p.relations().iter().enumerate() {
            if !self.p.in_ideal(&f.substitute(sigma, n)) {
                return Err(Error::NotPoissonEndomorphism(format!(
                    "relation {} `{}` is not mapped into the ideal",
                    s + 1,
                    self.p.fmt(f)
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.p.bracket(&sigma[i], &sigma[j]);
                let rhs = self.p.reduce(&self.p.c(i, j).substitute(sigma, n));
                if lhs != rhs {
                    return Err(Error::NotPoissonEndomorphism(format!(
                        "{{{}, {}}} is not preserved",
                        vars[i], vars[j]
                    )));
                }
            }
        }
        let deltas: Vec<PeaElement> = sigma.iter().map(|s| self.delta_of(s)).collect();
        let mut out = self.zero();
        for (alpha, c) in &u.terms {
            let mut w = self.one();
            for i in (0..n).rev() {
                for _ in 0..alpha.exps()[i] {
                    w = self.mul(&deltas[i], &w)?;
                }
            }
            let c = self.p.reduce(&c.substitute(sigma, n));
            out = out.add(&w.left_mul_poly(&c));
        }
        Ok(self.normalize(&out))
    }

    /// Parses an expression over the presentation variables and `d1..dn`; `*` is the algebra product.
    pub fn parse(&self, text: &str) -> Result<PeaElement> {
        PeaEval { pea: self }.eval(&parse_expr(text)?)
    }

    /// Expanded form such as `x*d2 + 1`: higher δ-degree first.
    pub fn format(&self, u: &PeaElement) -> String {
        let n = self.nvars();
        let mut names: Vec<String> = self.p.vars().to_vec();
        names.extend((1..=n).map(|k| format!("d{k}")));
        let mut rows: Vec<(&Monomial, &Monomial, &Rational)> =
            u.terms.iter().flat_map(|(a, c)| c.terms().map(move |(m, q)| (a, m, q))).collect();
        if rows.is_empty() {
            return "0".to_string();
        }
        rows.sort_by(|(a1, m1, _), (a2, m2, _)| {
            a2.degree()
                .cmp(&a1.degree())
                .then_with(|| MonomialOrder::DegRevLex.cmp(a2, a1))
                .then_with(|| MonomialOrder::DegRevLex.cmp(m2, m1))
        });
        let mut out = String::new();
        for (k, (a, m, q)) in rows.into_iter().enumerate() {
            let full = Monomial::from_exps(m.exps().iter().chain(a.exps()).copied().collect());
            write_term(&mut out, k == 0, q, |s| {
                full.write(&names, s);
                !full.is_one()
            });
        }
        out
    }
}

struct PeaEval<'a> {
    pea: &'a Pea,
}

impl Evaluator for PeaEval<'_> {
    type Value = PeaElement;

    fn num(&self, q: Rational) -> PeaElement {
        PeaElement::from_poly(self.pea.p.constant(q))
    }

    fn var(&self, name: &str, pos: usize) -> Result<PeaElement> {
        let n = self.pea.nvars();
        if let Some(i) = self.pea.p.vars().iter().position(|v| v == name) {
            return Ok(self.pea.x(i));
        }
        if let Some(k) = name.strip_prefix('d').filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())) {
            return match k.parse::<usize>() {
                Ok(k) if (1..=n).contains(&k) => Ok(self.pea.d(k - 1)),
                _ => Err(Error::VariableIndex { index: k.parse().unwrap_or(usize::MAX), nvars: n }),
            };
        }
        Err(Error::UnknownVariable { name: name.to_string(), pos })
    }

    fn add(&self, a: &PeaElement, b: &PeaElement) -> PeaElement {
        a.add(b)
    }

    fn neg(&self, a: &PeaElement) -> PeaElement {
        a.neg()
    }

    fn mul(&self, a: &PeaElement, b: &PeaElement) -> PeaElement {
        self.pea.mul(a, b).expect("operands share the presentation")
    }
}
