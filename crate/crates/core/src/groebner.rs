//! Buchberger's algorithm with optional cofactor tracking, and the ideal queries built on it.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Rational};

static MAX_BASIS: AtomicUsize = AtomicUsize::new(5000);
static MAX_DEGREE: AtomicUsize = AtomicUsize::new(64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_basis: usize,
    pub max_degree: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_basis: 5000, max_degree: 64 }
    }
}

/// Sets the process-wide capacity limits used by every basis computation.
pub fn set_limits(limits: Limits) {
    MAX_BASIS.store(limits.max_basis, AtomicOrdering::Relaxed);
    MAX_DEGREE.store(limits.max_degree, AtomicOrdering::Relaxed);
}

pub fn limits() -> Limits {
    Limits {
        max_basis: MAX_BASIS.load(AtomicOrdering::Relaxed),
        max_degree: MAX_DEGREE.load(AtomicOrdering::Relaxed),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    nvars: usize,
    generators: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(nvars: usize, generators: impl IntoIterator<Item = Polynomial>) -> Self {
        let generators = generators
            .into_iter()
            .inspect(|g| assert_eq!(g.nvars(), nvars, "generator in wrong ring"))
            .filter(|g| !g.is_zero())
            .collect();
        Ideal { nvars, generators }
    }

    pub fn zero(nvars: usize) -> Self {
        Ideal { nvars, generators: Vec::new() }
    }

    pub fn unit(nvars: usize) -> Self {
        Ideal { nvars, generators: vec![Polynomial::one(nvars)] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        assert_eq!(self.nvars, other.nvars);
        Ideal::new(self.nvars, self.generators.iter().chain(&other.generators).cloned())
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Polynomial>) -> Ideal {
        Ideal::new(self.nvars, self.generators.iter().cloned().chain(extra))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub member: bool,
    /// `q_s` with `p - remainder = Σ q_s g_s` over the original generators; empty when untracked.
    pub combination: Vec<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    nvars: usize,
    generators: Vec<Polynomial>,
    basis: Vec<Polynomial>,
    cofactors: Option<Vec<Vec<Polynomial>>>,
    sorted: Vec<Terms>,
}

type Terms = Vec<(Monomial, Rational)>;

fn to_terms(p: &Polynomial, order: &MonomialOrder) -> Terms {
    let mut v: Terms = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    v.sort_by(|a, b| order.cmp(&b.0, &a.0));
    v
}

fn to_poly(t: &[(Monomial, Rational)], nvars: usize) -> Polynomial {
    Polynomial::from_terms(nvars, t.iter().cloned())
}

/// `a - q * t * b`, all sorted descending.
fn sub_mul(a: &[(Monomial, Rational)], q: &Rational, t: &Monomial, b: &[(Monomial, Rational)], order: &MonomialOrder) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let prod: Vec<(Monomial, Rational)> = b.iter().map(|(m, c)| (m * t, c * q)).collect();
    while i < a.len() || j < prod.len() {
        let ord = if i == a.len() {
            Ordering::Less
        } else if j == prod.len() {
            Ordering::Greater
        } else {
            order.cmp(&a[i].0, &prod[j].0)
        };
        match ord {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((prod[j].0.clone(), -prod[j].1.clone()));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 - &prod[j].1;
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn add_scaled_vec(acc: &mut [Polynomial], q: &Rational, t: &Monomial, cof: &[Polynomial]) {
    for (a, c) in acc.iter_mut().zip(cof) {
        a.add_scaled(&c.mul_term(t, &Rational::one()), q);
    }
}

fn scale_vec(v: &[Polynomial], q: &Rational) -> Vec<Polynomial> {
    v.iter().map(|p| p.scale(q)).collect()
}

struct Elem {
    terms: Terms,
    cof: Option<Vec<Polynomial>>,
}

impl Elem {
    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn make_monic(&mut self) {
        let inv = Rational::one() / &self.terms[0].1;
        for t in &mut self.terms {
            t.1 *= &inv;
        }
        if let Some(c) = &mut self.cof {
            *c = scale_vec(c, &inv);
        }
    }
}

/// Fully reduces `p` by `divisors`; returns the remainder and `combo` with `p = remainder + Σ combo_s g_s`.
fn reduce_terms<'a>(
    mut p: Terms,
    divisors: impl Fn() -> Box<dyn Iterator<Item = (&'a Terms, Option<&'a Vec<Polynomial>>)> + 'a>,
    order: &MonomialOrder,
    mut combo: Option<Vec<Polynomial>>,
) -> (Terms, Option<Vec<Polynomial>>) {
    let mut i = 0;
    while i < p.len() {
        let found = divisors().find(|(g, _)| g[0].0.divides(&p[i].0));
        match found {
            Some((g, cof)) => {
                let t = g[0].0.quotient_of(&p[i].0);
                let q = &p[i].1 / &g[0].1;
                if let (Some(acc), Some(cof)) = (combo.as_mut(), cof) {
                    add_scaled_vec(acc, &q, &t, cof);
                }
                let tail = sub_mul(&p[i..], &q, &t, g, order);
                p.truncate(i);
                p.extend(tail);
            }
            None => i += 1,
        }
    }
    (p, combo)
}

fn capacity_check(lim: &Limits, count: usize, degree: u32) -> Result<()> {
    if count > lim.max_basis {
        return Err(Error::Capacity(format!("Groebner basis exceeded {} elements", lim.max_basis)));
    }
    if degree as usize > lim.max_degree {
        return Err(Error::Capacity(format!("Groebner basis element exceeded total degree {}", lim.max_degree)));
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of `ideal` under `order`, optionally with cofactors over its generators.
pub fn buchberger(ideal: &Ideal, order: &MonomialOrder, track_cofactors: bool) -> Result<GroebnerBasis> {
    buchberger_with_limits(ideal, order, track_cofactors, &limits())
}

pub fn buchberger_with_limits(
    ideal: &Ideal,
    order: &MonomialOrder,
    track_cofactors: bool,
    lim: &Limits,
) -> Result<GroebnerBasis> {
    let nvars = ideal.nvars;
    let gens = ideal.generators.clone();
    let ngens = gens.len();
    let zero_vec = || vec![Polynomial::zero(nvars); ngens];
    let mut elems: Vec<Elem> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let unit = |cof: Option<Vec<Polynomial>>, c: &Rational| -> GroebnerBasis {
        let cof = cof.map(|v| vec![scale_vec(&v, &(Rational::one() / c))]);
        GroebnerBasis::assemble(order.clone(), nvars, gens.clone(), vec![Polynomial::one(nvars)], cof)
    };

    let mut queue: Vec<Elem> = gens
        .iter()
        .enumerate()
        .map(|(s, g)| Elem {
            terms: to_terms(g, order),
            cof: track_cofactors.then(|| {
                let mut v = zero_vec();
                v[s] = Polynomial::one(nvars);
                v
            }),
        })
        .collect();
    queue.reverse();

    loop {
        let h = if let Some(h) = queue.pop() {
            h
        } else {
            let Some(k) = select_pair(&pairs, order) else { break };
            let pair = pairs.swap_remove(k);
            spoly(&elems[pair.i], &elems[pair.j], &pair.lcm, order, nvars)
        };
        let (terms, cof) = {
            let active_ref = &active;
            let elems_ref = &elems;
            let combo = h.cof.as_ref().map(|_| zero_vec());
            let (r, combo) = reduce_terms(
                h.terms,
                || Box::new(active_ref.iter().map(move |&k| (&elems_ref[k].terms, elems_ref[k].cof.as_ref()))),
                order,
                combo,
            );
            let cof = match (h.cof, combo) {
                (Some(c), Some(q)) => Some(c.iter().zip(&q).map(|(a, b)| a - b).collect()),
                _ => None,
            };
            (r, cof)
        };
        if terms.is_empty() {
            continue;
        }
        let mut h = Elem { terms, cof };
        if h.lm().is_one() {
            let c = h.terms[0].1.clone();
            return Ok(unit(h.cof, &c));
        }
        h.make_monic();
        let degree = h.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        capacity_check(lim, active.len() + 1, degree)?;
        let idx = elems.len();
        elems.push(h);
        update(&elems, &mut active, &mut pairs, idx);
    }

    // tail-reduce the minimal basis
    let mut basis_terms = Vec::new();
    let mut basis_cof = Vec::new();
    for &k in &active {
        let others: Vec<usize> = active.iter().copied().filter(|&o| o != k).collect();
        let e = &elems[k];
        let head = e.terms[0].clone();
        let combo = e.cof.as_ref().map(|_| zero_vec());
        let (tail, combo) = reduce_terms(
            e.terms[1..].to_vec(),
            || Box::new(others.iter().map(|&o| (&elems[o].terms, elems[o].cof.as_ref()))),
            order,
            combo,
        );
        let mut t = vec![head];
        t.extend(tail);
        basis_terms.push(t);
        basis_cof.push(match (&e.cof, combo) {
            (Some(c), Some(q)) => Some(c.iter().zip(&q).map(|(a, b)| a - b).collect::<Vec<_>>()),
            _ => None,
        });
    }
    let mut idx: Vec<usize> = (0..basis_terms.len()).collect();
    idx.sort_by(|&a, &b| order.cmp(&basis_terms[a][0].0, &basis_terms[b][0].0));
    let basis = idx.iter().map(|&k| to_poly(&basis_terms[k], nvars)).collect();
    let cofactors = track_cofactors.then(|| idx.iter().map(|&k| basis_cof[k].clone().unwrap()).collect());
    Ok(GroebnerBasis::assemble(order.clone(), nvars, gens, basis, cofactors))
}

fn select_pair(pairs: &[Pair], order: &MonomialOrder) -> Option<usize> {
    (0..pairs.len()).min_by(|&a, &b| {
        let (p, q) = (&pairs[a], &pairs[b]);
        p.lcm
            .degree()
            .cmp(&q.lcm.degree())
            .then_with(|| order.cmp(&p.lcm, &q.lcm))
            .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)))
    })
}

fn spoly(a: &Elem, b: &Elem, lcm: &Monomial, order: &MonomialOrder, nvars: usize) -> Elem {
    let ta = a.lm().quotient_of(lcm);
    let tb = b.lm().quotient_of(lcm);
    let scaled: Terms = a.terms.iter().map(|(m, c)| (m * &ta, c.clone())).collect();
    let terms = sub_mul(&scaled, &Rational::one(), &tb, &b.terms, order);
    let cof = match (&a.cof, &b.cof) {
        (Some(ca), Some(cb)) => Some(
            ca.iter()
                .zip(cb)
                .map(|(x, y)| &x.mul_term(&ta, &Rational::one()) - &y.mul_term(&tb, &Rational::one()))
                .collect(),
        ),
        _ => None,
    };
    let _ = nvars;
    Elem { terms, cof }
}

/// Gebauer–Möller installation of the new element `h`.
fn update(elems: &[Elem], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
    let lm_h = elems[h].lm().clone();
    let mut c: Vec<Pair> = active
        .iter()
        .map(|&g| Pair { i: g, j: h, lcm: lm_h.lcm(elems[g].lm()) })
        .collect();
    let mut d: Vec<Pair> = Vec::new();
    while let Some(p) = (!c.is_empty()).then(|| c.remove(0)) {
        let coprime = lm_h.coprime(elems[p.i].lm());
        let dominated = c.iter().chain(d.iter()).any(|q| q.lcm.divides(&p.lcm));
        if coprime || !dominated {
            d.push(p);
        }
    }
    let e: Vec<Pair> = d.into_iter().filter(|p| !lm_h.coprime(elems[p.i].lm())).collect();
    pairs.retain(|p| {
        !(lm_h.divides(&p.lcm)
            && lm_h.lcm(elems[p.i].lm()) != p.lcm
            && lm_h.lcm(elems[p.j].lm()) != p.lcm)
    });
    pairs.extend(e);
    active.retain(|&g| !lm_h.divides(elems[g].lm()));
    active.push(h);
}

impl GroebnerBasis {
    fn assemble(
        order: MonomialOrder,
        nvars: usize,
        generators: Vec<Polynomial>,
        basis: Vec<Polynomial>,
        cofactors: Option<Vec<Vec<Polynomial>>>,
    ) -> Self {
        let sorted = basis.iter().map(|b| to_terms(b, &order)).collect();
        GroebnerBasis { order, nvars, generators, basis, cofactors, sorted }
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn cofactors(&self) -> Option<&[Vec<Polynomial>]> {
        self.cofactors.as_deref()
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].as_constant().is_some_and(|c| !c.is_zero())
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.sorted.iter().map(|t| t[0].0.clone()).collect()
    }

    /// Remainder of `p` modulo the basis.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        assert_eq!(p.nvars(), self.nvars, "ambient mismatch");
        if self.basis.is_empty() || p.is_zero() {
            return p.clone();
        }
        let (r, _) = reduce_terms(
            to_terms(p, &self.order),
            || Box::new(self.sorted.iter().map(|t| (t, None))),
            &self.order,
            None,
        );
        to_poly(&r, self.nvars)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Result<(Polynomial, MembershipWitness)> {
        if p.nvars() != self.nvars {
            return Err(Error::AmbientMismatch(p.nvars(), self.nvars));
        }
        let Some(cofs) = &self.cofactors else {
            let r = self.reduce(p);
            let member = r.is_zero();
            return Ok((r, MembershipWitness { member, combination: Vec::new() }));
        };
        let ngens = self.generators.len();
        let combo = Some(vec![Polynomial::zero(self.nvars); ngens]);
        let (r, combo) = reduce_terms(
            to_terms(p, &self.order),
            || Box::new(self.sorted.iter().zip(cofs).map(|(t, c)| (t, Some(c)))),
            &self.order,
            combo,
        );
        let r = to_poly(&r, self.nvars);
        let member = r.is_zero();
        Ok((r, MembershipWitness { member, combination: combo.unwrap() }))
    }

    /// Krull dimension of the quotient ring, from the leading-term ideal.
    pub fn dimension(&self) -> Result<usize> {
        if self.is_unit() {
            return Err(Error::EmptyVariety);
        }
        let lms = self.leading_monomials();
        for size in (0..=self.nvars).rev() {
            for subset in (0..self.nvars).combinations(size) {
                let inside = |m: &Monomial| m.support().all(|v| subset.contains(&v));
                if !lms.iter().any(inside) {
                    return Ok(size);
                }
            }
        }
        unreachable!("the empty subset is always independent for a proper ideal")
    }
}

pub fn contains_one(ideal: &Ideal) -> Result<bool> {
    Ok(buchberger(ideal, &MonomialOrder::DegRevLex, false)?.is_unit())
}

/// Whether some power of `p` lies in `ideal`, via an auxiliary variable.
pub fn radical_membership(p: &Polynomial, ideal: &Ideal) -> Result<bool> {
    let n = ideal.nvars;
    if p.nvars() != n {
        return Err(Error::AmbientMismatch(p.nvars(), n));
    }
    let y = Polynomial::var(n + 1, n);
    let aux = &Polynomial::one(n + 1) - &(&y * &p.extend(1));
    let lifted = Ideal::new(n + 1, ideal.generators.iter().map(|g| g.extend(1)).chain([aux]));
    contains_one(&lifted)
}

pub fn ideal_dimension(ideal: &Ideal) -> Result<usize> {
    buchberger(ideal, &MonomialOrder::DegRevLex, false)?.dimension()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Finite(usize),
    /// `I` generates the unit ideal of the quotient.
    Unit,
}

impl Height {
    pub fn at_least(&self, k: i64) -> bool {
        match self {
            Height::Finite(h) => *h as i64 >= k,
            Height::Unit => true,
        }
    }
}

/// Height of the image of `i` in the quotient by `j`, as `dim(R/J) - dim(R/(I+J))`.
pub fn ideal_height(i: &Ideal, j: &Ideal) -> Result<Height> {
    let dim_a = match ideal_dimension(j) {
        Ok(d) => d,
        Err(Error::EmptyVariety) => return Err(Error::Presentation("ideal_height: J is the unit ideal".into())),
        Err(e) => return Err(e),
    };
    match ideal_dimension(&i.sum(j)) {
        Ok(d) => Ok(Height::Finite(dim_a - d)),
        Err(Error::EmptyVariety) => Ok(Height::Unit),
        Err(e) => Err(e),
    }
}
