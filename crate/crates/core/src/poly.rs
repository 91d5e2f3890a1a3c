//! Exact multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars], degree: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps, degree: 1 }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let exps = other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect();
        Monomial { exps, degree: other.degree - self.degree }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::from_exps(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }

    /// Appends `extra` zero exponents.
    pub fn extend(&self, extra: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.extend(std::iter::repeat(0).take(extra));
        Monomial { exps, degree: self.degree }
    }

    pub(crate) fn write(&self, names: &[String], out: &mut String) {
        let mut first = true;
        for (i, e) in self.exps.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(&names[i]);
            if *e > 1 {
                let _ = write!(out, "^{e}");
            }
        }
    }
}

impl Mul for &Monomial {
    type Output = Monomial;
    fn mul(self, rhs: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&rhs.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, degree: self.degree + rhs.degree }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    DegRevLex,
    /// `leading[i]` marks the variables of the leading block; degrevlex inside each block.
    Block(Vec<bool>),
}

fn degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::DegRevLex => a
                .degree
                .cmp(&b.degree)
                .then_with(|| degrevlex(&a.exps, &b.exps)),
            MonomialOrder::Block(leading) => {
                let pick = |m: &Monomial, lead: bool| -> Vec<u32> {
                    m.exps
                        .iter()
                        .zip(leading)
                        .filter(|(_, l)| **l == lead)
                        .map(|(e, _)| *e)
                        .collect()
                };
                degrevlex(&pick(a, true), &pick(b, true))
                    .then_with(|| degrevlex(&pick(a, false), &pick(b, false)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(n, d)| (n * m, d * c)).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn leading(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::VariableIndex { index: i, nvars: self.nvars });
        }
        Ok(self.derivative(i))
    }

    /// Formal partial derivative in the variable with index `i`; panics when out of range.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars, "variable index {i} out of range");
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[i] -= 1;
            out.terms.insert(
                Monomial { exps, degree: m.degree - 1 },
                c * Rational::from_integer(BigInt::from(e)),
            );
        }
        out
    }

    /// Substitutes `images[i]` for the i-th variable; all images share one ambient ring.
    pub fn substitute(&self, images: &[Polynomial], target_nvars: usize) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target_nvars)]; self.nvars];
        let mut out = Polynomial::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target_nvars, c.clone());
            for (i, e) in m.exps.iter().enumerate() {
                let e = *e as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds into a ring with `target_nvars` variables, sending variable i to `map[i]`.
    pub fn remap(&self, map: &[usize], target_nvars: usize) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0; target_nvars];
            for (i, e) in m.exps.iter().enumerate() {
                exps[map[i]] += e;
            }
            (Monomial::from_exps(exps), c.clone())
        });
        Polynomial::from_terms(target_nvars, terms)
    }

    /// Embeds into a ring with `extra` more variables appended at the end.
    pub fn extend(&self, extra: usize) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.extend(extra), c.clone())).collect();
        Polynomial { nvars: self.nvars + extra, terms }
    }

    /// Terms in canonical print order: degrevlex, largest first.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| MonomialOrder::DegRevLex.cmp(b.0, a.0));
        v
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            write_term(&mut out, k == 0, c, |s| {
                m.write(names, s);
                !m.is_one()
            });
        }
        out
    }
}

/// Writes one signed term; `body` appends the non-coefficient factors and reports whether it wrote any.
pub(crate) fn write_term(out: &mut String, first: bool, c: &Rational, body: impl FnOnce(&mut String) -> bool) {
    let neg = c.is_negative();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let a = c.abs();
    let mut factors = String::new();
    let has_body = body(&mut factors);
    if !has_body {
        out.push_str(&a.to_string());
    } else if a.is_one() {
        out.push_str(&factors);
    } else {
        let _ = write!(out, "{a}*{factors}");
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m * n, c * d);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entries length must be rows*cols");
        PolyMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows);
        let n = self.get(0, 0).nvars();
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Polynomial::zero(n);
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                entries.push(acc);
            }
        }
        PolyMatrix::new(self.rows, rhs.cols, entries)
    }

    /// Cofactor expansion with memoized sub-minors.
    pub fn determinant(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.entries.first().map_or(0, Polynomial::nvars);
        let rows: Vec<usize> = (0..self.rows).collect();
        let mut cache = MinorCache::new(self.clone(), n, |p| p);
        Ok(cache.minor(&rows, &rows))
    }

    /// Fraction-free Gaussian elimination; kept as an independent check on `determinant`.
    pub fn determinant_bareiss(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let size = self.rows;
        let nv = self.entries.first().map_or(0, Polynomial::nvars);
        if size == 0 {
            return Ok(Polynomial::one(nv));
        }
        let mut a: Vec<Vec<Polynomial>> =
            (0..size).map(|i| (0..size).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = Rational::one();
        let mut prev = Polynomial::one(nv);
        for k in 0..size - 1 {
            if a[k][k].is_zero() {
                match (k + 1..size).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(Polynomial::zero(nv)),
                }
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = exact_div(&num, &prev);
                }
            }
            prev = a[k][k].clone();
        }
        Ok(a[size - 1][size - 1].scale(&sign))
    }
}

/// Exact division of `num` by `den`; panics when the division is not exact.
pub fn exact_div(num: &Polynomial, den: &Polynomial) -> Polynomial {
    let order = MonomialOrder::Lex;
    let (lm, lc) = den.leading(&order).expect("division by zero polynomial");
    let (lm, lc) = (lm.clone(), lc.clone());
    let mut rem = num.clone();
    let mut quot = Polynomial::zero(num.nvars());
    while let Some((m, c)) = rem.leading(&order) {
        assert!(lm.divides(m), "inexact polynomial division");
        let t = lm.quotient_of(m);
        let q = c / &lc;
        rem.add_scaled(&den.mul_term(&t, &q), &-Rational::one());
        quot.add_term(t, q);
    }
    quot
}

/// Memoized minors of a fixed matrix, each entry passed through `reduce`.
pub struct MinorCache<F: Fn(Polynomial) -> Polynomial> {
    matrix: PolyMatrix,
    nvars: usize,
    reduce: F,
    memo: std::collections::HashMap<(u64, u64), Polynomial>,
}

impl<F: Fn(Polynomial) -> Polynomial> MinorCache<F> {
    pub fn new(matrix: PolyMatrix, nvars: usize, reduce: F) -> Self {
        assert!(matrix.rows <= 64 && matrix.cols <= 64, "minor cache supports at most 64 rows and columns");
        MinorCache { matrix, nvars, reduce, memo: Default::default() }
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    /// Minor with the given rows and columns taken in the listed order (repeats give 0).
    pub fn minor(&mut self, rows: &[usize], cols: &[usize]) -> Polynomial {
        assert_eq!(rows.len(), cols.len());
        let (rs, s1) = sort_with_sign(rows);
        let (cs, s2) = sort_with_sign(cols);
        match (rs, cs) {
            (Some(rs), Some(cs)) => {
                let m = self.sorted_minor(&rs, &cs);
                if s1 * s2 < 0 {
                    -m
                } else {
                    m
                }
            }
            _ => Polynomial::zero(self.nvars),
        }
    }

    fn sorted_minor(&mut self, rows: &[usize], cols: &[usize]) -> Polynomial {
        if rows.is_empty() {
            return Polynomial::one(self.nvars);
        }
        let key = (mask(rows), mask(cols));
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let r0 = rows[0];
        let mut acc = Polynomial::zero(self.nvars);
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.matrix.get(r0, c).clone();
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sub = self.sorted_minor(&rows[1..], &rest);
            if sub.is_zero() {
                continue;
            }
            let t = &entry * &sub;
            acc = if k % 2 == 0 { acc + t } else { acc - t };
        }
        let acc = (self.reduce)(acc);
        self.memo.insert(key, acc.clone());
        acc
    }
}

fn mask(idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

/// Sorts indices, returning the permutation sign, or `None` when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> (Option<Vec<usize>>, i32) {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return (None, 0);
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (None, 0);
    }
    (Some(v), sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str, v: &[&str]) -> Polynomial {
        parse_polynomial(s, &names(v)).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let v = ["x", "y"];
        assert_eq!(p("x^2*y", &v).derivative(0), p("2*x*y", &v));
        assert_eq!(p("x^2", &v).derivative(1), p("0", &v));
        assert_eq!(p("H^2 - 1", &["H"]).derivative(0), p("2*H", &["H"]));
        assert!(p("x", &v).partial_derivative(2).is_err());
    }

    #[test]
    fn orders() {
        let a = Monomial::from_exps(vec![1, 0, 2]);
        let b = Monomial::from_exps(vec![0, 3, 0]);
        assert_eq!(MonomialOrder::Lex.cmp(&a, &b), Ordering::Greater);
        // equal degree, last variable decides: a has more z, so a is smaller
        assert_eq!(MonomialOrder::DegRevLex.cmp(&a, &b), Ordering::Less);
        let block = MonomialOrder::Block(vec![false, false, true]);
        assert_eq!(block.cmp(&a, &b), Ordering::Greater);
    }

    #[test]
    fn determinant_examples() {
        let v = ["x", "y"];
        let m = PolyMatrix::from_rows(vec![vec![p("0", &v), p("-1", &v)], vec![p("1", &v), p("0", &v)]]);
        assert_eq!(m.determinant().unwrap(), p("1", &v));
        let id = PolyMatrix::from_rows(
            (0..3).map(|i| (0..3).map(|j| if i == j { p("1", &v) } else { p("0", &v) }).collect()).collect(),
        );
        assert_eq!(id.determinant().unwrap(), p("1", &v));
        let g = ["H", "X", "Y"];
        let rows = [["0", "-1", "-X"], ["1", "0", "Y"], ["X", "-Y", "0"]];
        let m = PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| p(s, &g)).collect()).collect());
        assert!(m.determinant().unwrap().is_zero());
        assert!(m.determinant_bareiss().unwrap().is_zero());
        let rect = PolyMatrix::new(1, 2, vec![p("x", &v), p("y", &v)]);
        assert!(rect.determinant().is_err());
    }

    #[test]
    fn printing() {
        let v = ["x", "y"];
        assert_eq!(p("1 - 2*x*y + x^2", &v).to_string_with(&names(&v)), "x^2 - 2*x*y + 1");
        assert_eq!(p("2/3 - x", &["x"]).to_string_with(&names(&["x"])), "-x + 2/3");
        assert_eq!(p("0", &v).to_string_with(&names(&v)), "0");
    }

    #[test]
    fn substitution() {
        let v = ["x", "y"];
        let f = p("x^2*y - y", &v);
        let g = f.substitute(&[p("x + 1", &v), p("y", &v)], 2);
        assert_eq!(g, p("x^2*y + 2*x*y", &v));
    }
}
