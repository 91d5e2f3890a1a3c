//! Finite presentations `A = P_n / I` with a bracket table on the generators.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groebner::{buchberger, GroebnerBasis, Ideal};
use crate::parse::parse_polynomial;
use crate::poly::{rat, MonomialOrder, Polynomial, Rational};
use crate::structure::DerivationVector;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default)]
    pub prime_ideal: bool,
    #[serde(default)]
    pub cohen_macaulay: bool,
    #[serde(default)]
    pub serre_s_m: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub poisson_simple: bool,
}

#[derive(Clone, Debug)]
pub struct PoissonPresentation {
    vars: Vec<String>,
    relations: Vec<Polynomial>,
    upper: BTreeMap<(usize, usize), Polynomial>,
    full: Arc<Vec<Polynomial>>,
    flags: Flags,
    gb: Arc<GroebnerBasis>,
}

impl PartialEq for PoissonPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && self.relations == other.relations
            && self.upper == other.upper
            && self.flags == other.flags
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub jacobi_failures: Vec<((usize, usize, usize), Polynomial)>,
    pub closure_failures: Vec<((usize, usize), Polynomial)>,
    pub ok: bool,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Names `d1`, `d2`, ... denote the δ generators in enveloping-algebra expressions.
pub fn is_reserved(s: &str) -> bool {
    s.len() > 1 && s.starts_with('d') && s[1..].chars().all(|c| c.is_ascii_digit())
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    if !taken.iter().any(|t| t == base) {
        return base.to_string();
    }
    (2..).map(|k| format!("{base}_{k}")).find(|c| !taken.contains(c)).unwrap()
}

#[derive(Serialize, Deserialize)]
struct BracketEntry {
    i: String,
    j: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct PresentationFile {
    vars: Vec<String>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    bracket: Vec<BracketEntry>,
    #[serde(default)]
    flags: Flags,
}

impl PoissonPresentation {
    /// Builds a presentation from bracket entries `{x_i, x_j} = value` with `i != j`.
    pub fn new(
        vars: Vec<String>,
        relations: Vec<Polynomial>,
        entries: impl IntoIterator<Item = ((usize, usize), Polynomial)>,
        flags: Flags,
    ) -> Result<Self> {
        let n = vars.len();
        for (k, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Presentation(format!("`{v}` is not a valid variable name")));
            }
            if is_reserved(v) {
                return Err(Error::Presentation(format!("`{v}` is reserved for delta generators")));
            }
            if vars[..k].contains(v) {
                return Err(Error::Presentation(format!("duplicate variable `{v}`")));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.nvars() != n) {
            return Err(Error::AmbientMismatch(r.nvars(), n));
        }
        let mut upper = BTreeMap::new();
        for ((i, j), v) in entries {
            if i >= n || j >= n {
                return Err(Error::VariableIndex { index: i.max(j), nvars: n });
            }
            if v.nvars() != n {
                return Err(Error::AmbientMismatch(v.nvars(), n));
            }
            if i == j {
                if v.is_zero() {
                    continue;
                }
                return Err(Error::Presentation(format!("diagonal bracket entry for `{}`", vars[i])));
            }
            let (key, val) = if i < j { ((i, j), v) } else { ((j, i), -v) };
            if upper.contains_key(&key) {
                return Err(Error::Presentation(format!(
                    "bracket of `{}` and `{}` given twice",
                    vars[key.0], vars[key.1]
                )));
            }
            if !val.is_zero() {
                upper.insert(key, val);
            }
        }
        let mut full = vec![Polynomial::zero(n); n * n];
        for ((i, j), v) in &upper {
            full[i * n + j] = v.clone();
            full[j * n + i] = -v;
        }
        let gb = buchberger(&Ideal::new(n, relations.iter().cloned()), &MonomialOrder::DegRevLex, false)?;
        if gb.is_unit() {
            return Err(Error::Presentation("the relations generate the unit ideal".into()));
        }
        Ok(PoissonPresentation { vars, relations, upper, full: Arc::new(full), flags, gb: Arc::new(gb) })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    pub fn with_flags(&self, flags: Flags) -> Self {
        PoissonPresentation { flags, ..self.clone() }
    }

    /// Primality is asserted by flag, except for the zero ideal where it is automatic.
    pub fn prime_known(&self) -> bool {
        self.flags.prime_ideal || self.relations.is_empty()
    }

    /// `{x_i, x_j}` as stored (not reduced).
    pub fn c(&self, i: usize, j: usize) -> &Polynomial {
        &self.full[i * self.nvars() + j]
    }

    pub fn upper_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Polynomial)> {
        self.upper.iter()
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.nvars(), self.relations.iter().cloned())
    }

    pub fn ideal_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        self.gb.reduce(p)
    }

    pub fn in_ideal(&self, p: &Polynomial) -> bool {
        self.gb.contains(p)
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.nvars(), i)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.nvars())
    }

    pub fn constant(&self, c: Rational) -> Polynomial {
        Polynomial::constant(self.nvars(), c)
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial> {
        parse_polynomial(text, &self.vars)
    }

    pub fn fmt(&self, p: &Polynomial) -> String {
        p.to_string_with(&self.vars)
    }

    /// `Σ ∂_i f · c_ij · ∂_j g` without reduction.
    pub fn bracket_raw(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let n = self.nvars();
        let df: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
        let dg: Vec<Polynomial> = (0..n).map(|j| g.derivative(j)).collect();
        let mut out = self.zero();
        for ((i, j), c) in &self.upper {
            let t = &df[*i] * &dg[*j] - &df[*j] * &dg[*i];
            if !t.is_zero() {
                out = out + &t * c;
            }
        }
        out
    }

    pub fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.reduce(&self.bracket_raw(f, g))
    }

    /// `{x_i, g}` without reduction.
    pub fn bracket_var_raw(&self, i: usize, g: &Polynomial) -> Polynomial {
        let mut out = self.zero();
        for j in 0..self.nvars() {
            let c = self.c(i, j);
            if c.is_zero() {
                continue;
            }
            let d = g.derivative(j);
            if !d.is_zero() {
                out = out + c * &d;
            }
        }
        out
    }

    pub fn pad(&self, a: &Polynomial) -> DerivationVector {
        let n = self.nvars();
        let coeffs = (0..n)
            .map(|j| {
                let mut b = self.zero();
                for i in 0..n {
                    let c = self.c(i, j);
                    if !c.is_zero() {
                        b = b + &a.derivative(i) * c;
                    }
                }
                self.reduce(&b)
            })
            .collect();
        DerivationVector::new(coeffs)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.nvars();
        let mut jacobi_failures = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let s = self.bracket_var_raw(i, self.c(j, k))
                        + self.bracket_var_raw(j, self.c(k, i))
                        + self.bracket_var_raw(k, self.c(i, j));
                    let r = self.reduce(&s);
                    if !r.is_zero() {
                        jacobi_failures.push(((i, j, k), r));
                    }
                }
            }
        }
        let mut closure_failures = Vec::new();
        for i in 0..n {
            for (s, f) in self.relations.iter().enumerate() {
                let r = self.reduce(&self.bracket_var_raw(i, f));
                if !r.is_zero() {
                    closure_failures.push(((i, s), r));
                }
            }
        }
        let ok = jacobi_failures.is_empty() && closure_failures.is_empty();
        ValidationReport { jacobi_failures, closure_failures, ok }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PresentationFile = serde_json::from_str(text).map_err(|e| Error::Io(format!("invalid presentation file: {e}")))?;
        let vars = file.vars;
        let index = |name: &str| {
            vars.iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable { name: name.to_string(), pos: 0 })
        };
        let relations = file.relations.iter().map(|r| parse_polynomial(r, &vars)).collect::<Result<Vec<_>>>()?;
        let entries = file
            .bracket
            .iter()
            .map(|e| Ok(((index(&e.i)?, index(&e.j)?), parse_polynomial(&e.value, &vars)?)))
            .collect::<Result<Vec<_>>>()?;
        PoissonPresentation::new(vars.clone(), relations, entries, file.flags)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = PresentationFile {
            vars: self.vars.clone(),
            relations: self.relations.iter().map(|r| self.fmt(r)).collect(),
            bracket: self
                .upper
                .iter()
                .map(|((i, j), v)| BracketEntry { i: self.vars[*i].clone(), j: self.vars[*j].clone(), value: self.fmt(v) })
                .collect(),
            flags: self.flags.clone(),
        };
        serde_json::to_string_pretty(&file).expect("presentation serializes") + "\n"
    }

    /// Polynomial algebra with the zero bracket.
    pub fn trivial(names: &[&str]) -> Result<Self> {
        let vars = names.iter().map(|s| s.to_string()).collect();
        PoissonPresentation::new(vars, Vec::new(), Vec::new(), Flags::default())
    }

    /// `P_{2k}` with `{y_i, x_j} = δ_ij`; variables `x, y` for k = 1, else `x1..xk, y1..yk`.
    pub fn weyl(k: usize) -> Result<Self> {
        let vars: Vec<String> = if k == 1 {
            vec!["x".into(), "y".into()]
        } else {
            (1..=k).map(|i| format!("x{i}")).chain((1..=k).map(|i| format!("y{i}"))).collect()
        };
        let n = 2 * k;
        let entries = (0..k).map(|i| ((i, k + i), Polynomial::constant(n, rat(-1))));
        PoissonPresentation::new(vars, Vec::new(), entries, Flags::default())
    }

    /// `{x_i, x_j} = Σ_k c[i][j][k] x_k`.
    pub fn lie_poisson(names: &[&str], constants: &[Vec<Vec<Rational>>]) -> Result<Self> {
        let n = names.len();
        let shape_ok = constants.len() == n && constants.iter().all(|row| row.len() == n && row.iter().all(|v| v.len() == n));
        if !shape_ok {
            return Err(Error::Presentation("structure constants must be an n x n x n table".into()));
        }
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if constants[i][j][k] != -constants[j][i][k].clone() {
                        return Err(Error::Presentation(format!(
                            "structure constants are not antisymmetric at ({}, {})",
                            names[i], names[j]
                        )));
                    }
                }
                if i < j {
                    let v = Polynomial::from_terms(
                        n,
                        (0..n).map(|k| (crate::poly::Monomial::var(n, k), constants[i][j][k].clone())),
                    );
                    entries.push(((i, j), v));
                }
            }
        }
        let vars = names.iter().map(|s| s.to_string()).collect();
        PoissonPresentation::new(vars, Vec::new(), entries, Flags::default())
    }

    /// Generalized Weyl Poisson algebra with `X_i Y_i = a_i(H_i)` and `{H_i, ·}` driven by `b_i`.
    pub fn gwpa(a: &[Polynomial], b: &[Polynomial]) -> Result<Self> {
        let k = a.len();
        if b.len() != k || k == 0 {
            return Err(Error::Presentation("gwpa needs one b for each a".into()));
        }
        if let Some(p) = a.iter().chain(b).find(|p| p.nvars() != 1) {
            return Err(Error::AmbientMismatch(p.nvars(), 1));
        }
        if a.iter().any(Polynomial::is_zero) {
            return Err(Error::Presentation("gwpa: a_i must be nonzero".into()));
        }
        let n = 3 * k;
        let vars: Vec<String> = if k == 1 {
            vec!["H".into(), "X".into(), "Y".into()]
        } else {
            ["H", "X", "Y"].iter().flat_map(|s| (1..=k).map(move |i| format!("{s}{i}"))).collect()
        };
        let (h, x, y) = (|i: usize| i, |i: usize| k + i, |i: usize| 2 * k + i);
        let mut relations = Vec::new();
        let mut entries = Vec::new();
        for i in 0..k {
            let mut map = vec![0usize; 1];
            map[0] = h(i);
            let ai = a[i].remap(&map, n);
            let bi = b[i].remap(&map, n);
            let dai = a[i].derivative(0).remap(&map, n);
            let (xi, yi) = (Polynomial::var(n, x(i)), Polynomial::var(n, y(i)));
            relations.push(&xi * &yi - ai);
            entries.push(((y(i), h(i)), &bi * &yi));
            entries.push(((x(i), h(i)), -(&bi * &xi)));
            entries.push(((y(i), x(i)), &bi * &dai));
        }
        let flags = Flags { prime_ideal: true, ..Flags::default() };
        PoissonPresentation::new(vars, relations, entries, flags)
    }

    /// Tensor product; colliding names from `other` get a `_k` suffix, reported as `(old, new)` pairs.
    pub fn tensor_product(&self, other: &Self) -> Result<(Self, Vec<(String, String)>)> {
        let (n1, n2) = (self.nvars(), other.nvars());
        let n = n1 + n2;
        let mut vars = self.vars.clone();
        let mut renamed = Vec::new();
        for v in &other.vars {
            let taken: Vec<String> =
                vars.iter().chain(other.vars.iter().filter(|t| *t != v)).cloned().collect();
            let name = fresh_name(v, &taken);
            if &name != v {
                renamed.push((v.clone(), name.clone()));
            }
            vars.push(name);
        }
        let left: Vec<usize> = (0..n1).collect();
        let right: Vec<usize> = (n1..n).collect();
        let relations = self
            .relations
            .iter()
            .map(|r| r.remap(&left, n))
            .chain(other.relations.iter().map(|r| r.remap(&right, n)))
            .collect();
        let entries: Vec<_> = self
            .upper
            .iter()
            .map(|((i, j), v)| ((*i, *j), v.remap(&left, n)))
            .chain(other.upper.iter().map(|((i, j), v)| ((n1 + i, n1 + j), v.remap(&right, n))))
            .collect();
        let (f1, f2) = (&self.flags, &other.flags);
        let flags = Flags {
            prime_ideal: self.prime_known()
                && other.prime_known()
                && (self.relations.is_empty() || other.relations.is_empty()),
            cohen_macaulay: f1.cohen_macaulay && f2.cohen_macaulay,
            serre_s_m: match (f1.serre_s_m, f2.serre_s_m) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            },
            poisson_simple: false,
        };
        Ok((PoissonPresentation::new(vars, relations, entries, flags)?, renamed))
    }

    pub fn opposite(&self) -> Self {
        let upper: BTreeMap<_, _> = self.upper.iter().map(|(k, v)| (*k, -v)).collect();
        let full = self.full.iter().map(|v| -v).collect();
        PoissonPresentation { upper, full: Arc::new(full), ..self.clone() }
    }

    /// Adjoins `u` with `s·u = 1` and `{u, x_j} = -u²{s, x_j}`.
    pub fn localize(&self, s: &Polynomial) -> Result<Self> {
        if s.nvars() != self.nvars() {
            return Err(Error::AmbientMismatch(s.nvars(), self.nvars()));
        }
        if self.in_ideal(s) {
            return Err(Error::LocalizeAtZero);
        }
        let n = self.nvars();
        let mut vars = self.vars.clone();
        vars.push(fresh_name("u", &self.vars));
        let u = Polynomial::var(n + 1, n);
        let mut relations: Vec<Polynomial> = self.relations.iter().map(|r| r.extend(1)).collect();
        relations.push(&s.extend(1) * &u - Polynomial::one(n + 1));
        let u2 = &u * &u;
        let mut entries: Vec<_> = self.upper.iter().map(|(k, v)| (*k, v.extend(1))).collect();
        for j in 0..n {
            let sx = self.bracket_raw(s, &self.var(j));
            if !sx.is_zero() {
                entries.push(((j, n), &u2 * &sx.extend(1)));
            }
        }
        let staged = PoissonPresentation::new(vars.clone(), relations.clone(), Vec::new(), Flags::default())?;
        let entries: Vec<_> = entries.into_iter().map(|(k, v)| (k, staged.reduce(&v))).collect();
        let flags = Flags { prime_ideal: self.prime_known(), ..self.flags.clone() };
        PoissonPresentation::new(vars, relations, entries, flags)
    }

    /// Adds relations; the enlarged ideal must stay Poisson.
    pub fn quotient(&self, extra: &[Polynomial]) -> Result<Self> {
        let mut relations = self.relations.clone();
        relations.extend(extra.iter().filter(|e| !e.is_zero()).cloned());
        let unchanged = extra.iter().all(|e| self.in_ideal(e));
        let flags = if unchanged { self.flags.clone() } else { Flags::default() };
        let entries: Vec<_> = self.upper.iter().map(|(k, v)| (*k, v.clone())).collect();
        let q = PoissonPresentation::new(self.vars.clone(), relations, entries, flags)?;
        for e in extra {
            for i in 0..self.nvars() {
                if !q.in_ideal(&q.bracket_var_raw(i, e)) {
                    return Err(Error::NotPoissonIdeal { var: self.vars[i].clone(), relation: self.fmt(e) });
                }
            }
        }
        Ok(q)
    }

    /// Whether every `c_ij` lies in the ideal.
    pub fn bracket_trivial(&self) -> bool {
        self.upper.values().all(|v| self.in_ideal(v))
    }

    /// Rational constant as an element of this ring.
    pub fn scalar(&self, q: Rational) -> Polynomial {
        if q.is_zero() {
            self.zero()
        } else {
            self.constant(q)
        }
    }
}
