//! Jacobian and bracket-matrix ranks, determinantal ideals, derivation and κ generators.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groebner::{contains_one, Ideal};
use crate::poly::{MinorCache, PolyMatrix, Polynomial};
use crate::presentation::PoissonPresentation;

pub const MAX_VARS: usize = 12;

/// Strictly increasing index list, stored 0-based and shown 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(pub Vec<usize>);

impl IndexTuple {
    pub fn empty() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.contains(&k)
    }

    pub fn without(&self, pos: usize) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(p, _)| *p != pos).map(|(_, v)| *v).collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.one_based().iter().join(","))
    }
}

impl Serialize for IndexTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

/// `Σ b_j ∂_j` as a derivation of the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationVector {
    coeffs: Vec<Polynomial>,
}

impl DerivationVector {
    pub fn new(coeffs: Vec<Polynomial>) -> Self {
        DerivationVector { coeffs }
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn apply(&self, p: &PoissonPresentation, f: &Polynomial) -> Polynomial {
        let mut out = p.zero();
        for (j, b) in self.coeffs.iter().enumerate() {
            if !b.is_zero() {
                out = out + b * &f.derivative(j);
            }
        }
        p.reduce(&out)
    }

    /// Whether every relation is sent into the ideal.
    pub fn well_defined(&self, p: &PoissonPresentation) -> bool {
        p.relations().iter().all(|f| self.apply(p, f).is_zero())
    }

    pub fn is_zero_mod(&self, p: &PoissonPresentation) -> bool {
        self.coeffs.iter().all(|c| p.in_ideal(c))
    }

    pub fn scale(&self, c: &Polynomial) -> Self {
        DerivationVector::new(self.coeffs.iter().map(|b| b * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        DerivationVector::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        DerivationVector::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }
}

/// `Σ b_i dx_i`, equal to another when the difference lies in `I·Ω + Σ A df_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaElement {
    coeffs: Vec<Polynomial>,
}

impl OmegaElement {
    pub fn new(coeffs: Vec<Polynomial>) -> Self {
        OmegaElement { coeffs }
    }

    pub fn dx(n: usize, i: usize) -> Self {
        let mut coeffs = vec![Polynomial::zero(n); n];
        coeffs[i] = Polynomial::one(n);
        OmegaElement { coeffs }
    }

    pub fn differential(f: &Polynomial) -> Self {
        OmegaElement::new((0..f.nvars()).map(|i| f.derivative(i)).collect())
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Polynomial) -> Self {
        OmegaElement::new(self.coeffs.iter().map(|b| b * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        OmegaElement::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        OmegaElement::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn reduce(&self, p: &PoissonPresentation) -> Self {
        OmegaElement::new(self.coeffs.iter().map(|c| p.reduce(c)).collect())
    }

    pub fn is_syntactically_zero(&self, p: &PoissonPresentation) -> bool {
        self.coeffs.iter().all(|c| p.in_ideal(c))
    }
}

pub fn pairing(p: &PoissonPresentation, d: &DerivationVector, w: &OmegaElement) -> Polynomial {
    let mut out = p.zero();
    for (a, b) in d.coeffs.iter().zip(&w.coeffs) {
        if !a.is_zero() && !b.is_zero() {
            out = out + a * b;
        }
    }
    p.reduce(&out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minor {
    pub rows: IndexTuple,
    pub cols: IndexTuple,
    #[serde(skip)]
    pub value: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankData {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub d: usize,
    pub nonsingular_rows: Vec<IndexTuple>,
    pub nonsingular_cols: Vec<IndexTuple>,
    pub structure_tuples: Vec<IndexTuple>,
    pub jacobian_minors: Vec<Minor>,
    pub structure_minors: Vec<Minor>,
}

impl RankData {
    pub fn critical_cols(&self) -> Vec<IndexTuple> {
        let base: BTreeSet<&IndexTuple> = self.nonsingular_cols.iter().collect();
        (0..self.n)
            .combinations(self.r + 1)
            .map(IndexTuple)
            .filter(|t| (0..t.len()).any(|p| base.contains(&IndexTuple(t.without(p)))))
            .collect()
    }
}

pub fn jacobian_matrix(p: &PoissonPresentation) -> PolyMatrix {
    let n = p.nvars();
    let entries = p.relations().iter().flat_map(|f| (0..n).map(|j| p.reduce(&f.derivative(j)))).collect();
    PolyMatrix::new(p.relations().len(), n, entries)
}

pub fn structure_matrix(p: &PoissonPresentation) -> PolyMatrix {
    let n = p.nvars();
    let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| p.reduce(p.c(i, j))).collect();
    PolyMatrix::new(n, n, entries)
}

pub(crate) fn minor_cache(p: &PoissonPresentation, m: PolyMatrix) -> MinorCache<impl Fn(Polynomial) -> Polynomial + '_> {
    let n = p.nvars();
    MinorCache::new(m, n, move |q| p.reduce(&q))
}

fn rank_search<F: Fn(Polynomial) -> Polynomial>(cache: &mut MinorCache<F>, nvars: usize) -> (usize, Vec<Minor>) {
    let (rows, cols) = (cache.matrix().rows(), cache.matrix().cols());
    for t in (1..=rows.min(cols)).rev() {
        let mut found = Vec::new();
        for rs in (0..rows).combinations(t) {
            for cs in (0..cols).combinations(t) {
                let v = cache.minor(&rs, &cs);
                if !v.is_zero() {
                    found.push(Minor { rows: IndexTuple(rs.clone()), cols: IndexTuple(cs), value: v });
                }
            }
        }
        if !found.is_empty() {
            return (t, found);
        }
    }
    let unit = Minor { rows: IndexTuple::empty(), cols: IndexTuple::empty(), value: Polynomial::one(nvars) };
    (0, vec![unit])
}

fn tuples<'a>(it: impl Iterator<Item = &'a IndexTuple>) -> Vec<IndexTuple> {
    it.cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

pub fn rank_data(p: &PoissonPresentation) -> Result<RankData> {
    let n = p.nvars();
    if n > MAX_VARS {
        return Err(Error::Capacity(format!("rank search supports at most {MAX_VARS} variables")));
    }
    if p.relations().len() > 64 {
        return Err(Error::Capacity("rank search supports at most 64 relations".into()));
    }
    let (r, jacobian_minors) = rank_search(&mut minor_cache(p, jacobian_matrix(p)), n);
    let (d, structure_minors) = rank_search(&mut minor_cache(p, structure_matrix(p)), n);
    Ok(RankData {
        n,
        m: p.relations().len(),
        r,
        d,
        nonsingular_rows: tuples(jacobian_minors.iter().map(|m| &m.rows)),
        nonsingular_cols: tuples(jacobian_minors.iter().map(|m| &m.cols)),
        structure_tuples: tuples(structure_minors.iter().flat_map(|m| [&m.rows, &m.cols])),
        jacobian_minors,
        structure_minors,
    })
}

/// All `s x s` minors of the bracket matrix together with the relations; `s = 0` gives the unit ideal.
pub fn minor_ideal(p: &PoissonPresentation, s: usize) -> Ideal {
    let n = p.nvars();
    if s == 0 {
        return Ideal::unit(n);
    }
    let mut cache = minor_cache(p, structure_matrix(p));
    let mut gens = p.relations().to_vec();
    for rs in (0..n).combinations(s) {
        for cs in (0..n).combinations(s) {
            gens.push(cache.minor(&rs, &cs));
        }
    }
    Ideal::new(n, gens)
}

/// All `t x t` minors of the Jacobian together with the relations; `t = 0` gives the unit ideal.
pub fn jacobian_minor_ideal(p: &PoissonPresentation, t: usize) -> Ideal {
    let n = p.nvars();
    if t == 0 {
        return Ideal::unit(n);
    }
    let m = p.relations().len();
    let mut cache = minor_cache(p, jacobian_matrix(p));
    let mut gens = p.relations().to_vec();
    if t <= m.min(n) {
        for rs in (0..m).combinations(t) {
            for cs in (0..n).combinations(t) {
                gens.push(cache.minor(&rs, &cs));
            }
        }
    }
    Ideal::new(n, gens)
}

pub fn jacobian_ideal(p: &PoissonPresentation, rank: &RankData) -> Ideal {
    let mut gens = p.relations().to_vec();
    gens.extend(rank.jacobian_minors.iter().map(|m| m.value.clone()));
    Ideal::new(p.nvars(), gens)
}

/// Maximal minors of the bracket matrix restricted to the columns outside `j`.
pub fn column_complement_ideal(p: &PoissonPresentation, j: &IndexTuple) -> Ideal {
    let n = p.nvars();
    let keep: Vec<usize> = (0..n).filter(|k| !j.contains(*k)).collect();
    let mut cache = minor_cache(p, structure_matrix(p));
    let mut gens = p.relations().to_vec();
    if keep.is_empty() {
        gens.push(Polynomial::one(n));
    }
    for rs in (0..n).combinations(keep.len()) {
        gens.push(cache.minor(&rs, &keep));
    }
    Ideal::new(n, gens)
}

/// Whether the Jacobian ideal is the unit ideal; needs the prime assertion.
pub fn ensure_regular(p: &PoissonPresentation, rank: &RankData) -> Result<()> {
    if !p.prime_known() {
        return Err(Error::NotRegular("prime_ideal flag not set".into()));
    }
    if !contains_one(&jacobian_ideal(p, rank))? {
        return Err(Error::NotRegular("the Jacobian ideal is proper".into()));
    }
    Ok(())
}

/// Expands the determinant with rows `rows` of the Jacobian, columns `cols` in the given order,
/// and last row `(∂_{cols[0]}, ..., ∂_{cols[r]})`, along that last row.
fn derivation_determinant<F: Fn(Polynomial) -> Polynomial>(
    cache: &mut MinorCache<F>,
    n: usize,
    rows: &[usize],
    cols: &[usize],
) -> DerivationVector {
    let r = rows.len();
    assert_eq!(cols.len(), r + 1);
    let mut coeffs = vec![Polynomial::zero(n); n];
    for nu in 0..=r {
        let rest: Vec<usize> = cols.iter().enumerate().filter(|(k, _)| *k != nu).map(|(_, c)| *c).collect();
        let m = cache.minor(rows, &rest);
        let term = if (r + nu) % 2 == 0 { m } else { -m };
        coeffs[cols[nu]] = &coeffs[cols[nu]] + &term;
    }
    DerivationVector::new(coeffs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationGenerator {
    pub rows: IndexTuple,
    pub cols: IndexTuple,
    pub vector: DerivationVector,
}

/// Generators `∂_{i,j}` of the derivation module for `i ∈ 𝕀_r` and critical `j`.
pub fn derivation_generators(p: &PoissonPresentation, rank: &RankData) -> Result<Vec<DerivationGenerator>> {
    ensure_regular(p, rank)?;
    Ok(derivation_determinants(p, rank))
}

/// The same determinants without the regularity check; they are derivations of `A` whenever `r` is the rank.
pub fn derivation_determinants(p: &PoissonPresentation, rank: &RankData) -> Vec<DerivationGenerator> {
    let n = p.nvars();
    let mut cache = minor_cache(p, jacobian_matrix(p));
    let mut out = Vec::new();
    for i in &rank.nonsingular_rows {
        for j in rank.critical_cols() {
            let vector = derivation_determinant(&mut cache, n, &i.0, &j.0);
            out.push(DerivationGenerator { rows: i.clone(), cols: j, vector });
        }
    }
    out
}

/// `∂_{i;j,k}`: columns `j` followed by `k`.
pub fn derivation_with_last(p: &PoissonPresentation, i: &IndexTuple, j: &IndexTuple, k: usize) -> DerivationVector {
    let mut cache = minor_cache(p, jacobian_matrix(p));
    let mut cols = j.0.clone();
    cols.push(k);
    derivation_determinant(&mut cache, p.nvars(), &i.0, &cols)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerelFailure {
    pub i: IndexTuple,
    pub i2: IndexTuple,
    pub j: IndexTuple,
    pub j2: IndexTuple,
}

/// Checks `Δ(i,j)∂_{i',j'} = Σ_l (-1)^{r+1+ν_l} Δ(i'; j' minus j'_{ν_l}) ∂_{i;j,j'_{ν_l}}`,
/// the sum over the entries of `j'` outside `j`; returns the quadruples where it fails.
pub fn derel_failures(p: &PoissonPresentation, rank: &RankData) -> Result<(usize, Vec<DerelFailure>)> {
    ensure_regular(p, rank)?;
    let n = p.nvars();
    let r = rank.r;
    let mut cache = minor_cache(p, jacobian_matrix(p));
    let critical = rank.critical_cols();
    let mut checked = 0;
    let mut failures = Vec::new();
    for i in &rank.nonsingular_rows {
        for i2 in &rank.nonsingular_rows {
            for j in &rank.nonsingular_cols {
                for j2 in &critical {
                    checked += 1;
                    let delta = cache.minor(&i.0, &j.0);
                    let lhs = derivation_determinant(&mut cache, n, &i2.0, &j2.0).scale(&delta);
                    let mut rhs = DerivationVector::new(vec![p.zero(); n]);
                    for (nu, &k) in j2.0.iter().enumerate() {
                        if j.contains(k) {
                            continue;
                        }
                        let minor = cache.minor(&i2.0, &j2.without(nu));
                        let coef = if (r + nu) % 2 == 0 { minor } else { -minor };
                        let mut cols = j.0.clone();
                        cols.push(k);
                        let d = derivation_determinant(&mut cache, n, &i.0, &cols);
                        rhs = rhs.add(&d.scale(&coef));
                    }
                    if !lhs.sub(&rhs).is_zero_mod(p) {
                        failures.push(DerelFailure { i: i.clone(), i2: i2.clone(), j: j.clone(), j2: j2.clone() });
                    }
                }
            }
        }
    }
    Ok((checked, failures))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaGenerator {
    pub i: IndexTuple,
    pub i_nu: usize,
    pub j: IndexTuple,
    pub omega: OmegaElement,
}

fn kappa_element<F: Fn(Polynomial) -> Polynomial>(
    cache: &mut MinorCache<F>,
    n: usize,
    i: &IndexTuple,
    i_nu: usize,
    j: &IndexTuple,
) -> OmegaElement {
    let d = i.len();
    let mut coeffs = vec![Polynomial::zero(n); n];
    coeffs[i_nu] = cache.minor(&i.0, &j.0);
    for s in 0..d {
        let mut rows = i.without(s);
        rows.push(i_nu);
        let m = cache.minor(&rows, &j.0);
        let term = if (s + d) % 2 == 0 { m } else { -m };
        coeffs[i.0[s]] = &coeffs[i.0[s]] + &term;
    }
    OmegaElement::new(coeffs)
}

/// `δ_{i,iν;j}` for `i, j ∈ 𝕀_A(d)` and `iν` outside `i`.
pub fn kappa_generators(p: &PoissonPresentation, rank: &RankData) -> Vec<KappaGenerator> {
    let n = p.nvars();
    let mut cache = minor_cache(p, structure_matrix(p));
    let mut out = Vec::new();
    for i in &rank.structure_tuples {
        for j in &rank.structure_tuples {
            for i_nu in (0..n).filter(|k| !i.contains(*k)) {
                let omega = kappa_element(&mut cache, n, i, i_nu, j);
                out.push(KappaGenerator { i: i.clone(), i_nu, j: j.clone(), omega });
            }
        }
    }
    out
}

/// The dual element `δ'_{i;j,jν}`: rows `i` over columns `(j, jν)` with last row `-δ`.
pub fn kappa_dual(p: &PoissonPresentation, i: &IndexTuple, j: &IndexTuple, j_nu: usize) -> OmegaElement {
    let n = p.nvars();
    let d = j.len();
    let mut cache = minor_cache(p, structure_matrix(p));
    let mut coeffs = vec![Polynomial::zero(n); n];
    coeffs[j_nu] = -cache.minor(&i.0, &j.0);
    for s in 0..d {
        let mut cols = j.without(s);
        cols.push(j_nu);
        let m = cache.minor(&i.0, &cols);
        let term = if (s + d) % 2 == 0 { m } else { -m };
        coeffs[j.0[s]] = &coeffs[j.0[s]] - &term;
    }
    OmegaElement::new(coeffs)
}
