//! Three-valued criteria verdicts, Gelfand–Kirillov dimensions and the analysis report.

use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::groebner::{contains_one, ideal_height, radical_membership, Ideal};
use crate::pea::Pea;
use crate::presentation::PoissonPresentation;
use crate::structure::{
    derivation_determinants, jacobian_ideal, jacobian_minor_ideal, kappa_generators, minor_ideal, pairing,
    rank_data, IndexTuple, KappaGenerator, RankData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    True,
    False,
    Unknown,
}

impl Value {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Value::True
        } else {
            Value::False
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Value::True => "true",
            Value::False => "false",
            Value::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: Value,
    pub reason: String,
    pub assumptions: Vec<String>,
}

impl Verdict {
    fn new(value: Value, reason: impl Into<String>, assumptions: &[&str]) -> Self {
        Verdict { value, reason: reason.into(), assumptions: assumptions.iter().map(|s| s.to_string()).collect() }
    }

    fn owned(value: Value, reason: impl Into<String>, assumptions: Vec<String>) -> Self {
        Verdict { value, reason: reason.into(), assumptions }
    }

    pub fn is_true(&self) -> bool {
        self.value == Value::True
    }
}

/// A Gelfand–Kirillov dimension, serialized as an integer or `"unknown"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gk {
    Known(usize),
    Unknown,
}

impl Serialize for Gk {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Gk::Known(k) => s.serialize_u64(*k as u64),
            Gk::Unknown => s.serialize_str("unknown"),
        }
    }
}

impl std::fmt::Display for Gk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gk::Known(k) => write!(f, "{k}"),
            Gk::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GkReport {
    #[serde(rename = "gk_A")]
    pub gk_a: Gk,
    #[serde(rename = "gk_U")]
    pub gk_u: Gk,
    #[serde(rename = "gk_PD")]
    pub gk_pd: Gk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub regular: Verdict,
    pub symplectic: Verdict,
    pub u_domain: Verdict,
    pub kernel_zero: Verdict,
    pub u_equals_d: Verdict,
    pub pea_commutative: Verdict,
    pub poisson_simple_necessary: Verdict,
    pub u_simple: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorRecord {
    pub rows: IndexTuple,
    pub cols: IndexTuple,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingFailure {
    pub derivation_rows: IndexTuple,
    pub derivation_cols: IndexTuple,
    pub kappa_i: IndexTuple,
    pub kappa_i_nu: usize,
    pub kappa_j: IndexTuple,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymplecticPaths {
    pub minor_ideal_path: Value,
    pub radical_path: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub jacobian_minors: Vec<MinorRecord>,
    pub structure_minors: Vec<MinorRecord>,
    pub kappa_generators: usize,
    pub failing_pairings: Vec<PairingFailure>,
    pub symplectic_paths: SymplecticPaths,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub vars: Vec<String>,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub d: usize,
    #[serde(rename = "gk_A")]
    pub gk_a: Gk,
    #[serde(rename = "gk_U")]
    pub gk_u: Gk,
    #[serde(rename = "gk_PD")]
    pub gk_pd: Gk,
    pub verdicts: Verdicts,
    pub evidence: Evidence,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub const CRITERIA: [&str; 8] = [
    "regular",
    "symplectic",
    "u_domain",
    "kernel_zero",
    "u_equals_d",
    "pea_commutative",
    "poisson_simple_necessary",
    "u_simple",
];

/// Shared state for all criteria on one presentation; each verdict is computed at most once.
pub struct Analyzer {
    p: PoissonPresentation,
    rank: RankData,
    pea: Pea,
    kappa: OnceLock<Vec<KappaGenerator>>,
    regular: OnceLock<Result<Verdict>>,
    symplectic: OnceLock<Result<(Verdict, SymplecticPaths)>>,
    u_domain: OnceLock<Result<Verdict>>,
    kernel: OnceLock<Result<(Verdict, Vec<PairingFailure>)>>,
    u_equals_d: OnceLock<Result<Verdict>>,
    commutative: OnceLock<Result<Verdict>>,
    screen: OnceLock<Result<Verdict>>,
}

fn prime_assumption(p: &PoissonPresentation) -> Vec<&'static str> {
    if p.relations().is_empty() {
        vec![]
    } else {
        vec!["prime_ideal"]
    }
}

fn cached<T: Clone>(cell: &OnceLock<Result<T>>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    cell.get_or_init(f).clone()
}

impl Analyzer {
    pub fn new(p: &PoissonPresentation) -> Result<Self> {
        Ok(Analyzer {
            rank: rank_data(p)?,
            pea: Pea::new(p),
            p: p.clone(),
            kappa: OnceLock::new(),
            regular: OnceLock::new(),
            symplectic: OnceLock::new(),
            u_domain: OnceLock::new(),
            kernel: OnceLock::new(),
            u_equals_d: OnceLock::new(),
            commutative: OnceLock::new(),
            screen: OnceLock::new(),
        })
    }

    pub fn presentation(&self) -> &PoissonPresentation {
        &self.p
    }

    pub fn rank(&self) -> &RankData {
        &self.rank
    }

    pub fn pea(&self) -> &Pea {
        &self.pea
    }

    pub fn kappa(&self) -> &[KappaGenerator] {
        self.kappa.get_or_init(|| kappa_generators(&self.p, &self.rank))
    }

    fn n_minus_r(&self) -> usize {
        self.rank.n - self.rank.r
    }

    pub fn check(&self, name: &str) -> Option<Result<Verdict>> {
        Some(match name {
            "regular" => self.regular(),
            "symplectic" => self.symplectic(),
            "u_domain" => self.u_domain(),
            "kernel_zero" => self.kernel_zero(),
            "u_equals_d" => self.u_equals_d(),
            "pea_commutative" => self.pea_commutative(),
            "poisson_simple_necessary" => self.poisson_simple_necessary(),
            "u_simple" => self.u_simple(),
            _ => return None,
        })
    }

    pub fn regular(&self) -> Result<Verdict> {
        cached(&self.regular, || {
            if !self.p.prime_known() {
                return Ok(Verdict::new(Value::Unknown, "prime_ideal not asserted; the Jacobian criterion needs a domain", &[]));
            }
            let one = contains_one(&jacobian_ideal(&self.p, &self.rank))?;
            let reason = if one {
                format!("Jacobian criterion: the {r}x{r} Jacobian minors generate the unit ideal", r = self.rank.r)
            } else {
                format!("Jacobian criterion: the {r}x{r} Jacobian minors generate a proper ideal", r = self.rank.r)
            };
            Ok(Verdict::new(Value::from_bool(one), reason, &prime_assumption(&self.p)))
        })
    }

    /// Gate shared by the criteria that assume a regular domain.
    fn regular_gate(&self) -> Result<Option<Verdict>> {
        let reg = self.regular()?;
        Ok(match reg.value {
            Value::True => None,
            Value::False => Some(Verdict::new(Value::Unknown, "hypothesis fails: A is not regular", &prime_assumption(&self.p))),
            Value::Unknown => Some(Verdict::new(Value::Unknown, format!("regularity undecided: {}", reg.reason), &[])),
        })
    }

    fn symplectic_full(&self) -> Result<(Verdict, SymplecticPaths)> {
        cached(&self.symplectic, || {
            if let Some(v) = self.regular_gate()? {
                let paths = SymplecticPaths { minor_ideal_path: Value::Unknown, radical_path: Value::Unknown };
                return Ok((v, paths));
            }
            let (d, nr) = (self.rank.d, self.n_minus_r());
            let path2 = d == nr && contains_one(&minor_ideal(&self.p, d))?;
            let c = minor_ideal(&self.p, nr);
            let mut path4 = true;
            for minor in &self.rank.jacobian_minors {
                if !radical_membership(&minor.value, &c)? {
                    path4 = false;
                    break;
                }
            }
            let paths = SymplecticPaths { minor_ideal_path: Value::from_bool(path2), radical_path: Value::from_bool(path4) };
            let mut assumptions = prime_assumption(&self.p);
            assumptions.push("regularity");
            let verdict = if path2 != path4 {
                Verdict::new(Value::Unknown, "the minor-ideal and radical characterizations disagree", &assumptions)
            } else if path2 {
                Verdict::new(Value::True, format!("d = n - r = {d} and the {d}x{d} bracket minors generate the unit ideal"), &assumptions)
            } else if d != nr {
                Verdict::new(Value::False, format!("d = {d} differs from n - r = {nr}"), &assumptions)
            } else {
                Verdict::new(Value::False, format!("the {d}x{d} bracket minors generate a proper ideal"), &assumptions)
            };
            Ok((verdict, paths))
        })
    }

    pub fn symplectic(&self) -> Result<Verdict> {
        Ok(self.symplectic_full()?.0)
    }

    pub fn symplectic_paths(&self) -> Result<SymplecticPaths> {
        Ok(self.symplectic_full()?.1)
    }

    pub fn u_domain(&self) -> Result<Verdict> {
        cached(&self.u_domain, || {
            if !self.p.prime_known() {
                return Ok(Verdict::new(Value::Unknown, "prime_ideal not asserted", &[]));
            }
            let reg = self.regular()?;
            if reg.is_true() {
                return Ok(Verdict::new(Value::True, "A is a regular domain", &prime_assumption(&self.p)));
            }
            let flags = self.p.flags();
            if !flags.cohen_macaulay {
                return Ok(Verdict::new(
                    Value::Unknown,
                    "A is not regular and cohen_macaulay is not asserted, so the grade condition cannot be evaluated",
                    &[],
                ));
            }
            let m = self.rank.m;
            let base = Ideal::new(self.p.nvars(), self.p.relations().to_vec());
            for t in 1..=m {
                let h = ideal_height(&jacobian_minor_ideal(&self.p, t), &base)?;
                if !h.at_least((m + 2 - t) as i64) {
                    return Ok(Verdict::new(
                        Value::Unknown,
                        format!("height of the {t}x{t} Jacobian minor ideal is below {}", m + 2 - t),
                        &["prime_ideal", "cohen_macaulay"],
                    ));
                }
            }
            let mut assumptions = vec!["prime_ideal", "cohen_macaulay"];
            if flags.serre_s_m.is_some() {
                assumptions.push("serre_s_m");
            }
            Ok(Verdict::new(
                Value::True,
                "grade condition on the Jacobian minor ideals holds, with grade read as height",
                &assumptions,
            ))
        })
    }

    fn kernel_full(&self) -> Result<(Verdict, Vec<PairingFailure>)> {
        cached(&self.kernel, || {
            if !self.p.prime_known() {
                return Ok((Verdict::new(Value::Unknown, "prime_ideal not asserted", &[]), vec![]));
            }
            let reg = self.regular()?;
            let mut assumptions: Vec<String> = prime_assumption(&self.p).iter().map(|s| s.to_string()).collect();
            match reg.value {
                Value::True => assumptions.push("regularity".into()),
                Value::Unknown => {
                    return Ok((Verdict::new(Value::Unknown, format!("regularity undecided: {}", reg.reason), &[]), vec![]))
                }
                Value::False => {
                    let dom = self.u_domain()?;
                    if !dom.is_true() {
                        let why = format!("A is not regular and U(A) is not known to be a domain: {}", dom.reason);
                        return Ok((Verdict::new(Value::Unknown, why, &[]), vec![]));
                    }
                    assumptions = dom.assumptions.clone();
                }
            }
            let (d, nr) = (self.rank.d, self.n_minus_r());
            if d != nr {
                return Ok((Verdict::owned(Value::False, format!("d = {d} differs from n - r = {nr}"), assumptions), vec![]));
            }
            let ders = derivation_determinants(&self.p, &self.rank);
            let mut failures = Vec::new();
            for g in self.kappa() {
                for der in &ders {
                    let v = pairing(&self.p, &der.vector, &g.omega);
                    if !v.is_zero() {
                        failures.push(PairingFailure {
                            derivation_rows: der.rows.clone(),
                            derivation_cols: der.cols.clone(),
                            kappa_i: g.i.clone(),
                            kappa_i_nu: g.i_nu + 1,
                            kappa_j: g.j.clone(),
                            value: self.p.fmt(&v),
                        });
                    }
                }
            }
            let verdict = if failures.is_empty() {
                let why = format!(
                    "d = n - r = {d} and all {} pairings of derivation generators with {} kappa generators vanish",
                    ders.len() * self.kappa().len(),
                    self.kappa().len()
                );
                Verdict::owned(Value::True, why, assumptions)
            } else {
                Verdict::owned(Value::False, format!("{} pairings do not vanish", failures.len()), assumptions)
            };
            Ok((verdict, failures))
        })
    }

    pub fn kernel_zero(&self) -> Result<Verdict> {
        Ok(self.kernel_full()?.0)
    }

    pub fn failing_pairings(&self) -> Result<Vec<PairingFailure>> {
        Ok(self.kernel_full()?.1)
    }

    pub fn u_equals_d(&self) -> Result<Verdict> {
        cached(&self.u_equals_d, || {
            if let Some(v) = self.regular_gate()? {
                return Ok(v);
            }
            let mut assumptions = prime_assumption(&self.p);
            assumptions.push("regularity");
            for g in self.kappa() {
                if !self.pea.omega_is_zero(&g.omega)? {
                    let why = format!("kappa generator ({}, {}, {}) is not in the module generated by the df_s", g.i, g.i_nu + 1, g.j);
                    return Ok(Verdict::new(Value::False, why, &assumptions));
                }
            }
            let d = self.rank.d;
            if !contains_one(&minor_ideal(&self.p, d))? {
                return Ok(Verdict::new(Value::False, format!("the {d}x{d} bracket minors generate a proper ideal"), &assumptions));
            }
            Ok(Verdict::new(
                Value::True,
                format!("kappa lies in the module generated by the df_s and the {d}x{d} bracket minors generate the unit ideal"),
                &assumptions,
            ))
        })
    }

    pub fn pea_commutative(&self) -> Result<Verdict> {
        cached(&self.commutative, || {
            let n = self.p.nvars();
            let table_zero = (0..n).all(|i| (i + 1..n).all(|j| self.p.in_ideal(self.p.c(i, j))));
            let e = &self.pea;
            let mut gens: Vec<_> = (0..n).map(|i| e.x(i)).collect();
            gens.extend((0..n).map(|i| e.d(i)));
            let mut commute = true;
            'outer: for a in 0..gens.len() {
                for b in a + 1..gens.len() {
                    if !e.is_zero(&e.commutator(&gens[a], &gens[b])?)? {
                        commute = false;
                        break 'outer;
                    }
                }
            }
            if commute != table_zero {
                return Ok(Verdict::new(Value::Unknown, "bracket table and generator commutators disagree", &[]));
            }
            let why = if table_zero {
                "the bracket table vanishes modulo I and all generators of U(A) commute"
            } else {
                "some bracket {x_i, x_j} is nonzero in A, so the generators of U(A) do not commute"
            };
            Ok(Verdict::new(Value::from_bool(table_zero), why, &[]))
        })
    }

    pub fn poisson_simple_necessary(&self) -> Result<Verdict> {
        cached(&self.screen, || {
            let n = self.p.nvars();
            if self.p.bracket_trivial() {
                if n == 0 {
                    return Ok(Verdict::new(Value::Unknown, "screen passed: A is the ground field", &[]));
                }
                let dim = self.p.ideal_basis().dimension()?;
                return Ok(if dim >= 1 {
                    Verdict::new(Value::False, "the bracket is trivial and A is not a field", &[])
                } else {
                    Verdict::new(Value::Unknown, "the bracket is trivial and A is Artinian; field test not performed", &[])
                });
            }
            if contains_one(&minor_ideal(&self.p, 1))? {
                Ok(Verdict::new(Value::Unknown, "screen passed: the bracket ideal is the unit ideal", &[]))
            } else {
                Ok(Verdict::new(Value::False, "the ideal generated by the brackets is a proper nonzero Poisson ideal", &[]))
            }
        })
    }

    /// Simplicity of `U(A)` as the conjunction of the screen, `ker π = 0` and the user's `poisson_simple` flag.
    pub fn u_simple(&self) -> Result<Verdict> {
        let screen = self.poisson_simple_necessary()?;
        if screen.value == Value::False {
            return Ok(Verdict::new(Value::False, format!("A is not Poisson simple: {}", screen.reason), &[]));
        }
        let kernel = self.kernel_zero()?;
        if kernel.value == Value::False {
            return Ok(Verdict::new(Value::False, "ker(pi) is a nonzero proper ideal of U(A)", &[]));
        }
        if !self.p.flags().poisson_simple {
            return Ok(Verdict::new(Value::Unknown, "poisson_simple not asserted", &[]));
        }
        if kernel.value == Value::Unknown {
            return Ok(Verdict::new(Value::Unknown, format!("kernel criterion undecided: {}", kernel.reason), &[]));
        }
        let mut assumptions = kernel.assumptions.clone();
        assumptions.push("poisson_simple".into());
        Ok(Verdict::owned(Value::True, "A is asserted Poisson simple and ker(pi) = 0", assumptions))
    }

    pub fn gk(&self) -> GkReport {
        if !self.p.prime_known() {
            return GkReport { gk_a: Gk::Unknown, gk_u: Gk::Unknown, gk_pd: Gk::Unknown };
        }
        let nr = self.n_minus_r();
        GkReport { gk_a: Gk::Known(nr), gk_u: Gk::Known(2 * nr), gk_pd: Gk::Known(nr + self.rank.d) }
    }

    pub fn verdicts(&self) -> Result<Verdicts> {
        Ok(Verdicts {
            regular: self.regular()?,
            symplectic: self.symplectic()?,
            u_domain: self.u_domain()?,
            kernel_zero: self.kernel_zero()?,
            u_equals_d: self.u_equals_d()?,
            pea_commutative: self.pea_commutative()?,
            poisson_simple_necessary: self.poisson_simple_necessary()?,
            u_simple: self.u_simple()?,
        })
    }

    pub fn report(&self) -> Result<AnalysisReport> {
        let verdicts = self.verdicts()?;
        let gk = self.gk();
        let record = |m: &crate::structure::Minor| MinorRecord {
            rows: m.rows.clone(),
            cols: m.cols.clone(),
            value: self.p.fmt(&m.value),
        };
        let evidence = Evidence {
            jacobian_minors: self.rank.jacobian_minors.iter().map(record).collect(),
            structure_minors: self.rank.structure_minors.iter().map(record).collect(),
            kappa_generators: self.kappa().len(),
            failing_pairings: self.failing_pairings()?,
            symplectic_paths: self.symplectic_paths()?,
        };
        Ok(AnalysisReport {
            vars: self.p.vars().to_vec(),
            n: self.rank.n,
            m: self.rank.m,
            r: self.rank.r,
            d: self.rank.d,
            gk_a: gk.gk_a,
            gk_u: gk.gk_u,
            gk_pd: gk.gk_pd,
            verdicts,
            evidence,
        })
    }
}

pub fn analyze(p: &PoissonPresentation) -> Result<AnalysisReport> {
    Analyzer::new(p)?.report()
}

pub fn check_regular(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.regular()
}

pub fn check_symplectic(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.symplectic()
}

pub fn check_u_domain(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.u_domain()
}

pub fn check_kernel_zero(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.kernel_zero()
}

pub fn check_u_equals_d(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.u_equals_d()
}

pub fn poisson_simplicity_necessary(p: &PoissonPresentation) -> Result<Verdict> {
    Analyzer::new(p)?.poisson_simple_necessary()
}

pub fn gk_report(p: &PoissonPresentation) -> Result<GkReport> {
    Ok(Analyzer::new(p)?.gk())
}
