use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pea_core::criteria::{Analyzer, CRITERIA};
use pea_core::groebner::{limits, set_limits};
use pea_core::pea::{Pea, Rewrite};
use pea_core::presentation::PoissonPresentation;
use pea_core::Error;

#[derive(Parser)]
#[command(name = "pea", version, about = "Poisson algebras and their enveloping algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Treat the defining ideal as prime.
    #[arg(long, global = true)]
    assume_prime: bool,
    /// Treat the algebra as Cohen-Macaulay.
    #[arg(long, global = true)]
    assume_cohen_macaulay: bool,
    /// Treat the algebra as satisfying Serre's condition S_m.
    #[arg(long, global = true, value_name = "M")]
    assume_serre: Option<u32>,
    /// Reduce coefficients only once per product.
    #[arg(long, global = true)]
    lazy_rewrite: bool,
    /// Abort Groebner computations past this degree.
    #[arg(long, global = true, value_name = "K")]
    max_degree: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Jacobi identity and that the relations generate a Poisson ideal.
    Validate { file: PathBuf },
    /// Ranks, verdicts and GK dimensions.
    Analyze { file: PathBuf },
    /// Bracket of two polynomials.
    Bracket {
        file: PathBuf,
        #[arg(short = 'e', num_args = 1, required = true)]
        exprs: Vec<String>,
    },
    /// Product of enveloping-algebra elements, left to right.
    PeaMul {
        file: PathBuf,
        #[arg(short = 'e', num_args = 1, required = true)]
        exprs: Vec<String>,
    },
    /// Action of an enveloping-algebra element on a polynomial.
    PeaAct {
        file: PathBuf,
        #[arg(short = 'e')]
        expr: String,
        #[arg(long)]
        on: String,
    },
    /// Whether an enveloping-algebra element is zero.
    PeaZero {
        file: PathBuf,
        #[arg(short = 'e')]
        expr: String,
    },
    /// A single criterion verdict.
    Check {
        file: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CRITERIA))]
        criterion: String,
    },
    /// Gelfand-Kirillov dimensions.
    Gk { file: PathBuf },
}

enum Failure {
    Validation(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) => 3,
        Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::VariableIndex { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

fn load(file: &PathBuf, opts: &Opts) -> Result<PoissonPresentation, Failure> {
    let p = PoissonPresentation::load(file)?;
    let mut flags = p.flags().clone();
    flags.prime_ideal |= opts.assume_prime;
    flags.cohen_macaulay |= opts.assume_cohen_macaulay;
    if opts.assume_serre.is_some() {
        flags.serre_s_m = opts.assume_serre;
    }
    Ok(p.with_flags(flags))
}

fn engine(p: &PoissonPresentation, opts: &Opts) -> Pea {
    Pea::with_mode(p, if opts.lazy_rewrite { Rewrite::Lazy } else { Rewrite::Eager })
}

fn json(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json")
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let opts = &cli.opts;
    if let Some(k) = opts.max_degree {
        set_limits(pea_core::groebner::Limits { max_degree: k, ..limits() });
    }
    match &cli.command {
        Command::Validate { file } => {
            let p = load(file, opts)?;
            let rep = p.validate();
            let mut problems = Vec::new();
            for ((i, j, k), v) in &rep.jacobi_failures {
                let vars = p.vars();
                problems.push(format!("Jacobi fails on ({}, {}, {}): {}", vars[*i], vars[*j], vars[*k], p.fmt(v)));
            }
            for ((x, s), v) in &rep.closure_failures {
                problems.push(format!("{{{}, relation {}}} = {} is not in the ideal", p.vars()[*x], s + 1, p.fmt(v)));
            }
            if opts.json {
                let out = json(serde_json::json!({ "ok": rep.ok, "problems": problems }));
                if rep.ok {
                    return Ok(out);
                }
                println!("{out}");
                return Err(Failure::Validation(problems.join("\n")));
            }
            if rep.ok {
                Ok("ok".into())
            } else {
                Err(Failure::Validation(problems.join("\n")))
            }
        }
        Command::Analyze { file } => {
            let p = load(file, opts)?;
            let report = Analyzer::new(&p)?.report()?;
            if opts.json {
                return Ok(report.to_json().trim_end().to_string());
            }
            let mut out = vec![
                format!("variables: {}", report.vars.join(", ")),
                format!("n = {}, m = {}, r = {}, d = {}", report.n, report.m, report.r, report.d),
                format!("gk_A = {}, gk_U = {}, gk_PD = {}", report.gk_a, report.gk_u, report.gk_pd),
            ];
            let v = &report.verdicts;
            let rows = [
                ("regular", &v.regular),
                ("symplectic", &v.symplectic),
                ("u_domain", &v.u_domain),
                ("kernel_zero", &v.kernel_zero),
                ("u_equals_d", &v.u_equals_d),
                ("pea_commutative", &v.pea_commutative),
                ("poisson_simple_necessary", &v.poisson_simple_necessary),
                ("u_simple", &v.u_simple),
            ];
            for (name, verdict) in rows {
                out.push(format!("{name}: {} ({})", verdict.value.as_str(), verdict.reason));
            }
            Ok(out.join("\n"))
        }
        Command::Bracket { file, exprs } => {
            let p = load(file, opts)?;
            if exprs.len() != 2 {
                return Err(Failure::Core(Error::Syntax { pos: 0, msg: "bracket takes exactly two -e expressions".into() }));
            }
            let (f, g) = (p.parse(&exprs[0])?, p.parse(&exprs[1])?);
            let b = p.fmt(&p.bracket(&f, &g));
            Ok(if opts.json { json(serde_json::json!({ "bracket": b })) } else { b })
        }
        Command::PeaMul { file, exprs } => {
            let p = load(file, opts)?;
            let e = engine(&p, opts);
            let factors = exprs.iter().map(|s| e.parse(s)).collect::<Result<Vec<_>, _>>()?;
            let s = e.format(&e.product(&factors)?);
            Ok(if opts.json { json(serde_json::json!({ "product": s })) } else { s })
        }
        Command::PeaAct { file, expr, on } => {
            let p = load(file, opts)?;
            let e = engine(&p, opts);
            let u = e.parse(expr)?;
            let f = p.parse(on)?;
            let s = p.fmt(&e.act_on(&u, &f)?);
            Ok(if opts.json { json(serde_json::json!({ "result": s })) } else { s })
        }
        Command::PeaZero { file, expr } => {
            let p = load(file, opts)?;
            let e = engine(&p, opts);
            let z = e.is_zero(&e.parse(expr)?)?;
            Ok(if opts.json { json(serde_json::json!({ "zero": z })) } else { z.to_string() })
        }
        Command::Check { file, criterion } => {
            let p = load(file, opts)?;
            let a = Analyzer::new(&p)?;
            let v = a.check(criterion).expect("criterion names are validated by the parser")?;
            if opts.json {
                return Ok(serde_json::to_string_pretty(&v).expect("json"));
            }
            eprintln!("{}", v.reason);
            Ok(v.value.as_str().to_string())
        }
        Command::Gk { file } => {
            let p = load(file, opts)?;
            let gk = Analyzer::new(&p)?.gk();
            if opts.json {
                return Ok(serde_json::to_string_pretty(&gk).expect("json"));
            }
            Ok(format!("gk_A = {}\ngk_U = {}\ngk_PD = {}", gk.gk_a, gk.gk_u, gk.gk_pd))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            if !cli.opts.json {
                println!("invalid");
            }
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
