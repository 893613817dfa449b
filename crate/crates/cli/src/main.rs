//! `loopforge`: build locally loop algebras, evaluate brackets, run the
//! verification suites, solve for derivations and compute ad-spectra.

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use loopforge::exact::{parse_rational, rational_json, Rational};
use loopforge::forms::{cocycle, extended_bracket, FormSpec, PsiEntry};
use loopforge::loops::{AlgebraOptions, BasisKind, GradedElement, LoopAlgebra, LoopTag, LoopType};
use loopforge::matrix::DiagExt;
use loopforge::verify::derivations::{check_extension, solve_diagonal_derivations};
use loopforge::verify::formsuite::DEFAULT_SEED;
use loopforge::verify::spectrum::{ad_spectrum, harmonic, spectrum_obstruction, DiagonalOperator};
use loopforge::verify::suite::{run_suite, Suite, SuiteConfig};
use loopforge::verify::torus::weight_spaces;
use loopforge::verify::VerificationReport;
use loopforge::Error;

const SCHEMA: &str = "loopforge/1";
const GUARD: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "loopforge", version, about = "Exact locally loop algebras and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Include wall-clock timings in reports (off by default so output is reproducible).
    #[arg(long, global = true)]
    timing: bool,

    /// Lift the rank/window guard of 6.
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graded dimensions per degree and the degrees carrying each root.
    Build {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// The centrally extended bracket of two elements given as JSON files.
    Bracket {
        #[command(flatten)]
        alg: AlgebraArgs,
        x: PathBuf,
        y: PathBuf,
    },
    /// Run a verification suite (all seven types when --type is omitted).
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long = "type", value_parser = parse_tag)]
        tag: Option<LoopTag>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 3)]
        window: i32,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random triples per seeded form check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Corrupt one structure constant before the torus and Jacobi checks.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Solve for diagonal derivations of one degree and compare with the predicted span.
    Derive {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, allow_hyphen_values = true)]
        degree: i32,
        /// Leibniz is imposed on |k| <= window - margin; must be at least |degree|.
        #[arg(long, default_value_t = 2)]
        margin: i32,
        /// For odd degrees of twisted types, also check shift commutation and the extension.
        #[arg(long)]
        extend: bool,
    },
    /// Eigenvalues of ad(p + a·d⁰) on root vectors of sl_n loops and the integrality obstruction.
    Spectrum {
        /// JSON diagonal {"finite": {"1": "1", "2": "1/2"}, "scalar": "0"}.
        #[arg(long, conflicts_with = "harmonic")]
        p_file: Option<PathBuf>,
        /// Use p = diag(1, 1/2, ..., 1/n).
        #[arg(long)]
        harmonic: bool,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        window: i32,
        /// Coefficient of d⁰ used for --target.
        #[arg(long, default_value = "1", value_parser = parse_q, allow_hyphen_values = true)]
        a: Rational,
        /// Root vector e_ij⊗t^k as "i,j,k"; repeatable.
        #[arg(long = "target", value_parser = parse_target, allow_hyphen_values = true)]
        targets: Vec<(usize, usize, i32)>,
        /// Scan 0 < |a| <= a-max for the obstruction (default when no target is given).
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 12)]
        a_max: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Torus,
    Rootdatum,
    Forms,
    Jacobi,
    Center,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Torus => Suite::Torus,
            SuiteArg::Rootdatum => Suite::RootDatum,
            SuiteArg::Forms => Suite::Forms,
            SuiteArg::Jacobi => Suite::Jacobi,
            SuiteArg::Center => Suite::Center,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[arg(long = "type", value_parser = parse_tag)]
    tag: LoopTag,
    /// Defaults to 3 for A1 and D1, 2 otherwise.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 3)]
    window: i32,
    #[command(flatten)]
    form: FormArgs,
}

#[derive(Args, Debug)]
struct FormArgs {
    /// Scale of the trace part of the form.
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    trace_scale: Option<Rational>,
    /// ψ₀(ι, ι).
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    psi0_iota: Option<Rational>,
    /// B(d⁰, d⁰).
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    dd: Option<Rational>,
}

impl FormArgs {
    fn spec(&self) -> Result<FormSpec, Failure> {
        let mut f = match &self.trace_scale {
            Some(s) => FormSpec::new(s.clone())?,
            None => FormSpec::default(),
        };
        if let Some(i) = &self.psi0_iota {
            let e = PsiEntry { ii: i.clone(), ..f.psi_at(0) };
            f = f.with_psi(0, e);
        }
        if let Some(d) = &self.dd {
            f = f.with_dd(d.clone());
        }
        Ok(f)
    }
}

fn parse_tag(s: &str) -> Result<LoopTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_target(s: &str) -> Result<(usize, usize, i32), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || format!("target must be \"i,j,k\", got {s:?}");
    match parts.as_slice() {
        [i, j, k] => Ok((i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn default_rank(tag: LoopTag) -> usize {
    match tag {
        LoopTag::A1 | LoopTag::D1 => 3,
        _ => 2,
    }
}

/// A failure with its exit code: 1 verification, 2 usage or parse, 3 window overflow.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WindowOverflow { .. } => 3,
            Error::SingularForm | Error::NotShiftInvariant(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

struct Outcome {
    body: Value,
    passed: bool,
}

fn guard(rank: usize, window: i32, allow: bool) -> Result<(), Failure> {
    if !allow && (rank > GUARD || window > GUARD as i32) {
        return Err(Failure::usage(format!(
            "rank {rank} / window {window} exceed the guard of {GUARD}; pass --allow-large to override"
        )));
    }
    Ok(())
}

fn loop_type(a: &AlgebraArgs, allow: bool) -> Result<LoopType, Failure> {
    let rank = a.rank.unwrap_or_else(|| default_rank(a.tag));
    guard(rank, a.window, allow)?;
    Ok(LoopType::new(a.tag, rank, a.window)?)
}

fn read_json(p: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
}

/// The algebra elements are read into: everything the form is defined on.
fn full_options(tag: LoopTag) -> AlgebraOptions {
    if tag == LoopTag::A1 {
        AlgebraOptions::hat_u()
    } else {
        AlgebraOptions::maximal_lala()
    }
}

fn cmd_build(a: &AlgebraArgs, allow: bool) -> Result<Outcome, Failure> {
    let ty = loop_type(a, allow)?;
    let alg = LoopAlgebra::new(ty, AlgebraOptions::maximal_lala(), a.form.spec()?)?;
    let mut rows = Vec::new();
    for k in ty.degrees() {
        let mut count: BTreeMap<&str, usize> = ["core", "complement", "central", "derivation"].map(|c| (c, 0)).into();
        for i in alg.degree_indices(k) {
            let col = match alg.basis()[i].kind {
                BasisKind::Root | BasisKind::Zero => "core",
                BasisKind::Complement | BasisKind::Iota => "complement",
                BasisKind::Central => "central",
                BasisKind::Derivation => "derivation",
            };
            *count.get_mut(col).unwrap() += 1;
        }
        let total: usize = count.values().sum();
        rows.push(json!({"degree": k, "core": count["core"], "complement": count["complement"],
            "central": count["central"], "derivation": count["derivation"], "total": total}));
    }
    let mut roots: BTreeMap<String, Vec<i32>> = BTreeMap::new();
    for ((mu, k), _) in weight_spaces(&alg) {
        if !mu.is_zero() {
            roots.entry(mu.to_string()).or_default().push(k);
        }
    }
    let roots: Vec<Value> = roots.into_iter().map(|(r, ks)| json!({"root": r, "degrees": ks})).collect();
    Ok(Outcome {
        body: json!({"algebra": ty.descriptor(), "form": alg.form().to_json(), "dim": alg.dim(), "degrees": rows, "roots": roots}),
        passed: true,
    })
}

fn cmd_bracket(a: &AlgebraArgs, x: &Path, y: &Path, allow: bool) -> Result<Outcome, Failure> {
    let ty = loop_type(a, allow)?;
    let form = a.form.spec()?;
    let alg = LoopAlgebra::new(ty, full_options(ty.tag), form.clone())?;
    let parse = |p: &Path| -> Result<GradedElement, Failure> {
        let e = GradedElement::from_json(&ty, &read_json(p)?)?;
        if !alg.contains(&e) {
            return Err(Failure::usage(format!("{}: element does not belong to {}", p.display(), ty.tag)));
        }
        Ok(e)
    };
    let (ex, ey) = (parse(x)?, parse(y)?);
    let z = extended_bracket(&form, &ty, &ex, &ey)?;
    Ok(Outcome {
        body: json!({"algebra": ty.descriptor(), "cocycle": rational_json(&cocycle(&form, &ty, &ex, &ey)), "result": z.to_json()}),
        passed: true,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    tag: Option<LoopTag>,
    rank: Option<usize>,
    window: i32,
    form: &FormArgs,
    seed: u64,
    samples: usize,
    inject_fault: bool,
    allow: bool,
    timing: bool,
) -> Result<Outcome, Failure> {
    let tags: Vec<LoopTag> = match tag {
        Some(t) => vec![t],
        None => LoopTag::ALL.to_vec(),
    };
    let spec = form.spec()?;
    let mut reports: Vec<VerificationReport> = Vec::new();
    for t in tags {
        let n = rank.unwrap_or_else(|| default_rank(t));
        guard(n, window, allow)?;
        let cfg = SuiteConfig { ty: LoopType::new(t, n, window)?, form: spec.clone(), seed, samples, inject_fault };
        reports.extend(run_suite(suite, &cfg)?);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    let body = json!({
        "suite": suite.to_string(),
        "seed": seed,
        "passed": passed,
        "reports": reports.iter().map(|r| r.to_json(timing)).collect::<Vec<_>>(),
    });
    Ok(Outcome { body, passed })
}

fn cmd_derive(a: &AlgebraArgs, degree: i32, margin: i32, extend: bool, allow: bool) -> Result<Outcome, Failure> {
    let ty = loop_type(a, allow)?;
    let s = solve_diagonal_derivations(&ty, degree, margin)?;
    let report = s.report();
    let mut passed = report.passed();
    let mut body = Map::new();
    body.insert("algebra".into(), ty.descriptor());
    body.insert("solution".into(), s.to_json());
    body.insert("report".into(), report.to_json(false));
    if extend {
        if !ty.tag.is_twisted() || degree.rem_euclid(2) != 1 {
            return Err(Failure::usage("--extend applies to odd degrees of B2, C2 and BC2"));
        }
        let mut ext = Vec::new();
        for d in &s.solved {
            let r = check_extension(&s.algebra, d, margin)?;
            passed &= r.passed();
            ext.push(r.to_json(false));
        }
        body.insert("extensions".into(), Value::Array(ext));
    }
    Ok(Outcome { body: Value::Object(body), passed })
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    p_file: Option<&Path>,
    harmonic_p: bool,
    rank: usize,
    window: i32,
    a: &Rational,
    targets: &[(usize, usize, i32)],
    scan: bool,
    a_max: i64,
    allow: bool,
) -> Result<Outcome, Failure> {
    guard(rank, window, allow)?;
    let p = match p_file {
        Some(f) => DiagExt::from_json(&read_json(f)?)?,
        None if harmonic_p => harmonic(rank),
        None => DiagExt::zero(),
    };
    let ty = LoopType::new(LoopTag::A1, rank, window)?;
    let u = ty.universe();
    let mut elems = Vec::new();
    for (i, j, k) in targets {
        if !u.contains(*i) || !u.contains(*j) || i == j {
            return Err(Failure::usage(format!("target e_{i}{j} is not a root vector of sl_{rank}")));
        }
        if !ty.in_window(*k) {
            return Err(Error::WindowOverflow { degrees: vec![*k], window }.into());
        }
        elems.push(GradedElement::unit(&ty, *i, *j, *k));
    }
    let ev = ad_spectrum(&ty, &DiagonalOperator::new(p.clone(), a.clone()), &elems)?;
    let eigen: Vec<Value> = targets
        .iter()
        .zip(&ev)
        .map(|((i, j, k), v)| json!({"target": format!("e_{{{i},{j}}}⊗t^{k}"), "eigenvalue": rational_json(v)}))
        .collect();
    let mut body = Map::new();
    body.insert("rank".into(), json!(rank));
    body.insert("p".into(), p.to_json());
    body.insert("a".into(), rational_json(a));
    body.insert("eigenvalues".into(), Value::Array(eigen));
    if scan || targets.is_empty() {
        let s = spectrum_obstruction(&p, rank, window, a_max)?;
        body.insert("obstruction".into(), s.to_json());
    }
    Ok(Outcome { body: Value::Object(body), passed: true })
}

fn run(cli: &Cli) -> Result<(String, Outcome), Failure> {
    let allow = cli.allow_large;
    Ok(match &cli.command {
        Command::Build { alg } => ("build".into(), cmd_build(alg, allow)?),
        Command::Bracket { alg, x, y } => ("bracket".into(), cmd_bracket(alg, x, y, allow)?),
        Command::Verify { suite, tag, rank, window, form, seed, samples, inject_fault } => (
            "verify".into(),
            cmd_verify((*suite).into(), *tag, *rank, *window, form, *seed, *samples, *inject_fault, allow, cli.timing)?,
        ),
        Command::Derive { alg, degree, margin, extend } => ("derive".into(), cmd_derive(alg, *degree, *margin, *extend, allow)?),
        Command::Spectrum { p_file, harmonic, rank, window, a, targets, scan, a_max } => (
            "spectrum".into(),
            cmd_spectrum(p_file.as_deref(), *harmonic, *rank, *window, a, targets, *scan, *a_max, allow)?,
        ),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((command, outcome)) => {
            let mut top = Map::new();
            top.insert("schema".into(), json!(SCHEMA));
            top.insert("command".into(), json!(command));
            if let Value::Object(m) = outcome.body {
                top.extend(m);
            }
            let doc = Value::Object(top);
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("serializable")),
                Format::Table => print!("{}", render::table(&command, &doc)),
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
