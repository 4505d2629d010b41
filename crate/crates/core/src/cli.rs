//! Command-line front end. Every command prints one JSON document (JSON lines
//! for `scan`); failures print `{"schema":"v1","error":{...}}` on stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::curves::{codomain_from_kernel_polynomial, standard_model, CurveModel};
use crate::error::{Error, Result};
use crate::fields::{Fe, Field};
use crate::kernelpoly::{kernel_polynomial, kernel_polynomials_all};
use crate::modpoly::{builtin_text, check_j, ModularPolyDatabase, ModularPolyTable, ReducedModularPoly, SingularPointData, SUPPORTED_ELLS};
use crate::multipoint::{isogenous_models_with, MultipointOptions};
use crate::oracle::{cross_check_with, CrossCheckStatus};
use crate::poly::{poly_gcd, Poly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "multipoints", version, about = "Normalized isogenous models at singular points of Y0(l)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multiplicity and partials of Φ_ℓ at (j1, j2).
    Multiplicity(PointArgs),
    /// Every normalized ℓ-isogenous model with j-invariant j2.
    Models(ModelArgs),
    /// Kernel polynomial of the normalized ℓ-isogeny between two fixed models.
    Kernel(KernelArgs),
    /// All points of multiplicity at least two with j1 in a range.
    Scan(ScanArgs),
    /// Compare `models` with the brute-force enumeration.
    OracleCheck(ModelArgs),
    /// Structural checks on a modular polynomial database.
    ValidateDb(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `p` or `p^k:c0,c1,...,ck`.
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub ell: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Proceed when p <= 4ℓ.
    #[arg(long, visible_alias = "unchecked")]
    pub allow_unchecked: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub j1: String,
    #[arg(long)]
    pub j2: String,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "A", requires = "b", conflicts_with = "j1")]
    pub a: Option<String>,
    #[arg(long = "B", requires = "a")]
    pub b: Option<String>,
    /// Use the standard model of this j-invariant instead of `--A/--B`.
    #[arg(long)]
    pub j1: Option<String>,
    #[arg(long)]
    pub j2: String,
    #[arg(long)]
    pub with_kernels: bool,
    #[arg(long)]
    pub auto_quadratic: bool,
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "A")]
    pub a: String,
    #[arg(long = "B")]
    pub b: String,
    #[arg(long = "At")]
    pub at: String,
    #[arg(long = "Bt")]
    pub bt: String,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// First element index of the j1 range.
    #[arg(long)]
    pub j1_from: Option<u64>,
    /// One past the last element index of the j1 range.
    #[arg(long)]
    pub j1_to: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    /// Directory of `phi_<ell>.txt` files or a single table file; defaults to
    /// `MODPOLY_DB_DIR`, then the builtin tables.
    pub path: Option<PathBuf>,
}

/// Runs the CLI on `args` and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            let _ = writeln!(err, "{}", error_json("USAGE_ERROR", msg.trim()));
            return EXIT_INPUT;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(e.code(), &e.to_string()));
            if e.is_invariant_violation() {
                EXIT_INVARIANT
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn error_json(code: &str, message: &str) -> Value {
    json!({"schema": "v1", "error": {"code": code, "message": message}})
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{v}").map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Multiplicity(a) => cmd_multiplicity(a, out),
        Command::Models(a) => cmd_models(a, out),
        Command::Kernel(a) => cmd_kernel(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::OracleCheck(a) => cmd_oracle_check(a, out),
        Command::ValidateDb(a) => cmd_validate_db(a, out),
    }
}

struct Setup {
    field: Field,
    table: std::sync::Arc<ModularPolyTable>,
    rng: ChaCha8Rng,
}

fn setup(c: &Common) -> Result<Setup> {
    let field = Field::parse(&c.field)?;
    if !SUPPORTED_ELLS.contains(&c.ell) {
        return Err(Error::UnsupportedEll(c.ell));
    }
    let table = ModularPolyDatabase::from_env()?.get(c.ell)?;
    let p = field.characteristic();
    if p == c.ell {
        return Err(Error::UnsupportedCharacteristic(format!("p = ell = {p}")));
    }
    if !c.allow_unchecked && p <= 4 * c.ell {
        return Err(Error::CharacteristicTooSmall(format!(
            "p={p} does not exceed 4*ell={}; pass --allow-unchecked to proceed",
            4 * c.ell
        )));
    }
    Ok(Setup { field, table, rng: ChaCha8Rng::seed_from_u64(c.seed) })
}

fn element(field: &Field, s: &str) -> Result<Fe> {
    field.parse_element(s)
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!("v1"));
    }
    v
}

fn cmd_multiplicity(a: &PointArgs, out: &mut dyn Write) -> Result<i32> {
    let s = setup(&a.common)?;
    let j1 = element(&s.field, &a.j1)?;
    let j2 = element(&s.field, &a.j2)?;
    check_j(&j1)?;
    check_j(&j2)?;
    let data = s.table.reduce(&s.field).multiplicity_of_point(&j1, &j2)?;
    let mut v = with_schema(data.to_json());
    v["field"] = json!(s.field.spec());
    v["ell"] = json!(a.common.ell);
    emit(out, &v)?;
    Ok(EXIT_OK)
}

fn domain(field: &Field, a: &ModelArgs) -> Result<CurveModel> {
    match (&a.a, &a.b, &a.j1) {
        (Some(x), Some(y), None) => CurveModel::new(element(field, x)?, element(field, y)?),
        (None, None, Some(j)) => {
            let j = element(field, j)?;
            check_j(&j)?;
            Ok(standard_model(&j))
        }
        _ => Err(Error::InvalidArgument("give either --A and --B, or --j1".into())),
    }
}

fn options(a: &ModelArgs) -> MultipointOptions {
    MultipointOptions {
        allow_unchecked: a.common.allow_unchecked,
        auto_quadratic: a.auto_quadratic,
        with_kernels: a.with_kernels,
    }
}

fn cmd_models(a: &ModelArgs, out: &mut dyn Write) -> Result<i32> {
    let mut s = setup(&a.common)?;
    let e = domain(&s.field, a)?;
    let j2 = element(&s.field, &a.j2)?;
    let report = isogenous_models_with(&s.table, &e, &j2, &options(a), &mut s.rng)?;
    emit(out, &report.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_oracle_check(a: &ModelArgs, out: &mut dyn Write) -> Result<i32> {
    let mut s = setup(&a.common)?;
    let e = domain(&s.field, a)?;
    let j2 = element(&s.field, &a.j2)?;
    let r = cross_check_with(&s.table, &e, &j2, &options(a), &mut s.rng)?;
    emit(out, &r.to_json())?;
    Ok(if r.status == CrossCheckStatus::SetEqual { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_kernel(a: &KernelArgs, out: &mut dyn Write) -> Result<i32> {
    let mut s = setup(&a.common)?;
    let e = CurveModel::new(element(&s.field, &a.a)?, element(&s.field, &a.b)?)?;
    let et = CurveModel::new(element(&s.field, &a.at)?, element(&s.field, &a.bt)?)?;
    let ell = a.common.ell;
    let (method, kernels) = if s.field.characteristic() > 4 * ell {
        ("differential_equation", vec![kernel_polynomial(&e, &et, ell)?])
    } else {
        ("enumeration", kernel_polynomials_all(&e, &et, ell, &mut s.rng)?)
    };
    for h in &kernels {
        if codomain_from_kernel_polynomial(&e, h)? != et {
            return Err(Error::InternalInconsistency("kernel does not reproduce the codomain".into()));
        }
    }
    let v = json!({
        "schema": "v1",
        "field": s.field.spec(),
        "ell": ell,
        "domain": e.to_json(),
        "codomain": et.to_json(),
        "method": method,
        "kernels": kernels.iter().map(Poly::to_json).collect::<Vec<_>>(),
    });
    emit(out, &v)?;
    Ok(EXIT_OK)
}

/// Points `(j1, j2)` of multiplicity at least two with `j1` running over the
/// element indices in `range`, sorted by the encodings of `j1` then `j2`.
pub fn scan_singular_points<R: rand::Rng + ?Sized>(
    phi: &ReducedModularPoly,
    range: std::ops::Range<u64>,
    rng: &mut R,
) -> Result<Vec<SingularPointData>> {
    let field = phi.field();
    let mut found = Vec::new();
    for idx in range {
        let j1 = field.element_from_index(idx);
        if check_j(&j1).is_err() {
            continue;
        }
        let f = phi.instantiate_y(&j1);
        let g = poly_gcd(&f, &f.derivative());
        if g.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (j2, _) in g.roots_in_field(rng) {
            if check_j(&j2).is_err() {
                continue;
            }
            let data = phi.multiplicity_of_point(&j1, &j2)?;
            if data.m >= 2 {
                found.push(data);
            }
        }
    }
    found.sort_by_cached_key(|d| (d.j1.encode(), d.j2.encode()));
    Ok(found)
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<i32> {
    let mut s = setup(&a.common)?;
    let order = s.field.order();
    let size = order.to_u64().filter(|&q| q <= a.budget).ok_or_else(|| {
        Error::BudgetExceeded(format!("field has {order} elements, budget is {}", a.budget))
    })?;
    let from = a.j1_from.unwrap_or(0);
    let to = a.j1_to.unwrap_or(size).min(size);
    if from > to {
        return Err(Error::InvalidArgument(format!("empty j1 range {from}..{to}")));
    }
    let phi = s.table.reduce(&s.field);
    for d in scan_singular_points(&phi, from..to, &mut s.rng)? {
        let mut v = with_schema(d.to_json());
        v["ell"] = json!(a.common.ell);
        emit(out, &v)?;
    }
    Ok(EXIT_OK)
}

fn table_report(name: &str, text: &str) -> Result<(Value, bool)> {
    let table = ModularPolyTable::parse(text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{name}: {message}") },
        other => other,
    })?;
    let checks = table.checks();
    let passed = checks.iter().all(|c| c.passed);
    let v = json!({
        "source": name,
        "ell": table.ell(),
        "checks": checks.iter().map(|c| (c.name.to_string(), Value::Bool(c.passed))).collect::<serde_json::Map<_, _>>(),
        "passed": passed,
    });
    Ok((v, passed))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn cmd_validate_db(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let path = a.path.clone().or_else(|| std::env::var_os("MODPOLY_DB_DIR").map(PathBuf::from));
    let mut sources: Vec<(String, String)> = Vec::new();
    match path {
        None => {
            for &ell in &SUPPORTED_ELLS {
                sources.push((format!("builtin:phi_{ell}"), builtin_text(ell).unwrap_or_default().to_string()));
            }
        }
        Some(p) if p.is_dir() => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&p)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("phi_") && n.ends_with(".txt"))
                })
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::InvalidArgument(format!("no phi_<ell>.txt files in {}", p.display())));
            }
            for f in files {
                sources.push((f.display().to_string(), read(&f)?));
            }
        }
        Some(p) => sources.push((p.display().to_string(), read(&p)?)),
    }
    let mut tables = Vec::new();
    let mut all = true;
    for (name, text) in &sources {
        let (v, passed) = table_report(name, text)?;
        all &= passed;
        tables.push(v);
    }
    emit(out, &json!({"schema": "v1", "tables": tables, "all_passed": all}))?;
    Ok(if all { EXIT_OK } else { EXIT_MISMATCH })
}
