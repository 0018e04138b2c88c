//! `solvlog`: logarithms of truncated free-algebra automorphisms from the
//! command line.
//!
//! Every command reads JSON and writes one JSON document. Exit status: 0 when
//! the result was computed and verified, 1 when it was computed but failed
//! verification (the report is still written), 2 when the input was rejected.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use solvlog_core::free_lie::{bracket_string, lyndon_basis, necklace_count};
use solvlog_core::json::{digest, matrix_from_json};
use solvlog_core::logarithm::{bch_series, bch_single_y_kernel, ln_aut, log_unipotent, LogOptions};
use solvlog_core::magnus::total_johnson;
use solvlog_core::spectral::{eig_unit_circle_obstruction, Verdict};
use solvlog_core::tolerance::{DEFAULT_EXPONENT_BOUND, DEFAULT_TOL, KERNEL_POLE_TOL};
use solvlog_core::{
    linalg, ComplexAut, ComplexDerivation, Error, FreeGroupEndo, GradedAut, GradedDerivation, MagnusExpansion, Scalar,
    TruncatedTensor, Wire,
};

const FIXTURES: &[(&str, &str, &str)] = &[
    ("identity_aut", "identity automorphism, n = 2, k = 4", include_str!("../fixtures/identity_aut.json")),
    ("t_a", "Dehn twist x1 -> x1, x2 -> x2 x1", include_str!("../fixtures/t_a.json")),
    ("t_b", "Dehn twist x1 -> x1 x2^-1, x2 -> x2", include_str!("../fixtures/t_b.json")),
    ("t_b_inv", "inverse twist x1 -> x1 x2, x2 -> x2", include_str!("../fixtures/t_b_inv.json")),
    ("anosov", "t_a composed with t_b_inv, induced matrix [[2,1],[1,1]]", include_str!("../fixtures/anosov.json")),
    ("rotation", "quarter rotation, not exponential solvable", include_str!("../fixtures/rotation.json")),
    ("hyperbolic", "[[2,1],[1,1]], exponential solvable", include_str!("../fixtures/hyperbolic.json")),
    ("diag_2_neg2", "diag(2,-2), not exponential solvable", include_str!("../fixtures/diag_2_neg2.json")),
];

#[derive(Parser)]
#[command(name = "solvlog", version, about = "Extended logarithms of automorphisms of truncated free algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Complex,
}

#[derive(Args, Clone)]
struct Common {
    /// Input JSON file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: String,
    /// Output file (`-` for standard output).
    #[arg(long, default_value = "-")]
    output: String,
    /// Coefficient tolerance for the complex backend.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Logarithm of an automorphism with exponential-solvable base matrix.
    LogAut {
        #[command(flatten)]
        common: Common,
        /// Relative distance from a kernel pole below which the solve refuses.
        #[arg(long, default_value_t = KERNEL_POLE_TOL)]
        pole_tol: f64,
        /// Exponent bound for the solvability search.
        #[arg(long, default_value_t = DEFAULT_EXPONENT_BOUND)]
        bound: u32,
        /// Proceed when solvability is inconclusive.
        #[arg(long)]
        force: bool,
    },
    /// Logarithm of an automorphism with unipotent base matrix, by the finite series.
    LogUnipotent {
        #[command(flatten)]
        common: Common,
    },
    /// Total Johnson image of a free-group endomorphism.
    Johnson {
        #[command(flatten)]
        common: Common,
        /// Endomorphism JSON, e.g. {"n":2,"images":[[1,2],[2]]}.
        #[arg(long)]
        endo: PathBuf,
        /// Truncation degree.
        #[arg(long)]
        k: usize,
        /// `exp` for the exponential expansion, otherwise a path to an expansion JSON.
        #[arg(long, default_value = "exp")]
        expansion: String,
        /// Also compute the logarithm of the image.
        #[arg(long)]
        log: bool,
        #[arg(long)]
        force: bool,
    },
    /// Predicates on matrices, automorphisms and expansions.
    Check {
        #[command(subcommand)]
        predicate: Predicate,
    },
    /// `log(e^X e^Y)` for derivations X, Y with Y IA.
    Bch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Series order; defaults to k − 1.
        #[arg(long)]
        order: Option<usize>,
        /// Use the closed single-Y form instead of the series (k = 3, complex backend).
        #[arg(long)]
        kernel: bool,
    },
    /// Lyndon bases of the truncated free Lie algebra.
    Bases {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// List the shipped fixtures, print one, or write them all to a directory.
    Fixtures {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        dir: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        output: String,
    },
}

#[derive(Subcommand)]
enum Predicate {
    /// Exponential solvability of a matrix, automorphism base, or endomorphism's induced matrix.
    ExpSolvable {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_EXPONENT_BOUND)]
        bound: u32,
    },
    /// Whether an automorphism preserves primitives.
    Hopf {
        #[command(flatten)]
        common: Common,
    },
    /// Whether an automorphism fixes the symplectic element. Supply the
    /// automorphism one truncation level above the level of interest.
    Omega {
        #[command(flatten)]
        common: Common,
    },
    /// Whether a tensor or every value of an expansion is group-like.
    Grouplike {
        #[command(flatten)]
        common: Common,
    },
    /// Whether an expansion sends the boundary word to exp(ω).
    Symplectic {
        #[command(flatten)]
        common: Common,
    },
}

/// A command's result: the document to write and whether it verified.
struct Outcome {
    doc: Value,
    verified: bool,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, verified: true }
    }
}

fn read_text(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }
}

fn read_json(path: &str) -> Result<Value, Error> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

fn read_json_path(path: &Path) -> Result<Value, Error> {
    read_json(&path.to_string_lossy())
}

fn write_output(target: &str, doc: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    text.push('\n');
    if target == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(target, text)
    }
}

fn tol_for<S: Scalar>(tol: f64) -> f64 {
    if S::EXACT {
        0.0
    } else {
        tol
    }
}

fn check_tol(tol: f64) -> Result<(), Error> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be a non-negative number, got {tol}")))
    }
}

fn spectral_needs_complex(what: &str) -> Error {
    Error::Precondition(format!(
        "{what}: the exact backend only handles unipotent base matrices; rerun with --backend complex"
    ))
}

/// `exp(D)` against `Φ` re-read from the serialized artifacts.
fn self_check(derivation: &Value, input: &Value, recorded: f64) -> Result<Value, Error> {
    let d = ComplexDerivation::from_json(derivation)?;
    let phi = ComplexAut::from_json(input)?;
    let recomputed = d.exp()?.distance(&phi)?;
    let consistent = recomputed <= 2.0 * recorded.max(f64::EPSILON);
    Ok(json!({ "residual": recomputed, "consistent": consistent }))
}

fn unipotent_report<S: Scalar>(phi: &GradedAut<S>, input: &Value, tol: f64) -> Result<Outcome, Error> {
    let d = log_unipotent(phi)?;
    let residual = d.exp()?.distance(phi)?;
    let tol = tol_for::<S>(tol);
    let derivation = d.to_json();
    let check = self_check(&derivation, input, residual)?;
    let verified = residual <= tol && check["consistent"] == json!(true);
    Ok(Outcome {
        doc: json!({
            "input_digest": digest(input),
            "backend": S::BACKEND.to_string(),
            "derivation": derivation,
            "residual": residual,
            "tol": tol,
            "verified": verified,
            "self_check": check,
        }),
        verified,
    })
}

fn log_report(phi: &ComplexAut, input: &Value, opts: &LogOptions) -> Result<Outcome, Error> {
    let report = ln_aut(phi, opts)?;
    let mut doc = report.to_json();
    let check = self_check(&doc["derivation"], input, report.residual)?;
    let verified = report.verified() && check["consistent"] == json!(true);
    doc["verified"] = json!(verified);
    doc["self_check"] = check;
    Ok(Outcome { doc, verified })
}

fn log_aut(common: &Common, pole_tol: f64, bound: u32, force: bool) -> Result<Outcome, Error> {
    check_tol(common.tol)?;
    check_tol(pole_tol)?;
    let input = read_json(&common.input)?;
    match common.backend.unwrap_or(BackendArg::Complex) {
        BackendArg::Exact => {
            let phi = GradedAut::<solvlog_core::Rational>::from_json(&input)?;
            if !phi.is_unipotent(0.0) {
                return Err(spectral_needs_complex("log-aut"));
            }
            unipotent_report(&phi, &input, 0.0)
        }
        BackendArg::Complex => {
            let phi = ComplexAut::from_json(&input)?;
            let opts = LogOptions { tol: common.tol, pole_tol, force, bound, seed: None };
            log_report(&phi, &input, &opts)
        }
    }
}

fn log_unipotent_cmd(common: &Common) -> Result<Outcome, Error> {
    check_tol(common.tol)?;
    let input = read_json(&common.input)?;
    match common.backend.unwrap_or(BackendArg::Exact) {
        BackendArg::Exact => unipotent_report(&GradedAut::<solvlog_core::Rational>::from_json(&input)?, &input, 0.0),
        BackendArg::Complex => unipotent_report(&ComplexAut::from_json(&input)?, &input, common.tol),
    }
}

fn johnson_image<S: Scalar>(endo: &FreeGroupEndo, k: usize, expansion: &str) -> Result<GradedAut<S>, Error> {
    let theta = if expansion == "exp" {
        MagnusExpansion::<S>::theta_exp(endo.n(), k)?
    } else {
        let theta = MagnusExpansion::<S>::from_json(&read_json(expansion)?)?;
        if (theta.n(), theta.k()) != (endo.n(), k) {
            return Err(Error::Dimension(format!(
                "expansion has n = {}, k = {} but the command asked for n = {}, k = {k}",
                theta.n(),
                theta.k(),
                endo.n()
            )));
        }
        theta
    };
    total_johnson(&theta, endo)
}

fn johnson(common: &Common, endo: &Path, k: usize, expansion: &str, log: bool, force: bool) -> Result<Outcome, Error> {
    check_tol(common.tol)?;
    if k < 2 {
        return Err(Error::Domain("k must be at least 2".into()));
    }
    let endo_json = read_json_path(endo)?;
    let endo = FreeGroupEndo::from_json(&endo_json)?;
    let mut doc = json!({ "endo_digest": digest(&endo_json), "k": k, "expansion": expansion });
    let backend = common.backend.unwrap_or(BackendArg::Exact);
    let (aut_json, unipotent) = match backend {
        BackendArg::Exact => {
            let t = johnson_image::<solvlog_core::Rational>(&endo, k, expansion)?;
            (t.to_json(), t.is_unipotent(0.0))
        }
        BackendArg::Complex => {
            let t = johnson_image::<Complex64>(&endo, k, expansion)?;
            (t.to_json(), t.is_unipotent(common.tol))
        }
    };
    doc["aut"] = aut_json.clone();
    let mut verified = true;
    if log {
        let out = match backend {
            BackendArg::Exact if !unipotent => return Err(spectral_needs_complex("johnson --log")),
            BackendArg::Exact => unipotent_report(&GradedAut::<solvlog_core::Rational>::from_json(&aut_json)?, &aut_json, 0.0)?,
            BackendArg::Complex => {
                let phi = ComplexAut::from_json(&aut_json)?;
                let opts = LogOptions { tol: common.tol, force, ..LogOptions::default() };
                log_report(&phi, &aut_json, &opts)?
            }
        };
        verified = out.verified;
        doc["log"] = out.doc;
    }
    Ok(Outcome { doc, verified })
}

/// The matrix a solvability question is about.
fn base_matrix(v: &Value) -> Result<linalg::Matrix<Complex64>, Error> {
    if v.get("images").is_some() && v.get("k").is_none() {
        let endo = FreeGroupEndo::from_json(v)?;
        return Ok(linalg::to_complex(endo.induced_matrix()));
    }
    if let Some(a) = v.get("A") {
        return matrix_from_json(a);
    }
    matrix_from_json(v)
}

fn cplx(z: &Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn exp_solvable(common: &Common, bound: u32) -> Result<Outcome, Error> {
    let input = read_json(&common.input)?;
    let a = base_matrix(&input)?;
    let rep = eig_unit_circle_obstruction(&a, bound)?;
    let witness = rep.witness.as_ref().map(|w| {
        json!({
            "factors": w.factors.iter().map(|(l, e)| json!({ "eigenvalue": cplx(l), "exponent": e })).collect::<Vec<_>>(),
            "product": cplx(&w.product),
            "text": w.to_string(),
        })
    });
    Ok(Outcome::ok(json!({
        "predicate": "exp-solvable",
        "input_digest": digest(&input),
        "verdict": rep.verdict.to_string(),
        "holds": rep.verdict == Verdict::Solvable,
        "eigenvalues": rep.eigenvalues.iter().map(cplx).collect::<Vec<_>>(),
        "witness": witness,
        "bound": rep.bound,
    })))
}

fn aut_predicate<S: Scalar>(name: &str, input: &Value, tol: f64) -> Result<Value, Error> {
    let phi = GradedAut::<S>::from_json(input)?;
    let tol = tol_for::<S>(tol);
    let holds = match name {
        "hopf" => phi.is_hopf(tol),
        _ => phi.preserves_omega(tol)?,
    };
    Ok(json!({ "predicate": name, "input_digest": digest(input), "holds": holds, "tol": tol }))
}

fn expansion_predicate<S: Scalar>(name: &str, input: &Value, tol: f64) -> Result<Value, Error> {
    let tol = tol_for::<S>(tol);
    let holds = if name == "grouplike" && input.get("images").is_none() {
        TruncatedTensor::<S>::from_json(input)?.is_grouplike(tol)
    } else {
        let theta = MagnusExpansion::<S>::from_json(input)?;
        match name {
            "grouplike" => theta.is_grouplike(tol),
            _ => theta.is_symplectic(tol)?,
        }
    };
    Ok(json!({ "predicate": name, "input_digest": digest(input), "holds": holds, "tol": tol }))
}

fn check(predicate: &Predicate) -> Result<Outcome, Error> {
    let (name, common) = match predicate {
        Predicate::ExpSolvable { common, bound } => {
            check_tol(common.tol)?;
            return exp_solvable(common, *bound);
        }
        Predicate::Hopf { common } => ("hopf", common),
        Predicate::Omega { common } => ("omega", common),
        Predicate::Grouplike { common } => ("grouplike", common),
        Predicate::Symplectic { common } => ("symplectic", common),
    };
    check_tol(common.tol)?;
    let input = read_json(&common.input)?;
    let exact = common.backend.unwrap_or(BackendArg::Exact) == BackendArg::Exact;
    let doc = match (name, exact) {
        ("hopf" | "omega", true) => aut_predicate::<solvlog_core::Rational>(name, &input, common.tol)?,
        ("hopf" | "omega", false) => aut_predicate::<Complex64>(name, &input, common.tol)?,
        (_, true) => expansion_predicate::<solvlog_core::Rational>(name, &input, common.tol)?,
        (_, false) => expansion_predicate::<Complex64>(name, &input, common.tol)?,
    };
    Ok(Outcome::ok(doc))
}

fn bch_doc<S: Scalar>(x: &Value, y: &Value, order: Option<usize>) -> Result<Outcome, Error> {
    let (x, y) = (GradedDerivation::<S>::from_json(x)?, GradedDerivation::<S>::from_json(y)?);
    let order = order.unwrap_or(x.k().saturating_sub(1).max(1));
    let r = bch_series(&x, &y, order)?;
    Ok(Outcome {
        doc: json!({
            "method": "series",
            "derivation": r.derivation.to_json(),
            "order": r.order,
            "certified": r.certified,
            "tail_estimate": r.tail_estimate,
            "warning": r.warning,
        }),
        verified: r.certified,
    })
}

fn bch(common: &Common, x: &Path, y: &Path, order: Option<usize>, kernel: bool) -> Result<Outcome, Error> {
    check_tol(common.tol)?;
    let (xv, yv) = (read_json_path(x)?, read_json_path(y)?);
    let backend = common.backend.unwrap_or(if kernel { BackendArg::Complex } else { BackendArg::Exact });
    if kernel {
        if backend == BackendArg::Exact {
            return Err(spectral_needs_complex("bch --kernel"));
        }
        let z = bch_single_y_kernel(&ComplexDerivation::from_json(&xv)?, &ComplexDerivation::from_json(&yv)?)?;
        return Ok(Outcome::ok(json!({ "method": "kernel", "derivation": z.to_json(), "certified": true })));
    }
    match backend {
        BackendArg::Exact => bch_doc::<solvlog_core::Rational>(&xv, &yv, order),
        BackendArg::Complex => bch_doc::<Complex64>(&xv, &yv, order),
    }
}

fn bases(n: usize, k: usize) -> Result<Outcome, Error> {
    if n == 0 || k < 2 {
        return Err(Error::Domain("bases needs n >= 1 and k >= 2".into()));
    }
    let basis = lyndon_basis(n, k);
    let degrees: Vec<Value> = (1..k)
        .map(|m| {
            json!({
                "degree": m,
                "count": basis[m].len(),
                "words": basis[m].iter().map(bracket_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    let counts: Vec<usize> = (1..k).map(|m| basis[m].len()).collect();
    let agrees = (1..k).all(|m| basis[m].len() == necklace_count(n, m));
    Ok(Outcome { doc: json!({ "n": n, "k": k, "counts": counts, "degrees": degrees }), verified: agrees })
}

fn fixtures(name: Option<&str>, dir: Option<&Path>) -> Result<Outcome, Error> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
        for (name, _, text) in FIXTURES {
            let path = dir.join(format!("{name}.json"));
            fs::write(&path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
        let names: Vec<&str> = FIXTURES.iter().map(|f| f.0).collect();
        return Ok(Outcome::ok(json!({ "written": names, "dir": dir.display().to_string() })));
    }
    match name {
        None => Ok(Outcome::ok(Value::Array(
            FIXTURES.iter().map(|(n, d, _)| json!({ "name": n, "description": d })).collect(),
        ))),
        Some(name) => {
            let (_, _, text) = FIXTURES
                .iter()
                .find(|f| f.0 == name)
                .ok_or_else(|| Error::Domain(format!("no fixture named {name:?}")))?;
            Ok(Outcome::ok(serde_json::from_str(text)?))
        }
    }
}

fn dispatch(cli: &Cli) -> (Result<Outcome, Error>, String) {
    match &cli.command {
        Command::LogAut { common, pole_tol, bound, force } => {
            (log_aut(common, *pole_tol, *bound, *force), common.output.clone())
        }
        Command::LogUnipotent { common } => (log_unipotent_cmd(common), common.output.clone()),
        Command::Johnson { common, endo, k, expansion, log, force } => {
            (johnson(common, endo, *k, expansion, *log, *force), common.output.clone())
        }
        Command::Check { predicate } => {
            let output = match predicate {
                Predicate::ExpSolvable { common, .. }
                | Predicate::Hopf { common }
                | Predicate::Omega { common }
                | Predicate::Grouplike { common }
                | Predicate::Symplectic { common } => common.output.clone(),
            };
            (check(predicate), output)
        }
        Command::Bch { common, x, y, order, kernel } => (bch(common, x, y, *order, *kernel), common.output.clone()),
        Command::Bases { n, k, output } => (bases(*n, *k), output.clone()),
        Command::Fixtures { name, dir, output } => (fixtures(name.as_deref(), dir.as_deref()), output.clone()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = dispatch(&cli);
    let (doc, code) = match result {
        Ok(out) => {
            let code = if out.verified { 0 } else { 1 };
            (out.doc, code)
        }
        Err(e) => {
            eprintln!("solvlog: {e}");
            let code = if matches!(e, Error::Verification(_)) { 1 } else { 2 };
            (json!({ "error": { "kind": e.kind(), "message": e.to_string() } }), code)
        }
    };
    if let Err(e) = write_output(&output, &doc) {
        eprintln!("solvlog: cannot write {output}: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_matrix_accepts_three_shapes() {
        let re = |m: linalg::Matrix<Complex64>| m.map(|z| z.re);
        let from_endo = re(base_matrix(&json!({ "n": 2, "images": [[1, 2, 1], [2, 1]] })).unwrap());
        let from_aut = re(base_matrix(&json!({ "n": 2, "k": 3, "A": [[2, 1], [1, 1]], "u": {} })).unwrap());
        let from_rows = re(base_matrix(&json!({ "rows": [[2, 1], [1, 1]] })).unwrap());
        assert_eq!(from_endo, from_rows);
        assert_eq!(from_aut, from_rows);
    }

    #[test]
    fn shipped_fixtures_parse() {
        for (name, _, text) in FIXTURES {
            let v: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(base_matrix(&v).is_ok(), "{name}");
        }
    }

    #[test]
    fn bases_rejects_degenerate_shapes() {
        assert!(bases(0, 3).is_err());
        assert!(bases(2, 1).is_err());
        assert_eq!(bases(2, 2).unwrap().doc["counts"], json!([2]));
    }

    #[test]
    fn exact_tolerance_is_zero() {
        assert_eq!(tol_for::<solvlog_core::Rational>(1e-3), 0.0);
        assert_eq!(tol_for::<Complex64>(1e-3), 1e-3);
    }
}
