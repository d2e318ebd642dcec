//! Command-line front end. Reports are JSON by default and human-readable
//! with `--text`. Exit codes: 0 success, 1 a verified negative answer, 2 bad
//! input or an exceeded resource cap.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::approx::{
    anick_approximate, lift_tame_with_cap, symplectic_approximate, Residual, SymplecticFactor, SymplecticWord, LIFT_DEGREE_CAP,
};
use crate::endo::{
    is_symplectomorphism, poisson_bracket, symplectic_violation, AutomorphismVerdict, ElementaryAuto,
    PolyEndo, TameWord, GABBER_DEGREE_CAP,
};
use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::free::{al_verify_with_cap, FreePoly, AL_DEGREE_CAP};
use crate::linalg::Matrix;
use crate::moyal::{moyal_product, PoissonPairing};
use crate::poly::{parse_polynomial_at, Polynomial, VarNames};
use crate::ring::FreeGenerated;
use crate::torus::{parse_param_poly_at, torus_linearize, ParametricEndo};
use crate::yagzhev::{blowup, degree_reduce, engel_check, weak_nilpotence_check, GeneralMap, WeakNilpotence};

#[derive(Parser, Debug)]
#[command(name = "polyquant", version, about = "Exact algebra for polynomial automorphisms and their quantization")]
pub struct Cli {
    /// Ground field: `q` for the rationals, `q5` (or `f5`) for F_5, and so on.
    #[arg(long, global = true, default_value = "q")]
    pub field: String,
    /// Render human-readable text instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
    /// Worker threads for parallel routines; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Formal inverse through a given degree.
    Invert {
        #[arg(long)]
        degree: u32,
        file: PathBuf,
    },
    /// Decide whether an endomorphism is an automorphism; emits the inverse.
    CheckAuto {
        /// Largest admissible inverse-degree bound.
        #[arg(long, default_value_t = GABBER_DEGREE_CAP)]
        cap: u64,
        file: PathBuf,
    },
    /// Check that a map on x1..xn, p1..pn preserves the Poisson bracket.
    CheckSymp { file: PathBuf },
    /// Poisson bracket of two polynomials in x1..xn, p1..pn.
    Bracket {
        /// Number of (x, p) pairs.
        #[arg(long)]
        n: usize,
        /// Polynomial text, or `@path` to read it from a file.
        f: String,
        g: String,
    },
    /// Tame (or tame symplectic) approximation to a target height.
    Approx {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        symplectic: bool,
        file: PathBuf,
    },
    /// Lift a tame symplectic word to the h-augmented Weyl algebra.
    Lift {
        /// Largest admissible product of factor degrees.
        #[arg(long, default_value_t = LIFT_DEGREE_CAP)]
        cap: u64,
        file: PathBuf,
    },
    /// Truncated star product for a constant pairing.
    Moyal {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        order: usize,
        f: PathBuf,
        g: PathBuf,
    },
    /// Check the standard identity S_r on generic n×n matrices.
    AlCheck {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = AL_DEGREE_CAP)]
        cap: usize,
    },
    /// Maps x + H: Engel and weak nilpotence checks, reduction to cubic maps.
    Yagzhev {
        #[command(subcommand)]
        op: YagzhevOp,
    },
    /// Linearize a torus action given with Laurent coefficients in t1..tk.
    Linearize {
        /// Parameter count for line-oriented input.
        #[arg(long, default_value_t = 1)]
        params: usize,
        /// Treat line-oriented input as noncommutative.
        #[arg(long)]
        free: bool,
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum YagzhevOp {
    Engel { file: PathBuf },
    Nilp {
        #[arg(long, default_value_t = 20)]
        qmax: u32,
        file: PathBuf,
    },
    /// Reduce to degree at most 3 with fresh variables.
    Cubicize { file: PathBuf },
    /// Cubic homogeneous blowup of a map of degree at most 3.
    Blowup { file: PathBuf },
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    json: Value,
    text: String,
    negative: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, negative: false }
    }

    fn verdict(json: Value, text: String, positive: bool) -> Self {
        Report { json, text, negative: !positive }
    }
}

pub fn parse_field(s: &str) -> Result<Field> {
    let lower = s.to_ascii_lowercase();
    if matches!(lower.as_str(), "q" | "rational" | "rationals") {
        return Ok(Field::Rational);
    }
    let digits = lower.trim_start_matches(['q', 'f', 'p']);
    let p: u64 = digits
        .parse()
        .map_err(|_| Error::InvalidInput(format!("unknown field {s:?}; use q or q<prime>")))?;
    Field::prime(p)
}

/// Runs one command; never exits the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    let text = cli.text;
    let result = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok(r) => Outcome {
            code: if r.negative { 1 } else { 0 },
            stdout: if text {
                format!("{}\n", r.text)
            } else {
                format!("{}\n", serde_json::to_string_pretty(&r.json).expect("values serialize"))
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: if text {
                format!("error: {e}\n")
            } else {
                format!("{}\n", json!({ "error": e.to_string() }))
            },
        },
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let field = parse_field(&cli.field)?;
    match &cli.command {
        Command::Invert { degree, file } => {
            let (phi, names) = read_endo(file, field, false)?;
            let inv = phi.formal_inverse(*degree)?;
            Ok(Report::ok(
                json!({ "through": degree, "inverse": endo_json(&inv, &names) }),
                inv.to_string_with(&names),
            ))
        }
        Command::CheckAuto { cap, file } => {
            let (phi, names) = read_endo(file, field, false)?;
            match phi.is_automorphism_with_cap(*cap)? {
                AutomorphismVerdict::Yes(inv) => Ok(Report::verdict(
                    json!({ "automorphism": true, "inverse": endo_json(&inv, &names) }),
                    format!("automorphism; inverse {}", inv.to_string_with(&names)),
                    true,
                )),
                AutomorphismVerdict::No(why) => Ok(Report::verdict(
                    json!({ "automorphism": false, "verdict": "irreversible", "reason": why.to_string() }),
                    format!("irreversible: {why}"),
                    false,
                )),
            }
        }
        Command::CheckSymp { file } => {
            let (sigma, names) = read_endo(file, field, true)?;
            let ok = is_symplectomorphism(&sigma)?;
            let violation = symplectic_violation(&sigma)?.map(|(i, j, got)| {
                json!({ "pair": [names.name(i), names.name(j)], "got": got.to_string_with(&names) })
            });
            let text = match &violation {
                None => "symplectic".to_string(),
                Some(v) => format!("not symplectic: {v}"),
            };
            Ok(Report::verdict(json!({ "symplectic": ok, "violation": violation }), text, ok))
        }
        Command::Bracket { n, f, g } => {
            let names = VarNames::symplectic(*n);
            let f = parse_polynomial_at(&read_arg(f)?, &names, field, 1)?;
            let g = parse_polynomial_at(&read_arg(g)?, &names, field, 2)?;
            let b = poisson_bracket(&f, &g)?.to_string_with(&names);
            Ok(Report::ok(json!({ "bracket": b }), b))
        }
        Command::Approx { degree, symplectic, file } => approx(file, field, *degree, *symplectic),
        Command::Lift { cap, file } => {
            let word = read_symplectic_word(file, field)?;
            let lifted = lift_tame_with_cap(&word, *cap)?;
            let names = crate::weyl::WeylElement::names(lifted.n());
            let images: Vec<String> = lifted.images().iter().map(|e| e.to_string()).collect();
            let text = images
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{} -> {s}", names.name(i)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(json!({ "n": lifted.n(), "images": images }), text))
        }
        Command::Moyal { alpha, order, f, g } => {
            let pairing = PoissonPairing::new(read_matrix(alpha, field)?)?;
            let names = VarNames::standard(pairing.nvars());
            let f = parse_polynomial_at(read(f)?.trim(), &names, field, 1)?;
            let g = parse_polynomial_at(read(g)?.trim(), &names, field, 1)?;
            let s = moyal_product(&f, &g, &pairing, *order)?;
            let coeffs = s.to_strings(&names);
            let text = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| format!("ħ^{k}: {c}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(json!(coeffs), text))
        }
        Command::AlCheck { order, degree, cap } => {
            let holds = al_verify_with_cap(*order, *degree, *cap)?;
            let text = if holds { "identity holds" } else { "identity fails" };
            Ok(Report::verdict(
                json!({ "order": order, "degree": degree, "holds": holds }),
                text.to_string(),
                holds,
            ))
        }
        Command::Yagzhev { op } => yagzhev(op, field),
        Command::Linearize { params, free, file } => linearize(file, field, *params, *free),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => Ok(read(Path::new(path))?.trim().to_string()),
        None => Ok(s.to_string()),
    }
}

fn parse_json(text: &str, path: &Path) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    })
}

/// Image strings of an endomorphism file: a JSON object `{"vars": n,
/// "images": [...]}` or one image per line, optionally written `x1 -> ...`.
/// Blank lines and lines starting with `#` are skipped.
fn read_images(path: &Path) -> Result<(Option<usize>, Vec<(usize, String)>)> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let v = parse_json(&text, path)?;
        let vars = v.get("vars").and_then(Value::as_u64).map(|n| n as usize);
        let images = v
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("missing \"images\" array".into()))?
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.as_str()
                    .map(|s| (i + 1, s.to_string()))
                    .ok_or_else(|| Error::InvalidInput(format!("image {} is not a string", i + 1)))
            })
            .collect::<Result<_>>()?;
        return Ok((vars, images));
    }
    let images = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let body = l.split_once("->").map(|(_, r)| r).unwrap_or(l);
            (i + 1, body.trim().to_string())
        })
        .collect();
    Ok((None, images))
}

fn endo_names(n: usize, symplectic: bool) -> Result<VarNames> {
    if symplectic {
        if n % 2 != 0 {
            return Err(Error::dim(format!("a phase space needs an even number of variables, got {n}")));
        }
        Ok(VarNames::symplectic(n / 2))
    } else {
        Ok(VarNames::standard(n))
    }
}

pub fn read_endo(path: &Path, field: Field, symplectic: bool) -> Result<(PolyEndo, VarNames)> {
    let (vars, images) = read_images(path)?;
    let n = vars.unwrap_or(images.len());
    if n != images.len() {
        return Err(Error::dim(format!("{n} variables but {} images", images.len())));
    }
    let names = endo_names(n, symplectic)?;
    let polys = images
        .iter()
        .map(|(line, s)| parse_polynomial_at(s, &names, field, *line))
        .collect::<Result<Vec<_>>>()?;
    Ok((PolyEndo::new(polys)?, names))
}

pub fn endo_json(phi: &PolyEndo, names: &VarNames) -> Value {
    json!({
        "vars": phi.nvars(),
        "images": phi.images().iter().map(|p| p.to_string_with(names)).collect::<Vec<_>>(),
    })
}

fn coefficient_json(c: &Coefficient) -> Value {
    Value::String(c.to_string())
}

fn parse_coefficient(v: &Value, field: Field) -> Result<Coefficient> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::InvalidInput(format!("{v} is not a number"))),
    };
    let p = parse_polynomial_at(&s, &VarNames::standard(0), field, 1)?;
    p.as_constant()
        .ok_or_else(|| Error::InvalidInput(format!("{s} is not a constant")))
}

pub fn tame_word_json(w: &TameWord, names: &VarNames) -> Value {
    json!({
        "vars": w.nvars(),
        "factors": w.factors().iter().map(|e| json!({
            "target": e.target() + 1,
            "scale": coefficient_json(e.scale()),
            "shift": e.shift().to_string_with(names),
        })).collect::<Vec<_>>(),
    })
}

pub fn parse_tame_word(v: &Value, field: Field) -> Result<TameWord> {
    let n = v
        .get("vars")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("missing \"vars\"".into()))? as usize;
    let names = VarNames::standard(n);
    let factors = v
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing \"factors\"".into()))?
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let target = f.get("target").and_then(Value::as_u64).unwrap_or(0) as usize;
            if target == 0 || target > n {
                return Err(Error::InvalidInput(format!("factor {}: bad target", i + 1)));
            }
            let scale = parse_coefficient(f.get("scale").unwrap_or(&json!("1")), field)?;
            let shift = f.get("shift").and_then(Value::as_str).unwrap_or("0");
            ElementaryAuto::new(target - 1, scale, parse_polynomial_at(shift, &names, field, i + 1)?)
        })
        .collect::<Result<Vec<_>>>()?;
    TameWord::new(n, field, factors)
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(coefficient_json).collect()))
            .collect(),
    )
}

fn parse_matrix_json(v: &Value, field: Field) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("a matrix is a list of rows".into()))?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::InvalidInput("a matrix row is a list".into()))?
                .iter()
                .map(|c| parse_coefficient(c, field))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(field, rows)
}

/// A JSON list of rows, or whitespace-separated rows of numbers.
fn read_matrix(path: &Path, field: Field) -> Result<Matrix> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        return parse_matrix_json(&parse_json(&text, path)?, field);
    }
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|c| parse_coefficient(&Value::String(c.to_string()), field))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(field, rows)
}

pub fn symplectic_word_json(w: &SymplecticWord) -> Value {
    let names = VarNames::symplectic(w.nvars() / 2);
    json!({
        "vars": w.nvars(),
        "factors": w.factors().iter().map(|f| match f {
            SymplecticFactor::XShear(g) => json!({ "x-shear": g.to_string_with(&names) }),
            SymplecticFactor::PShear(g) => json!({ "p-shear": g.to_string_with(&names) }),
            SymplecticFactor::Linear(a) => json!({ "linear": matrix_json(a) }),
            SymplecticFactor::FormShear { form, coefficient, degree } => json!({
                "form-shear": {
                    "form": form.iter().map(coefficient_json).collect::<Vec<_>>(),
                    "coefficient": coefficient_json(coefficient),
                    "degree": degree,
                }
            }),
        }).collect::<Vec<_>>(),
    })
}

pub fn parse_symplectic_word(v: &Value, field: Field) -> Result<SymplecticWord> {
    let nv = v
        .get("vars")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("missing \"vars\"".into()))? as usize;
    let names = endo_names(nv, true)?;
    let factors = v
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing \"factors\"".into()))?
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let poly = |s: &Value| -> Result<Polynomial> {
                let s = s
                    .as_str()
                    .ok_or_else(|| Error::InvalidInput(format!("factor {}: expected a string", i + 1)))?;
                parse_polynomial_at(s, &names, field, i + 1)
            };
            if let Some(g) = f.get("x-shear") {
                Ok(SymplecticFactor::XShear(poly(g)?))
            } else if let Some(g) = f.get("p-shear") {
                Ok(SymplecticFactor::PShear(poly(g)?))
            } else if let Some(a) = f.get("linear") {
                Ok(SymplecticFactor::Linear(parse_matrix_json(a, field)?))
            } else if let Some(s) = f.get("form-shear") {
                let form = s
                    .get("form")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidInput(format!("factor {}: missing form", i + 1)))?
                    .iter()
                    .map(|c| parse_coefficient(c, field))
                    .collect::<Result<Vec<_>>>()?;
                let coefficient = parse_coefficient(s.get("coefficient").unwrap_or(&json!("1")), field)?;
                let degree = s.get("degree").and_then(Value::as_u64).unwrap_or(1) as u32;
                Ok(SymplecticFactor::FormShear { form, coefficient, degree })
            } else {
                Err(Error::InvalidInput(format!("factor {}: unknown kind", i + 1)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SymplecticWord::new(nv, field, factors)
}

fn read_symplectic_word(path: &Path, field: Field) -> Result<SymplecticWord> {
    let text = read(path)?;
    parse_symplectic_word(&parse_json(&text, path)?, field)
}

fn residual_json(r: &Residual, names: &VarNames) -> Value {
    let through = match r {
        Residual::Exact(_) => Value::Null,
        Residual::Truncated { through, .. } => json!(through),
    };
    json!({ "exact": r.is_exact(), "through": through, "endo": endo_json(r.endo(), names) })
}

fn approx(file: &Path, field: Field, degree: u32, symplectic: bool) -> Result<Report> {
    let (phi, names) = read_endo(file, field, symplectic)?;
    let (word, residual, steps) = if symplectic {
        let a = symplectic_approximate(&phi, degree)?;
        (symplectic_word_json(&a.word), a.residual, a.steps)
    } else {
        let a = anick_approximate(&phi, degree)?;
        (tame_word_json(&a.word, &names), a.residual, a.steps)
    };
    let height = residual_height(&residual);
    let steps_json: Vec<Value> = steps
        .iter()
        .map(|s| json!({ "degree": s.degree, "factors": s.factors, "residual_height": s.residual_height.to_string() }))
        .collect();
    let nfactors = word["factors"].as_array().map(Vec::len).unwrap_or(0);
    Ok(Report::ok(
        json!({
            "word": word,
            "residual": residual_json(&residual, &names),
            "residual_height": height,
            "steps": steps_json,
        }),
        format!(
            "{nfactors} factors; residual height {height}; residual {}",
            residual.endo().to_string_with(&names)
        ),
    ))
}

fn residual_height(r: &Residual) -> String {
    let e = r.endo();
    e.difference_height(&PolyEndo::identity(e.nvars(), e.field()))
        .map(|h| h.to_string())
        .unwrap_or_default()
}

fn general_map_json(g: &GeneralMap) -> Value {
    let phi = g.to_endo();
    let names: Vec<&str> = (0..g.nvars()).map(|i| g.names().name(i)).collect();
    json!({
        "vars": g.nvars(),
        "names": names,
        "images": phi.images().iter().map(|p| p.to_string_with(g.names())).collect::<Vec<_>>(),
    })
}

fn general_map_text(g: &GeneralMap) -> String {
    g.to_endo().to_string_with(g.names())
}

fn yagzhev(op: &YagzhevOp, field: Field) -> Result<Report> {
    let load = |file: &Path| -> Result<GeneralMap> {
        let (phi, _) = read_endo(file, field, false)?;
        GeneralMap::from_endo(&phi)
    };
    match op {
        YagzhevOp::Engel { file } => {
            let g = load(file)?;
            let engel = engel_check(&g)?;
            let text = if engel { "Jacobian of H is nilpotent" } else { "Jacobian of H is not nilpotent" };
            Ok(Report::verdict(json!({ "engel": engel }), text.to_string(), engel))
        }
        YagzhevOp::Nilp { qmax, file } => {
            let g = load(file)?;
            let verdict = weak_nilpotence_check(&g, *qmax)?;
            let (json, text, positive) = match &verdict {
                WeakNilpotence::Yagzhev { order, inverse } => (
                    json!({ "verdict": "yagzhev", "order": order, "inverse": endo_json(inverse, g.names()) }),
                    format!("yagzhev with order {order}; inverse {}", inverse.to_string_with(g.names())),
                    true,
                ),
                WeakNilpotence::Fails { degree, bound } => (
                    json!({ "verdict": "fails", "degree": degree, "bound": bound }),
                    format!("fails: inverse series is nonzero in degree {degree} above the bound {bound}"),
                    false,
                ),
                WeakNilpotence::Inconclusive { qmax, last_nonzero } => (
                    json!({ "verdict": "inconclusive", "qmax": qmax, "last_nonzero": last_nonzero }),
                    format!("inconclusive through degree {qmax}; last nonzero component in degree {last_nonzero}"),
                    true,
                ),
            };
            Ok(Report::verdict(json, text, positive))
        }
        YagzhevOp::Cubicize { file } => {
            let r = degree_reduce(&load(file)?);
            Ok(Report::ok(general_map_json(&r), general_map_text(&r)))
        }
        YagzhevOp::Blowup { file } => {
            let b = blowup(&load(file)?)?;
            Ok(Report::ok(general_map_json(b.map()), general_map_text(b.map())))
        }
    }
}

fn linearize(file: &Path, field: Field, params: usize, free: bool) -> Result<Report> {
    let text = read(file)?;
    let (k, free, images) = if text.trim_start().starts_with('{') {
        let v = parse_json(&text, file)?;
        let k = v.get("params").and_then(Value::as_u64).map(|k| k as usize).unwrap_or(params);
        let free = free || v.get("algebra").and_then(Value::as_str) == Some("free");
        let (_, images) = read_images(file)?;
        (k, free, images)
    } else {
        let (_, images) = read_images(file)?;
        (params, free, images)
    };
    if free {
        linearize_in::<FreePoly>(&images, field, k)
    } else {
        linearize_in::<Polynomial>(&images, field, k)
    }
}

fn linearize_in<A: FreeGenerated>(images: &[(usize, String)], field: Field, k: usize) -> Result<Report> {
    let n = images.len();
    let names = VarNames::standard(n);
    let params = VarNames::custom((1..=k).map(|j| format!("t{j}")).collect());
    let polys = images
        .iter()
        .map(|(line, s)| parse_param_poly_at::<A>(s, &names, &params, field, *line))
        .collect::<Result<Vec<_>>>()?;
    let sigma = ParametricEndo::new(k, polys)?;
    let lin = torus_linearize(&sigma)?;
    let beta: Vec<String> = lin.beta.iter().map(|b| b.to_string_with(&names)).collect();
    let tau = lin.tau.to_strings(&names, &params);
    let text = format!(
        "beta: {}\ntau: {}",
        beta.iter()
            .enumerate()
            .map(|(i, b)| format!("{} -> {b}", names.name(i)))
            .collect::<Vec<_>>()
            .join(", "),
        tau.iter()
            .enumerate()
            .map(|(i, t)| format!("{} -> {t}", names.name(i)))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(Report::ok(
        json!({
            "beta": { "vars": n, "images": beta },
            "tau": { "vars": n, "params": k, "images": tau },
            "power_matrix": lin.power_matrix,
        }),
        text,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("polyquant").chain(args.iter().copied()))
    }

    #[test]
    fn field_names() {
        assert_eq!(parse_field("q").unwrap(), Field::Rational);
        assert_eq!(parse_field("q5").unwrap(), Field::Prime(5));
        assert_eq!(parse_field("f7").unwrap(), Field::Prime(7));
        assert!(parse_field("q6").is_err());
        assert!(parse_field("r").is_err());
    }

    #[test]
    fn check_auto_exit_codes() {
        let nagata = file(
            "x1 - 2*x2*(x1*x3 + x2^2) - x3*(x1*x3 + x2^2)^2\nx2 + x3*(x1*x3 + x2^2)\nx3\n",
        );
        let out = run_args(&["check-auto", nagata.path().to_str().unwrap()]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["automorphism"], json!(true));
        let frob = file("{\"vars\": 1, \"images\": [\"x1 - x1^5\"]}");
        let out = run_args(&["check-auto", frob.path().to_str().unwrap(), "--field", "q5", "--text"]);
        assert_eq!(out.code, 1, "{out:?}");
        assert!(out.stdout.contains("irreversible"));
    }

    #[test]
    fn input_errors_exit_two() {
        let bad = file("x1 + \n");
        let out = run_args(&["check-auto", bad.path().to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("line 1"), "{}", out.stderr);
        assert_eq!(run_args(&["frobnicate"]).code, 2);
        assert_eq!(run_args(&["check-auto", "/nonexistent/file"]).code, 2);
    }

    #[test]
    fn al_check_reports() {
        let out = run_args(&["al-check", "--order", "2", "--degree", "4", "--text"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.trim(), "identity holds");
        assert_eq!(run_args(&["al-check", "--order", "2", "--degree", "3"]).code, 1);
    }

    #[test]
    fn words_round_trip() {
        let names = VarNames::standard(2);
        let shear = ElementaryAuto::shear(0, parse_polynomial_at("x2^2", &names, Field::Rational, 1).unwrap()).unwrap();
        let w = TameWord::new(2, Field::Rational, vec![shear.clone(), shear.inverse()]).unwrap();
        assert_eq!(parse_tame_word(&tame_word_json(&w, &names), Field::Rational).unwrap(), w);
        let sw = crate::sample::random_symplectic_word(
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3),
            2,
            2,
            4,
            Field::Rational,
        );
        assert_eq!(parse_symplectic_word(&symplectic_word_json(&sw), Field::Rational).unwrap(), sw);
    }

    #[test]
    fn approx_then_lift() {
        let sigma = file("x1 + p1^2\np1\n");
        let out = run_args(&["approx", "--degree", "4", "--symplectic", sigma.path().to_str().unwrap()]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["residual"]["exact"], json!(true));
        let word = file(&v["word"].to_string());
        let out = run_args(&["lift", word.path().to_str().unwrap()]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["images"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn moyal_and_bracket() {
        let alpha = file("0 1\n0 0\n");
        let f = file("x1");
        let g = file("x2");
        let out = run_args(&[
            "moyal",
            "--alpha",
            alpha.path().to_str().unwrap(),
            "--order",
            "2",
            f.path().to_str().unwrap(),
            g.path().to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v, json!(["x1*x2", "1", "0"]));
        let out = run_args(&["bracket", "--n", "1", "x1", "p1", "--text"]);
        assert_eq!(out.stdout.trim(), "-1");
    }

    #[test]
    fn yagzhev_and_linearize() {
        let m = file("x1 + x2^3\nx2\n");
        let p = m.path().to_str().unwrap();
        assert_eq!(run_args(&["yagzhev", "engel", p]).code, 0);
        let out = run_args(&["yagzhev", "nilp", "--qmax", "8", p]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("yagzhev"));
        let c = file("x1 + x1^3\n");
        assert_eq!(run_args(&["yagzhev", "engel", c.path().to_str().unwrap()]).code, 1);
        let big = file("x1 + x1^5\n");
        let out = run_args(&["--field", "q5", "yagzhev", "cubicize", big.path().to_str().unwrap()]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["vars"], json!(5));
        let out = run_args(&["yagzhev", "blowup", big.path().to_str().unwrap()]);
        assert_eq!(out.code, 2);
        let act = file("t1*x1\nt1^2*x2 + (t1^2 - t1^3)*x1^3\n");
        let out = run_args(&["linearize", act.path().to_str().unwrap()]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["beta"]["images"], json!(["x1", "x1^3 + x2"]));
    }

    #[test]
    fn output_is_deterministic() {
        let m = file("x1 + x2^2 + x3^3\nx2 + x3^2\nx3\n");
        let p = m.path().to_str().unwrap();
        let a = run_args(&["approx", "--degree", "5", p]);
        let b = run_args(&["--threads", "1", "approx", "--degree", "5", p]);
        assert_eq!(a, b);
        assert_eq!(a.code, 0);
    }
}
