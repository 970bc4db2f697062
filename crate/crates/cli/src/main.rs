//! `weilgap`: presentations of Gamma0(p), multiplier systems, q-expansions
//! and functional-equation checks from the command line.
//!
//! Every command prints one JSON document containing the resolved
//! configuration and the result. The exit status is nonzero when inputs are
//! invalid or a check fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use weilgap::analytic::{
    certify_modularity, check_fe_additive, check_fe_multiplicative, default_s_grid,
    lambda_additive, lambda_multiplicative, AdditiveTwist, FEStatement, FeOptions, ModCharacter,
    PhaseSource,
};
use weilgap::arith::numth::is_prime;
use weilgap::arith::Mat2;
use weilgap::io::{load_coeffs, save_coeffs};
use weilgap::multiplier::{
    pretend_constraints, sixth_root_check, solve_pretend, DirichletChar, MultiplierSystem,
};
use weilgap::presentation::build_presentation;
use weilgap::reproduce::{reproduce_all, DEFAULT_SEED};
use weilgap::series::{delta_coeffs, delta_delta_p, eisenstein_multiplier_coeffs, CoeffSeries};
use weilgap::C64;

#[derive(Parser, Debug)]
#[command(name = "weilgap", version, about = "Near counterexamples to the converse theorem at prime level")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Free generators of Gamma0(p)/{±I} and the signature (l, a, b).
    Gens(GensArgs),
    /// Writes a matrix of Gamma0(p) as a word in the generators.
    Word(WordArgs),
    /// The set of q for which V_q is a generator.
    #[command(name = "Q")]
    #[serde(rename = "Q")]
    Q(LevelArgs),
    /// Solves for an infinite-order multiplier imitating a character.
    Multiplier(MultiplierArgs),
    /// Abelianized image of T S^p T^-1.
    SixthRoot(LevelArgs),
    /// Writes a coefficient file.
    Series(SeriesArgs),
    /// One value of a completed additively twisted L-series.
    Lambda(LambdaArgs),
    /// Additive functional-equation check.
    CheckFe(CheckFeArgs),
    /// Multiplicative functional-equation check.
    CheckFeMult(CheckFeMultArgs),
    /// Certifies modularity from the functional equations (converse direction).
    Certify(CertifyArgs),
    /// Runs every acceptance criterion.
    ReproduceAll(ReproduceArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct LevelArgs {
    #[arg(long)]
    p: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct GensArgs {
    #[arg(long)]
    p: u64,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// A plain-text table instead of JSON.
    #[arg(long)]
    table: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct WordArgs {
    #[arg(long)]
    p: u64,
    /// Entries `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct MultiplierArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    qmax: u64,
    /// `trivial`, `quadratic` or an exponent `t` of the character `g -> e(t/(p-1))`.
    #[arg(long, default_value = "trivial")]
    chi: String,
    #[arg(long, default_value_t = 0)]
    kernel_index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum SeriesKind {
    Delta,
    DeltaDeltaP,
    EisMult,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    kind: SeriesKind,
    #[arg(long, default_value_t = 1)]
    p: u64,
    #[arg(long = "M")]
    m: usize,
    /// Multiplier system file (for `eis-mult`); trivial when absent.
    #[arg(long)]
    multiplier: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    weight: i64,
    /// Largest modulus c in the Kloosterman-type sums; 40 p when absent.
    #[arg(long)]
    cmax: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct FormArgs {
    /// Level; 1 for level one.
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: i64,
    #[arg(long, default_value = "trivial")]
    chi: String,
    #[arg(long)]
    coeffs: PathBuf,
    /// Dual coefficients; the same file as `--coeffs` when absent.
    #[arg(long = "coeffs-g")]
    coeffs_g: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct LambdaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    #[arg(long, default_value_t = 1)]
    q: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a: i64,
    /// `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long)]
    y0: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CheckFeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    #[arg(long, default_value_t = 1)]
    q: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a: i64,
    /// Sample points `re,im`; the default grid when absent.
    #[arg(long, allow_hyphen_values = true)]
    s: Vec<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CheckFeMultArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    #[arg(long)]
    q: u64,
    /// `quadratic` (prime q) or an index into the primitive characters mod q.
    #[arg(long, default_value = "0")]
    psi: String,
    #[arg(long, allow_hyphen_values = true)]
    s: Vec<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct ReproduceArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Skip the non-gating experiments.
    #[arg(long)]
    no_experiments: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn require_level(p: u64) -> Result<()> {
    if !is_prime(p) {
        bail!("{p} is not prime");
    }
    if p <= 3 {
        bail!("level must be a prime greater than 3, got {p}");
    }
    Ok(())
}

fn parse_matrix(text: &str) -> Result<Mat2> {
    let xs: Vec<i64> = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("matrix {text:?} must be four integers a,b,c,d"))?;
    if xs.len() != 4 {
        bail!("matrix {text:?} must have four entries");
    }
    Ok(Mat2::from_i64(xs[0], xs[1], xs[2], xs[3])?)
}

fn parse_complex(text: &str) -> Result<C64> {
    let parts: Vec<&str> = text.split(',').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .with_context(|| format!("{text:?} is not of the form re,im"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex::new(num(re)?, num(im)?)),
        _ => bail!("{text:?} is not of the form re,im"),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))
}

fn load(path: &Path) -> Result<CoeffSeries<f64>> {
    load_coeffs(path).with_context(|| format!("reading coefficients from {}", path.display()))
}

struct Forms {
    f: CoeffSeries<f64>,
    g: CoeffSeries<f64>,
}

fn load_forms(form: &FormArgs) -> Result<Forms> {
    let f = load(&form.coeffs)?;
    let g = match &form.coeffs_g {
        Some(path) => load(path)?,
        None => f.clone(),
    };
    Ok(Forms { f, g })
}

/// Level 1 means the full modular group; otherwise a character mod p.
fn character(form: &FormArgs) -> Result<Option<DirichletChar>> {
    if form.p == 1 {
        return Ok(None);
    }
    require_level(form.p)?;
    Ok(Some(DirichletChar::parse(form.p, &form.chi)?))
}

fn source<'a>(chi: &'a Option<DirichletChar>) -> PhaseSource<'a> {
    match chi {
        None => PhaseSource::Level1,
        Some(c) => PhaseSource::Character(c),
    }
}

fn samples(texts: &[String], k: i64, sigma: f64) -> Result<Vec<C64>> {
    if texts.is_empty() {
        return Ok(default_s_grid(k, sigma));
    }
    texts.iter().map(|t| parse_complex(t)).collect()
}

fn choose_psi(q: u64, text: &str) -> Result<ModCharacter> {
    if text == "quadratic" {
        return Ok(ModCharacter::legendre(q)?);
    }
    let idx: usize = text
        .parse()
        .with_context(|| format!("--psi must be `quadratic` or an index, got {text:?}"))?;
    let all = ModCharacter::primitive(q);
    let n = all.len();
    all.into_iter()
        .nth(idx)
        .ok_or_else(|| anyhow!("there are {n} primitive characters mod {q}, index {idx} is out of range"))
}

/// Runs a command; the boolean is false when a check failed.
fn run(cmd: &Command) -> Result<(Value, bool)> {
    match cmd {
        Command::Gens(a) => {
            require_level(a.p)?;
            let gens = build_presentation(a.p)?;
            let v = json!({
                "p": a.p,
                "l": gens.signature.l,
                "a": gens.signature.a,
                "b": gens.signature.b,
                "Q": gens.q_set(),
                "generators": gens.generators.iter().map(|g| json!({
                    "label": g.label, "matrix": g.matrix, "order": g.order.to_string(),
                })).collect::<Vec<_>>(),
            });
            Ok((v, true))
        }
        Command::Word(a) => {
            require_level(a.p)?;
            let gens = build_presentation(a.p)?;
            let m = parse_matrix(&a.matrix)?;
            let w = gens.decompose_gamma0(&m)?;
            let ok = gens.evaluate_gamma_word(&w) == m;
            Ok((
                json!({"matrix": m, "word": w.to_string(), "tokens": w.tokens, "negated": w.negated, "verified": ok}),
                ok,
            ))
        }
        Command::Q(a) => {
            require_level(a.p)?;
            let gens = build_presentation(a.p)?;
            Ok((json!({"p": a.p, "Q": gens.q_set()}), true))
        }
        Command::Multiplier(a) => {
            require_level(a.p)?;
            let gens = build_presentation(a.p)?;
            let chi = DirichletChar::parse(a.p, &a.chi)?;
            let cs = pretend_constraints(&gens, &chi, a.qmax)?;
            let sol = solve_pretend(&cs, &chi, &gens, a.kernel_index)?;
            let ms = sol.multiplier.to_json();
            if let Some(out) = &a.out {
                write_json(out, &ms)?;
            }
            Ok((
                json!({
                    "p": a.p, "chi": chi.label(), "rows": cs.rows.len(), "free_rank": sol.free_rank,
                    "rank": sol.rank, "kernel_dim": sol.kernel_dim, "kernel_index": sol.kernel_index,
                    "heuristic_bound_holds": sol.heuristic_bound_holds,
                    "infinite_order": sol.multiplier.has_infinite_order(), "multiplier": ms,
                }),
                true,
            ))
        }
        Command::SixthRoot(a) => {
            require_level(a.p)?;
            let gens = build_presentation(a.p)?;
            let r = sixth_root_check(&gens)?;
            let ok = r.consistent;
            Ok((serde_json::to_value(r)?, ok))
        }
        Command::Series(a) => {
            let f = match a.kind {
                SeriesKind::Delta => delta_coeffs::<f64>(a.m),
                SeriesKind::DeltaDeltaP => {
                    require_level(a.p)?;
                    delta_delta_p::<f64>(a.p, a.m).0
                }
                SeriesKind::EisMult => {
                    require_level(a.p)?;
                    let gens = build_presentation(a.p)?;
                    let ms = match &a.multiplier {
                        Some(path) => {
                            let text = std::fs::read_to_string(path)
                                .with_context(|| format!("cannot read {}", path.display()))?;
                            let ms = MultiplierSystem::from_json(&serde_json::from_str(&text)?)?;
                            ms.validate(&gens)?;
                            ms
                        }
                        None => MultiplierSystem::trivial(&gens),
                    };
                    let cmax = a.cmax.unwrap_or(40 * a.p);
                    eisenstein_multiplier_coeffs(&gens, &ms, a.weight, a.m, cmax)?
                }
            };
            let header = json!({"label": f.label, "weight": f.weight, "level": f.level,
                "sigma": f.sigma, "M": f.max_index(),
                "error_bound": f.errors.iter().copied().fold(0.0, f64::max)});
            match &a.out {
                Some(out) => {
                    save_coeffs(&f, out)?;
                    Ok((json!({"written": out, "header": header}), true))
                }
                None => {
                    let mut buf = Vec::new();
                    weilgap::io::write_coeffs(&f, &mut buf)?;
                    let lines: Vec<Value> = String::from_utf8(buf)?
                        .lines()
                        .map(serde_json::from_str)
                        .collect::<std::result::Result<_, _>>()?;
                    Ok((json!({"header": header, "lines": lines}), true))
                }
            }
        }
        Command::Lambda(a) => {
            let forms = load_forms(&a.form)?;
            let chi = character(&a.form)?;
            let fe = FEStatement::resolve(&source(&chi), a.form.k, a.a, a.q)?;
            let s = parse_complex(&a.s)?;
            let y0 = a.y0.unwrap_or_else(|| fe.default_y0());
            let twist = AdditiveTwist::new(a.a, a.q)?;
            let v = lambda_additive(&forms.f, twist, s, y0, Some((&forms.g, &fe)))?;
            Ok((json!({"fe": fe, "lambda": v}), true))
        }
        Command::CheckFe(a) => {
            let forms = load_forms(&a.form)?;
            let chi = character(&a.form)?;
            let fe = FEStatement::resolve(&source(&chi), a.form.k, a.a, a.q)?;
            let opts = FeOptions {
                tolerance: a.tol,
                ..FeOptions::default()
            };
            let s = samples(&a.s, a.form.k, forms.f.sigma)?;
            let r = check_fe_additive(&forms.f, &forms.g, &fe, &s, &opts)?;
            let ok = r.pass;
            Ok((json!({"fe": fe, "report": r}), ok))
        }
        Command::CheckFeMult(a) => {
            let forms = load_forms(&a.form)?;
            let chi = character(&a.form)?;
            let psi = choose_psi(a.q, &a.psi)?;
            let opts = FeOptions {
                tolerance: a.tol,
                ..FeOptions::default()
            };
            let s = samples(&a.s, a.form.k, forms.f.sigma)?;
            let r = check_fe_multiplicative(&forms.f, &forms.g, &source(&chi), a.form.k, &psi, &s, &opts)?;
            let ok = r.pass;
            // a value of the assembled multiplicative L-series at the first sample
            let first = lambda_multiplicative(&forms.f, &forms.g, &source(&chi), a.form.k, &psi, s[0], None)?;
            Ok((json!({"psi": psi.label, "report": r, "lambda_first_sample": first}), ok))
        }
        Command::Certify(a) => {
            let forms = load_forms(&a.form)?;
            let chi = character(&a.form)?
                .ok_or_else(|| anyhow!("certify needs a prime level p > 3"))?;
            let cert = certify_modularity(&forms.f, &forms.g, a.form.p, a.form.k, &chi, a.tol)?;
            let ok = cert.verdict;
            Ok((serde_json::to_value(cert)?, ok))
        }
        Command::ReproduceAll(a) => {
            let report = reproduce_all(a.seed, !a.no_experiments);
            let v = serde_json::to_value(&report)?;
            if let Some(out) = &a.out {
                write_json(out, &v)?;
            }
            for c in &report.criteria {
                eprintln!(
                    "criterion {:>2} {} {} ({:.2} s)",
                    c.id,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.wall_time_s
                );
            }
            Ok((v, report.all_pass))
        }
    }
}

fn gens_table(v: &Value) -> String {
    let mut out = format!(
        "p = {}  l = {}  a = {}  b = {}  Q = {}\n",
        v["p"], v["l"], v["a"], v["b"], v["Q"]
    );
    out.push_str(&format!("{:<8} {:<6} matrix\n", "label", "order"));
    for g in v["generators"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "{:<8} {:<6} {}\n",
            g["label"].as_str().unwrap_or(""),
            g["order"].as_str().unwrap_or(""),
            g["matrix"]
        ));
    }
    out
}

fn configure_threads() {
    if let Some(n) = std::env::var("WEILGAP_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let config = serde_json::to_value(&cli.command).expect("plain data");
    match run(&cli.command) {
        Ok((result, ok)) => {
            if let Command::Gens(GensArgs { table: true, .. }) = cli.command {
                emit(&gens_table(&result));
            } else {
                let mut doc = json!({"config": config, "pass": ok});
                if let (Some(obj), Some(res)) = (doc.as_object_mut(), result.as_object()) {
                    for (k, v) in res {
                        obj.insert(k.clone(), v.clone());
                    }
                } else {
                    doc["result"] = result;
                }
                emit(&(serde_json::to_string_pretty(&doc).expect("plain data") + "\n"));
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let cli = Cli::try_parse_from([
            "weilgap", "check-fe", "--p", "11", "--k", "12", "--coeffs", "f.json", "--q", "3",
            "--a", "-1", "--s", "6,1", "--s", "7,-2",
        ])
        .unwrap();
        let v = serde_json::to_value(&cli.command).unwrap();
        let back: Command = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), v);
        assert_eq!(v["a"], -1);
        assert_eq!(v["command"], "check-fe");
    }

    #[test]
    fn parsing_helpers() {
        assert_eq!(parse_complex("6,-1.5").unwrap(), Complex::new(6.0, -1.5));
        assert_eq!(parse_complex("3").unwrap(), Complex::new(3.0, 0.0));
        assert!(parse_complex("a,b").is_err());
        assert!(parse_matrix("1,2,3").is_err());
        assert!(parse_matrix("2,0,0,2").is_err());
        assert!(parse_matrix("1,1,0,1").is_ok());
    }
}
