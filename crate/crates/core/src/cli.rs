//! `tmr` command-line interface.
//!
//! Every command writes one JSON document or CSV table to `--out` (stdout when
//! absent). With `--out` set, the invocation is recorded in `<out>.manifest.json`
//! and the wall-clock time of the run in `<out>.timestamp`, so result files stay
//! byte-identical across repeated runs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equivalence::{adachi_split, ruf_normalize, ConstantTag};
use crate::error::{Error, Result};
use crate::inequalities::{
    alvino_ratio_sup, at_asymptotic_constant, at_constant_eps, at_quadratic_bound, best_eps, check_adachi, check_limine,
    check_zcharact, zygmund_quasinorm,
};
use crate::optimizer::{blowup_scan, maximize, vanishing_probe, ConstraintSet};
use crate::profile::{RadialProfile, DEFAULT_TOL, FOUR_PI};
use crate::rearrangement::{decreasing_rearrangement, WeightedSamples};
use crate::sequences::{zygmund_optimal, Family, SequenceSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Relative tolerance of the oracle comparison.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "tmr", version, about = "Radial profiles, Trudinger-Moser functionals and sharp-constant checks")]
pub struct Cli {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative quadrature tolerance, in [1e-14, 1e-6].
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare every family's norms with their closed forms.
    ///
    /// Columns: family, params, quantity, computed, oracle, rel_err, status.
    /// Exits 1 on the first mismatch beyond 1e-10 relative.
    Oracles {
        /// JSON array of {family, params, quantity, oracle} rows to compare against
        /// instead of the built-in closed forms.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Functional value and norms of a profile.
    Eval {
        #[command(flatten)]
        source: ProfileSource,
        #[arg(long)]
        beta: f64,
    },
    /// Write a family member as profile JSON.
    Sequence {
        #[command(flatten)]
        source: ProfileSource,
    },
    /// Decreasing rearrangement of `value,area` rows.
    Rearrange {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check one inequality on a profile. Exits 1 if it fails.
    Verify {
        #[arg(long, value_enum)]
        inequality: Inequality,
        #[command(flatten)]
        source: ProfileSource,
        #[arg(long)]
        beta: Option<f64>,
        /// Window measure T of the Alvino check.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run one of the constructive rescalings and the identity chain.
    Equivalence {
        #[arg(long, value_enum)]
        direction: Direction,
        #[command(flatten)]
        source: ProfileSource,
        /// Required for ruf-to-at.
        #[arg(long)]
        beta: Option<f64>,
        /// Estimate of d_4π (for instance an `optimize --constraint ruf` best value);
        /// adds `bound.value` when the bound is tagged d4_pi.
        #[arg(long)]
        d4pi: Option<f64>,
    },
    /// Maximise J_beta under a norm budget.
    Optimize {
        #[arg(long, value_enum)]
        constraint: ConstraintKind,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 32)]
        knots: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// J_beta along the counterexample sequence fitted to a reduced budget.
    ///
    /// Columns: beta, n, log_n, j_beta, lower_bound, quad_error.
    ScanBlowup {
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<u64>,
    },
    /// J_beta of lambda phi(lambda x) for a fixed bump phi.
    ///
    /// Columns: lambda, j_beta, remainder, vanishing_level, dirichlet_sq, l2_sq.
    ScanVanishing {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
    },
    /// Finite versions of the asymptotic displays.
    ///
    /// blowup: beta, n, log_n, j_beta, lower_bound, quad_error for delta = 0, K = 1,
    /// beta in {2pi, 4pi}, n in {1e3, ..., 1e6}.
    /// constants: beta, best_eps, c_eps, quadratic_bound, inverse_gap, ratio,
    /// asymptotic, where ratio = c_eps / quadratic_bound.
    /// zygmund-optimality: k, quasinorm, sobolev_norm, ratio, window_ratio, where
    /// ratio = sqrt(4 pi) quasinorm / sobolev_norm.
    Table {
        #[arg(value_enum)]
        table: TableName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Inequality {
    Alvino,
    Limine,
    Adachi,
    Zcharact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Rescale an `||∇u|| <= 1` profile into the unit Sobolev ball.
    RufToAt,
    /// Split a unit-Sobolev-ball profile at `||∇u||² = 1/2`.
    AtToRuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintKind {
    Reduced,
    Ruf,
    NormSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    Blowup,
    Constants,
    ZygmundOptimality,
}

/// A profile read from JSON or built from a named family.
#[derive(Debug, Args)]
pub struct ProfileSource {
    #[arg(long, conflicts_with = "family")]
    pub profile: Option<PathBuf>,
    /// moser | counterexample | alvino | cap | zygmund | modified-moser
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "T")]
    pub family_t: Option<f64>,
    #[arg(long = "R")]
    pub r: Option<f64>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl ProfileSource {
    pub fn spec(&self) -> Result<SequenceSpec> {
        let name = self.family.as_deref().ok_or_else(|| usage("give --profile or --family"))?;
        let need_n = || self.n.ok_or_else(|| usage(format!("family {name} needs --n")));
        let need_k = || self.k.ok_or_else(|| usage(format!("family {name} needs --k")));
        Ok(match name.parse::<Family>()? {
            Family::Moser => SequenceSpec::Moser { n: need_n()? },
            Family::Counterexample => SequenceSpec::Counterexample { n: need_n()? },
            Family::ModifiedMoser => SequenceSpec::ModifiedMoser { n: need_n()? },
            Family::Alvino => SequenceSpec::AlvinoExtremal {
                t: self.family_t.ok_or_else(|| usage("family alvino needs --T"))?,
                delta: self.delta.ok_or_else(|| usage("family alvino needs --delta"))?,
            },
            Family::Cap => SequenceSpec::Cap { k: need_k()?, r: self.r.unwrap_or(1.0) },
            Family::Zygmund => SequenceSpec::ZygmundOptimal { k: need_k()? },
        })
    }

    pub fn load(&self) -> Result<RadialProfile> {
        match &self.profile {
            Some(path) => read_profile(path),
            None => self.spec()?.build(),
        }
    }
}

pub fn read_profile(path: &Path) -> Result<RadialProfile> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidProfile(format!("{}: {e}", path.display())))
}

/// Result of a command before formatting.
pub enum Output {
    Doc(Value),
    Table { header: Vec<&'static str>, rows: Vec<Vec<Value>> },
}

/// Floats with 17 significant digits and a '.' separator.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

/// `f64::INFINITY` is not representable in JSON; report it as a string.
fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Output::Doc(v), Format::Json) => Ok(serde_json::to_string_pretty(v).expect("serialisable") + "\n"),
            (Output::Doc(v), Format::Csv) => {
                let mut pairs = Vec::new();
                flatten("", v, &mut pairs);
                let rows = pairs.into_iter().map(|(k, x)| vec![k, cell(&x)]).collect();
                write_csv(&["key", "value"], rows)
            }
            (Output::Table { header, rows }, Format::Csv) => {
                write_csv(header, rows.iter().map(|r| r.iter().map(cell).collect()).collect())
            }
            (Output::Table { header, rows }, Format::Json) => {
                let docs: Vec<Value> = rows
                    .iter()
                    .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                Ok(serde_json::to_string_pretty(&docs).expect("serialisable") + "\n")
            }
        }
    }
}

fn write_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub family: String,
    pub params: String,
    pub quantity: String,
    pub computed: f64,
    pub oracle: f64,
    pub rel_err: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub family: String,
    pub params: String,
    pub quantity: String,
    pub oracle: f64,
}

/// Family members covered by the oracle command.
pub fn oracle_suite() -> Vec<SequenceSpec> {
    let ns = [10u64, 100, 10_000, 1_000_000];
    let ks = [1.0, 4.0, 16.0, 64.0];
    let mut specs = Vec::new();
    specs.extend(ns.iter().map(|&n| SequenceSpec::Moser { n }));
    specs.extend(ns.iter().map(|&n| SequenceSpec::Counterexample { n }));
    specs.extend(ns.iter().map(|&n| SequenceSpec::ModifiedMoser { n }));
    specs.extend(ks.iter().map(|&k| SequenceSpec::Cap { k, r: 1.0 }));
    specs.extend(ks.iter().map(|&k| SequenceSpec::Cap { k, r: 2.0 }));
    specs.extend(ks.iter().map(|&k| SequenceSpec::ZygmundOptimal { k }));
    let e = std::f64::consts::E;
    for t in [std::f64::consts::PI, 10.0] {
        for delta in [e, e.powi(4)] {
            specs.push(SequenceSpec::AlvinoExtremal { t, delta });
        }
    }
    specs
}

fn spec_tag(spec: &SequenceSpec) -> String {
    serde_json::to_value(spec).expect("serialisable")["family"].as_str().expect("tagged").to_string()
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Oracle rows for the whole suite, against the closed forms or `expected`.
pub fn oracle_rows(expected: Option<&[ExpectedRow]>) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for spec in oracle_suite() {
        let p = spec.build()?;
        let closed = spec.closed_form()?;
        let (family, params) = (spec_tag(&spec), spec.params());
        for (quantity, computed, oracle) in [
            ("dirichlet_sq", p.dirichlet_norm_sq(), closed.dirichlet_sq),
            ("l2_sq", p.l2_norm_sq(), closed.l2_sq),
        ] {
            let oracle = match expected {
                None => oracle,
                Some(rows) => match rows.iter().find(|r| r.family == family && r.params == params && r.quantity == quantity) {
                    Some(r) => r.oracle,
                    None => continue,
                },
            };
            let rel_err = relative(computed, oracle);
            rows.push(OracleRow {
                family: family.clone(),
                params: params.clone(),
                quantity: quantity.into(),
                computed,
                oracle,
                rel_err,
                pass: rel_err <= ORACLE_TOL,
            });
        }
    }
    Ok(rows)
}

/// Command output and whether its check passed.
pub struct Outcome {
    pub output: Output,
    pub ok: bool,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Outcome { output, ok: true, message: None }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Replaces non-finite floats, which serde_json writes as `null`, by strings.
fn report_value(pairs: &[(&str, f64)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), json_f64(*v))).collect())
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol;
    crate::profile::check_tol(tol)?;
    Ok(match &cli.command {
        Command::Oracles { expected } => {
            let expected: Option<Vec<ExpectedRow>> = match expected {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    Some(serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?)
                }
                None => None,
            };
            let rows = oracle_rows(expected.as_deref())?;
            let failing = rows.iter().find(|r| !r.pass).cloned();
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        json!(r.family),
                        json!(r.params),
                        json!(r.quantity),
                        json!(r.computed),
                        json!(r.oracle),
                        json!(r.rel_err),
                        json!(if r.pass { "pass" } else { "FAIL" }),
                    ]
                })
                .collect();
            Outcome {
                output: Output::Table {
                    header: vec!["family", "params", "quantity", "computed", "oracle", "rel_err", "status"],
                    rows: table,
                },
                ok: failing.is_none(),
                message: failing.map(|r| {
                    format!("oracle mismatch: {} {} {}: computed {} vs {}", r.family, r.params, r.quantity, r.computed, r.oracle)
                }),
            }
        }
        Command::Eval { source, beta } => {
            let p = source.load()?;
            let rep = p.tm_functional(*beta, tol)?;
            let q = zygmund_quasinorm(&p);
            Outcome::ok(Output::Doc(report_value(&[
                ("beta", rep.beta),
                ("j_beta", rep.j_beta),
                ("dirichlet_sq", rep.dirichlet_sq),
                ("l2_sq", rep.l2_sq),
                ("sobolev_sq", rep.sobolev_sq),
                ("quad_error", rep.quad_error),
                ("zygmund_quasinorm", q.value),
                ("t_support", p.t_support()),
            ])))
        }
        Command::Sequence { source } => Outcome::ok(Output::Doc(to_value(&source.spec()?.build()?))),
        Command::Rearrange { input } => {
            let file = fs::File::open(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let p = decreasing_rearrangement(&WeightedSamples::from_csv(file)?)?;
            Outcome::ok(Output::Doc(to_value(&p)))
        }
        Command::Verify { inequality, source, beta, window, lambda } => {
            let p = source.load()?;
            let report = match inequality {
                Inequality::Alvino => alvino_ratio_sup(&p, window.ok_or_else(|| usage("alvino needs --window"))?)?,
                Inequality::Limine => check_limine(&p),
                Inequality::Adachi => check_adachi(&p, beta.ok_or_else(|| usage("adachi needs --beta"))?, tol)?,
                Inequality::Zcharact => check_zcharact(&p, lambda.ok_or_else(|| usage("zcharact needs --lambda"))?, tol)?,
            };
            let mut doc = report_value(&[("lhs", report.lhs), ("rhs", report.rhs), ("slack", report.slack)]);
            doc["holds"] = json!(report.holds);
            doc["witness"] = to_value(&report.witness);
            Outcome {
                output: Output::Doc(doc),
                ok: report.holds,
                message: (!report.holds).then(|| format!("{inequality:?} fails: lhs {} > rhs {}", report.lhs, report.rhs)),
            }
        }
        Command::Equivalence { direction, source, beta, d4pi } => {
            let p = source.load()?;
            let trace = match direction {
                Direction::RufToAt => ruf_normalize(&p, beta.ok_or_else(|| usage("ruf-to-at needs --beta"))?)?,
                Direction::AtToRuf => adachi_split(&p)?,
            };
            let chain = trace.chain_values(tol)?;
            let mut doc = to_value(&trace);
            doc["chain_values"] = json!(chain);
            doc["chain_spread"] = json!(trace.chain_spread(tol)?);
            if let Some(d) = d4pi {
                if !(*d > 0.0 && d.is_finite()) {
                    return Err(usage("--d4pi must be positive and finite"));
                }
                if trace.bound.tag == ConstantTag::D4Pi {
                    doc["bound"]["value"] = json!(trace.bound.coefficient * d);
                }
            }
            Outcome::ok(Output::Doc(doc))
        }
        Command::Optimize { constraint, beta, delta, k, tau, knots, budget } => {
            let c = match constraint {
                ConstraintKind::Reduced => ConstraintSet::Reduced { delta: *delta, k: *k },
                ConstraintKind::Ruf => ConstraintSet::Ruf { tau: *tau },
                ConstraintKind::NormSum => ConstraintSet::NormSum,
            };
            let res = maximize(&c, *beta, *knots, *budget, cli.seed, tol)?;
            let ok = res.exceeds_vanishing_level || !matches!(c, ConstraintSet::Reduced { .. });
            let mut doc = to_value(&res);
            // timing lives in the timestamp file so results are reproducible
            if let Value::Object(map) = &mut doc {
                map.remove("wall_time");
            }
            Outcome {
                output: Output::Doc(doc),
                ok,
                message: (!ok).then(|| format!("best value {} does not exceed the vanishing level", res.best_value)),
            }
        }
        Command::ScanBlowup { delta, k, betas, ns } => Outcome::ok(blowup_table(*delta, *k, betas, ns, tol)?),
        Command::ScanVanishing { beta, delta, k, lambdas } => {
            let rows = vanishing_probe(&ConstraintSet::Reduced { delta: *delta, k: *k }, *beta, lambdas, tol)?;
            Outcome::ok(Output::Table {
                header: vec!["lambda", "j_beta", "remainder", "vanishing_level", "dirichlet_sq", "l2_sq"],
                rows: rows
                    .iter()
                    .map(|r| vec![json!(r.lambda), json!(r.j_beta), json!(r.remainder), json!(r.vanishing_level), json!(r.dirichlet_sq), json!(r.l2_sq)])
                    .collect(),
            })
        }
        Command::Table { table } => Outcome::ok(match table {
            TableName::Blowup => {
                blowup_table(0.0, 1.0, &[0.5 * FOUR_PI, FOUR_PI], &[1_000, 10_000, 100_000, 1_000_000], tol)?
            }
            TableName::Constants => constants_table()?,
            TableName::ZygmundOptimality => zygmund_table()?,
        }),
    })
}

fn blowup_table(delta: f64, k: f64, betas: &[f64], ns: &[u64], tol: f64) -> Result<Output> {
    let rows = blowup_scan(delta, k, betas, ns, tol)?;
    let n_of = |log_n: f64| ns.iter().copied().find(|n| (*n as f64).ln() == log_n).unwrap_or(0);
    Ok(Output::Table {
        header: vec!["beta", "n", "log_n", "j_beta", "lower_bound", "quad_error"],
        rows: rows
            .iter()
            .map(|r| vec![json!(r.beta), json!(n_of(r.log_n)), json!(r.log_n), json!(r.j_beta), json!(r.lower_bound), json!(r.quad_error)])
            .collect(),
    })
}

/// β grid of the constants table, in multiples of π.
pub const CONSTANTS_BETAS: [f64; 6] = [1.0, 2.0, 3.0, 3.5, 3.9, 3.99];

pub fn constants_table() -> Result<Output> {
    let mut rows = Vec::new();
    for m in CONSTANTS_BETAS {
        let beta = m * std::f64::consts::PI;
        let eps = best_eps(beta)?;
        let c_eps = at_constant_eps(beta, eps)?;
        let quad = at_quadratic_bound(beta)?;
        rows.push(vec![
            json!(beta),
            json!(eps),
            json!(c_eps),
            json!(quad),
            json!(1.0 / (1.0 - beta / FOUR_PI)),
            json!(c_eps / quad),
            json!(at_asymptotic_constant(beta)?),
        ]);
    }
    Ok(Output::Table {
        header: vec!["beta", "best_eps", "c_eps", "quadratic_bound", "inverse_gap", "ratio", "asymptotic"],
        rows,
    })
}

pub const ZYGMUND_KS: [f64; 5] = [1.0, 4.0, 16.0, 64.0, 256.0];

pub fn zygmund_table() -> Result<Output> {
    let mut rows = Vec::new();
    for k in ZYGMUND_KS {
        let p = zygmund_optimal(k)?;
        let q = zygmund_quasinorm(&p).value;
        let s = p.sobolev_sq(1.0).sqrt();
        rows.push(vec![
            json!(k),
            json!(q),
            json!(s),
            json!(FOUR_PI.sqrt() * q / s),
            json!(crate::sequences::zygmund_window_ratio(k, 2.0)),
        ]);
    }
    Ok(Output::Table { header: vec!["k", "quasinorm", "sobolev_norm", "ratio", "window_ratio"], rows })
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    args: Vec<String>,
    seed: u64,
    tol: f64,
    format: &'a str,
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn emit(cli: &Cli, args: &[String], text: &str) -> std::io::Result<()> {
    let manifest = Manifest {
        tool: "tmr",
        version: env!("CARGO_PKG_VERSION"),
        args: args.to_vec(),
        seed: cli.seed,
        tol: cli.tol,
        format: match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
        },
    };
    let manifest = serde_json::to_string_pretty(&manifest).expect("serialisable") + "\n";
    match &cli.out {
        Some(out) => {
            fs::write(out, text)?;
            fs::write(sidecar(out, ".manifest.json"), manifest)?;
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
            fs::write(sidecar(out, ".timestamp"), format!("{secs:.3}\n"))
        }
        None => {
            print!("{text}");
            eprint!("{manifest}");
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_input_error() { EXIT_USAGE } else { EXIT_CHECK_FAILED };
        }
    };
    let text = match outcome.output.render(cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let printable: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    if let Err(e) = emit(&cli, &printable, &text) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match outcome.message {
        Some(m) => {
            eprintln!("check failed: {m}");
            EXIT_CHECK_FAILED
        }
        None if !outcome.ok => EXIT_CHECK_FAILED,
        None => EXIT_OK,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::TAU, 1e-300, 12345.678] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn oracle_suite_passes() {
        let rows = oracle_rows(None).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{:?}", rows.iter().find(|r| !r.pass));
        let z = rows.iter().find(|r| r.family == "zygmund_optimal" && r.params == "k=1" && r.quantity == "l2_sq").unwrap();
        assert!((z.oracle - 0.132_120_6).abs() < 1e-7);
        let m = rows.iter().find(|r| r.family == "moser" && r.params == "n=10" && r.quantity == "dirichlet_sq").unwrap();
        assert_eq!(m.oracle, 1.0);
        assert!((m.computed - 1.0).abs() < 1e-15 && m.pass);
    }

    #[test]
    fn edited_oracle_fails() {
        let expected = vec![ExpectedRow { family: "moser".into(), params: "n=10".into(), quantity: "l2_sq".into(), oracle: 0.1025 }];
        let rows = oracle_rows(Some(&expected)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].pass);
    }

    #[test]
    fn csv_flattening() {
        let out = Output::Doc(json!({"a": 1.5, "b": {"c": [1, 2]}}));
        let text = out.render(Format::Csv).unwrap();
        assert_eq!(text, "key,value\na,1.5000000000000000e0\nb.c.0,1\nb.c.1,2\n");
    }
}
