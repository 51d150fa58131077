//! Commands behind the `natop` binary: each one produces a report and an
//! exit status (0 all checks pass, 1 a check failed, 2 usage or input error).

pub mod dsl;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph_space::{
    bridge::decoration_symbol, check_vforder_bound, decorated_space, dim_h0_via_delta_h, independence_rank, to_tensor_term,
    Realization, Vertex,
};
use crate::jet_calculus::ideal::{aa_ideal, aa_naive, b3_naive, verify_ideal_suite};
use crate::jet_calculus::identities::{identity, IDENTITY_NAMES};
use crate::jet_calculus::{check_zero, check_zero_random, required_order, JetContext, Kind, Verdict};
use crate::perm_algebra::{generates_kernel, kernel_basis, submodule_rank, GeneratorFamily};
use crate::Q;

/// Negative controls accepted by `verify` besides the identity residuals.
pub const CONTROL_NAMES: &[&str] = &["aa-naive", "aa-ideal", "b3-naive"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Latex,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Classical,
    Canonical,
}

impl Family {
    fn generators(self) -> GeneratorFamily<Q> {
        match self {
            Family::Classical => GeneratorFamily::Classical,
            Family::Canonical => GeneratorFamily::Canonical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Dim { d: usize, m: Option<usize> },
    Kernel { n: usize, family: Family },
    Verify { identity: String, n: Option<usize>, m: usize, mode: Mode },
    VerifyIdeal { n: usize, m: usize },
    Basis { d: usize },
    Parse { expr: String },
}

/// Run-wide settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for Settings {
    fn default() -> Self {
        Self { trials: 8, seed: 0, format: Format::Json }
    }
}

/// Defaults read from a `key = value` file; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidInput(format!("config line {}: {what}", no + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let v = v.trim();
            match k.trim() {
                "m" => c.m = Some(v.parse().map_err(|_| bad("m must be an integer"))?),
                "trials" => c.trials = Some(v.parse().map_err(|_| bad("trials must be an integer"))?),
                "seed" => c.seed = Some(v.parse().map_err(|_| bad("seed must be an integer"))?),
                "mode" => {
                    c.mode = Some(match v {
                        "exact" => Mode::Exact,
                        "random" => Mode::Random,
                        _ => return Err(bad("mode must be exact or random")),
                    })
                }
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// A finished command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub status: i32,
}

fn verdict_json(v: &Verdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

fn status_of(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

/// Runs a command. Errors become a report with status 2.
pub fn run(cmd: &Command, settings: &Settings) -> Outcome {
    match run_inner(cmd, settings) {
        Ok(o) => o,
        Err(e) => Outcome { report: error_json(&e), status: 2 },
    }
}

pub fn error_json(e: &Error) -> Value {
    match e {
        Error::Parse { start, end, message, expected } => json!({
            "error": "parse",
            "message": message,
            "span": [start, end],
            "expected": expected,
        }),
        other => json!({ "error": "input", "message": other.to_string() }),
    }
}

fn run_inner(cmd: &Command, s: &Settings) -> Result<Outcome> {
    match cmd {
        Command::Dim { d, m } => dim(*d, *m, s),
        Command::Kernel { n, family } => kernel(*n, *family),
        Command::Verify { identity, n, m, mode } => verify(identity, *n, *m, *mode, s),
        Command::VerifyIdeal { n, m } => {
            let report = verify_ideal_suite::<Q>(*n, &JetContext::new(*m))?;
            let ok = report.values().all(Verdict::is_zero);
            let checks: BTreeMap<String, Value> = report.iter().map(|(k, v)| (k.clone(), verdict_json(v))).collect();
            Ok(Outcome { report: json!({ "n": n, "m": m, "checks": checks, "pass": ok }), status: status_of(ok) })
        }
        Command::Basis { d } => basis(*d),
        Command::Parse { expr } => {
            let t = dsl::parse::<Q>(expr)?;
            let canonical = dsl::print(&t);
            let order = required_order(&t, 2)?;
            let kind = match t.kind() {
                Kind::Vector => "vector",
                Kind::Scalar => "scalar",
            };
            Ok(Outcome {
                report: json!({ "input": expr, "canonical": canonical, "degree": t.degree(), "kind": kind, "jet_order": order }),
                status: 0,
            })
        }
    }
}

fn dim(d: usize, m: Option<usize>, s: &Settings) -> Result<Outcome> {
    let space = decorated_space::<Q>(d)?;
    let decorated = space.dimension();
    let via_delta = dim_h0_via_delta_h::<Q>(d)?;
    let mut profile: BTreeMap<String, usize> = BTreeMap::new();
    for g in space.basis() {
        *profile.entry(g.vforder().to_string()).or_insert(0) += 1;
    }
    let mut report = json!({
        "d": d,
        "dimension": decorated,
        "decorated_model": decorated,
        "delta_h_model": via_delta,
        "models_agree": decorated == via_delta,
        "vforder_profile": profile,
    });
    let mut ok = decorated == via_delta;
    if let Some(m) = m {
        // each trial contributes m columns
        let trials = s.trials.max(decorated.div_ceil(m.max(1)) + 1);
        let rank = independence_rank::<Q>(d, m, trials, GeneratorFamily::Classical)?;
        report["m"] = json!(m);
        report["trials"] = json!(trials);
        report["independence_rank"] = json!(rank);
        report["stable_range"] = json!(m + 1 >= 2 * d);
        ok &= rank <= decorated;
    }
    Ok(Outcome { report, status: status_of(ok) })
}

fn kernel(n: usize, family: Family) -> Result<Outcome> {
    let fam = family.generators();
    let basis = kernel_basis::<Q>(n)?;
    let members = fam.members(n)?;
    let symbols = fam.symbols(n)?;
    let rank = submodule_rank(&symbols)?;
    let generates = generates_kernel(&symbols)?;
    let names: Vec<&String> = members.iter().map(|(name, _)| name).collect();
    Ok(Outcome {
        report: json!({
            "n": n,
            "family": fam.name(),
            "ambient_dimension": n * (n - 1),
            "dimension": basis.len(),
            "generators": names,
            "submodule_rank": rank,
            "generates": generates,
        }),
        status: status_of(generates),
    })
}

fn verify(name: &str, n: Option<usize>, m: usize, mode: Mode, s: &Settings) -> Result<Outcome> {
    let ctx = JetContext::new(m);
    let control = |want: usize| -> Result<()> {
        match n {
            Some(k) if k != want => Err(Error::InvalidInput(format!("{name} is defined for n = {want}, got {k}"))),
            _ => Ok(()),
        }
    };
    let (verdict, expect_zero) = match name {
        "aa-naive" => {
            control(3)?;
            (aa_naive::<Q>(&ctx)?, false)
        }
        "aa-ideal" => {
            control(3)?;
            (aa_ideal::<Q>(&ctx)?, true)
        }
        "b3-naive" => {
            control(4)?;
            (b3_naive::<Q>(&ctx)?, false)
        }
        _ => {
            if !IDENTITY_NAMES.contains(&name) {
                let all: Vec<&str> = IDENTITY_NAMES.iter().chain(CONTROL_NAMES).copied().collect();
                return Err(Error::InvalidInput(format!("unknown identity '{name}'; expected one of {}", all.join(", "))));
            }
            let id = identity::<Q>(name)?;
            let ctx = JetContext { symmetric: id.symmetric, ..ctx };
            let v = match mode {
                Mode::Exact => check_zero(&id.residual, &ctx)?,
                Mode::Random => check_zero_random(&id.residual, &ctx, s.trials, s.seed)?,
            };
            (v, id.expect_zero)
        }
    };
    let mode = if CONTROL_NAMES.contains(&name) { Mode::Exact } else { mode };
    let mut report = json!({
        "identity": name,
        "dimension": m,
        "m": m,
        "witness": Value::Null,
        "mode": mode,
        "expected": if expect_zero { "zero" } else { "nonzero" },
    });
    if mode == Mode::Random {
        report["trials"] = json!(s.trials);
        report["seed"] = json!(s.seed);
    }
    if let Value::Object(extra) = verdict_json(&verdict) {
        report.as_object_mut().unwrap().extend(extra);
    }
    Ok(Outcome { report, status: status_of(verdict.is_zero()) })
}

fn basis(d: usize) -> Result<Outcome> {
    let space = decorated_space::<Q>(d)?;
    let mut real = Realization::new(GeneratorFamily::<Q>::Classical);
    let mut items = Vec::new();
    for g in space.basis() {
        let decorations = g
            .vertices
            .iter()
            .filter_map(|v| match *v {
                Vertex::Decorated { arity, decoration } => Some(decoration_symbol::<Q>(arity, decoration).map(|e| e.to_json())),
                _ => None,
            })
            .collect::<Result<Vec<_>>>()?;
        items.push(json!({
            "graph": g.to_string(),
            "decorations": decorations,
            "vforder": g.vforder(),
            "term": dsl::print(&to_tensor_term(g, &mut real)?),
        }));
    }
    Ok(Outcome { report: json!({ "d": d, "dimension": space.dimension(), "basis": items }), status: 0 })
}

/// Checks of the contraction-scheme vf-order bound, exposed for reports.
pub fn bound_report(d: usize, a: usize) -> Result<Value> {
    Ok(serde_json::to_value(check_vforder_bound::<Q>(d, a, &GeneratorFamily::Classical)?).expect("serializable"))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn latex_escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}")
        .replace('_', "\\_")
        .replace('&', "\\&")
        .replace('%', "\\%")
        .replace('#', "\\#")
        .replace('{', "\\{")
        .replace('}', "\\}")
}

/// Renders a report. JSON keys are sorted, so output is byte-stable.
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("values serialize") + "\n",
        Format::Text => {
            let mut out = String::new();
            if let Value::Object(map) = report {
                for (k, v) in map {
                    match v {
                        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                            let _ = writeln!(out, "{k}:");
                            for it in items {
                                let fields: Vec<String> =
                                    it.as_object().unwrap().iter().map(|(a, b)| format!("{a}={}", scalar_text(b))).collect();
                                let _ = writeln!(out, "  {}", fields.join("  "));
                            }
                        }
                        Value::Object(inner) => {
                            let _ = writeln!(out, "{k}:");
                            for (a, b) in inner {
                                let _ = writeln!(out, "  {a}: {}", scalar_text(b));
                            }
                        }
                        other => {
                            let _ = writeln!(out, "{k}: {}", scalar_text(other));
                        }
                    }
                }
            }
            out
        }
        Format::Latex => {
            let mut out = String::from("\\begin{tabular}{ll}\n\\hline\n");
            if let Value::Object(map) = report {
                for (k, v) in map {
                    match v {
                        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                            for (i, it) in items.iter().enumerate() {
                                let obj = it.as_object().unwrap();
                                let term = obj.get("term").map(scalar_text).unwrap_or_default();
                                let vf = obj.get("vforder").map(scalar_text).unwrap_or_default();
                                let _ = writeln!(
                                    out,
                                    "{} {} & \\texttt{{{}}} (vf-order {}) \\\\",
                                    latex_escape(k),
                                    i + 1,
                                    latex_escape(&term),
                                    vf
                                );
                            }
                        }
                        Value::Object(inner) => {
                            for (a, b) in inner {
                                let _ = writeln!(out, "{} & {} \\\\", latex_escape(&format!("{k}.{a}")), latex_escape(&scalar_text(b)));
                            }
                        }
                        other => {
                            let _ = writeln!(out, "{} & {} \\\\", latex_escape(k), latex_escape(&scalar_text(other)));
                        }
                    }
                }
            }
            out.push_str("\\hline\n\\end{tabular}\n");
            out
        }
    }
}
