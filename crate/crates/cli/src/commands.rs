use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use ggs_core::cache::{self, quotient_cached};
use ggs_core::vector::{self, tf_candidate_count, tf_witness_bounded, TfStatus, TF_BRUTE_FORCE_BOUND};
use ggs_core::verify::{default_grid, run_suite, CheckId, Fault, SuiteConfig, Verdict};
use ggs_core::{log_p, Error, Ggs, InfiniteCertificate, OrderResult, PermGroup, QuotientRep, Step};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::grid::parse_grid;
use crate::{Format, GlobalArgs, GroupArgs};

pub const SCHEMA: &str = include_str!("../schema/verification-report.schema.json");

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::DegreeExceeded { .. } | Error::DepthExceeded { .. } | Error::BruteForceBound { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

pub type Outcome = Result<u8, Failure>;

/// Stdout writes ignore a closed pipe (`ggs ... | head`).
fn out(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn emit(format: Format, value: &Value, text: &str) {
    match format {
        Format::Json => out(&format!("{}\n", serde_json::to_string_pretty(value).expect("json"))),
        Format::Text => out(text),
    }
}

fn tuple(xs: &[u32]) -> String {
    let parts: Vec<String> = xs.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn classify(g: &GlobalArgs, group: &GroupArgs, tf_bound: u32) -> Outcome {
    let ggs = group.ggs(g.depth_cap)?;
    let e = ggs.vector();
    let p = e.p();
    let mut class = vector::classify(e);
    if p > TF_BRUTE_FORCE_BOUND && tf_bound >= p {
        eprintln!("note: TF enumeration visits {:.3e} candidate vectors", tf_candidate_count(p));
    }
    let refusal = match tf_witness_bounded(e, tf_bound) {
        Ok(None) => {
            class.tf_status = TfStatus::Holds;
            None
        }
        Ok(Some(witness)) => {
            class.tf_status = TfStatus::Fails { witness };
            None
        }
        Err(err) => Some(err),
    };

    // Known results keyed on the class: stated, not computed.
    let mut known = Vec::new();
    if class.is_constant {
        known.push("CSP: no, infinite congruence kernel");
        known.push("not branch");
    } else {
        known.push("CSP: yes");
    }
    if class.tf_status == TfStatus::Holds {
        known.push("G' is torsion-free (property TF)");
    }
    let multiples: Vec<Value> = (2..p)
        .map(|lambda| {
            let m = e.scale(lambda).expect("non-zero scalar");
            json!({ "lambda": lambda, "e": m.entries() })
        })
        .collect();

    let value = json!({
        "p": p,
        "e": e.entries(),
        "class": class,
        "tf_refusal": refusal.as_ref().map(Error::to_string),
        "known_results": known,
        "scalar_multiples": multiples,
    });
    let mut text = String::new();
    let _ = writeln!(text, "vector: p = {p}, e = {}", tuple(e.entries()));
    let _ = writeln!(text, "torsion: {}", yes_no(class.is_torsion));
    let _ = writeln!(text, "constant: {}", yes_no(class.is_constant));
    let _ = writeln!(text, "symmetric: {}", yes_no(class.is_symmetric));
    let tf = match (&class.tf_status, &refusal) {
        (_, Some(err)) => format!("not run ({err}; raise --tf-bound to override)"),
        (TfStatus::Holds, _) => "holds".to_string(),
        (TfStatus::Fails { witness }, _) => format!("fails, witness {}", tuple(witness)),
        (TfStatus::NotRun, _) => "not run".to_string(),
    };
    let _ = writeln!(text, "TF: {tf}");
    let _ = writeln!(text, "known results (stated, not computed):");
    for k in &known {
        let _ = writeln!(text, "  {k}");
    }
    let list: Vec<String> = (2..p).map(|l| tuple(e.scale(l).expect("non-zero").entries())).collect();
    let _ = writeln!(text, "scalar multiples defining the same group: {}", list.join(" "));
    emit(g.format, &value, &text);
    Ok(if refusal.is_some() { EXIT_BUDGET } else { EXIT_OK })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Order of the quotient.
    Order,
    /// Index of the derived subgroup.
    DerivedIndex,
    /// Index of the third lower central term.
    Gamma3Index,
    /// Orders of the level kernels st(m), m = 1..n.
    Kernels,
    /// Abelian invariants of the quotient.
    Invariants,
    /// Index and abelian invariants of K = <y_0, ..., y_{p-1}>.
    K,
}

const DEFAULT_QUANTITIES: [Quantity; 5] = [
    Quantity::Order,
    Quantity::DerivedIndex,
    Quantity::Gamma3Index,
    Quantity::Kernels,
    Quantity::Invariants,
];

fn power(n: &BigUint, p: u32) -> Value {
    json!({ "value": n.to_string(), "log_p": log_p(n, p) })
}

fn power_text(n: &BigUint, p: u32) -> String {
    match log_p(n, p) {
        Some(k) => format!("{p}^{k} = {n}"),
        None => n.to_string(),
    }
}

fn index(big: &PermGroup, small: &PermGroup) -> Result<BigUint, Failure> {
    Ok(big.index_of(small)?)
}

pub fn quotient(g: &GlobalArgs, group: &GroupArgs, level: usize, what: &[Quantity]) -> Outcome {
    let ggs = group.ggs(g.depth_cap)?;
    let (q, _) = quotient_cached(&ggs, level, g.budget_degree, g.cache_dir.as_deref())?;
    let p = ggs.p();
    let what = if what.is_empty() { &DEFAULT_QUANTITIES[..] } else { what };
    let whole = q.group();

    let mut value = json!({
        "p": p,
        "e": ggs.vector().entries(),
        "level": level,
        "degree": q.layout().degree(),
    });
    let mut text = format!(
        "quotient: p = {p}, e = {}, level {level}, degree {}\n",
        tuple(ggs.vector().entries()),
        q.layout().degree()
    );
    for quantity in what {
        match quantity {
            Quantity::Order => {
                value["order"] = power(&whole.order(), p);
                let _ = writeln!(text, "order: {}", power_text(&whole.order(), p));
            }
            Quantity::DerivedIndex => {
                let i = index(whole, &q.derived())?;
                value["derived_index"] = power(&i, p);
                let _ = writeln!(text, "|G:G'|: {}", power_text(&i, p));
            }
            Quantity::Gamma3Index => {
                let i = index(whole, &q.lower_central_term(3))?;
                value["gamma3_index"] = power(&i, p);
                let _ = writeln!(text, "|G:gamma_3|: {}", power_text(&i, p));
            }
            Quantity::Kernels => {
                let mut kernels = Vec::new();
                for m in 1..=level {
                    let k = q.level_kernel(m)?;
                    let _ = writeln!(text, "|st({m})|: {}", power_text(&k.order(), p));
                    kernels.push(json!({ "m": m, "order": power(&k.order(), p) }));
                }
                value["level_kernels"] = Value::Array(kernels);
            }
            Quantity::Invariants => {
                let inv = whole.abelian_invariants();
                let _ = writeln!(text, "abelian invariants: {}", invariants_text(&inv.exponents, p));
                value["abelian_invariants"] = json!(inv.exponents);
            }
            Quantity::K => k_report(&ggs, &q, &mut value, &mut text)?,
        }
    }
    emit(g.format, &value, &text);
    Ok(EXIT_OK)
}

fn invariants_text(exponents: &[u32], p: u32) -> String {
    if exponents.is_empty() {
        return "trivial".into();
    }
    let parts: Vec<String> = exponents.iter().map(|k| format!("{p}^{k}")).collect();
    parts.join(" x ")
}

fn k_report(ggs: &Ggs, q: &QuotientRep, value: &mut Value, text: &mut String) -> Result<(), Failure> {
    let p = ggs.p();
    let k = q.generated_by(&ggs.distinguished("K", 0)?);
    let i = index(q.group(), &k)?;
    let inv = k.abelian_invariants();
    value["k"] = json!({ "index": power(&i, p), "abelian_invariants": inv.exponents });
    let _ = writeln!(text, "|G:K|: {}", power_text(&i, p));
    let _ = writeln!(text, "K abelian invariants: {}", invariants_text(&inv.exponents, p));
    Ok(())
}

pub fn parse_check(src: &str) -> Result<CheckId, String> {
    CheckId::ALL
        .iter()
        .copied()
        .find(|id| format!("{id:?}").eq_ignore_ascii_case(src.trim()))
        .ok_or_else(|| format!("unknown check `{src}` (expected C1..C9)"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    WrongSubgroup,
    TorsionWord,
}

pub struct VerifyArgs<'a> {
    pub grid: Option<&'a str>,
    pub checks: &'a [CheckId],
    pub seed: u64,
    pub samples: Option<usize>,
    pub output: Option<&'a Path>,
    pub fault: Option<FaultArg>,
}

pub fn verify(g: &GlobalArgs, args: VerifyArgs<'_>) -> Outcome {
    let grid = match args.grid {
        Some(src) => parse_grid(src).map_err(Failure::usage)?,
        None => default_grid(),
    };
    let config = SuiteConfig {
        grid,
        checks: if args.checks.is_empty() {
            CheckId::ALL.to_vec()
        } else {
            args.checks.to_vec()
        },
        seed: args.seed,
        budget: g.budget(),
        degree_cap: g.budget_degree,
        depth_cap: g.depth_cap,
        derived_samples: args.samples,
        cache_dir: g.cache_dir.clone(),
        fault: args.fault.map(|f| match f {
            FaultArg::WrongSubgroup => Fault::WrongSubgroup,
            FaultArg::TorsionWord => Fault::TorsionWord,
        }),
        ..SuiteConfig::default()
    };
    let report = run_suite(&config)?;
    let json = serde_json::to_string_pretty(&report.to_json()).expect("json");

    let mut text = String::new();
    for r in &report.results {
        let level = r.params.level.map(|n| format!(" n={n}")).unwrap_or_default();
        let verdict = match &r.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail { counterexample } => {
                format!("FAIL {}", serde_json::to_string(counterexample).expect("json"))
            }
            Verdict::Skipped { reason } => format!("skipped: {reason}"),
        };
        let _ = writeln!(text, "{:?} p={} e={}{level}: {verdict}", r.check_id, r.params.p, tuple(&r.params.e));
    }
    let s = &report.summary;
    let _ = writeln!(text, "total {}: {} pass, {} fail, {} skipped", s.total, s.pass, s.fail, s.skipped);

    match args.output {
        Some(path) => {
            std::fs::write(path, format!("{json}\n"))
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            if g.format == Format::Text {
                out(&text);
            }
        }
        None => match g.format {
            Format::Json => out(&format!("{json}\n")),
            Format::Text => out(&text),
        },
    }
    Ok(if report.has_failures() { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn steps_text(steps: &[Step], p: u32) -> String {
    if steps.is_empty() {
        return "(none)".into();
    }
    let parts: Vec<String> = steps
        .iter()
        .map(|s| match s {
            Step::Power => format!("^{p}"),
            Step::Section(x) => format!("@{x}"),
        })
        .collect();
    parts.join(" ")
}

fn certificate_text(c: &InfiniteCertificate, p: u32) -> String {
    format!(
        "path {} reaches {}; cycle {} returns to it: ({})^({p}^{}) fixes vertex {} with section {} there",
        steps_text(&c.prefix, p),
        c.element,
        steps_text(&c.cycle, p),
        c.element,
        c.power,
        c.vertex,
        c.element
    )
}

pub fn order(g: &GlobalArgs, group: &GroupArgs, word: &str) -> Outcome {
    let ggs = group.ggs(g.depth_cap)?;
    let w = ggs.parse(word)?;
    let p = ggs.p();
    let result = ggs.order_with(&w, &g.budget(), &mut ggs_core::Memo::new());
    let mut value = json!({
        "p": p,
        "e": ggs.vector().entries(),
        "word": w,
        "result": result,
    });
    let text = match &result {
        OrderResult::Finite { exponent } => {
            let n = BigUint::from(p).pow(*exponent);
            format!("order({w}) = {p}^{exponent} = {n}\n")
        }
        OrderResult::Infinite { certificate } => {
            let ok = ggs.check_certificate(&w, certificate);
            value["certificate_rechecked"] = json!(ok);
            format!(
                "order({w}) = infinite\ncertificate: {}\nrechecked: {}\n",
                certificate_text(certificate, p),
                yes_no(ok)
            )
        }
        OrderResult::Unknown { exhausted } => format!("order({w}) = unknown ({exhausted})\n"),
    };
    emit(g.format, &value, &text);
    Ok(EXIT_OK)
}

pub fn portrait(g: &GlobalArgs, group: &GroupArgs, word: &str, depth: usize) -> Outcome {
    let ggs = group.ggs(g.depth_cap)?;
    let w = ggs.parse(word)?;
    let portrait = ggs.portrait(&w, depth)?;
    let value = json!({ "word": w, "portrait": portrait });
    emit(g.format, &value, &portrait.to_dot());
    Ok(EXIT_OK)
}

pub fn schema() -> Outcome {
    out(SCHEMA);
    Ok(EXIT_OK)
}

pub fn purge(g: &GlobalArgs) -> Outcome {
    let dir = g
        .cache_dir
        .as_deref()
        .ok_or_else(|| Failure::usage("no cache directory (pass --cache-dir or set GGS_CACHE_DIR)"))?;
    let removed = cache::purge(dir)?;
    let value = json!({ "removed": removed, "dir": dir.display().to_string() });
    emit(g.format, &value, &format!("removed {removed} cached quotients from {}\n", dir.display()));
    Ok(EXIT_OK)
}
