use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use diffuse_core::crystal::{CrystGroup, CrystGroupJson, CrystalError, FiniteGroup, FiniteGroupJson};
use diffuse_core::data;
use diffuse_core::hyp::{certify_ball, HypError};
use diffuse_core::linalg::q;
use diffuse_core::linrep::{ball, export_mat_set, GroupDef, GroupDefJson, GroupError, MAX_BALL};
use diffuse_core::qfield::{parse_rational, rational_to_string, FieldError, NFElem, Rational};
use diffuse_core::ravel::{self, RavelError};
use diffuse_core::weeks::{self, WeeksError};

const SCHEMA: &str = "diffuse-lab/1";

/// Ravel search and diffuseness certificates for finitely generated groups.
#[derive(Parser, Debug)]
#[command(name = "diffuse-lab", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "DIFFUSE_LAB_THREADS")]
    threads: Option<usize>,
    /// Largest ball enumerated before giving up.
    #[arg(long, global = true, default_value_t = MAX_BALL)]
    max_ball: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Word-metric ball of a matrix group.
    Ball {
        /// Group JSON file or `builtin:NAME`.
        group: String,
        #[arg(long)]
        radius: usize,
    },
    /// Largest ravel inside a ball; exit 0 if found, 1 if none.
    Ravel {
        group: String,
        #[arg(long)]
        radius: usize,
        /// Also shrink to a deletion-minimal ravel.
        #[arg(long)]
        minimal: bool,
    },
    /// Check the arcosh(1 + r) criterion on a ball; exit 0 on pass, 1 on fail.
    Certify {
        /// Group JSON file, `builtin:NAME`, or `builtin:appendix` for the
        /// quaternion group of the arithmetic manifold.
        group: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// JSON array of traces (power-basis coefficients) covering all short geodesics.
        #[arg(long)]
        traces: Option<String>,
        /// Index of the complex place to act through.
        #[arg(long, default_value_t = 0)]
        place: usize,
    },
    /// Crystallographic groups and finite holonomy.
    Crystal {
        #[command(subcommand)]
        action: CrystalCmd,
    },
    /// Weeks manifold and the arithmetic manifold N.
    Weeks {
        #[command(subcommand)]
        action: WeeksCmd,
    },
    /// Names accepted after `builtin:`.
    List,
}

#[derive(Subcommand, Debug)]
enum CrystalCmd {
    /// Grow balls around a base point until one contains a ravel.
    Ravel {
        group: String,
        /// Comma-separated rational coordinates (default: origin).
        #[arg(long)]
        base_point: Option<String>,
        /// Starting radius (rational); default twice a covering-radius estimate.
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, default_value = "64")]
        max_radius: String,
        #[arg(long)]
        minimal: bool,
    },
    /// First Betti number.
    Betti { group: String },
    /// Holonomy class of a crystallographic group or a finite group table.
    Holonomy { group: String },
}

#[derive(Subcommand, Debug)]
enum WeeksCmd {
    /// Relators, traces and level of the appendix quaternion group.
    Verify {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Short-geodesic trace enumeration.
    Systole,
    /// Check a non-left-orderability case tree (default: the bundled one).
    Orderability {
        #[arg(long)]
        tree: Option<String>,
    },
    /// Ravel in a ball of the Weeks group.
    Ravel {
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[arg(long)]
        minimal: bool,
    },
}

#[derive(Debug)]
struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        let code = if matches!(e, FieldError::Undecidable(_)) { "undecidable" } else { "field-error" };
        Self::new(code, e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::ResourceLimit(_) => Self::new("resource-limit", e.to_string()),
            GroupError::Field(f) => f.into(),
            GroupError::RelatorFails(_) => Self::new("relator-fails", e.to_string()),
            _ => Self::new("invalid-group", e.to_string()),
        }
    }
}

impl From<CrystalError> for CliError {
    fn from(e: CrystalError) -> Self {
        let code = match e {
            CrystalError::PositiveBetti(_) | CrystalError::TrivialGroup | CrystalError::NegativeRadius => "precondition",
            CrystalError::RadiusExceeded(_) => "radius-exceeded",
            CrystalError::ResourceLimit(_) => "resource-limit",
            _ => "invalid-group",
        };
        Self::new(code, e.to_string())
    }
}

impl From<HypError> for CliError {
    fn from(e: HypError) -> Self {
        match e {
            HypError::Group(g) => g.into(),
            HypError::Field(f) => f.into(),
            HypError::Undecidable(_) => Self::new("undecidable", e.to_string()),
            _ => Self::new("hyp-error", e.to_string()),
        }
    }
}

impl From<WeeksError> for CliError {
    fn from(e: WeeksError) -> Self {
        match e {
            WeeksError::Group(g) => g.into(),
            WeeksError::Field(f) => f.into(),
            WeeksError::Hyp(h) => h.into(),
            _ => Self::new("weeks-error", e.to_string()),
        }
    }
}

impl From<RavelError> for CliError {
    fn from(e: RavelError) -> Self {
        Self::new("precondition", e.to_string())
    }
}

/// Report plus process exit status.
struct Outcome {
    report: Value,
    exit: u8,
}

fn ok(report: Value) -> Result<Outcome, CliError> {
    Ok(Outcome { report, exit: 0 })
}

fn verdict(report: Value, pass: bool) -> Result<Outcome, CliError> {
    Ok(Outcome { report, exit: if pass { 0 } else { 1 } })
}

fn read_source(spec: &str, lookup: fn(&str) -> Option<&'static str>) -> Result<String, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return lookup(name)
            .map(str::to_string)
            .ok_or_else(|| CliError::new("usage", format!("unknown builtin {name:?}; see `diffuse-lab list`")));
    }
    std::fs::read_to_string(spec).map_err(|e| CliError::new("io", format!("{spec}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::new("malformed-json", format!("{what}: {e}")))
}

fn load_matrix_group(spec: &str) -> Result<GroupDef, CliError> {
    let j: GroupDefJson = parse_json(&read_source(spec, data::matrix_group)?, spec)?;
    let g = GroupDef::from_json(&j)?;
    g.check_relators()?;
    Ok(g)
}

fn load_crystal(spec: &str) -> Result<CrystGroup, CliError> {
    let j: CrystGroupJson = parse_json(&read_source(spec, data::crystal_group)?, spec)?;
    Ok(CrystGroup::from_json(&j)?)
}

fn parse_q(s: &str) -> Result<Rational, CliError> {
    parse_rational(s.trim()).map_err(|e| CliError::new("usage", format!("{s:?}: {e}")))
}

fn load_traces(spec: &str, field: &std::sync::Arc<diffuse_core::qfield::NumberField>) -> Result<Vec<NFElem>, CliError> {
    let items: Vec<Vec<Value>> = parse_json(&read_source(spec, |_| None)?, spec)?;
    items
        .iter()
        .map(|coeffs| {
            let strs: Vec<String> = coeffs
                .iter()
                .map(|c| match c {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            let mut padded = strs;
            padded.resize(field.degree().max(padded.len()), "0".into());
            Ok(NFElem::from_strings(field, &padded)?)
        })
        .collect()
}

fn cmd_ball(cli: &Cli, group: &str, radius: usize) -> Result<Outcome, CliError> {
    let g = load_matrix_group(group)?;
    let b = ball(&g, radius, cli.max_ball)?;
    ok(json!({
        "command": "ball",
        "radius": radius,
        "size": b.set.len(),
        "sphere_sizes": b.sphere_sizes,
        "elements": export_mat_set(&b.set),
    }))
}

fn cmd_ravel(cli: &Cli, group: &str, radius: usize, minimal: bool) -> Result<Outcome, CliError> {
    let g = load_matrix_group(group)?;
    let b = ball(&g, radius, cli.max_ball)?;
    let found = ravel::find_ravel(&g, &b.set);
    let mut report = json!({
        "command": "ravel",
        "radius": radius,
        "ball_size": b.set.len(),
        "ravel_size": found.len(),
        "verified": ravel::is_ravel(&g, &found),
        "ravel": export_mat_set(&found),
    });
    if minimal && !found.is_empty() {
        let m = ravel::min_ravel(&g, &found)?;
        report["minimal"] = json!({
            "size": m.len(),
            "deletion_minimal": ravel::is_deletion_minimal(&g, &m),
            "ravel": export_mat_set(&m),
        });
    }
    verdict(report, !found.is_empty())
}

fn cmd_certify(cli: &Cli, group: &str, radius: usize, traces: Option<&str>, place: usize) -> Result<Outcome, CliError> {
    if group == "builtin:appendix" {
        let ap = weeks::build_appendix_group();
        let place = ap.field.complex_place(place)?;
        let ts = match traces {
            Some(t) => load_traces(t, &ap.field)?,
            None => weeks::systole_enumeration(&ap)?.trace_elems,
        };
        let cert = certify_ball(&ap.gamma(), radius, place, Some(&ts), cli.max_ball)?;
        let pass = cert.verdict != diffuse_core::hyp::Verdict::Fail;
        let mut report = serde_json::to_value(&cert).expect("serialisable");
        report["command"] = json!("certify");
        return verdict(report, pass);
    }
    let g = load_matrix_group(group)?;
    let place = g.field.complex_place(place)?;
    let ts = traces.map(|t| load_traces(t, &g.field)).transpose()?;
    let cert = certify_ball(&g, radius, place, ts.as_deref(), cli.max_ball)?;
    let pass = cert.verdict != diffuse_core::hyp::Verdict::Fail;
    let mut report = serde_json::to_value(&cert).expect("serialisable");
    report["command"] = json!("certify");
    verdict(report, pass)
}

fn cmd_crystal(action: &CrystalCmd) -> Result<Outcome, CliError> {
    match action {
        CrystalCmd::Ravel { group, base_point, radius, max_radius, minimal } => {
            let g = load_crystal(group)?;
            let e = match base_point {
                Some(s) => s.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?,
                None => vec![q(0); g.dim()],
            };
            let r0 = radius.as_deref().map(parse_q).transpose()?;
            let found = g.construct_ravel(&e, r0, &parse_q(max_radius)?)?;
            let elems: Vec<Value> = found.ravel.iter().map(|x| serde_json::to_value(x.value.to_json()).unwrap()).collect();
            let mut report = json!({
                "command": "crystal-ravel",
                "betti1": g.betti1(),
                "torsion_free": g.is_torsion_free(),
                "radius": rational_to_string(&found.radius),
                "ball_size": found.ball_size,
                "ravel_size": found.ravel.len(),
                "verified": ravel::is_ravel(&g, &found.ravel),
                "attempts": found.attempts.iter().map(|(r, n)| json!({"radius": r, "ball_size": n})).collect::<Vec<_>>(),
                "ravel": elems,
            });
            if *minimal {
                let m = ravel::min_ravel(&g, &found.ravel)?;
                report["minimal"] = json!({
                    "size": m.len(),
                    "deletion_minimal": ravel::is_deletion_minimal(&g, &m),
                });
            }
            ok(report)
        }
        CrystalCmd::Betti { group } => {
            let g = load_crystal(group)?;
            ok(json!({
                "command": "crystal-betti",
                "dim": g.dim(),
                "betti1": g.betti1(),
                "holonomy_order": g.point_group().len(),
                "torsion_free": g.is_torsion_free(),
            }))
        }
        CrystalCmd::Holonomy { group } => {
            let text = read_source(group, data::any)?;
            let value: Value = parse_json(&text, group)?;
            let h = if value.get("table").is_some() {
                let j: FiniteGroupJson = parse_json(&text, group)?;
                FiniteGroup::from_json(&j)?
            } else {
                let j: CrystGroupJson = parse_json(&text, group)?;
                CrystGroup::from_json(&j)?.holonomy()
            };
            let class = h.holonomy_class()?;
            let sylow: Vec<Value> = h
                .prime_divisors()
                .into_iter()
                .map(|p| json!({"p": p, "cyclic": h.sylow_cyclic(p).unwrap_or(false)}))
                .collect();
            ok(json!({
                "command": "crystal-holonomy",
                "order": h.order(),
                "solvable": h.is_solvable(),
                "derived_series": h.derived_series(),
                "sylow": sylow,
                "class": class,
            }))
        }
    }
}

fn cmd_weeks(cli: &Cli, action: &WeeksCmd) -> Result<Outcome, CliError> {
    match action {
        WeeksCmd::Verify { samples } => {
            let ap = weeks::build_appendix_group();
            let relators = ap.verify_all_relators()?;
            let level = ap.verify_level(*samples, cli.seed)?;
            let alpha = ap.alpha();
            let tr_expected = &(&alpha * &alpha) + &ap.field.one();
            let ab = ap.eval("ab")?;
            let traces_ok = ap.a.trace() == tr_expected && ap.b.trace() == tr_expected && ab.trace() == alpha;
            let units = ap.a.norm().is_one() && ap.b.norm().is_one();
            let pass = relators.pass && level.pass && traces_ok && units;
            verdict(
                json!({
                    "command": "weeks-verify",
                    "relators": relators,
                    "level": level,
                    "traces": {
                        "a": ap.a.trace().to_strings(),
                        "b": ap.b.trace().to_strings(),
                        "ab": ab.trace().to_strings(),
                        "match": traces_ok,
                    },
                    "unit_norms": units,
                    "pass": pass,
                }),
                pass,
            )
        }
        WeeksCmd::Systole => {
            let ap = weeks::build_appendix_group();
            let rep = weeks::systole_enumeration(&ap)?;
            let pass = rep.certified;
            let mut report = serde_json::to_value(&rep).expect("serialisable");
            report["command"] = json!("weeks-systole");
            verdict(report, pass)
        }
        WeeksCmd::Orderability { tree } => {
            let ap = weeks::build_appendix_group();
            let t: weeks::CaseTree = match tree {
                Some(spec) => parse_json(&read_source(spec, data::any)?, spec)?,
                None => weeks::appendix_tree(),
            };
            let cert = weeks::verify_orderability_tree(&ap, &t)?;
            let pass = cert.passed();
            let mut report = serde_json::to_value(&cert).expect("serialisable");
            report["command"] = json!("weeks-orderability");
            verdict(report, pass)
        }
        WeeksCmd::Ravel { radius, minimal } => {
            let rep = weeks::weeks_pipeline(*radius, *minimal, cli.max_ball)?;
            let found = rep.ravel_size > 0;
            let mut report = json!({
                "command": "weeks-ravel",
                "radius": rep.radius,
                "relators_verified": rep.relators_verified,
                "ball": {"size": rep.ball_size, "sphere_sizes": rep.sphere_sizes},
                "ravel_size": rep.ravel_size,
                "ravel_verified": rep.ravel_verified,
                "ravel": rep.ravel_words,
            });
            if let Some(m) = rep.minimal {
                report["minimal"] = serde_json::to_value(m).expect("serialisable");
            }
            verdict(report, found)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.max_ball == 0 {
        return Err(CliError::new("usage", "--max-ball must be positive"));
    }
    match &cli.cmd {
        Cmd::Ball { group, radius } => cmd_ball(cli, group, *radius),
        Cmd::Ravel { group, radius, minimal } => cmd_ravel(cli, group, *radius, *minimal),
        Cmd::Certify { group, radius, traces, place } => cmd_certify(cli, group, *radius, traces.as_deref(), *place),
        Cmd::Crystal { action } => cmd_crystal(action),
        Cmd::Weeks { action } => cmd_weeks(cli, action),
        Cmd::List => ok(json!({"command": "list", "builtins": data::names()})),
    }
}

fn emit(cli: &Cli, mut report: Value) -> Result<(), CliError> {
    report["schema"] = json!(SCHEMA);
    // serde_json maps are ordered by key, so output is byte-stable
    let text = serde_json::to_string_pretty(&report).expect("serialisable") + "\n";
    match &cli.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::new("io", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match cli.threads {
        Some(0) => Err(CliError::new("usage", "--threads must be positive")),
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool initialised once");
            Ok(())
        }
        None => Ok(()),
    };
    let (report, code) = match threads.and_then(|_| run(&cli)) {
        Ok(o) => (o.report, o.exit),
        Err(e) => (json!({"error": {"code": e.code, "message": e.message}}), 2),
    };
    if let Err(e) = emit(&cli, report) {
        eprintln!("{}: {}", e.code, e.message);
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
