//! Command-line driver for `tropsa`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 search cap exceeded under
//! `--strict`, 3 internal invariant violation (including failed `verify`).

use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use tropsa::curve::{cycle_basis_with_order, ValidationReport};
use tropsa::examples::{self, BUILTIN_NAMES};
use tropsa::io::{self, affine_map_to_document, curve_to_document, parse_affine_map};
use tropsa::random::{random_affine, random_orders, random_subdivision, rng};
use tropsa::{
    abundancy::analyze_with_basis, analyze, apply_affine, classify, classify_genus2, core_neighbourhood,
    curve::core_segments, project_onto_obstruction, realizability_verdict, AbundancyReport, SearchConfig,
    SuperabundanceClass, TriState, TropicalCurve,
};

/// Curves that ship as fixtures in addition to the builtin templates.
pub const FIXTURE_NAMES: [&str; 3] = ["phi3_degree5", "phi4_standard", "genus0_line"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    CapExceeded(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::CapExceeded(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<tropsa::Error> for CliError {
    fn from(e: tropsa::Error) -> Self {
        match e {
            tropsa::Error::Invariant(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "tropsa", version, about = "Superabundancy of parametrized tropical curves")]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Validate balancing and cycle closure on input; treat unknown
    /// classification answers as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, value_name = "N")]
    subset_cap: Option<u64>,
    #[arg(long, global = true, value_name = "B")]
    coeff_bound: Option<i64>,
    #[arg(long, global = true, value_name = "S", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension report and superabundancy class; `-` reads stdin.
    Analyze {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Core neighbourhood as a curve document.
    Core { file: String },
    /// Segments of the core with cycle signs and direction blocks.
    Smooth { file: String },
    /// Genus-2 classification with the normal form when it exists.
    Classify2 { file: String },
    /// Apply an affine map read from a JSON document.
    Transform {
        file: String,
        #[arg(long)]
        map: String,
    },
    /// Project onto the span of the obstruction covectors.
    Project { file: String },
    /// Realizability verdict.
    Verdict { file: String },
    /// Describe a builtin template or fixture; `--emit` prints its document.
    Example {
        name: String,
        #[arg(long)]
        emit: bool,
    },
    /// Seeded invariance checks under subdivision, basis re-choice and
    /// invertible affine maps.
    Verify {
        file: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

struct Ctx<'a> {
    json: bool,
    strict: bool,
    seed: u64,
    cfg: SearchConfig,
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Ctx<'_> {
    fn read(&mut self, file: &str) -> CliResult<String> {
        if file == "-" {
            if self.stdin_used {
                return Err(CliError::Input("stdin can only be read once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{file}: {e}")))
        }
    }

    fn load(&mut self, file: &str) -> CliResult<TropicalCurve> {
        let text = self.read(file)?;
        parse_text(&text, self.strict).map_err(|e| CliError::Input(format!("{file}: {e}")))
    }
}

fn parse_text(text: &str, strict: bool) -> tropsa::Result<TropicalCurve> {
    if strict {
        io::parse_strict(text)
    } else {
        io::parse(text)
    }
}

/// Run with the process's standard streams.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut cfg = SearchConfig::default();
    if let Some(n) = cli.subset_cap {
        cfg.subset_cap = n;
    }
    if let Some(b) = cli.coeff_bound {
        cfg.coeff_bound = b;
    }
    let mut ctx = Ctx { json: cli.json, strict: cli.strict, seed: cli.seed, cfg, stdin, stdin_used: false };
    match dispatch(&mut ctx, cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(ctx: &mut Ctx, cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Analyze { files } => cmd_analyze(ctx, &files, out, err),
        Command::Core { file } => {
            let c = ctx.load(&file)?;
            emit_raw(out, &io::serialize(&core_neighbourhood(&c)))
        }
        Command::Smooth { file } => cmd_smooth(ctx, &file, out),
        Command::Classify2 { file } => cmd_classify2(ctx, &file, out),
        Command::Transform { file, map } => {
            let c = ctx.load(&file)?;
            let text = ctx.read(&map)?;
            let m = parse_affine_map(&text).map_err(|e| CliError::Input(format!("{map}: {e}")))?;
            let (image, record) = apply_affine(&c, &m)?;
            if ctx.json {
                emit_json(out, &json!({ "curve": curve_to_document(&image), "dilation": record }))
            } else {
                let _ = writeln!(err, "length factor {}, {} edges", record.factor, record.edge_factors.len());
                emit_raw(out, &io::serialize(&image))
            }
        }
        Command::Project { file } => {
            let c = ctx.load(&file)?;
            let (image, map) = project_onto_obstruction(&c)?;
            if ctx.json {
                emit_json(out, &json!({ "curve": curve_to_document(&image), "map": affine_map_to_document(&map) }))
            } else {
                let _ = writeln!(err, "projection to dimension {}", image.ambient_dim);
                emit_raw(out, &io::serialize(&image))
            }
        }
        Command::Verdict { file } => {
            let c = ctx.load(&file)?;
            let v = realizability_verdict(&c)?;
            if ctx.json {
                emit_json(out, &v)
            } else {
                let rows = [
                    ("verdict", format!("{:?}", v.verdict)),
                    ("genus", v.genus.to_string()),
                    ("ambient_dim", v.ambient_dim.to_string()),
                    ("degree", opt(v.degree)),
                    ("def_dim", v.def_dim.to_string()),
                    ("moduli_dim", opt(v.moduli_dim)),
                    ("template_core", v.template_core.clone().unwrap_or_else(|| "-".into())),
                    ("reason", v.reason.clone()),
                ];
                table(out, &rows)
            }
        }
        Command::Example { name, emit } => cmd_example(ctx, &name, emit, out),
        Command::Verify { file, trials } => cmd_verify(ctx, &file, trials, out),
    }
}

fn opt(x: Option<i64>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn emit_raw(out: &mut dyn Write, s: &str) -> CliResult<()> {
    out.write_all(s.as_bytes()).map_err(|e| CliError::Input(format!("write failed: {e}")))
}

fn emit_json<T: Serialize + ?Sized>(out: &mut dyn Write, v: &T) -> CliResult<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Invariant(e.to_string()))?;
    emit_raw(out, &s)?;
    emit_raw(out, "\n")
}

fn table(out: &mut dyn Write, rows: &[(&str, String)]) -> CliResult<()> {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        s.push_str(&format!("{k:<w$}  {v}\n"));
    }
    emit_raw(out, &s)
}

#[derive(Serialize)]
struct AnalyzeOutput {
    file: String,
    #[serde(flatten)]
    report: AbundancyReport,
    class: SuperabundanceClass,
    validation: ValidationReport,
}

fn analyze_curve(file: &str, c: &TropicalCurve, cfg: &SearchConfig) -> CliResult<AnalyzeOutput> {
    let report = analyze(c);
    let class = classify(c, cfg)?;
    let validation = c.validate()?;
    Ok(AnalyzeOutput { file: file.to_string(), report, class, validation })
}

fn has_unknown(class: &SuperabundanceClass) -> bool {
    class.irreducible == TriState::Unknown || class.indecomposable == TriState::Unknown
}

fn cmd_analyze(ctx: &mut Ctx, files: &[String], out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    // Read sequentially (stdin is shared), analyze in parallel, report in order.
    let texts: Vec<CliResult<String>> = files.iter().map(|f| ctx.read(f)).collect();
    let strict = ctx.strict;
    let cfg = ctx.cfg;
    let results: Vec<CliResult<AnalyzeOutput>> = files
        .par_iter()
        .zip(texts.into_par_iter())
        .map(|(f, t)| {
            let c = parse_text(&t?, strict).map_err(|e| CliError::Input(format!("{f}: {e}")))?;
            analyze_curve(f, &c, &cfg)
        })
        .collect();

    let mut worst: Option<CliError> = None;
    let note = |e: CliError, worst: &mut Option<CliError>| {
        if worst.as_ref().map_or(true, |w| e.exit_code() > w.exit_code()) {
            *worst = Some(e);
        }
    };
    let mut docs = Vec::new();
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(a) => {
                if strict && has_unknown(&a.class) {
                    note(CliError::CapExceeded(format!("{f}: classification left unknown by the search caps")), &mut worst);
                }
                if ctx.json {
                    docs.push(serde_json::to_value(&a).map_err(|e| CliError::Invariant(e.to_string()))?);
                } else {
                    if files.len() > 1 {
                        emit_raw(out, &format!("== {f}\n"))?;
                    }
                    human_analyze(out, &a)?;
                }
            }
            Err(e) => {
                if ctx.json {
                    docs.push(json!({ "file": f, "error": e.to_string() }));
                }
                if files.len() > 1 {
                    let _ = writeln!(err, "error: {e}");
                }
                note(e, &mut worst);
            }
        }
    }
    if ctx.json {
        if files.len() == 1 {
            if let Some(d) = docs.pop() {
                if d.get("error").is_none() {
                    emit_json(out, &d)?;
                }
            }
        } else {
            emit_json(out, &Value::Array(docs))?;
        }
    }
    match worst {
        Some(e) if files.len() > 1 => Err(CliError::from_code(e.exit_code(), "one or more files failed".into())),
        Some(e) => Err(e),
        None => Ok(()),
    }
}

impl CliError {
    fn from_code(code: i32, msg: String) -> Self {
        match code {
            2 => CliError::CapExceeded(msg),
            3 => CliError::Invariant(msg),
            _ => CliError::Input(msg),
        }
    }
}

fn tri(t: TriState) -> String {
    match t {
        TriState::Yes => "yes",
        TriState::No => "no",
        TriState::Unknown => "unknown",
    }
    .into()
}

fn human_analyze(out: &mut dyn Write, a: &AnalyzeOutput) -> CliResult<()> {
    let r = &a.report;
    let mut rows = vec![
        ("genus", r.g.to_string()),
        ("ambient_dim", r.r.to_string()),
        ("bounded_edges", r.b.to_string()),
        ("rank_k", r.rank_k.to_string()),
        ("actual_dim", r.actual_dim.to_string()),
        ("expected_dim", r.expected_dim.to_string()),
        ("excess", r.excess.to_string()),
        ("superabundant", r.superabundant.to_string()),
        ("planar", a.class.planar.to_string()),
        ("irreducible", tri(a.class.irreducible)),
        ("indecomposable", tri(a.class.indecomposable)),
        ("valid", a.validation.valid.to_string()),
    ];
    if !a.validation.unbalanced.is_empty() {
        rows.push(("unbalanced", a.validation.unbalanced.join(",")));
    }
    for w in &r.warnings {
        rows.push(("warning", w.clone()));
    }
    table(out, &rows)
}

fn cmd_smooth(ctx: &mut Ctx, file: &str, out: &mut dyn Write) -> CliResult<()> {
    let c = ctx.load(file)?;
    let (core, _, dec) = core_segments(&c)?;
    let segments: Vec<Value> = dec
        .segments
        .iter()
        .zip(&dec.blocks)
        .enumerate()
        .map(|(j, (s, block))| {
            json!({
                "index": j,
                "start": core.vertices[s.start],
                "end": core.vertices[s.end],
                "edges": s.edges.iter().map(|&(e, o)| json!([core.edges[e].id, o])).collect::<Vec<_>>(),
                "directions": block,
            })
        })
        .collect();
    if ctx.json {
        return emit_json(out, &json!({ "segments": segments, "eta": dec.eta }));
    }
    let mut s = String::new();
    for (j, seg) in dec.segments.iter().enumerate() {
        let ids: Vec<String> =
            seg.edges.iter().map(|&(e, o)| format!("{}{}", if o < 0 { "-" } else { "" }, core.edges[e].id)).collect();
        s.push_str(&format!(
            "segment {j}: {} -> {}  [{}]\n",
            core.vertices[seg.start],
            core.vertices[seg.end],
            ids.join(" ")
        ));
    }
    for (i, row) in dec.eta.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
        s.push_str(&format!("eta[{i}]: {}\n", cells.join(" ")));
    }
    emit_raw(out, &s)
}

fn cmd_classify2(ctx: &mut Ctx, file: &str, out: &mut dyn Write) -> CliResult<()> {
    let c = ctx.load(file)?;
    let cl = classify_genus2(&c, &ctx.cfg)?;
    let (map, normal) = match &cl.normal_form {
        Some((m, n)) => (Some(affine_map_to_document(m)), Some(curve_to_document(n))),
        None => (None, None),
    };
    if ctx.json {
        return emit_json(out, &json!({ "variant": cl.variant, "map": map, "normal_form": normal }));
    }
    let mut rows = vec![("variant", format!("{:?}", cl.variant))];
    if let Some(m) = &map {
        rows.push(("map", serde_json::to_string(m).unwrap_or_default()));
    }
    table(out, &rows)
}

fn lookup_example(name: &str) -> CliResult<(TropicalCurve, Option<examples::ExpectedReport>)> {
    match name {
        "phi3_degree5" => Ok((named(examples::phi3_degree5(), name), None)),
        "phi4_standard" => Ok((named(examples::phi4_standard(), name), None)),
        "genus0_line" => Ok((named(examples::genus0_line(), name), None)),
        _ => match examples::builtin(name) {
            Ok(t) => Ok((t.curve, Some(t.expected_report))),
            Err(_) => Err(CliError::Input(format!(
                "unknown example {name:?}; available: {}, {}",
                BUILTIN_NAMES.join(", "),
                FIXTURE_NAMES.join(", ")
            ))),
        },
    }
}

fn named(mut c: TropicalCurve, name: &str) -> TropicalCurve {
    c.metadata.insert("name".into(), name.into());
    c
}

fn cmd_example(ctx: &mut Ctx, name: &str, emit: bool, out: &mut dyn Write) -> CliResult<()> {
    let (curve, expected) = lookup_example(name)?;
    if emit {
        return emit_raw(out, &io::serialize(&curve));
    }
    let rep = analyze(&curve);
    if ctx.json {
        return emit_json(out, &json!({ "name": name, "expected": expected, "report": rep }));
    }
    let mut rows = vec![
        ("name", name.to_string()),
        ("genus", rep.g.to_string()),
        ("ambient_dim", rep.r.to_string()),
        ("bounded_edges", rep.b.to_string()),
        ("legs", curve.legs.len().to_string()),
        ("actual_dim", rep.actual_dim.to_string()),
        ("expected_dim", rep.expected_dim.to_string()),
    ];
    if let Some(e) = expected {
        rows.push(("source", e.source));
    }
    table(out, &rows)
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn cmd_verify(ctx: &mut Ctx, file: &str, trials: usize, out: &mut dyn Write) -> CliResult<()> {
    let c = ctx.load(file)?;
    if c.edges.is_empty() {
        return Err(CliError::Input(format!("{file}: curve has no bounded edges")));
    }
    let base = analyze(&c);
    let balanced = c.validate()?.unbalanced;
    let mut g = rng(ctx.seed);
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.into(), passed, detail });
    };

    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..trials {
        let s = random_subdivision(&mut g, &c);
        let r = analyze(&s);
        if r.actual_dim != base.actual_dim + 1 || r.excess != base.excess {
            ok = false;
            detail = format!("subdivided: actual {} excess {}", r.actual_dim, r.excess);
            break;
        }
    }
    push("subdivision", ok, detail);

    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..trials {
        let (vs, es) = random_orders(&mut g, &c);
        let r = analyze_with_basis(&c, &cycle_basis_with_order(&c.graph(), &vs, &es));
        if r.rank_k != base.rank_k {
            ok = false;
            detail = format!("rank {} vs {}", r.rank_k, base.rank_k);
            break;
        }
    }
    push("basis_rechoice", ok, detail);

    let core = core_neighbourhood(&c);
    let rc = analyze(&core);
    push("core", rc.excess == base.excess, format!("core excess {}", rc.excess));

    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..trials {
        let m = random_affine(&mut g, c.ambient_dim);
        let (img, _) = apply_affine(&c, &m)?;
        let r = analyze(&img);
        let unb = img.validate()?.unbalanced;
        if r.actual_dim != base.actual_dim || unb != balanced {
            ok = false;
            detail = format!("image actual {} unbalanced {:?}", r.actual_dim, unb);
            break;
        }
    }
    push("affine_invariance", ok, detail);

    let all = checks.iter().all(|c| c.passed);
    if ctx.json {
        emit_json(out, &json!({ "seed": ctx.seed, "trials": trials, "passed": all, "checks": checks }))?;
    } else {
        let rows: Vec<(&str, String)> = checks
            .iter()
            .map(|c| (c.name.as_str(), if c.passed { "pass".to_string() } else { format!("FAIL {}", c.detail) }))
            .collect();
        table(out, &rows)?;
    }
    if all {
        Ok(())
    } else {
        Err(CliError::Invariant("invariance check failed".into()))
    }
}
