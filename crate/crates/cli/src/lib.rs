//! Command implementations for the `pgcover` binary.
//!
//! Every command produces one [`RunReport`]. The exit code is part of the
//! report and is the process exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, or a positive answer |
//! | 1 | error (bad input, I/O) |
//! | 2 | usage error |
//! | 3 | negative answer (not minimal, not a cover, none found) |
//! | 4 | search budget exhausted |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use pgcover::blocking::{
    gf2_minimal_sets, matrix_properties, minimality_report_with_threads, projective_triangle, span_dimension, PointSet,
};
use pgcover::covers::{cover_from_blocking, intersection_size, lemma_audit, verify_cover, DualCover};
use pgcover::format::{parse_cover, parse_point_set, point_set_to_text, MemberSource};
use pgcover::gflin::PrimeModulus;
use pgcover::search::{
    build_table, enumerate_spanning_minimal, resume_search, Checkpoint, PruningConfig, SearchMode, SearchStatus,
    SearchTask, TableOptions, DEFAULT_BUDGET,
};
use pgcover::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "pgcover";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Matrix properties are evaluated by scanning `p^(m+1)` vectors; skip above this.
const MATRIX_SCAN_LIMIT: u64 = 1 << 20;
/// Intersection tables enumerate every subfamily.
const LEVEL_TABLE_MAX_MEMBERS: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "pgcover", version, about = "Minimal blocking sets of PG(m,p) and covers of (C_p)^d")]
pub struct Cli {
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, env = "PGCOVER_THREADS")]
    pub threads: Option<usize>,
    /// Omit the timing block, making reports byte-identical across runs
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Print a human-readable summary instead of JSON
    #[arg(long, global = true)]
    pub text: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check blocking, minimality and span of a point set
    Verify(VerifyArgs),
    /// Verify a cover by maximal subgroups and audit its intersection lattice
    Cover(CoverArgs),
    /// Search for spanning minimal blocking sets of a given size
    Search(SearchArgs),
    /// Tabulate the pairs (m,p) admitting a spanning minimal blocking set of size n
    Table(TableArgs),
    /// Emit the projective triangle of PG(2,p)
    Triangle(TriangleArgs),
    /// Closed-form classification over GF(2)
    Gf2(Gf2Args),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Point-set file
    pub file: PathBuf,
    /// Required ambient dimension
    #[arg(long)]
    pub ambient: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    /// Cover file
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(short, long)]
    pub m: usize,
    #[arg(short, long)]
    pub p: u32,
    #[arg(short, long)]
    pub n: usize,
    /// Enumerate every class
    #[arg(long, conflicts_with = "first")]
    pub all: bool,
    /// Stop at the first witness (default)
    #[arg(long)]
    pub first: bool,
    /// Node budget
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Resume from this file if it exists; write it when the budget runs out
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Write each witness as a point-set file into this directory
    #[arg(long)]
    pub emit_dir: Option<PathBuf>,
    /// Search sizes the cover size bound rules out
    #[arg(long)]
    pub ignore_bound_filter: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 9)]
    pub max_n: usize,
    /// Node budget per cell
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct TriangleArgs {
    #[arg(short, long)]
    pub p: u32,
    /// Write the point set to this file
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Gf2Args {
    #[arg(short, long)]
    pub m: usize,
    /// Span dimension [default: m]
    #[arg(short, long)]
    pub d: Option<usize>,
    /// Write the representative to this file
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub args: BTreeMap<&'static str, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: CommandEcho,
    /// SHA-256 of the input file, or of the echoed arguments.
    pub input_digest: String,
    pub result: Value,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Outcome {
    result: Value,
    exit_code: i32,
    summary: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn modulus(p: u32) -> Result<PrimeModulus> {
    PrimeModulus::new(p).with_context(|| format!("invalid modulus {p}"))
}

fn threads(cli: &Cli) -> usize {
    cli.threads.filter(|&t| t > 0).unwrap_or_else(pgcover::par::default_threads)
}

fn rows(set: &PointSet) -> Vec<Vec<u32>> {
    set.points().iter().map(|x| x.coords().to_vec()).collect()
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    let start = Instant::now();
    let t = threads(cli);
    let (name, args, digest_input, out): (&'static str, BTreeMap<&'static str, Value>, Option<Vec<u8>>, Outcome) = match &cli.command {
        Command::Verify(a) => {
            let bytes = fs::read(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
            let args = BTreeMap::from([("file", json!(a.file.display().to_string())), ("ambient", json!(a.ambient))]);
            ("verify", args, Some(bytes.clone()), cmd_verify(&String::from_utf8_lossy(&bytes), a.ambient, t)?)
        }
        Command::Cover(a) => {
            let bytes = fs::read(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
            let args = BTreeMap::from([("file", json!(a.file.display().to_string()))]);
            ("cover", args, Some(bytes.clone()), cmd_cover(&String::from_utf8_lossy(&bytes))?)
        }
        Command::Search(a) => {
            let args = BTreeMap::from([
                ("m", json!(a.m)),
                ("p", json!(a.p)),
                ("n", json!(a.n)),
                ("mode", json!(if a.all { "enumerate_all" } else { "first_witness" })),
                ("budget", json!(a.budget)),
                ("checkpoint", json!(a.checkpoint.as_ref().map(|c| c.display().to_string()))),
                ("ignore_bound_filter", json!(a.ignore_bound_filter)),
            ]);
            ("search", args, None, cmd_search(a, t)?)
        }
        Command::Table(a) => {
            let args = BTreeMap::from([("max_n", json!(a.max_n)), ("budget", json!(a.budget))]);
            ("table", args, None, cmd_table(a, t)?)
        }
        Command::Triangle(a) => ("triangle", BTreeMap::from([("p", json!(a.p))]), None, cmd_triangle(a)?),
        Command::Gf2(a) => ("gf2", BTreeMap::from([("m", json!(a.m)), ("d", json!(a.d.unwrap_or(a.m)))]), None, cmd_gf2(a)?),
    };
    let command = CommandEcho { name, args };
    let digest = match digest_input {
        Some(b) => sha256_hex(&b),
        None => sha256_hex(serde_json::to_string(&command)?.as_bytes()),
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command,
        input_digest: digest,
        result: out.result,
        exit_code: out.exit_code,
        timing: (!cli.no_timing).then(|| Timing { elapsed_ms: start.elapsed().as_millis() as u64 }),
        summary: out.summary,
    })
}

fn cmd_verify(text: &str, ambient: Option<usize>, threads: usize) -> Result<Outcome> {
    let set = parse_point_set(text, ambient)?;
    let space = set.space();
    let report = minimality_report_with_threads(&set, threads);
    let d = span_dimension(&set);
    let spanning = d == space.dimension();
    let order = (space.modulus().get() as u64).checked_pow(space.vector_len() as u32);
    let props = order.filter(|&o| o <= MATRIX_SCAN_LIMIT).map(|_| matrix_properties(&set.blocking_matrix()));
    let cover = match cover_from_blocking(&set) {
        Ok(c) => serde_json::to_value(verify_cover(&c))?,
        Err(_) => Value::Null,
    };
    let coords = |h: &Option<pgcover::projgeom::Hyperplane>| h.as_ref().map(|h| h.dual.coords().to_vec());
    let result = json!({
        "space": space.to_string(),
        "m": space.dimension(),
        "p": space.modulus().get(),
        "size": set.len(),
        "points": rows(&set),
        "is_blocking": report.is_blocking,
        "is_minimal": report.is_minimal,
        "span_dimension": d,
        "spanning": spanning,
        "uncovered_hyperplane": coords(&report.uncovered),
        "tangent_witnesses": report.tangent_witnesses.iter().map(coords).collect::<Vec<_>>(),
        "redundant_points": report.redundant_points.iter().map(|x| x.coords().to_vec()).collect::<Vec<_>>(),
        "matrix_properties": props,
        "cover": cover,
    });
    let mut summary = vec![
        format!("{} points in {}", set.len(), space),
        format!("blocking: {}", report.is_blocking),
        format!("minimal: {}", report.is_minimal),
        format!("span dimension: {d}{}", if spanning { " (spanning)" } else { "" }),
    ];
    if let Some(h) = &report.uncovered {
        summary.push(format!("missed hyperplane: {}", h.dual));
    }
    Ok(Outcome { result, exit_code: if report.is_minimal { EXIT_OK } else { EXIT_NEGATIVE }, summary })
}

/// Distinct intersection sizes per level `k`, with multiplicities.
fn intersection_levels(c: &DualCover) -> Result<Option<Vec<Value>>> {
    let n = c.len();
    if n > LEVEL_TABLE_MAX_MEMBERS {
        return Ok(None);
    }
    let mut levels: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); n + 1];
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        *levels[s.len()].entry(intersection_size(c, &s)?).or_default() += 1;
    }
    Ok(Some(
        levels
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(k, sizes)| json!({ "k": k, "sizes": sizes.into_iter().map(|(size, count)| json!({"size": size, "count": count})).collect::<Vec<_>>() }))
            .collect(),
    ))
}

fn cmd_cover(text: &str) -> Result<Outcome> {
    let parsed = parse_cover(text)?;
    let c = &parsed.cover;
    let report = verify_cover(c);
    let (audit, audit_error) = match lemma_audit(c) {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let members: Vec<Value> = c
        .duals()
        .iter()
        .zip(&parsed.sources)
        .map(|(b, src)| match src {
            MemberSource::Dual => json!({ "dual": b.coords() }),
            MemberSource::Generators(s) => json!({
                "dual": b.coords(),
                "generators": s.generators.iter().map(|g| g.coords().to_vec()).collect::<Vec<_>>(),
            }),
        })
        .collect();
    let audit_ok = audit.as_ref().is_some_and(|a| a.all_passed());
    let union = pgcover::covers::union_size_direct(c).ok();
    let result = json!({
        "p": c.modulus().get(),
        "d": c.d(),
        "n": c.len(),
        "group_order": c.group_order(),
        "members": members,
        "report": report,
        "is_cn_cover": report.is_cn_cover(),
        "union_size": union,
        "audit": audit,
        "audit_error": audit_error,
        "intersection_levels": intersection_levels(c)?,
    });
    let mut summary = vec![
        format!("{} maximal subgroups of (C_{})^{}", c.len(), c.modulus(), c.d()),
        format!("covers: {}", report.covers),
        format!("irredundant: {}", report.irredundant),
        format!("core-free: {}", report.core_free),
    ];
    if let Some(x) = &report.witness_uncovered {
        summary.push(format!("uncovered element: {x:?}"));
    }
    match &audit {
        Some(a) => summary.extend(a.checks.iter().map(|ck| format!("audit {}: {}", ck.id, if ck.passed { "pass" } else { "FAIL" }))),
        None => summary.push(format!("audit skipped: {}", audit_error.as_deref().unwrap_or(""))),
    }
    let ok = report.is_cn_cover() && audit_ok;
    summary.push(if ok { format!("C_{}-cover confirmed", c.len()) } else { "not a C_n-cover".into() });
    Ok(Outcome { result, exit_code: if ok { EXIT_OK } else { EXIT_NEGATIVE }, summary })
}

fn cmd_search(a: &SearchArgs, threads: usize) -> Result<Outcome> {
    let pruning = PruningConfig { respect_bound_filter: !a.ignore_bound_filter, ..Default::default() };
    let mode = if a.all { SearchMode::EnumerateAll } else { SearchMode::FirstWitness };
    let task = SearchTask::new(a.m, modulus(a.p)?, a.n).with_mode(mode).with_threads(threads).with_budget(a.budget).with_pruning(pruning);
    let resume = match &a.checkpoint {
        Some(path) if path.exists() => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Checkpoint::from_json(&text)?)
        }
        _ => None,
    };
    let run = match &resume {
        Some(cp) => resume_search(&task, cp),
        None => enumerate_spanning_minimal(&task),
    };
    let outcome = match run {
        Ok(o) => o,
        Err(Error::BudgetExceeded(cp)) => {
            if let Some(path) = &a.checkpoint {
                fs::write(path, cp.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            let result = json!({
                "status": "budget_exceeded",
                "nodes_completed": cp.nodes_completed,
                "frontier": cp.frontier.len(),
                "checkpoint_written": a.checkpoint.is_some(),
                "resumed": resume.is_some(),
            });
            let summary = vec![format!("budget exhausted after {} nodes; {} branches left", cp.nodes_completed, cp.frontier.len())];
            return Ok(Outcome { result, exit_code: EXIT_BUDGET, summary });
        }
        Err(e) => return Err(e.into()),
    };
    let mut verified = Vec::new();
    for w in &outcome.witnesses {
        let report = verify_cover(&cover_from_blocking(&w.points)?);
        verified.push(report.is_cn_cover());
    }
    if let Some(dir) = &a.emit_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, w) in outcome.witnesses.iter().enumerate() {
            let path = dir.join(format!("witness_{:03}.pts", i + 1));
            fs::write(&path, point_set_to_text(&w.points)).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let mut result = serde_json::to_value(&outcome)?;
    result["witnesses_cover_verified"] = json!(verified);
    result["resumed"] = json!(resume.is_some());
    let mut summary = vec![
        format!("PG({},{}) size {}: {:?}", a.m, a.p, a.n, outcome.status),
        format!("nodes explored: {}", outcome.nodes_explored),
    ];
    if let Some(s) = &outcome.settled_by {
        summary.push(format!("settled by {s}"));
    }
    for w in &outcome.witnesses {
        summary.push(format!("witness: {:?}", rows(&w.points)));
    }
    if verified.iter().any(|&v| !v) {
        bail!("a witness failed dual verification");
    }
    let code = match outcome.status {
        SearchStatus::Found => EXIT_OK,
        SearchStatus::ExhaustedNone => EXIT_NEGATIVE,
    };
    Ok(Outcome { result, exit_code: code, summary })
}

fn cmd_table(a: &TableArgs, threads: usize) -> Result<Outcome> {
    let rows = build_table(a.max_n, &TableOptions { threads, budget: a.budget, ..Default::default() })?;
    let mut summary = Vec::new();
    for r in &rows {
        let pairs: Vec<String> = r.pairs.iter().map(|(m, p)| format!("({m},{p})")).collect();
        let mut line = format!("n={}: {{{}}}", r.n, pairs.join(", "));
        let over: Vec<String> = r
            .cells
            .iter()
            .filter(|c| matches!(c.status, pgcover::search::CellStatus::BudgetExceeded { .. }))
            .map(|c| format!("({},{})", c.m, c.p))
            .collect();
        if !over.is_empty() {
            line.push_str(&format!("  budget exceeded: {}", over.join(", ")));
        }
        summary.push(line);
    }
    Ok(Outcome { result: json!({ "rows": rows }), exit_code: EXIT_OK, summary })
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        write_file(p, text)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_triangle(a: &TriangleArgs) -> Result<Outcome> {
    let set = projective_triangle(modulus(a.p)?)?;
    let report = minimality_report_with_threads(&set, 1);
    let text = point_set_to_text(&set);
    emit(&a.emit, &text)?;
    let result = json!({
        "p": a.p,
        "size": set.len(),
        "points": rows(&set),
        "is_minimal": report.is_minimal,
        "span_dimension": span_dimension(&set),
        "text": text,
    });
    let summary = vec![format!("projective triangle of PG(2,{}): {} points, minimal: {}", a.p, set.len(), report.is_minimal)];
    Ok(Outcome { result, exit_code: EXIT_OK, summary })
}

fn cmd_gf2(a: &Gf2Args) -> Result<Outcome> {
    let d = a.d.unwrap_or(a.m);
    let c = gf2_minimal_sets(a.m, d)?;
    let text = c.representative.as_ref().map(point_set_to_text);
    if let Some(t) = &text {
        emit(&a.emit, t)?;
    }
    let message = if c.exists {
        format!("minimal blocking sets spanning a {d}-space have {} points, one class", d + 2)
    } else if d == a.m {
        format!("no spanning minimal blocking set (d={d} even)")
    } else {
        format!("no minimal blocking set with span dimension {d} (d={d} even)")
    };
    let mut result = serde_json::to_value(&c)?;
    result["representative"] = json!(c.representative.as_ref().map(rows));
    result["text"] = json!(text);
    result["message"] = json!(message);
    Ok(Outcome { result, exit_code: if c.exists { EXIT_OK } else { EXIT_NEGATIVE }, summary: vec![message] })
}

/// Human-readable rendering.
pub fn render_text(r: &RunReport) -> String {
    let mut out = r.summary.join("\n");
    out.push('\n');
    out
}

/// Parses `args`, runs the command and returns `(exit code, stdout, stderr)`.
pub fn run_from<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() { (code, String::new(), text) } else { (code, text, String::new()) };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let out = if cli.text { render_text(&report) } else { report.to_json() + "\n" };
            (report.exit_code, out, String::new())
        }
        Err(e) => (EXIT_ERROR, String::new(), format!("error: {e:#}\n")),
    }
}
