//! `tropi`: command-line access to the core library. Payloads go to `--out`
//! (written atomically) or to stdout; summaries go to stderr.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 validation failure,
//! 3 infeasible or empty result.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tropi_core::combtype::{
    balance, check_gathmann, collect_sensitive_slopes, gathmann_failures, lift_numerical_data, pushforward_type,
    validate_type, CombinatorialType, EdgeId, NumericalData, SensitiveSlopes, TypeError,
};
use tropi_core::complex::ConeComplex;
use tropi_core::enumeration::{canonical_form, enumerate_types, sensitize_for_data, DegreeCatalogue};
use tropi_core::io::{sensitivity_report_json, validation_report_json, write_atomic, JsonSchema};
use tropi_core::render::{render, Format};
use tropi_core::smoothing::{
    check_sensitivity_consequences, smooth_construct, smoothable_lp, verify_realization, Realization, SmoothingError,
};
use tropi_core::subdivision::{sensitize, Subdivision};

const OK: u8 = 0;
const USAGE: u8 = 1;
const INVALID: u8 = 2;
const EMPTY: u8 = 3;

#[derive(Parser)]
#[command(name = "tropi", version, about = "Combinatorial types of tropical stable maps and their smoothability")]
struct Cli {
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Lp,
    Construct,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Dot,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the balancing equations and write the type with edge slopes.
    Balance {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the invariants of a type.
    Validate {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check Gathmann's condition at every vertex.
    Gathmann {
        #[arg(long = "type")]
        ty: PathBuf,
    },
    /// Decide smoothability and write a realization when one exists.
    Smoothable {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long, value_enum, default_value = "lp")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subdivide a complex until it is sensitive to the given slopes.
    Sensitize {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        slopes: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate types for the data, collect their slopes and sensitize.
    SensitizeForData {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        catalogue: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate valid types satisfying Gathmann's condition.
    Enumerate {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        catalogue: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory receiving one file per type and `index.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Push a type on the refined complex forward to the base.
    Pushforward {
        #[arg(long)]
        subdivision: PathBuf,
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift numerical data along a single-ray subdivision.
    LiftLambda {
        #[arg(long)]
        subdivision: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a type as DOT, or a planar fan with an optional realization as SVG.
    Render {
        #[arg(long = "type")]
        ty: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dot")]
        format: RenderFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the golden checks on the built-in example.
    Selftest,
}

struct Outcome {
    code: u8,
    summary: String,
}

impl Outcome {
    fn new(code: u8, summary: impl Into<String>) -> Self {
        Outcome { code, summary: summary.into() }
    }
}

fn read<T: JsonSchema>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    T::from_json_str(&s).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, payload).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// `TROPI_JOBS` wins over `--jobs`; neither means rayon's default.
fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let env = match std::env::var("TROPI_JOBS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| anyhow!("TROPI_JOBS must be a number, got {v:?}"))?),
        Err(_) => None,
    };
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = env.or(jobs) {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn with_slopes(t: CombinatorialType) -> Result<CombinatorialType, TypeError> {
    if t.edge_slopes.is_some() {
        Ok(t)
    } else {
        balance(&t)
    }
}

fn slopes_summary(t: &CombinatorialType) -> String {
    t.graph
        .edges()
        .iter()
        .map(|e| match t.slope(e.id, e.ends[0]) {
            Some(m) => format!("{}: {} from {}", e.id, m, e.ends[0]),
            None => format!("{}: unsolved", e.id),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_balance(ty: &Path, out: Option<&Path>) -> Result<Outcome> {
    let t: CombinatorialType = read(ty)?;
    match balance(&t) {
        Ok(b) => {
            emit(out, &b.to_json_string())?;
            Ok(Outcome::new(OK, slopes_summary(&b)))
        }
        Err(e) => Ok(Outcome::new(INVALID, format!("balancing failed: {e}"))),
    }
}

fn cmd_validate(ty: &Path, out: Option<&Path>) -> Result<Outcome> {
    let t: CombinatorialType = read(ty)?;
    let report = validate_type(&t);
    emit(out, &pretty(&validation_report_json(&report)))?;
    Ok(Outcome::new(if report.is_valid() { OK } else { INVALID }, report.to_string()))
}

fn cmd_gathmann(ty: &Path) -> Result<Outcome> {
    let t = match with_slopes(read(ty)?) {
        Ok(t) => t,
        Err(e) => return Ok(Outcome::new(INVALID, format!("balancing failed: {e}"))),
    };
    match gathmann_failures(&t) {
        Ok(f) if f.is_empty() => Ok(Outcome::new(OK, "Gathmann's condition holds")),
        Ok(f) => Ok(Outcome::new(INVALID, format!("Gathmann's condition fails:\n{}", f.join("\n")))),
        Err(e) => Ok(Outcome::new(INVALID, e.to_string())),
    }
}

fn cmd_smoothable(ty: &Path, method: Method, out: Option<&Path>) -> Result<Outcome> {
    let t = match with_slopes(read(ty)?) {
        Ok(t) => t,
        Err(e) => return Ok(Outcome::new(INVALID, format!("balancing failed: {e}"))),
    };
    let report = validate_type(&t);
    if !report.is_valid() {
        return Ok(Outcome::new(INVALID, format!("invalid type:\n{report}")));
    }
    let lp = match method {
        Method::Construct => None,
        _ => Some(smoothable_lp(&t)?),
    };
    let built = match method {
        Method::Lp => None,
        _ => Some(smooth_construct(&t)),
    };
    let mut lines = Vec::new();
    if let Some(lp) = &lp {
        lines.push(format!("linear program: {}", if lp.is_some() { "feasible" } else { "infeasible" }));
    }
    if let Some(b) = &built {
        lines.push(match b {
            Ok(_) => "construction: verified realization".to_string(),
            Err(e) => format!("construction: {e}"),
        });
    }
    if let (Some(None), Some(Ok(_))) = (&lp, &built) {
        lines.push("the methods disagree".into());
        return Ok(Outcome::new(INVALID, lines.join("\n")));
    }
    if let Some(Err(e @ (SmoothingError::Construction { .. } | SmoothingError::Unverified(_)))) = &built {
        if matches!(method, Method::Construct) {
            return Ok(Outcome::new(INVALID, e.to_string()));
        }
    }
    let realization: Option<Realization> = match (built, lp) {
        (Some(Ok(r)), _) => Some(r),
        (_, Some(Some(r))) => Some(r),
        _ => None,
    };
    match realization {
        Some(r) => {
            debug_assert!(verify_realization(&t, &r).is_valid());
            emit(out, &r.to_json_string())?;
            Ok(Outcome::new(OK, lines.join("\n")))
        }
        None => Ok(Outcome::new(EMPTY, lines.join("\n"))),
    }
}

fn subdivision_summary(s: &Subdivision) -> String {
    let new: Vec<String> = s.new_rays().iter().map(|&r| s.refined.ray(r).to_string()).collect();
    let mut lines = vec![format!(
        "{} rays, added {}",
        s.refined.num_rays(),
        if new.is_empty() { "none".into() } else { new.join(" ") }
    )];
    lines.extend(s.warnings.iter().map(|w| format!("warning: {w}")));
    lines.join("\n")
}

fn cmd_sensitize(target: &Path, slopes: &Path, out: Option<&Path>) -> Result<Outcome> {
    let c: ConeComplex = read(target)?;
    let m: SensitiveSlopes = read(slopes)?;
    let slopes: Vec<_> = m.primitive.into_iter().collect();
    match sensitize(&c, &slopes) {
        Ok(s) => {
            emit(out, &s.to_json_string())?;
            Ok(Outcome::new(OK, subdivision_summary(&s)))
        }
        Err(e) => Ok(Outcome::new(INVALID, e.to_string())),
    }
}

fn cmd_sensitize_for_data(
    target: &Path,
    lambda: &Path,
    catalogue: &Path,
    jobs: Option<usize>,
    out: Option<&Path>,
) -> Result<Outcome> {
    let c: ConeComplex = read(target)?;
    let lam: NumericalData = read(lambda)?;
    let cat: DegreeCatalogue = read(catalogue)?;
    match thread_pool(jobs)?.install(|| sensitize_for_data(&c, &lam, &cat)) {
        Ok(s) => {
            emit(out, &s.to_json_string())?;
            Ok(Outcome::new(OK, subdivision_summary(&s)))
        }
        Err(e) => Ok(Outcome::new(INVALID, e.to_string())),
    }
}

fn cmd_enumerate(target: &Path, lambda: &Path, catalogue: &Path, jobs: Option<usize>, out: &Path) -> Result<Outcome> {
    let c: ConeComplex = read(target)?;
    let lam: NumericalData = read(lambda)?;
    let cat: DegreeCatalogue = read(catalogue)?;
    let types = match thread_pool(jobs)?.install(|| enumerate_types(&c, &lam, &cat)) {
        Ok(t) => t,
        Err(e) => return Ok(Outcome::new(INVALID, e.to_string())),
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let width = types.len().to_string().len().max(3);
    let mut index = Vec::with_capacity(types.len());
    for (i, t) in types.iter().enumerate() {
        let name = format!("type-{:0width$}.json", i + 1);
        let (code, _) = canonical_form(t);
        write_atomic(&out.join(&name), &t.to_json_string()).with_context(|| format!("writing {name}"))?;
        index.push(json!({ "file": name, "code": code, "vertices": t.graph.vertices().len() }));
    }
    let slopes = collect_sensitive_slopes(&types);
    let idx = json!({ "count": types.len(), "types": index, "sensitive_slopes": slopes.to_json() });
    write_atomic(&out.join("index.json"), &pretty(&idx)).context("writing index.json")?;
    let summary = format!("{} types written to {}", types.len(), out.display());
    Ok(Outcome::new(if types.is_empty() { EMPTY } else { OK }, summary))
}

fn cmd_pushforward(subdivision: &Path, ty: &Path, out: Option<&Path>) -> Result<Outcome> {
    let s: Subdivision = read(subdivision)?;
    let t: CombinatorialType = read(ty)?;
    match pushforward_type(&s, &t) {
        Ok(p) => {
            emit(out, &p.to_json_string())?;
            Ok(Outcome::new(OK, format!("{} vertices after stabilization", p.graph.vertices().len())))
        }
        Err(e) => Ok(Outcome::new(INVALID, e.to_string())),
    }
}

fn cmd_lift_lambda(subdivision: &Path, lambda: &Path, out: Option<&Path>) -> Result<Outcome> {
    let s: Subdivision = read(subdivision)?;
    let lam: NumericalData = read(lambda)?;
    match lift_numerical_data(&s, &lam) {
        Ok(l) => {
            emit(out, &l.to_json_string())?;
            let d: Vec<String> = l.total_degree.iter().map(ToString::to_string).collect();
            Ok(Outcome::new(OK, format!("lifted total degree ({})", d.join(","))))
        }
        Err(e) => Ok(Outcome::new(INVALID, e.to_string())),
    }
}

fn cmd_render(ty: &Path, realization: Option<&Path>, format: RenderFormat, out: Option<&Path>) -> Result<Outcome> {
    let t: CombinatorialType = read(ty)?;
    let t = with_slopes(t.clone()).unwrap_or(t);
    let r: Option<Realization> = realization.map(read).transpose()?;
    let format = match format {
        RenderFormat::Dot => Format::Dot,
        RenderFormat::Svg => Format::Svg,
    };
    match render(&t, r.as_ref(), format) {
        Ok(text) => {
            emit(out, &text)?;
            Ok(Outcome::new(OK, "rendered"))
        }
        Err(e) => Err(anyhow!(e)),
    }
}

mod golden {
    pub const PAPER: &str = include_str!("../fixtures/paper_example.json");
    pub const SMOOTHABLE: &str = include_str!("../fixtures/smoothable.json");
    pub const QUADRANT: &str = include_str!("../fixtures/quadrant.json");
    pub const LAMBDA: &str = include_str!("../fixtures/lambda.json");
    pub const CATALOGUE: &str = include_str!("../fixtures/catalogue.json");
}

fn cmd_selftest() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut all = true;
    let mut check = |name: &str, ok: bool| {
        all &= ok;
        lines.push(format!("{} {name}", if ok { "PASS" } else { "FAIL" }));
    };
    let paper = CombinatorialType::from_json_str(golden::PAPER)?;
    let balanced = balance(&paper)?;
    let slope = |e: usize| balanced.slope(EdgeId(e), balanced.graph.edges()[e - 1].ends[0]).map(ToString::to_string);
    check(
        "balancing gives (1,2) and (2,1)",
        slope(1).as_deref() == Some("(1,2)") && slope(2).as_deref() == Some("(2,1)"),
    );
    check("example type is valid", validate_type(&balanced).is_valid());
    check("example type satisfies Gathmann's condition", check_gathmann(&balanced)?);
    check("example type is not smoothable", smoothable_lp(&balanced)?.is_none());
    let report = check_sensitivity_consequences(&balanced)?;
    let e1 = report.edge(EdgeId(1));
    check("e1 violates mixed sign and small jumping", e1.is_some_and(|v| !v.mixed_sign && !v.small_jumping));
    let json = sensitivity_report_json(&report);
    check("sensitivity report fails", json["passed"] == false);

    let smooth = CombinatorialType::from_json_str(golden::SMOOTHABLE)?;
    let built = smooth_construct(&smooth);
    check(
        "construction on the sensitized fan verifies",
        built.as_ref().is_ok_and(|r| verify_realization(&smooth, r).is_valid()),
    );
    check("linear program agrees", smoothable_lp(&smooth)?.is_some());

    let q = ConeComplex::from_json_str(golden::QUADRANT)?;
    let lam = NumericalData::from_json_str(golden::LAMBDA)?;
    let cat = DegreeCatalogue::from_json_str(golden::CATALOGUE)?;
    let types = enumerate_types(&q, &lam, &cat)?;
    let code = canonical_form(&balanced).0;
    check("enumeration finds the example type", types.iter().any(|t| canonical_form(t).0 == code));
    let s = sensitize_for_data(&q, &lam, &cat)?;
    let rays: Vec<String> = s.refined.rays().iter().map(ToString::to_string).collect();
    check(
        "sensitized quadrant has rays (1,0) (0,1) (1,1) (1,2) (2,1)",
        ["(1,0)", "(0,1)", "(1,1)", "(1,2)", "(2,1)"].iter().all(|r| rays.iter().any(|x| x == r)) && rays.len() == 5,
    );
    Ok(Outcome::new(if all { OK } else { INVALID }, lines.join("\n")))
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Balance { ty, out } => cmd_balance(&ty, out.as_deref()),
        Command::Validate { ty, out } => cmd_validate(&ty, out.as_deref()),
        Command::Gathmann { ty } => cmd_gathmann(&ty),
        Command::Smoothable { ty, method, out } => cmd_smoothable(&ty, method, out.as_deref()),
        Command::Sensitize { target, slopes, out } => cmd_sensitize(&target, &slopes, out.as_deref()),
        Command::SensitizeForData { target, lambda, catalogue, jobs, out } => {
            cmd_sensitize_for_data(&target, &lambda, &catalogue, jobs, out.as_deref())
        }
        Command::Enumerate { target, lambda, catalogue, jobs, out } => {
            cmd_enumerate(&target, &lambda, &catalogue, jobs, &out)
        }
        Command::Pushforward { subdivision, ty, out } => cmd_pushforward(&subdivision, &ty, out.as_deref()),
        Command::LiftLambda { subdivision, lambda, out } => cmd_lift_lambda(&subdivision, &lambda, out.as_deref()),
        Command::Render { ty, realization, format, out } => {
            cmd_render(&ty, realization.as_deref(), format, out.as_deref())
        }
        Command::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let quiet = cli.quiet;
    match run(cli) {
        Ok(o) => {
            if !quiet && !o.summary.is_empty() {
                eprintln!("{}", o.summary.trim_end());
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
