//! The `qrt` command line: argument parsing, file I/O and report formatting over `qrt-core`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use qrt_core::biquad::curve_to_json;
use qrt_core::cubic::OrderKind;
use qrt_core::linkage::{
    link_correspondence, link_to_walk, periodicity, pitot_analysis, render_orbit, walk_to_link,
    Configuration, FourBarLink, InverseData, PeriodicityReport, PitotReport,
};
use qrt_core::numbers::{parse_number, ExactNumber, TowerContext};
use qrt_core::singular::OrderAnalysis;
use qrt_core::walks::{
    closed_form_group_order, combinatorics_suite, default_t_samples, kernel, step_set,
    walk_diagnostics, ClosedForm, CombinatoricsReport, WalkDiagnostics,
};
use qrt_core::{analyze_order, Biquadratic, QrtError, WalkSpec};

/// Exit code for bad input.
pub const EXIT_INPUT: u8 = 2;
/// Exit code for a failed self-check or oracle disagreement.
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qrt",
    version,
    about = "Exact orders of QRT maps on biquadratic curves, walks and 4-bar links"
)]
pub struct Cli {
    /// Largest QRT order searched.
    #[arg(long, global = true, env = "QRT_MAX_ORDER", default_value_t = 24)]
    pub max_order: u32,
    /// Decimal digits for floating confirmations.
    #[arg(long, global = true, env = "QRT_PRECISION", default_value_t = 50)]
    pub precision: u32,
    /// Run the independent oracle checks.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::On)]
    pub oracle: Toggle,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output file (the report, or the SVG for `render`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timing; reports are no longer byte-stable.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    WalkToLink,
    LinkToWalk,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants, classification and QRT order of a curve file.
    Analyze { file: PathBuf },
    /// A walk file, or a bundled step set over a grid of t.
    Walk {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        step_set: Option<String>,
        /// Comma-separated t values for --step-set.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<String>,
    },
    /// Period, semi-period or Pitot analysis of a 4-bar link.
    Linkage {
        /// Comma-separated sides a,b,c,d.
        #[arg(long, allow_hyphen_values = true)]
        sides: Option<String>,
        /// Link file `{"sides": [...]}`.
        #[arg(conflicts_with = "sides")]
        file: Option<PathBuf>,
    },
    /// Converts between diagonal walks and 4-bar links.
    Convert {
        #[arg(value_enum)]
        direction: Direction,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        sides: Option<String>,
        file: Option<PathBuf>,
    },
    /// One JSON line per grid point of a parametrized family.
    Sweep {
        /// `kt:<step set>` (parameter t), `link:<a,b,c,d>` or `curve:<file>` with free names.
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        /// `name=v1,v2,...` or `name=start..end:count`; at most two.
        #[arg(long, allow_hyphen_values = true)]
        grid: Vec<String>,
    },
    /// SVG strip of a Darboux orbit.
    Render {
        #[arg(long, allow_hyphen_values = true)]
        sides: String,
        #[arg(long, default_value_t = 2)]
        steps: usize,
        /// Crank angle of the start configuration, radians.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        phi: f64,
        /// Put V4 below the diagonal V1V3.
        #[arg(long)]
        lower: bool,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<QrtError> for CliError {
    fn from(e: QrtError) -> Self {
        let code = if e.is_internal() {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Rendered output and whether any self-check failed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub inconsistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Mode {
    pub arithmetic: &'static str,
    pub precision_digits: u32,
    pub max_order: u32,
    pub oracle: bool,
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub input: Value,
    pub mode: Mode,
    pub result: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_sides(text: &str, ctx: &TowerContext) -> Result<FourBarLink, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    Ok(FourBarLink::parse(&parts, ctx)?)
}

fn num(text: &str, ctx: &TowerContext) -> Result<ExactNumber, CliError> {
    parse_number(text.trim(), ctx).map_err(|e| input_error(format!("{text}: {e}")))
}

fn weights(w: &WalkSpec) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for j in -1..=1 {
        for k in -1..=1 {
            let p = w.p(j, k);
            if !p.is_zero() {
                out.insert(format!("{j},{k}"), p.to_string());
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Invariants {
    pub d: String,
    pub e: String,
    pub f: String,
    pub j: Option<String>,
    pub smooth: bool,
    pub d1: String,
    pub d2: String,
}

fn invariants(q: &Biquadratic) -> Result<Invariants, CliError> {
    let inv = q.curve_invariants()?;
    let (d1, d2) = q.critical_patterns();
    Ok(Invariants {
        smooth: inv.is_smooth(),
        d: inv.d.to_string(),
        e: inv.e.to_string(),
        f: inv.f.to_string(),
        j: inv.j.map(|j| j.to_string()),
        d1: d1.to_string(),
        d2: d2.to_string(),
    })
}

#[derive(Debug, Serialize)]
pub struct AnalyzeResult {
    pub invariants: Invariants,
    pub analysis: OrderAnalysis,
    /// Determinant tests for group orders 4, 6, 8, 10 on smooth curves.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub closed_forms: Vec<ClosedForm>,
    /// The closed forms name the same group order as the Hankel search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_forms_agree: Option<bool>,
}

fn analyze_curve(q: &Biquadratic, cfg: &Cli) -> Result<(AnalyzeResult, bool), CliError> {
    let invariants = invariants(q)?;
    let analysis = analyze_order(q, cfg.max_order, cfg.oracle == Toggle::On)?;
    let mut closed_forms = Vec::new();
    let mut agree = None;
    if invariants.smooth {
        for k in [4, 6, 8, 10] {
            closed_forms.push(closed_form_group_order(q, k)?);
        }
        let fired = closed_forms.iter().find(|c| c.holds).map(|c| c.k);
        let hankel = analysis.verdict.group_order.filter(|g| *g <= 10);
        agree = Some(fired == hankel);
    }
    let bad = analysis.verdict.oracle_agreement == Some(false) || agree == Some(false);
    Ok((
        AnalyzeResult {
            invariants,
            analysis,
            closed_forms,
            closed_forms_agree: agree,
        },
        bad,
    ))
}

#[derive(Debug, Serialize)]
pub struct WalkResult {
    pub weights: BTreeMap<String, String>,
    pub total: String,
    pub stochastic: bool,
    pub diagonal: bool,
    pub diagnostics: WalkDiagnostics,
    pub kernel: Value,
    pub kernel_analysis: AnalyzeResult,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum LinkageOutcome {
    Smooth(Box<PeriodicityReport>),
    Pitot(Box<PitotReport>),
}

#[derive(Debug, Serialize)]
pub struct LinkageResult {
    pub sides: [String; 4],
    pub correspondence: Value,
    /// `2²⁴(abcd)⁴ ∏(a ± b ± c ± d)`
    pub f_l: String,
    pub smooth: bool,
    pub report: LinkageOutcome,
}

fn linkage_result(l: &FourBarLink, cfg: &Cli) -> Result<(LinkageResult, bool), CliError> {
    let q = link_correspondence(l);
    let smooth = q.curve_invariants()?.is_smooth();
    let (report, bad) = if smooth {
        let r = periodicity(l, cfg.max_order, cfg.oracle == Toggle::On)?;
        let bad = !r.agreement
            || !r.poristic.passed
            || r.hankel.oracle_agreement == Some(false)
            || r.semi.closed_forms_agree == Some(false)
            || r.semi.mirror_check.as_ref().is_some_and(|m| !m.passed);
        (LinkageOutcome::Smooth(Box::new(r)), bad)
    } else {
        let r = pitot_analysis(l, cfg.max_order)?;
        let bad = r.ratio_agrees == Some(false) || r.numeric.as_ref().is_some_and(|m| !m.passed);
        (LinkageOutcome::Pitot(Box::new(r)), bad)
    };
    let result = LinkageResult {
        sides: l.sides_text(),
        correspondence: serde_json::from_str(&curve_to_json(&q)).expect("valid json"),
        f_l: l.f_l().to_string(),
        smooth,
        report,
    };
    Ok((result, bad))
}

#[derive(Debug, Serialize)]
pub struct ConversionResult {
    pub direction: &'static str,
    pub lambda: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse: Option<InverseData>,
    pub sides: [String; 4],
    pub weights: BTreeMap<String, String>,
    pub total: String,
    pub stochastic: bool,
    /// `kernel(walk) = L/λ` exactly.
    pub kernel_proportional: bool,
    /// Input weights that the forward map does not reproduce (walk to link only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<String>,
}

fn conversion(
    direction: Direction,
    lambda: &ExactNumber,
    link: &FourBarLink,
    inverse: Option<InverseData>,
    given: Option<&WalkSpec>,
) -> Result<ConversionResult, CliError> {
    let w = link_to_walk(link, lambda)?;
    let proportional =
        kernel(&w)? == link_correspondence(link).scaled(&(&ExactNumber::one() / lambda));
    let mut discrepancies = Vec::new();
    if let Some(g) = given {
        for j in -1..=1 {
            for k in -1..=1 {
                if g.p(j, k) != w.p(j, k) {
                    discrepancies.push(format!(
                        "p[{j},{k}]: given {}, forward map gives {}",
                        g.p(j, k),
                        w.p(j, k)
                    ));
                }
            }
        }
    }
    Ok(ConversionResult {
        direction: match direction {
            Direction::WalkToLink => "walk-to-link",
            Direction::LinkToWalk => "link-to-walk",
        },
        lambda: lambda.to_string(),
        inverse,
        sides: link.sides_text(),
        total: w.total().to_string(),
        stochastic: w.is_stochastic(),
        weights: weights(&w),
        kernel_proportional: proportional,
        discrepancies,
    })
}

/// A parsed `--grid` axis.
#[derive(Debug, Clone)]
pub struct Axis {
    pub name: String,
    pub values: Vec<String>,
}

/// `t=1/5,1/4` or `t=0..1:5` (inclusive, evenly spaced, exact).
pub fn parse_axis(text: &str, ctx: &TowerContext) -> Result<Axis, CliError> {
    let (name, rest) = text
        .split_once('=')
        .ok_or_else(|| input_error(format!("grid '{text}' lacks '='")))?;
    let name = name.trim();
    if name.is_empty()
        || !name.chars().all(|c| c.is_ascii_alphabetic() || c == '_')
        || name == "sqrt"
    {
        return Err(input_error(format!("bad parameter name '{name}'")));
    }
    let values =
        if let Some((range, count)) = rest.split_once(':').filter(|(r, _)| r.contains("..")) {
            let (lo, hi) = range.split_once("..").expect("checked");
            let (lo, hi) = (num(lo, ctx)?, num(hi, ctx)?);
            let count: i64 = count
                .trim()
                .parse()
                .map_err(|_| input_error(format!("bad count '{count}'")))?;
            if count < 1 {
                return Err(input_error("grid count must be positive"));
            }
            if count == 1 {
                vec![lo.to_string()]
            } else {
                let step = &(&hi - &lo) / &ExactNumber::from_int(count - 1);
                (0..count)
                    .map(|i| (&lo + &(&step * &ExactNumber::from_int(i))).to_string())
                    .collect()
            }
        } else {
            rest.split(',').map(|s| s.trim().to_string()).collect()
        };
    Ok(Axis {
        name: name.to_string(),
        values,
    })
}

/// Replaces whole-word parameter names with `(value)`.
pub fn substitute(template: &str, point: &[(String, String)]) -> String {
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        match point.iter().find(|(n, _)| n == word) {
            Some((_, v)) => {
                out.push('(');
                out.push_str(v);
                out.push(')');
            }
            None => out.push_str(word),
        }
        word.clear();
    };
    for ch in template.chars() {
        if ch.is_ascii_alphabetic() || ch == '_' {
            word.push(ch);
        } else {
            flush(&mut word, &mut out);
            out.push(ch);
        }
    }
    flush(&mut word, &mut out);
    out
}

#[derive(Debug, Serialize)]
pub struct SweepLine {
    pub point: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub inconsistent: bool,
}

fn sweep_point(family: &str, point: &[(String, String)], cfg: &Cli) -> SweepLine {
    let mut line = SweepLine {
        point: point.iter().cloned().collect(),
        group_order: None,
        period: None,
        route: None,
        certificate: None,
        error: None,
        inconsistent: false,
    };
    let ctx = TowerContext::new();
    let outcome: Result<(), CliError> = (|| {
        if let Some(name) = family.strip_prefix("kt:") {
            let s =
                step_set(name).ok_or_else(|| input_error(format!("unknown step set {name}")))?;
            let t = num(&substitute("t", point), &ctx)?;
            let a = analyze_order(&s.k_t(&t)?, cfg.max_order, cfg.oracle == Toggle::On)?;
            fill_analysis(&mut line, &a);
        } else if let Some(sides) = family.strip_prefix("link:") {
            let l = parse_sides(&substitute(sides, point), &ctx)?;
            let (r, bad) = linkage_result(&l, cfg)?;
            line.inconsistent = bad;
            match r.report {
                LinkageOutcome::Smooth(p) => {
                    line.period = p.period;
                    line.route = Some(p.fired.clone());
                    line.certificate = p.semi_period.map(|k| format!("semi-period {k}"));
                }
                LinkageOutcome::Pitot(p) => {
                    fill_analysis(&mut line, &p.analysis);
                }
            }
        } else if let Some(path) = family.strip_prefix("curve:") {
            let text = substitute(&read(Path::new(path))?, point);
            let q = qrt_core::biquad::curve_from_json(&text, &ctx)?;
            let a = analyze_order(&q, cfg.max_order, cfg.oracle == Toggle::On)?;
            fill_analysis(&mut line, &a);
        } else {
            return Err(input_error(format!("unknown family '{family}'")));
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        line.inconsistent |= e.code == EXIT_INTERNAL;
        line.error = Some(e.message);
    }
    line
}

fn fill_analysis(line: &mut SweepLine, a: &OrderAnalysis) {
    line.group_order = a.verdict.group_order;
    line.period = a.verdict.qrt_order();
    line.route = Some(
        serde_json::to_value(a.route)
            .expect("serializable")
            .as_str()
            .unwrap_or("")
            .to_string(),
    );
    line.certificate = Some(a.verdict.certificate.clone());
    line.inconsistent = a.verdict.oracle_agreement == Some(false);
    if let OrderKind::NoOrderUpTo { .. } = a.verdict.kind {
        line.group_order = None;
    }
}

fn grid_points(axes: &[Axis]) -> Vec<Vec<(String, String)>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.name.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(m) if !m.is_empty() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(v, indent + 2, out);
                    }
                    Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in a {
                            if item.is_object() {
                                out.push_str(&format!("{pad}  -\n"));
                                render_value(item, indent + 4, out);
                            } else {
                                out.push_str(&format!("{pad}  - {}\n", scalar(item)));
                            }
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

fn format_report<T: Serialize>(report: &Report<T>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_value(
                &serde_json::to_value(report).expect("serializable"),
                0,
                &mut out,
            );
            out
        }
    }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let ctx = TowerContext::new();
    let mode = Mode {
        arithmetic: "exact",
        precision_digits: cli.precision,
        max_order: cli.max_order,
        oracle: cli.oracle == Toggle::On,
    };
    let timing = |r: &mut Option<f64>| {
        if cli.timing {
            *r = Some(start.elapsed().as_secs_f64() * 1e3);
        }
    };
    macro_rules! finish {
        ($command:expr, $input:expr, $result:expr, $bad:expr) => {{
            let mut report = Report {
                command: $command,
                input: $input,
                mode: mode.clone(),
                result: $result,
                timing_ms: None,
            };
            timing(&mut report.timing_ms);
            Ok(Outcome {
                text: format_report(&report, cli.format),
                inconsistent: $bad,
            })
        }};
    }
    match &cli.command {
        Command::Analyze { file } => {
            let q = qrt_core::biquad::curve_from_json(&read(file)?, &ctx)?;
            let (res, bad) = analyze_curve(&q, cli)?;
            finish!(
                "analyze",
                serde_json::from_str(&curve_to_json(&q)).expect("valid json"),
                res,
                bad
            )
        }
        Command::Walk {
            file: Some(file), ..
        } => {
            let w = WalkSpec::from_json(&read(file)?, &ctx)?;
            let k = kernel(&w)?;
            let (kernel_analysis, bad) = analyze_curve(&k, cli)?;
            let res = WalkResult {
                weights: weights(&w),
                total: w.total().to_string(),
                stochastic: w.is_stochastic(),
                diagonal: w.is_diagonal(),
                diagnostics: walk_diagnostics(&w, cli.max_order, cli.precision)?,
                kernel: serde_json::from_str(&curve_to_json(&k)).expect("valid json"),
                kernel_analysis,
            };
            finish!(
                "walk",
                serde_json::to_value(weights(&w)).expect("map"),
                res,
                bad
            )
        }
        Command::Walk {
            file: None,
            step_set: Some(name),
            t,
        } => {
            let s =
                step_set(name).ok_or_else(|| input_error(format!("unknown step set '{name}'")))?;
            let ts = if t.is_empty() {
                default_t_samples()
            } else {
                t.iter()
                    .map(|v| num(v, &ctx))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let rep: CombinatoricsReport = combinatorics_suite(&s, &ts, cli.max_order)?;
            let input = serde_json::json!({ "step_set": name, "t": ts.iter().map(|t| t.to_string()).collect::<Vec<_>>() });
            finish!("walk", input, rep, false)
        }
        Command::Walk { .. } => Err(input_error("give a walk file or --step-set")),
        Command::Linkage { sides, file } => {
            let l = match (sides, file) {
                (Some(s), _) => parse_sides(s, &ctx)?,
                (None, Some(f)) => FourBarLink::from_json(&read(f)?, &ctx)?,
                (None, None) => return Err(input_error("give --sides or a link file")),
            };
            let (res, bad) = linkage_result(&l, cli)?;
            finish!(
                "linkage",
                serde_json::json!({ "sides": l.sides_text() }),
                res,
                bad
            )
        }
        Command::Convert {
            direction,
            lambda,
            sides,
            file,
        } => {
            let lam = num(lambda, &ctx)?;
            let res = match direction {
                Direction::WalkToLink => {
                    let f = file
                        .as_ref()
                        .ok_or_else(|| input_error("walk-to-link needs a walk file"))?;
                    let w = WalkSpec::from_json(&read(f)?, &ctx)?;
                    let (l, data) = walk_to_link(&w, &lam, &ctx)?;
                    conversion(*direction, &lam, &l, Some(data), Some(&w))?
                }
                Direction::LinkToWalk => {
                    let l = match (sides, file) {
                        (Some(s), _) => parse_sides(s, &ctx)?,
                        (None, Some(f)) => FourBarLink::from_json(&read(f)?, &ctx)?,
                        (None, None) => {
                            return Err(input_error("link-to-walk needs --sides or a link file"))
                        }
                    };
                    conversion(*direction, &lam, &l, None, None)?
                }
            };
            let bad = !res.kernel_proportional;
            finish!(
                "convert",
                serde_json::json!({ "lambda": lam.to_string() }),
                res,
                bad
            )
        }
        Command::Sweep { family, grid } => {
            if grid.is_empty() || grid.len() > 2 {
                return Err(input_error("a sweep needs one or two --grid axes"));
            }
            let axes = grid
                .iter()
                .map(|g| parse_axis(g, &ctx))
                .collect::<Result<Vec<_>, _>>()?;
            let points = grid_points(&axes);
            let lines: Vec<SweepLine> = points
                .par_iter()
                .map(|p| sweep_point(family, p, cli))
                .collect();
            let mut text = String::new();
            for l in &lines {
                text.push_str(&serde_json::to_string(l).expect("serializable"));
                text.push('\n');
            }
            Ok(Outcome {
                text,
                inconsistent: lines.iter().any(|l| l.inconsistent),
            })
        }
        Command::Render {
            sides,
            steps,
            phi,
            lower,
        } => {
            let out = cli
                .out
                .as_ref()
                .ok_or_else(|| input_error("render needs --out"))?;
            let l = parse_sides(sides, &ctx)?;
            let start = Configuration::from_angle(l.sides_f64(), *phi, !*lower)
                .ok_or_else(|| input_error(format!("no real configuration at phi = {phi}")))?;
            render_orbit(&start, *steps, out)?;
            let closure = start.distance(
                qrt_core::linkage::darboux_orbit(&start, *steps)?
                    .last()
                    .expect("nonempty"),
            );
            let text = format!(
                "wrote {} polygons to {}; last-to-first distance {closure:.3e}\n",
                steps + 1,
                out.display()
            );
            Ok(Outcome {
                text,
                inconsistent: false,
            })
        }
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with(cli: Cli) -> u8 {
    let writes_report = !matches!(cli.command, Command::Render { .. });
    match run(&cli) {
        Ok(outcome) => {
            match (&cli.out, writes_report) {
                (Some(path), true) => {
                    if let Err(e) = std::fs::write(path, &outcome.text) {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                _ => print!("{}", outcome.text),
            }
            if outcome.inconsistent {
                eprintln!("error: a self-check or oracle comparison failed; see the report");
                EXIT_INTERNAL
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
