//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime failure (including write errors),
//! 2 on invalid input (bad flags, unreadable or invalid scenario files,
//! unknown player types).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::DenoiseError;
use crate::geometry::{ConvexRegion, Point2};
use crate::simulator::{
    accuracy_benchmark, two_cycle_demo, BenchmarkReport, ScenarioConfig, TwoCycleDemo,
};
use crate::tracker::{build_max_move_table, EstimatorMode, PlayerTypeSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub const CSV_HEADER: &str =
    "seed,cycle,object_id,observed,baseline_err_m,denoised_err_m,region_area_m2,was_reset";

#[derive(Debug, Parser)]
#[command(
    name = "ss2d-denoise",
    version,
    about = "Observation denoising benchmark for Soccer Simulation 2D"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario over one or more seeds and write per-cycle traces.
    Run(RunArgs),
    /// Write the two-cycle teammate demo as JSON plus an SVG rendering.
    Demo(DemoArgs),
    /// Print the max-move table of a player type.
    Table(TableArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// First seed; defaults to the scenario's `seed` (42 when unset).
    #[arg(long)]
    pub base_seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Overrides the scenario's estimator_mode.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
}

#[derive(Debug, clap::Args)]
pub struct DemoArgs {
    /// JSON output; the SVG goes next to it with an `.svg` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct TableArgs {
    #[arg(long = "type", default_value_t = 0)]
    pub type_id: u32,
    #[arg(long, default_value_t = 50, allow_hyphen_values = true)]
    pub horizon: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Centroid,
    Bbox,
}

impl From<EstimatorArg> for EstimatorMode {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Centroid => EstimatorMode::Centroid,
            EstimatorArg::Bbox => EstimatorMode::BboxMidpoint,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Demo(a) => cmd_demo(&a, out, err),
        Command::Table(a) => cmd_table(&a, out, err),
    }
}

fn fail(err: &mut dyn Write, code: i32, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    code
}

/// Loads and validates a scenario, describing every problem found.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read scenario {}: {e}", path.display()))?;
    let config: ScenarioConfig = serde_json::from_str(&text)
        .map_err(|e| format!("invalid scenario {}: {e}", path.display()))?;
    match config.validate() {
        Ok(()) => Ok(config),
        Err(DenoiseError::InvalidConfig(issues)) => Err(format!(
            "invalid scenario {}:\n  {}",
            path.display(),
            issues.join("\n  ")
        )),
        Err(e) => Err(format!("invalid scenario {}: {e}", path.display())),
    }
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut config = match load_scenario(&args.scenario) {
        Ok(c) => c,
        Err(msg) => return fail(err, EXIT_INVALID, msg),
    };
    if args.seeds < 1 {
        return fail(err, EXIT_INVALID, "--seeds must be at least 1");
    }
    if let Some(seed) = args.base_seed {
        config.seed = seed;
    }
    if let Some(e) = args.estimator {
        config.estimator_mode = e.into();
    }
    let report = match accuracy_benchmark(&config, args.seeds) {
        Ok(r) => r,
        Err(e) => return fail(err, EXIT_RUNTIME, e),
    };
    let body = match args.format {
        OutputFormat::Csv => render_csv(&report),
        OutputFormat::Json => render_json(&report),
    };
    if let Err(e) = std::fs::write(&args.out, body) {
        return fail(
            err,
            EXIT_RUNTIME,
            format!("cannot write {}: {e}", args.out.display()),
        );
    }
    let agg = &report.aggregate;
    let _ = writeln!(
        out,
        "seeds {}..{}: mean improvement {:.6} m ({:.3} cm), std {:.6} m; soundness {:.6}, resets {}",
        agg.base_seed,
        agg.base_seed + agg.n_seeds as u64 - 1,
        agg.mean_improvement_m,
        agg.mean_improvement_m * 100.0,
        agg.std_improvement_m,
        agg.min_soundness_rate,
        agg.reset_count
    );
    EXIT_OK
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Per-cycle rows sorted by seed, cycle and object, then a `#` summary block.
pub fn render_csv(report: &BenchmarkReport) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    let mut rows: Vec<_> = report.runs.iter().flat_map(|r| &r.rows).collect();
    rows.sort_by_key(|r| (r.seed, r.cycle, r.object_id));
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.cycle,
            r.object_id,
            r.observed,
            fmt6(r.baseline_err),
            fmt6(r.denoised_err),
            fmt6(r.region_area),
            r.was_reset
        );
    }
    let a = &report.aggregate;
    let _ = writeln!(s, "# seeds={} base_seed={}", a.n_seeds, a.base_seed);
    let _ = writeln!(
        s,
        "# mean_improvement_m={} mean_improvement_cm={} std_improvement_m={}",
        fmt6(a.mean_improvement_m),
        fmt6(a.mean_improvement_m * 100.0),
        fmt6(a.std_improvement_m)
    );
    let _ = writeln!(
        s,
        "# mean_baseline_err_m={} mean_denoised_err_m={} min_soundness_rate={} reset_count={}",
        fmt6(a.mean_baseline_err),
        fmt6(a.mean_denoised_err),
        fmt6(a.min_soundness_rate),
        a.reset_count
    );
    for b in &a.bands {
        let hi = b.hi.map_or("inf".to_string(), |h| format!("{h}"));
        let _ = writeln!(
            s,
            "# band=[{},{}) observed_rows={} baseline_err_m={} denoised_err_m={} improvement_m={}",
            b.lo,
            hi,
            b.count,
            fmt6(b.mean_baseline_err),
            fmt6(b.mean_denoised_err),
            fmt6(b.improvement_m)
        );
    }
    for r in &report.runs {
        let m = &r.summary;
        let _ = writeln!(
            s,
            "# seed={} improvement_m={} soundness_rate={} reset_count={}",
            m.seed,
            fmt6(m.improvement_m),
            fmt6(m.soundness_rate),
            m.reset_count
        );
    }
    s
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            let r = (x * 1e6).round() / 1e6;
            if let Some(num) = serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r }) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// `{rows: [...], summary: {...}}` with every float rounded to 6 decimals.
pub fn render_json(report: &BenchmarkReport) -> String {
    let mut rows: Vec<_> = report.runs.iter().flat_map(|r| &r.rows).collect();
    rows.sort_by_key(|r| (r.seed, r.cycle, r.object_id));
    let mut doc = json!({
        "rows": rows,
        "summary": {
            "aggregate": report.aggregate,
            "runs": report.runs.iter().map(|r| &r.summary).collect::<Vec<_>>(),
        },
    });
    round_numbers(&mut doc);
    let mut text = serde_json::to_string_pretty(&doc).unwrap_or_default();
    text.push('\n');
    text
}

pub fn cmd_demo(args: &DemoArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let demo = match two_cycle_demo() {
        Ok(d) => d,
        Err(e) => return fail(err, EXIT_RUNTIME, e),
    };
    let svg_path = args.out.with_extension("svg");
    let doc = demo_document(&demo);
    let mut text = serde_json::to_string_pretty(&doc).unwrap_or_default();
    text.push('\n');
    if let Err(e) = std::fs::write(&args.out, text) {
        return fail(
            err,
            EXIT_RUNTIME,
            format!("cannot write {}: {e}", args.out.display()),
        );
    }
    if let Err(e) = std::fs::write(&svg_path, render_svg(&demo)) {
        return fail(
            err,
            EXIT_RUNTIME,
            format!("cannot write {}: {e}", svg_path.display()),
        );
    }
    for c in &demo.cycles {
        let _ = writeln!(
            out,
            "cycle {}: sector {:.4} m2, intersection {:.4} m2, baseline err {:.4} m, denoised err {:.4} m",
            c.cycle,
            c.sector.area(),
            c.intersection.area(),
            c.baseline_err,
            c.denoised_err
        );
    }
    let _ = writeln!(
        out,
        "wrote {} and {}",
        args.out.display(),
        svg_path.display()
    );
    EXIT_OK
}

/// Geometry dump: per cycle the sector, predicted and intersection polygons
/// and the baseline and denoised points.
pub fn demo_document(demo: &TwoCycleDemo) -> Value {
    let cycles: Vec<Value> = demo
        .cycles
        .iter()
        .map(|c| {
            json!({
                "cycle": c.cycle,
                "sector": c.sector,
                "predicted": c.predicted,
                "intersection": c.intersection,
                "baseline_point": c.baseline_point,
                "denoised_point": c.denoised_point,
                "true_point": c.true_point,
                "baseline_err": c.baseline_err,
                "denoised_err": c.denoised_err,
            })
        })
        .collect();
    json!({
        "observer": demo.observer,
        "cycles": cycles,
        "summary": demo.report.summary,
    })
}

const PANEL: f64 = 400.0;

struct Frame {
    lo: Point2,
    scale: f64,
}

impl Frame {
    fn around(regions: &[&ConvexRegion]) -> Self {
        let pts: Vec<Point2> = regions
            .iter()
            .flat_map(|r| r.vertices().iter().copied())
            .collect();
        let lo = pts.iter().fold(Point2::new(f64::MAX, f64::MAX), |a, p| {
            Point2::new(a.x.min(p.x), a.y.min(p.y))
        });
        let hi = pts.iter().fold(Point2::new(f64::MIN, f64::MIN), |a, p| {
            Point2::new(a.x.max(p.x), a.y.max(p.y))
        });
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-6) * 1.1;
        let center = (lo + hi) * 0.5;
        Self {
            lo: center - Point2::new(span / 2.0, span / 2.0),
            scale: PANEL / span,
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (
            (p.x - self.lo.x) * self.scale,
            PANEL - (p.y - self.lo.y) * self.scale,
        )
    }

    fn points(&self, r: &ConvexRegion) -> String {
        r.vertices()
            .iter()
            .map(|&v| {
                let (x, y) = self.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Side-by-side panels, one `<g>` per cycle.
pub fn render_svg(demo: &TwoCycleDemo) -> String {
    let width = PANEL * demo.cycles.len() as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    for (i, c) in demo.cycles.iter().enumerate() {
        let frame = Frame::around(&[&c.predicted, &c.sector]);
        let _ = writeln!(
            s,
            r#"  <g id="cycle-{}" transform="translate({:.0},0)">"#,
            c.cycle,
            PANEL * i as f64
        );
        let _ = writeln!(
            s,
            r##"    <rect x="0" y="0" width="{PANEL}" height="{PANEL}" fill="#ffffff" stroke="#888888"/>"##
        );
        let _ = writeln!(
            s,
            r##"    <polygon class="predicted" points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
            frame.points(&c.predicted)
        );
        let _ = writeln!(
            s,
            r##"    <polygon class="sector" points="{}" fill="none" stroke="#000000" stroke-width="2"/>"##,
            frame.points(&c.sector)
        );
        let _ = writeln!(
            s,
            r##"    <polygon class="intersection" points="{}" fill="#d62728" fill-opacity="0.25" stroke="none"/>"##,
            frame.points(&c.intersection)
        );
        let (bx, by) = frame.map(c.baseline_point);
        let (dx, dy) = frame.map(c.denoised_point);
        let _ = writeln!(
            s,
            r##"    <circle class="baseline" cx="{bx:.2}" cy="{by:.2}" r="5" fill="#1f77b4"/>"##
        );
        let _ = writeln!(
            s,
            r##"    <circle class="denoised" cx="{dx:.2}" cy="{dy:.2}" r="5" fill="#d62728"/>"##
        );
        let _ = writeln!(
            s,
            r##"    <text x="10" y="20" font-family="sans-serif" font-size="14">cycle {}</text>"##,
            c.cycle
        );
        let _ = writeln!(s, "  </g>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn cmd_table(args: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(spec) = PlayerTypeSpec::builtin(args.type_id) else {
        return fail(
            err,
            EXIT_INVALID,
            format!("unknown player type {}", args.type_id),
        );
    };
    let table = match build_max_move_table(&spec, args.horizon) {
        Ok(t) => t,
        Err(e) => return fail(err, EXIT_INVALID, e),
    };
    let mut s = String::from("n,speed_m_per_cycle,cumulative_m\n");
    for (n, speed) in table.speeds.iter().enumerate() {
        let _ = writeln!(s, "{n},{},{}", fmt6(*speed), fmt6(table.cumulative[n]));
    }
    if out.write_all(s.as_bytes()).is_err() {
        return EXIT_RUNTIME;
    }
    EXIT_OK
}
