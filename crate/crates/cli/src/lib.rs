//! `inclab` command-line driver.
//!
//! Settings come from three layers: built-in defaults, then the JSON
//! document given by `--config`, then command-line flags.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use incidence_core::dual::{circle_dual, dp_dual_line, rich_planes};
use incidence_core::engine::{count, t_rich_points, CountOptions, CurveSet, IncidenceReport, Instance, Mode, PointSet};
use incidence_core::generators::{gen, GenKind, GenSpec, Generated};
use incidence_core::kernel::Vec3;
use incidence_core::partition::{build_partition, classify, PartitionOptions};
use incidence_core::scan::{scan, ScanSpec, CSV_HEADER as SCAN_HEADER};
use incidence_core::tangency::DirectedPoint;
use incidence_core::verify::{run_check, VerifyConfig, VerifyReport, MANIFEST};
use incidence_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "inclab", version, about = "Exact incidence experiments for tangencies, anchored circles and their duals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Build an instance from a generator spec.
    Generate,
    /// Count incidences of an instance.
    Count,
    /// List t-rich points (--t) or q-rich dual planes (--q).
    Rich,
    /// Build a partitioning polynomial for the instance's points.
    Partition,
    /// Emit the dual points and lines of a tangency instance.
    Dual,
    /// Count a doubling family m = n = n0 * 2^i and fit the growth exponent.
    Scan,
    /// Run the invariant suite; exits 2 on any failure.
    Verify,
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct Flags {
    /// JSON config document; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Instance file (JSON from `generate` or a bare instance).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Rich-point threshold.
    #[arg(long, global = true)]
    pub t: Option<usize>,
    /// Rich-plane threshold.
    #[arg(long, global = true)]
    pub q: Option<usize>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Generator family for `generate` and `scan`.
    #[arg(long, global = true, value_parser = parse_kind)]
    pub family: Option<GenKind>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub density: Option<f64>,
    /// First scan size.
    #[arg(long, global = true)]
    pub n0: Option<usize>,
    /// Number of scan rows.
    #[arg(long, global = true)]
    pub doublings: Option<usize>,
    /// Multiplier on verify trial counts.
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    /// Restrict verify to these invariant ids (repeatable).
    #[arg(long = "check", global = true)]
    pub checks: Vec<String>,
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    GenKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = GenKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown family {s:?}; expected one of {}", names.join(", "))
        })
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    #[default]
    Exact,
    Prefilter,
}

/// The `--config` document. Every field is optional.
#[derive(Serialize, Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inline generator spec, one of the two input sources.
    pub generate: Option<GenSpec>,
    /// Instance file, the other input source; relative to the config file.
    pub input: Option<PathBuf>,
    pub scan: Option<ScanSpec>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub mode: Option<ModeArg>,
    pub slack: Option<f64>,
    pub t: Option<usize>,
    pub q: Option<usize>,
    pub levels: Option<usize>,
    pub epsilon: Option<f64>,
    pub verify_scale: Option<f64>,
    pub checks: Option<Vec<String>>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InfeasibleSpec(_) | CoreError::TooFewPoints { .. } | CoreError::RetryBudgetExhausted { .. } => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Command,
    pub config: RunConfig,
    pub flags: Flags,
}

impl Settings {
    pub fn load(cli: Cli) -> CliResult<Self> {
        let mut config = match &cli.flags.config {
            Some(path) => {
                let text = read(path)?;
                let mut c: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                if let (Some(input), Some(dir)) = (&c.input, path.parent()) {
                    if input.is_relative() {
                        c.input = Some(dir.join(input));
                    }
                }
                c
            }
            None => RunConfig::default(),
        };
        let f = &cli.flags;
        macro_rules! over {
            ($($field:ident),*) => { $( if f.$field.is_some() { config.$field = f.$field.clone(); } )* };
        }
        over!(input, seed, threads, format, out, mode, t, q, levels, epsilon);
        if f.scale.is_some() {
            config.verify_scale = f.scale;
        }
        if !f.checks.is_empty() {
            config.checks = Some(f.checks.clone());
        }
        if f.family.is_some() || f.m.is_some() || f.n.is_some() || f.density.is_some() {
            if cli.command == Command::Scan {
                if f.m.is_some() || f.n.is_some() {
                    return usage("scan sizes come from --n0 and --doublings, not --m/--n");
                }
            } else {
                let base = config.generate.take();
                let kind = f.family.or(base.as_ref().map(|g| g.kind));
                let Some(kind) = kind else {
                    return usage("--m, --n and --density need --family or a generate section");
                };
                let mut g = base.filter(|g| g.kind == kind).unwrap_or_else(|| GenSpec::new(kind, 0, 0, 0));
                g.m = f.m.unwrap_or(g.m);
                g.n = f.n.unwrap_or(g.n);
                if let Some(d) = f.density {
                    g.density = d;
                }
                config.generate = Some(g);
            }
        }
        if cli.command == Command::Scan {
            let mut s = config.scan.take().or_else(|| {
                f.family.map(|family| ScanSpec {
                    family,
                    n0: 512,
                    doublings: 5,
                    density: None,
                    seed: 0,
                })
            });
            if let Some(s) = s.as_mut() {
                s.family = f.family.unwrap_or(s.family);
                s.n0 = f.n0.unwrap_or(s.n0);
                s.doublings = f.doublings.unwrap_or(s.doublings);
                s.density = f.density.or(s.density);
            }
            config.scan = s;
        }
        if let Some(seed) = config.seed {
            if let Some(g) = config.generate.as_mut() {
                g.seed = seed;
            }
            if let Some(s) = config.scan.as_mut() {
                s.seed = seed;
            }
        }
        Ok(Self {
            command: cli.command,
            config,
            flags: cli.flags,
        })
    }

    fn format(&self) -> Format {
        self.config.format.unwrap_or_default()
    }

    fn count_options(&self) -> CountOptions {
        let mode = match self.config.mode.unwrap_or_default() {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Prefilter => Mode::Prefilter,
        };
        CountOptions {
            mode,
            slack: self.config.slack.unwrap_or(CountOptions::default().slack),
            threads: self.config.threads,
        }
    }

    /// The single input instance, from a generator spec or a file.
    fn instance(&self) -> CliResult<Instance> {
        match (&self.config.generate, &self.config.input) {
            (Some(_), Some(_)) => usage("give exactly one input source: a generate spec or --input"),
            (None, None) => usage("no input: pass --input, --family with --m/--n, or a config with a generate section"),
            (Some(spec), None) => Ok(gen(spec)?.instance),
            (None, Some(path)) => load_instance(path),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Accepts both the `generate` output and a bare instance document.
/// Parse errors carry line and column.
pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read(path)?;
    let err = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(err)?;
    if value.get("instance").is_some() {
        Ok(serde_json::from_str::<Generated>(&text).map_err(err)?.instance)
    } else {
        serde_json::from_str::<Instance>(&text).map_err(err)
    }
}

/// Output of a command: a JSON value or a CSV table.
enum Output {
    Json(Value),
    Csv(Vec<String>, Vec<Vec<String>>),
}

impl Output {
    fn render(&self) -> CliResult<Vec<u8>> {
        match self {
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("value serializes");
                s.push('\n');
                Ok(s.into_bytes())
            }
            Output::Csv(header, rows) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(header).and_then(|_| rows.iter().try_for_each(|r| w.write_record(r))).map_err(|e| CliError::Usage(e.to_string()))?;
                w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

fn strings<const N: usize>(h: [&str; N]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

/// Leaf values of a record in document order, space separated.
fn flatten(v: &Value) -> String {
    fn walk(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::String(s) => out.push(s.clone()),
            Value::Number(n) => out.push(n.to_string()),
            Value::Bool(b) => out.push(b.to_string()),
            Value::Array(a) => a.iter().for_each(|x| walk(x, out)),
            Value::Object(o) => o.values().for_each(|x| walk(x, out)),
            Value::Null => {}
        }
    }
    let mut out = Vec::new();
    walk(v, &mut out);
    out.join(" ")
}

/// `role,index,kind,values` rows for the items of a tagged set.
fn item_rows(role: &str, set: &Value, rows: &mut Vec<Vec<String>>) {
    let kind = set.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
    if let Some(items) = set.get("items").and_then(Value::as_array) {
        for (i, it) in items.iter().enumerate() {
            rows.push(vec![role.to_string(), i.to_string(), kind.clone(), flatten(it)]);
        }
    }
}

fn instance_csv(inst: &Instance) -> Output {
    let mut rows = Vec::new();
    item_rows("point", &serde_json::to_value(&inst.points).expect("serializes"), &mut rows);
    item_rows("curve", &serde_json::to_value(&inst.curves).expect("serializes"), &mut rows);
    Output::Csv(strings(["role", "index", "kind", "values"]), rows)
}

fn cmd_generate(s: &Settings) -> CliResult<Output> {
    if s.config.input.is_some() {
        return usage("generate takes a generate spec, not --input");
    }
    let Some(spec) = &s.config.generate else {
        return usage("generate needs --family with --m/--n, or a config with a generate section");
    };
    let g = gen(spec)?;
    Ok(match s.format() {
        Format::Json => Output::Json(serde_json::to_value(&g).expect("serializes")),
        Format::Csv => instance_csv(&g.instance),
    })
}

fn report_output(rep: &IncidenceReport, format: Format) -> Output {
    match format {
        Format::Json => Output::Json(rep.to_json(true)),
        Format::Csv => Output::Csv(strings(IncidenceReport::CSV_HEADER), vec![rep.csv_record().to_vec()]),
    }
}

fn cmd_count(s: &Settings) -> CliResult<Output> {
    let inst = s.instance()?;
    let rep = count(&inst, &s.count_options())?;
    Ok(report_output(&rep, s.format()))
}

fn cmd_rich(s: &Settings) -> CliResult<Output> {
    let inst = s.instance()?;
    match (s.config.t, s.config.q) {
        (Some(_), Some(_)) | (None, None) => usage("rich needs exactly one of --t or --q"),
        (Some(t), None) => {
            let opts = s.count_options();
            let rep = count(&inst, &opts)?;
            let rich = t_rich_points(&inst, t, &opts)?;
            let rows: Vec<(usize, u32)> = rich.iter().map(|&i| (i, rep.per_point[i])).collect();
            Ok(match s.format() {
                Format::Json => Output::Json(json!({
                    "t": t,
                    "count": rows.len(),
                    "points": rows.iter().map(|(i, c)| json!({"index": i, "incidences": c})).collect::<Vec<_>>(),
                })),
                Format::Csv => Output::Csv(
                    strings(["point", "incidences"]),
                    rows.iter().map(|(i, c)| vec![i.to_string(), c.to_string()]).collect(),
                ),
            })
        }
        (None, Some(q)) => {
            let PointSet::Directed(pts) = &inst.points else {
                return usage("--q needs an instance of directed points");
            };
            let planes = incidence_core::engine::with_threads(s.config.threads, || rich_planes(pts, q))?;
            Ok(match s.format() {
                Format::Json => Output::Json(json!({ "q": q, "count": planes.len(), "planes": planes })),
                Format::Csv => Output::Csv(
                    strings(["plane", "count", "members"]),
                    planes
                        .iter()
                        .map(|p| {
                            let members: Vec<String> = p.members.iter().map(usize::to_string).collect();
                            vec![
                                flatten(&serde_json::to_value(&p.plane).expect("serializes")),
                                p.count().to_string(),
                                members.join(" "),
                            ]
                        })
                        .collect(),
                ),
            })
        }
    }
}

fn space_points(points: &PointSet) -> Vec<Vec3> {
    match points {
        PointSet::Space(p) => p.clone(),
        PointSet::Directed(p) => p.iter().map(DirectedPoint::as_space_point).collect(),
        PointSet::Dual(p) => p.iter().map(|x| x.to_vec()).collect(),
    }
}

fn cmd_partition(s: &Settings) -> CliResult<Output> {
    let inst = s.instance()?;
    let pts = space_points(&inst.points);
    let levels = s.config.levels.unwrap_or(4);
    let mut opts = PartitionOptions::new(levels, s.config.epsilon.unwrap_or(0.1), s.config.seed.unwrap_or(0));
    opts.threads = s.config.threads;
    let pp = build_partition(&pts, &opts)?;
    let cells = classify(&pts, &pp);
    Ok(match s.format() {
        Format::Json => Output::Json(json!({
            "points": pts.len(),
            "levels": levels,
            "partition": pp,
            "max_population": cells.max_population(),
            "zero_set": cells.zero_set,
            "populations": cells.populations,
        })),
        Format::Csv => Output::Csv(
            strings(["point", "cell", "zero_set"]),
            cells.csv_rows().into_iter().map(|r| r.to_vec()).collect(),
        ),
    })
}

fn cmd_dual(s: &Settings) -> CliResult<Output> {
    let inst = s.instance()?;
    let (PointSet::Directed(pts), CurveSet::Circles(circles)) = (&inst.points, &inst.curves) else {
        return usage("dual needs an instance of directed points and circles");
    };
    let dual = Instance {
        points: PointSet::Dual(circles.iter().map(circle_dual).collect()),
        curves: CurveSet::DualLines(pts.iter().map(dp_dual_line).collect()),
    };
    Ok(match s.format() {
        Format::Json => Output::Json(serde_json::to_value(&dual).expect("serializes")),
        Format::Csv => instance_csv(&dual),
    })
}

fn cmd_scan(s: &Settings) -> CliResult<Output> {
    let Some(spec) = &s.config.scan else {
        return usage("scan needs --family or a config with a scan section");
    };
    let res = scan(spec, &s.count_options())?;
    Ok(match s.format() {
        Format::Json => Output::Json(serde_json::to_value(&res).expect("serializes")),
        Format::Csv => Output::Csv(strings(SCAN_HEADER), res.csv_rows().into_iter().map(|r| r.to_vec()).collect()),
    })
}

fn cmd_verify(s: &Settings, log: &mut dyn Write) -> CliResult<(Output, bool)> {
    let cfg = VerifyConfig {
        seed: s.config.seed.unwrap_or(VerifyConfig::default().seed),
        scale: s.config.verify_scale.unwrap_or(1.0),
        threads: s.config.threads,
    };
    if !(cfg.scale > 0.0 && cfg.scale.is_finite()) {
        return usage(format!("--scale must be positive, got {}", cfg.scale));
    }
    let ids: Vec<String> = match &s.config.checks {
        Some(ids) if !ids.is_empty() => ids.clone(),
        _ => MANIFEST.iter().map(|(_, id, _)| id.to_string()).collect(),
    };
    if let Some(bad) = ids.iter().find(|id| !MANIFEST.iter().any(|(_, i, _)| i == id)) {
        let known: Vec<&str> = MANIFEST.iter().map(|(_, i, _)| *i).collect();
        return usage(format!("unknown check {bad:?}; known: {}", known.join(", ")));
    }
    let mut report = VerifyReport { checks: Vec::new() };
    for id in &ids {
        let c = run_check(id, &cfg).expect("id is in the manifest");
        let tag = match (c.passed(), c.soft) {
            (true, false) => "PASS",
            (true, true) => "SOFT",
            (false, _) => "FAIL",
        };
        let _ = writeln!(log, "{tag} {}/{} ({} trials, {} failures, {:.2}s) {}", c.module, c.id, c.trials, c.failures, c.seconds, c.detail);
        report.checks.push(c);
    }
    let ok = report.passed();
    let out = match s.format() {
        Format::Json => Output::Json(json!({ "passed": ok, "checks": report.checks })),
        Format::Csv => Output::Csv(
            strings(["module", "id", "trials", "failures", "soft", "passed", "seconds", "detail"]),
            report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.module.clone(),
                        c.id.clone(),
                        c.trials.to_string(),
                        c.failures.to_string(),
                        c.soft.to_string(),
                        c.passed().to_string(),
                        format!("{:.6}", c.seconds),
                        c.detail.clone(),
                    ]
                })
                .collect(),
        ),
    };
    Ok((out, ok))
}

/// Runs one invocation, writing results to `--out` or `stdout` and
/// diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    let result = Settings::load(cli).and_then(|s| {
        let (out, ok) = match s.command {
            Command::Generate => (cmd_generate(&s)?, true),
            Command::Count => (cmd_count(&s)?, true),
            Command::Rich => (cmd_rich(&s)?, true),
            Command::Partition => (cmd_partition(&s)?, true),
            Command::Dual => (cmd_dual(&s)?, true),
            Command::Scan => (cmd_scan(&s)?, true),
            Command::Verify => cmd_verify(&s, stderr)?,
        };
        let bytes = out.render()?;
        match &s.config.out {
            Some(path) => fs::write(path, bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
            None => stdout.write_all(&bytes).map_err(|e| CliError::Usage(e.to_string()))?,
        }
        Ok(ok)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Infeasible(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INFEASIBLE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(args: &[&str]) -> CliResult<Settings> {
        let mut full = vec!["inclab"];
        full.extend(args);
        Settings::load(Cli::try_parse_from(full).expect("parses"))
    }

    #[test]
    fn flatten_walks_leaves_in_order() {
        let v = json!({"p": ["1/2", "3"], "u": "0"});
        assert_eq!(flatten(&v), "1/2 3 0");
    }

    #[test]
    fn family_names_parse() {
        for k in GenKind::ALL {
            assert_eq!(parse_kind(k.name()), Ok(k));
        }
        assert!(parse_kind("grid").is_err());
    }

    #[test]
    fn scan_defaults_and_overrides() {
        let s = settings(&["scan", "--family", "pencil", "--doublings", "3", "--seed", "7"]).unwrap();
        let spec = s.config.scan.unwrap();
        assert_eq!((spec.n0, spec.doublings, spec.seed), (512, 3, 7));
        assert!(settings(&["scan", "--family", "pencil", "--m", "3"]).is_err());
    }

    #[test]
    fn generate_flags_build_a_spec() {
        let s = settings(&["generate", "--family", "anchored-planted", "--m", "5", "--n", "2"]).unwrap();
        let g = s.config.generate.unwrap();
        assert_eq!((g.m, g.n, g.density), (5, 2, 0.05));
        assert!(settings(&["generate", "--m", "5"]).is_err());
    }

    #[test]
    fn core_errors_map_to_exit_classes() {
        assert!(matches!(CliError::from(CoreError::InfeasibleSpec("x".into())), CliError::Infeasible(_)));
        assert!(matches!(CliError::from(CoreError::BadEpsilon(2.0)), CliError::Usage(_)));
    }
}
