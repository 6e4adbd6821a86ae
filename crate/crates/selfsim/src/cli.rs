//! Command line front end. Every command renders its result with the same
//! library calls a program would use, so the printed bytes equal the
//! library output for the same parameters.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::central::{center_check, center_witness, gamma_eval, GammaGroup, GammaWord};
use crate::config::{parse_ints, KvConfig};
use crate::error::{Error, Result};
use crate::finite::{library, FiniteGroup, FiniteGroupSpec};
use crate::marked::{ball, BallOptions, GrowthProfile, MarkedGroup, TreeGroup};
use crate::synthesis::{fixture, schedule, schedule_partial, synthesize, Constants, FTable, LampFamily};
use crate::traverse::{configuration_word, max_a, traverse_field, SweepMode};
use crate::tree::OmegaString;
use crate::verify::{self, Suite, VerifyConfig};
use crate::word::Word;
use crate::wreath::{build_delta_n, kdelta_witness, lamp_product_formula, DeltaSpec, WreathGroup, WreathSummary};

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Exact computation in self-similar groups and their wreath extensions")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write outputs and a manifest into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Growth sequence of a marked group by breadth-first enumeration.
    Ball(BallArgs),
    /// Traverse field of a word, or a sweep of maximal field totals.
    Traverse(TraverseArgs),
    /// Schedule, lamp plan and manifest for a prescribed growth function.
    Synth(SynthArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Evaluate words in a lamp factor.
    Delta(DeltaArgs),
    /// Evaluate words in the central extension.
    Gamma(GammaArgs),
    /// Approximation schedule of a growth function.
    Schedule(ScheduleArgs),
}

#[derive(Args, Debug)]
pub struct BallArgs {
    /// grig, lamp, delta or gamma.
    #[arg(long)]
    pub group: Option<String>,
    /// Key-value file describing the group (keys: group, level, depth, omega and lamp keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub radius: i64,
    /// Depth of the tree quotient for `grig`.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Level of a `delta` or `gamma` factor.
    #[arg(long)]
    pub level: Option<usize>,
    /// Library name of the lamp group.
    #[arg(long)]
    pub lamp: Option<String>,
    /// Defining string of the tree group, e.g. `012`.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long, default_value_t = BallOptions::default().max_elements)]
    pub max_elements: usize,
}

#[derive(Args, Debug)]
pub struct TraverseArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub word: Option<String>,
    #[arg(long)]
    pub level: usize,
    /// Maximal field totals over all words up to `--maxlen`.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub maxlen: Option<usize>,
    /// Sample this many words per length instead of an exhaustive sweep.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FunctionArgs {
    /// CSV table with columns x,f.
    #[arg(long, conflicts_with = "fixture")]
    pub table: Option<PathBuf>,
    /// Built-in test function: power, x_over_log, x_over_log2, oscillating, single_bump.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Scale factor; defaults to 2/eta.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of schedule terms.
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Lamps are planned for levels up to this one.
    #[arg(long, default_value_t = 5)]
    pub max_level: usize,
    /// Use only library lamps of at most this order.
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Sample points for the sandwich check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Return the terms that fit on the table instead of failing.
    #[arg(long)]
    pub partial: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Smaller samples and radii.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub lamp: Option<String>,
    /// Key-value file with `level` and lamp keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Word over a, b, c, d, u1, v1, v2.
    #[arg(long, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// The commutator word supported on the lamp at 1…1.
    #[arg(long)]
    pub witness: bool,
    /// Lamp values by point, space separated; builds a word realizing them.
    #[arg(long)]
    pub targets: Option<String>,
    /// Number of rounds for `--targets`.
    #[arg(long)]
    pub ell: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[arg(long)]
    pub level: usize,
    /// Word over a, b, c, d, t, T (T is the inverse of t).
    #[arg(long, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// The central element built from the level's conjugator.
    #[arg(long)]
    pub witness: bool,
    /// Test centrality against the ball of this radius.
    #[arg(long)]
    pub center_radius: Option<usize>,
}

/// A rendered output file.
pub struct Output {
    pub name: String,
    pub content: String,
}

impl Output {
    fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        Output { name: name.into(), content: content.into() }
    }
}

/// Outputs of a command and whether its checks passed.
pub struct Outcome {
    pub outputs: Vec<Output>,
    pub passed: bool,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    args: Vec<String>,
    seed: u64,
    files: Vec<(String, String)>,
}

/// Parses `args` (program name first), runs the command and writes to the
/// given streams. Returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run_cli(&cli, &args) {
        Ok(outcome) => {
            if cli.run.out.is_none() {
                for o in &outcome.outputs {
                    let _ = stdout.write_all(o.content.as_bytes());
                }
            }
            if outcome.passed {
                0
            } else {
                let _ = writeln!(stderr, "invariant violated: see the report");
                70
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli, argv: &[OsString]) -> Result<Outcome> {
    let outcome = run_command(&cli.command, &cli.run)?;
    if let Some(dir) = &cli.run.out {
        write_outputs(dir, command_name(&cli.command), argv, cli.run.seed, &outcome.outputs)?;
    }
    Ok(outcome)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ball(_) => "ball",
        Command::Traverse(_) => "traverse",
        Command::Synth(_) => "synth",
        Command::Verify(_) => "verify",
        Command::Delta(_) => "delta",
        Command::Gamma(_) => "gamma",
        Command::Schedule(_) => "schedule",
    }
}

fn write_outputs(dir: &Path, command: &str, argv: &[OsString], seed: u64, outputs: &[Output]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for o in outputs {
        std::fs::write(dir.join(&o.name), &o.content)?;
        files.push((o.name.clone(), hex::encode(Sha256::digest(o.content.as_bytes()))));
    }
    // the worker count does not change any output, so it is left out
    let mut args = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()) {
        if std::mem::take(&mut skip) {
            continue;
        }
        if a == "--workers" {
            skip = true;
        } else if !a.starts_with("--workers=") {
            args.push(a);
        }
    }
    let manifest = RunManifest { command, args, seed, files };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(dir.join("run_manifest.json"), text)?;
    Ok(())
}

/// Runs a parsed command with the given shared options.
pub fn run_command(command: &Command, run: &RunConfig) -> Result<Outcome> {
    let opts = BallOptions { workers: run.workers, ..BallOptions::default() };
    let in_pool = |f: &(dyn Fn() -> Result<Outcome> + Sync)| -> Result<Outcome> {
        match run.workers {
            None => f(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("worker pool: {e}")))?
                .install(f),
        }
    };
    match command {
        Command::Ball(a) => cmd_ball(a, run.format.unwrap_or(Format::Csv), opts),
        Command::Traverse(a) => in_pool(&|| cmd_traverse(a, run)),
        Command::Synth(a) => in_pool(&|| cmd_synth(a)),
        Command::Verify(a) => cmd_verify(a, run),
        Command::Delta(a) => cmd_delta(a),
        Command::Gamma(a) => cmd_gamma(a, opts),
        Command::Schedule(a) => cmd_schedule(a, run.format.unwrap_or(Format::Csv)),
    }
}

fn ok(outputs: Vec<Output>) -> Result<Outcome> {
    Ok(Outcome { outputs, passed: true })
}

fn json_line<T: Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(x)? + "\n")
}

/// A group that can be enumerated by `ball`.
pub enum GroupChoice {
    Tree(TreeGroup),
    Lamp(FiniteGroup),
    Delta(WreathGroup),
    Gamma(GammaGroup),
}

impl GroupChoice {
    /// Reads `group`, `level`, `depth`, `omega` and the lamp keys.
    pub fn from_config(c: &KvConfig) -> Result<Self> {
        let omega: OmegaString = match c.get("omega") {
            Some(s) => s.parse()?,
            None => OmegaString::first(),
        };
        let lamp = || -> Result<FiniteGroupSpec> {
            if c.get("lamp").is_some() || c.get("kind").is_some() {
                FiniteGroupSpec::from_config(c)
            } else {
                Err(Error::invalid("missing lamp"))
            }
        };
        let level = || -> Result<usize> {
            c.parse_value("level")?.ok_or_else(|| Error::invalid("missing level"))
        };
        match c.require("group")? {
            "grig" => {
                let depth = c.parse_value("depth")?.ok_or_else(|| Error::invalid("missing depth"))?;
                Ok(GroupChoice::Tree(TreeGroup::new(&omega, depth)?))
            }
            "lamp" => Ok(GroupChoice::Lamp(FiniteGroup::new(lamp()?)?)),
            "delta" => {
                let spec = DeltaSpec {
                    n: level()?,
                    lamp: Arc::new(FiniteGroup::new(lamp()?)?),
                    omega,
                    base_depth: c.parse_value("depth")?,
                };
                Ok(GroupChoice::Delta(build_delta_n(&spec)?))
            }
            "gamma" => Ok(GroupChoice::Gamma(GammaGroup::new(level()?)?)),
            other => Err(Error::invalid(format!("unknown group {other}"))),
        }
    }

    pub fn ball(&self, radius: usize, opts: BallOptions) -> Result<GrowthProfile> {
        match self {
            GroupChoice::Tree(g) => ball(g, radius, opts),
            GroupChoice::Lamp(g) => ball(g, radius, opts),
            GroupChoice::Delta(g) => ball(g, radius, opts),
            GroupChoice::Gamma(g) => ball(g, radius, opts),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            GroupChoice::Tree(g) => g.labels(),
            GroupChoice::Lamp(g) => g.labels(),
            GroupChoice::Delta(g) => g.labels(),
            GroupChoice::Gamma(g) => g.labels(),
        }
    }
}

fn cmd_ball(a: &BallArgs, format: Format, opts: BallOptions) -> Result<Outcome> {
    if a.radius < 0 {
        return Err(Error::Usage("radius must be nonnegative".into()));
    }
    let mut c = match &a.config {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    let flags = [
        ("group", a.group.clone()),
        ("depth", a.depth.map(|d| d.to_string())),
        ("level", a.level.map(|d| d.to_string())),
        ("lamp", a.lamp.clone()),
        ("omega", a.omega.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            c.set(k, &v);
        }
    }
    if c.get("group").is_none() {
        return Err(Error::Usage("ball needs --group or --config".into()));
    }
    let group = GroupChoice::from_config(&c)?;
    let opts = BallOptions { max_elements: a.max_elements, ..opts };
    let profile = group.ball(a.radius as usize, opts)?;
    match format {
        Format::Json => ok(vec![Output::new("ball.json", profile.to_json() + "\n")]),
        _ => ok(vec![Output::new("ball.csv", profile.to_csv())]),
    }
}

fn cmd_traverse(a: &TraverseArgs, run: &RunConfig) -> Result<Outcome> {
    if a.sweep {
        let r = a.maxlen.ok_or_else(|| Error::Usage("--sweep needs --maxlen".into()))?;
        let mode = match a.samples {
            Some(samples) => SweepMode::Sampled { samples, seed: run.seed },
            None => SweepMode::Exhaustive,
        };
        let rep = max_a(a.level, r, mode)?;
        return match run.format.unwrap_or(Format::Csv) {
            Format::Json => ok(vec![Output::new("sweep.json", json_line(&rep)?)]),
            _ => ok(vec![Output::new("sweep.csv", rep.to_csv())]),
        };
    }
    let word: Word = a.word.as_deref().ok_or_else(|| Error::Usage("traverse needs --word or --sweep".into()))?.parse()?;
    let field = traverse_field(&word, a.level)?;
    ok(vec![Output::new("traverse.json", field.to_json()? + "\n")])
}

fn load_function(f: &FunctionArgs) -> Result<(FTable, f64)> {
    let table = match (&f.table, &f.fixture) {
        (Some(p), None) => FTable::parse_csv(&std::fs::read_to_string(p)?)?,
        (None, Some(name)) => fixture(name)?,
        _ => return Err(Error::Usage("give exactly one of --table and --fixture".into())),
    };
    Ok((table, f.lambda.unwrap_or(Constants::default().lambda0)))
}

fn cmd_synth(a: &SynthArgs) -> Result<Outcome> {
    let (table, lambda) = load_function(&a.function)?;
    let mut family = LampFamily::standard()?;
    if let Some(m) = a.max_order {
        family = family.restricted(m);
    }
    let (manifest, sandwich) = synthesize(&table, lambda, a.function.terms, &family, a.max_level, a.samples)?;
    Ok(Outcome {
        passed: sandwich.passed(),
        outputs: vec![
            Output::new("schedule.json", manifest.schedule.to_json() + "\n"),
            Output::new("plan.json", manifest.plan.to_json() + "\n"),
            Output::new("sandwich.json", json_line(&sandwich)?),
            Output::new("manifest.json", manifest.to_json() + "\n"),
        ],
    })
}

fn cmd_schedule(a: &ScheduleArgs, format: Format) -> Result<Outcome> {
    let (table, lambda) = load_function(&a.function)?;
    let s = if a.partial {
        schedule_partial(&table, lambda, a.function.terms)?
    } else {
        schedule(&table, lambda, a.function.terms)?
    };
    let failures = s.invariant_failures();
    let out = match format {
        Format::Json => Output::new("schedule.json", s.to_json() + "\n"),
        _ => Output::new("schedule.csv", s.to_csv()),
    };
    Ok(Outcome { outputs: vec![out], passed: failures.is_empty() })
}

fn cmd_verify(a: &VerifyArgs, run: &RunConfig) -> Result<Outcome> {
    let cfg = VerifyConfig { seed: run.seed, workers: run.workers, quick: a.quick };
    let reports = verify::run(a.suite, &cfg)?;
    let passed = reports.iter().all(|r| r.passed());
    let out = match run.format.unwrap_or(Format::Text) {
        Format::Json => Output::new("verify.json", json_line(&reports)?),
        _ => Output::new("verify.txt", reports.iter().map(|r| r.to_text()).collect::<String>()),
    };
    Ok(Outcome { outputs: vec![out], passed })
}

#[derive(Serialize)]
struct DeltaReport {
    level: usize,
    lamp: String,
    word: String,
    element: WreathSummary,
    formula_agrees: bool,
}

fn cmd_delta(a: &DeltaArgs) -> Result<Outcome> {
    let mut c = match &a.config {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    if let Some(l) = a.level {
        c.set("level", &l.to_string());
    }
    if let Some(l) = &a.lamp {
        c.set("lamp", l);
    }
    let level: usize = c.parse_value("level")?.ok_or_else(|| Error::Usage("delta needs --level".into()))?;
    let spec = if c.get("lamp").is_some() || c.get("kind").is_some() {
        FiniteGroupSpec::from_config(&c)?
    } else {
        library("klein")?
    };
    let lamp = Arc::new(FiniteGroup::new(spec)?);
    let delta = build_delta_n(&DeltaSpec::new(level, lamp.clone()))?;
    let word = match (&a.word, a.witness, &a.targets) {
        (Some(w), false, None) => w.parse()?,
        (None, true, None) => kdelta_witness(level, &OmegaString::first())?,
        (None, false, Some(t)) => configuration_word(&parse_ints::<u32>(t)?, &delta, a.ell)?,
        _ => return Err(Error::Usage("give exactly one of --word, --witness and --targets".into())),
    };
    let x = delta.eval(&word)?;
    let formula_agrees = lamp_product_formula(&word, &delta)? == x;
    let report = DeltaReport {
        level,
        lamp: lamp.spec.name.clone(),
        word: word.to_string(),
        element: delta.summary(&x),
        formula_agrees,
    };
    Ok(Outcome { outputs: vec![Output::new("delta.json", json_line(&report)?)], passed: formula_agrees })
}

#[derive(Serialize)]
struct GammaReport {
    level: usize,
    word: String,
    lamp: Vec<(String, i64)>,
    central: i64,
    base: String,
    in_kernel: bool,
}

fn cmd_gamma(a: &GammaArgs, opts: BallOptions) -> Result<Outcome> {
    if let Some(r) = a.center_radius {
        let rep = center_check(a.level, r, opts)?;
        return Ok(Outcome { passed: rep.passed(), outputs: vec![Output::new("center.json", json_line(&rep)?)] });
    }
    if a.witness {
        let rep = center_witness(a.level)?;
        return Ok(Outcome { passed: rep.passed(), outputs: vec![Output::new("witness.json", json_line(&rep)?)] });
    }
    let word: GammaWord = a
        .word
        .as_deref()
        .ok_or_else(|| Error::Usage("gamma needs --word, --witness or --center-radius".into()))?
        .parse()?;
    let g = GammaGroup::new(a.level)?;
    let x = gamma_eval(&word, &g)?;
    let report = GammaReport {
        level: a.level,
        word: word.to_string(),
        lamp: x.lamp.f.iter().map(|&(p, v)| (g.set().describe(p), v)).collect(),
        central: x.lamp.z,
        base: x.base.to_hex(),
        in_kernel: x.in_kernel(),
    };
    ok(vec![Output::new("gamma.json", json_line(&report)?)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(std::iter::once("selfsim").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ball_of_the_tree_quotient() {
        let (code, out, _) = run(&["ball", "--group", "grig", "--depth", "3", "--radius", "6"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "radius,count");
        assert_eq!(lines[2], "1,5");
        assert_eq!(lines.len(), 8);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["ball", "--group", "grig", "--depth", "3", "--radius", "-1"]).0, 64);
        assert_eq!(run(&["nonsense"]).0, 64);
        assert_eq!(run(&["ball", "--radius", "2"]).0, 64);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn budget_and_invalid_input() {
        let (code, _, err) = run(&["ball", "--group", "grig", "--depth", "6", "--radius", "20", "--max-elements", "50"]);
        assert_eq!(code, 2, "{err}");
        assert_eq!(run(&["traverse", "--word", "abxa", "--level", "2"]).0, 65);
    }

    #[test]
    fn traverse_worked_example() {
        let (code, out, _) = run(&["traverse", "--word", "abaca", "--level", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"01\": \"10\"") || out.contains("\"01\":\"10\""), "{out}");
    }
}
