//! `perfiso`: runs the verification targets and writes JSON-lines reports.
//!
//! Every verdict is one line; a summary object closes the report. The exit
//! status is 0 exactly when every verdict passes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use perfiso::chartab::GroupSpec;
use perfiso::cyclotomic::num_primes_above_two;
use perfiso::search::{EnumerationResult, Strategy};
use perfiso::verify::{self, Options, TargetRun, Verdict};

#[derive(Parser)]
#[command(
    name = "perfiso",
    version,
    about = "Exact verification of perfect isometries between 2-blocks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Search strategy, overriding each target's default.
    #[arg(long, global = true)]
    strategy: Option<Strategy>,
    /// Prime above 2 to work at: an index, or `all` to rerun under every choice.
    #[arg(long, global = true)]
    prime_factor: Option<PrimeChoice>,
    /// Abort a search after this many nodes; the verdict is marked as timed out.
    #[arg(long, global = true)]
    node_limit: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random signed bijections per block pair for the checker comparison.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Record wall-clock times (reports are then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a character table after checking orthogonality.
    Tables {
        /// `a4`, `a5`, `cyclic 8`, `product cyclic:4 a4`, `c2xa5`, ...
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
    /// Run one verification target.
    Verify { target: Target, n: Option<u32> },
    /// Run every target up to `--n`.
    VerifyAll {
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Prop24,
    Prop26,
    Thm27,
    LemmaRoots,
    Blocks,
    CrossA4a5,
    Descent,
    Centres,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Prop24 => "prop24",
            Target::Prop26 => "prop26",
            Target::Thm27 => "thm27",
            Target::LemmaRoots => "lemma-roots",
            Target::Blocks => "blocks",
            Target::CrossA4a5 => "cross-a4a5",
            Target::Descent => "descent",
            Target::Centres => "centres",
        }
    }

    fn takes_n(self) -> bool {
        matches!(
            self,
            Target::Prop26 | Target::Thm27 | Target::LemmaRoots | Target::Descent
        )
    }

    /// Targets working at a conductor with two primes above 2.
    fn has_prime_choice(self) -> bool {
        matches!(
            self,
            Target::Blocks | Target::CrossA4a5 | Target::Descent | Target::Centres
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PrimeChoice {
    Index(usize),
    All,
}

impl FromStr for PrimeChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(PrimeChoice::All);
        }
        s.parse()
            .map(PrimeChoice::Index)
            .map_err(|_| format!("expected an index or `all`, got `{s}`"))
    }
}

impl fmt::Display for PrimeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeChoice::Index(i) => write!(f, "{i}"),
            PrimeChoice::All => f.write_str("all"),
        }
    }
}

/// One target at one parameter.
#[derive(Clone, Copy, Debug)]
struct Unit {
    target: Target,
    n: Option<u32>,
}

impl Unit {
    fn label(&self) -> String {
        match self.n {
            Some(n) => format!("{} {n}", self.target.name()),
            None => self.target.name().to_string(),
        }
    }

    fn run(&self, opts: &Options) -> TargetRun {
        let n = self.n.unwrap_or(0);
        match self.target {
            Target::Prop24 => verify::prop24(opts),
            Target::Prop26 => verify::prop26(n, opts),
            Target::Thm27 => verify::thm27(n, opts),
            Target::LemmaRoots => verify::lemma_roots(n, opts),
            Target::Blocks => verify::blocks(opts),
            Target::CrossA4a5 => verify::cross_a4a5(opts),
            Target::Descent => verify::descent(n, opts),
            Target::Centres => verify::centres(opts),
        }
    }
}

#[derive(Serialize)]
struct SweepEntry {
    unit: String,
    prime_factor: usize,
    pass: bool,
    verdicts: Vec<Verdict>,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    parameters: BTreeMap<String, Value>,
    verdicts: Vec<Verdict>,
    artifact_version: &'static str,
    prime_choice_sweep: Vec<SweepEntry>,
    overall_pass: bool,
}

/// Result of a unit, possibly rerun under every prime choice.
struct UnitOutcome {
    verdicts: Vec<Verdict>,
    sweep: Vec<SweepEntry>,
    enumerations: Vec<(String, EnumerationResult)>,
}

fn strip_timings(vs: &[Verdict]) -> Vec<Verdict> {
    vs.iter()
        .map(|v| Verdict {
            elapsed_ms: None,
            ..v.clone()
        })
        .collect()
}

fn run_unit(unit: Unit, opts: &Options, choice: PrimeChoice) -> UnitOutcome {
    let single = |factor: usize| {
        unit.run(&Options {
            prime_factor: factor,
            ..opts.clone()
        })
    };
    match choice {
        PrimeChoice::Index(i) => {
            let r = single(i);
            UnitOutcome {
                verdicts: r.verdicts,
                sweep: Vec::new(),
                enumerations: r.enumerations,
            }
        }
        PrimeChoice::All if !unit.target.has_prime_choice() => {
            let r = single(0);
            UnitOutcome {
                verdicts: r.verdicts,
                sweep: Vec::new(),
                enumerations: r.enumerations,
            }
        }
        PrimeChoice::All => {
            // the conductors concerned are 15 · 2^n, all with the same number of primes above 2
            let g = num_primes_above_two(15);
            let runs: Vec<TargetRun> = (0..g).map(single).collect();
            let reference = strip_timings(&runs[0].verdicts);
            let identical = runs.iter().all(|r| strip_timings(&r.verdicts) == reference);
            let sweep = runs
                .iter()
                .enumerate()
                .map(|(f, r)| SweepEntry {
                    unit: unit.label(),
                    prime_factor: f,
                    pass: r.pass(),
                    verdicts: r.verdicts.clone(),
                })
                .collect();
            let mut first = runs.into_iter().next().expect("at least one prime");
            let name = format!("{}.prime_choice_identical", unit.target.name().replace('-', "_"));
            first
                .verdicts
                .push(Verdict::new(name, identical).count("prime_choices", g as u64));
            UnitOutcome {
                verdicts: first.verdicts,
                sweep,
                enumerations: first.enumerations,
            }
        }
    }
}

fn options(c: &Common) -> Options {
    Options {
        prime_factor: 0,
        strategy: c.strategy,
        node_limit: c.node_limit,
        jobs: c.jobs.max(1),
        random_samples: c.samples,
        seed: c.seed,
        timings: c.timings,
    }
}

fn parameters(c: &Common, choice: PrimeChoice, extra: &[(&str, Value)]) -> BTreeMap<String, Value> {
    let mut p = BTreeMap::new();
    p.insert("strategy".into(), json!(c.strategy.map(|s| s.to_string())));
    p.insert("prime_factor".into(), json!(choice.to_string()));
    p.insert("node_limit".into(), json!(c.node_limit));
    p.insert("jobs".into(), json!(c.jobs));
    p.insert("samples".into(), json!(c.samples));
    p.insert("seed".into(), json!(c.seed));
    for (k, v) in extra {
        p.insert((*k).into(), v.clone());
    }
    p
}

fn report(
    command: String,
    parameters: BTreeMap<String, Value>,
    verdicts: Vec<Verdict>,
    sweep: Vec<SweepEntry>,
) -> RunReport {
    let overall_pass = !verdicts.is_empty() && verdicts.iter().all(|v| v.pass);
    RunReport {
        command,
        parameters,
        verdicts,
        artifact_version: env!("CARGO_PKG_VERSION"),
        prime_choice_sweep: sweep,
        overall_pass,
    }
}

fn cmd_tables(spec: &[String], c: &Common) -> Result<(Vec<String>, RunReport)> {
    let group = GroupSpec::from_tokens(spec)?;
    let table = group.table();
    let orth = table.check_orthogonality();
    let verdict = Verdict::new("tables.orthogonality", orth.is_ok())
        .count("characters", table.num_chars() as u64)
        .count("classes", table.classes().len() as u64)
        .count("conductor", table.conductor());
    let verdict = match orth {
        Ok(()) => verdict,
        Err(e) => verdict.detail(e.to_string()),
    };
    let dump = serde_json::to_string(&json!({ "table": table }))?;
    let params = parameters(c, PrimeChoice::Index(0), &[("spec", json!(spec.join(" ")))]);
    Ok((
        vec![dump],
        report(format!("tables {}", spec.join(" ")), params, vec![verdict], Vec::new()),
    ))
}

fn cmd_verify(target: Target, n: Option<u32>, c: &Common) -> Result<RunReport> {
    if target.takes_n() && n.is_none() {
        bail!("target {} needs a parameter n", target.name());
    }
    if !target.takes_n() && n.is_some() {
        bail!("target {} takes no parameter", target.name());
    }
    let choice = c.prime_factor.unwrap_or(PrimeChoice::Index(0));
    let unit = Unit { target, n };
    let out = run_unit(unit, &options(c), choice);
    let params = parameters(c, choice, &[("target", json!(target.name())), ("n", json!(n))]);
    Ok(report(
        format!("verify {}", unit.label()),
        params,
        out.verdicts,
        out.sweep,
    ))
}

fn all_units(nmax: u32) -> Vec<Unit> {
    let unit = |target, n| Unit { target, n };
    let mut units = vec![unit(Target::Prop24, None)];
    units.extend((1..=nmax.min(4)).map(|n| unit(Target::Prop26, Some(n))));
    units.extend((1..=nmax.min(3)).map(|n| unit(Target::Thm27, Some(n))));
    units.push(unit(Target::LemmaRoots, Some(nmax.clamp(1, 4))));
    units.push(unit(Target::Blocks, None));
    if nmax >= 1 {
        units.push(unit(Target::CrossA4a5, None));
    }
    units.extend((1..=nmax.min(3)).map(|n| unit(Target::Descent, Some(n))));
    units
}

fn cmd_verify_all(nmax: u32, c: &Common) -> Result<RunReport> {
    let choice = c.prime_factor.unwrap_or(PrimeChoice::All);
    let units = all_units(nmax);
    // units run side by side, each single-threaded
    let opts = Options { jobs: 1, ..options(c) };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(c.jobs.max(1)).build()?;
    let outcomes: Vec<UnitOutcome> = pool.install(|| units.par_iter().map(|&u| run_unit(u, &opts, choice)).collect());
    let mut verdicts = Vec::new();
    let mut sweep = Vec::new();
    let mut enumerations = Vec::new();
    for (u, o) in units.iter().zip(outcomes) {
        verdicts.extend(o.verdicts);
        sweep.extend(o.sweep);
        if u.target != Target::Descent {
            enumerations.extend(o.enumerations);
        }
    }
    if nmax >= 1 {
        let centre = match verify::centre_verdict("centres.enumerated", &enumerations, &opts) {
            Ok(v) => v,
            Err(e) => Verdict::new("centres.enumerated", false).detail(e.to_string()),
        };
        verdicts.push(centre);
    }
    let params = parameters(c, choice, &[("n", json!(nmax))]);
    Ok(report(format!("verify-all --n {nmax}"), params, verdicts, sweep))
}

fn emit(lines: &[String], rep: &RunReport, out: Option<&PathBuf>) -> Result<()> {
    let mut text = String::new();
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    for v in &rep.verdicts {
        text.push_str(&serde_json::to_string(v)?);
        text.push('\n');
    }
    text.push_str(&serde_json::to_string(rep)?);
    text.push('\n');
    std::io::stdout().lock().write_all(text.as_bytes())?;
    if let Some(path) = out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let (lines, rep) = match &cli.command {
        Command::Tables { spec } => cmd_tables(spec, &cli.common)?,
        Command::Verify { target, n } => (Vec::new(), cmd_verify(*target, *n, &cli.common)?),
        Command::VerifyAll { n } => (Vec::new(), cmd_verify_all(*n, &cli.common)?),
    };
    emit(&lines, &rep, cli.common.out.as_ref())?;
    Ok(rep.overall_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {}", anyhow!(e));
            ExitCode::FAILURE
        }
    }
}
