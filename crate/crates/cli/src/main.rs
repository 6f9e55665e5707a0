//! `cardqe`: decide, eliminate, evaluate and experiment from the shell.
//!
//! Exit codes: 0 success (for `decide`, every sentence True; for `witness`,
//! a witness found; for `axioms`, every instance True), 1 a False verdict,
//! an inconclusive search or a failed axiom, 2 usage, parse or engine error.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use cardqe::ast::Level;
use cardqe::harness::{self, DefcheckReport, EnumerationSpec, SchemaInstanceSpec};
use cardqe::model::{self, Assignment, EpBounds, SampleMode, SearchBounds, Tri, Witness};
use cardqe::qe::{self, Theory};
use cardqe::syntax::{self, print};
use cardqe::{Formula, Var};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "cardqe", version, about = "Decision procedures for atomic Boolean algebras with C[k], Fin and Res")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Theory to read formulas in.
    #[arg(long, global = true, default_value = "T3")]
    theory: Theory,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest threshold of sampled or searched sets.
    #[arg(long, global = true, default_value_t = 8)]
    max_transient: u64,

    /// Largest period of sampled or searched sets.
    #[arg(long, global = true, default_value_t = 6)]
    max_period: u64,

    /// Print the elimination steps.
    #[arg(long, global = true)]
    trace: bool,

    /// Report wall-clock time in `timing_ms` (otherwise 0, so output is
    /// reproducible).
    #[arg(long, global = true)]
    timing: bool,

    /// Progress notes on standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Input {
    /// A formula, written inline.
    formula: Option<String>,

    /// Read `;`-separated formulas from a file instead.
    #[arg(long, conflicts_with = "formula")]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide sentences. Exit 0 if all are True, 1 if one is False.
    Decide(Input),
    /// Eliminate all quantifiers.
    Qe(Input),
    /// Evaluate a formula under eventually periodic assignments.
    Eval {
        #[command(flatten)]
        input: Input,
        /// An assignment, inline (`x = EP{...}`, one binding per line) or a
        /// file path; a file may hold several separated by `---` lines.
        #[arg(long)]
        assign: Vec<String>,
        /// Also evaluate under this many random assignments.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Search for a witness of `E x ψ`. Exit 0 if found, 1 if inconclusive.
    Witness {
        #[command(flatten)]
        input: Input,
        /// Values for the other free variables.
        #[arg(long)]
        assign: Vec<String>,
    },
    /// Generate axiom instances and decide each. Exit 1 on any failure.
    Axioms {
        /// Bound on every schema parameter.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Worker threads.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
    /// Search for a definition of a one-variable target.
    Defcheck {
        /// Formula with one free variable to look for a definition of.
        #[arg(long)]
        target: String,
        /// Candidate language; defaults to the least level covering `--allow`.
        #[arg(long)]
        level: Option<Level>,
        /// Largest candidate size [default: 7, or 6 with residues].
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: Option<u64>,
        /// Extra predicates: `Fin`, `ResN` for the moduli `N`.
        #[arg(long, value_delimiter = ',')]
        allow: Vec<String>,
        /// Count predicates up to `C[N]`.
        #[arg(long, default_value_t = 4)]
        max_count: u32,
        /// Quantifier depth of candidates.
        #[arg(long, default_value_t = 1)]
        quantifiers: usize,
        /// Largest quantified body [default: size - 1, at most 4 with residues].
        #[arg(long)]
        body_size: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    let start = Instant::now();
    let mut out = Vec::new();
    let code = match &cli.command {
        Command::Decide(input) => decide(g, input, &mut out)?,
        Command::Qe(input) => eliminate(g, input, &mut out)?,
        Command::Eval {
            input,
            assign,
            samples,
        } => eval(g, input, assign, *samples, &mut out)?,
        Command::Witness { input, assign } => witness(g, input, assign, &mut out)?,
        Command::Axioms { bound, threads } => axioms(g, *bound, *threads as usize, &mut out)?,
        Command::Defcheck {
            target,
            level,
            size,
            allow,
            max_count,
            quantifiers,
            body_size,
        } => {
            let spec = defcheck_spec(target, *level, *size, allow, *max_count, *quantifiers, *body_size)?;
            defcheck(g, target, &spec, &mut out)?
        }
    };
    let ms = if g.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    for r in out {
        match g.format {
            Format::Text => print!("{}", r.text),
            Format::Json => println!("{}", r.to_json(g.theory, ms)),
        }
    }
    if g.verbose {
        eprintln!("done in {:?}", start.elapsed());
    }
    Ok(code)
}

/// The input formulas with their source text.
fn read_input(input: &Input) -> Result<Vec<(String, Formula)>> {
    match (&input.formula, &input.file) {
        (Some(text), None) => {
            let f = syntax::parse(text).map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(vec![(text.clone(), f)])
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let fs = syntax::parse_file(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            Ok(fs.into_iter().map(|s| (s.text, s.formula)).collect())
        }
        _ => bail!("give a formula or --file"),
    }
}

fn decide(g: &Global, input: &Input, out: &mut Vec<Report>) -> Result<u8> {
    let mut code = 0;
    for (text, f) in read_input(input)? {
        let v = qe::decide_traced(&f, g.theory, g.trace)?;
        if !v.value {
            code = 1;
        }
        let mut r = Report::new("decide", &text, "verdict", json!(v.value));
        r.text = format!("{}\n", if v.value { "True" } else { "False" });
        if g.trace {
            r.text = v.trace.iter().map(|s| format!("  {s}\n")).collect::<String>() + &r.text;
            r.trace = Some(v.trace);
        }
        out.push(r);
    }
    Ok(code)
}

fn eliminate(g: &Global, input: &Input, out: &mut Vec<Report>) -> Result<u8> {
    for (text, f) in read_input(input)? {
        let (qf, trace) = qe::eliminate_all_traced(&f, g.theory, g.trace)?;
        let shown = print(&qf);
        let mut r = Report::new("qe", &text, "result", json!(shown));
        r.text = format!("{shown}\n");
        if g.trace {
            r.text = trace.iter().map(|s| format!("  {s}\n")).collect::<String>() + &r.text;
            r.trace = Some(trace);
        }
        out.push(r);
    }
    Ok(0)
}

/// Parses `--assign` values: inline text, or a file of `---`-separated
/// assignments.
fn read_assignments(values: &[String]) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    for v in values {
        let path = PathBuf::from(v);
        if !v.contains('=') && path.is_file() {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {v}"))?;
            for block in text.split("\n---") {
                if block.lines().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()) {
                    out.push(block.parse().with_context(|| format!("in {v}"))?);
                }
            }
        } else {
            out.push(v.parse()?);
        }
    }
    Ok(out)
}

fn search_bounds(g: &Global) -> SearchBounds {
    SearchBounds::new(g.max_transient, g.max_period)
}

fn eval(g: &Global, input: &Input, assign: &[String], samples: usize, out: &mut Vec<Report>) -> Result<u8> {
    let sigmas = read_assignments(assign)?;
    let inputs = read_input(input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let bounds = EpBounds {
        max_transient: g.max_transient,
        max_period: g.max_period,
    };
    for (text, f) in inputs {
        if !g.theory.admits(&f) {
            bail!("formula uses {} vocabulary, which {} does not have", f.level(), g.theory);
        }
        let vars: Vec<Var> = f.free_vars().into_iter().collect();
        let mut all = sigmas.clone();
        for _ in 0..samples {
            all.push(model::random_assignment(&mut rng, &vars, bounds, SampleMode::All));
        }
        if all.is_empty() && vars.is_empty() {
            all.push(Assignment::new());
        }
        let mut rows = Vec::new();
        let mut text_out = String::new();
        for sigma in &all {
            let value = if f.is_quantifier_free() {
                Tri::from(model::eval_qf(&f, sigma)?)
            } else {
                model::eval_bounded(&f, sigma, &search_bounds(g))?
            };
            let shown = sigma.to_string().replace('\n', ", ");
            text_out += &format!("{value}\t{shown}\n");
            rows.push(json!({"assignment": shown, "value": value.to_string()}));
        }
        let mut r = Report::new("eval", &text, "result", Value::Array(rows));
        r.text = text_out;
        out.push(r);
    }
    Ok(0)
}

fn witness(g: &Global, input: &Input, assign: &[String], out: &mut Vec<Report>) -> Result<u8> {
    let mut sigma = Assignment::new();
    for a in read_assignments(assign)? {
        sigma.extend(a);
    }
    let mut code = 0;
    for (text, f) in read_input(input)? {
        let found = model::witness_search(&f, &sigma, &search_bounds(g))?;
        let shown = match &found {
            Witness::Found(s) => s.to_string(),
            Witness::Inconclusive => {
                code = 1;
                "inconclusive".to_string()
            }
        };
        let mut r = Report::new("witness", &text, "result", json!(shown));
        r.text = format!("{shown}\n");
        out.push(r);
    }
    Ok(code)
}

fn axioms(g: &Global, bound: u32, threads: usize, out: &mut Vec<Report>) -> Result<u8> {
    let spec = SchemaInstanceSpec::new(g.theory, bound);
    let report = harness::check_axioms(&spec, threads);
    let code = if report.all_true() { 0 } else { 1 };
    let mut r = Report::new("axioms", &format!("bound={bound}"), "result", serde_json::to_value(&report)?);
    r.text = if g.verbose {
        report
            .results
            .iter()
            .map(|a| format!("{:?}\t[{}] {}\n", a.value, a.family, a.formula))
            .collect::<String>()
            + &report.to_text()
    } else {
        report.to_text()
    };
    out.push(r);
    Ok(code)
}

fn defcheck_spec(
    target: &str,
    level: Option<Level>,
    size: Option<u64>,
    allow: &[String],
    max_count: u32,
    quantifiers: usize,
    body_size: Option<usize>,
) -> Result<EnumerationSpec> {
    let t = syntax::parse(target).map_err(|e| anyhow::anyhow!("{e}"))?;
    let vars: Vec<Var> = t.free_vars().into_iter().collect();
    if vars.len() != 1 {
        bail!("the target must have exactly one free variable");
    }
    let mut moduli = Vec::new();
    let mut least = Level::L1;
    for a in allow {
        if a == "Fin" {
            least = least.max(Level::L2);
        } else if let Some(n) = a.strip_prefix("Res") {
            let n: u32 = n.parse().ok().filter(|&n| n >= 1).with_context(|| format!("bad modulus in `{a}`"))?;
            moduli.push(n);
            least = Level::L3;
        } else {
            bail!("unknown --allow item `{a}` (expected Fin or ResN)");
        }
    }
    let level = level.unwrap_or(least);
    if level < least {
        bail!("--allow needs level {least}, but --level is {level}");
    }
    let size = size.unwrap_or(if level == Level::L3 { 6 } else { 7 }) as usize;
    let mut spec = EnumerationSpec::new(level, size, vars);
    spec.moduli = moduli;
    spec.max_count = max_count;
    spec.quantifiers = quantifiers;
    // Two-variable bodies with residues grow quickly past size 4.
    let widest = if level == Level::L3 { 4 } else { usize::MAX };
    spec.body_size = body_size.unwrap_or(size.saturating_sub(1).min(widest));
    Ok(spec)
}

fn defcheck(g: &Global, target: &str, spec: &EnumerationSpec, out: &mut Vec<Report>) -> Result<u8> {
    let t = syntax::parse(target).map_err(|e| anyhow::anyhow!("{e}"))?;
    let result = harness::defcheck(&t, spec)?;
    let report = DefcheckReport::new(&t, spec, &result);
    let mut r = Report::new("defcheck", target, "result", serde_json::to_value(&report)?);
    r.text = report.to_text();
    if g.verbose {
        eprintln!("domain {:?}", spec.domain());
    }
    out.push(r);
    Ok(0)
}
