//! Command-line front end for `abloc`.
//!
//! [`execute`] turns a parsed [`Cli`] into an [`Outcome`] without touching
//! the process, so every verb can be driven from tests and from `batch`.

pub mod parse;
pub mod report;

use abloc::abgroup::{free_symbol, GroupHom};
use abloc::arith::{format_rational, parse_rational, Rational};
use abloc::counterex::{divisibility_solutions, nth_root, verify_root, BoundedFn, CounterexError, PElem, QmodZElem, RootOutcome};
use abloc::homotopy::{
    em_localize, is_local_desc, is_localization_map, localize_desc, DescMap, EMDescriptor, HomotopyError,
    SimplyConnectedDesc,
};
use abloc::localize::{
    is_localization, is_uniquely_s_divisible, lift_along_power, localize_group, telescope_colimit, FailedClause,
    LocalizationCertificate, LocalizeError,
};
use abloc::par::Execution;
use abloc::{AbGroup, GroupError, Localizer};
use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

pub use parse::{parse_descriptor, parse_group_expr, ParseError};
pub use report::{Report, Status};

#[derive(Debug, Parser)]
#[command(name = "abloc", version, about = "Localize finitely generated abelian groups at and away from primes")]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Which primes to invert.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Inverting {
    /// Invert the power maps of these generators, e.g. `2,3`.
    #[arg(long, value_name = "K1,K2,...")]
    pub family: Option<String>,
    /// Localize at the prime P (invert every other prime).
    #[arg(long, value_name = "P")]
    pub at: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localize a group or a descriptor and print the unit map.
    Localize {
        input: String,
        #[command(flatten)]
        inverting: Inverting,
    },
    /// Decide whether a group or descriptor is already local.
    CheckLocal {
        input: String,
        #[command(flatten)]
        inverting: Inverting,
    },
    /// Decide whether a map is a localization.
    CheckMap {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        codomain: String,
        /// One matrix per level, rows separated by `;`.
        #[arg(long = "matrix", required = true, allow_hyphen_values = true)]
        matrices: Vec<String>,
        #[command(flatten)]
        inverting: Inverting,
    },
    /// Trace the telescope colimit of the power maps.
    Telescope {
        input: String,
        #[command(flatten)]
        inverting: Inverting,
    },
    /// Localize an Eilenberg-Mac Lane descriptor K(G, n).
    Em {
        input: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[command(flatten)]
        inverting: Inverting,
    },
    /// Certificates for the groups Q/Z and B ⋊ Q.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Lift a map along the k-th power map of its domain.
    Lift {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        codomain: String,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        k: u64,
    },
    /// Run a JSON array of argument lists read from standard input.
    Batch {
        /// Spread the commands over threads.
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum Counterexample {
    /// (δ_0, 2) has no square root.
    SqrtDelta,
    /// All solutions of k·x = y in Q/Z.
    QzDivide {
        y: String,
        k: u64,
    },
    /// n-th root of (f, r), with f given as `x:v,x:v,...`.
    Root {
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Counterex(#[from] CounterexError),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

/// What the process should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Localize { .. } => "localize",
            Command::CheckLocal { .. } => "check-local",
            Command::CheckMap { .. } => "check-map",
            Command::Telescope { .. } => "telescope",
            Command::Em { .. } => "em",
            Command::Counterexample { .. } => "counterexample",
            Command::Lift { .. } => "lift",
            Command::Batch { .. } => "batch",
        }
    }
}

/// Runs a parsed command. `stdin` is read only by `batch`.
pub fn execute(cli: &Cli, stdin: &str) -> Outcome {
    let result = match &cli.command {
        Command::Batch { parallel } => batch(stdin, *parallel),
        other => run(other),
    };
    match result {
        Ok(report) => Outcome {
            code: report.status.code(),
            stdout: report.render(cli.json),
            stderr: String::new(),
        },
        Err(e) => {
            let stdout = if cli.json {
                report::render_json(&report::canonical(json!({
                    "schema_version": report::SCHEMA_VERSION,
                    "command": cli.command.name(),
                    "error": e.to_string(),
                })))
            } else {
                String::new()
            };
            Outcome {
                code: Status::InputError.code(),
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

/// Parses `args` (without the program name) and runs them.
pub fn execute_args<I, S>(args: I, stdin: &str) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("abloc")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli, stdin),
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: if e.use_stderr() { String::new() } else { e.to_string() },
            stderr: if e.use_stderr() { e.to_string() } else { String::new() },
        },
    }
}

fn localizer(inv: &Inverting) -> Result<Localizer> {
    Ok(parse::parse_localizer(inv.family.as_deref(), inv.at)?)
}

/// Runs a single non-batch command.
pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Localize { input, inverting } => {
            let s = localizer(inverting)?;
            if parse::is_descriptor(input) {
                localize_descriptor(&parse_descriptor(input)?, &s)
            } else {
                localize(&parse_group_expr(input)?, &s)
            }
        }
        Command::CheckLocal { input, inverting } => {
            let s = localizer(inverting)?;
            if parse::is_descriptor(input) {
                check_local_desc(&parse_descriptor(input)?, &s)
            } else {
                check_local(&parse_group_expr(input)?, &s)
            }
        }
        Command::CheckMap {
            domain,
            codomain,
            matrices,
            inverting,
        } => check_map(domain, codomain, matrices, &localizer(inverting)?),
        Command::Telescope { input, inverting } => telescope(&parse_group_expr(input)?, &localizer(inverting)?),
        Command::Em {
            input,
            degree,
            inverting,
        } => em(&parse_group_expr(input)?, *degree, &localizer(inverting)?),
        Command::Counterexample { which } => counterexample(which),
        Command::Lift {
            domain,
            codomain,
            matrix,
            k,
        } => lift(&parse_hom(domain, codomain, matrix)?, *k),
        Command::Batch { .. } => Err(CliError::Usage("batch cannot be nested".into())),
    }
}

fn parse_hom(domain: &str, codomain: &str, matrix: &str) -> Result<GroupHom> {
    let g = parse_group_expr(domain)?;
    let h = parse_group_expr(codomain)?;
    let m = parse::parse_matrix(matrix, h.num_generators(), g.num_generators())?;
    Ok(GroupHom::new(g, h, m)?)
}

fn localize(g: &AbGroup, s: &Localizer) -> Result<Report> {
    let res = localize_group(g, s)?;
    // the telescope cross-checks the direct formula whenever it applies
    let trace = match telescope_colimit(g, s) {
        Ok(t) => Some(t),
        Err(LocalizeError::CofiniteTelescope(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let deleted: Vec<String> = res.witness.deleted_torsion.iter().map(|t| format!("Z/{}", t.order())).collect();
    let mut text = format!("{g} --[{s}]--> {}", res.localized);
    if !deleted.is_empty() {
        text.push_str(&format!("\ndeleted torsion: {}", deleted.join(", ")));
    }
    let mut body = json!({
        "input": g.expr(),
        "family": s.to_string(),
        "localized": res.localized.expr(),
        "unit_matrix": report::matrix(res.unit.matrix()),
        "deleted_torsion": deleted,
    });
    if let Some(t) = &trace {
        if t.colimit != res.localized {
            return Err(CliError::Usage(format!(
                "telescope colimit {} disagrees with {}",
                t.colimit, res.localized
            )));
        }
        text.push_str(&format!("\nstabilization index: {}", t.stabilization_index));
        body["stabilization_index"] = json!(t.stabilization_index);
    }
    Ok(Report::new("localize", Status::Success, text, body))
}

fn localize_descriptor(d: &SimplyConnectedDesc, s: &Localizer) -> Result<Report> {
    let (local, map) = localize_desc(d, s)?;
    let text = format!("{d} --[{s}]--> {local}");
    let body = json!({
        "input": d.to_string(),
        "family": s.to_string(),
        "localized": local.to_string(),
        "unit_levels": map.levels().iter().map(report::hom).collect::<Vec<_>>(),
    });
    Ok(Report::new("localize", Status::Success, text, body))
}

/// Why `g` fails to be uniquely S-divisible; empty when it is local.
fn locality_obstructions(g: &AbGroup, s: &Localizer) -> Vec<String> {
    let inverted = s.primes();
    let mut out = Vec::new();
    if g.rank() > 0 && !inverted.is_subset(g.ring()) {
        out.push(format!("free summand {} is not divisible by every element of S", free_symbol(g.ring())));
    }
    for t in g.torsion() {
        if inverted.contains(t.prime) {
            out.push(format!("Z/{} has {}-torsion", t.order(), t.prime));
        }
    }
    debug_assert_eq!(out.is_empty(), is_uniquely_s_divisible(g, s));
    out
}

fn verdict(local: bool) -> (Status, &'static str) {
    if local {
        (Status::Success, "local")
    } else {
        (Status::Negative, "not local")
    }
}

fn check_local(g: &AbGroup, s: &Localizer) -> Result<Report> {
    let reasons = locality_obstructions(g, s);
    let (status, word) = verdict(reasons.is_empty());
    let mut text = word.to_string();
    for r in &reasons {
        text.push_str(&format!("\n  {r}"));
    }
    let body = json!({
        "input": g.expr(),
        "family": s.to_string(),
        "local": reasons.is_empty(),
        "obstructions": reasons,
    });
    Ok(Report::new("check-local", status, text, body))
}

fn check_local_desc(d: &SimplyConnectedDesc, s: &Localizer) -> Result<Report> {
    let mut reasons = Vec::new();
    for (i, g) in d.groups().iter().enumerate() {
        reasons.extend(locality_obstructions(g, s).into_iter().map(|r| format!("pi{}: {r}", i + 2)));
    }
    debug_assert_eq!(reasons.is_empty(), is_local_desc(d, s));
    let (status, word) = verdict(reasons.is_empty());
    let mut text = word.to_string();
    for r in &reasons {
        text.push_str(&format!("\n  {r}"));
    }
    let body = json!({
        "input": d.to_string(),
        "family": s.to_string(),
        "local": reasons.is_empty(),
        "obstructions": reasons,
    });
    Ok(Report::new("check-local", status, text, body))
}

fn certificate_json(degree: Option<usize>, c: &LocalizationCertificate) -> Value {
    let mut v = json!({
        "holds": c.holds(),
        "failures": c.failures.iter().map(FailedClause::label).collect::<Vec<_>>(),
        "kernel": c.kernel.expr(),
        "localized_cokernel": c.localized_cokernel.as_ref().map(AbGroup::expr),
    });
    if let Some(d) = degree {
        v["degree"] = json!(d);
    }
    v
}

fn check_map(domain: &str, codomain: &str, matrices: &[String], s: &Localizer) -> Result<Report> {
    let (levels, certs, degrees): (Vec<GroupHom>, Vec<LocalizationCertificate>, Vec<Option<usize>>) =
        if parse::is_descriptor(domain) {
            let d = parse_descriptor(domain)?;
            let c = parse_descriptor(codomain)?;
            if matrices.len() != d.groups().len() {
                return Err(CliError::Usage(format!(
                    "an {}-type map needs {} matrices, got {}",
                    d.truncation(),
                    d.groups().len(),
                    matrices.len()
                )));
            }
            let levels = d
                .groups()
                .iter()
                .zip(c.groups())
                .zip(matrices)
                .map(|((g, h), m)| {
                    let m = parse::parse_matrix(m, h.num_generators(), g.num_generators())?;
                    Ok(GroupHom::new(g.clone(), h.clone(), m)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let map = DescMap::new(d, c, levels)?;
            let cert = is_localization_map(&map, s)?;
            let degrees = (2..map.levels().len() + 2).map(Some).collect();
            (map.levels().to_vec(), cert.levels, degrees)
        } else {
            let [m] = matrices else {
                return Err(CliError::Usage(format!("a group map needs one matrix, got {}", matrices.len())));
            };
            let h = parse_hom(domain, codomain, m)?;
            let cert = is_localization(&h, s)?;
            (vec![h], vec![cert], vec![None])
        };
    let holds = certs.iter().all(LocalizationCertificate::holds);
    let mut text = String::new();
    if holds {
        text.push_str("localization");
    } else {
        text.push_str("not a localization");
        let (i, c) = certs.iter().enumerate().find(|(_, c)| !c.holds()).expect("some level fails");
        if let Some(d) = degrees[i] {
            text.push_str(&format!("\nfirst failing level: pi{d}"));
        }
        let clause = c.first_failure().expect("a failing certificate names a clause");
        text.push_str(&format!("\nfailing clause: {}", clause.label()));
    }
    let body = json!({
        "family": s.to_string(),
        "holds": holds,
        "levels": certs.iter().zip(&degrees).map(|(c, d)| certificate_json(*d, c)).collect::<Vec<_>>(),
        "maps": levels.iter().map(report::hom).collect::<Vec<_>>(),
    });
    let status = if holds { Status::Success } else { Status::Negative };
    Ok(Report::new("check-map", status, text, body))
}

fn telescope(g: &AbGroup, s: &Localizer) -> Result<Report> {
    let trace = telescope_colimit(g, s)?;
    let mut lines = Vec::new();
    let mut stages = Vec::new();
    for (n, stage) in trace.stages.iter().enumerate() {
        lines.push(format!("stage {n}: {}  (next factor {})", stage.group, stage.factor));
        stages.push(json!({
            "stage": n,
            "group": stage.group.expr(),
            "factor": stage.factor.to_string(),
            "transition": report::hom(&stage.transition),
        }));
    }
    lines.push(format!("stabilizes at stage {}", trace.stabilization_index));
    lines.push(format!("colimit: {}", trace.colimit));
    let body = json!({
        "input": g.expr(),
        "family": s.to_string(),
        "stages": stages,
        "stabilization_index": trace.stabilization_index,
        "colimit": trace.colimit.expr(),
    });
    Ok(Report::new("telescope", Status::Success, lines.join("\n"), body))
}

fn em(g: &AbGroup, degree: usize, s: &Localizer) -> Result<Report> {
    let k = EMDescriptor::new(g.clone(), degree)?;
    let (local, unit) = em_localize(&k, s)?;
    let text = format!("{k} --[{s}]--> {local}");
    let body = json!({
        "input": g.expr(),
        "degree": degree,
        "family": s.to_string(),
        "localized": local.group().expr(),
        "unit_matrix": report::matrix(unit.matrix()),
    });
    Ok(Report::new("em", Status::Success, text, body))
}

fn lift(f: &GroupHom, k: u64) -> Result<Report> {
    let lifted = lift_along_power(f, k)?;
    let text = format!("lift along {k}: {}", report::hom_text(&lifted));
    let body = json!({
        "k": k,
        "map": report::hom(f),
        "lift": report::hom(&lifted),
    });
    Ok(Report::new("lift", Status::Success, text, body))
}

fn rational_arg(text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_points(text: &str) -> Result<BoundedFn> {
    let mut points = Vec::new();
    for item in text.split(',').filter(|t| !t.trim().is_empty()) {
        let (x, v) = item
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("expected x:value, got `{}`", item.trim())))?;
        points.push((rational_arg(x)?, rational_arg(v)?));
    }
    Ok(BoundedFn::from_points(points))
}

fn ordinal(n: u64) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

fn root_report(target: &PElem, n: u64, no_root: Status) -> Result<Report> {
    let outcome = nth_root(target, n)?;
    let mut body = json!({
        "target": report::p_elem(target),
        "n": n,
    });
    let (status, text) = match outcome {
        RootOutcome::Root(root) => {
            debug_assert!(verify_root(&root, target, n));
            body["outcome"] = json!("Root");
            body["root"] = report::p_elem(&root);
            (Status::Success, format!("Root: {root}^{n} = {target}"))
        }
        RootOutcome::NoSolution(obstruction) => {
            body["outcome"] = json!("NoSolution");
            body["obstruction"] = report::obstruction(&obstruction);
            (no_root, format!("NoSolution: {target} has no {} root\n{obstruction}", ordinal(n)))
        }
    };
    Ok(Report::new("counterexample", status, text, body))
}

fn counterexample(which: &Counterexample) -> Result<Report> {
    match which {
        Counterexample::SqrtDelta => {
            let target = PElem::new(BoundedFn::delta(Rational::zero()), Rational::from_integer(2.into()));
            root_report(&target, 2, Status::Success)
        }
        Counterexample::Root { f, r, n } => {
            let target = PElem::new(parse_points(f)?, rational_arg(r)?);
            root_report(&target, *n, Status::Negative)
        }
        Counterexample::QzDivide { y, k } => {
            let y = QmodZElem::new(rational_arg(y)?);
            let solutions = divisibility_solutions(&y, *k)?;
            let listed: Vec<String> = solutions.iter().map(|x| format_rational(x.value())).collect();
            let text = format!(
                "{k}·x = {y} in Q/Z has {} solutions: {}",
                solutions.len(),
                listed.join(", ")
            );
            let body = json!({
                "y": format_rational(y.value()),
                "k": k,
                "count": solutions.len(),
                "solutions": listed,
                "unique": solutions.len() == 1,
            });
            Ok(Report::new("counterexample", Status::Success, text, body))
        }
    }
}

fn batch(stdin: &str, parallel: bool) -> Result<Report> {
    let jobs: Vec<Vec<String>> = serde_json::from_str(stdin)
        .map_err(|e| CliError::Usage(format!("batch input must be a JSON array of string arrays: {e}")))?;
    let exec = if parallel { Execution::Parallel } else { Execution::Sequential };
    let results = exec.map_slice(&jobs, |args| {
        let is_batch = args.first().is_some_and(|a| a == "batch");
        let outcome = if is_batch {
            Outcome {
                code: Status::InputError.code(),
                stdout: String::new(),
                stderr: "error: batch cannot be nested\n".into(),
            }
        } else {
            let mut argv = args.clone();
            if !argv.iter().any(|a| a == "--json") {
                argv.push("--json".into());
            }
            execute_args(argv, "")
        };
        let report = serde_json::from_str::<Value>(&outcome.stdout).unwrap_or(Value::Null);
        let entry = json!({
            "args": args,
            "exit_code": outcome.code,
            "report": report,
            "stderr": outcome.stderr.trim_end(),
        });
        (outcome.code, entry)
    });
    let worst = results.iter().map(|(c, _)| *c).max().unwrap_or(0);
    let status = match worst {
        0 => Status::Success,
        1 => Status::Negative,
        _ => Status::InputError,
    };
    let text = results
        .iter()
        .zip(&jobs)
        .map(|((code, _), args)| format!("[{code}] {}", args.join(" ")))
        .collect::<Vec<_>>()
        .join("\n");
    let body = json!({ "results": results.into_iter().map(|(_, e)| e).collect::<Vec<_>>() });
    Ok(Report::new("batch", status, text, body))
}
