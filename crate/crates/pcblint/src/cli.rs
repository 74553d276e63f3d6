//! The `pcblint` command line.
//!
//! Exit codes: 0 when nothing is active, 1 when findings remain, 2 on any
//! operational error (unreadable or malformed input, bad configuration,
//! waiver or ledger trouble).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcblint_core::bom::generate_bom;
use pcblint_core::rules::{merge, Finding, Phase, RunPlan, RuleSet};
use pcblint_core::scoring::{compute_score, EventKind, Outcome};
use pcblint_core::waivers::{reconcile, review, Decision, Waiver};
use pcblint_core::Document;
use rayon::prelude::*;

use crate::config::{load_ruleset, DEFAULT_CONFIG};
use crate::inputs::{self, Inputs};
use crate::report::{render_json, render_text, NetlistStats, Report};
use crate::{bom_csv, ledger_file, waiver_file};

#[derive(Debug, Parser)]
#[command(name = "pcblint", version, about = "Lint Eagle schematics and boards against lab rule sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
struct CheckArgs {
    /// Lab whose rule set applies.
    #[arg(long)]
    lab: String,
    /// Rule-set configuration (TOML). Defaults to the built-in labs.
    #[arg(long, env = "PCBLINT_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Rule evaluation threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Schematic, board and/or library files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecisionArg {
    Approve,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutcomeArg {
    Passed,
    Failed,
}

impl From<OutcomeArg> for Outcome {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Passed => Outcome::Passed,
            OutcomeArg::Failed => Outcome::Failed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    FullCheck,
    HumanReview,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Style checks. Free: never touches the ledger.
    Quick(CheckArgs),
    /// Style and correctness checks, reconciled against waivers.
    Full {
        #[command(flatten)]
        check: CheckArgs,
        /// Waiver file for this lab.
        #[arg(long)]
        waivers: Option<PathBuf>,
        /// Review ledger; one full-check event is appended per run.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Approve or reject a proposed waiver.
    Review {
        #[arg(long)]
        waivers: PathBuf,
        rule_id: String,
        locator: String,
        #[arg(value_enum)]
        decision: DecisionArg,
        /// Feedback for the student.
        #[arg(long)]
        note: Option<String>,
        /// Ledger to charge with a human-review event (needs --charge).
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Record a human review in the ledger.
        #[arg(long, requires = "ledger")]
        charge: bool,
        /// Outcome of the charged review; defaults to passed on approve and
        /// failed on reject.
        #[arg(long, value_enum, requires = "charge")]
        outcome: Option<OutcomeArg>,
        /// Lab of a ledger that does not exist yet.
        #[arg(long)]
        lab: Option<String>,
    },
    /// Append an event to a ledger by hand.
    Record {
        #[arg(long)]
        ledger: PathBuf,
        /// Lab of a ledger that does not exist yet.
        #[arg(long)]
        lab: Option<String>,
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(value_enum)]
        outcome: OutcomeArg,
    },
    /// Show a lab score.
    Score {
        #[arg(long)]
        ledger: PathBuf,
    },
    /// Combined bill of materials for several schematics.
    Bom {
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List the rule catalog, or one lab's rules.
    Rules {
        #[arg(long, env = "PCBLINT_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        lab: Option<String>,
    },
}

/// An operational failure; always exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn load_config(path: Option<&Path>) -> Result<RuleSet> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    Ok(load_ruleset(&text)?)
}

/// Evaluates the plan on `jobs` threads (0 = all cores). The result does
/// not depend on `jobs`.
pub fn evaluate(plan: &RunPlan<'_>, jobs: usize) -> Result<Vec<Finding>> {
    if jobs == 1 {
        return Ok(plan.run());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let parts: Vec<Vec<Finding>> = pool.install(|| (0..plan.len()).into_par_iter().map(|i| plan.evaluate(i)).collect());
    Ok(merge(parts))
}

/// Runs one check and reconciles it with `waivers`.
pub fn run_check(
    ruleset: &RuleSet,
    inputs: &Inputs,
    lab: &str,
    phase: Phase,
    waivers: &[Waiver],
    jobs: usize,
) -> Result<Report> {
    let plan = RunPlan::new(ruleset, inputs.design(), lab, phase)?;
    let findings = evaluate(&plan, jobs)?;
    Ok(Report {
        phase,
        lab: lab.into(),
        inputs: inputs.files.clone(),
        netlist: inputs
            .schematic
            .as_ref()
            .map(|(_, nl)| NetlistStats { nets: nl.net_count(), pinrefs: nl.pinref_count() }),
        findings: reconcile(&findings, waivers),
    })
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Json => render_json(report),
    }
}

fn check(args: &CheckArgs, phase: Phase, waivers: Option<&Path>, ledger: Option<&Path>, out: &mut dyn Write) -> Result<u8> {
    let ruleset = load_config(args.config.as_deref())?;
    let inputs = inputs::load(&args.files)?;
    let waivers = match waivers {
        Some(p) => waiver_file::load(p)?,
        None => Vec::new(),
    };
    let report = run_check(&ruleset, &inputs, &args.lab, phase, &waivers, args.jobs)?;
    if let Some(path) = ledger {
        let outcome = if report.findings.active.is_empty() { Outcome::Passed } else { Outcome::Failed };
        ledger_file::append(path, Some(&args.lab), EventKind::FullCheck, outcome)?;
    }
    out.write_all(render(&report, args.format).as_bytes())?;
    Ok(report.exit_code())
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Quick(args) => check(&args, Phase::Quick, None, None, out),
        Command::Full { check: args, waivers, ledger } => {
            check(&args, Phase::Full, waivers.as_deref(), ledger.as_deref(), out)
        }
        Command::Review { waivers, rule_id, locator, decision, note, ledger, charge, outcome, lab } => {
            let current = waiver_file::load(&waivers)?;
            let decision = match decision {
                DecisionArg::Approve => Decision::Approve,
                DecisionArg::Reject => Decision::Reject,
            };
            let updated = review(&current, &rule_id, &locator, decision, note.as_deref())?;
            waiver_file::save(&waivers, &updated)?;
            writeln!(out, "{rule_id} {locator}: {}", if decision == Decision::Approve { "approved" } else { "rejected" })?;
            if charge {
                let ledger = ledger.expect("clap enforces --ledger with --charge");
                let outcome = outcome.map(Outcome::from).unwrap_or(match decision {
                    Decision::Approve => Outcome::Passed,
                    Decision::Reject => Outcome::Failed,
                });
                let l = ledger_file::append(&ledger, lab.as_deref(), EventKind::HumanReview, outcome)?;
                writeln!(out, "recorded human review ({}) in lab {}", outcome.as_str(), l.lab())?;
            }
            Ok(0)
        }
        Command::Record { ledger, lab, kind, outcome } => {
            let kind = match kind {
                KindArg::FullCheck => EventKind::FullCheck,
                KindArg::HumanReview => EventKind::HumanReview,
            };
            let l = ledger_file::append(&ledger, lab.as_deref(), kind, outcome.into())?;
            writeln!(out, "recorded {} ({}) in lab {}", kind.as_str(), Outcome::from(outcome).as_str(), l.lab())?;
            Ok(0)
        }
        Command::Score { ledger } => {
            let l = ledger_file::load(&ledger, None)?;
            writeln!(out, "{}", compute_score(&l))?;
            Ok(0)
        }
        Command::Bom { out: path, files } => {
            let mut docs = Vec::new();
            for f in &files {
                match inputs::parse_file(f)?.1 {
                    Document::Schematic(s) => docs.push(s),
                    other => return Err(Failure(format!("{}: expected a schematic, got a {}", f.display(), other.kind()))),
                }
            }
            let stems: Vec<String> =
                files.iter().map(|f| f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()).collect();
            let names = bom_csv::design_names(stems.iter().map(String::as_str));
            let csv = bom_csv::render_bom(&generate_bom(names.iter().map(String::as_str).zip(&docs)));
            match path {
                Some(p) => crate::atomic::write(&p, csv.as_bytes())?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(0)
        }
        Command::Rules { config, lab } => {
            let ruleset = load_config(config.as_deref())?;
            let ids: Vec<&str> = match &lab {
                Some(l) => ruleset.lab_rules(l).ok_or_else(|| Failure(format!("unknown lab {l:?}")))?,
                None => ruleset.registry().rules().iter().map(|r| r.id).collect(),
            };
            for id in ids {
                let r = ruleset.registry().get(id).expect("lab rules come from the registry");
                let waivable = if r.waivable { "" } else { " (not waivable)" };
                writeln!(out, "{:<28} {:<5} {:<7} {}{waivable}", r.id, r.phase.as_str(), r.severity.as_str(), r.title)?;
            }
            Ok(0)
        }
    }
}

/// Runs the command line with explicit arguments and streams. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "pcblint: error: {message}");
            2
        }
    }
}

pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
