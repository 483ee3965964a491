// Copyright 2026 The fvcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::control::{apply_witness, Action, ControlInstance, ControlType, ControlWitness, Mode, TieRule};
use crate::election::Election;
use crate::error::Error;
use crate::exact::{solve_exact_with, SearchLimits};
use crate::format::{parse_candidate_list, parse_election, parse_pool, write_election};
use crate::poly::{destructive_add_voters_with, destructive_delete_voters_with, Stage, StageSearch};
use crate::reductions::{
    build, small_hitting_set_suite, small_x3c_suite, verify_suite, Construction, Source, SuiteOutcome,
};
use crate::report::{inputs_digest, RunReport, WitnessReport};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fvcontrol", version, about = "Fallback voting winners and control analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the fallback voting winners of an election file.
    Winner { file: PathBuf },
    /// Decide a control problem exactly and print a witness.
    Control(ControlArgs),
    /// Destructive voter control with the polynomial-time algorithm.
    PolyControl(PolyArgs),
    /// Build the control instances a source problem reduces to.
    Reduce(ReduceArgs),
    /// Check a construction against the source oracle on a suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct LimitArgs {
    /// Maximum number of partitions the exact solver may visit.
    #[arg(long, default_value_t = SearchLimits::default().max_partitions)]
    max_partitions: u64,
    /// Maximum number of candidate or voter subsets the exact solver may visit.
    #[arg(long, default_value_t = SearchLimits::default().max_subsets)]
    max_subsets: u64,
}

impl LimitArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            max_partitions: self.max_partitions,
            max_subsets: self.max_subsets,
        }
    }
}

#[derive(Args, Debug)]
struct ControlArgs {
    #[arg(long = "type", value_parser = parse_with::<Action>)]
    action: Action,
    #[arg(long, value_parser = parse_with::<Mode>)]
    mode: Mode,
    #[arg(long, value_parser = parse_with::<TieRule>)]
    tie: Option<TieRule>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    target: String,
    #[arg(long)]
    election: PathBuf,
    /// Unregistered voters for adding voters; for adding candidates, a file
    /// whose header lists the spoiler candidates.
    #[arg(long)]
    pool: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolyAction {
    AddVoters,
    DeleteVoters,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StageArg {
    Exhaustive,
    Literal,
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[arg(long, value_enum)]
    action: PolyAction,
    #[arg(long)]
    budget: u64,
    #[arg(long)]
    target: String,
    #[arg(long)]
    election: PathBuf,
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    stage_search: StageArg,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_parser = parse_with::<Construction>)]
    construction: Construction,
    /// JSON source instance.
    #[arg(long)]
    source: PathBuf,
    /// Write the constructed election here.
    #[arg(long)]
    emit_election: Option<PathBuf>,
    /// Write the first instance's pool voters or spoiler list here.
    #[arg(long)]
    emit_pool: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_with::<Construction>)]
    construction: Construction,
    /// `small` for the built-in suite, or a JSON file holding an array of
    /// source instances.
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    limits: LimitArgs,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Lib(Error::InstanceTooLarge { .. }) => EXIT_TOO_LARGE,
            _ => EXIT_USAGE,
        }
    }
}

type Outcome = Result<(RunReport, i32), Failure>;

/// Runs the tool on `args` (including the program name), writing the report
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut inputs = Inputs::new(&args);
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Winner { file } => winner(&mut inputs, file),
        Command::Control(a) => control(&mut inputs, a),
        Command::PolyControl(a) => poly_control(&mut inputs, a),
        Command::Reduce(a) => reduce(&mut inputs, a),
        Command::Verify(a) => verify(&mut inputs, a),
    };
    let _ = writeln!(err, "elapsed: {:.3?}", started.elapsed());
    match outcome {
        Ok((report, code)) => match out.write_all(report.to_json().as_bytes()) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: writing report: {e}");
                EXIT_USAGE
            }
        },
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            failure.code()
        }
    }
}

/// Collects everything that goes into a report's input digest.
struct Inputs {
    parts: Vec<Vec<u8>>,
}

impl Inputs {
    fn new(args: &[OsString]) -> Self {
        let parts = args
            .iter()
            .skip(1)
            .map(|a| a.to_string_lossy().into_owned().into_bytes())
            .collect();
        Inputs { parts }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.parts.push(text.clone().into_bytes());
        Ok(text)
    }

    fn election(&mut self, path: &Path) -> Result<Election, Failure> {
        let text = self.read(path)?;
        parse_election(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    fn report(&self, command: &str) -> RunReport {
        RunReport::new(command, inputs_digest(self.parts.iter().map(Vec::as_slice)))
    }
}

fn decision_code(yes: bool) -> i32 {
    if yes {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn winner(inputs: &mut Inputs, file: &Path) -> Outcome {
    let e = inputs.election(file)?;
    let result = e.fallback_winners()?;
    log::info!("{} candidates, {} voters", e.num_candidates(), e.voter_count());
    Ok((inputs.report("winner").with_winners(&e, &result), EXIT_YES))
}

fn control(inputs: &mut Inputs, a: &ControlArgs) -> Outcome {
    let ctype = ControlType::new(a.action, a.mode, a.tie)?;
    let e = inputs.election(&a.election)?;
    let target = e.index_of(&a.target)?;
    let mut inst = ControlInstance::new(ctype, e.clone(), target);
    match (&a.pool, a.action) {
        (Some(path), Action::AddVoters) => {
            let text = inputs.read(path)?;
            inst = inst.with_pool(parse_pool(&text, &e)?);
        }
        (Some(path), action) if action.adds_candidates() => {
            let text = inputs.read(path)?;
            inst = inst.with_spoilers(parse_candidate_list(&text, &e)?);
        }
        (Some(_), action) => {
            return Err(Failure::Usage(format!("{} takes no --pool", action.code())))
        }
        (None, _) => {}
    }
    match (a.budget, a.action.needs_budget()) {
        (Some(k), true) => inst = inst.with_budget(k),
        (None, true) => {
            return Err(Failure::Usage(format!("{} requires --budget", a.action.code())))
        }
        (Some(_), false) => {
            return Err(Failure::Usage(format!("{} takes no --budget", a.action.code())))
        }
        (None, false) => {}
    }
    inst.validate()?;
    let base = inst.base_winners()?;
    let solved = solve_exact_with(&inst, &a.limits.limits())?;
    let mut report = inputs.report("control");
    report.decision = Some(solved.decision);
    report.explored = Some(solved.explored);
    report = match &solved.witness {
        Some(w) => {
            report.witness = Some(WitnessReport::new(&e, w));
            report.with_winners(&e, &apply_witness(&inst, w)?)
        }
        None => report.with_winners(&e, &base),
    };
    report.details = json!({
        "type": ctype.to_string(),
        "target": a.target,
        "base_winners": e.names_of(&base.winners),
    });
    Ok((report, decision_code(solved.decision)))
}

fn poly_control(inputs: &mut Inputs, a: &PolyArgs) -> Outcome {
    let e = inputs.election(&a.election)?;
    let target = e.index_of(&a.target)?;
    let search = match a.stage_search {
        StageArg::Exhaustive => StageSearch::Exhaustive,
        StageArg::Literal => StageSearch::Literal,
    };
    let (result, wrap): (_, fn(_) -> ControlWitness) = match (a.action, &a.pool) {
        (PolyAction::AddVoters, Some(path)) => {
            let text = inputs.read(path)?;
            let pool = parse_pool(&text, &e)?;
            (
                destructive_add_voters_with(&e, &pool, target, a.budget, search)?,
                ControlWitness::AddedVoters,
            )
        }
        (PolyAction::AddVoters, None) => {
            return Err(Failure::Usage("add-voters requires --pool".into()))
        }
        (PolyAction::DeleteVoters, None) => (
            destructive_delete_voters_with(&e, target, a.budget, search)?,
            ControlWitness::DeletedVoters,
        ),
        (PolyAction::DeleteVoters, Some(_)) => {
            return Err(Failure::Usage("delete-voters takes no --pool".into()))
        }
    };
    let mut report = inputs.report("poly-control");
    report.decision = Some(result.witness.is_some());
    report.explored = Some(result.evaluations);
    report.witness = result
        .witness
        .clone()
        .map(|sel| WitnessReport::new(&e, &wrap(sel)));
    let stage = match result.stage {
        Stage::AlreadyDethroned => json!({ "kind": "already_dethroned" }),
        Stage::Majority { level, rival } => {
            json!({ "kind": "majority", "level": level, "rival": e.name(rival) })
        }
        Stage::Approval { rival } => json!({ "kind": "approval", "rival": e.name(rival) }),
        Stage::Exhausted => json!({ "kind": "exhausted" }),
    };
    report.details = json!({ "target": a.target, "stage": stage });
    Ok((report, decision_code(result.witness.is_some())))
}

fn read_source(inputs: &mut Inputs, path: &Path) -> Result<Source, Failure> {
    let text = inputs.read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Source::from_json(value)?)
}

fn reduce(inputs: &mut Inputs, a: &ReduceArgs) -> Outcome {
    let source = read_source(inputs, &a.source)?;
    let out = build(a.construction, &source)?;
    let e = &out.election;
    let instances: Vec<_> = out
        .instances
        .iter()
        .map(|li| {
            let inst = &li.instance;
            json!({
                "label": li.label,
                "target": e.name(inst.target()),
                "budget": inst.budget(),
                "spoilers": e.names_of(inst.spoilers()),
                "pool_voters": inst.pool().iter().map(|b| u64::from(b.multiplicity())).sum::<u64>(),
            })
        })
        .collect();
    if let Some(path) = &a.emit_election {
        write_file(path, &write_election(e))?;
    }
    if let Some(path) = &a.emit_pool {
        write_file(path, &pool_text(&out.instances.iter().map(|li| &li.instance).collect::<Vec<_>>())?)?;
    }
    let mut report = inputs.report("reduce");
    report.details = json!({
        "construction": a.construction.name(),
        "source": source,
        "candidates": e.num_candidates(),
        "voters": e.voter_count(),
        "instances": instances,
    });
    Ok((report, EXIT_YES))
}

/// Pool voters of the first instance that has any, else its spoilers as a
/// header-only file.
fn pool_text(instances: &[&ControlInstance]) -> Result<String, Failure> {
    for inst in instances {
        let e = inst.election();
        if !inst.pool().is_empty() {
            let pool = e.with_ballots(inst.pool().to_vec())?;
            return Ok(write_election(&pool));
        }
        if !inst.spoilers().is_empty() {
            return Ok(format!("candidates: {}\n", e.names_of(inst.spoilers()).join(" ")));
        }
    }
    Err(Failure::Usage("construction has no pool voters or spoilers".into()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn verify(inputs: &mut Inputs, a: &VerifyArgs) -> Outcome {
    let sources: Vec<Source> = if a.suite == "small" {
        small_hitting_set_suite()
            .into_iter()
            .map(Source::HittingSet)
            .chain(small_x3c_suite().into_iter().map(Source::X3c))
            .collect()
    } else {
        let path = PathBuf::from(&a.suite);
        let text = inputs.read(&path)?;
        let values: Vec<serde_json::Value> = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        values
            .into_iter()
            .map(Source::from_json)
            .collect::<Result<_, _>>()?
    };
    let entries = verify_suite(a.construction, &sources, &a.limits.limits())?;
    let (mut agree, mut disagree, mut too_large, mut skipped, mut explored) = (0, 0, 0, 0, 0);
    for entry in &entries {
        match &entry.outcome {
            SuiteOutcome::Verified(r) if r.agreement() => agree += 1,
            SuiteOutcome::Verified(_) => disagree += 1,
            SuiteOutcome::TooLarge(_) => too_large += 1,
            SuiteOutcome::NotApplicable(_) => skipped += 1,
        }
        if let SuiteOutcome::Verified(r) = &entry.outcome {
            explored += r.instances.iter().map(|i| i.explored).sum::<u64>();
        }
    }
    let mut report = inputs.report("verify");
    report.decision = Some(disagree == 0 && too_large == 0);
    report.explored = Some(explored);
    report.details = json!({
        "construction": a.construction.name(),
        "agreeing": agree,
        "disagreeing": disagree,
        "too_large": too_large,
        "not_applicable": skipped,
        "entries": entries,
    });
    let code = if disagree > 0 {
        EXIT_NO
    } else if too_large > 0 {
        EXIT_TOO_LARGE
    } else {
        EXIT_YES
    };
    Ok((report, code))
}
