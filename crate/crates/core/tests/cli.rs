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

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use fvcontrol::cli::{run, EXIT_NO, EXIT_TOO_LARGE, EXIT_USAGE, EXIT_YES};
use fvcontrol::format::{parse_election, write_election};
use fvcontrol::{solve_exact, Action, ControlInstance, ControlType, Mode};
use rand::Rng;
use serde_json::Value;
use tempfile::TempDir;

const E1: &str = "candidates: a b c d\n3 * a c |\n2 * b d c |\n1 * d a c |\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn report(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap()
    }
}

fn cli(args: &[&str]) -> Run {
    let mut argv = vec!["fvcontrol"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn winner_of_e1() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let r = cli(&["winner", s(&e1)]);
    assert_eq!(r.code, EXIT_YES);
    let report = r.report();
    assert_eq!(report["winners"], serde_json::json!(["a"]));
    assert_eq!(report["resolution"]["level"], 2);
    assert!(r.stderr.contains("elapsed"));
}

#[test]
fn destructive_partition_of_e1() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let r = cli(&[
        "control", "--type", "partition-candidates", "--mode", "destructive", "--tie", "te",
        "--target", "a", "--election", s(&e1),
    ]);
    assert_eq!(r.code, EXIT_YES);
    let report = r.report();
    assert_eq!(report["decision"], true);
    assert_eq!(report["witness"]["kind"], "candidate-partition");
    assert_ne!(report["winners"], serde_json::json!(["a"]));
}

#[test]
fn impossible_control_exits_one() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let r = cli(&[
        "control", "--type", "delete-voters", "--mode", "constructive", "--budget", "0",
        "--target", "b", "--election", s(&e1),
    ]);
    assert_eq!(r.code, EXIT_NO);
    assert_eq!(r.report()["decision"], false);
    assert!(r.report().get("witness").is_none());
}

#[test]
fn adding_voters_and_spoilers_through_pool_files() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let voters = file(&dir, "pool.fv", "candidates: a b c d\n4 * c |\n");
    let r = cli(&[
        "control", "--type", "add-voters", "--mode", "constructive", "--budget", "3",
        "--target", "c", "--election", s(&e1), "--pool", s(&voters),
    ]);
    assert_eq!(r.code, EXIT_YES);
    let witness = &r.report()["witness"];
    assert_eq!(witness["kind"], "added-voters");
    assert_eq!(witness["voters"][0]["ballot"], 0);

    let spoilers = file(&dir, "spoilers.fv", "candidates: b\n");
    let r = cli(&[
        "control", "--type", "add-candidates-unlimited", "--mode", "destructive",
        "--target", "c", "--election", s(&e1), "--pool", s(&spoilers),
    ]);
    assert!(r.code == EXIT_YES || r.code == EXIT_NO, "{}", r.stderr);
    assert_eq!(r.report()["details"]["type"], "add-candidates-unlimited/destructive");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.fv", "candidates: a b\n\n1 * a a |\n");
    let r = cli(&["winner", s(&bad)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let e1 = file(&dir, "e1.fv", E1);
    for args in [
        vec!["control", "--type", "delete-voters", "--mode", "constructive", "--target", "a"],
        vec!["control", "--type", "delete-voters", "--mode", "constructive", "--target", "z", "--budget", "1", "--election", s(&e1)],
        vec!["control", "--type", "partition-voters", "--mode", "constructive", "--target", "a", "--election", s(&e1)],
        vec!["control", "--type", "delete-voters", "--mode", "constructive", "--target", "a", "--election", s(&e1)],
        vec!["reduce", "--construction", "nope", "--source", s(&e1)],
    ] {
        assert_eq!(cli(&args).code, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn search_limits_exit_three() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let r = cli(&[
        "control", "--type", "runoff-partition-candidates", "--mode", "constructive", "--tie", "tp",
        "--target", "c", "--election", s(&e1), "--max-partitions", "2",
    ]);
    assert_eq!(r.code, EXIT_TOO_LARGE);
    assert!(r.stderr.contains("too large"), "{}", r.stderr);
}

#[test]
fn poly_control_reports_stage() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let r = cli(&[
        "poly-control", "--action", "delete-voters", "--budget", "2", "--target", "a",
        "--election", s(&e1),
    ]);
    assert_eq!(r.code, EXIT_YES);
    let report = r.report();
    assert_eq!(report["witness"]["kind"], "deleted-voters");
    assert!(report["details"]["stage"]["kind"].is_string());

    let pool = file(&dir, "pool.fv", "candidates: a b c d\n1 * a |\n");
    let r = cli(&[
        "poly-control", "--action", "add-voters", "--budget", "1", "--target", "a",
        "--election", s(&e1), "--pool", s(&pool), "--stage-search", "literal",
    ]);
    assert_eq!(r.code, EXIT_NO);
    assert_eq!(r.report()["details"]["stage"]["kind"], "exhausted");
}

#[test]
fn reduce_emits_parseable_files() {
    let dir = TempDir::new().unwrap();
    let source = file(&dir, "x3c.json", r#"{"m": 2, "sets": [[0,1,2],[3,4,5],[0,1,3]]}"#);
    let election = dir.path().join("out.fv");
    let pool = dir.path().join("pool.fv");
    let r = cli(&[
        "reduce", "--construction", "adding-voters", "--source", s(&source),
        "--emit-election", s(&election), "--emit-pool", s(&pool),
    ]);
    assert_eq!(r.code, EXIT_YES, "{}", r.stderr);
    let report = r.report();
    let e = parse_election(&std::fs::read_to_string(&election).unwrap()).unwrap();
    assert_eq!(report["details"]["candidates"], e.num_candidates());
    let pool_text = std::fs::read_to_string(&pool).unwrap();
    assert_eq!(fvcontrol::format::parse_pool(&pool_text, &e).unwrap().len(), 3);

    let hs = file(&dir, "hs.json", r#"{"m": 3, "k": 1, "sets": [[0,1],[1,2]]}"#);
    let r = cli(&["reduce", "--construction", "candidate-control", "--source", s(&hs)]);
    assert_eq!(r.code, EXIT_YES);
    assert_eq!(r.report()["details"]["instances"].as_array().unwrap().len(), 13);

    let wrong = file(&dir, "wrong.json", r#"{"m": 3, "k": 1, "sets": [[0]]}"#);
    let r = cli(&["reduce", "--construction", "candidate-control", "--source", s(&wrong)]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn verify_small_suite_and_files() {
    let r = cli(&["verify", "--construction", "candidate-control-adding", "--suite", "small"]);
    assert_eq!(r.code, EXIT_YES);
    let report = r.report();
    assert_eq!(report["decision"], true);
    assert_eq!(report["details"]["disagreeing"], 0);
    assert!(report["details"]["agreeing"].as_u64().unwrap() >= 20);

    let dir = TempDir::new().unwrap();
    let suite = file(
        &dir,
        "suite.json",
        r#"[{"m": 1, "sets": [[0,1,2]]}, {"m": 2, "sets": [[0,1,2],[0,1,3]]}]"#,
    );
    let r = cli(&["verify", "--construction", "partition-voters-te", "--suite", s(&suite)]);
    assert_eq!(r.code, EXIT_YES);
    assert_eq!(r.report()["details"]["agreeing"], 2);

    let r = cli(&[
        "verify", "--construction", "partition-voters-te", "--suite", s(&suite),
        "--max-partitions", "4",
    ]);
    assert_eq!(r.code, EXIT_TOO_LARGE);
}

#[test]
fn cli_decisions_match_library() {
    let dir = TempDir::new().unwrap();
    let mut rng = common::rng(0xc11);
    for round in 0..60 {
        let n = rng.gen_range(2..=4);
        let lines = rng.gen_range(1..=5);
        let e = common::random_election(&mut rng, n, lines, 2);
        let path = file(&dir, &format!("e{round}.fv"), &write_election(&e));
        let action = [Action::DeleteCandidates, Action::DeleteVoters, Action::PartitionVoters]
            [round % 3];
        let mode = if rng.gen_bool(0.5) { Mode::Constructive } else { Mode::Destructive };
        let tie = action.is_partition().then_some(fvcontrol::TieRule::TiesPromote);
        let target = rng.gen_range(0..n);
        let mut inst = ControlInstance::new(ControlType::new(action, mode, tie).unwrap(), e.clone(), target);
        let budget = rng.gen_range(0..3u64);
        let budget_text = budget.to_string();
        let mut args = vec![
            "control", "--type", action.code(), "--mode", mode.code(), "--target", e.name(target),
            "--election", s(&path),
        ];
        if action.needs_budget() {
            inst = inst.with_budget(budget);
            args.extend(["--budget", budget_text.as_str()]);
        } else {
            args.extend(["--tie", "tp"]);
        }
        let expected = solve_exact(&inst).unwrap().decision;
        let r = cli(&args);
        assert_eq!(r.report()["decision"], expected, "{args:?}");
        assert_eq!(r.code, if expected { EXIT_YES } else { EXIT_NO });
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let args = [
        "control", "--type", "partition-voters", "--mode", "destructive", "--tie", "te",
        "--target", "a", "--election", s(&e1),
    ];
    let first = cli(&args);
    let second = cli(&args);
    assert_eq!(first.stdout, second.stdout);
    let other = file(&dir, "e1b.fv", &format!("{E1}# changed\n"));
    let mut changed = args;
    changed[10] = s(&other);
    assert_ne!(cli(&changed).report()["inputs_digest"], first.report()["inputs_digest"]);
}

#[test]
fn binary_exit_statuses() {
    let dir = TempDir::new().unwrap();
    let e1 = file(&dir, "e1.fv", E1);
    let bin = env!("CARGO_BIN_EXE_fvcontrol");
    let out = Command::new(bin).args(["winner", s(&e1)]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["winners"], serde_json::json!(["a"]));
    let out = Command::new(bin).args(["winner"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .args(["control", "--type", "delete-voters", "--mode", "constructive", "--budget", "0"])
        .args(["--target", "b", "--election", s(&e1)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
