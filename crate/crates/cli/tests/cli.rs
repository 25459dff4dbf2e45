use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use stable_plans_cli::{run, Outcome, EXIT_BUDGET, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn sjp(args: &[&str]) -> Outcome {
    sjp_stdin(args, "")
}

fn sjp_stdin(args: &[&str], stdin: &str) -> Outcome {
    let mut argv = vec!["sjp"];
    argv.extend_from_slice(args);
    run(argv, &mut stdin.as_bytes())
}

fn verdict(o: &Outcome) -> &str {
    o.output
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("verdict: "))
        .expect("first line is the verdict")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_sys_a_is_unstable() {
    let o = sjp(&[
        "verify",
        "--system",
        &fixture("sys_a.sys"),
        "--plan",
        &fixture("plan_a.plan"),
    ]);
    assert_eq!((verdict(&o), o.code), ("UNSTABLE", EXIT_NEGATIVE));
    assert!(o.output.contains("deviator: agent 2"));
    assert!(o.output.contains("trajectory: (u0,v0,e) (u1,v0,e)"));
}

#[test]
fn verify_sys_b_stable_with_oracle() {
    let o = sjp(&[
        "verify",
        "--system",
        &fixture("sys_b.sys"),
        "--plan",
        &fixture("plan_a.plan"),
        "--oracle",
    ]);
    assert_eq!((verdict(&o), o.code), ("STABLE", EXIT_OK));
    assert!(o.output.contains("oracle: agrees"));
}

#[test]
fn json_document_follows_verdict() {
    let o = sjp(&[
        "--json",
        "verify",
        "--system",
        &fixture("sys_a.sys"),
        "--plan",
        &fixture("plan_a.plan"),
    ]);
    assert_eq!(verdict(&o), "UNSTABLE");
    let body: String = o.output.lines().skip(1).collect::<Vec<_>>().join("\n");
    let doc: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["format"], 1);
    assert_eq!(doc["verdict"], "UNSTABLE");
    assert_eq!(doc["exit_code"], 1);
    assert_eq!(doc["counterexample"]["deviator"], 2);
    assert_eq!(doc["counterexample"]["agent2"][0], "bad");
    assert!(doc["time_ms"].is_number());
}

#[test]
fn verify_single_direction() {
    let sys = fixture("sys_a.sys");
    let plan = fixture("plan_a.plan");
    let o = sjp(&["verify", "--system", &sys, "--plan", &plan, "--agent", "1"]);
    assert_eq!(verdict(&o), "STABLE");
    let o = sjp(&[
        "verify", "--system", &sys, "--plan", &plan, "--agent", "2", "--oracle",
    ]);
    assert_eq!(verdict(&o), "UNSTABLE");
    assert!(o.output.contains("oracle: agrees"));
}

#[test]
fn oracle_budget_exhaustion_exits_3() {
    let o = sjp(&[
        "verify",
        "--system",
        &fixture("sys_b.sys"),
        "--plan",
        &fixture("plan_a.plan"),
        "--oracle",
        "--oracle-budget",
        "1",
    ]);
    assert_eq!((verdict(&o), o.code), ("BUDGET_EXCEEDED", EXIT_BUDGET));
}

#[test]
fn validate_reports_defects() {
    let dir = tempfile::tempdir().unwrap();
    let ok = sjp(&["validate", "--system", &fixture("sys_a.sys")]);
    assert_eq!((verdict(&ok), ok.code), ("VALID", EXIT_OK));
    let broken = std::fs::read_to_string(fixture("sys_a.sys"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("trans u1"))
        .collect::<Vec<_>>()
        .join("\n");
    let p = write(dir.path(), "broken.sys", &broken);
    let o = sjp(&["validate", "--system", p.to_str().unwrap()]);
    assert_eq!((verdict(&o), o.code), ("INVALID", EXIT_ERROR));
    assert!(o.output.contains("defect: "));
    // other commands refuse a defective model
    let o = sjp(&[
        "verify",
        "--system",
        p.to_str().unwrap(),
        "--plan",
        &fixture("plan_a.plan"),
    ]);
    assert_eq!((verdict(&o), o.code), ("ERROR", EXIT_ERROR));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.plan", "agent1: go go\nagent2: good\n");
    let o = sjp(&[
        "verify",
        "--system",
        &fixture("sys_a.sys"),
        "--plan",
        p.to_str().unwrap(),
    ]);
    assert_eq!((verdict(&o), o.code), ("ERROR", EXIT_ERROR));
    assert!(o.output.contains("length mismatch"));
    let o = sjp(&[
        "verify",
        "--system",
        "/nonexistent.sys",
        "--plan",
        &fixture("plan_a.plan"),
    ]);
    assert_eq!(o.code, EXIT_ERROR);
    let o = sjp(&["frobnicate"]);
    assert_eq!((verdict(&o), o.code), ("USAGE_ERROR", EXIT_ERROR));
}

#[test]
fn verify_k_and_synth_k() {
    let sys = fixture("sys_d.sys");
    let o = sjp(&["synth-k", "--system", &sys, "--k", "0"]);
    assert_eq!((verdict(&o), o.code), ("NOT_FOUND", EXIT_NEGATIVE));
    let o = sjp(&["synth-k", "--system", &sys, "--k", "1"]);
    assert_eq!((verdict(&o), o.code), ("FOUND", EXIT_OK));
    assert!(o.output.contains("agent1: go go\nagent2: good good\n"));
    let plan = fixture("plan_d.plan");
    let o = sjp(&["verify-k", "--system", &sys, "--plan", &plan, "--k", "1"]);
    assert_eq!(verdict(&o), "STABLE");
    let o = sjp(&["verify-k", "--system", &sys, "--plan", &plan, "--k", "0"]);
    assert_eq!(verdict(&o), "UNSTABLE");
    let o = sjp(&[
        "synth-k",
        "--system",
        &sys,
        "--k",
        "3",
        "--window-budget",
        "10",
    ]);
    assert_eq!((verdict(&o), o.code), ("BUDGET_EXCEEDED", EXIT_BUDGET));
}

#[test]
fn synth_exact_budget() {
    let sys = fixture("sys_a.sys");
    let o = sjp(&["synth-exact", "--system", &sys]);
    assert_eq!(verdict(&o), "NOT_FOUND");
    let o = sjp(&["synth-exact", "--system", &sys, "--node-budget", "5"]);
    assert_eq!((verdict(&o), o.code), ("BUDGET_EXCEEDED", EXIT_BUDGET));
    let o = sjp(&["synth-exact", "--system", &fixture("sys_c.sys")]);
    assert_eq!(verdict(&o), "FOUND");
}

#[test]
fn system_from_stdin() {
    let text = std::fs::read_to_string(fixture("sys_c.sys")).unwrap();
    let o = sjp_stdin(&["synth-exact"], &text);
    assert_eq!(verdict(&o), "FOUND");
    let o = sjp_stdin(&["synth-exact", "--system", "-"], &text);
    assert_eq!(verdict(&o), "FOUND");
}

#[test]
fn gen_3sat_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(
        dir.path(),
        "f.cnf",
        "c sample\np cnf 3 2\n1 -2 3 0\n-1 2 0\n",
    );
    let plan = dir.path().join("p.plan");
    let o = sjp(&[
        "gen-3sat",
        "--cnf",
        cnf.to_str().unwrap(),
        "--assignment",
        "1,2,-3",
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    assert_eq!((verdict(&o), o.code), ("GENERATED", EXIT_OK));
    let sys = write(dir.path(), "f.sys", &o.output);
    let v = sjp(&[
        "verify",
        "--system",
        sys.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(verdict(&v), "STABLE");
    let s = sjp(&["synth-exact", "--system", sys.to_str().unwrap()]);
    assert_eq!(verdict(&s), "FOUND");
}

#[test]
fn gen_grid_and_random() {
    let o = sjp(&[
        "gen-grid", "--rows", "1", "--cols", "2", "--start1", "0,0", "--start2", "0,1", "--goal1",
        "0,1", "--goal2", "0,0",
    ]);
    assert_eq!(verdict(&o), "GENERATED");
    let v = sjp_stdin(&["validate"], &o.output);
    assert_eq!(verdict(&v), "VALID");
    assert!(v.output.contains("configurations: 4"));
    let o = sjp(&[
        "gen-grid", "--rows", "1", "--cols", "2", "--start1", "0,5", "--start2", "0,1", "--goal1",
        "0,1", "--goal2", "0,0",
    ]);
    assert_eq!(o.code, EXIT_ERROR);

    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("r.plan");
    let a = sjp(&[
        "gen-random",
        "--seed",
        "9",
        "--plan-len",
        "4",
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    let b = sjp(&[
        "gen-random",
        "--seed",
        "9",
        "--plan-len",
        "4",
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    let strip = |o: &Outcome| {
        o.output
            .lines()
            .filter(|l| !l.starts_with("# time"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    let sys = write(dir.path(), "r.sys", &a.output);
    let o = sjp(&[
        "verify",
        "--system",
        sys.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--oracle",
    ]);
    assert!(o.code == EXIT_OK || o.code == EXIT_NEGATIVE, "{}", o.output);
    assert!(o.output.contains("oracle: agrees"));
}

#[test]
fn simulate_with_deviation() {
    let sys = fixture("sys_b.sys");
    let plan = fixture("plan_a.plan");
    let o = sjp(&["simulate", "--system", &sys, "--plan", &plan]);
    assert_eq!((verdict(&o), o.code), ("GOAL_REACHED", EXIT_OK));
    let o = sjp(&[
        "simulate",
        "--system",
        &sys,
        "--plan",
        &plan,
        "--deviate",
        "2@0:bad",
    ]);
    assert_eq!((verdict(&o), o.code), ("GOAL_MISSED", EXIT_NEGATIVE));
    assert!(o.output.contains("agent 1 detects at step 1"));
    let o = sjp(&[
        "simulate",
        "--system",
        &fixture("sys_a.sys"),
        "--plan",
        &plan,
        "--deviate",
        "2@0:bad",
    ]);
    assert!(o.output.contains("agent 1 detects nothing"));
    let o = sjp(&[
        "simulate",
        "--system",
        &sys,
        "--plan",
        &plan,
        "--deviate",
        "2@7:bad",
    ]);
    assert_eq!(o.code, EXIT_ERROR);
}

#[test]
fn monitor_streams() {
    let sys = fixture("sys_b.sys");
    let plan = fixture("plan_a.plan");
    let base = [
        "monitor",
        "--system",
        &sys,
        "--plan",
        &plan,
        "--detector",
        "1",
    ];
    let mut args = base.to_vec();
    args.extend(["--observations", "u0,u2"]);
    let o = sjp(&args);
    assert_eq!((verdict(&o), o.code), ("DETECTED", EXIT_NEGATIVE));
    assert!(o.output.contains("detected at step 1"));
    let o = sjp_stdin(&base, "u0\nu1\n");
    assert_eq!((verdict(&o), o.code), ("CONSISTENT", EXIT_OK));
    let mut args = base.to_vec();
    args.extend(["--observations", "u0,zz"]);
    assert_eq!(sjp(&args).code, EXIT_ERROR);
}

#[test]
fn verify_ii_with_conditional_plans() {
    let dir = tempfile::tempdir().unwrap();
    let turn = write(
        dir.path(),
        "turn.cplan",
        "root 0\nnode 0: action go; on ua -> 1; on ub -> 2\nnode 1: action left; on * -> 3\nnode 2: action right; on * -> 3\nnode 3: halt\n",
    );
    let straight = write(
        dir.path(),
        "straight.cplan",
        "root 0\nnode 0: action go; on * -> 1\nnode 1: action left; on * -> 2\nnode 2: halt\n",
    );
    let wait = write(
        dir.path(),
        "wait.cplan",
        "root 0\nnode 0: action wait; on * -> 1\nnode 1: action wait; on * -> 2\nnode 2: halt\n",
    );
    let sys = fixture("two_env.sys");
    let o = sjp(&[
        "verify-ii",
        "--system",
        &sys,
        "--cplan1",
        turn.to_str().unwrap(),
        "--cplan2",
        wait.to_str().unwrap(),
    ]);
    // agent 2 never leaves v0, so a wrong turn by agent 1 goes unnoticed
    assert_eq!((verdict(&o), o.code), ("UNSTABLE", EXIT_NEGATIVE));
    assert!(o.output.contains("deviator: agent 1"));
    let o = sjp(&[
        "verify-ii",
        "--system",
        &sys,
        "--cplan1",
        straight.to_str().unwrap(),
        "--cplan2",
        wait.to_str().unwrap(),
    ]);
    assert_eq!((verdict(&o), o.code), ("INEFFICIENT", EXIT_NEGATIVE));
    assert!(o.output.contains("initial: (u0,v0,e2)"));

    let dangling = write(
        dir.path(),
        "d.cplan",
        "root 0\nnode 0: action wait; on * -> 9\n",
    );
    let o = sjp(&[
        "verify-ii",
        "--system",
        &sys,
        "--cplan1",
        turn.to_str().unwrap(),
        "--cplan2",
        dangling.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.output.contains("undeclared node"));
}

#[test]
fn verify_ii_witness_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write(dir.path(), "w.plan", "agent1: go\nagent2: x\n");
    let o = sjp(&[
        "verify-ii",
        "--system",
        &fixture("witness.sys"),
        "--plan",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(verdict(&o), "UNSTABLE");
    assert!(o.output.contains("witness: (u0,v0,e1)"));
}

#[test]
fn verify_crash_fixtures() {
    let plan = fixture("plan_a.plan");
    let o = sjp(&[
        "verify-crash",
        "--system",
        &fixture("sys_b_crash_freeze.sys"),
        "--plan",
        &plan,
    ]);
    assert_eq!(verdict(&o), "UNSTABLE");
    let o = sjp(&[
        "verify-crash",
        "--system",
        &fixture("sys_b_crash_divert.sys"),
        "--plan",
        &plan,
    ]);
    assert_eq!(verdict(&o), "STABLE");
    let o = sjp(&[
        "verify-crash",
        "--system",
        &fixture("sys_b.sys"),
        "--plan",
        &plan,
    ]);
    assert_eq!(o.code, EXIT_ERROR);
    assert!(o.output.contains("null"));
}

#[test]
fn binary_pipeline_unsat_formula() {
    let bin = env!("CARGO_BIN_EXE_sjp");
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let gen = Command::new(bin)
        .args(["gen-3sat", "--cnf", cnf.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let mut synth = Command::new(bin)
        .arg("synth-exact")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    synth.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let out = synth.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_NEGATIVE));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("verdict: NOT_FOUND\n"));
}

#[test]
fn every_command_starts_with_verdict() {
    let sys = fixture("sys_b.sys");
    let plan = fixture("plan_a.plan");
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", "--system", &sys],
        vec!["verify", "--system", &sys, "--plan", &plan],
        vec!["verify-k", "--system", &sys, "--plan", &plan, "--k", "0"],
        vec!["synth-k", "--system", &sys, "--k", "0"],
        vec!["synth-exact", "--system", &sys],
        vec!["verify-ii", "--system", &sys, "--plan", &plan],
        vec!["verify-crash", "--system", &sys, "--plan", &plan],
        vec!["simulate", "--system", &sys, "--plan", &plan],
        vec!["gen-random", "--seed", "1"],
        vec!["--help"],
    ];
    for args in cases {
        for json in [false, true] {
            let mut a = args.clone();
            if json {
                a.insert(0, "--json");
            }
            let o = sjp(&a);
            assert!(o.output.starts_with("verdict: "), "{args:?}: {}", o.output);
        }
    }
}

#[test]
fn conflicting_transition_lines() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = std::fs::read_to_string(fixture("sys_a.sys")).unwrap();
    text.push_str("trans u0 v0 e go good -> u1 v0 e\n");
    let p = write(dir.path(), "conflict.sys", &text);
    let o = sjp(&["validate", "--system", p.to_str().unwrap()]);
    assert_eq!((verdict(&o), o.code), ("ERROR", EXIT_ERROR));
    assert!(o.output.contains("conflicting transition"), "{}", o.output);
}
