use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmalog(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmalog")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CNF: &str = "c two clauses\np cnf 3 2\n1 -2 3 0\n-1 2 3 0\n";

#[test]
fn reduce_emits_two_of_four_header() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("a.cnf"), CNF).unwrap();
    let o = qmalog(&["reduce", "a.cnf"], d.path());
    assert_eq!(o.status.code(), Some(0));
    // 3 + 4·2 + 1 variables, 3 clauses per source clause.
    assert!(stdout(&o).starts_with("p 2of4 12 6\n"));

    let o = qmalog(&["reduce", "a.cnf", "--bound-occurrences", "3"], d.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_honest_assignment_is_complete() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("one.24"), "p 2of4 4 1\n1 2 3 4 0\n").unwrap();
    fs::write(d.path().join("one.asg"), "v 1 2 -3 -4 0\n").unwrap();
    let o = qmalog(&["verify", "one.24", "--assignment", "one.asg", "--shots", "2000", "--seed", "7"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    let combined = &lines[2];
    assert_eq!(combined["test"], "combined");
    let a = 0.75 + 1.5f64.sqrt() / 24.0;
    assert!((combined["exact_prob"].as_f64().unwrap() - a).abs() < 1e-12);
    assert_eq!(lines[1]["exact_prob"].as_f64().unwrap(), 1.0);
    assert!(combined["sampled_freq"].as_f64().is_some());
}

#[test]
fn verify_rejects_unsatisfying_assignment() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("one.24"), "p 2of4 4 1\n1 2 3 4 0\n").unwrap();
    fs::write(d.path().join("bad.asg"), "v 1 2 3 -4 0\n").unwrap();
    let o = qmalog(&["verify", "one.24", "--assignment", "bad.asg"], d.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn attack_witness_round_trips_through_verify() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("a.cnf"), CNF).unwrap();
    assert_eq!(qmalog(&["reduce", "a.cnf", "--out", "a.24"], d.path()).status.code(), Some(0));
    let o = qmalog(&["attack", "a.24", "--starts", "4", "--iters", "200", "--save-witness", "w"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let res: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let best = res["best_value"].as_f64().unwrap();
    assert!(best <= res["completeness"].as_f64().unwrap() + 1e-9);

    let o = qmalog(&["verify", "a.24", "--phi", "w.phi", "--psi", "w.psi"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let last: serde_json::Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert!((last["exact_prob"].as_f64().unwrap() - best).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(qmalog(&["frobnicate"], d.path()).status.code(), Some(1));
    assert_eq!(qmalog(&["attack"], d.path()).status.code(), Some(1));
    assert_eq!(qmalog(&["--help"], d.path()).status.code(), Some(0));
    fs::write(d.path().join("x.24"), "p 2of4 4 1\n1 2 3 4 0\n").unwrap();
    assert_eq!(qmalog(&["attack", "x.24", "--starts", "0"], d.path()).status.code(), Some(1));
}

#[test]
fn missing_input_exits_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(qmalog(&["reduce", "nope.cnf"], d.path()).status.code(), Some(2));
    fs::create_dir(d.path().join("empty")).unwrap();
    assert_eq!(qmalog(&["gapscan", "empty"], d.path()).status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = qmalog(&["selftest"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("one.24"), "p 2of4 4 1\n1 2 3 4 0\n").unwrap();
    fs::write(d.path().join("one.asg"), "v 1 2 -3 -4 0\n").unwrap();
    fs::write(d.path().join("run.conf"), "# defaults\nshots = 100\nseed = 5\n").unwrap();
    let o = qmalog(&["--config", "run.conf", "verify", "one.24", "--assignment", "one.asg"], d.path());
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["shots"], 100);
    assert_eq!(first["seed"], 5);
    let o = qmalog(
        &["--config", "run.conf", "verify", "one.24", "--assignment", "one.asg", "--seed", "9"],
        d.path(),
    );
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["seed"], 9);

    fs::write(d.path().join("bad.conf"), "shots = many\n").unwrap();
    let o = qmalog(&["--config", "bad.conf", "verify", "one.24", "--assignment", "one.asg"], d.path());
    assert_eq!(o.status.code(), Some(1));
}

fn strip_timings(v: &mut serde_json::Value) {
    v.as_object_mut().unwrap().remove("timings");
}

#[test]
fn gapscan_is_reproducible_and_reports_corpus_errors() {
    let d = tempfile::tempdir().unwrap();
    let corpus = d.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("sat.cnf"), CNF).unwrap();
    fs::write(corpus.join("unsat.cnf"), "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
    let args = ["gapscan", "corpus", "--epsilon", "1", "--starts", "6", "--iters", "300", "--seed", "11"];

    let mut outs = Vec::new();
    for run in ["r1", "r2"] {
        let mut a = args.to_vec();
        a.extend(["--out", run]);
        let o = qmalog(&a, d.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(stdout(&o));
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0].lines().count(), 3);
    for id in ["sat", "unsat"] {
        let read = |run: &str| -> serde_json::Value {
            let mut v: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(d.path().join(run).join(format!("{id}.json"))).unwrap())
                    .unwrap();
            strip_timings(&mut v);
            v
        };
        assert_eq!(read("r1"), read("r2"));
    }
    let unsat: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("r1/unsat.json")).unwrap()).unwrap();
    assert_eq!(unsat["satisfiable"], false);
    assert!(unsat["gap"].as_f64().unwrap() > 0.0);

    fs::write(corpus.join("broken.cnf"), "p cnf 2 1\n1 5 0\n").unwrap();
    let mut a = args.to_vec();
    a.extend(["--out", "r3"]);
    let o = qmalog(&a, d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().count(), 3);
    let failures: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("r3/failures.json")).unwrap()).unwrap();
    assert_eq!(failures[0]["instance_id"], "broken");
}
