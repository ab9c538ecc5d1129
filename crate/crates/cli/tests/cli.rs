//! End-to-end tests against the built binary.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use ridn::cascade::cascade;
use ridn::exact::trace_to_assignment;
use ridn::ingest::parse_idn;
use ridn::model::EntityId;

const SAMPLE7: &str = "\
# idn-format 1
A: a1 a2 a3
B: b1 b2 b3 b4
a1 <- b2 + b4
a2 <- b1 b3
a3 <- b3 + b1 b4
b1 <- a1 + a2
b2 <- a1 a2 a3
b3 <- a1 + a2 a3
b4 <- a2
";

const TIMING_CSV: &str = "\
entity,t0,t1,t2,t3,t4
a1,0,0,1,1,1
a2,1,1,1,1,1
a3,0,0,0,0,1
b1,0,0,0,1,1
b2,0,1,1,1,1
b3,0,0,0,1,1
b4,0,1,1,1,1
";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ridn")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_tmp(name: &str, content: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn classify_prints_the_case() {
    let file = write_tmp("classify.idn", SAMPLE7);
    let out = run(&["classify", file.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "CaseIV\n");
}

#[test]
fn validate_exits_zero_only_when_clean() {
    let clean = write_tmp("validate_clean.idn", SAMPLE7);
    let out = run(&["validate", clean.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("ok:"));

    // duplicate minterm: parses, but validation must reject it
    let dup = write_tmp(
        "validate_dup.idn",
        "A: a1\nB: b1\na1 <- b1 + b1\n",
    );
    let out = run(&["validate", dup.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("duplicate minterm"));
}

#[test]
fn simulate_reproduces_the_timing_table() {
    let file = write_tmp("simulate.idn", SAMPLE7);
    let out = run(&["simulate", file.to_str().unwrap(), "--fail", "a2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), TIMING_CSV);

    let trace_path = tmp("simulate_trace.csv");
    let out = run(&[
        "simulate",
        file.to_str().unwrap(),
        "--fail",
        "a2",
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&trace_path).unwrap(), TIMING_CSV);
}

#[test]
fn simulate_rejects_unknown_entities() {
    let file = write_tmp("simulate_bad.idn", SAMPLE7);
    let out = run(&["simulate", file.to_str().unwrap(), "--fail", "a9"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown entity"));
}

#[test]
fn robustness_exact_reports_the_known_answer_deterministically() {
    let file = write_tmp("robust.idn", SAMPLE7);
    let args = ["robustness", file.to_str().unwrap(), "--rho", "1.0", "--method", "exact"];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    let text = stdout(&first);
    assert!(text.contains("K=0 (witness size 1)"), "{text}");
    assert!(text.contains("witness: a2"), "{text}");
    assert!(text.contains("final failed: 7 of 7"), "{text}");
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn robustness_case1_rejects_general_instances() {
    let file = write_tmp("robust_case1.idn", SAMPLE7);
    let out = run(&["robustness", file.to_str().unwrap(), "--rho", "0.5", "--method", "case1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Case I"));
}

#[test]
fn exhausted_exact_search_exits_two() {
    let file = write_tmp("isolated.idn", "A: a1 a2 a3 a4\nB: b1 b2 b3 b4\n");
    let out = run(&[
        "robustness",
        file.to_str().unwrap(),
        "--rho",
        "1.0",
        "--method",
        "exact",
        "--max-witness",
        "2",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exhausted"));
}

#[test]
fn sweep_emits_the_grid_as_csv() {
    let file = write_tmp("sweep.idn", SAMPLE7);
    let out = run(&["sweep", file.to_str().unwrap(), "--method", "heuristic"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 51);
    assert!(text.starts_with("rho,k\n0.02,0\n"));
    assert!(text.ends_with("1.00,0\n"));

    let out = run(&[
        "sweep",
        file.to_str().unwrap(),
        "--method",
        "exact",
        "--grid-step",
        "0.5",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "rho,k\n0.50,0\n1.00,0\n");
}

#[test]
fn export_and_check_ilp_round_trip() {
    let file = write_tmp("ilp.idn", SAMPLE7);
    let model_path = tmp("sample7.lp");
    let out = run(&[
        "export-ilp",
        file.to_str().unwrap(),
        "--rho",
        "1.0",
        "--out",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let lp = std::fs::read_to_string(&model_path).unwrap();
    assert!(lp.starts_with("Minimize\n"));
    assert!(lp.contains("threshold:"));

    // feasible assignment straight from the known cascade
    let idn = parse_idn(SAMPLE7).unwrap().idn;
    let initial: BTreeSet<EntityId> = [EntityId::a("a2")].into();
    let trace = cascade(&idn, &initial).unwrap();
    let asg = trace_to_assignment(&idn, &trace, idn.len()).unwrap();
    let asg_path = write_tmp("sample7_assignment.csv", &asg.to_csv());

    let out = run(&[
        "check-ilp",
        model_path.to_str().unwrap(),
        asg_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out), "feasible, objective 1\n");

    // the all-operational assignment misses the threshold
    let empty = cascade(&idn, &BTreeSet::new()).unwrap();
    let zero = trace_to_assignment(&idn, &empty, idn.len()).unwrap();
    let zero_path = write_tmp("zero_assignment.csv", &zero.to_csv());
    let out = run(&[
        "check-ilp",
        model_path.to_str().unwrap(),
        zero_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("infeasible"), "{text}");
    assert!(text.contains("threshold"), "{text}");
}

#[test]
fn generate_is_deterministic_and_valid() {
    let first = tmp("gen_first.idn");
    let second = tmp("gen_second.idn");
    for path in [&first, &second] {
        let out = run(&[
            "generate",
            "--case",
            "4",
            "--size-a",
            "29",
            "--size-b",
            "19",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read_to_string(&first).unwrap();
    let b = std::fs::read_to_string(&second).unwrap();
    assert_eq!(a, b);

    let out = run(&["validate", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn generated_case1_instances_solve_with_the_greedy() {
    let file = tmp("gen_case1.idn");
    let out = run(&[
        "generate", "--case", "1", "--size-a", "6", "--size-b", "6", "--seed", "7",
        "--out", file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["robustness", file.to_str().unwrap(), "--rho", "0.5", "--method", "case1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("K="));
}

#[test]
fn thread_cap_does_not_change_output() {
    let file = write_tmp("threads.idn", SAMPLE7);
    let base = run(&["sweep", file.to_str().unwrap(), "--method", "heuristic"]);
    for threads in ["1", "2", "0"] {
        let out = Command::new(bin())
            .args(["sweep", file.to_str().unwrap(), "--method", "heuristic"])
            .env("IDN_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.stdout, base.stdout, "IDN_THREADS={threads}");
    }
}

#[test]
fn every_subcommand_documents_itself() {
    for sub in [
        "validate", "classify", "simulate", "killsets", "robustness", "sweep",
        "export-ilp", "check-ilp", "generate",
    ] {
        let out = run(&[sub, "--help"]);
        assert_eq!(code(&out), 0, "{sub} --help");
        assert!(stdout(&out).contains("Usage"), "{sub} --help output");
    }
}

#[test]
fn bad_arguments_exit_one() {
    let out = run(&["classify"]);
    assert_eq!(code(&out), 1);
    let file = write_tmp("badrho.idn", SAMPLE7);
    let out = run(&["robustness", file.to_str().unwrap(), "--rho", "1.5", "--method", "exact"]);
    assert_eq!(code(&out), 1);
    let out = run(&["classify", "/nonexistent/nowhere.idn"]);
    assert_eq!(code(&out), 1);
}
