use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn seqint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn instance_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

#[test]
fn example1_strategic_run_ends_at_eight() {
    let path = instance_file("example1.txt");
    let out = stdout(&seqint(&[
        "run",
        "--instance",
        path.to_str().unwrap(),
        "--evader",
        "strategic",
        "--interdictor",
        "semi-oracle",
        "--T",
        "2",
        "--k",
        "2",
    ]));
    assert_eq!(out.lines().last(), Some("L=8"));
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn example1_greedy_run_pays_m_in_second_epoch() {
    let out = stdout(&seqint(&["run", "--instance", "example1", "--T", "2", "--k", "2"]));
    assert_eq!(out, "t=1 I={} P={0,1,2} loss=3\nt=2 I={0,2} P={4} loss=6\nL=9\n");
}

#[test]
fn shipped_instance_files_match_presets() {
    for name in ["example1", "example2", "example3", "example4"] {
        let generated = stdout(&seqint(&["gen", "--preset", name]));
        let shipped = fs::read_to_string(instance_file(&format!("{name}.txt"))).unwrap();
        assert_eq!(generated, shipped, "{name}");
    }
}

#[test]
fn separable_instance_is_rejected_unless_allowed() {
    let out = seqint(&["run", "--instance", "example4", "--T", "2", "--k", "2"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");

    let out = stdout(&seqint(&[
        "run",
        "--instance",
        "example4",
        "--T",
        "2",
        "--k",
        "2",
        "--allow-separable",
    ]));
    assert_eq!(out.lines().last(), Some("L=10"));
}

#[test]
fn prop1_check_passes_all_instances() {
    let out = stdout(&seqint(&["check", "--suite", "prop1", "--count", "100", "--seed", "7"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 101);
    assert!(lines[..100].iter().all(|l| l.ends_with("ok=true")));
    assert_eq!(lines[100], "suite=prop1 passed=100/100");
}

#[test]
fn unknown_suite_fails() {
    let out = seqint(&["check", "--suite", "nope"]);
    assert!(!out.status.success());
}

#[test]
fn minimal_experiment_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "experiment",
        "--class",
        "uniform",
        "--k",
        "2",
        "--T",
        "5",
        "--Q",
        "1",
        "--reps",
        "1",
        "--jobs",
        "1",
        "--no-timing",
        "--out",
        csv.to_str().unwrap(),
    ];
    stdout(&seqint(&args));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "class,k,T,feedback,chi_lt_mean,chi_lt_std,chi_eq_mean,chi_eq_std,chi_gt_mean,chi_gt_std,plan_ms_mean"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("uniform,2,5,perfect,"));

    stdout(&seqint(&args));
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn generated_instance_round_trips_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    stdout(&seqint(&[
        "gen",
        "--class",
        "layered",
        "--seed",
        "3",
        "--k",
        "2",
        "--out",
        file.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("# class=layered seed="));
    let log = stdout(&seqint(&[
        "run",
        "--instance",
        file.to_str().unwrap(),
        "--evader",
        "strategic",
        "--interdictor",
        "consistent",
        "--T",
        "4",
        "--k",
        "2",
    ]));
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 5);
    let total: u64 = lines[..4]
        .iter()
        .map(|l| l.rsplit("loss=").next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(lines[4], format!("L={total}"));
}

#[test]
fn gen_count_writes_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("set");
    stdout(&seqint(&["gen", "--class", "ba", "--count", "3", "--out", out.to_str().unwrap()]));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["ba-000.txt", "ba-001.txt", "ba-002.txt"]);
}

#[test]
fn reduce_verifies_example_formula() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.txt");
    let out = seqint(&["reduce", "--formula", "1 2 3; -1 -2 3", "--verify", "--out", file.to_str().unwrap()]);
    stdout(&out);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("agrees=true"), "{err}");
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.contains("# k 6"));
    assert!(text.lines().any(|l| l.starts_with("a0 ")));
}

#[test]
fn bad_list_is_a_one_line_error() {
    let out = seqint(&["experiment", "--k", "5-1", "--Q", "1", "--reps", "1"]);
    assert!(!out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}
