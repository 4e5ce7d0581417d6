use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chipfire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chipfire")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn chain_file(dir: &Path, g: &str) -> String {
    let out = chipfire(&["chain", "--g", g]);
    assert!(out.status.success());
    write(dir, "chain.txt", &stdout(&out))
}

#[test]
fn table_is_stable_across_runs_and_thread_counts() {
    let a = chipfire(&["table", "--d-min", "2", "--d-max", "10"]);
    let b = chipfire(&["--jobs", "1", "table", "--d-min", "2", "--d-max", "10"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let tsv = stdout(&chipfire(&["--format", "tsv", "table", "--d-min", "4", "--d-max", "4"]));
    assert_eq!(tsv, "d\tg\tlambda\tlambda_prime\tratio\n4\t6\t5\t3\t0.600000\n");
}

#[test]
fn table_rejects_bad_ranges() {
    assert_eq!(chipfire(&["table", "--d-min", "5", "--d-max", "3"]).status.code(), Some(2));
    assert_eq!(chipfire(&["table", "--d-min", "1"]).status.code(), Some(2));
}

#[test]
fn paths_listing() {
    let out = stdout(&chipfire(&["paths", "--g", "4"]));
    assert_eq!(out, "1,2,1,2,1\n1,2,3,2,1\n");
    let sym = stdout(&chipfire(&["paths", "--g", "6", "--symmetric"]));
    assert_eq!(sym.lines().count(), 3);
    assert_eq!(chipfire(&["paths", "--g", "3"]).status.code(), Some(2));
}

#[test]
fn rank_of_small_divisors_on_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let graph = chain_file(dir.path(), "2");
    let cases = [("chip v_0 1\n", "rank: 0"), ("", "rank: 0"), ("chip v_0 -1\n", "rank: -1")];
    for (divisor, expected) in cases {
        let d = write(dir.path(), "d.txt", divisor);
        let out = chipfire(&["rank", "--graph", &graph, "--divisor", &d]);
        assert_eq!(out.status.code(), Some(0), "{divisor}");
        assert!(stdout(&out).starts_with(expected), "{divisor}: {}", stdout(&out));
    }
}

#[test]
fn rank_of_doubled_pencil() {
    let dir = tempfile::tempdir().unwrap();
    let graph = chain_file(dir.path(), "2");
    let pencil = chipfire(&["pencil", "--path", "1,2,1", "--multiple", "2"]);
    let d = write(dir.path(), "d.txt", &stdout(&pencil));
    let out = stdout(&chipfire(&["rank", "--graph", &graph, "--divisor", &d]));
    assert_eq!(out, "rank: 2\nwitness: 2*v_0 + v_2\n");
}

#[test]
fn reduce_moves_chips_to_the_base_point() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", "# a circle\nvertex a\nvertex b\nedge e a b 1/1\nedge f a b 1/1\n");
    let d = write(dir.path(), "d.txt", "chip e 1/2 2\n");
    let out = chipfire(&["reduce", "--graph", &graph, "--divisor", &d, "--at", "a"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "chip a 1\nchip b 1\n");
    let out = chipfire(&["reduce", "--graph", &graph, "--divisor", &d, "--at", "e@1/2"]);
    assert_eq!(stdout(&out), "chip e 1/2 2\n");
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = chain_file(dir.path(), "2");
    let bad_graph = write(dir.path(), "bad.txt", "vertex a\nedge e a zz 1\n");
    let d = write(dir.path(), "d.txt", "chip v_0 1\n");
    let bad_d = write(dir.path(), "bad_d.txt", "chip nowhere 1\n");
    let off_grid = write(dir.path(), "off.txt", "chip I_1 1/3 1\n");
    for args in [
        vec!["rank", "--graph", &bad_graph, "--divisor", &d],
        vec!["rank", "--graph", &graph, "--divisor", &bad_d],
        vec!["rank", "--graph", &graph, "--divisor", "/nonexistent"],
        vec!["rank", "--graph", &graph, "--divisor", &off_grid, "--granularity", "1"],
        vec!["reduce", "--graph", &graph, "--divisor", &d, "--at", "nowhere"],
        vec!["verify", "prop2", "--g", "3"],
        vec!["verify", "prop2", "--g", "10"],
        vec!["pencil", "--path", "1,2,2,1"],
        vec!["frobnicate"],
    ] {
        let out = chipfire(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn off_grid_chips_pick_a_finer_default_granularity() {
    let dir = tempfile::tempdir().unwrap();
    let graph = chain_file(dir.path(), "2");
    let d = write(dir.path(), "d.txt", "chip I_1 1/3 1\n");
    let out = chipfire(&["rank", "--graph", &graph, "--divisor", &d]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("rank: 0"));
}

#[test]
fn verify_suites_succeed() {
    for args in [
        vec!["verify", "prop2", "--g", "4"],
        vec!["verify", "sigma", "--g", "6"],
        vec!["verify", "bijection", "--g", "4"],
        vec!["verify", "brill-noether", "--g", "2", "--r", "1", "--d", "1"],
        vec!["verify", "brill-noether", "--g", "4", "--r", "1", "--d", "3"],
    ] {
        let out = chipfire(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stdout(&out));
    }
    let tsv = stdout(&chipfire(&["--format", "tsv", "verify", "sigma", "--g", "2"]));
    assert!(tsv.starts_with("suite\tcase\tstatus\tdetail\nsigma\t1,2,1\tpass\t"), "{tsv}");
}

#[test]
fn exhausted_budget_is_a_failure() {
    let out = chipfire(&["verify", "prop2", "--g", "8", "--max-seconds", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("time-budget"));
}

#[test]
fn chain_warns_on_short_loops() {
    let out = chipfire(&["chain", "--g", "4", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(chipfire(&["chain", "--g", "4"]).stderr.is_empty());
}
