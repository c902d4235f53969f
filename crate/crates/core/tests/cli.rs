use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn envelope(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envelope"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn generate_then_compute_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = envelope(
        &[
            "gen", "--kind", "random", "-n", "16", "--seed", "1", "-o", "s.txt",
        ],
        d,
    );
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    let compute = envelope(
        &["compute", "--algo", "chan", "-i", "s.txt", "-o", "e.json"],
        d,
    );
    assert_eq!(code(&compute), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("e.json")).unwrap()).unwrap();
    let k = doc["vertices"].as_array().unwrap().len();
    assert_eq!(doc["edges"].as_array().unwrap().len(), k - 1);
    let verify = envelope(&["verify", "-i", "s.txt", "--samples", "200"], d);
    assert_eq!(
        code(&verify),
        0,
        "{}",
        String::from_utf8_lossy(&verify.stdout)
    );
}

#[test]
fn every_algorithm_writes_the_same_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&envelope(
            &["gen", "--kind", "disjoint-spans", "-n", "12", "-o", "s.txt"],
            d
        )),
        0
    );
    let mut docs = Vec::new();
    for algo in ["oracle", "dc", "chan"] {
        let out = format!("{algo}.json");
        assert_eq!(
            code(&envelope(
                &["compute", "--algo", algo, "-i", "s.txt", "-o", &out],
                d
            )),
            0
        );
        docs.push(fs::read_to_string(d.join(out)).unwrap());
    }
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[0], docs[2]);
}

#[test]
fn stats_and_svg_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("x.txt"), "0 0 1 1\n0 1 1 0\n").unwrap();
    let out = envelope(
        &[
            "compute", "--algo", "chan", "-i", "x.txt", "-o", "e.json", "--svg", "e.svg", "--stats",
        ],
        d,
    );
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("e.json")).unwrap()).unwrap();
    assert_eq!(doc["vertices"][1]["x"], "1/2");
    assert!(doc["counters"]["intersection_tests"].as_u64().is_some());
    assert_eq!(doc["run_report"]["final_k"], 3);
    assert!(doc["run_report"].get("wall_time").is_none());
    let svg = fs::read_to_string(d.join("e.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="segment""#).count(), 2);
    assert_eq!(svg.matches(r#"class="envelope""#).count(), 1);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("malformed.txt"), "0 0 1\n").unwrap();
    let out = envelope(&["compute", "--algo", "dc", "-i", "malformed.txt"], d);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    fs::write(d.join("vertical.txt"), "0 0 0 5\n").unwrap();
    assert_eq!(code(&envelope(&["compute", "-i", "vertical.txt"], d)), 2);
    fs::write(d.join("empty.txt"), "# nothing\n").unwrap();
    assert_eq!(code(&envelope(&["verify", "-i", "empty.txt"], d)), 2);
    assert_eq!(code(&envelope(&["compute", "-i", "missing.txt"], d)), 2);
    assert_eq!(
        code(&envelope(&["compute", "--algo", "fast", "-i", "x"], d)),
        2
    );
    assert_eq!(
        code(&envelope(&["gen", "--kind", "spiral", "-n", "4"], d)),
        2
    );
    assert_eq!(code(&envelope(&["frobnicate"], d)), 2);
    assert_eq!(code(&envelope(&["--help"], d)), 0);
}

#[test]
fn merge_chains_completes_and_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.txt"), "# an X\n0 0\n1 1\n\n0 1\n1 0\n").unwrap();
    assert_eq!(
        code(&envelope(
            &["merge-chains", "-i", "c.txt", "-o", "m.json"],
            d
        )),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(doc["counters"]["chains"], 2);

    assert_eq!(
        code(&envelope(
            &[
                "merge-chains",
                "-i",
                "c.txt",
                "-o",
                "a.json",
                "--abort",
                "2"
            ],
            d
        )),
        0
    );
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("a.json")).unwrap()).unwrap();
    assert_eq!(doc["aborted"], true);

    fs::write(d.join("bad.txt"), "0 0\n").unwrap();
    assert_eq!(code(&envelope(&["merge-chains", "-i", "bad.txt"], d)), 2);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = envelope(
        &[
            "bench",
            "--sizes",
            "8,16",
            "--kinds",
            "random,parabola",
            "--seed",
            "3",
            "-o",
            "b.csv",
        ],
        d,
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(d.join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("kind,n,k,"));
    let out = envelope(
        &["bench", "--sizes", "8", "--kinds", "random", "--timing"],
        d,
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("wall_time_ms"));
}

#[test]
fn thread_hint_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_envelope"))
            .args(["gen", "--kind", "small-k", "-n", "8"])
            .env("ENVELOPE_THREADS", threads)
            .current_dir(d)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("0")), 0);
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("many")), 2);
}
