use std::io::Write;
use std::process::{Command, Output, Stdio};

use guesslab::constructions::clique_solution;
use guesslab::guessing::{guessing_number, h_loops, strict_guessing_number};
use guesslab::io::{emit_dot, emit_json, parse_digraph};
use guesslab::linear::linear_guessing;
use guesslab::{named, Family, Limits, LinearMode, UnicastInstance};
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_guesslab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn guesslab");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn graph(family: Family) -> guesslab::Digraph {
    named(family).unwrap().graph
}

#[test]
fn documented_examples() {
    let gk = run(&["construct", "gk", "3"], "");
    assert_eq!(gk.status.code(), Some(0));
    let o = run(&["solvable", "-", "--prove-nonlinear"], &stdout(&gk));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not-linearly-solvable"));

    let k3 = stdout(&run(&["construct", "clique", "3"], ""));
    let o = run(&["guess", "-", "-q", "2"], &k3);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max|Fix| = 4\nvalue = 2\n"));

    assert_eq!(
        run(&["guess", "missing.dot", "-q", "2"], "").status.code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    let c5 = emit_dot(&graph(Family::Cycle { n: 5 }));
    assert_eq!(
        run(&["guess", "-", "-q", "2"], "digraph { 0 -> ; }")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["guess", "-", "-q", "1"], &c5).status.code(), Some(2));
    assert_eq!(run(&["bogus"], "").status.code(), Some(2));
    assert_eq!(run(&["construct", "clique"], "").status.code(), Some(2));
    assert_eq!(run(&["fix", "-"], &c5).status.code(), Some(2));
    let k20 = emit_dot(&graph(Family::Complete { n: 20 }));
    assert_eq!(run(&["guess", "-", "-q", "2"], &k20).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_guesslab"))
        .args(["hloops", "-", "-q", "2"])
        .env("GUESSLAB_MAX_STATES", "many")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(
        run(&["compat", "-", "--set", "0,2", "--mode", "weak"], &c5)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["compat", "-", "--set", "0,1"], &c5).status.code(),
        Some(2)
    );
    let fig = emit_dot(&graph(Family::SlsExample));
    assert_eq!(
        run(&["compat", "-", "--set", "0,1", "--mode", "strong"], &fig)
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["solvable", "-", "-q", "2"], &c5).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["solvable", "-", "--routing"], &c5).status.code(),
        Some(1)
    );
    let k4 = emit_dot(&graph(Family::Complete { n: 4 }));
    assert_eq!(
        run(&["solvable", "-", "-q", "2"], &k4).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["solvable", "-", "--routing"], &k4).status.code(),
        Some(1)
    );
    assert_eq!(run(&["solvable", "-"], &k4).status.code(), Some(2));
}

#[test]
fn warnings_go_to_stderr() {
    let o = run(
        &["guess", "-", "-q", "2"],
        "digraph { 0 -> 1; 1 -> 0; 0 -> 1; }",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(stdout(&o).starts_with("max|Fix| = 2\n"));
}

#[test]
fn reports_match_library() {
    let lim = Limits::default();
    let cases = [
        (graph(Family::Cycle { n: 5 }), 2),
        (graph(Family::Complete { n: 3 }), 3),
        (graph(Family::Star { n: 4 }), 2),
        (graph(Family::BooleanExample), 2),
    ];
    for (g, q) in cases {
        let text = emit_json(&g);
        let qs = q.to_string();
        let v = json_of(&run(&["--json", "guess", "-", "-q", &qs], &text));
        let r = guessing_number(&g, q, &lim).unwrap();
        assert_eq!(v["max_fixed"], r.max_fixed);
        assert_eq!(v["witness"], serde_json::to_value(&r.witness).unwrap());

        let o = run(&["--json", "guess", "-", "-q", &qs, "--strict"], &text);
        match strict_guessing_number(&g, q, &lim) {
            Ok(r) => assert_eq!(json_of(&o)["max_fixed"], r.max_fixed),
            Err(e) => {
                assert!(e.is_resource_bound());
                assert_eq!(o.status.code(), Some(3));
            }
        }

        let v = json_of(&run(&["--json", "hloops", "-", "-q", &qs], &text));
        assert_eq!(v["max_fixed"], h_loops(&g, q, &lim).unwrap().max_fixed);

        for (flag, mode) in [(None, LinearMode::GL), (Some("--strict"), LinearMode::HL)] {
            let mut args = vec!["--json", "linear", "-", "-q", &qs];
            args.extend(flag);
            let v = json_of(&run(&args, &text));
            let r = linear_guessing(&g, q, mode, false, &lim).unwrap();
            assert_eq!(v, serde_json::to_value(&r).unwrap());
        }
    }
}

#[test]
fn reduce_and_fix() {
    let fig = emit_dot(&graph(Family::BooleanExample));
    let o = run(&["reduce", "-", "--vertices", "3,2"], &fig);
    assert_eq!(o.status.code(), Some(0));
    let reduced = parse_digraph(&stdout(&o)).unwrap().value;
    assert_eq!(
        reduced,
        graph(Family::BooleanExample)
            .reduce_set(&[2, 3])
            .unwrap()
            .graph
    );
    assert_eq!(
        run(&["reduce", "-", "--vertices", "0,1"], &fig)
            .status
            .code(),
        Some(2)
    );

    let f = r#"{"n":2,"q":2,"support":[[1],[0]],"tables":[[1,0],[1,0]]}"#;
    let o = run(&["--json", "fix", "-"], f);
    assert_eq!(
        json_of(&o)["fixed_points"],
        serde_json::json!([[0, 1], [1, 0]])
    );
    let o = run(&["reduce", "-", "--vertices", "1"], f);
    let h = stdout(&o);
    assert!(h.contains("\"n\":1"), "{h}");
    assert_eq!(stdout(&run(&["fix", "-"], &h)), "|Fix| = 2\n0\n1\n");

    let lin = stdout(&run(&["construct", "clique-solution", "3", "2"], ""));
    assert_eq!(
        lin,
        guesslab::io::linear_to_json(&clique_solution(3, 2).unwrap())
    );
    assert!(stdout(&run(&["fix", "-"], &lin)).starts_with("|Fix| = 4\n"));
    let reduced = stdout(&run(&["reduce", "-", "--vertices", "0"], &lin));
    assert!(stdout(&run(&["fix", "-"], &reduced)).starts_with("|Fix| = 4\n"));
}

#[test]
fn construct_and_convert() {
    let o = run(&["--json", "construct", "kab", "2", "2"], "");
    let g = parse_digraph(&stdout(&o)).unwrap().value;
    assert_eq!(g, graph(Family::CompleteBipartite { a: 2, b: 2 }));
    let v = json_of(&run(&["construct", "kkk", "2"], ""));
    assert_eq!(v["q"], 13);
    assert!(stdout(&run(
        &["fix", "-"],
        &stdout(&run(&["construct", "k22", "3"], ""))
    ))
    .starts_with("|Fix| = 9\n"));

    let dir = std::env::temp_dir().join(format!("guesslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c5.dot");
    let o = run(
        &["construct", "cycle", "5", "-o", path.to_str().unwrap()],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let o = run(&["guess", path.to_str().unwrap(), "-q", "2"], "");
    assert!(stdout(&o).starts_with("max|Fix| = 5\n"));
    std::fs::remove_dir_all(&dir).unwrap();

    let inst = guesslab::io::instance_to_json(&UnicastInstance::butterfly(2).unwrap());
    let k3 = parse_digraph(&stdout(&run(&["convert", "-"], &inst)))
        .unwrap()
        .value;
    assert_eq!(k3, graph(Family::Complete { n: 3 }));
    assert_eq!(run(&["solvable", "-"], &inst).status.code(), Some(0));
    assert_eq!(
        run(&["convert", "-"], &emit_dot(&k3)).status.code(),
        Some(2)
    );
}

#[test]
fn round_trip_through_binary() {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..25 {
        let n = r.gen_range(1..=8);
        let mut g = guesslab::Digraph::empty(n).unwrap();
        for u in 0..n {
            for v in 0..n {
                if r.gen_bool(0.3) {
                    g.add_arc(u, v).unwrap();
                }
            }
        }
        let dot = emit_dot(&g);
        assert_eq!(stdout(&run(&["reduce", "-", "--vertices", ""], &dot)), dot);
    }
}
