use std::path::Path;
use std::process::{Command, Output};

use hamlab_core::{verify_hamilton_cycle, Digraph, HamiltonCertificate};

fn hamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamlab"))
        .args(args)
        .env("HAMLAB_DETERMINISTIC", "1")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn blowup(dir: &Path, v0: &str, seed: &str) -> (String, String, String) {
    let g = dir.join("g.json");
    let part = dir.join("part.json");
    let f = dir.join("f.json");
    let out = hamlab(&[
        "gen", "blowup", "--k", "8", "--m", "10", "--density", "0.8", "--v0", v0, "--seed", seed, "--output",
        p(&g), "--partition-out", p(&part), "--factor-out", p(&f),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (p(&g).to_string(), p(&part).to_string(), p(&f).to_string())
}

#[test]
fn solve_writes_a_verified_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (g, part, f) = blowup(dir.path(), "2", "5");
    let cert = dir.path().join("cert.json");
    let out = hamlab(&[
        "solve", "--input", &g, "--partition", &part, "--factor", &f, "--eta", "1/4", "--seed", "1", "--cert",
        p(&cert),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let graph = Digraph::parse_any(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let c: HamiltonCertificate = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c.order.len(), 82);
    assert!(verify_hamilton_cycle(&graph, &c).unwrap());
}

#[test]
fn solve_reports_wrong_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (g, part, f) = blowup(dir.path(), "0", "6");
    let out = hamlab(&["solve", "--input", &g, "--partition", &part, "--factor", &f, "--eta", "9/10"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrong pipeline"));
}

#[test]
fn solve_reports_stage_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (g, part, f) = blowup(dir.path(), "0", "7");
    // vertex 0 keeps a single out-neighbour in the next cluster along F
    let graph = Digraph::parse_any(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let weak = Digraph::new(
        graph.n(),
        graph.edges().filter(|&(u, v)| !(u == 0 && (11..20).contains(&v))),
    )
    .unwrap();
    let wg = dir.path().join("weak.json");
    std::fs::write(&wg, weak.to_json_string()).unwrap();
    let out = hamlab(&["solve", "--input", p(&wg), "--partition", &part, "--factor", &f]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reserve-ideals"));
}

#[test]
fn check_exit_codes_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    assert_eq!(code(&hamlab(&["gen", "extremal", "--n", "10", "--k", "4", "--output", p(&e)])), 0);
    let out = hamlab(&["check", "--condition", "nwc", "--input", p(&e)]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["first_violation"], 4);
    let out = hamlab(&["check", "--condition", "semi-exact", "--beta", "1/4", "--input", p(&e), "--format", "csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("condition,n,holds,first_violation\n"));
    let c = dir.path().join("c.txt");
    std::fs::write(&c, Digraph::complete(6).to_edge_list()).unwrap();
    assert_eq!(code(&hamlab(&["check", "--condition", "gh", "--input", p(&c)])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&hamlab(&["frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    hamlab(&["gen", "extremal", "--n", "8", "--k", "3", "--output", p(&e)]);
    assert_eq!(code(&hamlab(&["check", "--condition", "kot", "--beta", "x/y", "--input", p(&e)])), 2);
    assert_eq!(code(&hamlab(&["check", "--condition", "gh", "--input", "/nonexistent/g.json"])), 2);
    assert_eq!(code(&hamlab(&["gen", "random-condition", "--n", "12", "--beta", "1/2"])), 2);
}

#[test]
fn oracle_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    std::fs::write(&c, Digraph::cycle(7).to_json_string()).unwrap();
    let out = hamlab(&["oracle", "hamilton", "--input", p(&c)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["hamiltonian"], true);
    let out = hamlab(&["oracle", "coverage", "--input", p(&c)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coverage"], 7);
    let e = dir.path().join("e.json");
    hamlab(&["gen", "extremal", "--n", "10", "--k", "4", "--output", p(&e)]);
    assert_eq!(code(&hamlab(&["oracle", "hamilton", "--input", p(&e)])), 1);
}

#[test]
fn cover_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.json");
    let trace = dir.path().join("t.jsonl");
    assert_eq!(code(&hamlab(&["gen", "cover-instance", "--k", "60", "--d", "1/60", "--seed", "2", "--output", p(&r)])), 0);
    let out = hamlab(&["cover", "--input", p(&r), "--d", "1/60", "--trace", p(&trace)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let covered: usize = v["cycles"].as_array().unwrap().iter().map(|c| c.as_array().unwrap().len()).sum();
    assert_eq!(covered + v["waste"].as_array().unwrap().len(), 60);
    for line in std::fs::read_to_string(&trace).unwrap().lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(rec.get("case").is_some());
    }
}

#[test]
fn pairs_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let (g, part, _) = blowup(dir.path(), "0", "8");
    let out = hamlab(&[
        "pairs", "certify", "--input", &g, "--partition", &part, "--a", "0", "--b", "1", "--eps", "1/2", "--d", "2/5",
        "--mode", "exhaustive",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = hamlab(&[
        "pairs", "matching", "--input", &g, "--partition", &part, "--a", "0", "--b", "1", "--eps", "1/2",
        "--super-regular",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"], 10);
    let out = hamlab(&[
        "pairs", "ideal", "--input", &g, "--partition", &part, "--a", "0", "--b", "1", "--theta", "1/5", "--d", "2/5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = hamlab(&["pairs", "certify", "--input", &g, "--partition", &part, "--a", "0", "--b", "99", "--eps", "1/2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn experiment_is_deterministic() {
    let args = ["experiment", "--campaign", "semi-exact", "--count", "6", "--seed", "11", "--jobs", "3"];
    let strip = |out: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for r in v["records"].as_array_mut().unwrap() {
            r["wall_ms"] = serde_json::Value::Null;
        }
        v
    };
    let a = strip(hamlab(&args));
    let b = strip(hamlab(&args));
    assert_eq!(a, b);
    assert_eq!(a["aggregates"]["instances"], 6);
    let out = hamlab(&["experiment", "--campaign", "semi-exact", "--count", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# hamlab-experiment-csv v1\nindex,generator,parameters,seed,n,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn experiment_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"[{"generator":"extremal_chvatal","n":10,"k":4,"seed":0},
            {"generator":"blowup","k":8,"m":10,"density":0.8,"v0":1,"seed":2}]"#,
    )
    .unwrap();
    let out = hamlab(&["experiment", "--spec", p(&spec)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["solver"]["status"], "not_found");
    assert_eq!(v["records"][1]["solver"]["status"], "verified");
    assert_eq!(v["records"][1]["n"], 81);
}
