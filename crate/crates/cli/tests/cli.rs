use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pregel-channels")).args(args).output().unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pagerank_scatter_reports_both_channels() {
    let dir = tempfile::tempdir().unwrap();
    let metrics = dir.path().join("m.json");
    let dump = dir.path().join("ranks.txt");
    let out = cli(&[
        "--algo", "pagerank", "--variant", "scatter", "--gen", "rmat:scale=10,ef=16,seed=1",
        "--workers", "4", "--iters", "30", "--metrics", metrics.to_str().unwrap(),
        "--output", dump.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&metrics);
    let mut keys: Vec<&str> = m.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["algorithm", "channels", "exchange_rounds", "result_digest", "supersteps", "variant", "wall_ms", "workers"]
    );
    assert_eq!(m["supersteps"], 31);
    assert_eq!(m["workers"], 4);
    let names: Vec<&str> = m["channels"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["scatter", "aggregator"]);
    for c in m["channels"].as_array().unwrap() {
        assert!(c["payload_bytes"].as_u64().unwrap() > 0);
        for k in ["messages", "framing_bytes", "rounds"] {
            assert!(c[k].is_u64(), "{k}");
        }
    }
    let text = std::fs::read_to_string(&dump).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1024);
    let total: f64 = lines.iter().map(|l| l.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn variants_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let digest = |variant: &str| {
        let m = dir.path().join(format!("{variant}.json"));
        let out = cli(&[
            "--algo", "sv", "--variant", variant, "--gen", "gnp:n=300,p=0.008,seed=4",
            "--workers", "3", "--metrics", m.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        read_json(&m)["result_digest"].as_str().unwrap().to_string()
    };
    let base = digest("basic");
    for v in ["reqresp", "scatter", "both"] {
        assert_eq!(digest(v), base, "{v}");
    }
}

#[test]
fn edge_list_input_with_partition_map() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    std::fs::write(&edges, "# triangle plus a pair\n0 1\n1 2\n2 0\n3 4\n").unwrap();
    let map = dir.path().join("p.txt");
    std::fs::write(&map, "0 0\n1 0\n2 1\n3 1\n4 0\n").unwrap();
    let metrics = dir.path().join("m.json");
    let out = cli(&[
        "--algo", "sv", "--variant", "both", "--input", edges.to_str().unwrap(), "--workers", "2",
        "--partition", map.to_str().unwrap(), "--metrics", metrics.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0 0\n1 0\n2 0\n3 3\n4 3\n");
    assert!(read_json(&metrics)["supersteps"].as_u64().unwrap() > 0);
}

#[test]
fn msf_dump_lists_forest_edges() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    std::fs::write(&edges, "0 1 1\n1 2 2\n2 0 3\n").unwrap();
    let out = cli(&["--algo", "msf", "--input", edges.to_str().unwrap(), "--workers", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "# msf edges 2 total_weight 3\n# edge 0 1 1\n# edge 1 2 2\n0 0\n1 0\n2 0\n");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["--algo", "pagerank", "--variant", "bogus", "--gen", "chain:n=4"][..],
        &["--algo", "bogus", "--gen", "chain:n=4"][..],
        &["--algo", "pagerank"][..],
        &["--algo", "wcc", "--gen", "chain:n=4", "--workers", "0"][..],
    ] {
        let out = cli(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("p.txt");
    std::fs::write(&map, "0 0\n1 5\n").unwrap();
    let cycle = dir.path().join("cycle.txt");
    std::fs::write(&cycle, "0 1\n1 2\n2 0\n").unwrap();
    for args in [
        vec!["--algo", "wcc", "--input", "/nonexistent/graph.txt"],
        vec!["--algo", "wcc", "--gen", "rmat:scale=0"],
        vec!["--algo", "wcc", "--gen", "chain:n=2", "--workers", "2", "--partition", map.to_str().unwrap()],
        vec!["--algo", "pj", "--input", cycle.to_str().unwrap(), "--workers", "2"],
    ] {
        let out = cli(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}
