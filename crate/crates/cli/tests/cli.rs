use std::fs;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

fn embedfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embedfair"))
        .args(args)
        .env_remove("EMBEDFAIR_ARTIFACTS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Nodes 1-3 labeled w, 4-5 labeled b, with a 1-D embedding whose top-1
/// recommendations are 1→2, 2→4, 3→4, 4→2, 5→2.
fn five_node_fixture(dir: &Path) {
    fs::write(dir.join("g.txt"), "1 3\n2 3\n4 5\n").unwrap();
    fs::write(dir.join("y.emb"), "1 1\n2 3\n3 1\n4 2\n5 1\n").unwrap();
    fs::write(dir.join("color.csv"), "id,color\n1,w\n2,w\n3,w\n4,b\n5,b\n").unwrap();
}

#[test]
fn summarize_outputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("k3.txt"), "a b\nb c\nc a\n").unwrap();
    let o = embedfair(&["summarize", p(&dir.path().join("k3.txt"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["density"], 1.0);
    assert_eq!(v["triangle_count"], 1);
    assert_eq!(v["degree_histogram"].as_array().unwrap().len(), 20);

    let o = embedfair(&[
        "summarize",
        p(&dir.path().join("k3.txt")),
        "--bins",
        "5",
        "--format",
        "table",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = text.lines().skip_while(|l| !l.starts_with("degrees")).skip(1).count();
    assert_eq!(rows, 5, "{text}");
    assert!(text.contains("density                 1.000000"));

    let o = embedfair(&["summarize", p(&dir.path().join("missing.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.txt"));

    fs::write(dir.path().join("bad.txt"), "a b c\n").unwrap();
    let o = embedfair(&["summarize", p(&dir.path().join("bad.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.txt:1:"), "{}", stderr(&o));
}

#[test]
fn group_score_prints_the_bias() {
    let dir = tempfile::tempdir().unwrap();
    five_node_fixture(dir.path());
    let (g, y, a) = (
        dir.path().join("g.txt"),
        dir.path().join("y.emb"),
        dir.path().join("color.csv"),
    );
    let args = [
        "score",
        p(&g),
        p(&y),
        "--notion",
        "group",
        "--k",
        "1",
        "--attrs-file",
        p(&a),
        "--value",
        "b",
    ];

    let o = embedfair(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["attribute"], "color");
    assert_eq!(v["attribute_bias"], 0.1);
    let scores: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["score"].as_f64().unwrap())
        .collect();
    assert_eq!(scores, [0.5, -0.5, -0.5, 0.5, 0.5]);

    let mut csv = args.to_vec();
    csv.extend(["--format", "csv"]);
    let o = embedfair(&csv);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "id,score\n1,0.5\n2,-0.5\n3,-0.5\n4,0.5\n5,0.5\n");
    assert!(stderr(&o).lines().any(|l| l == "attribute_bias 0.1"), "{}", stderr(&o));

    let o = embedfair(&["score", p(&g), p(&y), "--notion", "group", "--k", "1", "--value", "b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--attrs-file"));
    let o = embedfair(&[
        "score",
        p(&g),
        p(&y),
        "--notion",
        "group",
        "--k",
        "1",
        "--attrs-file",
        p(&a),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = embedfair(&[
        "score",
        p(&g),
        p(&y),
        "--notion",
        "group",
        "--k",
        "1",
        "--attrs-file",
        p(&a),
        "--value",
        "q",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn individual_score_formats() {
    let dir = tempfile::tempdir().unwrap();
    five_node_fixture(dir.path());
    fs::write(dir.path().join("same.emb"), "1 1 1\n2 1 1\n3 1 1\n4 1 1\n5 1 1\n").unwrap();
    let g = dir.path().join("g.txt");
    let o = embedfair(&[
        "score",
        p(&g),
        p(&dir.path().join("same.emb")),
        "--notion",
        "individual",
        "--k",
        "2",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,raw,normalized"));
    assert!(lines.all(|l| l.ends_with(",0,0")), "{text}");

    let o = embedfair(&[
        "score",
        p(&g),
        p(&dir.path().join("y.emb")),
        "--notion",
        "individual",
        "--k",
        "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // Node 3 sits at distance 2 from node 2 (y=3) and 0 from node 1.
    assert_eq!(v["rows"][2]["raw"], 4.0);

    let o = embedfair(&[
        "score",
        p(&g),
        p(&dir.path().join("absent.emb")),
        "--notion",
        "individual",
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(dir.path().join("short.emb"), "1 1\n2 1\n").unwrap();
    let o = embedfair(&[
        "score",
        p(&g),
        p(&dir.path().join("short.emb")),
        "--notion",
        "individual",
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("embedding"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(embedfair(&[]).status.code(), Some(1));
    assert_eq!(embedfair(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        embedfair(&["score", "g", "y", "--notion", "individual", "--k", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        embedfair(&["score", "g", "y", "--notion", "other", "--k", "1"])
            .status
            .code(),
        Some(1)
    );
    let help = embedfair(&["--help"]);
    assert!(help.status.success());
    assert!(stdout(&help).contains("precompute"));
}

fn manifest(dir: &Path, body: &str) -> String {
    let path = dir.join("manifest.json");
    fs::write(&path, body).unwrap();
    p(&path).to_string()
}

#[test]
fn precompute_and_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    five_node_fixture(dir.path());
    let out = dir.path().join("out");
    let m = manifest(
        dir.path(),
        r#"{"id": "five", "graph": "g.txt", "embeddings": [{"name": "y", "path": "y.emb"}],
            "attributes": [{"name": "color", "path": "color.csv"}], "group_k": [1]}"#,
    );
    let o = embedfair(&["precompute", &m, "--out-dir", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let artifact = out.join("five.json");
    assert_eq!(stdout(&o).trim(), p(&artifact));
    assert!(artifact.is_file());

    let o = embedfair(&[
        "diagnose",
        p(&artifact),
        "2",
        "--embedding",
        "y",
        "--notion",
        "group",
        "--k",
        "1",
        "--attr",
        "color",
        "--value",
        "b",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ids: Vec<&str> = v["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["2", "4"]);
    assert_eq!(v["nodes"][1]["annotation"]["label"], "b");
    assert_eq!(v["focal_score"], -0.5);

    let o = embedfair(&[
        "diagnose",
        p(&artifact),
        "9",
        "--embedding",
        "y",
        "--notion",
        "individual",
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let corrupt = manifest(dir.path(), r#"{"id": "broken", "graph": "g.txt", "embeddings": ["#);
    let o = embedfair(&["precompute", &corrupt, "--out-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let files: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, ["five.json"]);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut text = String::new();
    s.read_to_string(&mut text).ok()?;
    Some(text)
}

#[test]
fn serve_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let port = free_port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_embedfair"))
        .args(["serve", "--listen", &format!("127.0.0.1:{port}")])
        .env("EMBEDFAIR_ARTIFACTS", dir.path())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let start = Instant::now();
    let response = loop {
        if let Some(r) = http_get(port, "/datasets") {
            break r;
        }
        assert!(start.elapsed() < Duration::from_secs(20), "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.ends_with("\r\n\r\n[]"), "{response}");

    let o = embedfair(&["serve", "--artifacts", p(&dir.path().join("nope"))]);
    assert_eq!(o.status.code(), Some(1));
}
