#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use moncat_cli::commands::{check, extract, render};

fn fixture_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name].iter().collect()
}

fn moncat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moncat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn goal_file(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("g.goal");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_exit_codes() {
    let g = fixture_path("interchange.goal");
    let o = moncat(&["check", "--goal", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "conclusion goal: Equal");

    let g = fixture_path("empty_target.goal");
    let o = moncat(&["check", "--goal", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("Unknown"));

    let g = fixture_path("mna.goal");
    let o = moncat(&["check", "--goal", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("hypothesis nx: NotEqual"));

    let dir = tempfile::tempdir().unwrap();
    let o = moncat(&["check", "--goal", &goal_file(&dir, "f : A ~> B\n===\nf ≡ f")]);
    assert_eq!(o.status.code(), Some(0));
    let o = moncat(&["check", "--goal", &goal_file(&dir, "f : A ~> B\n===\nf ≡ g")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: goal:"));
    let o = moncat(&["check", "--goal", "/nonexistent/goal"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn replay_reports_the_failing_step() {
    let g = fixture_path("mna.goal");
    let g = g.to_str().unwrap();
    for script in ["mna_stepwise.v", "mna_parallel.v", "mna_stepwise.proof"] {
        let o = moncat(&["replay", "--goal", g, "--script", fixture_path(script).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{script}: {}", stdout(&o));
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.v");
    std::fs::write(&bad, common::fixture("mna_stepwise.v").replace("[n·M ; x]", "[n·N ; x]")).unwrap();
    let o = moncat(&["replay", "--goal", g, "--script", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("step 1 (line 5) failed"), "{}", stdout(&o));

    // a rocq script read as the plain format does not parse
    let o = moncat(&["replay", "--goal", g, "--script", bad.to_str().unwrap(), "--format", "neutral"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn render_writes_every_side_deterministically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = common::fixture("mna.goal");
    let fa = render(&text, a.path()).unwrap();
    let fb = render(&text, b.path()).unwrap();
    assert_eq!(fa.len(), 10);
    let names: Vec<_> = fa.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names[0], "mA_lhs.svg");
    assert_eq!(names[9], "conclusion_rhs.svg");
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn identity_renders_as_a_straight_wire() {
    let e = extract("f : A ~> A\n===\nA ≡ A", None).unwrap();
    assert_eq!(e.lhs.to_string(), "A");
    let d = &e.diagrams[0];
    assert!(d.nodes.is_empty());
    let route = &d.edges[0].route;
    assert!(route.iter().all(|p| (p.x - route[0].x).abs() < 1e-9));
    let dir = tempfile::tempdir().unwrap();
    let files = render("f : A ~> A\n===\nA ≡ A", dir.path()).unwrap();
    let svg = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(svg.matches("class=\"wire\"").count(), 1);
}

#[test]
fn extract_after_a_script() {
    let o = moncat(&[
        "extract",
        "--goal",
        fixture_path("mna.goal").to_str().unwrap(),
        "--script",
        fixture_path("mna_stepwise.proof").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("lhs: ") && out.contains("\nrhs: "));
    let report = check(&common::fixture("interchange.goal")).unwrap();
    assert_eq!(report.exit_code(), 0);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn serve_reads_the_port_from_the_environment() {
    let port = free_port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_moncat"))
        .arg("serve")
        .env("MONCAT_PORT", port.to_string())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let start = Instant::now();
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if start.elapsed() < Duration::from_secs(10) => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => {
                child.kill().ok();
                panic!("server did not come up: {e}");
            }
        }
    };
    write!(stream, "GET /schema HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    child.kill().ok();
    child.wait().ok();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("moncat-diagram/1"));
}
