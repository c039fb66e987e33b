use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn padl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padl")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn cruise_both_modes_agree() {
    let f = fixture("cruise_control.padl");
    let out = padl(&["check", f.to_str().unwrap(), "--mode", "both", "--format", "json", "--no-timings"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["reduction"]["conclusion"]["status"], "deadlock_free");
    assert_eq!(v["direct"]["verdict"]["status"], "deadlock_free");
    assert!(v["direct"]["millis"].is_null());
}

#[test]
fn json_reports_are_byte_identical() {
    let f = fixture("client_server_async.padl");
    let run = || stdout(&padl(&["check", f.to_str().unwrap(), "--mode", "both", "--format", "json", "--no-timings"]));
    assert_eq!(run(), run());
}

#[test]
fn broken_server_fails_with_formula() {
    let f = fixture("mutants/server_no_response.padl");
    let out = padl(&["check", f.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("distinguishing formula: <<"));
}

#[test]
fn deadlock_exits_with_one() {
    let f = fixture("mutual_wait.padl");
    assert_eq!(code(&padl(&["check", f.to_str().unwrap(), "--mode", "direct"])), 1);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&padl(&["check", "/nonexistent/file.padl"])), 2);
    assert_eq!(code(&padl(&["frobnicate"])), 2);
    let f = fixture("cruise_control.padl");
    assert_eq!(code(&padl(&["check", f.to_str().unwrap(), "--queue-capacity", "0"])), 2);
    assert_eq!(code(&padl(&["lts", f.to_str().unwrap(), "--aei", "S", "--variant", "pc-"])), 2);
    assert_eq!(code(&padl(&["lts", f.to_str().unwrap(), "--aei", "S", "--variant", "closed-wob"])), 2);
    assert_eq!(code(&padl(&["lts", f.to_str().unwrap(), "--aei", "Z"])), 2);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.padl");
    std::fs::write(&p, "ARCHI_TYPE Broken(void)\nARCHI_BEHAVIOR\n").unwrap();
    let out = padl(&["check", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.padl:"));
}

#[test]
fn state_limit_is_inconclusive() {
    let f = fixture("cruise_control.padl");
    assert_eq!(code(&padl(&["check", f.to_str().unwrap(), "--mode", "direct", "--state-limit", "50"])), 3);
}

#[test]
fn lts_partially_closed_server() {
    let f = fixture("client_server_sync.padl");
    let dir = tempfile::tempdir().unwrap();
    let aut = dir.path().join("s.aut");
    let dot = dir.path().join("s.dot");
    let out = padl(&[
        "lts",
        f.to_str().unwrap(),
        "--aei",
        "S",
        "--variant",
        "pc-wob",
        "--out",
        aut.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let lts = padl_core::kernel::parse_aut(&std::fs::read_to_string(&aut).unwrap()).unwrap();
    let visible: Vec<String> = lts.action_names().into_iter().collect();
    assert_eq!(
        visible,
        vec![
            "C_1.send_request#S.receive_request_1",
            "C_2.send_request#S.receive_request_2",
            "S.send_response_1#C_1.receive_response",
            "S.send_response_2#C_2.receive_response",
        ]
    );
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph lts {"));

    // The open variant differs only in what is hidden.
    let open = padl(&["lts", f.to_str().unwrap(), "--aei", "S", "--variant", "open"]);
    let open = padl_core::kernel::parse_aut(&stdout(&open)).unwrap();
    let hidden = padl_core::kernel::hide(&open, &padl_core::kernel::HideMode::KeepOnly(lts.action_names()));
    assert!(hidden.same_structure(&lts));
}

#[test]
fn graph_exports() {
    let out = padl(&["graph", fixture("cruise_control.padl").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let dot = stdout(&out);
    assert_eq!(dot.matches("subgraph cluster_").count(), 1);
    assert_eq!(dot.lines().filter(|l| l.trim().starts_with('"') && !l.contains("--")).count(), 5);

    let single = stdout(&padl(&["graph", fixture("single_aei.padl").to_str().unwrap()]));
    assert!(single.contains("\"W\";") && !single.contains("--"));

    let split = stdout(&padl(&["graph", fixture("disconnected.padl").to_str().unwrap()]));
    assert_eq!(split.matches(" -- ").count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let blocked = dir.path().join("missing").join("g.dot");
    assert_eq!(code(&padl(&["graph", fixture("single_aei.padl").to_str().unwrap(), "--out", blocked.to_str().unwrap()])), 2);
}

#[test]
fn equiv_weak_and_strong() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.aut");
    let b = dir.path().join("b.aut");
    std::fs::write(&a, "des (0, 2, 3)\n(0, \"a\", 1)\n(1, \"tau\", 2)\n").unwrap();
    std::fs::write(&b, "des (0, 1, 2)\n(0, \"a\", 1)\n").unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    assert_eq!(code(&padl(&["equiv", a, a])), 0);
    assert_eq!(code(&padl(&["equiv", a, b])), 0);
    let strong = padl(&["equiv", a, b, "--strong"]);
    assert_eq!(code(&strong), 1);
    assert!(stdout(&strong).contains("formula"));
    let bad = dir.path().join("bad.aut");
    std::fs::write(&bad, "not an aut file\n").unwrap();
    assert_eq!(code(&padl(&["equiv", a, bad.to_str().unwrap()])), 2);
}
