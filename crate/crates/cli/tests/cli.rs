use std::process::{Command, Output};

fn regrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regrep"))
        .args(args)
        .env("REGREP_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_order_21() {
    let o = regrep(&["classify", "--order", "21"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("C21") && rows[0].contains("no   yes  2b-i"));
    assert!(rows[1].contains("C7:C3") && rows[1].contains("no   yes  2b-ii"));
}

#[test]
fn k33_is_not_a_grr() {
    let o = regrep(&["check", "D6", "--grr", "--set", "refl:all"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("is_grr: false"));
    assert!(text.contains("|Aut(Cay(R,S))| = 72"));
}

#[test]
fn json_certificates_revalidate() {
    let o = regrep(&["--json", "witness", "F21", "digraph"]);
    assert!(o.status.success());
    let path = std::env::temp_dir().join(format!("regrep-cert-{}.json", std::process::id()));
    std::fs::write(&path, &o.stdout).unwrap();
    let v = regrep(&["check", "--certificate", path.to_str().unwrap()]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    assert!(stdout(&v).starts_with("valid digraph witness"));

    // Same inputs and seed give the same certificate.
    let again = regrep(&["--json", "witness", "F21", "digraph"]);
    let cert = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["result"].clone();
    assert_eq!(cert(&o), cert(&again));
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes() {
    let budget = regrep(&["--budget", "200", "witness", "C13", "digraph", "randomized"]);
    assert_eq!(budget.status.code(), Some(2));
    let bad = regrep(&["classify", "D12"]);
    assert_eq!(bad.status.code(), Some(1));
    let parse = regrep(&["check", "D6", "--set", "x, q"]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("position 3"));
}

#[test]
fn small_verification_suite() {
    let o = regrep(&["verify-paper", "dihedral-small"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS dihedral-small"));
}

#[test]
fn enumerate_and_dot() {
    let o = regrep(&["enumerate", "30"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let d = regrep(&["check", "C5", "--set", "z", "--dot"]);
    assert!(stdout(&d).contains("digraph"));
}
