use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn polyquant(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polyquant")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn invert_prints_the_truncated_inverse() {
    let f = file("x1 + x1^2\n");
    let (code, stdout, _) = polyquant(&["invert", "--degree", "3", f.path().to_str().unwrap(), "--text"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "x1 -> 2*x1^3 - x1^2 + x1");
}

#[test]
fn check_auto_over_f5() {
    let f = file("{\"vars\": 1, \"images\": [\"x1 - x1^5\"]}");
    let (code, stdout, _) = polyquant(&["--field", "q5", "check-auto", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["verdict"], "irreversible");
}

#[test]
fn check_symp_reports_violations() {
    let good = file("x1 -> x1 + p1^2\np1 -> p1\n");
    assert_eq!(polyquant(&["check-symp", good.path().to_str().unwrap()]).0, 0);
    let bad = file("x1 -> 2*x1\np1 -> p1\n");
    let (code, stdout, _) = polyquant(&["check-symp", bad.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["symplectic"], false);
}

#[test]
fn parse_errors_carry_positions() {
    let f = file("x1\nx2 + * x1\n");
    let (code, _, stderr) = polyquant(&["check-auto", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn resource_caps_exit_two() {
    let (code, _, stderr) = polyquant(&["al-check", "--order", "2", "--degree", "9"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn approx_word_lifts() {
    let sigma = file("x1 -> x1 + p1^3\np1 -> p1\n");
    let (code, stdout, _) = polyquant(&["approx", "--degree", "5", "--symplectic", sigma.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    let word = file(&v["word"].to_string());
    let (code, stdout, _) = polyquant(&["lift", word.path().to_str().unwrap(), "--text"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("x1 -> d1^3 + x1"), "{stdout}");

    // A long approximating word exceeds the lifting cap instead of running away.
    let sigma = file("x1 -> x1 + (p1 + x1^2)^2\np1 -> p1 + x1^2\n");
    let (_, stdout, _) = polyquant(&["approx", "--degree", "5", "--symplectic", sigma.path().to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    let word = file(&v["word"].to_string());
    let (code, _, stderr) = polyquant(&["lift", word.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cap"), "{stderr}");
}

#[test]
fn yagzhev_nilp_fails_on_non_automorphisms() {
    let f = file("x1 - x1^3\n");
    let (code, stdout, _) = polyquant(&["yagzhev", "nilp", "--qmax", "6", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["verdict"], "fails");
}

#[test]
fn linearize_free_json() {
    let f = file(
        r#"{"vars": 3, "params": 3, "algebra": "free",
            "images": ["t1*x1", "t2*x2", "t3*x3 + (t3 - t1^2*t2)*x1*x2*x1 + (t1^2*t2 - t3)*x2*x1^2"]}"#,
    );
    let (code, stdout, stderr) = polyquant(&["linearize", f.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["beta"]["images"][2], "-x2*x1^2 + x1*x2*x1 + x3");
}

#[test]
fn help_lists_commands() {
    let (code, stdout, _) = polyquant(&["--help"]);
    assert_eq!(code, 0);
    for cmd in ["invert", "check-auto", "approx", "lift", "moyal", "al-check", "yagzhev", "linearize"] {
        assert!(stdout.contains(cmd), "{cmd}");
    }
}
