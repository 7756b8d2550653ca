use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triaut::{parse_map, sample, Field};

const MAX3: &str = "F2 [x1 -> x1 + x2^2*x3, x2 -> x2 + x3, x3 -> x3 + 1]";

fn triaut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triaut")).args(args).env_remove("TRIAUT_MAX_TERMS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares stdout with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let o = triaut(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let path = golden_dir().join(name);
    if std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1") {
        fs::write(&path, stdout(&o)).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stdout(&o), want, "golden {name}");
}

#[test]
fn text_goldens() {
    golden("order.txt", &["order", MAX3]);
    golden("perm_order.txt", &["perm-order", MAX3]);
    golden("pow.txt", &["pow", "-m", "-2", "F3 [x1 -> x1 + x2^2, x2 -> x2 + 1]"]);
    golden("compose.txt", &["compose", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]", "F2 [x1 -> x1, x2 -> x2 + 1]"]);
    golden("inverse.txt", &["inverse", "--check", "Q [x1 -> 2*x1 + x2^2, x2 -> x2 - 1]"]);
    golden("apply.txt", &["apply", "-g", "x1*x2", "F3 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("invariants.txt", &["invariants", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("canon_ba.txt", &["canon", "Q [x1 -> x1 + 3*x2^2 + 6*x2 + 2, x2 -> x2]"]);
    golden("canon_baa.txt", &["canon", "--group", "baa", "Q [x1 -> x1 + 3*x2^2 + 6*x2 + 2, x2 -> x2]"]);
    golden("split.txt", &["split", "-g", "x1*x2^2", "F3 [x1 -> x1 + x2^2, x2 -> x2 + 1]"]);
    golden("preimage_d.txt", &["preimage", "-g", "x2", "--op", "d", "Q [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("log.txt", &["log", "Q [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("exp.txt", &["exp", "Q [x1 -> x2 - 1/2, x2 -> 1]"]);
    golden("classify_finite.txt", &["classify", "--finite", "F5 [x1 -> x1 + x2^4, x2 -> 2*x2]"]);
    golden("classify_ba.txt", &["classify", "--group", "ba", "F3 [x1 -> x1 + x2^2, x2 -> x2 + 2]"]);
}

#[test]
fn json_goldens() {
    golden("order.json", &["--json", "order", MAX3]);
    golden("canon.json", &["canon", "--json", "--check", "F2 [x1 -> x1 + x2^2, x2 -> x2 + 1]"]);
    golden("preimage.json", &["--json", "preimage", "-g", "x2", "Q [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("classify.json", &["--json", "classify", "--finite", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    golden("invariants.json", &["--json", "invariants", "F3 [x1 -> x1 + x2^2, x2 -> x2 + 1]"]);
}

#[test]
fn json_schema_leads_with_the_input() {
    let o = triaut(&["--json", "inverse", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    let s = stdout(&o);
    let keys: Vec<&str> = s.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    assert_eq!(keys, ["command", "field", "n", "rows", "result"]);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| triaut(args).status.code().unwrap();
    assert_eq!(code(&["order", MAX3]), 0);
    assert_eq!(code(&["order", "Q [x1 -> x1 + x1*x2]"]), 2);
    assert_eq!(code(&["order", "F2 [x1 -> x1 + x1, x2 -> x2]"]), 2);
    assert_eq!(code(&["order", "F4 [x1 -> x1]"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["order", "--bogus", MAX3]), 2);
    assert_eq!(code(&["invariants", "Q [x1 -> x1 + 1]"]), 3);
    assert_eq!(code(&["log", "F2 [x1 -> x1 + 1]"]), 3);
    assert_eq!(code(&["classify", "--finite", "Q [x1 -> -x1 + x2, x2 -> -x2]"]), 3);
    assert_eq!(code(&["preimage", "-g", "x1", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]), 0);
    assert_eq!(code(&["preimage", "-g", "x1^3*x2", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]), 4);
    assert_eq!(code(&["preimage", "-g", "1", "Q [x1 -> x1 + x2^2, x2 -> x2]"]), 4);
    assert_eq!(code(&["preimage", "--op", "m", "-g", "x1", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]), 4);
    assert_eq!(code(&["--max-terms", "10", "pow", "-m", "5", "Q [x1 -> x1 + x2^3, x2 -> x2 + x3^3, x3 -> x3 + 1]"]), 5);
    assert_eq!(code(&["perm-order", "F7 [x1 -> x1 + 1, x2 -> x2, x3 -> x3, x4 -> x4, x5 -> x5, x6 -> x6, x7 -> x7, x8 -> x8, x9 -> x9, x10 -> x10, x11 -> x11, x12 -> x12]"]), 5);
}

#[test]
fn max_terms_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_triaut"))
        .args(["pow", "-m", "5", "Q [x1 -> x1 + x2^3, x2 -> x2 + x3^3, x3 -> x3 + 1]"])
        .env("TRIAUT_MAX_TERMS", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn no_solution_reports_certificate() {
    let o = triaut(&["--json", "preimage", "-g", "x1^3*x2", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    let s = stdout(&o);
    assert!(s.contains("\"exit_code\":4"), "{s}");
    assert!(s.contains("M(target)"), "{s}");
    let o = triaut(&["preimage", "-g", "x1^3*x2", "F2 [x1 -> x1 + x2, x2 -> x2 + 1]"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: no solution"));
}

#[test]
fn stdin_and_files() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_triaut"))
        .args(["order", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(MAX3.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "8\n");

    let dir = std::env::temp_dir().join(format!("triaut-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.map");
    fs::write(&a, "F2 [x1 -> x1 + x2,\n    x2 -> x2 + 1]\n").unwrap();
    let o = triaut(&["compose", "-f", a.to_str().unwrap(), "F2 [x1 -> x1, x2 -> x2 + 1]"]);
    assert_eq!(stdout(&o), "F2 [x1 -> x1 + x2 + 1, x2 -> x2]\n");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn batch_keeps_line_order() {
    let dir = std::env::temp_dir().join(format!("triaut-batch-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("maps.txt");
    let mut lines = vec!["# orders".to_string()];
    for k in 1..=12 {
        let shift = if k % 2 == 1 { " + 1" } else { "" };
        lines.push(format!("F2 [x1 -> x1 + x2^{k}, x2 -> x2{shift}]"));
    }
    lines.push("Q [x1 -> x1 + x1^2]".into());
    fs::write(&path, lines.join("\n")).unwrap();
    let o = triaut(&["order", "--batch", path.to_str().unwrap()]);
    let out: Vec<String> = stdout(&o).lines().map(String::from).collect();
    let want: Vec<String> = (1..=12).map(|k| if k % 2 == 1 { "4" } else { "2" }.to_string()).collect();
    assert_eq!(out.len(), 13);
    assert_eq!(out[..12], want[..]);
    assert!(out[12].starts_with("error:"));
    assert_eq!(o.status.code(), Some(2));

    fs::write(&path, "F3 [x1 -> x1 + x2^2, x2 -> x2 + 1]; F3 [x1 -> x1, x2 -> x2 + 1]\n").unwrap();
    let o = triaut(&["--json", "compose", "--batch", path.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("{\"command\":\"compose\""));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eq_finds_witnesses_for_random_conjugates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = [(Field::prime(3).unwrap(), 2usize, "ba"), (Field::prime(2).unwrap(), 3, "ba"), (Field::Rationals, 2, "baa"), (Field::Rationals, 3, "ba")];
    for (field, n, group) in cases {
        let f = match field {
            Field::Prime(_) => sample::random_max_order_map(&mut rng, field, n, 2 * (field.characteristic() - 1).max(2), 3).unwrap(),
            Field::Rationals => sample::random_strict_map(&mut rng, field, n, 3, 3),
        };
        let tau = if group == "baa" { sample::random_map(&mut rng, field, n, 2, 2) } else { sample::random_conjugator(&mut rng, field, n, 2) };
        let g = f.conjugate(&tau).unwrap();
        let (fs_, gs) = (f.to_string(), g.to_string());
        let o = triaut(&["eq", "--check", "--group", group, &fs_, &gs]);
        let s = stdout(&o);
        assert!(o.status.success() && s.starts_with("equivalent\nwitness: "), "{fs_} vs {gs}: {s} {}", String::from_utf8_lossy(&o.stderr));
        let witness = parse_map(s.lines().nth(1).unwrap().trim_start_matches("witness: ")).unwrap();
        assert_eq!(f.conjugate(&witness).unwrap(), g);
    }
    let o = triaut(&["eq", "F3 [x1 -> x1 + x2^2, x2 -> x2 + 1]", "F3 [x1 -> x1 + 2*x2^2, x2 -> x2 + 1]"]);
    assert!(stdout(&o).starts_with("not equivalent"));
}

#[test]
fn printed_maps_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for field in [Field::Rationals, Field::prime(5).unwrap()] {
        for n in 1..=3 {
            let f = sample::random_map(&mut rng, field, n, 3, 3);
            let o = triaut(&["pow", "-m", "1", &f.to_string()]);
            assert_eq!(parse_map(stdout(&o).trim()).unwrap(), f);
        }
    }
}
