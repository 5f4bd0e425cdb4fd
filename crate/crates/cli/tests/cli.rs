use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MINI: &str = include_str!("../../core/tests/fixtures/mini.mm");
const A1D_RUS: &str = include_str!("../../core/tests/fixtures/a1d.rus");

fn mmrus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmrus")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_mini() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmrus(&["verify", s(&put(dir.path(), "mini.mm", MINI))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // 6 axioms accepted and 3 proofs replayed
    assert!(stdout(&o).starts_with("verified: 9 passed, 0 failed, "), "{}", stdout(&o));
}

#[test]
fn verify_corrupted_a1d() {
    let dir = tempfile::tempdir().unwrap();
    let bad = MINI.replace("wps wch ax-1 syl $.", "wps wch ax-1 $.");
    let o = mmrus(&["verify", s(&put(dir.path(), "bad.mm", &bad))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("a1d"), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 failed"));
}

#[test]
fn verify_russell() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmrus(&["verify", s(&put(dir.path(), "a1d.rus", A1D_RUS))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = mmrus(&["verify", "--lang", "rus", s(&put(dir.path(), "a1d.txt", A1D_RUS))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmrus(&["verify", s(&dir.path().join("missing.mm"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing.mm"));
    assert_eq!(code(&mmrus(&["verify", s(&put(dir.path(), "x.mm", "$c x"))])), 2);
    assert_eq!(code(&mmrus(&["verify", s(&put(dir.path(), "x.txt", MINI))])), 2);
    assert_eq!(code(&mmrus(&["frobnicate"])), 2);
}

#[test]
fn mm_to_russell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a1d.rus");
    let o = mmrus(&["translate", s(&put(dir.path(), "a1d.mm", MINI)), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let proof = text.split("proof of a1d {").nth(1).unwrap().split("\n}").next().unwrap();
    assert!(text.contains("theorem a1d (ph : wff, ps : wff, ch : wff)"));
    assert_eq!(proof.lines().filter(|l| l.trim_start().starts_with("step ")).count(), 2, "{proof}");
}

#[test]
fn russell_to_mm_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a1d.mm");
    let o = mmrus(&["translate", s(&put(dir.path(), "a1d.rus", A1D_RUS)), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = mmrus(&["verify", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("wph wps wch wps wi a1d.1 wps wch ax-1 syl"));
}

#[test]
fn mm_to_mm_runs_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.mm");
    let o = mmrus(&["translate", "--threads", "1", s(&put(dir.path(), "mini.mm", MINI)), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("structural diff: 0 entries"));
    assert_eq!(code(&mmrus(&["verify", s(&out)])), 0);
}

#[test]
fn russell_to_russell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("again.rus");
    let o = mmrus(&["translate", s(&put(dir.path(), "a1d.rus", A1D_RUS)), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("theorem a1d"));
}

#[test]
fn translating_a_failing_database_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = MINI.replace("wps wch ax-1 syl $.", "wps wch ax-2 syl $.");
    let input = put(dir.path(), "bad.mm", &bad);
    let out = dir.path().join("bad.rus");
    assert_eq!(code(&mmrus(&["translate", s(&input), "-o", s(&out)])), 1);
    assert!(!out.exists());
}

// Two level-1 parts and nothing before the first banner.
const TWO_PARTS: &str = "$(
#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#
  Syntax
#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#
$)
$c wff |- ( ) -> $.
$v ph ps $.
wph $f wff ph $.
wps $f wff ps $.
wi $a wff ( ph -> ps ) $.

$(
#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#
  Axioms
#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#*#
$)
ax-1 $a |- ( ph -> ( ps -> ph ) ) $.
${ min $e |- ph $. maj $e |- ( ph -> ps ) $.
   ax-mp $a |- ps $. $}
id $p |- ( ph -> ( ps -> ph ) ) $= wph wps ax-1 $.
";

#[test]
fn split_two_parts() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "two.mm", TWO_PARTS);
    let out = dir.path().join("parts");
    let o = mmrus(&["split", s(&input), "-d", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["01-syntax.mm", "02-axioms.mm", "index.txt"]);
    assert_eq!(fs::read_to_string(out.join("index.txt")).unwrap(), "01-syntax.mm\n02-axioms.mm\n");
    assert_eq!(mmrus_core::split::join_split(&out).unwrap(), TWO_PARTS);
}

#[test]
fn split_without_banners_warns() {
    let dir = tempfile::tempdir().unwrap();
    let plain = "$c x $.\n";
    let out = dir.path().join("parts");
    let o = mmrus(&["split", s(&put(dir.path(), "plain.mm", plain)), "-d", s(&out), "--depth", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(mmrus_core::split::join_split(&out).unwrap(), plain);
}

#[test]
fn stats_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmrus(&["stats", s(&put(dir.path(), "mini.mm", MINI))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("theorems: 3\n"), "{}", stdout(&o));
    let o = mmrus(&["stats", s(&put(dir.path(), "empty.mm", ""))]);
    assert!(stdout(&o).contains("theorems: 0\n") && stdout(&o).contains("constants: 0\n"));
    let o = mmrus(&["stats", s(&put(dir.path(), "a1d.rus", A1D_RUS))]);
    assert!(stdout(&o).contains("rules: 2\n") && stdout(&o).contains("definitions: 0\n"), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "mini.mm", MINI);
    let (a, b) = (dir.path().join("a.rus"), dir.path().join("b.rus"));
    assert_eq!(code(&mmrus(&["translate", s(&input), "-o", s(&a)])), 0);
    assert_eq!(code(&mmrus(&["translate", "--threads", "1", s(&input), "-o", s(&b)])), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
