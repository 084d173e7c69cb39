use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn g2p(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_g2p"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2p-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn convert_from_stdin() {
    let data = data();
    let o = g2p(
        &["convert", "--resources", data.to_str().unwrap()],
        "kag-ryo/NNG\nsuch/NNG+gwa/JC\nta-seos/NR gae/NNB\n",
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "kang-nyo\nsud-ggwa\nta-seot ggae\n");
}

#[test]
fn convert_with_bundled_data_and_phrase_limits() {
    let line = "사과/NNG 배/NNG 감/NNG 귤/NNG 밤/NNG 꽃/NNG 숯/NNG\n";
    let o = g2p(&["convert"], line);
    assert_eq!(stdout(&o), "sa-gwa pae gam gyul pam ggod | sud\n");
    let o = g2p(&["convert", "--max-phrase", "0"], line);
    assert_eq!(stdout(&o), "sa-gwa pae gam gyul pam ggod sud\n");
}

#[test]
fn malformed_line_is_a_usage_error() {
    let o = g2p(&["convert"], "방값/NNG\n방값\n");
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "pang-ggab\n\n");
}

#[test]
fn resource_and_usage_exit_codes() {
    assert_eq!(g2p(&["convert", "--resources", "/nonexistent"], "").status.code(), Some(1));
    assert_eq!(g2p(&["convert", "--min-phrase", "5", "--max-phrase", "2"], "").status.code(), Some(2));
    assert_eq!(g2p(&["bogus"], "").status.code(), Some(2));
    let dir = scratch("badres");
    for f in ["phonetic.dict", "phonetic_pattern.dict", "ccv.rules", "connectivity.tsv", "readings.tsv"] {
        std::fs::copy(data().join(f), dir.join(f)).unwrap();
    }
    std::fs::write(dir.join("ccv.rules"), "no header\n").unwrap();
    let o = g2p(&["convert", "--resources", dir.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ccv.rules"));
}

#[test]
fn evaluate_seed_corpus() {
    let corpus = data().join("seed_corpus.tsv");
    let o = g2p(&["evaluate", "--corpus", corpus.to_str().unwrap()], "");
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("sentence accuracy: 100.00%"), "{out}");
    assert!(out.contains("grapheme accuracy: 100.00%"), "{out}");
    let dir = scratch("empty");
    let empty = dir.join("empty.tsv");
    std::fs::write(&empty, "#g2p-v1\n").unwrap();
    assert_eq!(g2p(&["evaluate", "--corpus", empty.to_str().unwrap()], "").status.code(), Some(2));
}

#[test]
fn learn_ccv_writes_rules() {
    let dir = scratch("learn");
    let corpus = dir.join("corpus.tsv");
    let rules = dir.join("learned.rules");
    let mut text = String::from("#g2p-v1\n");
    for _ in 0..3 {
        text.push_str("각료\tgang-nyo\n");
    }
    text.push_str("각료\tgag-ryo\n");
    std::fs::write(&corpus, text).unwrap();
    let o = g2p(
        &["learn-ccv", "--corpus", corpus.to_str().unwrap(), "--min-count", "2", "--out", rules.to_str().unwrap(), "--report"],
        "",
    );
    assert!(o.status.success());
    let written = std::fs::read_to_string(&rules).unwrap();
    assert!(written.starts_with("#g2p-v1"));
    assert!(written.contains("g r yo\tng n"), "{written}");
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(stderr.matches("exception:").count(), 1, "{stderr}");
}

#[test]
fn inspect_lattice() {
    let o = g2p(&["inspect-lattice", "방값/NNG+이/JKS"], "");
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("pang-ggabss"), "{out}");
    assert!(out.contains("pang-ggam"), "{out}");
}
