use std::path::PathBuf;
use std::process::Command;

/// `cargo test` builds the examples next to the main binary.
fn example(name: &str) -> PathBuf {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_finadapt"));
    bin.parent().unwrap().join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run(name: &str) -> String {
    let path = example(name);
    assert!(path.is_file(), "example not built: {}", path.display());
    let out = Command::new(&path).output().unwrap();
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn corpus_pipeline() {
    assert!(run("corpus_pipeline").contains("4 documents"));
}

#[test]
fn synthetic_dataset() {
    assert!(run("synthetic_dataset").contains("230 samples"));
}

#[test]
fn training_plan() {
    let out = run("training_plan");
    assert!(out.contains("learning_rate = 2e-5") && out.contains("learning_rate = 2e-6"));
    assert!(out.contains("override rejected"));
}

#[test]
fn exam_eval() {
    assert!(run("exam_eval").contains("overall 0.700"));
}

#[test]
fn gazette_judging() {
    assert!(run("gazette_judging").contains("kappa"));
}

#[test]
fn language_switch() {
    let out = run("language_switch");
    assert_eq!(out.matches("flagged=true").count(), 2);
}

#[test]
fn translation_comparison() {
    assert!(run("translation_comparison").contains("| Model | Original TR | Self-Translated EN | External-Translated EN |"));
}

#[test]
fn review_server() {
    assert!(run("review_server").contains("11 of 12 items left"));
}
