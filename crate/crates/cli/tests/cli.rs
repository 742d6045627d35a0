use std::path::Path;
use std::process::{Command, Output};

fn docmine(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_docmine")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn generate_extract_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = docmine(&["generate", "--out", "corpus", "--count", "4", "--seed", "3"], dir.path());
    assert_eq!(code(&g), 0, "{}", String::from_utf8_lossy(&g.stderr));
    assert!(dir.path().join("corpus/doc-0000.xml").exists());
    assert!(dir.path().join("corpus/doc-0000.gt.txt").exists());

    let e = docmine(&["--jobs", "2", "extract", "corpus", "--out", "tei"], dir.path());
    assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));
    assert_eq!(std::fs::read_dir(dir.path().join("tei")).unwrap().count(), 4);
    assert_eq!(String::from_utf8_lossy(&e.stdout).lines().count(), 4);

    let v = docmine(&["eval", "corpus", "--format", "kv"], dir.path());
    assert_eq!(code(&v), 0);
    assert!(String::from_utf8_lossy(&v.stdout).contains("title"));

    let u = docmine(&["usecase", "citedist", "corpus"], dir.path());
    assert_eq!(code(&u), 0);
    assert!(String::from_utf8_lossy(&u.stdout).contains("Background"));
}

#[test]
fn malformed_input_gives_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&docmine(&["generate", "--out", "in", "--count", "2"], dir.path())), 0);
    std::fs::write(dir.path().join("in/broken.xml"), "<document><page").unwrap();
    let e = docmine(&["extract", "in", "--out", "tei"], dir.path());
    assert_eq!(code(&e), 2);
    assert_eq!(std::fs::read_dir(dir.path().join("tei")).unwrap().count(), 2);
    assert!(String::from_utf8_lossy(&e.stdout).contains("broken.xml: error"));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&docmine(&["generate", "--out", "c", "--count", "1"], dir.path())), 0);
    assert_eq!(code(&docmine(&["train", "--task", "banana", "c", "--out", "m.crf"], dir.path())), 1);
    assert_eq!(code(&docmine(&["usecase", "foo", "c"], dir.path())), 1);
    assert_eq!(code(&docmine(&["generate", "--out", "d", "--style", "three-column"], dir.path())), 1);
    assert_eq!(code(&docmine(&["extract"], dir.path())), 1);
    assert_eq!(code(&docmine(&["--config", "missing.cfg", "eval", "c"], dir.path())), 1);
}

#[test]
fn train_writes_a_loadable_model() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&docmine(&["generate", "--out", "c", "--count", "3"], dir.path())), 0);
    let t = docmine(&["train", "--task", "footnote", "c", "--out", "models/f.crf", "--iterations", "20"], dir.path());
    assert_eq!(code(&t), 0, "{}", String::from_utf8_lossy(&t.stderr));
    assert!(String::from_utf8_lossy(&t.stdout).contains("final_objective="));
    let bytes = std::fs::read(dir.path().join("models/f.crf")).unwrap();
    assert!(docmine::crf::load_model::<f64>(&bytes).is_ok());
}
