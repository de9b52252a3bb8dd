mod common;

use std::fs;
use std::path::Path;

use morphchain::cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("morphchain").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Trains a model with `epochs` on a small synthetic corpus in `dir`.
fn trained(dir: &Path, epochs: usize) -> std::path::PathBuf {
    let syn = common::synthetic(4, 30, 4, 10);
    let (words, vectors, _) = syn.write_files(dir);
    let model = dir.join("model.txt");
    let epochs = epochs.to_string();
    let (code, out, err) = call(&[
        "train",
        "--wordlist",
        p(&words),
        "--embeddings",
        p(&vectors),
        "--out",
        p(&model),
        "--epochs",
        &epochs,
    ]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    model
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("segment"));
    let (code, out, _) = call(&["--version"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["segment", "--no-such-flag"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&[]).0, EXIT_USAGE);
    assert_eq!(call(&["train", "--epochs", "many"]).0, EXIT_USAGE);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let (code, _, err) = call(&["segment", "--model", p(&missing), "kitap"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.starts_with("error:"), "{err}");

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "not a model\n").unwrap();
    assert_eq!(call(&["segment", "--model", p(&bad), "kitap"]).0, EXIT_DATA);

    let words = dir.path().join("words.tsv");
    fs::write(&words, "kitap\tmany\n").unwrap();
    assert_eq!(call(&["candidates", "kitap", "--wordlist", p(&words)]).0, EXIT_DATA);
}

#[test]
fn zero_weight_model_echoes_words() {
    let dir = tempfile::tempdir().unwrap();
    let model = trained(dir.path(), 0);
    let list = dir.path().join("list.txt");
    fs::write(&list, "kitaplarda 3\nevler\n").unwrap();
    let (code, out, err) = call(&["segment", "--model", p(&model), "--words", p(&list), "cars"]);
    assert_eq!(code, EXIT_OK, "{err}");
    // positional words come first, then the file
    assert_eq!(out, "cars\tcars\nkitaplarda\tkitaplarda\nevler\tevler\n");
}

#[test]
fn eval_exact_match_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let model = trained(dir.path(), 0);
    let gold = dir.path().join("unsplit.tsv");
    fs::write(&gold, "kitap\tkitap\nev\tev\n").unwrap();
    let (code, out, err) = call(&["eval", "--model", p(&model), "--gold", p(&gold)]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.lines().any(|l| l == "1.0000\t1.0000\t1.0000"), "{out}");

    let split = dir.path().join("split.tsv");
    fs::write(&split, "kitaplar\tkitap lar\n").unwrap();
    let (code, out, _) = call(&[
        "eval",
        "--model",
        p(&model),
        "--gold",
        p(&split),
        "--diagnostics",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "0.0000\t0.0000\t0.0000"), "{out}");
    assert!(out.lines().any(|l| l == "kitaplar\t\t5"), "{out}");
}

#[test]
fn trained_model_segments_and_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = trained(dir.path(), 20);
    let text = fs::read_to_string(&model).unwrap();
    assert!(text.starts_with("morphchain-model v1"));
    let words: Vec<String> = common::synthetic(4, 30, 4, 10)
        .train
        .ranked()
        .iter()
        .take(20)
        .cloned()
        .collect();
    let mut args = vec!["segment", "--model", p(&model)];
    args.extend(words.iter().map(String::as_str));
    let (code, out, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), words.len());
    for (line, w) in lines.iter().zip(&words) {
        let (word, morphs) = line.split_once('\t').unwrap();
        assert_eq!(word, w);
        assert_eq!(morphs.replace(' ', ""), *w);
    }
}

#[test]
fn candidates_output_format() {
    let (code, out, _) = call(&["candidates", "cars"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.contains(&"car\tSuffix\ts\tnone"), "{out}");
    assert!(lines.contains(&"cars\tStop\t\tnone"), "{out}");
    for line in &lines {
        assert_eq!(line.split('\t').count(), 4, "{line}");
    }

    let dir = tempfile::tempdir().unwrap();
    let words = dir.path().join("words.tsv");
    fs::write(&words, "run\t5\nrunning\t3\n").unwrap();
    let (code, out, _) = call(&["candidates", "running", "--wordlist", p(&words)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l.starts_with("run\tSuffix\ting\t")), "{out}");
}
