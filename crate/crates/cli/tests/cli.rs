use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qembed"))
        .args(args)
        .env_remove("QEMBED_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn ok(args: &[&str]) -> String {
    let out = qembed(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    stdout(&out)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Two sentiment words per class plus shared filler, 200 lines.
fn write_corpus(dir: &Path) -> PathBuf {
    let pos = ["good", "great"];
    let neg = ["bad", "awful"];
    let filler = ["the", "film", "plot", "was"];
    let mut text = String::new();
    for i in 0..200 {
        let label = i % 2;
        let word = if label == 1 { pos[i / 2 % 2] } else { neg[i / 2 % 2] };
        let f = filler[i % 4];
        text.push_str(&format!("{label}\t{f} {word}, {}!\n", filler[(i / 4) % 4]));
    }
    let path = dir.join("corpus.tsv");
    fs::write(&path, text).unwrap();
    path
}

struct Fixture {
    tmp: TempDir,
    data: PathBuf,
}

fn prepared() -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_corpus(tmp.path());
    let data = tmp.path().join("toy");
    ok(&["prepare", "--input", p(&input), "--out", p(&data), "--seed", "3"]);
    Fixture { tmp, data }
}

fn train(fx: &Fixture, name: &str, extra: &[&str]) -> PathBuf {
    let ckpt = fx.tmp.path().join(name);
    let mut args = vec!["train", "--data", p(&fx.data), "--checkpoint", p(&ckpt), "--n", "6", "--seed", "1"];
    args.extend_from_slice(extra);
    ok(&args);
    ckpt
}

#[test]
fn prepare_writes_layout_and_is_idempotent() {
    let fx = prepared();
    let stats = fs::read_to_string(fx.data.join("stats.txt")).unwrap();
    assert!(stats.starts_with("train=160 val=20 test=20 vocab="), "{stats}");
    let again = fx.tmp.path().join("again");
    ok(&["prepare", "--input", p(&fx.tmp.path().join("corpus.tsv")), "--out", p(&again), "--seed", "3"]);
    for f in ["data.tsv", "splits.tsv", "vocab.txt", "stats.txt"] {
        assert_eq!(fs::read(fx.data.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
    let vocab = fs::read_to_string(fx.data.join("vocab.txt")).unwrap();
    assert!(!vocab.lines().any(|l| l.contains(',') || l.contains('!')));
}

#[test]
fn prepare_missing_input_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qembed(&["prepare", "--input", "/no/such/file.tsv", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("/no/such/file.tsv"));
}

#[test]
fn train_evaluate_predict_round_trip() {
    let fx = prepared();
    let ckpt = train(&fx, "m.ckpt", &["--model-kind", "ce-sup", "--epochs", "15", "--patience", "0", "--learning-rate", "0.02"]);
    let log = fs::read_to_string(fx.tmp.path().join("m.ckpt.log")).unwrap();
    assert_eq!(log.lines().count(), 15);
    assert!(log.lines().all(|l| l.starts_with("epoch=")));

    let csv = fx.tmp.path().join("pred.csv");
    let printed = ok(&["evaluate", "--checkpoint", p(&ckpt), "--data", p(&fx.data), "--split", "val", "--predictions", p(&csv)]);
    assert!(printed.starts_with("val accuracy: "), "{printed}");
    assert!(printed.trim_end().ends_with('%'));
    let rows = fs::read_to_string(&csv).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("index,label,probability,prediction"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let prob: f64 = f[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&prob));
        assert_eq!(f[3], if prob >= 0.5 { "1" } else { "0" });
        count += 1;
    }
    assert_eq!(count, 20);

    let out = ok(&["predict", "--checkpoint", p(&ckpt), "--data", p(&fx.data), "--text", "the great film", "--text", "awful plot"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,probability,prediction");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with(",1") && lines[2].ends_with(",0"), "{out}");
}

#[test]
fn training_is_deterministic_and_zero_epochs_writes_initial_parameters() {
    let fx = prepared();
    let a = train(&fx, "a.ckpt", &["--epochs", "2"]);
    let b = train(&fx, "b.ckpt", &["--epochs", "2", "--jobs", "3"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let zero = train(&fx, "z.ckpt", &["--epochs", "0"]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&zero).unwrap());
    let header = String::from_utf8_lossy(&fs::read(&zero).unwrap()[..40]).into_owned();
    assert!(header.starts_with("format_version=1\nmodel_kind=ce-mix\n"), "{header}");
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let fx = prepared();
    let cfg = fx.tmp.path().join("train.toml");
    fs::write(&cfg, "epochs = 3\nn = 4\nmodel-kind = \"real\"\n").unwrap();
    let ckpt = fx.tmp.path().join("c.ckpt");
    ok(&["train", "--config", p(&cfg), "--data", p(&fx.data), "--checkpoint", p(&ckpt), "--epochs", "2", "--patience", "0"]);
    let log = fs::read_to_string(fx.tmp.path().join("c.ckpt.log")).unwrap();
    assert_eq!(log.lines().count(), 2); // flag
    let header = String::from_utf8_lossy(&fs::read(&ckpt).unwrap()[..60]).into_owned();
    assert!(header.contains("model_kind=real\nn=4\nr=2\n"), "{header}"); // file, then derived default

    fs::write(&cfg, "epochs = 3\ncolour = \"blue\"\n").unwrap();
    let out = qembed(&["train", "--config", p(&cfg), "--data", p(&fx.data)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = qembed(&["train", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluate_rejects_mismatched_vocabulary() {
    let fx = prepared();
    let ckpt = train(&fx, "m.ckpt", &["--epochs", "0"]);
    let other_input = fx.tmp.path().join("other.tsv");
    fs::write(&other_input, "1\tzebra\n0\tyak\n".repeat(10)).unwrap();
    let other = fx.tmp.path().join("other");
    ok(&["prepare", "--input", p(&other_input), "--out", p(&other)]);
    let out = qembed(&["evaluate", "--checkpoint", p(&ckpt), "--data", p(&other)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("vocab_size"), "{}", stderr(&out));
}

#[test]
fn inspect_reports_amplitudes_and_interference() {
    let fx = prepared();
    let ckpt = train(&fx, "m.ckpt", &["--epochs", "0"]);
    let out = ok(&["inspect", "--checkpoint", p(&ckpt), "--data", p(&fx.data), "--token", "good", "--top-k", "4"]);
    let rows: Vec<f64> = out
        .lines()
        .skip(2)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.windows(2).all(|w| w[0] >= w[1]));

    let out = ok(&["inspect", "--checkpoint", p(&ckpt), "--data", p(&fx.data), "--token", "good", "--pair", "good"]);
    assert!(out.contains("= 1.000000+0.000000i") && out.contains("phase 0.000000"), "{out}");

    let out = qembed(&["inspect", "--checkpoint", p(&ckpt), "--data", p(&fx.data), "--token", "penguin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("UNK"));
}

#[test]
fn gradcheck_passes_for_each_kind() {
    let fx = prepared();
    for kind in ["real", "ce-sup", "ce-mix"] {
        let out = ok(&["gradcheck", "--data", p(&fx.data), "--model-kind", kind, "--n", "6", "--sample", "60"]);
        assert!(out.contains("max_relative_error="), "{out}");
    }
}

#[test]
fn experiment_writes_reproducible_reports() {
    let fx = prepared();
    let cfg = fx.tmp.path().join("exp.toml");
    fs::write(
        &cfg,
        "datasets = [\"toy\"]\nmodels = [\"ce-mix\", \"real\"]\nseeds = [1, 2]\nn = 4\nepochs = 2\n",
    )
    .unwrap();
    let root = p(fx.tmp.path());
    let out_a = fx.tmp.path().join("a");
    let out_b = fx.tmp.path().join("b");
    let grid = ok(&["experiment", "--config", p(&cfg), "--out", p(&out_a), "--data-root", root]);
    assert!(grid.contains("Real-Embed") && grid.contains("CE-Mix"), "{grid}");
    ok(&["experiment", "--config", p(&cfg), "--out", p(&out_b), "--data-root", root, "--jobs", "2"]);
    for f in ["results.csv", "significance.csv", "grid.txt"] {
        assert_eq!(fs::read(out_a.join(f)).unwrap(), fs::read(out_b.join(f)).unwrap(), "{f}");
    }
    let results = fs::read_to_string(out_a.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 5);
    assert!(results.starts_with("dataset,model,seed,accuracy\n"));
    let sig = fs::read_to_string(out_a.join("significance.csv")).unwrap();
    assert!(sig.contains("toy,real,ce-mix,welch,") && sig.contains("toy,real,ce-mix,mcnemar,"), "{sig}");
}
