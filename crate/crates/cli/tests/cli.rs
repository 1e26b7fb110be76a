use std::path::Path;
use std::process::{Command, Output};

fn cocite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocite"))
        .args(args)
        .output()
        .expect("spawn cocite")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, n: &str) {
    let out = cocite(&["synth", "--seed", "4", "--n-pairs", n, "--out", s(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn version_and_config_hash() {
    let out = cocite(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));

    let a = cocite(&["--config-hash"]);
    let b = cocite(&["--config-hash", "--set", "gamma=1.5"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
    // paths do not enter the hash
    let c = cocite(&["--config-hash", "--papers", "/elsewhere/papers.jsonl"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test\ngamma = 1.5\nmin_papers = 3\n").unwrap();
    let from_file = cocite(&["--config", s(&cfg), "--config-hash"]);
    let from_flags = cocite(&["--config-hash", "--set", "gamma=1.5", "--min-papers", "3"]);
    assert_eq!(from_file.stdout, from_flags.stdout);

    let bad = cocite(&["--config-hash", "--set", "no_such_key=1"]);
    assert!(!bad.status.success());
    let bad = cocite(&["--config-hash", "--jobs", "0"]);
    assert!(!bad.status.success());
}

#[test]
fn empty_mentorships_fail_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "3");
    std::fs::write(dir.path().join("mentorships.jsonl"), "").unwrap();
    let out_dir = dir.path().join("out");
    let out = cocite(&[
        "run",
        "--papers",
        s(&dir.path().join("papers.jsonl")),
        "--mentorships",
        s(&dir.path().join("mentorships.jsonl")),
        "--out",
        s(&out_dir),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("empty"));
    assert!(!out_dir.exists());
}

#[test]
fn synth_run_and_stages() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "12");
    let out_dir = dir.path().join("out");
    let base = [
        "--papers".to_string(),
        dir.path().join("papers.jsonl").display().to_string(),
        "--mentorships".to_string(),
        dir.path().join("mentorships.jsonl").display().to_string(),
        "--out".to_string(),
        out_dir.display().to_string(),
        "--jobs".to_string(),
        "2".to_string(),
        "--set".to_string(),
        "n_bins=2".to_string(),
    ];
    let run = |cmd: &[&str]| {
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend(base.iter().map(String::as_str));
        let out = cocite(&args);
        assert!(out.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };

    let first = run(&["run"]);
    assert!(first.contains("12 pairs: 12 profiles"), "{first}");
    let second = run(&["run"]);
    assert!(second.contains("12 cache hits, 0 misses"), "{second}");
    let manifest = std::fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    for file in ["profiles.csv", "ternary.csv", "regression.csv", "quadrants.csv"] {
        assert!(manifest.contains(file), "{file} missing from manifest");
    }

    for (stage, file) in [
        ("ingest", "ingest_report.csv"),
        ("pairs", "edges.csv"),
        ("detect", "topics.csv"),
        ("impact", "paper_impact.csv"),
        ("classify", "strategies.csv"),
        ("distance", "distances.csv"),
        ("career", "career.csv"),
        ("report", "ternary.csv"),
    ] {
        run(&[stage]);
        let path = out_dir.join(stage).join(file);
        assert!(path.exists(), "{} missing", path.display());
        let m = std::fs::read_to_string(out_dir.join(stage).join("manifest.csv")).unwrap();
        assert!(m.starts_with("file,rows,config_hash,version"), "{m}");
    }
    let strategies = std::fs::read_to_string(out_dir.join("classify/strategies.csv")).unwrap();
    assert_eq!(strategies.lines().count(), 13);
}
