use std::collections::BTreeMap;
use std::path::Path;

use cocite_core::pipeline::{read_profiles_jsonl, run_pipeline, PipelineConfig};
use cocite_core::synth::{generate, SynthConfig};
use cocite_core::topics::Strategy;

fn config_for(dir: &Path, out: &str) -> PipelineConfig {
    PipelineConfig {
        papers: dir.join("papers.jsonl"),
        mentorships: dir.join("mentorships.jsonl"),
        output_dir: dir.join(out),
        jobs: 2,
        n_bins: 3,
        ..Default::default()
    }
}

#[test]
fn planted_strategies_are_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(&SynthConfig {
        n_pairs: 50,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    corpus.write_to(dir.path()).unwrap();
    let summary = run_pipeline(&config_for(dir.path(), "out")).unwrap();
    assert_eq!(summary.n_profiles, 50, "{summary:?}");

    let profiles = read_profiles_jsonl(&dir.path().join("out/profiles.jsonl")).unwrap();
    let planted: BTreeMap<(&str, &str), (Strategy, f64)> = corpus
        .truth
        .pairs
        .iter()
        .map(|p| ((p.mentor_id.as_str(), p.mentee_id.as_str()), (p.strategy, p.r)))
        .collect();
    let mut mismatches = Vec::new();
    for p in &profiles {
        let want = planted[&(p.mentor_id.as_str(), p.mentee_id.as_str())];
        if p.strategy != Some(want.0) || p.r != Some(want.1) {
            mismatches.push((p.mentor_id.clone(), p.status.clone(), p.strategy, p.r, want));
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect())
        .collect()
}

#[test]
fn pure_innovate_cohort_report() {
    let dir = tempfile::tempdir().unwrap();
    generate(&SynthConfig {
        n_pairs: 9,
        seed: 2,
        strategy_mix: [0.0, 0.0, 1.0],
        ..Default::default()
    })
    .unwrap()
    .write_to(dir.path())
    .unwrap();
    run_pipeline(&config_for(dir.path(), "out")).unwrap();
    let out = dir.path().join("out");

    let fractions = read_csv(&out.join("strategy_fractions.csv"));
    for row in fractions.iter().filter(|r| r["field"] == "all") {
        let want = if row["strategy"] == "PURE_INNOVATE" { "1" } else { "0" };
        assert_eq!(row["fraction"], want, "{row:?}");
    }

    for row in read_csv(&out.join("ternary.csv")) {
        let s: f64 = ["p", "s", "n"].iter().map(|k| row[*k].parse::<f64>().unwrap()).sum();
        assert!((s - 1.0).abs() <= 1e-12, "{row:?}");
    }

    // every listed file exists with the stated number of data rows
    let manifest = read_csv(&out.join("manifest.csv"));
    assert!(manifest.len() >= 10);
    for row in &manifest {
        let path = out.join(&row["file"]);
        let text = std::fs::read_to_string(&path).unwrap();
        let rows: usize = row["rows"].parse().unwrap();
        let lines = text.lines().count();
        if row["file"].ends_with(".jsonl") {
            assert_eq!(lines, rows, "{}", row["file"]);
        } else {
            assert_eq!(lines, rows + 1, "{}", row["file"]);
        }
    }
}

#[test]
fn empty_mentorships_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    generate(&SynthConfig {
        n_pairs: 3,
        ..Default::default()
    })
    .unwrap()
    .write_to(dir.path())
    .unwrap();
    std::fs::write(dir.path().join("mentorships.jsonl"), "\n").unwrap();
    let err = run_pipeline(&config_for(dir.path(), "out")).unwrap_err();
    assert_eq!(err.code(), "empty_corpus");
    assert!(!dir.path().join("out").exists());
}
