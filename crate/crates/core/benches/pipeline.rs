use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cocite_core::community::{detect, DetectionConfig};
use cocite_core::corpus::ingest_readers;
use cocite_core::par::map_sequential;
use cocite_core::profile::{analyze_pair, AnalysisOptions};
use cocite_core::synth::{generate, planted_partition_graph, SynthConfig};
use cocite_core::IngestConfig;

fn pairs(c: &mut Criterion) {
    let corpus = generate(&SynthConfig {
        seed: 1,
        n_pairs: 64,
        ..Default::default()
    })
    .unwrap();
    let ingested = ingest_readers(
        corpus.papers_jsonl.as_bytes(),
        corpus.mentorships_jsonl.as_bytes(),
        &IngestConfig::default(),
    )
    .unwrap();
    let options = AnalysisOptions {
        min_papers: IngestConfig::default().min_papers,
        ..Default::default()
    };
    let analyze = |m: &_| analyze_pair(m, &ingested.index, &options).map(|a| a.profile);

    let mut group = c.benchmark_group("analyze_pairs");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_sequential(&ingested.mentorships, analyze)))
    });
    #[cfg(feature = "parallel")]
    for jobs in [2, 4, 0] {
        group.bench_with_input(BenchmarkId::new("parallel", jobs), &jobs, |b, &jobs| {
            b.iter(|| black_box(cocite_core::par::map_parallel(&ingested.mentorships, jobs, analyze)))
        });
    }
    group.finish();
}

fn louvain(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect");
    for blocks in [4, 16] {
        let (g, _) = planted_partition_graph(blocks, 25, 0.5, 0.01, 7);
        group.bench_with_input(BenchmarkId::from_parameter(blocks * 25), &g, |b, g| {
            b.iter(|| black_box(detect(g, &DetectionConfig::default())))
        });
    }
    group.finish();
}

criterion_group!(benches, pairs, louvain);
criterion_main!(benches);
