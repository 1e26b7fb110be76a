//! `cocite`: command-line driver for the co-citation topic pipeline.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cocite_core::corpus::Ingested;
use cocite_core::distance::average_distance;
use cocite_core::impact::Role;
use cocite_core::pipeline::{
    analyze_all, load_corpus, read_profiles_jsonl, report, run_pipeline, write_csv, write_manifest, FileRecord,
    PipelineConfig, VERSION,
};
use cocite_core::profile::PairAnalysis;
use cocite_core::stats::{binned_curve_with_quadratic_fit, model_ladder};
use cocite_core::synth::{generate, SynthConfig};
use cocite_core::Error;

#[derive(Debug, Parser)]
#[command(name = "cocite", version, about = "Co-citation topic analysis of mentor-mentee pairs")]
struct Cli {
    /// Plain-text `key = value` config file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one config key; repeatable.
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[arg(long, global = true)]
    papers: Option<PathBuf>,
    #[arg(long, global = true)]
    mentorships: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    min_papers: Option<usize>,
    #[arg(long, global = true)]
    year_min: Option<i32>,
    #[arg(long, global = true)]
    year_max: Option<i32>,
    /// Restrict mentorships to one field (`all` for none).
    #[arg(long, global = true)]
    field: Option<String>,
    /// Worker threads.
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,

    /// Print the hash of the effective config and exit.
    #[arg(long)]
    config_hash: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest the corpus and write the drop report and surviving mentorships.
    Ingest,
    /// Build every pair's co-citation graph.
    Pairs,
    /// Detect topic communities.
    Detect,
    /// Allocate topic impact to papers.
    Impact,
    /// Type topics and classify mentee strategies.
    Classify,
    /// Average shortest-path distance between mentor and mentee papers.
    Distance,
    /// Cumulative impact by career year.
    Career,
    /// Regression ladder and inverted-U fit over saved profiles.
    Stats(ProfilesArgs),
    /// Figure-data bundle from saved profiles.
    Report(ProfilesArgs),
    /// Generate a synthetic corpus with planted topics.
    Synth(SynthArgs),
    /// Full pipeline with per-pair caching.
    Run,
}

#[derive(Debug, Args)]
struct ProfilesArgs {
    /// Profiles written by `run`; defaults to `<out>/profiles.jsonl`.
    #[arg(long)]
    profiles: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    n_pairs: usize,
    /// Fractions of pure-follow, follow-and-innovate and pure-innovate pairs.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    mix: Option<Vec<f64>>,
}

fn build_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    for o in &cli.overrides {
        let (k, v) = o
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got `{o}`"))?;
        config.set(k.trim(), v)?;
    }
    let flags: [(&str, Option<String>); 8] = [
        ("papers", cli.papers.as_ref().map(|p| p.display().to_string())),
        ("mentorships", cli.mentorships.as_ref().map(|p| p.display().to_string())),
        ("output_dir", cli.out.as_ref().map(|p| p.display().to_string())),
        ("min_papers", cli.min_papers.map(|v| v.to_string())),
        ("year_min", cli.year_min.map(|v| v.to_string())),
        ("year_max", cli.year_max.map(|v| v.to_string())),
        ("field", cli.field.clone()),
        ("jobs", cli.jobs.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            config.set(k, &v)?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn f(v: f64) -> String {
    v.to_string()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn load(config: &PipelineConfig) -> Result<Ingested> {
    let (ingested, _) = load_corpus(config)?;
    if ingested.mentorships.is_empty() {
        return Err(Error::EmptyCorpus("no mentorship survived ingest".into()).into());
    }
    Ok(ingested)
}

fn stage_dir(config: &PipelineConfig, stage: &str) -> Result<PathBuf> {
    let dir = config.output_dir.join(stage);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Successful analyses sorted by (field, mentor, mentee), plus failure rows.
fn analyses(config: &PipelineConfig, ingested: &Ingested) -> (Vec<PairAnalysis>, Vec<Vec<String>>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (m, result) in ingested
        .mentorships
        .iter()
        .zip(analyze_all(ingested, &config.analysis, config.jobs))
    {
        match result {
            Ok(a) => ok.push(a),
            Err(e) => {
                log::warn!("pair ({}, {}) failed: {e}", m.mentor_id, m.mentee_id);
                failed.push(vec![
                    m.field.to_string(),
                    m.mentor_id.clone(),
                    m.mentee_id.clone(),
                    e.code().to_string(),
                    e.to_string(),
                ]);
            }
        }
    }
    ok.sort_by(|a, b| a.profile.sort_key().cmp(&b.profile.sort_key()));
    failed.sort();
    (ok, failed)
}

fn ids(a: &PairAnalysis) -> Vec<String> {
    vec![a.profile.field.to_string(), a.profile.mentor_id.clone(), a.profile.mentee_id.clone()]
}

fn with_ids(header: &[&'static str]) -> Vec<&'static str> {
    let mut h = vec!["field", "mentor_id", "mentee_id"];
    h.extend_from_slice(header);
    h
}

fn finish(dir: &Path, config: &PipelineConfig, files: Vec<FileRecord>) -> Result<()> {
    write_manifest(dir, config, &files)?;
    for r in &files {
        println!("{}\t{}", dir.join(&r.file).display(), r.rows);
    }
    Ok(())
}

fn cmd_ingest(config: &PipelineConfig) -> Result<()> {
    let ingested = load(config)?;
    let dir = stage_dir(config, "ingest")?;
    let rows: Vec<Vec<String>> = ingested
        .report
        .rows()
        .map(|(stage, reason, n)| vec![stage.to_string(), reason.to_string(), n.to_string()])
        .collect();
    let mut files = vec![write_csv(&dir, "ingest_report.csv", &["stage", "reason", "count"], &rows)?];
    let mut rows: Vec<Vec<String>> = ingested
        .mentorships
        .iter()
        .map(|m| vec![m.field.to_string(), m.mentor_id.clone(), m.mentee_id.clone(), opt(m.start_year)])
        .collect();
    rows.sort();
    files.push(write_csv(&dir, "mentorships.csv", &with_ids(&["start_year"]), &rows)?);
    eprintln!(
        "{} papers, {} authors, {} mentorships",
        ingested.index.paper_count(),
        ingested.index.author_count(),
        ingested.mentorships.len()
    );
    finish(&dir, config, files)
}

fn cmd_stage(config: &PipelineConfig, stage: &str) -> Result<()> {
    let ingested = load(config)?;
    let (done, failed) = analyses(config, &ingested);
    let dir = stage_dir(config, stage)?;
    let mut files = vec![write_csv(&dir, "failed_pairs.csv", &with_ids(&["code", "message"]), &failed)?];
    match stage {
        "pairs" => {
            let mut pairs = Vec::new();
            let mut edges = Vec::new();
            for a in &done {
                let p = &a.profile;
                let mut row = ids(a);
                row.extend([
                    p.n_nodes.to_string(),
                    p.n_edges.to_string(),
                    p.n_mentee_papers.to_string(),
                    p.n_mentor_papers.to_string(),
                    p.n_joint_papers.to_string(),
                ]);
                pairs.push(row);
                let nodes = a.graph.nodes();
                for ((x, y), sources) in a.graph.edges() {
                    let mut row = ids(a);
                    row.extend([nodes[x].paper_id.clone(), nodes[y].paper_id.clone(), sources.len().to_string()]);
                    edges.push(row);
                }
            }
            files.push(write_csv(
                &dir,
                "pairs.csv",
                &with_ids(&["n_nodes", "n_edges", "n_mentee_papers", "n_mentor_papers", "n_joint_papers"]),
                &pairs,
            )?);
            files.push(write_csv(&dir, "edges.csv", &with_ids(&["paper_a", "paper_b", "n_cociting"]), &edges)?);
        }
        "detect" => {
            let mut nodes = Vec::new();
            let mut topics = Vec::new();
            let mut summary = Vec::new();
            for a in &done {
                for (i, n) in a.graph.nodes().iter().enumerate() {
                    let mut row = ids(a);
                    row.extend([
                        n.paper_id.clone(),
                        n.authorship.to_string(),
                        n.pub_year.to_string(),
                        opt(a.partition.topic_of(i)),
                    ]);
                    nodes.push(row);
                }
                for t in a.partition.topics() {
                    let mut row = ids(a);
                    row.extend([
                        t.topic_id.to_string(),
                        t.size.to_string(),
                        t.mentee_papers.to_string(),
                        t.mentor_papers.to_string(),
                    ]);
                    topics.push(row);
                }
                let mut row = ids(a);
                row.extend([
                    a.partition.topics().len().to_string(),
                    a.partition.unassigned_count().to_string(),
                    f(a.partition.modularity_q),
                ]);
                summary.push(row);
            }
            files.push(write_csv(
                &dir,
                "assignments.csv",
                &with_ids(&["paper_id", "authorship", "pub_year", "topic_id"]),
                &nodes,
            )?);
            files.push(write_csv(
                &dir,
                "topics.csv",
                &with_ids(&["topic_id", "size", "mentee_papers", "mentor_papers"]),
                &topics,
            )?);
            files.push(write_csv(
                &dir,
                "modularity.csv",
                &with_ids(&["n_topics", "n_unassigned", "modularity_q"]),
                &summary,
            )?);
        }
        "impact" => {
            let mut papers = Vec::new();
            let mut topics = Vec::new();
            for a in &done {
                for t in &a.ledger.topics {
                    let mut row = ids(a);
                    row.extend([
                        t.topic_id.to_string(),
                        t.cociting_set_size.to_string(),
                        f(t.mentee_impact),
                        f(t.mentor_impact),
                    ]);
                    topics.push(row);
                    for p in &t.papers {
                        let mut row = ids(a);
                        row.extend([
                            t.topic_id.to_string(),
                            p.role.to_string(),
                            p.paper_id.clone(),
                            p.w.to_string(),
                            p.s.to_string(),
                            f(p.contribution),
                        ]);
                        papers.push(row);
                    }
                }
            }
            files.push(write_csv(
                &dir,
                "topic_impact.csv",
                &with_ids(&["topic_id", "cociting_set_size", "mentee_impact", "mentor_impact"]),
                &topics,
            )?);
            files.push(write_csv(
                &dir,
                "paper_impact.csv",
                &with_ids(&["topic_id", "role", "paper_id", "w", "s", "contribution"]),
                &papers,
            )?);
        }
        "classify" => {
            let mut types = Vec::new();
            let mut strategies = Vec::new();
            for a in &done {
                if let Some(typing) = &a.typing {
                    for (id, t) in &typing.types {
                        let mut row = ids(a);
                        row.extend([
                            id.to_string(),
                            t.to_string(),
                            opt(typing.mentor_proportions.get(id)),
                        ]);
                        types.push(row);
                    }
                }
                let p = &a.profile;
                let mut row = ids(a);
                row.extend([
                    p.status.clone(),
                    opt(p.strategy),
                    opt(p.r),
                    opt(p.n_primary),
                    opt(p.n_secondary),
                    opt(p.n_new),
                    opt(p.single_mentor_topic),
                ]);
                strategies.push(row);
            }
            files.push(write_csv(
                &dir,
                "topic_types.csv",
                &with_ids(&["topic_id", "type", "mentor_proportion"]),
                &types,
            )?);
            files.push(write_csv(
                &dir,
                "strategies.csv",
                &with_ids(&["status", "strategy", "r", "n_primary", "n_secondary", "n_new", "single_mentor_topic"]),
                &strategies,
            )?);
        }
        "distance" => {
            let mut rows = Vec::new();
            for a in &done {
                let mut row = ids(a);
                match average_distance(&a.graph, config.analysis.distance) {
                    Ok(d) => row.extend([
                        String::new(),
                        f(d.ave_distance),
                        d.n_pairs.to_string(),
                        d.max_finite_distance.to_string(),
                        d.n_disconnected_pairs.to_string(),
                    ]),
                    Err(e) => {
                        row.push(e.code().to_string());
                        row.extend(std::iter::repeat_n(String::new(), 4));
                    }
                }
                rows.push(row);
            }
            files.push(write_csv(
                &dir,
                "distances.csv",
                &with_ids(&["error", "ave_distance", "n_pairs", "max_finite_distance", "n_disconnected_pairs"]),
                &rows,
            )?);
        }
        "career" => {
            let mut rows = Vec::new();
            for a in &done {
                let p = &a.profile;
                for (role, series) in [(Role::Mentee, &p.mentee_career), (Role::Mentor, &p.mentor_career)] {
                    let Some(series) = series else { continue };
                    for pt in &series.points {
                        let mut row = ids(a);
                        row.extend([
                            role.to_string(),
                            pt.career_year.to_string(),
                            f(pt.cum_total),
                            f(pt.cum_primary),
                            f(pt.cum_secondary),
                            f(pt.cum_new),
                        ]);
                        rows.push(row);
                    }
                }
            }
            files.push(write_csv(
                &dir,
                "career.csv",
                &with_ids(&["role", "career_year", "cum_total", "cum_primary", "cum_secondary", "cum_new"]),
                &rows,
            )?);
        }
        other => bail!("unknown stage {other}"),
    }
    eprintln!("{} pairs analyzed, {} failed", done.len(), failed.len());
    finish(&dir, config, files)
}

fn profiles_path(config: &PipelineConfig, args: &ProfilesArgs) -> PathBuf {
    args.profiles
        .clone()
        .unwrap_or_else(|| config.output_dir.join("profiles.jsonl"))
}

fn cmd_stats(config: &PipelineConfig, args: &ProfilesArgs) -> Result<()> {
    let path = profiles_path(config, args);
    let profiles = read_profiles_jsonl(&path).with_context(|| format!("reading {}", path.display()))?;
    let dir = stage_dir(config, "stats")?;
    let ladder = model_ladder(&profiles, config.ingest.field, &config.ladder)?;
    let mut rows = Vec::new();
    for r in &ladder.results {
        for c in std::iter::once(&r.intercept).chain(&r.coefficients) {
            rows.push(vec![
                r.model_id.to_string(),
                c.variable.clone(),
                f(c.estimate),
                f(c.std_err),
                f(c.t),
                f(c.p),
                c.stars().to_string(),
                f(r.r2),
                r.n_observations.to_string(),
            ]);
        }
        println!("model {:>2}  n={}  R2={:.4}", r.model_id, r.n_observations, r.r2);
    }
    let mut files = vec![write_csv(
        &dir,
        "regression.csv",
        &["model_id", "variable", "coefficient", "std_err", "t", "p", "stars", "r2", "n"],
        &rows,
    )?];

    let (x, y): (Vec<f64>, Vec<f64>) = profiles
        .iter()
        .filter(|p| config.ingest.field.is_none_or(|fl| p.field == fl))
        .filter(|p| !config.ladder.require_career_30y || p.mentee_flags.is_some_and(|fl| fl.career_30y))
        .filter_map(|p| Some((p.ave_distance?, p.mentee_total_impact?)))
        .unzip();
    match binned_curve_with_quadratic_fit(&x, &y, config.n_bins) {
        Ok(curve) => {
            let q = curve.fit;
            println!("quadratic a={} b={} peak={}", q.a, q.b, opt(q.peak_x));
            files.push(write_csv(
                &dir,
                "fit.csv",
                &["a", "b", "c", "p_a", "p_b", "p_c", "peak_x", "inverted_u"],
                &[vec![
                    f(q.a),
                    f(q.b),
                    f(q.c),
                    f(q.p_a),
                    f(q.p_b),
                    f(q.p_c),
                    opt(q.peak_x),
                    q.inverted_u.to_string(),
                ]],
            )?);
        }
        Err(e) => log::warn!("curve fit skipped: {e}"),
    }
    finish(&dir, config, files)
}

fn cmd_report(config: &PipelineConfig, args: &ProfilesArgs) -> Result<()> {
    let path = profiles_path(config, args);
    let profiles = read_profiles_jsonl(&path).with_context(|| format!("reading {}", path.display()))?;
    let dir = stage_dir(config, "report")?;
    let files = report(&profiles, config, &dir, Vec::new())?;
    for r in &files {
        println!("{}\t{}", dir.join(&r.file).display(), r.rows);
    }
    Ok(())
}

fn cmd_synth(config: &PipelineConfig, args: &SynthArgs) -> Result<()> {
    let mut synth = SynthConfig {
        seed: args.seed,
        n_pairs: args.n_pairs,
        ..Default::default()
    };
    if let Some(mix) = &args.mix {
        synth.strategy_mix = [mix[0], mix[1], mix[2]];
    }
    let corpus = generate(&synth)?;
    corpus.write_to(&config.output_dir)?;
    println!(
        "{} pairs, {} papers written to {}",
        corpus.truth.pairs.len(),
        corpus.truth.papers.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn cmd_run(config: &PipelineConfig) -> Result<()> {
    let s = run_pipeline(config)?;
    println!(
        "{} pairs: {} profiles, {} failed, {} cache hits, {} misses",
        s.n_pairs, s.n_profiles, s.n_failed, s.cache_hits, s.cache_misses
    );
    println!("config_hash {}", s.config_hash);
    println!("output {}", config.output_dir.display());
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = build_config(&cli)?;
    if cli.config_hash {
        println!("{}\t{}", config.config_hash(), VERSION);
        return Ok(());
    }
    let Some(command) = &cli.command else {
        bail!("no subcommand given; see --help");
    };
    match command {
        Command::Ingest => cmd_ingest(&config),
        Command::Pairs => cmd_stage(&config, "pairs"),
        Command::Detect => cmd_stage(&config, "detect"),
        Command::Impact => cmd_stage(&config, "impact"),
        Command::Classify => cmd_stage(&config, "classify"),
        Command::Distance => cmd_stage(&config, "distance"),
        Command::Career => cmd_stage(&config, "career"),
        Command::Stats(args) => cmd_stats(&config, args),
        Command::Report(args) => cmd_report(&config, args),
        Command::Synth(args) => cmd_synth(&config, args),
        Command::Run => cmd_run(&config),
    }
}
