//! End-to-end runs: ingest, per-pair analysis with a content-hash cache, and
//! the plot-ready report bundle.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::career::{cohort_average_series, decade_summary, CareerSeries};
use crate::corpus::{ingest_readers, Field, IngestConfig, IngestReport, Ingested, MentorshipRecord};
use crate::error::{Error, Result};
use crate::par::map_ordered;
use crate::profile::{analyze_pair, AnalysisOptions, PairAnalysis, PairProfile};
use crate::stats::{
    binned_curve_with_quadratic_fit, ccdf, model_ladder, quadrant, ternary_coordinates, LadderOptions,
    Quadrant,
};
use crate::topics::{elite_and_outperforming_flags, EliteInput, EliteScope, Strategy};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub papers: PathBuf,
    pub mentorships: PathBuf,
    pub output_dir: PathBuf,
    pub ingest: IngestConfig,
    pub analysis: AnalysisOptions,
    pub top_fraction: f64,
    pub elite_scope: EliteScope,
    pub n_bins: usize,
    pub ladder: LadderOptions,
    /// Last career year of the averaged career series.
    pub max_career_year: i32,
    pub jobs: usize,
    pub use_cache: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let ingest = IngestConfig::default();
        Self {
            papers: PathBuf::from("papers.jsonl"),
            mentorships: PathBuf::from("mentorships.jsonl"),
            output_dir: PathBuf::from("out"),
            analysis: AnalysisOptions {
                min_papers: ingest.min_papers,
                ..Default::default()
            },
            ingest,
            top_fraction: 0.2,
            elite_scope: EliteScope::PerField,
            n_bins: 20,
            ladder: LadderOptions::default(),
            max_career_year: 40,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            use_cache: true,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::InvalidConfig(format!("{key} = `{value}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("{key} = `{value}`: expected a boolean"))),
    }
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 23] = [
        "papers",
        "mentorships",
        "output_dir",
        "field",
        "min_papers",
        "year_min",
        "year_max",
        "citation_window",
        "gamma",
        "seed",
        "min_community_size",
        "exclude_self_cocitation",
        "exclude_joint_self_pairs",
        "top_fraction",
        "elite_scope",
        "n_bins",
        "models",
        "log1p_outcome",
        "require_career_30y",
        "max_career_year",
        "jobs",
        "cache",
        "max_passes",
    ];

    /// Sets one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "papers" => self.papers = PathBuf::from(value),
            "mentorships" => self.mentorships = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "field" => {
                self.ingest.field = match value {
                    "" | "all" => None,
                    f => Some(f.parse()?),
                }
            }
            "min_papers" => {
                self.ingest.min_papers = parse(key, value)?;
                self.analysis.min_papers = self.ingest.min_papers;
            }
            "year_min" => self.ingest.year_min = parse(key, value)?,
            "year_max" => self.ingest.year_max = parse(key, value)?,
            "citation_window" => self.ingest.citation_window = parse(key, value)?,
            "gamma" => self.analysis.detection.gamma = parse(key, value)?,
            "seed" => self.analysis.detection.seed = parse(key, value)?,
            "min_community_size" => self.analysis.detection.min_community_size = parse(key, value)?,
            "max_passes" => self.analysis.detection.max_passes = parse(key, value)?,
            "exclude_self_cocitation" => {
                self.analysis.graph.exclude_self_cocitation = parse_bool(key, value)?
            }
            "exclude_joint_self_pairs" => {
                self.analysis.distance.exclude_joint_self_pairs = parse_bool(key, value)?
            }
            "top_fraction" => self.top_fraction = parse(key, value)?,
            "elite_scope" => {
                self.elite_scope = match value {
                    "per_field" | "field" => EliteScope::PerField,
                    "global" => EliteScope::Global,
                    _ => return Err(Error::InvalidConfig(format!("elite_scope = `{value}`"))),
                }
            }
            "n_bins" => self.n_bins = parse(key, value)?,
            "models" => {
                self.ladder.models = match value {
                    "" | "all" => Vec::new(),
                    list => list
                        .split(',')
                        .map(|m| parse(key, m.trim()))
                        .collect::<Result<_>>()?,
                }
            }
            "log1p_outcome" => self.ladder.log1p_outcome = parse_bool(key, value)?,
            "require_career_30y" => self.ladder.require_career_30y = parse_bool(key, value)?,
            "max_career_year" => self.max_career_year = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "cache" => self.use_cache = parse_bool(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = Self::default();
        c.apply_str(&text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.ingest.validate()?;
        if self.jobs < 1 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!("top_fraction {} outside (0, 1]", self.top_fraction)));
        }
        if self.n_bins == 0 {
            return Err(Error::InvalidConfig("n_bins must be positive".into()));
        }
        if !(self.analysis.detection.gamma > 0.0) {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        Ok(())
    }

    /// Options that change a single pair's analysis, as sorted `key=value` lines.
    fn pair_parameters(&self) -> String {
        let a = &self.analysis;
        let i = &self.ingest;
        let mut s = String::new();
        for (k, v) in [
            ("citation_window", i.citation_window.to_string()),
            ("exclude_joint_self_pairs", a.distance.exclude_joint_self_pairs.to_string()),
            ("exclude_self_cocitation", a.graph.exclude_self_cocitation.to_string()),
            ("gamma", a.detection.gamma.to_string()),
            ("max_levels", a.detection.max_levels.to_string()),
            ("max_passes", a.detection.max_passes.to_string()),
            ("min_community_size", a.detection.min_community_size.to_string()),
            ("min_papers", i.min_papers.to_string()),
            ("seed", a.detection.seed.to_string()),
            ("tolerance", a.detection.tolerance.to_string()),
            ("year_max", i.year_max.to_string()),
            ("year_min", i.year_min.to_string()),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Every option that affects output content, as sorted `key=value` lines.
    pub fn canonical(&self) -> String {
        let mut s = self.pair_parameters();
        let models: Vec<String> = self.ladder.models.iter().map(u32::to_string).collect();
        for (k, v) in [
            ("elite_scope", format!("{:?}", self.elite_scope)),
            ("field", self.ingest.field.map_or("all".to_string(), |f| f.to_string())),
            ("log1p_outcome", self.ladder.log1p_outcome.to_string()),
            ("max_career_year", self.max_career_year.to_string()),
            ("models", models.join(",")),
            ("n_bins", self.n_bins.to_string()),
            ("require_career_30y", self.ladder.require_career_30y.to_string()),
            ("top_fraction", self.top_fraction.to_string()),
            ("version", VERSION.to_string()),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Outcome of one pair, as stored in the cache.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PairOutcome {
    Profile(Box<PairProfile>),
    Failed {
        field: Field,
        mentor_id: String,
        mentee_id: String,
        code: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    result: PairOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub file: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_pairs: usize,
    pub n_profiles: usize,
    pub n_failed: usize,
    pub cache_hits: usize,
    pub cache_misses: usize,
    pub config_hash: String,
    pub files: Vec<FileRecord>,
}

fn hash_parts(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

/// Content hash of the two corpus files.
pub fn corpus_hash(papers: &[u8], mentorships: &[u8]) -> String {
    hash_parts(&[papers, mentorships])
}

fn pair_key(corpus: &str, params: &str, m: &MentorshipRecord) -> String {
    hash_parts(&[
        corpus.as_bytes(),
        params.as_bytes(),
        m.field.as_str().as_bytes(),
        m.mentor_id.as_bytes(),
        m.mentee_id.as_bytes(),
    ])
}

fn read_cache(path: &Path, key: &str) -> Option<PairOutcome> {
    let text = std::fs::read_to_string(path).ok()?;
    match serde_json::from_str::<CacheEntry>(&text) {
        Ok(entry) if entry.key == key => Some(entry.result),
        Ok(_) => None,
        Err(e) => {
            log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
            None
        }
    }
}

fn write_cache(path: &Path, key: &str, result: &PairOutcome) -> Result<()> {
    let entry = CacheEntry {
        key: key.to_string(),
        result: result.clone(),
    };
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec(&entry)?).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn failure(m: &MentorshipRecord, e: &Error) -> PairOutcome {
    PairOutcome::Failed {
        field: m.field,
        mentor_id: m.mentor_id.clone(),
        mentee_id: m.mentee_id.clone(),
        code: e.code().to_string(),
        message: e.to_string(),
    }
}

/// Runs [`analyze_pair`] over every mentorship, in input order.
pub fn analyze_all(ingested: &Ingested, options: &AnalysisOptions, jobs: usize) -> Vec<Result<PairAnalysis>> {
    map_ordered(&ingested.mentorships, jobs, |m| analyze_pair(m, &ingested.index, options))
}

/// Reads and ingests the corpus files named by the config.
pub fn load_corpus(config: &PipelineConfig) -> Result<(Ingested, String)> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::io(p, e));
    let papers = read(&config.papers)?;
    let mentorships = read(&config.mentorships)?;
    let hash = corpus_hash(&papers, &mentorships);
    let ingested = ingest_readers(BufReader::new(&papers[..]), BufReader::new(&mentorships[..]), &config.ingest)?;
    Ok((ingested, hash))
}

/// Sets `elite` and `outperforming` on every profile carrying the inputs.
pub fn apply_elite_flags(profiles: &mut [PairProfile], top_fraction: f64, scope: EliteScope) -> Result<()> {
    let idx: Vec<usize> = (0..profiles.len())
        .filter(|&i| {
            let p = &profiles[i];
            p.mentee_windowed_citations.is_some() && p.mentee_total_impact.is_some() && p.mentor_total_impact.is_some()
        })
        .collect();
    if idx.is_empty() {
        return Ok(());
    }
    let flags = {
        let rows: Vec<EliteInput<'_>> = idx
            .iter()
            .map(|&i| {
                let p = &profiles[i];
                EliteInput {
                    field: p.field,
                    mentee_id: &p.mentee_id,
                    windowed_citations: p.mentee_windowed_citations.unwrap_or_default(),
                    mentee_total_impact: p.mentee_total_impact.unwrap_or_default(),
                    mentor_total_impact: p.mentor_total_impact.unwrap_or_default(),
                }
            })
            .collect();
        elite_and_outperforming_flags(&rows, top_fraction, scope)?
    };
    for (&i, f) in idx.iter().zip(flags) {
        profiles[i].elite = Some(f.elite);
        profiles[i].outperforming = Some(f.outperforming);
    }
    Ok(())
}

/// Full run: ingest, analyze every pair (cached), flag elites, write the bundle.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary> {
    config.validate()?;
    let (ingested, corpus) = load_corpus(config)?;
    if ingested.mentorships.is_empty() {
        return Err(Error::EmptyCorpus("no mentorship survived ingest".into()));
    }
    let out = &config.output_dir;
    let cache_dir = out.join("cache");
    std::fs::create_dir_all(&cache_dir).map_err(|e| Error::io(&cache_dir, e))?;

    let params = config.pair_parameters();
    let hits = AtomicUsize::new(0);
    let outcomes: Vec<Result<PairOutcome>> = map_ordered(&ingested.mentorships, config.jobs, |m| {
        let key = pair_key(&corpus, &params, m);
        let path = cache_dir.join(format!("{key}.json"));
        if config.use_cache {
            if let Some(hit) = read_cache(&path, &key) {
                hits.fetch_add(1, Ordering::Relaxed);
                return Ok(hit);
            }
        }
        let result = match analyze_pair(m, &ingested.index, &config.analysis) {
            Ok(a) => PairOutcome::Profile(Box::new(a.profile)),
            Err(e) => {
                log::warn!("pair ({}, {}) failed: {e}", m.mentor_id, m.mentee_id);
                failure(m, &e)
            }
        };
        if config.use_cache {
            write_cache(&path, &key, &result)?;
        }
        Ok(result)
    });

    let mut profiles = Vec::new();
    let mut failed = Vec::new();
    for o in outcomes {
        match o? {
            PairOutcome::Profile(p) => profiles.push(*p),
            f @ PairOutcome::Failed { .. } => failed.push(f),
        }
    }
    profiles.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    apply_elite_flags(&mut profiles, config.top_fraction, config.elite_scope)?;

    let mut files = vec![
        write_profiles_jsonl(out, &profiles)?,
        write_profiles_csv(out, &profiles)?,
        write_failures(out, &failed)?,
        write_ingest_report(out, &ingested.report)?,
    ];
    files = report(&profiles, config, out, files)?;
    let n_pairs = ingested.mentorships.len();
    let cache_hits = hits.into_inner();
    log::info!(
        "{} pairs: {} profiles, {} failed, {} cache hits",
        n_pairs,
        profiles.len(),
        failed.len(),
        cache_hits
    );
    Ok(RunSummary {
        n_pairs,
        n_profiles: profiles.len(),
        n_failed: failed.len(),
        cache_hits,
        cache_misses: n_pairs - cache_hits,
        config_hash: config.config_hash(),
        files,
    })
}

/// Writes a CSV file and returns its record for the manifest.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<FileRecord> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(FileRecord {
        file: name.to_string(),
        rows: rows.len(),
    })
}

fn f(v: f64) -> String {
    v.to_string()
}

pub fn write_profiles_csv(dir: &Path, profiles: &[PairProfile]) -> Result<FileRecord> {
    let rows: Vec<Vec<String>> = profiles.iter().map(PairProfile::csv_record).collect();
    write_csv(dir, "profiles.csv", &PairProfile::CSV_HEADER, &rows)
}

pub fn write_profiles_jsonl(dir: &Path, profiles: &[PairProfile]) -> Result<FileRecord> {
    let path = dir.join("profiles.jsonl");
    std::fs::write(&path, crate::corpus::to_jsonl(profiles)?).map_err(|e| Error::io(&path, e))?;
    Ok(FileRecord {
        file: "profiles.jsonl".into(),
        rows: profiles.len(),
    })
}

pub fn read_profiles_jsonl(path: &Path) -> Result<Vec<PairProfile>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

fn write_failures(dir: &Path, failed: &[PairOutcome]) -> Result<FileRecord> {
    let mut rows: Vec<Vec<String>> = failed
        .iter()
        .filter_map(|f| match f {
            PairOutcome::Failed {
                field,
                mentor_id,
                mentee_id,
                code,
                message,
            } => Some(vec![field.to_string(), mentor_id.clone(), mentee_id.clone(), code.clone(), message.clone()]),
            PairOutcome::Profile(_) => None,
        })
        .collect();
    rows.sort();
    write_csv(dir, "failed_pairs.csv", &["field", "mentor_id", "mentee_id", "code", "message"], &rows)
}

fn write_ingest_report(dir: &Path, report: &IngestReport) -> Result<FileRecord> {
    let rows: Vec<Vec<String>> = report
        .rows()
        .map(|(stage, reason, n)| vec![stage.to_string(), reason.to_string(), n.to_string()])
        .collect();
    write_csv(dir, "ingest_report.csv", &["stage", "reason", "count"], &rows)
}

/// Field groups of a cohort: each field present, then `all`.
fn groups(profiles: &[PairProfile]) -> Vec<(String, Vec<&PairProfile>)> {
    let mut by_field: BTreeMap<Field, Vec<&PairProfile>> = BTreeMap::new();
    for p in profiles {
        by_field.entry(p.field).or_default().push(p);
    }
    let mut out: Vec<(String, Vec<&PairProfile>)> =
        by_field.into_iter().map(|(f, v)| (f.to_string(), v)).collect();
    out.push(("all".into(), profiles.iter().collect()));
    out
}

fn ids(p: &PairProfile) -> [String; 3] {
    [p.field.to_string(), p.mentor_id.clone(), p.mentee_id.clone()]
}

/// Writes the figure-data files and the manifest. `extra` lists files already
/// written to `out_dir` that the manifest should include.
pub fn report(
    profiles: &[PairProfile],
    config: &PipelineConfig,
    out_dir: &Path,
    extra: Vec<FileRecord>,
) -> Result<Vec<FileRecord>> {
    if profiles.is_empty() {
        return Err(Error::EmptyCohort);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = extra;
    let groups = groups(profiles);

    // CCDF of the new-topic ratio R
    let mut rows = Vec::new();
    for (g, members) in &groups {
        let r: Vec<f64> = members.iter().filter_map(|p| p.r).collect();
        if let Ok(steps) = ccdf(&r) {
            rows.extend(steps.into_iter().map(|(x, p)| vec![g.clone(), f(x), f(p)]));
        }
    }
    files.push(write_csv(out_dir, "ccdf.csv", &["field", "x", "ccdf"], &rows)?);

    let mut rows = Vec::new();
    for (g, members) in &groups {
        let classified: Vec<Strategy> = members.iter().filter_map(|p| p.strategy).collect();
        if classified.is_empty() {
            continue;
        }
        for s in Strategy::ALL {
            let n = classified.iter().filter(|x| **x == s).count();
            rows.push(vec![
                g.clone(),
                s.to_string(),
                n.to_string(),
                f(n as f64 / classified.len() as f64),
            ]);
        }
    }
    files.push(write_csv(out_dir, "strategy_fractions.csv", &["field", "strategy", "count", "fraction"], &rows)?);

    let rows: Vec<Vec<String>> = profiles
        .iter()
        .filter_map(|p| {
            let s = p.strategy?;
            let (np, ns, nn) = (p.n_primary?, p.n_secondary?, p.n_new?);
            let mut r = ids(p).to_vec();
            r.extend([s.to_string(), (np + ns + nn).to_string(), np.to_string(), ns.to_string(), nn.to_string()]);
            Some(r)
        })
        .collect();
    files.push(write_csv(
        out_dir,
        "topic_counts.csv",
        &["field", "mentor_id", "mentee_id", "strategy", "n_topics", "n_primary", "n_secondary", "n_new"],
        &rows,
    )?);

    let rows: Vec<Vec<String>> = profiles
        .iter()
        .filter_map(|p| {
            let t = p.impact_ratios?;
            let mut r = ids(p).to_vec();
            r.extend([
                p.strategy.map_or(String::new(), |s| s.to_string()),
                f(t.primary),
                f(t.secondary),
                f(t.new),
            ]);
            Some(r)
        })
        .collect();
    files.push(write_csv(
        out_dir,
        "impact_ratios.csv",
        &["field", "mentor_id", "mentee_id", "strategy", "primary", "secondary", "new"],
        &rows,
    )?);

    let mut series_rows = Vec::new();
    let mut decade_rows = Vec::new();
    for (g, members) in &groups {
        for (role, pick) in [
            ("MENTEE", (|p: &PairProfile| p.mentee_career.as_ref()) as fn(&PairProfile) -> Option<&CareerSeries>),
            ("MENTOR", |p: &PairProfile| p.mentor_career.as_ref()),
        ] {
            let series: Vec<&CareerSeries> = members.iter().filter_map(|p| pick(p)).collect();
            let Ok(avg) = cohort_average_series(&series, config.max_career_year) else {
                continue;
            };
            for a in avg {
                series_rows.push(vec![
                    g.clone(),
                    role.to_string(),
                    a.career_year.to_string(),
                    a.n_contributors.to_string(),
                    f(a.cum_total),
                    f(a.cum_primary),
                    f(a.cum_secondary),
                    f(a.cum_new),
                ]);
            }
            for d in decade_summary(&series) {
                decade_rows.push(vec![
                    g.clone(),
                    role.to_string(),
                    d.decade.to_string(),
                    d.n_members.to_string(),
                    f(d.mean_primary),
                    f(d.median_primary),
                    f(d.mean_secondary),
                    f(d.median_secondary),
                    f(d.mean_new),
                    f(d.median_new),
                ]);
            }
        }
    }
    files.push(write_csv(
        out_dir,
        "career_series.csv",
        &[
            "field",
            "role",
            "career_year",
            "n_contributors",
            "cum_total",
            "cum_primary",
            "cum_secondary",
            "cum_new",
        ],
        &series_rows,
    )?);
    files.push(write_csv(
        out_dir,
        "career_decades.csv",
        &[
            "field",
            "role",
            "decade",
            "n_members",
            "mean_primary",
            "median_primary",
            "mean_secondary",
            "median_secondary",
            "mean_new",
            "median_new",
        ],
        &decade_rows,
    )?);

    let mut rows = Vec::new();
    for p in profiles {
        let (Ok(q), Some(e), Some(r)) = (quadrant(p), p.mentee_impacts, p.mentor_impacts) else {
            continue;
        };
        let mut row = ids(p).to_vec();
        row.extend([
            p.elite.map_or(String::new(), |b| b.to_string()),
            f(e.primary - r.primary),
            f(e.secondary - r.secondary),
            q.as_str().to_string(),
        ]);
        rows.push(row);
    }
    files.push(write_csv(
        out_dir,
        "quadrants.csv",
        &["field", "mentor_id", "mentee_id", "elite", "delta_primary", "delta_secondary", "quadrant"],
        &rows,
    )?);

    let mut rows = Vec::new();
    for (g, members) in &groups {
        for (subset, elite_only) in [("all", false), ("elite", true)] {
            let qs: Vec<Quadrant> = members
                .iter()
                .filter(|p| !elite_only || p.elite == Some(true))
                .filter_map(|p| quadrant(p).ok())
                .collect();
            if qs.is_empty() {
                continue;
            }
            for q in Quadrant::ALL {
                let n = qs.iter().filter(|x| **x == q).count();
                rows.push(vec![
                    g.clone(),
                    subset.to_string(),
                    q.as_str().to_string(),
                    n.to_string(),
                    f(n as f64 / qs.len() as f64),
                ]);
            }
        }
    }
    files.push(write_csv(out_dir, "quadrant_shares.csv", &["field", "subset", "quadrant", "count", "share"], &rows)?);

    let rows: Vec<Vec<String>> = profiles
        .iter()
        .filter_map(|p| {
            let (a, b, c) = ternary_coordinates(&p.mentee_impacts?).ok()?;
            let mut r = ids(p).to_vec();
            r.extend([f(a), f(b), f(c)]);
            Some(r)
        })
        .collect();
    files.push(write_csv(out_dir, "ternary.csv", &["field", "mentor_id", "mentee_id", "p", "s", "n"], &rows)?);

    let mut curve_rows = Vec::new();
    let mut fit_rows = Vec::new();
    let mut reg_rows = Vec::new();
    let mut status_rows = Vec::new();
    let fields: Vec<Field> = {
        let mut v: Vec<Field> = profiles.iter().map(|p| p.field).collect();
        v.dedup();
        v
    };
    for field in fields {
        let cohort: Vec<&PairProfile> = profiles
            .iter()
            .filter(|p| p.field == field)
            .filter(|p| !config.ladder.require_career_30y || p.mentee_flags.is_some_and(|f| f.career_30y))
            .filter(|p| p.ave_distance.is_some() && p.mentee_total_impact.is_some())
            .collect();
        let x: Vec<f64> = cohort.iter().filter_map(|p| p.ave_distance).collect();
        let y: Vec<f64> = cohort
            .iter()
            .filter_map(|p| p.mentee_total_impact)
            .map(|v| if config.ladder.log1p_outcome { v.ln_1p() } else { v })
            .collect();
        match binned_curve_with_quadratic_fit(&x, &y, config.n_bins) {
            Ok(c) => {
                for b in &c.bins {
                    curve_rows.push(vec![
                        field.to_string(),
                        b.bin_index.to_string(),
                        b.n.to_string(),
                        f(b.x_mean),
                        f(b.y_mean),
                        f(b.y_stderr),
                    ]);
                }
                let fit = c.fit;
                fit_rows.push(vec![
                    field.to_string(),
                    f(fit.a),
                    f(fit.b),
                    f(fit.c),
                    f(fit.p_a),
                    f(fit.p_b),
                    f(fit.p_c),
                    fit.peak_x.map_or(String::new(), f),
                    fit.inverted_u.to_string(),
                ]);
                status_rows.push(vec![field.to_string(), "curve".into(), "ok".into(), String::new()]);
            }
            Err(e) => {
                log::warn!("no curve for {field}: {e}");
                status_rows.push(vec![field.to_string(), "curve".into(), e.code().into(), e.to_string()]);
            }
        }
        match model_ladder(profiles, Some(field), &config.ladder) {
            Ok(ladder) => {
                for r in &ladder.results {
                    for c in std::iter::once(&r.intercept).chain(&r.coefficients) {
                        reg_rows.push(vec![
                            field.to_string(),
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
                }
                status_rows.push(vec![field.to_string(), "regression".into(), "ok".into(), String::new()]);
            }
            Err(e) => {
                log::warn!("no regression for {field}: {e}");
                status_rows.push(vec![field.to_string(), "regression".into(), e.code().into(), e.to_string()]);
            }
        }
    }
    files.push(write_csv(
        out_dir,
        "curve.csv",
        &["field", "bin_index", "n", "x_mean", "y_mean", "y_stderr"],
        &curve_rows,
    )?);
    files.push(write_csv(
        out_dir,
        "fit.csv",
        &["field", "a", "b", "c", "p_a", "p_b", "p_c", "peak_x", "inverted_u"],
        &fit_rows,
    )?);
    files.push(write_csv(
        out_dir,
        "regression.csv",
        &["field", "model_id", "variable", "coefficient", "std_err", "t", "p", "stars", "r2", "n"],
        &reg_rows,
    )?);
    files.push(write_csv(out_dir, "stats_status.csv", &["field", "analysis", "status", "message"], &status_rows)?);

    write_manifest(out_dir, config, &files)?;
    Ok(files)
}

/// Writes `manifest.csv`: every listed file with its row count, the config
/// hash and the version.
pub fn write_manifest(out_dir: &Path, config: &PipelineConfig, files: &[FileRecord]) -> Result<FileRecord> {
    let hash = config.config_hash();
    let mut rows: Vec<Vec<String>> = files
        .iter()
        .map(|r| vec![r.file.clone(), r.rows.to_string(), hash.clone(), VERSION.to_string()])
        .collect();
    rows.sort();
    write_csv(out_dir, "manifest.csv", &["file", "rows", "config_hash", "version"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut c = PipelineConfig::default();
        c.apply_str("# comment\nfield = physics\ngamma=1.5\nmodels = 1, 2,10\njobs=3\ncache = off\n")
            .unwrap();
        assert_eq!(c.ingest.field, Some(Field::Physics));
        assert_eq!(c.analysis.detection.gamma, 1.5);
        assert_eq!(c.ladder.models, vec![1, 2, 10]);
        assert_eq!(c.jobs, 3);
        assert!(!c.use_cache);
        assert!(c.set("nonsense", "1").is_err());
        assert!(c.apply_str("gamma 2").is_err());
        for k in PipelineConfig::KEYS {
            assert!(!matches!(c.set(k, "zzz"), Err(Error::InvalidConfig(m)) if m.starts_with("unknown key")));
        }
    }

    #[test]
    fn hash_ignores_paths_and_jobs() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        b.set("jobs", "7").unwrap();
        b.set("output_dir", "elsewhere").unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        b.set("gamma", "2").unwrap();
        assert_ne!(a.config_hash(), b.config_hash());
        let c = PipelineConfig {
            jobs: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
