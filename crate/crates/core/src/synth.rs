//! Synthetic corpora with planted topics, strategies and outcomes.
//!
//! Every pair is generated independently: a mentor with a few topics, a
//! mentee who follows some of them and/or opens new ones, and for each topic
//! a set of standalone citing papers that cite most of its papers, plus a few
//! bridging citers that join two topics by a single co-citation. The citers make each topic a dense co-citation
//! block that community detection should recover.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{to_jsonl, CohortFlags, Field, MentorshipRecord, PaperRecord};
use crate::error::{Error, Result};
use crate::pairgraph::{Authorship, PairGraph, PairNode};
use crate::profile::{Covariates, PairProfile};
use crate::topics::Strategy;

/// Latest publication year a generated paper may have.
pub const YEAR_LIMIT: i64 = 2021;

/// Inclusive integer range sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub min: i64,
    pub max: i64,
}

impl IntRange {
    pub const fn new(min: i64, max: i64) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> i64 {
        rng.random_range(self.min..=self.max)
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::InvalidConfig(format!("{name}: min {} > max {}", self.min, self.max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_pairs: usize,
    /// Pairs are assigned to fields round robin.
    pub fields: Vec<Field>,
    /// Fractions of pure-follow, follow-and-innovate and pure-innovate pairs.
    pub strategy_mix: [f64; 3],
    pub mentor_topics: IntRange,
    /// New topics of an innovating mentee.
    pub new_topics: IntRange,
    pub mentor_papers_per_topic: IntRange,
    pub mentee_papers_per_topic: IntRange,
    /// Topics are topped up to at least this many papers.
    pub min_topic_size: usize,
    /// Each author is topped up to at least this many papers.
    pub min_author_papers: usize,
    pub citers_per_topic: IntRange,
    /// Probability that a topic's citer cites each paper of the topic.
    pub citer_rate: f64,
    /// Per citer of a topic, probability of an extra bridging citer that cites
    /// one paper of the topic and one paper of another topic.
    pub cross_rate: f64,
    /// Extra coauthors per paper, drawn from a small per-pair pool.
    pub coauthors: IntRange,
    pub coauthor_pool: usize,
    pub mentor_start: IntRange,
    /// Mentee first-publication year minus the mentor's.
    pub mentee_offset: IntRange,
    pub career_len: IntRange,
    /// Joint papers within five years of the mentee's start, and after.
    pub joint_early: IntRange,
    pub joint_late: IntRange,
    /// Years between a topic's latest cited paper and its citers.
    pub citer_lag: IntRange,
    pub outcome: PlantedOutcome,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_pairs: 50,
            fields: vec![Field::Chemistry, Field::Neuroscience, Field::Physics],
            strategy_mix: [0.3, 0.4, 0.3],
            mentor_topics: IntRange::new(2, 3),
            new_topics: IntRange::new(1, 2),
            mentor_papers_per_topic: IntRange::new(6, 9),
            mentee_papers_per_topic: IntRange::new(5, 8),
            min_topic_size: 12,
            min_author_papers: 20,
            citers_per_topic: IntRange::new(12, 16),
            citer_rate: 0.9,
            cross_rate: 0.02,
            coauthors: IntRange::new(0, 2),
            coauthor_pool: 6,
            mentor_start: IntRange::new(1960, 1968),
            mentee_offset: IntRange::new(5, 10),
            career_len: IntRange::new(28, 38),
            joint_early: IntRange::new(1, 2),
            joint_late: IntRange::new(0, 2),
            citer_lag: IntRange::new(0, 4),
            outcome: PlantedOutcome::default(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.strategy_mix.iter().sum();
        if self.strategy_mix.iter().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "strategy mix {:?} must be fractions summing to 1",
                self.strategy_mix
            )));
        }
        for (name, rate) in [("citer_rate", self.citer_rate), ("cross_rate", self.cross_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!("{name} {rate} outside [0, 1]")));
            }
        }
        if self.fields.is_empty() {
            return Err(Error::InvalidConfig("no fields".into()));
        }
        for (name, r) in [
            ("mentor_topics", self.mentor_topics),
            ("new_topics", self.new_topics),
            ("mentor_papers_per_topic", self.mentor_papers_per_topic),
            ("mentee_papers_per_topic", self.mentee_papers_per_topic),
            ("citers_per_topic", self.citers_per_topic),
            ("coauthors", self.coauthors),
            ("mentor_start", self.mentor_start),
            ("mentee_offset", self.mentee_offset),
            ("career_len", self.career_len),
            ("joint_early", self.joint_early),
            ("joint_late", self.joint_late),
            ("citer_lag", self.citer_lag),
        ] {
            r.check(name)?;
            if r.min < 0 && name != "mentee_offset" {
                return Err(Error::InvalidConfig(format!("{name} must be nonnegative")));
            }
        }
        if self.mentor_topics.min < 1 || self.new_topics.min < 1 {
            return Err(Error::InvalidConfig("topic counts must be at least 1".into()));
        }
        if self.mentee_papers_per_topic.min < 1 || self.mentor_papers_per_topic.min < 1 {
            return Err(Error::InvalidConfig("papers per topic must be at least 1".into()));
        }
        if self.coauthors.max > 0 && self.coauthor_pool == 0 {
            return Err(Error::InvalidConfig("coauthors need a nonempty pool".into()));
        }
        let latest = self.mentor_start.max + self.mentee_offset.max.max(0) + self.career_len.max + self.citer_lag.max;
        if latest > YEAR_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "papers could be dated up to {latest}, after {YEAR_LIMIT}"
            )));
        }
        if !(self.outcome.noise_sd >= 0.0) {
            return Err(Error::InvalidConfig("noise_sd must be >= 0".into()));
        }
        Ok(())
    }
}

/// `y = intercept + linear d + quadratic d^2 + career career_len + noise`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedOutcome {
    pub intercept: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub career: f64,
    pub noise_sd: f64,
}

impl Default for PlantedOutcome {
    fn default() -> Self {
        Self {
            intercept: 1.0,
            linear: 4.0,
            quadratic: -1.0,
            career: 0.5,
            noise_sd: 1.0,
        }
    }
}

impl PlantedOutcome {
    /// Distance of the vertex, `-linear / (2 quadratic)`.
    pub fn peak(&self) -> f64 {
        -self.linear / (2.0 * self.quadratic)
    }

    pub fn mean(&self, distance: f64, career_len: f64) -> f64 {
        self.intercept + self.linear * distance + self.quadratic * distance * distance + self.career * career_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlantedTopicKind {
    /// Mentor topic the mentee did not enter.
    MentorOnly,
    /// Mentor topic the mentee follows.
    Shared,
    New,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTopic {
    pub topic: u32,
    pub kind: PlantedTopicKind,
    pub papers: Vec<String>,
}

/// Planted facts about one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTruth {
    pub field: Field,
    pub mentor_id: String,
    pub mentee_id: String,
    pub strategy: Strategy,
    pub r: f64,
    pub n_shared: usize,
    pub n_new: usize,
    pub topics: Vec<PlantedTopic>,
    pub mentee_first_pub_year: i32,
    pub mentee_career_len: i32,
    pub mentor_first_pub_year: i32,
    pub mentor_career_len: i32,
    pub n_joint: usize,
}

impl PairTruth {
    /// Planted topic of every pair paper.
    pub fn labels(&self) -> BTreeMap<&str, u32> {
        self.topics
            .iter()
            .flat_map(|t| t.papers.iter().map(move |p| (p.as_str(), t.topic)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub config: SynthConfig,
    pub pairs: Vec<PairTruth>,
    /// Every generated paper, for brute-force oracles.
    pub papers: Vec<PaperRecord>,
}

impl GroundTruth {
    pub fn pair(&self, mentor_id: &str, mentee_id: &str) -> Result<&PairTruth> {
        self.pairs
            .iter()
            .find(|p| p.mentor_id == mentor_id && p.mentee_id == mentee_id)
            .ok_or_else(|| Error::UnknownPair(mentor_id.to_string(), mentee_id.to_string()))
    }

    /// One JSON line per pair.
    pub fn to_jsonl(&self) -> Result<String> {
        to_jsonl(&self.pairs)
    }
}

/// Generated corpus files plus the planted truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub papers_jsonl: String,
    pub mentorships_jsonl: String,
    pub truth: GroundTruth,
}

impl SynthCorpus {
    /// Writes `papers.jsonl`, `mentorships.jsonl` and `ground_truth.jsonl`.
    pub fn write_to(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, content) in [
            ("papers.jsonl", self.papers_jsonl.clone()),
            ("mentorships.jsonl", self.mentorships_jsonl.clone()),
            ("ground_truth.jsonl", self.truth.to_jsonl()?),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Splits `n` items across `fractions` by largest remainder, so the realized
/// counts match the fractions as closely as integers allow.
fn apportion(n: usize, fractions: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    let mut left = n - counts.iter().sum::<usize>();
    for i in order {
        if left == 0 {
            break;
        }
        if fractions[i] > 0.0 {
            counts[i] += 1;
            left -= 1;
        }
    }
    counts
}

struct Draft {
    id: String,
    authors: Vec<String>,
    year: i32,
    topic: usize,
    refs: Vec<String>,
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let counts = apportion(config.n_pairs, &config.strategy_mix);
    let mut strategies: Vec<Strategy> = Strategy::ALL
        .iter()
        .zip(&counts)
        .flat_map(|(s, &c)| std::iter::repeat_n(*s, c))
        .collect();
    strategies.shuffle(&mut rng);

    let mut papers = Vec::new();
    let mut mentorships = Vec::new();
    let mut pairs = Vec::new();
    for (k, strategy) in strategies.into_iter().enumerate() {
        let field = config.fields[k % config.fields.len()];
        let (truth, recs) = generate_pair(config, k, field, strategy, &mut rng);
        mentorships.push(MentorshipRecord {
            mentor_id: truth.mentor_id.clone(),
            mentee_id: truth.mentee_id.clone(),
            start_year: Some(truth.mentee_first_pub_year),
            field,
        });
        pairs.push(truth);
        papers.extend(recs);
    }
    Ok(SynthCorpus {
        papers_jsonl: to_jsonl(&papers)?,
        mentorships_jsonl: to_jsonl(&mentorships)?,
        truth: GroundTruth {
            config: config.clone(),
            pairs,
            papers,
        },
    })
}

fn generate_pair(
    config: &SynthConfig,
    k: usize,
    field: Field,
    strategy: Strategy,
    rng: &mut ChaCha8Rng,
) -> (PairTruth, Vec<PaperRecord>) {
    let mentor = format!("m{k:05}");
    let mentee = format!("e{k:05}");
    let n_mentor_topics = config.mentor_topics.sample(rng) as usize;
    let n_followed = match strategy {
        Strategy::PureInnovate => 0,
        _ => rng.random_range(1..=n_mentor_topics),
    };
    let n_new = match strategy {
        Strategy::PureFollow => 0,
        _ => config.new_topics.sample(rng) as usize,
    };

    let mentor_start = config.mentor_start.sample(rng) as i32;
    let mentor_len = config.career_len.sample(rng) as i32;
    let mentee_start = mentor_start + config.mentee_offset.sample(rng) as i32;
    let mentee_len = config.career_len.sample(rng) as i32;
    let year_in = |rng: &mut ChaCha8Rng, start: i32, len: i32| rng.random_range(start..=start + len);

    // topics 0..n_mentor_topics belong to the mentor; the first n_followed of
    // them are shared; the rest are new mentee topics
    let n_topics = n_mentor_topics + n_new;
    let mut topic_order: Vec<usize> = (0..n_mentor_topics).collect();
    topic_order.shuffle(rng);
    let followed: BTreeSet<usize> = topic_order[..n_followed].iter().copied().collect();
    let kind = |t: usize| {
        if t >= n_mentor_topics {
            PlantedTopicKind::New
        } else if followed.contains(&t) {
            PlantedTopicKind::Shared
        } else {
            PlantedTopicKind::MentorOnly
        }
    };

    let pool: Vec<String> = (0..config.coauthor_pool).map(|i| format!("a{k:05}_{i}")).collect();
    let mut drafts: Vec<Draft> = Vec::new();
    let add = |drafts: &mut Vec<Draft>, rng: &mut ChaCha8Rng, owners: &[&str], year: i32, topic: usize| {
        let mut authors: Vec<String> = owners.iter().map(|s| s.to_string()).collect();
        let extra = config.coauthors.sample(rng) as usize;
        for _ in 0..extra {
            let a = pool[rng.random_range(0..pool.len())].clone();
            if !authors.contains(&a) {
                authors.push(a);
            }
        }
        let id = format!("p{k:05}_{:04}", drafts.len());
        drafts.push(Draft {
            id,
            authors,
            year,
            topic,
            refs: Vec::new(),
        });
    };

    // career endpoints are pinned so career lengths are exact
    let mentor_topics: Vec<usize> = (0..n_mentor_topics).collect();
    let mentee_topics: Vec<usize> = (0..n_topics).filter(|&t| kind(t) != PlantedTopicKind::MentorOnly).collect();
    for &t in &mentor_topics {
        for _ in 0..config.mentor_papers_per_topic.sample(rng) {
            let y = year_in(rng, mentor_start, mentor_len);
            add(&mut drafts, rng, &[&mentor], y, t);
        }
    }
    for &t in &mentee_topics {
        for _ in 0..config.mentee_papers_per_topic.sample(rng) {
            let y = year_in(rng, mentee_start, mentee_len);
            add(&mut drafts, rng, &[&mentee], y, t);
        }
    }
    let shared: Vec<usize> = followed.iter().copied().collect();
    let mut n_joint = 0;
    if !shared.is_empty() {
        let early = config.joint_early.sample(rng);
        let late = config.joint_late.sample(rng);
        for i in 0..(early + late) {
            let y = if i < early {
                rng.random_range(mentee_start..=mentee_start + 5)
            } else {
                rng.random_range(mentee_start + 6..=mentee_start + mentee_len.max(6))
            };
            let t = shared[i as usize % shared.len()];
            add(&mut drafts, rng, &[&mentor, &mentee], y, t);
            n_joint += 1;
        }
    }

    // top up authors, then topics
    let owned = |drafts: &[Draft], who: &str| drafts.iter().filter(|d| d.authors.iter().any(|a| a == who)).count();
    let mut i = 0;
    while owned(&drafts, &mentor) < config.min_author_papers {
        let t = mentor_topics[i % mentor_topics.len()];
        let y = year_in(rng, mentor_start, mentor_len);
        add(&mut drafts, rng, &[&mentor], y, t);
        i += 1;
    }
    let mut i = 0;
    while owned(&drafts, &mentee) < config.min_author_papers {
        let t = mentee_topics[i % mentee_topics.len()];
        let y = year_in(rng, mentee_start, mentee_len);
        add(&mut drafts, rng, &[&mentee], y, t);
        i += 1;
    }
    for t in 0..n_topics {
        while drafts.iter().filter(|d| d.topic == t).count() < config.min_topic_size {
            if kind(t) == PlantedTopicKind::New {
                let y = year_in(rng, mentee_start, mentee_len);
                add(&mut drafts, rng, &[&mentee], y, t);
            } else {
                let y = year_in(rng, mentor_start, mentor_len);
                add(&mut drafts, rng, &[&mentor], y, t);
            }
        }
    }
    pin_endpoints(&mut drafts, &mentor, mentor_start, mentor_len);
    pin_endpoints(&mut drafts, &mentee, mentee_start, mentee_len);

    // citers
    let mut citers: Vec<Draft> = Vec::new();
    for t in 0..n_topics {
        for _ in 0..config.citers_per_topic.sample(rng) {
            let mut refs = Vec::new();
            let mut latest = i32::MIN;
            for d in drafts.iter().filter(|d| d.topic == t) {
                if rng.random_bool(config.citer_rate) {
                    refs.push(d.id.clone());
                    latest = latest.max(d.year);
                }
            }
            if !refs.is_empty() {
                let year = latest + config.citer_lag.sample(rng) as i32;
                push_citer(&mut citers, k, year, t, refs);
            }
            let inside: Vec<&Draft> = drafts.iter().filter(|d| d.topic == t).collect();
            let outside: Vec<&Draft> = drafts.iter().filter(|d| d.topic != t).collect();
            if !outside.is_empty() && rng.random_bool(config.cross_rate) {
                let a = inside[rng.random_range(0..inside.len())];
                let b = outside[rng.random_range(0..outside.len())];
                let year = a.year.max(b.year) + config.citer_lag.sample(rng) as i32;
                push_citer(&mut citers, k, year, t, vec![a.id.clone(), b.id.clone()]);
            }
        }
    }

    let topics = (0..n_topics)
        .map(|t| PlantedTopic {
            topic: t as u32,
            kind: kind(t),
            papers: drafts.iter().filter(|d| d.topic == t).map(|d| d.id.clone()).collect(),
        })
        .collect();
    let truth = PairTruth {
        field,
        mentor_id: mentor.clone(),
        mentee_id: mentee.clone(),
        strategy,
        r: n_new as f64 / (n_new + n_followed) as f64,
        n_shared: n_followed,
        n_new,
        topics,
        mentee_first_pub_year: mentee_start,
        mentee_career_len: mentee_len,
        mentor_first_pub_year: mentor_start,
        mentor_career_len: mentor_len,
        n_joint,
    };
    let recs = drafts
        .into_iter()
        .chain(citers)
        .map(|d| PaperRecord {
            paper_id: d.id,
            author_ids: d.authors,
            pub_year: d.year,
            field,
            reference_ids: d.refs,
        })
        .collect();
    (truth, recs)
}

fn push_citer(citers: &mut Vec<Draft>, k: usize, year: i32, topic: usize, refs: Vec<String>) {
    citers.push(Draft {
        id: format!("c{k:05}_{:04}", citers.len()),
        authors: vec![format!("x{k:05}_{}", citers.len() % 7)],
        year,
        topic,
        refs,
    });
}

/// Moves the author's earliest and latest papers onto the career endpoints.
fn pin_endpoints(drafts: &mut [Draft], who: &str, start: i32, len: i32) {
    let mine: Vec<usize> = (0..drafts.len())
        .filter(|&i| drafts[i].authors.iter().any(|a| a == who))
        .collect();
    if let Some(&first) = mine.iter().min_by_key(|&&i| (drafts[i].year, i)) {
        drafts[first].year = start;
    }
    if let Some(&last) = mine.iter().filter(|&&i| drafts[i].year != start || mine.len() == 1).max_by_key(|&&i| (drafts[i].year, i)) {
        drafts[last].year = start + len;
    }
}

/// Per-topic impacts found by scanning every paper of the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTopic {
    pub topic: u32,
    /// Reduced fraction `(numerator, denominator)`.
    pub mentee_ratio: (u128, u128),
    pub mentor_ratio: (u128, u128),
    pub mentee_impact: f64,
    pub mentor_impact: f64,
    /// `(paper_id, w, s)` of every topic paper.
    pub papers: Vec<(String, u64, u64)>,
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn add_fraction((n, d): (u128, u128), w: u64, s: u64) -> (u128, u128) {
    let (w, s) = (w as u128, s as u128);
    let num = n * s + w * d;
    let den = d * s;
    let g = gcd(num, den);
    (num / g, den / g)
}

fn to_f64((n, d): (u128, u128)) -> f64 {
    n as f64 / d as f64
}

/// Topic impacts of a pair by exhaustive enumeration over the raw records
/// and the planted topic labels.
pub fn oracle_impact(truth: &GroundTruth, mentor_id: &str, mentee_id: &str) -> Result<Vec<OracleTopic>> {
    let pair = truth.pair(mentor_id, mentee_id)?;
    let by_id: HashMap<&str, &PaperRecord> = truth.papers.iter().map(|p| (p.paper_id.as_str(), p)).collect();
    let mut out = Vec::new();
    for topic in &pair.topics {
        let members: BTreeSet<&str> = topic.papers.iter().map(String::as_str).collect();
        let cociting: Vec<&PaperRecord> = truth
            .papers
            .iter()
            .filter(|q| {
                let cited: BTreeSet<&str> = q
                    .reference_ids
                    .iter()
                    .map(String::as_str)
                    .filter(|r| *r != q.paper_id && members.contains(r))
                    .collect();
                cited.len() >= 2
            })
            .collect();
        let mut mentee = (0u128, 1u128);
        let mut mentor = (0u128, 1u128);
        let mut papers = Vec::new();
        for &id in &members {
            let rec = by_id[id];
            let w = cociting
                .iter()
                .filter(|q| q.reference_ids.iter().any(|r| r == id))
                .count() as u64;
            let s = rec.author_ids.iter().collect::<BTreeSet<_>>().len() as u64;
            if rec.author_ids.iter().any(|a| a == mentee_id) {
                mentee = add_fraction(mentee, w, s);
            }
            if rec.author_ids.iter().any(|a| a == mentor_id) {
                mentor = add_fraction(mentor, w, s);
            }
            papers.push((id.to_string(), w, s));
        }
        out.push(OracleTopic {
            topic: topic.topic,
            mentee_ratio: mentee,
            mentor_ratio: mentor,
            mentee_impact: to_f64(mentee),
            mentor_impact: to_f64(mentor),
            papers,
        });
    }
    Ok(out)
}

/// Pair graph of `blocks` groups of `block_size` nodes with independent edges
/// (probability `p_in` within a block, `p_out` across). Returns the planted
/// block of every node. Node roles alternate mentee/mentor.
pub fn planted_partition_graph(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> (PairGraph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks * block_size;
    let labels: Vec<usize> = (0..n).map(|i| i / block_size).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = if labels[a] == labels[b] { p_in } else { p_out };
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let nodes = (0..n)
        .map(|i| PairNode {
            paper_id: format!("n{i:04}"),
            paper: None,
            authorship: if i % 2 == 0 { Authorship::Mentee } else { Authorship::Mentor },
            pub_year: 2000,
            author_count: 1,
        })
        .collect();
    (PairGraph::from_edge_list("R", "E", nodes, &edges), labels)
}

/// Covariate-level cohort for regression checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortConfig {
    pub seed: u64,
    pub n_pairs: usize,
    pub field: Field,
    pub outcome: PlantedOutcome,
    /// Distances are uniform on this interval.
    pub distance_range: (f64, f64),
    pub career_len: IntRange,
    /// Effects of early and later collaboration counts on the outcome.
    pub colla_early_effect: f64,
    pub colla_late_effect: f64,
    /// Noise is set so that sd(signal) / sd(noise) equals this; overrides
    /// `outcome.noise_sd` when positive.
    pub signal_to_noise: f64,
}

impl Default for CohortConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_pairs: 2000,
            field: Field::Physics,
            outcome: PlantedOutcome::default(),
            distance_range: (0.5, 3.5),
            career_len: IntRange::new(30, 45),
            colla_early_effect: 0.0,
            colla_late_effect: 0.0,
            signal_to_noise: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortTruth {
    pub outcome: PlantedOutcome,
    pub colla_early_effect: f64,
    pub colla_late_effect: f64,
    pub noise_sd: f64,
}

/// Profiles carrying only the regression variables, with the outcome drawn
/// from the planted model. Controls without a planted effect are independent
/// noise.
pub fn generate_cohort(config: &CohortConfig) -> Result<(Vec<PairProfile>, CohortTruth)> {
    let (lo, hi) = config.distance_range;
    if !(lo < hi) || config.n_pairs == 0 {
        return Err(Error::InvalidConfig("empty distance range or cohort".into()));
    }
    config.career_len.check("career_len")?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut profiles = Vec::with_capacity(config.n_pairs);
    let mut signal = Vec::with_capacity(config.n_pairs);
    for i in 0..config.n_pairs {
        let d = rng.random_range(lo..hi);
        let career = config.career_len.sample(&mut rng) as f64;
        let early = rng.random_range(0..=5) as f64;
        let late = rng.random_range(0..=5) as f64;
        let mut p = PairProfile::new(config.field, &format!("m{i:05}"), &format!("e{i:05}"));
        p.ave_distance = Some(d);
        p.mentee_flags = Some(CohortFlags {
            is_eligible_author: true,
            career_len: career as i32,
            career_30y: career >= 30.0,
            ..Default::default()
        });
        p.covariates = Covariates {
            career_len_mte: Some(career),
            mte_work_count_first_5y: Some(rng.random_range(1..=10) as f64),
            mentor_citation_impact: Some(rng.random_range(0..=500) as f64),
            topic_num_mto: Some(rng.random_range(2..=6) as f64),
            colla_work_count: Some(early + late),
            colla_work_count_first_5y: Some(early),
            colla_work_count_later: Some(late),
            common_collaborators_count: Some(rng.random_range(0..=10) as f64),
        };
        signal.push(
            config.outcome.mean(d, career) + config.colla_early_effect * early + config.colla_late_effect * late,
        );
        profiles.push(p);
    }
    let noise_sd = if config.signal_to_noise > 0.0 {
        crate::numeric::sample_std(&signal).unwrap_or(0.0) / config.signal_to_noise
    } else {
        config.outcome.noise_sd
    };
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    for (p, s) in profiles.iter_mut().zip(&signal) {
        p.mentee_total_impact = Some(s + noise.sample(&mut rng));
    }
    Ok((
        profiles,
        CohortTruth {
            outcome: config.outcome,
            colla_early_effect: config.colla_early_effect,
            colla_late_effect: config.colla_late_effect,
            noise_sd,
        },
    ))
}
