//! Corpus ingestion and the immutable citation index.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Chemistry,
    Neuroscience,
    Physics,
    #[default]
    #[serde(other)]
    Other,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Chemistry => "chemistry",
            Field::Neuroscience => "neuroscience",
            Field::Physics => "physics",
            Field::Other => "other",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chemistry" => Ok(Field::Chemistry),
            "neuroscience" => Ok(Field::Neuroscience),
            "physics" => Ok(Field::Physics),
            "other" => Ok(Field::Other),
            other => Err(Error::InvalidConfig(format!("unknown field `{other}`"))),
        }
    }
}

/// One line of `papers.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub author_ids: Vec<String>,
    pub pub_year: i32,
    pub field: Field,
    #[serde(default)]
    pub reference_ids: Vec<String>,
}

impl PaperRecord {
    pub fn author_count(&self) -> usize {
        self.author_ids.len()
    }
}

/// One line of `mentorships.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentorshipRecord {
    pub mentor_id: String,
    pub mentee_id: String,
    #[serde(default)]
    pub start_year: Option<i32>,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Authors with fewer papers than this are not eligible for mentorship analysis.
    pub min_papers: usize,
    pub year_min: i32,
    pub year_max: i32,
    /// Keep only mentorships of this field; papers of every field stay in the index.
    pub field: Option<Field>,
    /// Citation window in years after publication, inclusive on both ends.
    pub citation_window: i32,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_papers: 20,
            year_min: 1960,
            year_max: 2021,
            field: None,
            citation_window: 5,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.year_min > self.year_max {
            return Err(Error::InvalidConfig(format!(
                "year window {}..{} is empty",
                self.year_min, self.year_max
            )));
        }
        if self.citation_window < 0 {
            return Err(Error::InvalidConfig("citation window must be >= 0".into()));
        }
        Ok(())
    }
}

/// Counts of records kept and dropped, keyed by (stage, reason).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    counts: BTreeMap<(String, String), usize>,
}

impl IngestReport {
    pub fn bump(&mut self, stage: &str, reason: &str, by: usize) {
        *self
            .counts
            .entry((stage.to_string(), reason.to_string()))
            .or_default() += by;
    }

    pub fn count(&self, stage: &str, reason: &str) -> usize {
        self.counts
            .get(&(stage.to_string(), reason.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// Mentorship records dropped for any reason.
    pub fn mentorship_drop_count(&self) -> usize {
        self.counts
            .iter()
            .filter(|((stage, reason), _)| stage == "mentorships" && reason != "kept" && reason != "read")
            .map(|(_, n)| n)
            .sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.counts
            .iter()
            .map(|((s, r), n)| (s.as_str(), r.as_str(), *n))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["stage", "reason", "count"])?;
        for (stage, reason, n) in self.rows() {
            w.write_record([stage, reason, &n.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<ingest report>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PaperIdx(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuthorIdx(pub u32);

#[derive(Debug, Clone)]
pub struct PaperMeta {
    pub paper_id: String,
    pub pub_year: i32,
    pub field: Field,
    pub authors: Vec<AuthorIdx>,
}

impl PaperMeta {
    pub fn author_count(&self) -> usize {
        self.authors.len()
    }
}

/// Forward and backward citation maps, author paper lists and paper metadata.
///
/// Paper and author indices follow the lexicographic order of their ids, so the
/// index does not depend on input line order. Immutable once built.
#[derive(Debug, Clone)]
pub struct CitationIndex {
    papers: Vec<PaperMeta>,
    paper_lookup: HashMap<String, PaperIdx>,
    references: Vec<Vec<PaperIdx>>,
    dangling: Vec<Vec<String>>,
    citers: Vec<Vec<PaperIdx>>,
    authors: Vec<String>,
    author_lookup: HashMap<String, AuthorIdx>,
    author_papers: Vec<Vec<PaperIdx>>,
    citation_window: i32,
}

impl CitationIndex {
    /// Builds the index from already-validated records.
    ///
    /// Records are expected to have unique ids and at least one author; use
    /// [`ingest_papers`] for validation of raw input.
    pub fn from_records(mut records: Vec<PaperRecord>, citation_window: i32) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyCorpus("no papers".into()));
        }
        records.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
        if let Some(w) = records.windows(2).find(|w| w[0].paper_id == w[1].paper_id) {
            return Err(Error::DuplicatePaperId(w[0].paper_id.clone()));
        }

        let paper_lookup: HashMap<String, PaperIdx> = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.paper_id.clone(), PaperIdx(i as u32)))
            .collect();

        let mut author_names: Vec<&str> = records
            .iter()
            .flat_map(|r| r.author_ids.iter().map(String::as_str))
            .collect();
        author_names.sort_unstable();
        author_names.dedup();
        let authors: Vec<String> = author_names.iter().map(|s| s.to_string()).collect();
        let author_lookup: HashMap<String, AuthorIdx> = authors
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), AuthorIdx(i as u32)))
            .collect();

        let n = records.len();
        let mut papers = Vec::with_capacity(n);
        let mut references = Vec::with_capacity(n);
        let mut dangling = Vec::with_capacity(n);
        let mut citers: Vec<Vec<PaperIdx>> = vec![Vec::new(); n];
        let mut author_papers: Vec<Vec<PaperIdx>> = vec![Vec::new(); authors.len()];

        for (i, rec) in records.into_iter().enumerate() {
            let me = PaperIdx(i as u32);
            let mut seen_authors = HashSet::new();
            let mut paper_authors = Vec::with_capacity(rec.author_ids.len());
            for a in &rec.author_ids {
                let idx = author_lookup[a];
                paper_authors.push(idx);
                if seen_authors.insert(idx) {
                    author_papers[idx.0 as usize].push(me);
                }
            }
            let mut refs = Vec::new();
            let mut stubs = Vec::new();
            let mut seen = HashSet::new();
            for r in rec.reference_ids {
                if r == rec.paper_id || !seen.insert(r.clone()) {
                    continue;
                }
                match paper_lookup.get(&r) {
                    Some(&target) => {
                        refs.push(target);
                        citers[target.0 as usize].push(me);
                    }
                    None => stubs.push(r),
                }
            }
            references.push(refs);
            dangling.push(stubs);
            papers.push(PaperMeta {
                paper_id: rec.paper_id,
                pub_year: rec.pub_year,
                field: rec.field,
                authors: paper_authors,
            });
        }

        // citers are pushed in increasing citer index, so already sorted
        for list in &mut author_papers {
            list.sort_by(|a, b| {
                let (pa, pb) = (&papers[a.0 as usize], &papers[b.0 as usize]);
                (pa.pub_year, &pa.paper_id).cmp(&(pb.pub_year, &pb.paper_id))
            });
        }

        Ok(Self {
            papers,
            paper_lookup,
            references,
            dangling,
            citers,
            authors,
            author_lookup,
            author_papers,
            citation_window,
        })
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn author_count(&self) -> usize {
        self.authors.len()
    }

    pub fn paper(&self, paper_id: &str) -> Option<PaperIdx> {
        self.paper_lookup.get(paper_id).copied()
    }

    pub fn meta(&self, idx: PaperIdx) -> &PaperMeta {
        &self.papers[idx.0 as usize]
    }

    pub fn paper_id(&self, idx: PaperIdx) -> &str {
        &self.papers[idx.0 as usize].paper_id
    }

    /// In-corpus references of a paper, in record order.
    pub fn references(&self, idx: PaperIdx) -> &[PaperIdx] {
        &self.references[idx.0 as usize]
    }

    /// References to ids that have no record in the corpus.
    pub fn dangling_references(&self, idx: PaperIdx) -> &[String] {
        &self.dangling[idx.0 as usize]
    }

    /// Papers citing `idx`, sorted by index.
    pub fn citers(&self, idx: PaperIdx) -> &[PaperIdx] {
        &self.citers[idx.0 as usize]
    }

    pub fn author(&self, author_id: &str) -> Option<AuthorIdx> {
        self.author_lookup.get(author_id).copied()
    }

    pub fn author_id(&self, idx: AuthorIdx) -> &str {
        &self.authors[idx.0 as usize]
    }

    /// Papers of an author, ordered by (pub_year, paper_id).
    pub fn author_papers(&self, idx: AuthorIdx) -> &[PaperIdx] {
        &self.author_papers[idx.0 as usize]
    }

    pub fn is_author_of(&self, author: AuthorIdx, paper: PaperIdx) -> bool {
        self.papers[paper.0 as usize].authors.contains(&author)
    }

    pub fn citation_window(&self) -> i32 {
        self.citation_window
    }

    /// paper_id → cited ids (in-corpus and dangling), as a sorted map.
    pub fn citing_map(&self) -> BTreeMap<String, Vec<String>> {
        self.papers
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut refs: Vec<String> = self.references[i]
                    .iter()
                    .map(|r| self.paper_id(*r).to_string())
                    .chain(self.dangling[i].iter().cloned())
                    .collect();
                refs.sort();
                (p.paper_id.clone(), refs)
            })
            .collect()
    }

    /// paper_id → citing ids, as a sorted map; papers without citers map to an empty list.
    pub fn cited_by_map(&self) -> BTreeMap<String, Vec<String>> {
        self.papers
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut ids: Vec<String> = self.citers[i]
                    .iter()
                    .map(|c| self.paper_id(*c).to_string())
                    .collect();
                ids.sort();
                (p.paper_id.clone(), ids)
            })
            .collect()
    }

    /// Citations received with `0 <= citing_year - pub_year <= window`.
    pub fn windowed_citations(&self, idx: PaperIdx, window: i32) -> usize {
        let year = self.meta(idx).pub_year;
        self.citers(idx)
            .iter()
            .filter(|c| {
                let offset = self.meta(**c).pub_year - year;
                (0..=window).contains(&offset)
            })
            .count()
    }

    /// Citations in the configured window (five years by default).
    pub fn five_year_citations(&self, paper_id: &str) -> Result<usize> {
        let idx = self
            .paper(paper_id)
            .ok_or_else(|| Error::UnknownPaper(paper_id.to_string()))?;
        Ok(self.windowed_citations(idx, self.citation_window))
    }

    pub fn cohort_flags(&self, author_id: &str, min_papers: usize) -> Result<CohortFlags> {
        let idx = self
            .author(author_id)
            .ok_or_else(|| Error::UnknownAuthor(author_id.to_string()))?;
        let papers = self.author_papers(idx);
        // author_papers is sorted by year and an indexed author always has >= 1 paper
        let first = self.meta(papers[0]).pub_year;
        let last = self.meta(papers[papers.len() - 1]).pub_year;
        let career_len = last - first;
        Ok(CohortFlags {
            is_eligible_author: papers.len() >= min_papers,
            paper_count: papers.len(),
            first_pub_year: first,
            last_pub_year: last,
            career_len,
            pre_1990_starter: first < 1990,
            career_30y: career_len >= 30,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortFlags {
    pub is_eligible_author: bool,
    pub paper_count: usize,
    pub first_pub_year: i32,
    pub last_pub_year: i32,
    pub career_len: i32,
    pub pre_1990_starter: bool,
    pub career_30y: bool,
}

fn parse_jsonl<T, R>(reader: R, source: &str) -> Result<Vec<(usize, T)>>
where
    T: serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: source.to_string(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

/// Parses and validates `papers.jsonl` content.
///
/// Structural problems (bad JSON, no authors, duplicate ids) are errors. Papers
/// outside the year window are dropped and self references removed; both are
/// counted in `report`.
pub fn ingest_papers<R: BufRead>(
    reader: R,
    source: &str,
    config: &IngestConfig,
    report: &mut IngestReport,
) -> Result<Vec<PaperRecord>> {
    let parsed: Vec<(usize, PaperRecord)> = parse_jsonl(reader, source)?;
    if parsed.is_empty() {
        return Err(Error::EmptyCorpus(format!("{source} has no records")));
    }
    report.bump("papers", "read", parsed.len());
    let mut seen = HashSet::with_capacity(parsed.len());
    let mut kept = Vec::with_capacity(parsed.len());
    for (line, mut rec) in parsed {
        if rec.paper_id.is_empty() {
            return Err(Error::MalformedRecord {
                path: source.to_string(),
                line,
                reason: "empty paper_id".into(),
            });
        }
        if rec.author_ids.is_empty() {
            return Err(Error::MalformedRecord {
                path: source.to_string(),
                line,
                reason: format!("paper `{}` has no authors", rec.paper_id),
            });
        }
        if !seen.insert(rec.paper_id.clone()) {
            return Err(Error::DuplicatePaperId(rec.paper_id));
        }
        if rec.pub_year < config.year_min || rec.pub_year > config.year_max {
            report.bump("papers", "year_out_of_window", 1);
            continue;
        }
        let before = rec.reference_ids.len();
        rec.reference_ids.retain(|r| r != &rec.paper_id);
        if rec.reference_ids.len() != before {
            report.bump("papers", "self_reference_removed", before - rec.reference_ids.len());
        }
        kept.push(rec);
    }
    if kept.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "no paper of {source} falls in {}..={}",
            config.year_min, config.year_max
        )));
    }
    report.bump("papers", "kept", kept.len());
    Ok(kept)
}

/// Parses `mentorships.jsonl` and keeps the pairs eligible for analysis.
///
/// Both authors must be present in `index` with at least `min_papers` papers.
/// Output is sorted by (field, mentor_id, mentee_id) with duplicates removed.
pub fn ingest_mentorships<R: BufRead>(
    reader: R,
    source: &str,
    index: &CitationIndex,
    config: &IngestConfig,
    report: &mut IngestReport,
) -> Result<Vec<MentorshipRecord>> {
    let parsed: Vec<(usize, MentorshipRecord)> = parse_jsonl(reader, source)?;
    if parsed.is_empty() {
        return Err(Error::EmptyCorpus(format!("{source} has no records")));
    }
    report.bump("mentorships", "read", parsed.len());
    let eligible = |author: &str| -> std::result::Result<(), &'static str> {
        match index.author(author) {
            None => Err("unknown_author"),
            Some(a) if index.author_papers(a).len() < config.min_papers => Err("below_min_papers"),
            Some(_) => Ok(()),
        }
    };
    let mut kept: Vec<MentorshipRecord> = Vec::new();
    for (_, rec) in parsed {
        if rec.mentor_id == rec.mentee_id {
            report.bump("mentorships", "self_mentorship", 1);
            continue;
        }
        if let Some(y) = rec.start_year {
            if y < config.year_min || y > config.year_max {
                report.bump("mentorships", "start_year_out_of_window", 1);
                continue;
            }
        }
        if config.field.is_some_and(|f| f != rec.field) {
            report.bump("mentorships", "field_filtered", 1);
            continue;
        }
        if let Err(reason) = eligible(&rec.mentor_id).and_then(|_| eligible(&rec.mentee_id)) {
            report.bump("mentorships", reason, 1);
            continue;
        }
        kept.push(rec);
    }
    kept.sort_by(|a, b| {
        (a.field, &a.mentor_id, &a.mentee_id).cmp(&(b.field, &b.mentor_id, &b.mentee_id))
    });
    let before = kept.len();
    kept.dedup_by(|a, b| a.field == b.field && a.mentor_id == b.mentor_id && a.mentee_id == b.mentee_id);
    if before != kept.len() {
        report.bump("mentorships", "duplicate_pair", before - kept.len());
    }
    report.bump("mentorships", "kept", kept.len());
    Ok(kept)
}

/// Result of [`ingest_corpus`].
#[derive(Debug, Clone)]
pub struct Ingested {
    pub index: CitationIndex,
    pub mentorships: Vec<MentorshipRecord>,
    pub report: IngestReport,
}

pub fn ingest_readers<P: BufRead, M: BufRead>(
    papers: P,
    mentorships: M,
    config: &IngestConfig,
) -> Result<Ingested> {
    config.validate()?;
    let mut report = IngestReport::default();
    let records = ingest_papers(papers, "papers.jsonl", config, &mut report)?;
    let index = CitationIndex::from_records(records, config.citation_window)?;
    let mentorships =
        ingest_mentorships(mentorships, "mentorships.jsonl", &index, config, &mut report)?;
    Ok(Ingested {
        index,
        mentorships,
        report,
    })
}

pub fn ingest_corpus(
    papers_path: &Path,
    mentorships_path: &Path,
    config: &IngestConfig,
) -> Result<Ingested> {
    config.validate()?;
    let open = |p: &Path| {
        std::fs::File::open(p)
            .map(BufReader::new)
            .map_err(|e| Error::io(p, e))
    };
    let mut report = IngestReport::default();
    let records = ingest_papers(
        open(papers_path)?,
        &papers_path.display().to_string(),
        config,
        &mut report,
    )?;
    let index = CitationIndex::from_records(records, config.citation_window)?;
    let mentorships = ingest_mentorships(
        open(mentorships_path)?,
        &mentorships_path.display().to_string(),
        &index,
        config,
        &mut report,
    )?;
    Ok(Ingested {
        index,
        mentorships,
        report,
    })
}

/// Serializes records as JSON lines, one record per line.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(id: &str, authors: &[&str], year: i32, refs: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
            pub_year: year,
            field: Field::Physics,
            reference_ids: refs.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn cited_by_is_transpose() {
        let idx = CitationIndex::from_records(
            vec![
                paper("P1", &["a"], 2000, &[]),
                paper("P2", &["a"], 2001, &[]),
                paper("P3", &["b"], 2002, &["P1", "P2"]),
            ],
            5,
        )
        .unwrap();
        let cited_by = idx.cited_by_map();
        assert_eq!(cited_by["P1"], vec!["P3"]);
        assert_eq!(cited_by["P2"], vec!["P3"]);
        assert!(cited_by["P3"].is_empty());
    }

    #[test]
    fn dangling_refs_are_kept_without_metadata() {
        let idx = CitationIndex::from_records(
            vec![paper("P1", &["a"], 2000, &["X9", "P2"]), paper("P2", &["a"], 1999, &[])],
            5,
        )
        .unwrap();
        let p1 = idx.paper("P1").unwrap();
        assert_eq!(idx.dangling_references(p1), ["X9".to_string()]);
        assert_eq!(idx.citing_map()["P1"], vec!["P2", "X9"]);
        assert!(idx.paper("X9").is_none());
    }

    #[test]
    fn cohort_flags_arithmetic() {
        let idx = CitationIndex::from_records(
            vec![
                paper("A1", &["a"], 1985, &[]),
                paper("A2", &["a"], 2016, &[]),
                paper("B1", &["b"], 1995, &[]),
            ],
            5,
        )
        .unwrap();
        let a = idx.cohort_flags("a", 20).unwrap();
        assert_eq!(a.career_len, 31);
        assert!(a.pre_1990_starter && a.career_30y && !a.is_eligible_author);
        let b = idx.cohort_flags("b", 1).unwrap();
        assert_eq!(b.career_len, 0);
        assert!(!b.pre_1990_starter && !b.career_30y && b.is_eligible_author);
        assert!(matches!(idx.cohort_flags("zz", 1), Err(Error::UnknownAuthor(_))));
    }

    #[test]
    fn five_year_window_is_inclusive() {
        let idx = CitationIndex::from_records(
            vec![
                paper("P", &["a"], 2000, &[]),
                paper("C1", &["b"], 2001, &["P"]),
                paper("C5", &["b"], 2005, &["P"]),
                paper("C6", &["b"], 2006, &["P"]),
                paper("Cearly", &["b"], 1998, &["P"]),
                paper("Q", &["a"], 2000, &[]),
            ],
            5,
        )
        .unwrap();
        assert_eq!(idx.five_year_citations("P").unwrap(), 2);
        assert_eq!(idx.five_year_citations("Q").unwrap(), 0);
        assert!(matches!(idx.five_year_citations("nope"), Err(Error::UnknownPaper(_))));
    }

    #[test]
    fn author_papers_sorted_by_year_then_id() {
        let idx = CitationIndex::from_records(
            vec![
                paper("z", &["a"], 1990, &[]),
                paper("b", &["a"], 1991, &[]),
                paper("a", &["a"], 1991, &[]),
            ],
            5,
        )
        .unwrap();
        let ids: Vec<&str> = idx
            .author_papers(idx.author("a").unwrap())
            .iter()
            .map(|p| idx.paper_id(*p))
            .collect();
        assert_eq!(ids, ["z", "a", "b"]);
    }

    fn jsonl(records: &[PaperRecord]) -> String {
        to_jsonl(records).unwrap()
    }

    #[test]
    fn below_min_papers_drops_mentorships() {
        let mut papers: Vec<PaperRecord> = (0..19)
            .map(|i| paper(&format!("s{i}"), &["small"], 2000, &[]))
            .collect();
        papers.extend((0..25).map(|i| paper(&format!("b{i}"), &["big"], 2000, &[])));
        papers.extend((0..25).map(|i| paper(&format!("c{i}"), &["big2"], 2000, &[])));
        let ments = [
            r#"{"mentor_id":"big","mentee_id":"small","start_year":null,"field":"physics"}"#,
            r#"{"mentor_id":"small","mentee_id":"big","start_year":1999,"field":"physics"}"#,
            r#"{"mentor_id":"big","mentee_id":"big2","field":"physics"}"#,
        ]
        .join("\n");
        let out = ingest_readers(
            jsonl(&papers).as_bytes(),
            ments.as_bytes(),
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(out.mentorships.len(), 1);
        assert_eq!(out.report.count("mentorships", "below_min_papers"), 2);
        assert_eq!(out.report.mentorship_drop_count(), 2);
    }

    #[test]
    fn malformed_and_duplicate_and_empty() {
        let cfg = IngestConfig::default();
        let bad = "{\"paper_id\":\"a\",\"author_ids\":[\"x\"],\"pub_year\":2000,\"field\":\"physics\",\"reference_ids\":[]}\nnot json\n";
        let err = ingest_readers(bad.as_bytes(), "".as_bytes(), &cfg).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }), "{err}");

        let dup = jsonl(&[paper("a", &["x"], 2000, &[]), paper("a", &["y"], 2001, &[])]);
        assert!(matches!(
            ingest_readers(dup.as_bytes(), "".as_bytes(), &cfg),
            Err(Error::DuplicatePaperId(_))
        ));

        assert!(matches!(
            ingest_readers("".as_bytes(), "".as_bytes(), &cfg),
            Err(Error::EmptyCorpus(_))
        ));
        let one = jsonl(&[paper("a", &["x"], 2000, &[])]);
        assert!(matches!(
            ingest_readers(one.as_bytes(), "\n".as_bytes(), &cfg),
            Err(Error::EmptyCorpus(_))
        ));

        let no_auth = jsonl(&[paper("a", &[], 2000, &[])]);
        assert!(matches!(
            ingest_readers(no_auth.as_bytes(), "".as_bytes(), &cfg),
            Err(Error::MalformedRecord { .. })
        ));
    }

    #[test]
    fn self_references_and_window_are_reported() {
        let cfg = IngestConfig::default();
        let papers = jsonl(&[
            paper("a", &["x"], 2000, &["a", "b"]),
            paper("b", &["x"], 1950, &[]),
        ]);
        let ments = r#"{"mentor_id":"w","mentee_id":"x","field":"physics"}"#;
        let out = ingest_readers(papers.as_bytes(), ments.as_bytes(), &cfg).unwrap();
        assert_eq!(out.report.count("papers", "self_reference_removed"), 1);
        assert_eq!(out.report.count("papers", "year_out_of_window"), 1);
        assert_eq!(out.index.paper_count(), 1);
        // b was dropped, so the reference becomes a dangling stub
        let a = out.index.paper("a").unwrap();
        assert_eq!(out.index.dangling_references(a), ["b".to_string()]);
        assert_eq!(out.report.count("mentorships", "unknown_author"), 1);
    }
}
