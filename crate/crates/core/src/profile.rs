//! One analysis row per mentorship pair.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::career::{career_series, CareerSeries};
use crate::community::{detect, DetectionConfig, TopicPartition};
use crate::corpus::{AuthorIdx, CitationIndex, CohortFlags, Field, MentorshipRecord};
use crate::distance::{average_distance, DistanceOptions};
use crate::error::{Error, Result};
use crate::impact::{allocate_impact, total_impact, ImpactLedger, Role};
use crate::pairgraph::{Authorship, PairGraph, PairGraphOptions};
use crate::topics::{
    classify_strategy, impact_by_type, impact_ratio_by_type, type_topics, Strategy, TopicTyping,
    TypeImpacts,
};

/// Regression controls of a pair. Counts are stored as reals so synthetic
/// cohorts can fill them directly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Covariates {
    pub career_len_mte: Option<f64>,
    /// Mentee papers within the citation window of the mentee's first year.
    pub mte_work_count_first_5y: Option<f64>,
    /// Windowed citation total of the mentor's papers.
    pub mentor_citation_impact: Option<f64>,
    /// Retained topics holding mentor papers.
    pub topic_num_mto: Option<f64>,
    /// Papers coauthored by mentor and mentee.
    pub colla_work_count: Option<f64>,
    pub colla_work_count_first_5y: Option<f64>,
    pub colla_work_count_later: Option<f64>,
    /// Distinct third authors who wrote with both members of the pair.
    pub common_collaborators_count: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairProfile {
    pub field: Field,
    pub mentor_id: String,
    pub mentee_id: String,
    /// `ok`, or the code of the first stage that could not be evaluated.
    pub status: String,
    pub n_mentee_papers: usize,
    pub n_mentor_papers: usize,
    pub n_joint_papers: usize,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_topics: usize,
    pub n_unassigned: usize,
    pub modularity_q: Option<f64>,
    pub strategy: Option<Strategy>,
    pub r: Option<f64>,
    pub n_primary: Option<usize>,
    pub n_secondary: Option<usize>,
    pub n_new: Option<usize>,
    pub single_mentor_topic: Option<bool>,
    pub mentee_total_impact: Option<f64>,
    pub mentor_total_impact: Option<f64>,
    pub mentee_impacts: Option<TypeImpacts>,
    pub mentor_impacts: Option<TypeImpacts>,
    pub impact_ratios: Option<TypeImpacts>,
    pub ave_distance: Option<f64>,
    pub n_distance_pairs: Option<usize>,
    pub n_disconnected_pairs: Option<usize>,
    pub mentee_windowed_citations: Option<f64>,
    pub mentee_flags: Option<CohortFlags>,
    pub mentor_flags: Option<CohortFlags>,
    pub covariates: Covariates,
    pub elite: Option<bool>,
    pub outperforming: Option<bool>,
    pub mentee_career: Option<CareerSeries>,
    pub mentor_career: Option<CareerSeries>,
}

impl PairProfile {
    pub fn new(field: Field, mentor_id: &str, mentee_id: &str) -> Self {
        Self {
            field,
            mentor_id: mentor_id.to_string(),
            mentee_id: mentee_id.to_string(),
            status: "ok".into(),
            ..Default::default()
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn sort_key(&self) -> (Field, &str, &str) {
        (self.field, &self.mentor_id, &self.mentee_id)
    }

    pub const CSV_HEADER: [&'static str; 42] = [
        "field",
        "mentor_id",
        "mentee_id",
        "status",
        "n_mentee_papers",
        "n_mentor_papers",
        "n_joint_papers",
        "n_nodes",
        "n_edges",
        "n_topics",
        "n_unassigned",
        "modularity_q",
        "strategy",
        "r",
        "n_primary",
        "n_secondary",
        "n_new",
        "single_mentor_topic",
        "mentee_total_impact",
        "mentor_total_impact",
        "mentee_primary_impact",
        "mentee_secondary_impact",
        "mentee_new_impact",
        "mentor_primary_impact",
        "mentor_secondary_impact",
        "ave_distance",
        "n_distance_pairs",
        "n_disconnected_pairs",
        "mentee_windowed_citations",
        "mentee_first_pub_year",
        "mentee_career_30y",
        "mentor_first_pub_year",
        "career_len_mte",
        "mte_work_count_first_5y",
        "mentor_citation_impact",
        "topic_num_mto",
        "colla_work_count",
        "colla_work_count_first_5y",
        "colla_work_count_later",
        "common_collaborators_count",
        "elite",
        "outperforming",
    ];

    /// Flat CSV row matching [`PairProfile::CSV_HEADER`]; missing values are empty.
    pub fn csv_record(&self) -> Vec<String> {
        let c = &self.covariates;
        vec![
            self.field.to_string(),
            self.mentor_id.clone(),
            self.mentee_id.clone(),
            self.status.clone(),
            self.n_mentee_papers.to_string(),
            self.n_mentor_papers.to_string(),
            self.n_joint_papers.to_string(),
            self.n_nodes.to_string(),
            self.n_edges.to_string(),
            self.n_topics.to_string(),
            self.n_unassigned.to_string(),
            opt(self.modularity_q),
            self.strategy.map_or(String::new(), |s| s.to_string()),
            opt(self.r),
            opt(self.n_primary),
            opt(self.n_secondary),
            opt(self.n_new),
            opt(self.single_mentor_topic),
            opt(self.mentee_total_impact),
            opt(self.mentor_total_impact),
            opt(self.mentee_impacts.map(|t| t.primary)),
            opt(self.mentee_impacts.map(|t| t.secondary)),
            opt(self.mentee_impacts.map(|t| t.new)),
            opt(self.mentor_impacts.map(|t| t.primary)),
            opt(self.mentor_impacts.map(|t| t.secondary)),
            opt(self.ave_distance),
            opt(self.n_distance_pairs),
            opt(self.n_disconnected_pairs),
            opt(self.mentee_windowed_citations),
            opt(self.mentee_flags.map(|f| f.first_pub_year)),
            opt(self.mentee_flags.map(|f| f.career_30y)),
            opt(self.mentor_flags.map(|f| f.first_pub_year)),
            opt(c.career_len_mte),
            opt(c.mte_work_count_first_5y),
            opt(c.mentor_citation_impact),
            opt(c.topic_num_mto),
            opt(c.colla_work_count),
            opt(c.colla_work_count_first_5y),
            opt(c.colla_work_count_later),
            opt(c.common_collaborators_count),
            opt(self.elite),
            opt(self.outperforming),
        ]
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub graph: PairGraphOptions,
    pub detection: DetectionConfig,
    pub distance: DistanceOptions,
    /// Papers below this count make an author ineligible.
    pub min_papers: usize,
}

/// Intermediate products of one pair's analysis.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub graph: PairGraph,
    pub partition: TopicPartition,
    pub ledger: ImpactLedger,
    pub typing: Option<TopicTyping>,
    pub profile: PairProfile,
}

fn windowed_total(index: &CitationIndex, author: AuthorIdx) -> f64 {
    let window = index.citation_window();
    index
        .author_papers(author)
        .iter()
        .map(|&p| index.windowed_citations(p, window) as f64)
        .sum()
}

fn covariates(
    index: &CitationIndex,
    mentor: AuthorIdx,
    mentee: AuthorIdx,
    mentee_flags: &CohortFlags,
    partition: &TopicPartition,
) -> Covariates {
    let window = index.citation_window();
    let early = |year: i32| (0..=window).contains(&(year - mentee_flags.first_pub_year));
    let mentee_papers = index.author_papers(mentee);
    let joint: Vec<_> = mentee_papers
        .iter()
        .filter(|&&p| index.is_author_of(mentor, p))
        .collect();
    let joint_early = joint.iter().filter(|&&&p| early(index.meta(p).pub_year)).count();
    let mte_early = mentee_papers
        .iter()
        .filter(|&&p| early(index.meta(p).pub_year))
        .count();

    let coauthors = |who: AuthorIdx| -> HashSet<AuthorIdx> {
        index
            .author_papers(who)
            .iter()
            .flat_map(|&p| index.meta(p).authors.iter().copied())
            .filter(|&a| a != mentor && a != mentee)
            .collect()
    };
    let common = coauthors(mentor).intersection(&coauthors(mentee)).count();
    let mentor_topics = partition.topics().iter().filter(|t| t.mentor_papers > 0).count();

    Covariates {
        career_len_mte: Some(mentee_flags.career_len as f64),
        mte_work_count_first_5y: Some(mte_early as f64),
        mentor_citation_impact: Some(windowed_total(index, mentor)),
        topic_num_mto: Some(mentor_topics as f64),
        colla_work_count: Some(joint.len() as f64),
        colla_work_count_first_5y: Some(joint_early as f64),
        colla_work_count_later: Some((joint.len() - joint_early) as f64),
        common_collaborators_count: Some(common as f64),
    }
}

/// Runs every per-pair stage.
///
/// Failures to build the pair graph are returned as errors. Later stages that
/// cannot be evaluated (no retained topics, no mentee topic, no finite path)
/// leave their fields empty and record the first such reason in `status`.
pub fn analyze_pair(
    mentorship: &MentorshipRecord,
    index: &CitationIndex,
    options: &AnalysisOptions,
) -> Result<PairAnalysis> {
    let (mentor_id, mentee_id) = (mentorship.mentor_id.as_str(), mentorship.mentee_id.as_str());
    let mentor = index
        .author(mentor_id)
        .ok_or_else(|| Error::UnknownAuthor(mentor_id.to_string()))?;
    let mentee = index
        .author(mentee_id)
        .ok_or_else(|| Error::UnknownAuthor(mentee_id.to_string()))?;
    let graph = PairGraph::build(mentor_id, mentee_id, index, options.graph)?;
    let partition = detect(&graph, &options.detection);
    let ledger = allocate_impact(&graph, &partition, index)?;

    let mut profile = PairProfile::new(mentorship.field, mentor_id, mentee_id);

    let count = |a: Authorship| graph.nodes().iter().filter(|n| n.authorship == a).count();
    profile.n_joint_papers = count(Authorship::Joint);
    profile.n_mentee_papers = count(Authorship::Mentee) + profile.n_joint_papers;
    profile.n_mentor_papers = count(Authorship::Mentor) + profile.n_joint_papers;
    profile.n_nodes = graph.node_count();
    profile.n_edges = graph.edge_count();
    profile.n_topics = partition.topics().len();
    profile.n_unassigned = partition.unassigned_count();
    profile.modularity_q = Some(partition.modularity_q);
    profile.mentee_total_impact = Some(total_impact(&ledger, Role::Mentee));
    profile.mentor_total_impact = Some(total_impact(&ledger, Role::Mentor));

    let typing = match type_topics(&partition) {
        Ok(t) => Some(t),
        Err(e) => {
            soft(&mut profile, e);
            None
        }
    };
    if let Some(typing) = &typing {
        match classify_strategy(&partition, typing) {
            Ok(s) => {
                profile.strategy = Some(s.strategy);
                profile.r = Some(s.r);
                profile.n_primary = Some(s.n_primary);
                profile.n_secondary = Some(s.n_secondary);
                profile.n_new = Some(s.n_new);
            }
            Err(e) => soft(&mut profile, e),
        }
        profile.single_mentor_topic = Some(typing.single_mentor_topic);
        profile.mentee_impacts = Some(impact_by_type(&ledger, typing, Role::Mentee));
        profile.mentor_impacts = Some(impact_by_type(&ledger, typing, Role::Mentor));
        profile.impact_ratios = impact_ratio_by_type(&ledger, typing).ok();
        profile.mentee_career = Some(career_series(&ledger, typing, &graph, Role::Mentee)?);
        profile.mentor_career = Some(career_series(&ledger, typing, &graph, Role::Mentor)?);
    }

    match average_distance(&graph, options.distance) {
        Ok(d) => {
            profile.ave_distance = Some(d.ave_distance);
            profile.n_distance_pairs = Some(d.n_pairs);
            profile.n_disconnected_pairs = Some(d.n_disconnected_pairs);
        }
        Err(e) => soft(&mut profile, e),
    }

    let mentee_flags = index.cohort_flags(mentee_id, options.min_papers)?;
    profile.mentor_flags = Some(index.cohort_flags(mentor_id, options.min_papers)?);
    profile.mentee_flags = Some(mentee_flags);
    profile.mentee_windowed_citations = Some(windowed_total(index, mentee));
    profile.covariates = covariates(index, mentor, mentee, &mentee_flags, &partition);

    Ok(PairAnalysis {
        graph,
        partition,
        ledger,
        typing,
        profile,
    })
}

fn soft(profile: &mut PairProfile, e: Error) {
    if profile.is_ok() {
        profile.status = e.code().to_string();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperRecord;

    fn paper(id: &str, authors: &[&str], year: i32, refs: &[String]) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
            pub_year: year,
            field: Field::Physics,
            reference_ids: refs.to_vec(),
        }
    }

    /// Two topics of 10 papers each: one shared, one mentee-only.
    fn corpus() -> CitationIndex {
        let mut recs = Vec::new();
        let mut shared = Vec::new();
        let mut fresh = Vec::new();
        for i in 0..10 {
            let (id, authors): (String, &[&str]) = match i {
                0..=4 => (format!("s{i}"), &["R", "Z"]),
                5 => ("s5".into(), &["R", "E"]),
                _ => (format!("s{i}"), &["E"]),
            };
            recs.push(paper(&id, authors, 1980 + i, &[]));
            shared.push(id);
            let id = format!("n{i}");
            recs.push(paper(&id, &["E", "Z"], 1995 + i, &[]));
            fresh.push(id);
        }
        for k in 0..3 {
            recs.push(paper(&format!("cs{k}"), &["X"], 2015, &shared));
            recs.push(paper(&format!("cn{k}"), &["X"], 2015, &fresh));
        }
        CitationIndex::from_records(recs, 5).unwrap()
    }

    fn options() -> AnalysisOptions {
        AnalysisOptions {
            min_papers: 1,
            ..Default::default()
        }
    }

    #[test]
    fn follow_and_innovate_pair() {
        let index = corpus();
        let m = MentorshipRecord {
            mentor_id: "R".into(),
            mentee_id: "E".into(),
            start_year: None,
            field: Field::Physics,
        };
        let a = analyze_pair(&m, &index, &options()).unwrap();
        let p = &a.profile;
        assert_eq!(p.status, "ok");
        assert_eq!(p.n_topics, 2);
        assert_eq!(p.strategy, Some(Strategy::FollowAndInnovate));
        assert_eq!(p.r, Some(0.5));
        assert_eq!(p.n_joint_papers, 1);
        assert_eq!(p.covariates.colla_work_count, Some(1.0));
        assert_eq!(p.covariates.common_collaborators_count, Some(1.0));
        assert_eq!(p.covariates.topic_num_mto, Some(1.0));
        // every pair paper is cited by 3 co-citing papers
        assert_eq!(p.mentee_total_impact, Some(4.0 * 3.0 + 3.0 / 2.0 + 10.0 * 3.0 / 2.0));
        let career = p.mentee_career.as_ref().unwrap();
        assert_eq!(career.final_total(), p.mentee_total_impact.unwrap());
        assert_eq!(p.csv_record().len(), PairProfile::CSV_HEADER.len());
        assert!(p.ave_distance.is_some());
    }

    #[test]
    fn pair_without_topics_is_soft_failure() {
        let index = CitationIndex::from_records(
            vec![
                paper("a", &["R"], 1990, &[]),
                paper("b", &["E"], 1991, &[]),
                paper("q", &["X"], 2000, &["a".into(), "b".into()]),
            ],
            5,
        )
        .unwrap();
        let m = MentorshipRecord {
            mentor_id: "R".into(),
            mentee_id: "E".into(),
            start_year: None,
            field: Field::Physics,
        };
        let a = analyze_pair(&m, &index, &options()).unwrap();
        assert_eq!(a.profile.status, "no_retained_topics");
        assert_eq!(a.profile.ave_distance, Some(1.0));
        assert!(a.profile.strategy.is_none());

        let bad = MentorshipRecord {
            mentor_id: "nobody".into(),
            ..m
        };
        assert!(matches!(analyze_pair(&bad, &index, &options()), Err(Error::UnknownAuthor(_))));
    }
}
