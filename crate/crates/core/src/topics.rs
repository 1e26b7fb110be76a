//! Topic typing and topic-selection strategy of the mentee.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::community::TopicPartition;
use crate::corpus::Field;
use crate::error::{Error, Result};
use crate::impact::{ImpactLedger, Role};
use crate::numeric::{exact_sum, median};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TopicType {
    /// Shared topic holding an above-median share of the mentor's papers.
    Primary,
    /// Shared topic at or below the median share.
    Secondary,
    /// Mentee papers only.
    New,
    /// Mentor papers only.
    MentorOnly,
}

impl TopicType {
    pub fn as_str(self) -> &'static str {
        match self {
            TopicType::Primary => "PRIMARY",
            TopicType::Secondary => "SECONDARY",
            TopicType::New => "NEW",
            TopicType::MentorOnly => "MENTOR_ONLY",
        }
    }
}

impl fmt::Display for TopicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Primary/secondary rank of a topic among all of the mentor's topics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MentorClass {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicTyping {
    pub types: BTreeMap<u32, TopicType>,
    pub mentor_classes: BTreeMap<u32, MentorClass>,
    pub mentor_proportions: BTreeMap<u32, f64>,
    pub median_proportion: Option<f64>,
    /// The mentor has a single retained topic, which is then SECONDARY.
    pub single_mentor_topic: bool,
}

impl TopicTyping {
    pub fn type_of(&self, topic_id: u32) -> Option<TopicType> {
        self.types.get(&topic_id).copied()
    }

    pub fn mentor_class(&self, topic_id: u32) -> Option<MentorClass> {
        self.mentor_classes.get(&topic_id).copied()
    }

    pub fn count(&self, kind: TopicType) -> usize {
        self.types.values().filter(|t| **t == kind).count()
    }

    /// Type bucket for a role's impact: mentee topics by their type, mentor
    /// topics by their primary/secondary rank.
    pub fn bucket(&self, topic_id: u32, role: Role) -> Option<TypeBucket> {
        match role {
            Role::Mentee => match self.type_of(topic_id)? {
                TopicType::Primary => Some(TypeBucket::Primary),
                TopicType::Secondary => Some(TypeBucket::Secondary),
                TopicType::New => Some(TypeBucket::New),
                TopicType::MentorOnly => None,
            },
            Role::Mentor => match self.mentor_class(topic_id)? {
                MentorClass::Primary => Some(TypeBucket::Primary),
                MentorClass::Secondary => Some(TypeBucket::Secondary),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeBucket {
    Primary,
    Secondary,
    New,
}

/// Types every retained topic of the partition.
///
/// A mentor topic's proportion is its mentor paper count over the mentor's
/// papers in all retained topics; it ranks PRIMARY iff the proportion strictly
/// exceeds the median proportion.
pub fn type_topics(partition: &TopicPartition) -> Result<TopicTyping> {
    let topics = partition.topics();
    if topics.is_empty() {
        return Err(Error::NoRetainedTopics);
    }
    let mentor_total: usize = topics.iter().map(|t| t.mentor_papers).sum();
    let mentor_proportions: BTreeMap<u32, f64> = topics
        .iter()
        .filter(|t| t.mentor_papers > 0)
        .map(|t| (t.topic_id, t.mentor_papers as f64 / mentor_total as f64))
        .collect();
    let values: Vec<f64> = mentor_proportions.values().copied().collect();
    let median_proportion = median(&values);
    let mentor_classes: BTreeMap<u32, MentorClass> = mentor_proportions
        .iter()
        .map(|(&t, &p)| {
            let class = match median_proportion {
                Some(m) if p > m => MentorClass::Primary,
                _ => MentorClass::Secondary,
            };
            (t, class)
        })
        .collect();
    let types = topics
        .iter()
        .map(|t| {
            let kind = match (t.mentee_papers > 0, t.mentor_papers > 0) {
                (true, true) => match mentor_classes[&t.topic_id] {
                    MentorClass::Primary => TopicType::Primary,
                    MentorClass::Secondary => TopicType::Secondary,
                },
                (true, false) => TopicType::New,
                (false, true) => TopicType::MentorOnly,
                (false, false) => unreachable!("retained topic without papers"),
            };
            (t.topic_id, kind)
        })
        .collect();
    Ok(TopicTyping {
        types,
        single_mentor_topic: mentor_classes.len() == 1,
        mentor_classes,
        mentor_proportions,
        median_proportion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    PureFollow,
    FollowAndInnovate,
    PureInnovate,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::PureFollow, Strategy::FollowAndInnovate, Strategy::PureInnovate];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::PureFollow => "PURE_FOLLOW",
            Strategy::FollowAndInnovate => "FOLLOW_AND_INNOVATE",
            Strategy::PureInnovate => "PURE_INNOVATE",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyRecord {
    pub strategy: Strategy,
    /// New topics over all of the mentee's topics.
    pub r: f64,
    pub n_shared: usize,
    pub n_new: usize,
    pub n_primary: usize,
    pub n_secondary: usize,
}

pub fn classify_strategy(partition: &TopicPartition, typing: &TopicTyping) -> Result<StrategyRecord> {
    let (mut n_primary, mut n_secondary, mut n_new) = (0, 0, 0);
    for t in partition.topics().iter().filter(|t| t.mentee_papers > 0) {
        match typing.type_of(t.topic_id) {
            Some(TopicType::Primary) => n_primary += 1,
            Some(TopicType::Secondary) => n_secondary += 1,
            Some(TopicType::New) => n_new += 1,
            Some(TopicType::MentorOnly) | None => return Err(Error::PartitionMismatch),
        }
    }
    let n_shared = n_primary + n_secondary;
    if n_shared + n_new == 0 {
        return Err(Error::MenteeNoTopics);
    }
    let strategy = match (n_shared, n_new) {
        (_, 0) => Strategy::PureFollow,
        (0, _) => Strategy::PureInnovate,
        _ => Strategy::FollowAndInnovate,
    };
    Ok(StrategyRecord {
        strategy,
        r: n_new as f64 / (n_new + n_shared) as f64,
        n_shared,
        n_new,
        n_primary,
        n_secondary,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeImpacts {
    pub primary: f64,
    pub secondary: f64,
    pub new: f64,
}

impl TypeImpacts {
    pub fn total(&self) -> f64 {
        exact_sum([self.primary, self.secondary, self.new])
    }
}

/// A role's impact split by topic type (see [`TopicTyping::bucket`]).
pub fn impact_by_type(ledger: &ImpactLedger, typing: &TopicTyping, role: Role) -> TypeImpacts {
    let mut buckets: HashMap<TypeBucket, Vec<f64>> = HashMap::new();
    for topic in &ledger.topics {
        if let Some(b) = typing.bucket(topic.topic_id, role) {
            let entry = buckets.entry(b).or_default();
            entry.extend(topic.papers.iter().filter(|p| p.role == role).map(|p| p.contribution));
        }
    }
    let get = |b: TypeBucket| buckets.get(&b).map_or(0.0, |v| exact_sum(v.iter().copied()));
    TypeImpacts {
        primary: get(TypeBucket::Primary),
        secondary: get(TypeBucket::Secondary),
        new: get(TypeBucket::New),
    }
}

/// Shares of the mentee's impact earned in primary, secondary and new topics.
pub fn impact_ratio_by_type(ledger: &ImpactLedger, typing: &TopicTyping) -> Result<TypeImpacts> {
    let by_type = impact_by_type(ledger, typing, Role::Mentee);
    normalize(by_type)
}

pub(crate) fn normalize(v: TypeImpacts) -> Result<TypeImpacts> {
    let total = v.total();
    if !(total > 0.0) {
        return Err(Error::ZeroImpact);
    }
    Ok(TypeImpacts {
        primary: v.primary / total,
        secondary: v.secondary / total,
        new: v.new / total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EliteScope {
    #[default]
    PerField,
    Global,
}

/// Inputs of the elite/outperforming flags for one mentorship pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EliteInput<'a> {
    pub field: Field,
    pub mentee_id: &'a str,
    pub windowed_citations: f64,
    pub mentee_total_impact: f64,
    pub mentor_total_impact: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EliteFlags {
    pub elite: bool,
    pub outperforming: bool,
}

/// Value of the `ceil(top_fraction * n)`-th largest element; ties share it.
pub fn top_fraction_threshold(values: &[f64], top_fraction: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyCohort);
    }
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!("top fraction {top_fraction} outside (0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = ((top_fraction * sorted.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[k.min(sorted.len()) - 1])
}

/// Elite: the mentee's windowed citation total reaches the top-fraction
/// threshold among distinct mentees of the same field (or globally).
/// Outperforming: elite and total mentee impact strictly above the mentor's.
pub fn elite_and_outperforming_flags(
    rows: &[EliteInput<'_>],
    top_fraction: f64,
    scope: EliteScope,
) -> Result<Vec<EliteFlags>> {
    if rows.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let group_of = |r: &EliteInput<'_>| match scope {
        EliteScope::PerField => Some(r.field),
        EliteScope::Global => None,
    };
    let mut mentees: BTreeMap<Option<Field>, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in rows {
        mentees
            .entry(group_of(r))
            .or_default()
            .insert(r.mentee_id, r.windowed_citations);
    }
    let mut thresholds = BTreeMap::new();
    for (group, values) in &mentees {
        let v: Vec<f64> = values.values().copied().collect();
        thresholds.insert(*group, top_fraction_threshold(&v, top_fraction)?);
    }
    Ok(rows
        .iter()
        .map(|r| {
            let elite = r.windowed_citations >= thresholds[&group_of(r)];
            EliteFlags {
                elite,
                outperforming: elite && r.mentee_total_impact > r.mentor_total_impact,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairgraph::{Authorship, PairGraph, PairNode};

    /// Graph with one node per (topic, role) entry and the given labels.
    fn partition(spec: &[(u32, usize, usize)]) -> TopicPartition {
        let mut nodes = Vec::new();
        let mut labels = Vec::new();
        for &(topic, mentee, mentor) in spec {
            for (count, role) in [(mentee, Authorship::Mentee), (mentor, Authorship::Mentor)] {
                for _ in 0..count {
                    nodes.push(PairNode {
                        paper_id: format!("p{}", nodes.len()),
                        paper: None,
                        authorship: role,
                        pub_year: 2000,
                        author_count: 1,
                    });
                    labels.push(Some(topic));
                }
            }
        }
        let g = PairGraph::from_edge_list("R", "E", nodes, &[]);
        TopicPartition::from_labels(&g, &labels, 1.0, 1).unwrap()
    }

    #[test]
    fn strict_median_rule() {
        // mentor paper shares 5/10, 3/10, 2/10; topic ids follow descending size
        let p = partition(&[(0, 1, 5), (1, 1, 3), (2, 1, 2)]);
        let t = type_topics(&p).unwrap();
        assert_eq!(t.median_proportion, Some(0.3));
        assert_eq!(t.type_of(0), Some(TopicType::Primary));
        assert_eq!(t.type_of(1), Some(TopicType::Secondary));
        assert_eq!(t.type_of(2), Some(TopicType::Secondary));
    }

    #[test]
    fn single_mentor_topic_is_secondary_and_flagged() {
        let p = partition(&[(0, 2, 3), (1, 2, 0)]);
        let t = type_topics(&p).unwrap();
        assert!(t.single_mentor_topic);
        assert_eq!(t.mentor_proportions[&0], 1.0);
        assert_eq!(t.type_of(0), Some(TopicType::Secondary));
        assert_eq!(t.type_of(1), Some(TopicType::New));
    }

    #[test]
    fn mentor_only_topics_still_rank() {
        let p = partition(&[(0, 0, 6), (1, 1, 3), (2, 1, 1)]);
        let t = type_topics(&p).unwrap();
        assert_eq!(t.type_of(0), Some(TopicType::MentorOnly));
        assert_eq!(t.mentor_class(0), Some(MentorClass::Primary));
        let total: f64 = t.mentor_proportions.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_topics() {
        let g = PairGraph::from_edge_list("R", "E", vec![], &[]);
        let p = TopicPartition::from_labels(&g, &[], 1.0, 1).unwrap();
        assert!(matches!(type_topics(&p), Err(Error::NoRetainedTopics)));
    }

    #[test]
    fn strategies() {
        let p = partition(&[(0, 1, 4), (1, 1, 3), (2, 1, 2), (3, 1, 0)]);
        let s = classify_strategy(&p, &type_topics(&p).unwrap()).unwrap();
        assert_eq!((s.strategy, s.r), (Strategy::FollowAndInnovate, 0.25));

        let p = partition(&[(0, 1, 4), (1, 1, 3)]);
        let s = classify_strategy(&p, &type_topics(&p).unwrap()).unwrap();
        assert_eq!((s.strategy, s.r), (Strategy::PureFollow, 0.0));

        let p = partition(&[(0, 3, 0), (1, 2, 0), (2, 1, 0), (3, 0, 5)]);
        let s = classify_strategy(&p, &type_topics(&p).unwrap()).unwrap();
        assert_eq!((s.strategy, s.r, s.n_new), (Strategy::PureInnovate, 1.0, 3));

        let p = partition(&[(0, 0, 4)]);
        assert!(matches!(
            classify_strategy(&p, &type_topics(&p).unwrap()),
            Err(Error::MenteeNoTopics)
        ));
    }

    #[test]
    fn threshold_by_sorting() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(top_fraction_threshold(&v, 0.2).unwrap(), 9.0);
        assert_eq!(top_fraction_threshold(&v, 1.0).unwrap(), 1.0);
        assert_eq!(top_fraction_threshold(&v, 0.01).unwrap(), 10.0);
        assert!(top_fraction_threshold(&[], 0.2).is_err());
    }

    #[test]
    fn elite_ties_and_outperforming() {
        let ids: Vec<String> = (1..=10).map(|i| format!("m{i}")).collect();
        let rows: Vec<EliteInput> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| EliteInput {
                field: Field::Physics,
                mentee_id: id,
                windowed_citations: (i + 1) as f64,
                mentee_total_impact: 50.0,
                mentor_total_impact: if i == 9 { 50.0 } else { 10.0 },
            })
            .collect();
        let flags = elite_and_outperforming_flags(&rows, 0.2, EliteScope::PerField).unwrap();
        let elite: Vec<usize> = flags.iter().enumerate().filter(|(_, f)| f.elite).map(|(i, _)| i + 1).collect();
        assert_eq!(elite, [9, 10]);
        assert!(flags[8].outperforming);
        assert!(!flags[9].outperforming, "tie with the mentor is not outperforming");
        assert!(matches!(
            elite_and_outperforming_flags(&[], 0.2, EliteScope::Global),
            Err(Error::EmptyCohort)
        ));
    }
}
