//! Topic-specific impact allocation.
//!
//! Within a topic `j`, the co-citing set `P_j` holds every corpus paper citing at
//! least two of the pair's papers in that topic. A paper's raw impact `w` is the
//! number of `P_j` members citing it; its contribution is `w / s` where `s` is
//! its author count. Mentee and mentor topic impacts sum the contributions of
//! their own papers, with JOINT papers counted for both. Topic impacts are the
//! correctly rounded value of the exact rational sum.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::community::TopicPartition;
use crate::corpus::{CitationIndex, PaperIdx};
use crate::error::{Error, Result};
use crate::numeric::{exact_sum, FractionSum};
use crate::pairgraph::PairGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Role {
    Mentee,
    Mentor,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Mentee => "MENTEE",
            Role::Mentor => "MENTOR",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperContribution {
    pub paper_id: String,
    /// Local node index in the pair graph.
    pub node: usize,
    pub role: Role,
    /// Citations from the topic's co-citing set.
    pub w: u64,
    /// Author count.
    pub s: u64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicImpact {
    pub topic_id: u32,
    pub mentee_impact: f64,
    pub mentor_impact: f64,
    pub cociting_set_size: usize,
    pub papers: Vec<PaperContribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactLedger {
    pub topics: Vec<TopicImpact>,
}

impl ImpactLedger {
    pub fn topic(&self, topic_id: u32) -> Option<&TopicImpact> {
        self.topics.iter().find(|t| t.topic_id == topic_id)
    }

    /// Contributions of one role, in ledger order.
    pub fn contributions(&self, role: Role) -> impl Iterator<Item = &PaperContribution> {
        self.topics
            .iter()
            .flat_map(|t| t.papers.iter())
            .filter(move |p| p.role == role)
    }

    /// Contribution of every node that earned impact for `role`.
    pub fn contribution_by_node(&self, role: Role) -> HashMap<usize, f64> {
        self.contributions(role)
            .map(|p| (p.node, p.contribution))
            .collect()
    }
}

fn resolve(graph: &PairGraph, node: usize, index: &CitationIndex) -> Option<PaperIdx> {
    let n = &graph.nodes()[node];
    n.paper.or_else(|| index.paper(&n.paper_id))
}

fn cociting_members(members: &[usize], graph: &PairGraph, index: &CitationIndex) -> Vec<PaperIdx> {
    let mut hits: HashMap<PaperIdx, u32> = HashMap::new();
    for &node in members {
        if let Some(p) = resolve(graph, node, index) {
            for &q in index.citers(p) {
                *hits.entry(q).or_default() += 1;
            }
        }
    }
    let mut set: Vec<PaperIdx> = hits
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .map(|(q, _)| q)
        .collect();
    set.sort_unstable();
    set
}

/// Co-citing set `P_j` of a retained topic, sorted by paper index.
pub fn cociting_set(
    topic_id: u32,
    graph: &PairGraph,
    partition: &TopicPartition,
    index: &CitationIndex,
) -> Result<Vec<PaperIdx>> {
    partition.check_graph(graph)?;
    if partition.topic(topic_id).is_none() {
        return Err(Error::UnknownTopic(topic_id));
    }
    Ok(cociting_members(&partition.members(topic_id), graph, index))
}

pub fn allocate_impact(
    graph: &PairGraph,
    partition: &TopicPartition,
    index: &CitationIndex,
) -> Result<ImpactLedger> {
    partition.check_graph(graph)?;
    let mut topics = Vec::with_capacity(partition.topics().len());
    for summary in partition.topics() {
        let members = partition.members(summary.topic_id);
        let cociting: HashSet<PaperIdx> = cociting_members(&members, graph, index).into_iter().collect();
        let mut papers = Vec::new();
        for &node in &members {
            let n = &graph.nodes()[node];
            let w = resolve(graph, node, index).map_or(0, |p| {
                index.citers(p).iter().filter(|q| cociting.contains(q)).count() as u64
            });
            let s = n.author_count.max(1) as u64;
            let contribution = w as f64 / s as f64;
            for (role, member) in [
                (Role::Mentee, n.authorship.is_mentee()),
                (Role::Mentor, n.authorship.is_mentor()),
            ] {
                if member {
                    papers.push(PaperContribution {
                        paper_id: n.paper_id.clone(),
                        node,
                        role,
                        w,
                        s,
                        contribution,
                    });
                }
            }
        }
        let sum_role = |role: Role| {
            let mut sum = FractionSum::new();
            for p in papers.iter().filter(|p| p.role == role) {
                sum.add(p.w, p.s);
            }
            sum.value()
        };
        topics.push(TopicImpact {
            topic_id: summary.topic_id,
            mentee_impact: sum_role(Role::Mentee),
            mentor_impact: sum_role(Role::Mentor),
            cociting_set_size: cociting.len(),
            papers,
        });
    }
    Ok(ImpactLedger { topics })
}

/// Total impact of a role over all topics.
///
/// Summed exactly over individual paper contributions so that any other
/// aggregation of the same contributions (e.g. by career year) agrees bit for bit.
pub fn total_impact(ledger: &ImpactLedger, role: Role) -> f64 {
    exact_sum(ledger.contributions(role).map(|p| p.contribution))
}
