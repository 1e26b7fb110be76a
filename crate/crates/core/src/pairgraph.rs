//! Co-citation network of one mentor-mentee pair.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::community::TopicPartition;
use crate::corpus::{CitationIndex, PaperIdx};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Authorship {
    Mentee,
    Mentor,
    Joint,
}

impl Authorship {
    /// JOINT papers belong to both authors.
    pub fn is_mentee(self) -> bool {
        matches!(self, Authorship::Mentee | Authorship::Joint)
    }

    pub fn is_mentor(self) -> bool {
        matches!(self, Authorship::Mentor | Authorship::Joint)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Authorship::Mentee => "MENTEE",
            Authorship::Mentor => "MENTOR",
            Authorship::Joint => "JOINT",
        }
    }
}

impl fmt::Display for Authorship {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairNode {
    pub paper_id: String,
    /// Position in the citation index; `None` for graphs built without a corpus.
    pub paper: Option<PaperIdx>,
    pub authorship: Authorship,
    pub pub_year: i32,
    pub author_count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairGraphOptions {
    /// Ignore citing papers written by the mentor or the mentee.
    pub exclude_self_cocitation: bool,
}

/// Unweighted co-citation graph over the union of both authors' papers.
///
/// Nodes are ordered by (pub_year, paper_id). Edges are stored once as
/// `(lo, hi)` local node indices along with the citing papers that induced them.
#[derive(Debug, Clone)]
pub struct PairGraph {
    mentor_id: String,
    mentee_id: String,
    nodes: Vec<PairNode>,
    adjacency: Vec<Vec<u32>>,
    edges: BTreeMap<(u32, u32), Vec<PaperIdx>>,
}

impl PairGraph {
    pub fn build(
        mentor_id: &str,
        mentee_id: &str,
        index: &CitationIndex,
        options: PairGraphOptions,
    ) -> Result<Self> {
        let mentor = index
            .author(mentor_id)
            .ok_or_else(|| Error::UnknownAuthor(mentor_id.to_string()))?;
        let mentee = index
            .author(mentee_id)
            .ok_or_else(|| Error::UnknownAuthor(mentee_id.to_string()))?;
        let mentor_papers = index.author_papers(mentor);
        let mentee_papers = index.author_papers(mentee);
        if mentor_papers.is_empty() || mentee_papers.is_empty() {
            return Err(Error::EmptyPair {
                mentor: mentor_id.to_string(),
                mentee: mentee_id.to_string(),
            });
        }

        let mut roles: BTreeMap<PaperIdx, Authorship> = BTreeMap::new();
        for &p in mentee_papers {
            roles.insert(p, Authorship::Mentee);
        }
        for &p in mentor_papers {
            roles
                .entry(p)
                .and_modify(|r| *r = Authorship::Joint)
                .or_insert(Authorship::Mentor);
        }
        let mut nodes: Vec<PairNode> = roles
            .into_iter()
            .map(|(p, authorship)| {
                let meta = index.meta(p);
                PairNode {
                    paper_id: meta.paper_id.clone(),
                    paper: Some(p),
                    authorship,
                    pub_year: meta.pub_year,
                    author_count: meta.author_count(),
                }
            })
            .collect();
        nodes.sort_by(|a, b| (a.pub_year, &a.paper_id).cmp(&(b.pub_year, &b.paper_id)));

        let local: HashMap<PaperIdx, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.paper.expect("indexed node"), i as u32))
            .collect();

        let citers: BTreeSet<PaperIdx> = nodes
            .iter()
            .flat_map(|n| index.citers(n.paper.expect("indexed node")).iter().copied())
            .collect();

        let mut edges: BTreeMap<(u32, u32), Vec<PaperIdx>> = BTreeMap::new();
        let mut cited: Vec<u32> = Vec::new();
        for q in citers {
            if options.exclude_self_cocitation
                && (index.is_author_of(mentor, q) || index.is_author_of(mentee, q))
            {
                continue;
            }
            cited.clear();
            cited.extend(index.references(q).iter().filter_map(|r| local.get(r).copied()));
            cited.sort_unstable();
            cited.dedup();
            for (i, &a) in cited.iter().enumerate() {
                for &b in &cited[i + 1..] {
                    edges.entry((a, b)).or_default().push(q);
                }
            }
        }

        Ok(Self::assemble(
            mentor_id.to_string(),
            mentee_id.to_string(),
            nodes,
            edges,
        ))
    }

    /// Graph from explicit nodes and an undirected edge list, without a corpus.
    ///
    /// Self loops and repeated edges are ignored. Nodes keep the given order.
    pub fn from_edge_list(
        mentor_id: &str,
        mentee_id: &str,
        nodes: Vec<PairNode>,
        edge_list: &[(usize, usize)],
    ) -> Self {
        let mut edges: BTreeMap<(u32, u32), Vec<PaperIdx>> = BTreeMap::new();
        for &(a, b) in edge_list {
            assert!(a < nodes.len() && b < nodes.len(), "edge endpoint out of range");
            if a == b {
                continue;
            }
            let key = (a.min(b) as u32, a.max(b) as u32);
            edges.entry(key).or_default();
        }
        Self::assemble(mentor_id.to_string(), mentee_id.to_string(), nodes, edges)
    }

    fn assemble(
        mentor_id: String,
        mentee_id: String,
        nodes: Vec<PairNode>,
        edges: BTreeMap<(u32, u32), Vec<PaperIdx>>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in edges.keys() {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            mentor_id,
            mentee_id,
            nodes,
            adjacency,
            edges,
        }
    }

    pub fn mentor_id(&self) -> &str {
        &self.mentor_id
    }

    pub fn mentee_id(&self) -> &str {
        &self.mentee_id
    }

    pub fn nodes(&self) -> &[PairNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor lists by local node index.
    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b) as u32, a.max(b) as u32);
        self.edges.contains_key(&key)
    }

    /// Edges as `(lo, hi)` node indices with their co-citing papers.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &[PaperIdx])> {
        self.edges
            .iter()
            .map(|(&(a, b), src)| ((a as usize, b as usize), src.as_slice()))
    }

    pub fn cociting_sources(&self, a: usize, b: usize) -> Option<&[PaperIdx]> {
        let key = (a.min(b) as u32, a.max(b) as u32);
        self.edges.get(&key).map(Vec::as_slice)
    }

    pub fn mentee_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.authorship.is_mentee())
            .map(|(i, _)| i)
    }

    pub fn mentor_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.authorship.is_mentor())
            .map(|(i, _)| i)
    }

    pub fn node_index(&self, paper_id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.paper_id == paper_id)
    }
}

/// Convenience wrapper around [`PairGraph::build`] with default options.
pub fn build_pair_graph(mentor_id: &str, mentee_id: &str, index: &CitationIndex) -> Result<PairGraph> {
    PairGraph::build(mentor_id, mentee_id, index, PairGraphOptions::default())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub year: i32,
    pub topic_id: u32,
    pub mentee_paper_count: usize,
    pub mentor_paper_count: usize,
}

/// Papers per (year, topic) for each author; JOINT papers count for both.
/// Papers outside retained topics are skipped.
pub fn pair_timeseries(graph: &PairGraph, partition: &TopicPartition) -> Result<Vec<TimeseriesRow>> {
    partition.check_graph(graph)?;
    let mut counts: BTreeMap<(i32, u32), (usize, usize)> = BTreeMap::new();
    for (i, node) in graph.nodes().iter().enumerate() {
        let Some(topic) = partition.topic_of(i) else {
            continue;
        };
        let entry = counts.entry((node.pub_year, topic)).or_default();
        if node.authorship.is_mentee() {
            entry.0 += 1;
        }
        if node.authorship.is_mentor() {
            entry.1 += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|((year, topic_id), (e, r))| TimeseriesRow {
            year,
            topic_id,
            mentee_paper_count: e,
            mentor_paper_count: r,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::TopicPartition;
    use crate::corpus::{Field, PaperRecord};

    fn paper(id: &str, authors: &[&str], year: i32, refs: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
            pub_year: year,
            field: Field::Chemistry,
            reference_ids: refs.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn minimal_cocitation() {
        let idx = CitationIndex::from_records(
            vec![
                paper("r1", &["R"], 1990, &[]),
                paper("e1", &["E"], 1995, &[]),
                paper("q", &["X"], 2000, &["r1", "e1"]),
            ],
            5,
        )
        .unwrap();
        let g = build_pair_graph("R", "E", &idx).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.nodes()[0].authorship, Authorship::Mentor);
        assert_eq!(g.nodes()[1].authorship, Authorship::Mentee);
        assert_eq!(g.edge_count(), 1);
        let q = idx.paper("q").unwrap();
        assert_eq!(g.cociting_sources(0, 1), Some(&[q][..]));
    }

    #[test]
    fn joint_paper_without_common_citer() {
        let idx = CitationIndex::from_records(
            vec![
                paper("j1", &["R", "E"], 1990, &[]),
                paper("e1", &["E"], 1995, &[]),
                paper("q", &["X"], 2000, &["j1"]),
            ],
            5,
        )
        .unwrap();
        let g = build_pair_graph("R", "E", &idx).unwrap();
        let roles: Vec<_> = g.nodes().iter().map(|n| (n.paper_id.as_str(), n.authorship)).collect();
        assert_eq!(roles, [("j1", Authorship::Joint), ("e1", Authorship::Mentee)]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn self_cocitation_flag() {
        let idx = CitationIndex::from_records(
            vec![
                paper("r1", &["R"], 1990, &[]),
                paper("e1", &["E"], 1995, &[]),
                paper("e2", &["E"], 2000, &["r1", "e1"]),
            ],
            5,
        )
        .unwrap();
        let g = build_pair_graph("R", "E", &idx).unwrap();
        assert!(g.has_edge(0, 1));
        let g = PairGraph::build(
            "R",
            "E",
            &idx,
            PairGraphOptions {
                exclude_self_cocitation: true,
            },
        )
        .unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn unknown_and_empty_pairs() {
        let idx = CitationIndex::from_records(vec![paper("r1", &["R"], 1990, &[])], 5).unwrap();
        assert!(matches!(build_pair_graph("R", "nobody", &idx), Err(Error::UnknownAuthor(_))));
    }

    #[test]
    fn timeseries_counts_joint_twice() {
        let nodes = vec![
            PairNode {
                paper_id: "e".into(),
                paper: None,
                authorship: Authorship::Mentee,
                pub_year: 1990,
                author_count: 1,
            },
            PairNode {
                paper_id: "j".into(),
                paper: None,
                authorship: Authorship::Joint,
                pub_year: 1995,
                author_count: 2,
            },
        ];
        let g = PairGraph::from_edge_list("R", "E", nodes, &[(0, 1)]);
        let part = TopicPartition::from_labels(&g, &[Some(0), Some(0)], 1.0, 1).unwrap();
        let rows = pair_timeseries(&g, &part).unwrap();
        assert_eq!(
            rows,
            vec![
                TimeseriesRow { year: 1990, topic_id: 0, mentee_paper_count: 1, mentor_paper_count: 0 },
                TimeseriesRow { year: 1995, topic_id: 0, mentee_paper_count: 1, mentor_paper_count: 1 },
            ]
        );
        let other = PairGraph::from_edge_list("R", "X", g.nodes().to_vec(), &[]);
        assert!(matches!(pair_timeseries(&other, &part), Err(Error::PartitionMismatch)));
    }
}
