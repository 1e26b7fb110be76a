//! Topic communities by multilevel modularity optimization.
//!
//! Detection runs the fast-unfolding scheme: repeated local moving passes
//! over the nodes in a seeded random order, followed by aggregation of each
//! community into a single weighted node, until a level produces no move.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairgraph::PairGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: u32,
    pub size: usize,
    /// Mentee papers in the topic, JOINT included.
    pub mentee_papers: usize,
    /// Mentor papers in the topic, JOINT included.
    pub mentor_papers: usize,
}

/// Community assignment of a pair graph after the size filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPartition {
    mentor_id: String,
    mentee_id: String,
    assignment: Vec<Option<u32>>,
    communities: Vec<u32>,
    topics: Vec<TopicSummary>,
    pub modularity_q: f64,
    pub gamma: f64,
    pub min_community_size: usize,
}

impl TopicPartition {
    /// Builds a partition from raw community labels (one per node, pre-filter).
    ///
    /// `None` labels and nodes listed in `force_unassigned` become singleton
    /// communities that are never retained.
    fn from_raw(
        graph: &PairGraph,
        raw: &[u32],
        force_unassigned: &[bool],
        gamma: f64,
        min_community_size: usize,
    ) -> Self {
        let n = graph.node_count();
        debug_assert_eq!(raw.len(), n);
        let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &c) in raw.iter().enumerate() {
            if !force_unassigned[i] {
                groups.entry(c).or_default().push(i);
            }
        }
        let mut retained: Vec<Vec<usize>> = groups
            .into_values()
            .filter(|members| members.len() >= min_community_size.max(1))
            .collect();
        // descending size, then earliest member
        retained.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

        let mut assignment = vec![None; n];
        let mut topics = Vec::with_capacity(retained.len());
        for (t, members) in retained.iter().enumerate() {
            let (mut e, mut r) = (0, 0);
            for &i in members {
                assignment[i] = Some(t as u32);
                let role = graph.nodes()[i].authorship;
                e += role.is_mentee() as usize;
                r += role.is_mentor() as usize;
            }
            topics.push(TopicSummary {
                topic_id: t as u32,
                size: members.len(),
                mentee_papers: e,
                mentor_papers: r,
            });
        }

        Self {
            mentor_id: graph.mentor_id().to_string(),
            mentee_id: graph.mentee_id().to_string(),
            assignment,
            communities: dense_labels(raw),
            topics,
            modularity_q: modularity_of_labels(graph, raw, gamma),
            gamma,
            min_community_size,
        }
    }

    /// Partition from externally supplied labels, e.g. planted topics.
    pub fn from_labels(
        graph: &PairGraph,
        labels: &[Option<u32>],
        gamma: f64,
        min_community_size: usize,
    ) -> Result<Self> {
        if labels.len() != graph.node_count() {
            return Err(Error::PartitionMismatch);
        }
        let offset = labels.iter().flatten().max().map_or(0, |m| m + 1);
        let raw: Vec<u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| l.unwrap_or(offset + i as u32))
            .collect();
        let unassigned: Vec<bool> = labels.iter().map(Option::is_none).collect();
        Ok(Self::from_raw(graph, &raw, &unassigned, gamma, min_community_size))
    }

    pub fn mentor_id(&self) -> &str {
        &self.mentor_id
    }

    pub fn mentee_id(&self) -> &str {
        &self.mentee_id
    }

    pub fn check_graph(&self, graph: &PairGraph) -> Result<()> {
        if self.mentor_id != graph.mentor_id()
            || self.mentee_id != graph.mentee_id()
            || self.assignment.len() != graph.node_count()
        {
            return Err(Error::PartitionMismatch);
        }
        Ok(())
    }

    /// Retained topic of a node, `None` for UNASSIGNED.
    pub fn topic_of(&self, node: usize) -> Option<u32> {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[Option<u32>] {
        &self.assignment
    }

    /// Dense pre-filter community label of every node.
    pub fn communities(&self) -> &[u32] {
        &self.communities
    }

    pub fn topics(&self) -> &[TopicSummary] {
        &self.topics
    }

    pub fn topic(&self, topic_id: u32) -> Option<&TopicSummary> {
        self.topics.get(topic_id as usize)
    }

    pub fn members(&self, topic_id: u32) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == Some(topic_id))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn unassigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }
}

fn dense_labels(raw: &[u32]) -> Vec<u32> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    raw.iter()
        .map(|c| {
            let next = map.len() as u32;
            *map.entry(*c).or_insert(next)
        })
        .collect()
}

/// Modularity of a labeling of the pair graph (one label per node).
///
/// Computed per community as `L_c / m - gamma (K_c / 2m)^2`, which equals the
/// pairwise sum over the adjacency matrix for a simple undirected graph.
/// An edgeless graph has modularity 0.
pub fn modularity(graph: &PairGraph, assignment: &[u32], gamma: f64) -> f64 {
    assert_eq!(assignment.len(), graph.node_count(), "assignment must cover every node");
    modularity_of_labels(graph, assignment, gamma)
}

fn modularity_of_labels(graph: &PairGraph, labels: &[u32], gamma: f64) -> f64 {
    let m = graph.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let mut internal: HashMap<u32, f64> = HashMap::new();
    let mut degree_sum: HashMap<u32, f64> = HashMap::new();
    for (i, nbrs) in graph.adjacency().iter().enumerate() {
        *degree_sum.entry(labels[i]).or_default() += nbrs.len() as f64;
    }
    for ((a, b), _) in graph.edges() {
        if labels[a] == labels[b] {
            *internal.entry(labels[a]).or_default() += 1.0;
        }
    }
    let mut keys: Vec<u32> = degree_sum.keys().copied().collect();
    keys.sort_unstable();
    keys.iter()
        .map(|c| {
            let l = internal.get(c).copied().unwrap_or(0.0);
            let k = degree_sum[c];
            l / m - gamma * (k / (2.0 * m)).powi(2)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub gamma: f64,
    pub seed: u64,
    pub min_community_size: usize,
    /// A pass whose total modularity gain is below this ends the level.
    pub tolerance: f64,
    pub max_levels: usize,
    pub max_passes: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            seed: 0,
            min_community_size: 10,
            tolerance: 1e-9,
            max_levels: 64,
            max_passes: 1000,
        }
    }
}

/// Runs detection with the default tolerance and level limits.
pub fn detect_communities(graph: &PairGraph, gamma: f64, seed: u64, min_community_size: usize) -> TopicPartition {
    detect(
        graph,
        &DetectionConfig {
            gamma,
            seed,
            min_community_size,
            ..DetectionConfig::default()
        },
    )
}

pub fn detect(graph: &PairGraph, config: &DetectionConfig) -> TopicPartition {
    let membership = louvain(graph, config, None);
    finish(graph, &membership, config)
}

/// Like [`detect`], also returning the modularity of the full-graph
/// assignment after every local moving pass.
pub fn detect_traced(graph: &PairGraph, config: &DetectionConfig) -> (TopicPartition, Vec<f64>) {
    let mut trace = Vec::new();
    let membership = louvain(graph, config, Some(&mut trace));
    (finish(graph, &membership, config), trace)
}

fn finish(graph: &PairGraph, membership: &[u32], config: &DetectionConfig) -> TopicPartition {
    let isolated: Vec<bool> = (0..graph.node_count()).map(|i| graph.degree(i) == 0).collect();
    TopicPartition::from_raw(graph, membership, &isolated, config.gamma, config.min_community_size)
}

/// Weighted graph of one aggregation level.
struct Level {
    adjacency: Vec<Vec<(u32, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_pair_graph(graph: &PairGraph) -> Self {
        let adjacency: Vec<Vec<(u32, f64)>> = graph
            .adjacency()
            .iter()
            .map(|nbrs| nbrs.iter().map(|&j| (j, 1.0)).collect())
            .collect();
        let strength = adjacency.iter().map(|a| a.len() as f64).collect();
        Self {
            self_loops: vec![0.0; adjacency.len()],
            adjacency,
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Collapses each community (dense labels `0..k`) into one node.
    fn aggregate(&self, community: &[u32], k: usize) -> Self {
        let mut rows: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); k];
        let mut self_loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        for i in 0..self.len() {
            let ci = community[i];
            strength[ci as usize] += self.strength[i];
            self_loops[ci as usize] += self.self_loops[i];
            for &(j, w) in &self.adjacency[i] {
                let cj = community[j as usize];
                if ci == cj {
                    // every internal edge is visited from both ends
                    self_loops[ci as usize] += w / 2.0;
                } else {
                    *rows[ci as usize].entry(cj).or_default() += w;
                }
            }
        }
        Self {
            adjacency: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
            self_loops,
            strength,
        }
    }
}

fn louvain(graph: &PairGraph, config: &DetectionConfig, mut trace: Option<&mut Vec<f64>>) -> Vec<u32> {
    let n = graph.node_count();
    let mut membership: Vec<u32> = (0..n as u32).collect();
    let m2 = 2.0 * graph.edge_count() as f64;
    if m2 == 0.0 {
        return membership;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut level = Level::from_pair_graph(graph);

    for _ in 0..config.max_levels {
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.shuffle(&mut rng);

        let mut on_pass = |comm: &[u32]| {
            if let Some(t) = trace.as_deref_mut() {
                let labels: Vec<u32> = membership.iter().map(|&c| comm[c as usize]).collect();
                t.push(modularity_of_labels(graph, &labels, config.gamma));
            }
        };
        let (community, moved) = local_moving(&level, &order, m2, config, &mut on_pass);
        if !moved {
            break;
        }
        let dense = dense_labels(&community);
        let k = dense.iter().max().map_or(0, |m| *m as usize + 1);
        for c in membership.iter_mut() {
            *c = dense[*c as usize];
        }
        level = level.aggregate(&dense, k);
    }
    membership
}

/// One level of local moving. Returns the community of every level node and
/// whether any node changed community.
fn local_moving(
    level: &Level,
    order: &[usize],
    m2: f64,
    config: &DetectionConfig,
    on_pass: &mut dyn FnMut(&[u32]),
) -> (Vec<u32>, bool) {
    let n = level.len();
    let gamma = config.gamma;
    let mut community: Vec<u32> = (0..n as u32).collect();
    let mut total = level.strength.clone();
    let mut link_weight = vec![0.0f64; n];
    let mut touched = vec![false; n];
    let mut neighbors: Vec<u32> = Vec::new();
    let mut moved_any = false;

    for _ in 0..config.max_passes {
        let mut moves = 0usize;
        let mut pass_gain = 0.0;
        for &i in order {
            let ki = level.strength[i];
            if ki == 0.0 {
                continue;
            }
            let current = community[i];
            neighbors.clear();
            for &(j, w) in &level.adjacency[i] {
                let c = community[j as usize];
                if !touched[c as usize] {
                    touched[c as usize] = true;
                    neighbors.push(c);
                }
                link_weight[c as usize] += w;
            }
            total[current as usize] -= ki;
            let gain = |c: u32| link_weight[c as usize] - gamma * total[c as usize] * ki / m2;

            let current_gain = gain(current);
            let mut best = current;
            let mut best_gain = current_gain;
            neighbors.sort_unstable();
            for &c in &neighbors {
                if c == current {
                    continue;
                }
                // strict: ties keep the current community, then the lowest id
                let g = gain(c);
                if g > best_gain {
                    best = c;
                    best_gain = g;
                }
            }
            total[best as usize] += ki;
            community[i] = best;
            if best != current {
                moves += 1;
                pass_gain += 2.0 * (best_gain - current_gain) / m2;
            }
            for &c in &neighbors {
                touched[c as usize] = false;
                link_weight[c as usize] = 0.0;
            }
        }
        if moves > 0 {
            moved_any = true;
        }
        on_pass(&community);
        if moves == 0 || pass_gain < config.tolerance {
            break;
        }
    }
    (community, moved_any)
}

/// Normalized mutual information `2 I(A;B) / (H(A) + H(B))` between two labelings.
/// Two single-cluster labelings score 1.
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if a.is_empty() {
        return 1.0;
    }
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
    }
    let entropy = |p: &HashMap<usize, f64>| -> f64 {
        p.values().map(|c| {
            let q = c / n;
            -q * q.ln()
        }).sum()
    };
    let (ha, hb) = (entropy(&pa), entropy(&pb));
    if ha + hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let pxy = c / n;
            pxy * (pxy / ((pa[&x] / n) * (pb[&y] / n))).ln()
        })
        .sum();
    (2.0 * mi / (ha + hb)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairgraph::{Authorship, PairNode};

    fn nodes(n: usize) -> Vec<PairNode> {
        (0..n)
            .map(|i| PairNode {
                paper_id: format!("p{i:03}"),
                paper: None,
                authorship: if i % 2 == 0 { Authorship::Mentee } else { Authorship::Mentor },
                pub_year: 2000,
                author_count: 1,
            })
            .collect()
    }

    fn cliques(sizes: &[usize], bridges: &[(usize, usize)]) -> PairGraph {
        let mut edges = Vec::new();
        let mut start = 0;
        for &s in sizes {
            for a in start..start + s {
                for b in a + 1..start + s {
                    edges.push((a, b));
                }
            }
            start += s;
        }
        edges.extend_from_slice(bridges);
        PairGraph::from_edge_list("R", "E", nodes(start), &edges)
    }

    #[test]
    fn two_disjoint_edges() {
        let g = PairGraph::from_edge_list("R", "E", nodes(4), &[(0, 1), (2, 3)]);
        assert!((modularity(&g, &[0, 0, 1, 1], 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singletons_keep_only_diagonal_terms() {
        let g = cliques(&[3, 1], &[(2, 3)]);
        let k: Vec<f64> = (0..4).map(|i| g.degree(i) as f64).collect();
        let m2 = 2.0 * g.edge_count() as f64;
        for gamma in [0.5, 1.0, 2.0] {
            let expected = -gamma * k.iter().map(|x| x * x).sum::<f64>() / (m2 * m2);
            let q = modularity(&g, &[0, 1, 2, 3], gamma);
            assert!((q - expected).abs() < 1e-15, "{q} vs {expected}");
        }
    }

    #[test]
    fn edgeless_is_zero_and_unassigned() {
        let g = PairGraph::from_edge_list("R", "E", nodes(5), &[]);
        assert_eq!(modularity(&g, &[0, 0, 0, 0, 0], 1.0), 0.0);
        let p = detect_communities(&g, 1.0, 7, 1);
        assert!(p.topics().is_empty());
        assert_eq!(p.unassigned_count(), 5);
        assert_eq!(p.modularity_q, 0.0);
    }

    #[test]
    fn two_cliques_joined_by_one_edge() {
        let g = cliques(&[12, 12], &[(0, 12)]);
        let p = detect_communities(&g, 1.0, 42, 10);
        assert_eq!(p.topics().len(), 2);
        assert!(p.topics().iter().all(|t| t.size == 12));
        let planted: Vec<u32> = (0..24).map(|i| (i / 12) as u32).collect();
        let q_planted = modularity(&g, &planted, 1.0);
        assert!(q_planted > 0.45);
        assert!((p.modularity_q - q_planted).abs() < 1e-12);
    }

    #[test]
    fn small_communities_are_filtered() {
        let g = cliques(&[12, 5], &[]);
        let p = detect_communities(&g, 1.0, 1, 10);
        assert_eq!(p.topics().len(), 1);
        assert_eq!(p.topics()[0].size, 12);
        assert_eq!(p.unassigned_count(), 5);
        assert!((12..17).all(|i| p.topic_of(i).is_none()));
    }

    #[test]
    fn topic_ids_follow_descending_size() {
        let g = cliques(&[10, 14, 12], &[(0, 10), (10, 24)]);
        let p = detect_communities(&g, 1.0, 3, 10);
        let sizes: Vec<usize> = p.topics().iter().map(|t| t.size).collect();
        assert_eq!(sizes, [14, 12, 10]);
        assert_eq!(p.topic_of(10), Some(0));
    }

    #[test]
    fn isolated_nodes_are_unassigned() {
        let g = PairGraph::from_edge_list("R", "E", nodes(4), &[(0, 1), (1, 2), (0, 2)]);
        let p = detect_communities(&g, 1.0, 0, 1);
        assert_eq!(p.topics().len(), 1);
        assert_eq!(p.topic_of(3), None);
    }

    #[test]
    fn deterministic_for_seed() {
        let g = cliques(&[6, 7, 8], &[(0, 6), (6, 13), (1, 14)]);
        let a = detect_communities(&g, 1.0, 99, 1);
        let b = detect_communities(&g, 1.0, 99, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn nmi_bounds() {
        assert_eq!(normalized_mutual_information(&[0, 0, 1, 1], &[5, 5, 7, 7]), 1.0);
        assert!(normalized_mutual_information(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 1e-12);
        assert_eq!(normalized_mutual_information(&[0, 0], &[3, 3]), 1.0);
    }

    #[test]
    fn from_labels_length_checked() {
        let g = PairGraph::from_edge_list("R", "E", nodes(3), &[]);
        assert!(matches!(
            TopicPartition::from_labels(&g, &[Some(0)], 1.0, 1),
            Err(Error::PartitionMismatch)
        ));
    }
}
