//! Average shortest-path distance between mentee and mentor papers.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairgraph::PairGraph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceOptions {
    /// Skip the zero-length (j, j) pairs contributed by JOINT papers.
    pub exclude_joint_self_pairs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub ave_distance: f64,
    pub n_pairs: usize,
    /// Longest finite shortest path among the pair's papers; substituted for
    /// every disconnected (mentee, mentor) pair. Zero when not needed.
    pub max_finite_distance: u32,
    pub n_disconnected_pairs: usize,
}

const UNREACHED: u32 = u32::MAX;

fn bfs(adjacency: &[Vec<u32>], source: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
    dist.fill(UNREACHED);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in &adjacency[u] {
            let v = v as usize;
            if dist[v] == UNREACHED {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
}

/// Longest finite shortest path over all node pairs (graph diameter taken
/// over components).
fn longest_finite_path(graph: &PairGraph) -> u32 {
    let n = graph.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut queue = VecDeque::new();
    let mut best = 0;
    for s in 0..n {
        if graph.degree(s) == 0 {
            continue;
        }
        bfs(graph.adjacency(), s, &mut dist, &mut queue);
        best = dist
            .iter()
            .filter(|d| **d != UNREACHED)
            .copied()
            .fold(best, u32::max);
    }
    best
}

/// Mean shortest-path length over all (mentee paper, mentor paper) pairs.
///
/// JOINT papers sit on both sides. Disconnected pairs take the longest finite
/// shortest path of the graph. Breadth-first searches start from whichever
/// side is smaller.
pub fn average_distance(graph: &PairGraph, options: DistanceOptions) -> Result<DistanceResult> {
    let mentee: Vec<usize> = graph.mentee_nodes().collect();
    let mentor: Vec<usize> = graph.mentor_nodes().collect();
    if mentee.is_empty() || mentor.is_empty() {
        return Err(Error::EmptyPair {
            mentor: graph.mentor_id().to_string(),
            mentee: graph.mentee_id().to_string(),
        });
    }
    let (sources, targets) = if mentee.len() <= mentor.len() {
        (&mentee, &mentor)
    } else {
        (&mentor, &mentee)
    };

    let n = graph.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut queue = VecDeque::new();
    let mut finite_sum: u64 = 0;
    let mut n_pairs = 0usize;
    let mut disconnected = 0usize;
    for &s in sources {
        bfs(graph.adjacency(), s, &mut dist, &mut queue);
        for &t in targets {
            if s == t && options.exclude_joint_self_pairs {
                continue;
            }
            n_pairs += 1;
            match dist[t] {
                UNREACHED => disconnected += 1,
                d => finite_sum += d as u64,
            }
        }
    }
    if n_pairs == 0 {
        return Err(Error::NoFinitePaths);
    }
    let max_finite = if disconnected > 0 {
        if graph.edge_count() == 0 {
            return Err(Error::NoFinitePaths);
        }
        longest_finite_path(graph)
    } else {
        0
    };
    let total = finite_sum + disconnected as u64 * max_finite as u64;
    Ok(DistanceResult {
        ave_distance: total as f64 / n_pairs as f64,
        n_pairs,
        max_finite_distance: max_finite,
        n_disconnected_pairs: disconnected,
    })
}
