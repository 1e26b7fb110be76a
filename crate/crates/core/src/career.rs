//! Cumulative impact over career years.
//!
//! Each paper's topic-specific contribution is booked at its publication
//! year; career year 0 is the role's first paper in the pair graph.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impact::{ImpactLedger, Role};
use crate::numeric::{exact_sum, median, ExactSum};
use crate::pairgraph::PairGraph;
use crate::topics::{TopicTyping, TypeBucket};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CareerPoint {
    pub career_year: i32,
    pub cum_total: f64,
    pub cum_primary: f64,
    pub cum_secondary: f64,
    pub cum_new: f64,
}

/// Paper-count shares by topic type within one career decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeRatios {
    pub decade: i32,
    pub n_papers: usize,
    pub primary: f64,
    pub secondary: f64,
    pub new: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerSeries {
    pub role: Role,
    pub first_pub_year: i32,
    /// One point per career year from 0 through the role's last paper.
    pub points: Vec<CareerPoint>,
    /// Decades with at least one paper in a typed topic.
    pub decades: Vec<DecadeRatios>,
}

impl CareerSeries {
    pub fn last_career_year(&self) -> i32 {
        self.points.last().map_or(0, |p| p.career_year)
    }

    pub fn final_total(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.cum_total)
    }

    pub fn at(&self, career_year: i32) -> Option<&CareerPoint> {
        usize::try_from(career_year).ok().and_then(|i| self.points.get(i))
    }
}

#[derive(Default)]
struct YearBucket {
    total: Vec<f64>,
    by_type: [Vec<f64>; 3],
}

fn slot(b: TypeBucket) -> usize {
    match b {
        TypeBucket::Primary => 0,
        TypeBucket::Secondary => 1,
        TypeBucket::New => 2,
    }
}

pub fn career_series(
    ledger: &ImpactLedger,
    typing: &TopicTyping,
    graph: &PairGraph,
    role: Role,
) -> Result<CareerSeries> {
    let in_role = |i: &usize| {
        let a = graph.nodes()[*i].authorship;
        match role {
            Role::Mentee => a.is_mentee(),
            Role::Mentor => a.is_mentor(),
        }
    };
    let nodes: Vec<usize> = (0..graph.node_count()).filter(in_role).collect();
    let years = nodes.iter().map(|&i| graph.nodes()[i].pub_year);
    let (Some(first), Some(last)) = (years.clone().min(), years.max()) else {
        return Err(Error::NoPapers);
    };

    // node -> (contribution, bucket) for papers in retained topics
    let mut placed: HashMap<usize, (f64, Option<TypeBucket>)> = HashMap::new();
    for topic in &ledger.topics {
        let bucket = typing.bucket(topic.topic_id, role);
        for p in topic.papers.iter().filter(|p| p.role == role) {
            placed.insert(p.node, (p.contribution, bucket));
        }
    }

    let mut by_year: BTreeMap<i32, YearBucket> = BTreeMap::new();
    let mut decade_counts: BTreeMap<i32, [usize; 3]> = BTreeMap::new();
    for &i in &nodes {
        let Some(&(contribution, bucket)) = placed.get(&i) else {
            continue;
        };
        let cy = graph.nodes()[i].pub_year - first;
        let entry = by_year.entry(cy).or_default();
        entry.total.push(contribution);
        if let Some(b) = bucket {
            entry.by_type[slot(b)].push(contribution);
            decade_counts.entry(cy.div_euclid(10)).or_default()[slot(b)] += 1;
        }
    }

    let mut acc: [ExactSum; 4] = Default::default();
    let mut points = Vec::with_capacity((last - first + 1) as usize);
    for cy in 0..=(last - first) {
        if let Some(b) = by_year.get(&cy) {
            acc[0].extend(b.total.iter().copied());
            for k in 0..3 {
                acc[k + 1].extend(b.by_type[k].iter().copied());
            }
        }
        points.push(CareerPoint {
            career_year: cy,
            cum_total: acc[0].value(),
            cum_primary: acc[1].value(),
            cum_secondary: acc[2].value(),
            cum_new: acc[3].value(),
        });
    }

    let decades = decade_counts
        .into_iter()
        .map(|(decade, c)| {
            let n: usize = c.iter().sum();
            DecadeRatios {
                decade,
                n_papers: n,
                primary: c[0] as f64 / n as f64,
                secondary: c[1] as f64 / n as f64,
                new: c[2] as f64 / n as f64,
            }
        })
        .collect();

    Ok(CareerSeries {
        role,
        first_pub_year: first,
        points,
        decades,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragePoint {
    pub career_year: i32,
    pub n_contributors: usize,
    pub cum_total: f64,
    pub cum_primary: f64,
    pub cum_secondary: f64,
    pub cum_new: f64,
}

/// Per-year mean over the series whose careers reach that year; series
/// that end earlier drop out rather than being padded.
pub fn cohort_average_series(series: &[&CareerSeries], max_year: i32) -> Result<Vec<AveragePoint>> {
    if series.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let mut out = Vec::new();
    for cy in 0..=max_year {
        let live: Vec<&CareerPoint> = series.iter().filter_map(|s| s.at(cy)).collect();
        if live.is_empty() {
            continue;
        }
        let n = live.len();
        let mean = |f: fn(&CareerPoint) -> f64| exact_sum(live.iter().map(|p| f(p))) / n as f64;
        out.push(AveragePoint {
            career_year: cy,
            n_contributors: n,
            cum_total: mean(|p| p.cum_total),
            cum_primary: mean(|p| p.cum_primary),
            cum_secondary: mean(|p| p.cum_secondary),
            cum_new: mean(|p| p.cum_new),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeSummary {
    pub decade: i32,
    pub n_members: usize,
    pub mean_primary: f64,
    pub median_primary: f64,
    pub mean_secondary: f64,
    pub median_secondary: f64,
    pub mean_new: f64,
    pub median_new: f64,
}

/// Mean and median paper-count shares per decade across a cohort.
pub fn decade_summary(series: &[&CareerSeries]) -> Vec<DecadeSummary> {
    let mut per_decade: BTreeMap<i32, Vec<DecadeRatios>> = BTreeMap::new();
    for s in series {
        for d in &s.decades {
            per_decade.entry(d.decade).or_default().push(*d);
        }
    }
    per_decade
        .into_iter()
        .map(|(decade, rows)| {
            let col = |f: fn(&DecadeRatios) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
            let (p, s, n) = (col(|r| r.primary), col(|r| r.secondary), col(|r| r.new));
            let m = |v: &[f64]| exact_sum(v.iter().copied()) / v.len() as f64;
            DecadeSummary {
                decade,
                n_members: rows.len(),
                mean_primary: m(&p),
                median_primary: median(&p).unwrap_or(0.0),
                mean_secondary: m(&s),
                median_secondary: median(&s).unwrap_or(0.0),
                mean_new: m(&n),
                median_new: median(&n).unwrap_or(0.0),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::TopicPartition;
    use crate::impact::{PaperContribution, TopicImpact};
    use crate::pairgraph::{Authorship, PairNode};
    use crate::topics::type_topics;

    fn node(id: &str, role: Authorship, year: i32) -> PairNode {
        PairNode {
            paper_id: id.into(),
            paper: None,
            authorship: role,
            pub_year: year,
            author_count: 1,
        }
    }

    fn contribution(node: usize, role: Role, c: f64) -> PaperContribution {
        PaperContribution {
            paper_id: format!("n{node}"),
            node,
            role,
            w: c as u64,
            s: 1,
            contribution: c,
        }
    }

    #[test]
    fn single_secondary_paper() {
        // one mentee paper and one mentor paper in one shared topic -> SECONDARY
        let g = PairGraph::from_edge_list(
            "R",
            "E",
            vec![node("e", Authorship::Mentee, 2000), node("r", Authorship::Mentor, 1990)],
            &[(0, 1)],
        );
        let p = TopicPartition::from_labels(&g, &[Some(0), Some(0)], 1.0, 1).unwrap();
        let typing = type_topics(&p).unwrap();
        let ledger = ImpactLedger {
            topics: vec![TopicImpact {
                topic_id: 0,
                mentee_impact: 5.0,
                mentor_impact: 1.0,
                cociting_set_size: 5,
                papers: vec![contribution(0, Role::Mentee, 5.0), contribution(1, Role::Mentor, 1.0)],
            }],
        };
        let s = career_series(&ledger, &typing, &g, Role::Mentee).unwrap();
        assert_eq!(s.points.len(), 1);
        let p0 = s.points[0];
        assert_eq!((p0.cum_total, p0.cum_primary, p0.cum_secondary, p0.cum_new), (5.0, 0.0, 5.0, 0.0));
        assert_eq!(s.decades[0].secondary, 1.0);
    }

    #[test]
    fn accumulation_and_censoring() {
        let g = PairGraph::from_edge_list(
            "R",
            "E",
            vec![
                node("a", Authorship::Mentee, 1980),
                node("b", Authorship::Mentee, 1983),
                node("c", Authorship::Mentee, 1992),
            ],
            &[(0, 1), (1, 2)],
        );
        let p = TopicPartition::from_labels(&g, &[Some(0), Some(0), Some(0)], 1.0, 1).unwrap();
        let typing = type_topics(&p).unwrap();
        let ledger = ImpactLedger {
            topics: vec![TopicImpact {
                topic_id: 0,
                mentee_impact: 3.5,
                mentor_impact: 0.0,
                cociting_set_size: 3,
                papers: vec![
                    contribution(0, Role::Mentee, 0.0),
                    contribution(1, Role::Mentee, 1.5),
                    contribution(2, Role::Mentee, 2.0),
                ],
            }],
        };
        let s = career_series(&ledger, &typing, &g, Role::Mentee).unwrap();
        assert_eq!(s.at(3).unwrap().cum_new, 1.5);
        assert_eq!(s.at(12).unwrap().cum_total, 3.5);
        assert_eq!(s.last_career_year(), 12);
        assert_eq!(s.decades.len(), 2);
        assert_eq!(s.decades[0].n_papers, 2);

        let short = CareerSeries {
            points: s.points[..11].to_vec(),
            ..s.clone()
        };
        let avg = cohort_average_series(&[&short, &s], 30).unwrap();
        assert_eq!(avg.len(), 13);
        assert_eq!(avg[10].n_contributors, 2);
        assert_eq!(avg[11].n_contributors, 1);
        assert_eq!(avg[12].cum_total, 3.5);

        let same = cohort_average_series(&[&s, &s], 12).unwrap();
        assert!(same.iter().zip(&s.points).all(|(a, p)| a.cum_total == p.cum_total));
        assert!(matches!(cohort_average_series(&[], 3), Err(Error::EmptyCohort)));
        assert!(matches!(career_series(&ledger, &typing, &g, Role::Mentor), Err(Error::NoPapers)));
    }
}
