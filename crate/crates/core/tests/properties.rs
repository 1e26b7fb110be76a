use proptest::prelude::*;

use cocite_core::community::{detect, modularity, DetectionConfig};
use cocite_core::corpus::Field;
use cocite_core::distance::{average_distance, DistanceOptions};
use cocite_core::pairgraph::{Authorship, PairGraph, PairNode};
use cocite_core::stats::{ccdf, ols_fit, ternary_coordinates};
use cocite_core::topics::{elite_and_outperforming_flags, EliteInput, EliteScope, TypeImpacts};

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = PairGraph> {
    (2..=max_nodes)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..3, n),
                prop::collection::vec((0..n, 0..n), 0..3 * n),
            )
        })
        .prop_map(|(roles, edges)| {
            let nodes = roles
                .iter()
                .enumerate()
                .map(|(i, r)| PairNode {
                    paper_id: format!("p{i}"),
                    paper: None,
                    authorship: [Authorship::Mentee, Authorship::Mentor, Authorship::Joint][*r as usize],
                    pub_year: 2000,
                    author_count: 1,
                })
                .collect();
            PairGraph::from_edge_list("R", "E", nodes, &edges)
        })
}

proptest! {
    #[test]
    fn ccdf_is_nonincreasing(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let c = ccdf(&values).unwrap();
        prop_assert!(c.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1));
        prop_assert!(c.iter().all(|&(_, p)| (0.0..1.0).contains(&p)));
    }

    #[test]
    fn ternary_sums_to_one(
        a in 0.0f64..1e6, b in 0.0f64..1e6, c in 0.0f64..1e6,
    ) {
        prop_assume!(a + b + c > 0.0);
        let (x, y, z) = ternary_coordinates(&TypeImpacts { primary: a, secondary: b, new: c }).unwrap();
        prop_assert!((x + y + z - 1.0).abs() <= 1e-12);
        prop_assert!(x >= 0.0 && y >= 0.0 && z >= 0.0);
    }

    #[test]
    fn ols_residuals_are_orthogonal(
        rows in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -100.0f64..100.0), 8..60),
    ) {
        let x1: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let x2: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let Ok(fit) = ols_fit(&y, &[("x1", x1.clone()), ("x2", x2.clone())]) else {
            return Ok(());
        };
        let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max) * rows.len() as f64 * 10.0;
        for col in [vec![1.0; rows.len()], x1, x2] {
            let dot: f64 = col.iter().zip(&fit.residuals).map(|(a, r)| a * r).sum();
            prop_assert!(dot.abs() <= 1e-9 * scale, "dot {dot}");
        }
        prop_assert!((0.0..=1.0 + 1e-12).contains(&fit.r2));
    }

    #[test]
    fn elite_flags_are_rank_based(
        values in prop::collection::vec(0u32..1000, 1..80),
        fraction in 0.05f64..1.0,
    ) {
        let ids: Vec<String> = (0..values.len()).map(|i| format!("e{i}")).collect();
        let rows = |f: &dyn Fn(f64) -> f64| -> Vec<EliteInput<'_>> {
            values
                .iter()
                .zip(&ids)
                .enumerate()
                .map(|(i, (&v, id))| EliteInput {
                    field: if i % 2 == 0 { Field::Physics } else { Field::Chemistry },
                    mentee_id: id,
                    windowed_citations: f(v as f64),
                    mentee_total_impact: 1.0,
                    mentor_total_impact: 0.5,
                })
                .collect()
        };
        for scope in [EliteScope::PerField, EliteScope::Global] {
            let base = elite_and_outperforming_flags(&rows(&|v| v), fraction, scope).unwrap();
            let logged = elite_and_outperforming_flags(&rows(&|v| (1.0 + v).ln()), fraction, scope).unwrap();
            let cubed = elite_and_outperforming_flags(&rows(&|v| 3.0 * v * v * v + 7.0), fraction, scope).unwrap();
            prop_assert_eq!(&base, &logged);
            prop_assert_eq!(&base, &cubed);
            prop_assert!(base.iter().any(|f| f.elite));
        }
    }

    #[test]
    fn modularity_is_bounded(g in graph_strategy(40), labels in prop::collection::vec(0u32..6, 40), seed in 0u64..1000) {
        let labels = &labels[..g.node_count()];
        let q = modularity(&g, labels, 1.0);
        prop_assert!((-0.5 - 1e-12..=1.0).contains(&q), "Q = {q}");
        let part = detect(&g, &DetectionConfig { seed, min_community_size: 1, ..Default::default() });
        let singletons: Vec<u32> = (0..g.node_count() as u32).collect();
        prop_assert!(part.modularity_q >= modularity(&g, &singletons, 1.0) - 1e-12);
        prop_assert!(part.modularity_q <= 1.0);
    }

    #[test]
    fn distance_is_bounded(g in graph_strategy(30)) {
        if let Ok(d) = average_distance(&g, DistanceOptions { exclude_joint_self_pairs: true }) {
            prop_assert!(d.n_disconnected_pairs <= d.n_pairs);
            if d.n_disconnected_pairs < d.n_pairs {
                prop_assert!(d.ave_distance >= 1.0);
            }
            if d.n_disconnected_pairs > 0 {
                prop_assert!(d.ave_distance <= d.max_finite_distance as f64);
            }
        }
    }
}
