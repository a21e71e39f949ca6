//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every expected value is either forced by the construction rules or
//! recomputed here by an independent oracle (raw BFS, parent-index
//! formulas, closed-form edge counts) — see tests/common/mod.rs.

mod common;

use std::collections::BTreeSet;
use std::panic::UnwindSafe;

use treecast_core::{
    metrics, run, run_sweep, run_traced, ConfigPatch, GossipStyle, Mode, NodeId, SimConfig,
};

fn criterion(name: &str, body: impl FnOnce() + UnwindSafe) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("[PASS] {name}"),
        Err(payload) => {
            println!("[FAIL] {name}");
            std::panic::resume_unwind(payload);
        }
    }
}

fn config(mode: Mode, n: u32) -> SimConfig {
    SimConfig {
        mode,
        n,
        contacts: 20.min(n.saturating_sub(1)).max(1),
        fanout: 1,
        gossip_style: GossipStyle::Push,
        k: 1,
        group_size: 3,
        origin: NodeId(0),
        failed: BTreeSet::new(),
        max_rounds: 64,
        seed: 1,
    }
}

#[test]
fn c01_tree_growth_pattern() {
    criterion("1 tree growth: newly informed per round is 1,2,4,8", || {
        let (summary, logs) = run(&config(Mode::Tree, 15)).unwrap();
        let mut prev = 0;
        let newly: Vec<u32> = logs
            .iter()
            .map(|l| {
                let d = l.cumulative_informed - prev;
                prev = l.cumulative_informed;
                d
            })
            .collect();
        assert_eq!(newly, vec![1, 2, 4, 8]);
        // four levels reach 2^4 - 1 nodes
        assert_eq!(logs.last().unwrap().cumulative_informed, (1 << 4) - 1);
        assert!(summary.converged);
    });
}

#[test]
fn c02_tree_traffic_optimality() {
    criterion("2 tree traffic: sends = n-1 and zero duplicates for every n <= 255 and every origin", || {
        for n in 1..=255u32 {
            for origin in 0..n {
                let mut c = config(Mode::Tree, n);
                c.origin = NodeId(origin);
                let (summary, _) = run(&c).unwrap();
                assert!(summary.converged, "n={n} origin={origin}");
                assert_eq!(summary.total_sends, u64::from(n) - 1, "n={n} origin={origin}");
                assert_eq!(summary.total_duplicates, 0, "n={n} origin={origin}");
            }
        }
    });
}

#[test]
fn c03_distance_bound_and_convergence_eccentricity() {
    criterion("3 distances: all pairs within 2x height (n <= 1023); convergence round = origin eccentricity", || {
        // exhaustive all-pairs bound on every tree size up to 1023
        for n in 1..=1023u32 {
            let overlay = treecast_core::build_binary_tree(n).unwrap();
            let height = common::heap_tree_height(n);
            assert_eq!(overlay.tree_meta().unwrap().height, height);
            let adj = common::adjacency(n, &common::overlay_edges(&overlay));
            let mut max_dist = 0;
            for u in 0..n {
                let dist = common::bfs_adjacency(&adj, u, &[]);
                for v in 0..n {
                    let d = dist[v as usize].expect("tree is connected");
                    max_dist = max_dist.max(d);
                    assert!(d <= 2 * height, "n={n} d({u},{v})={d} > 2*{height}");
                }
            }
            if n == 15 {
                assert_eq!(max_dist, 6, "the 2x-height bound is tight on a full tree");
            }
        }
        // convergence round equals the BFS eccentricity of the origin
        let n = 1023;
        let edges = common::heap_tree_edges(n);
        for i in 0..50u32 {
            let origin = (i * 41 + 3) % n;
            let mut c = config(Mode::Tree, n);
            c.origin = NodeId(origin);
            let (summary, _) = run(&c).unwrap();
            let ecc = common::eccentricity_over_edges(n, &edges, origin, &[]).unwrap();
            assert_eq!(summary.convergence_round, Some(ecc), "origin={origin}");
        }
    });
}

#[test]
fn c04_tree_fragility() {
    criterion("4 tree fragility: one failed internal node strands exactly its subtree", || {
        let n = 15u32;
        for failed in 1..=6u32 {
            let mut c = config(Mode::Tree, n);
            c.failed.insert(NodeId(failed));
            let (summary, logs) = run(&c).unwrap();
            let informed = logs.last().unwrap().cumulative_informed;
            let alive = n - 1;
            let uninformed_alive = alive - informed;
            // the subtree oracle counts the failed node itself; the rest of
            // its subtree is alive but unreachable
            let subtree = common::heap_subtree(n, failed).len() as u32;
            assert_eq!(uninformed_alive, subtree - 1, "failed={failed}");
            assert!(!summary.converged, "failed={failed}");
        }
    });
}

#[test]
fn c05_cluster_resilience() {
    criterion("5 cluster resilience: any single failure, full coverage within plain-tree round + 1", || {
        let (n, g) = (21u32, 3u32);
        let groups = n / g;
        let group_edges = common::heap_tree_edges(groups);
        // the same broadcast over a plain tree of groups would take the
        // origin group's eccentricity
        let plain_tree_round =
            common::eccentricity_over_edges(groups, &group_edges, 0, &[]).unwrap();
        for failed in 1..n {
            let mut c = config(Mode::TreeCluster, n);
            c.failed.insert(NodeId(failed));
            let (summary, _) = run(&c).unwrap();
            assert!(summary.converged, "failed={failed}");
            assert_eq!(summary.coverage, 1.0, "failed={failed}");
            assert!(
                summary.convergence_round.unwrap() <= plain_tree_round + 1,
                "failed={failed}: round {} > {} + 1",
                summary.convergence_round.unwrap(),
                plain_tree_round
            );
        }
    });
}

#[test]
fn c06_storm_suppression() {
    criterion("6 storm suppression: cluster sends = 2E-(n-1), duplicates = 2E-2(n-1)", || {
        for (n, g) in [(9u32, 3u32), (21, 3), (30, 3), (16, 4)] {
            let groups = u64::from(n / g);
            let g64 = u64::from(g);
            // closed-form overlay size: G cliques plus G-1 complete
            // bipartite group links
            let edges = groups * g64 * (g64 - 1) / 2 + (groups - 1) * g64 * g64;
            let mut c = config(Mode::TreeCluster, n);
            c.group_size = g;
            let (summary, _) = run(&c).unwrap();
            assert!(summary.converged);
            assert_eq!(
                summary.total_sends,
                2 * edges - u64::from(n - 1),
                "(n,g)=({n},{g})"
            );
            assert_eq!(
                summary.total_duplicates,
                2 * edges - 2 * u64::from(n - 1),
                "(n,g)=({n},{g})"
            );
        }
    });
}

#[test]
fn c07_gossip_residue_trend() {
    criterion("7 gossip residue: mean residue strictly decreases as k grows (200 seeds each)", || {
        let mut base = config(Mode::Gossip, 1000);
        base.contacts = 20;
        let overrides: Vec<ConfigPatch> = [1u64, 2, 4, 8]
            .into_iter()
            .map(|k| ConfigPatch {
                k: Some(k),
                ..Default::default()
            })
            .collect();
        let seeds: Vec<u64> = (1..=200).collect();
        let cells = run_sweep(&base, &seeds, &overrides);
        let mut means = Vec::new();
        for (ki, _) in overrides.iter().enumerate() {
            let residues: Vec<f64> = cells
                .iter()
                .filter(|cell| cell.override_index == ki)
                .map(|cell| cell.outcome.as_ref().unwrap().0.residue)
                .collect();
            assert_eq!(residues.len(), 200);
            means.push(residues.iter().sum::<f64>() / residues.len() as f64);
        }
        for (i, pair) in means.windows(2).enumerate() {
            assert!(
                pair[1] < pair[0],
                "mean residue not strictly decreasing at k={}: {means:?}",
                [1, 2, 4, 8][i + 1]
            );
        }
    });
}

#[test]
fn c08_duplicate_contact_slowdown() {
    criterion("8 duplicate contacts: no-decay gossip converges slower than the tree and wastes traffic", || {
        let n = 1023u32;
        let (tree_summary, _) = run(&config(Mode::Tree, n)).unwrap();
        let tree_round = tree_summary.convergence_round.unwrap();
        assert_eq!(tree_round, 9, "full 10-level tree from the root");
        assert_eq!(
            common::eccentricity_over_edges(n, &common::heap_tree_edges(n), 0, &[]).unwrap(),
            tree_round
        );
        assert_eq!(tree_summary.total_duplicates, 0);

        let mut base = config(Mode::Gossip, n);
        base.k = u64::MAX; // decay disabled
        let seeds: Vec<u64> = (1..=100).collect();
        let cells = run_sweep(&base, &seeds, &[ConfigPatch::default()]);
        let mut round_sum = 0.0;
        let mut dup_ratio_sum = 0.0;
        for cell in &cells {
            let (summary, _) = cell.outcome.as_ref().unwrap();
            assert!(summary.converged, "seed={}", summary.config.seed);
            let round = summary.convergence_round.unwrap();
            assert!(round >= tree_round, "seed={}", summary.config.seed);
            round_sum += f64::from(round);
            dup_ratio_sum += summary.total_duplicates as f64 / summary.total_sends as f64;
        }
        let mean_round = round_sum / 100.0;
        let mean_dup_ratio = dup_ratio_sum / 100.0;
        assert!(
            mean_round > f64::from(tree_round),
            "gossip mean {mean_round} not above tree round {tree_round}"
        );
        assert!(mean_dup_ratio > 0.0);
    });
}

#[test]
fn c09_degenerate_cluster_equals_tree() {
    criterion("9 degeneracy: group size 1 reproduces the tree send sequence exactly", || {
        for n in [1u32, 7, 15, 31] {
            let (tree_summary, _, tree_sends) = run_traced(&config(Mode::Tree, n)).unwrap();
            let mut c = config(Mode::TreeCluster, n);
            c.group_size = 1;
            let (cluster_summary, _, cluster_sends) = run_traced(&c).unwrap();
            assert_eq!(tree_sends, cluster_sends, "n={n}");
            assert_eq!(tree_summary.total_sends, cluster_summary.total_sends);
            assert_eq!(
                tree_summary.convergence_round,
                cluster_summary.convergence_round
            );
        }
    });
}

#[test]
fn c10_reproducibility() {
    criterion("10 reproducibility: every mode renders byte-identical CSVs on replay", || {
        let configs = [
            config(Mode::Tree, 127),
            config(Mode::TreeCluster, 30),
            {
                let mut c = config(Mode::Gossip, 500);
                c.k = 4;
                c.gossip_style = GossipStyle::PushPull;
                c
            },
        ];
        for c in &configs {
            let render = || {
                let (summary, logs) = run(c).unwrap();
                let round_rows: Vec<metrics::RoundRow> = logs
                    .iter()
                    .map(|log| metrics::RoundRow { run_id: 0, log })
                    .collect();
                let rounds_csv = metrics::csv_string(&round_rows);
                let summary_csv = metrics::csv_string(&[metrics::SummaryRow {
                    run_id: 0,
                    summary: &summary,
                }]);
                (rounds_csv, summary_csv)
            };
            let first = render();
            let second = render();
            assert_eq!(first, second, "mode={}", c.mode);
        }
    });
}
