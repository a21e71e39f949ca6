//! Drives full runs: failure marking, round iteration, termination, and the
//! per-round event record.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::config::{GossipStyle, Mode, SimConfig};
use crate::error::Result;
use crate::id::{MessageId, NodeId};
use crate::protocols::{
    self, flood_frontier_will_send, GossipParams, NodeState, SendEvent,
};
use crate::rng::Prng;
use crate::topology::{self, Overlay};

/// Per-round record. Round 0 is the injection round: no sends, the origin
/// becomes informed.
///
/// `sends = first_deliveries + duplicate_receptions + dropped` holds for
/// every round. `active_count` is the number of alive spreaders after the
/// round in gossip mode; in the flood modes it is the frontier, the nodes
/// first informed this round (they are the next round's senders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLog {
    pub round: u32,
    pub sends: u64,
    pub first_deliveries: u32,
    pub duplicate_receptions: u64,
    /// Sends addressed to failed nodes (counted as traffic, never delivered).
    pub dropped: u64,
    /// Nodes informed so far, the origin included.
    pub cumulative_informed: u32,
    pub active_count: u32,
}

/// End-of-run metrics. Coverage and residue are measured over alive nodes
/// only: `coverage + residue = 1`, and `converged` iff coverage is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub config: SimConfig,
    pub converged: bool,
    /// First round at which every alive node was informed; `None` when the
    /// run ended short of full coverage.
    pub convergence_round: Option<u32>,
    pub coverage: f64,
    pub residue: f64,
    pub total_sends: u64,
    pub total_duplicates: u64,
    pub rounds_executed: u32,
}

/// Runs one simulation to termination. Deterministic for a given config:
/// the overlay, every protocol decision, and every decay roll derive from
/// `config.seed`.
///
/// Termination: flood modes stop as soon as the freshly-informed frontier
/// has nobody left to forward to (this lets the cluster mode flush its final
/// duplicate round, and never executes an empty round). Gossip stops after
/// the first round with no sends, which is exact for push; for the pull
/// styles a zero-send round could in principle be followed by a lucky hit,
/// so this is a conservative cut-off. The `max_rounds` cap always applies.
pub fn run(config: &SimConfig) -> Result<(RunSummary, Vec<RoundLog>)> {
    let (summary, logs, _) = run_inner(config, false)?;
    Ok((summary, logs))
}

/// Like [`run`], additionally returning every send in emission order.
pub fn run_traced(config: &SimConfig) -> Result<(RunSummary, Vec<RoundLog>, Vec<SendEvent>)> {
    run_inner(config, true)
}

fn build_overlay(config: &SimConfig) -> Result<Overlay> {
    match config.mode {
        // stream tag 0 is reserved for topology construction
        Mode::Gossip => topology::build_contact_graph(
            config.n,
            config.contacts,
            &mut Prng::stream(config.seed, 0, 0),
        ),
        Mode::Tree => topology::build_binary_tree(config.n),
        Mode::TreeCluster => topology::build_clustered_tree(config.n, config.group_size),
    }
}

fn run_inner(
    config: &SimConfig,
    trace: bool,
) -> Result<(RunSummary, Vec<RoundLog>, Vec<SendEvent>)> {
    config.validate()?;
    let overlay = build_overlay(config)?;
    let n = config.n as usize;
    let msg = MessageId(0);

    let mut alive = vec![true; n];
    for f in &config.failed {
        alive[f.index()] = false;
    }
    let alive_count = config.alive_count();

    let mut states = vec![NodeState::default(); n];
    states[config.origin.index()].inject_origin(msg);

    let mut cumulative: u32 = 1;
    let mut logs = vec![RoundLog {
        round: 0,
        sends: 0,
        first_deliveries: 0,
        duplicate_receptions: 0,
        dropped: 0,
        cumulative_informed: cumulative,
        active_count: 1,
    }];
    let mut convergence_round = (cumulative == alive_count).then_some(0);
    let mut total_sends = 0u64;
    let mut total_duplicates = 0u64;
    let mut sent_events = Vec::new();

    let params = GossipParams {
        fanout: config.fanout,
        style: config.gossip_style,
        k: config.k,
    };

    for round in 1..=config.max_rounds {
        if config.mode != Mode::Gossip && !flood_frontier_will_send(&overlay, &states, round - 1)
        {
            break;
        }
        let step = match config.mode {
            Mode::Gossip => protocols::gossip_step(
                &overlay,
                &mut states,
                &alive,
                round,
                &params,
                config.seed,
                msg,
            )?,
            Mode::Tree => protocols::tree_step(&overlay, &mut states, &alive, round, msg)?,
            Mode::TreeCluster => {
                protocols::cluster_step(&overlay, &mut states, &alive, round, msg)?
            }
        };

        cumulative += step.first_deliveries;
        total_sends += step.sends.len() as u64;
        total_duplicates += step.duplicate_receptions;
        let active_count = match config.mode {
            Mode::Gossip => states
                .iter()
                .zip(&alive)
                .filter(|(s, &a)| a && s.active)
                .count() as u32,
            _ => states
                .iter()
                .filter(|s| s.informed_round == Some(round))
                .count() as u32,
        };
        logs.push(RoundLog {
            round,
            sends: step.sends.len() as u64,
            first_deliveries: step.first_deliveries,
            duplicate_receptions: step.duplicate_receptions,
            dropped: step.dropped,
            cumulative_informed: cumulative,
            active_count,
        });
        if convergence_round.is_none() && cumulative == alive_count {
            convergence_round = Some(round);
        }
        let no_sends = step.sends.is_empty();
        if trace {
            sent_events.extend(step.sends);
        }
        if config.mode == Mode::Gossip && no_sends {
            break;
        }
    }

    let coverage = f64::from(cumulative) / f64::from(alive_count);
    let summary = RunSummary {
        config: config.clone(),
        converged: cumulative == alive_count,
        convergence_round,
        coverage,
        residue: 1.0 - coverage,
        total_sends,
        total_duplicates,
        rounds_executed: logs.last().map(|l| l.round).unwrap_or(0),
    };
    Ok((summary, logs, sent_events))
}

/// Field-wise overrides applied on top of a base config; the seed comes from
/// the sweep's seed list instead.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigPatch {
    pub mode: Option<Mode>,
    pub n: Option<u32>,
    pub contacts: Option<u32>,
    pub fanout: Option<u32>,
    pub gossip_style: Option<GossipStyle>,
    pub k: Option<u64>,
    pub group_size: Option<u32>,
    pub origin: Option<NodeId>,
    pub failed: Option<BTreeSet<NodeId>>,
    pub max_rounds: Option<u32>,
}

impl ConfigPatch {
    pub fn apply(&self, base: &SimConfig) -> SimConfig {
        let mut c = base.clone();
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.contacts {
            c.contacts = v;
        }
        if let Some(v) = self.fanout {
            c.fanout = v;
        }
        if let Some(v) = self.gossip_style {
            c.gossip_style = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.group_size {
            c.group_size = v;
        }
        if let Some(v) = self.origin {
            c.origin = v;
        }
        if let Some(v) = &self.failed {
            c.failed = v.clone();
        }
        if let Some(v) = self.max_rounds {
            c.max_rounds = v;
        }
        c
    }
}

/// One cell of a sweep: `run_id` is the ordinal in (override-major,
/// seed-minor) expansion order, stable across executions.
#[derive(Debug)]
pub struct SweepCell {
    pub run_id: u64,
    pub override_index: usize,
    pub seed_index: usize,
    pub config: SimConfig,
    /// Per-cell outcome; an invalid derived config is reported here and the
    /// rest of the sweep continues.
    pub outcome: Result<(RunSummary, Vec<RoundLog>)>,
}

/// Runs the cartesian product of `overrides` x `seeds`. Cells execute in
/// parallel (they share nothing mutable) and the output is ordered by
/// (override index, seed index) regardless of execution order.
pub fn run_sweep(base: &SimConfig, seeds: &[u64], overrides: &[ConfigPatch]) -> Vec<SweepCell> {
    let cells: Vec<(usize, usize)> = (0..overrides.len())
        .flat_map(|oi| (0..seeds.len()).map(move |si| (oi, si)))
        .collect();
    cells
        .into_par_iter()
        .map(|(oi, si)| {
            let mut config = overrides[oi].apply(base);
            config.seed = seeds[si];
            let outcome = run(&config);
            SweepCell {
                run_id: (oi * seeds.len() + si) as u64,
                override_index: oi,
                seed_index: si,
                config,
                outcome,
            }
        })
        .collect()
}
