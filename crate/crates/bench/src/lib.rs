//! Shared fixtures for the benchmark targets.

use std::collections::BTreeSet;

use treecast_core::{GossipStyle, Mode, NodeId, SimConfig};

/// A run config with benchmark-friendly defaults for the given mode/size.
pub fn bench_config(mode: Mode, n: u32) -> SimConfig {
    SimConfig {
        mode,
        n,
        contacts: 100.min(n.saturating_sub(1)).max(1),
        fanout: 1,
        gossip_style: GossipStyle::Push,
        k: 4,
        group_size: 3,
        origin: NodeId(0),
        failed: BTreeSet::new(),
        max_rounds: 64,
        seed: 1,
    }
}
