//! Deterministic, seeded simulation of three broadcast propagation
//! protocols over peer-to-peer overlays: random-contact gossip (push, pull,
//! push-pull, with 1/k rumor decay), balanced binary tree routing, and tree
//! routing over fully-meshed node clusters with duplicate suppression.
//!
//! Runs proceed in synchronous rounds (every edge costs one round) and are
//! reproducible bit for bit from a 64-bit seed: same config, same round
//! logs, same summary. Nodes listed as failed crash-stop before round 0.
//!
//! The crate exposes the building blocks individually — [`topology`]
//! builders, [`protocols`] step functions, the [`engine`] run loop, and
//! [`metrics`] aggregation/CSV output — and re-exports the shared types at
//! the root.

pub mod config;
pub mod engine;
pub mod error;
pub mod id;
pub mod metrics;
pub mod protocols;
pub mod rng;
pub mod topology;

pub use config::{GossipStyle, Mode, SimConfig};
pub use engine::{run, run_sweep, run_traced, ConfigPatch, RoundLog, RunSummary, SweepCell};
pub use error::{Error, Result};
pub use id::{MessageId, NodeId};
pub use metrics::{aggregate, write_csv, Aggregate, CsvRow, RoundRow, SummaryRow};
pub use protocols::{GossipParams, NodeState, SendEvent, StepResult};
pub use rng::Prng;
pub use topology::{
    build_binary_tree, build_clustered_tree, build_contact_graph, GroupMeta, Overlay,
    OverlayKind, TreeMeta,
};
