//! Per-node, per-round protocol behavior for the three broadcast modes.
//!
//! All three step functions share the synchronous model: sends are computed
//! against round-start state, deliveries (and gossip decay) apply at round
//! end. Round 0 is reserved for injecting the message at the origin; the
//! first sends happen in round 1.
//!
//! Gossip randomness is split per (round, node) off the run seed (see
//! [`Prng::stream`]); within one node's round the stream is consumed in a
//! fixed order: contact selection first (a node makes at most one selection
//! per round: a push if it is an active spreader, a pull if it is
//! uninformed), then one decay roll per duplicate event charged to the node
//! (its own pushes that landed on already-informed peers, plus duplicate
//! copies it received).

use std::collections::{BTreeMap, BTreeSet};

use crate::config::GossipStyle;
use crate::error::{Error, Result};
use crate::id::{MessageId, NodeId};
use crate::rng::Prng;
use crate::topology::{Overlay, OverlayKind};

/// Protocol state of one node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeState {
    /// Has first-received the message.
    pub informed: bool,
    /// Still spreading. Gossip decay clears it; an inactive node keeps the
    /// message and still answers pulls, it just stops pushing.
    pub active: bool,
    /// Who delivered the first copy. Absent for the origin and for
    /// uninformed nodes. Simultaneous first deliveries record the lowest
    /// sender id.
    pub first_sender: Option<NodeId>,
    /// Message ids already received; duplicates of anything in here are
    /// never forwarded again.
    pub seen: BTreeSet<MessageId>,
    /// Round of first receipt.
    pub informed_round: Option<u32>,
}

impl NodeState {
    /// Marks this node as the broadcast origin at round 0.
    pub fn inject_origin(&mut self, msg: MessageId) {
        self.informed = true;
        self.active = true;
        self.first_sender = None;
        self.seen.insert(msg);
        self.informed_round = Some(0);
    }
}

/// One message transmission. `(from, to)` is always an overlay edge (a
/// contact-list entry in gossip mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SendEvent {
    pub from: NodeId,
    pub to: NodeId,
    pub round: u32,
    pub message: MessageId,
}

/// What one round produced: the sends in emission order plus delivery
/// counters. `sends.len() == first_deliveries + duplicate_receptions +
/// dropped` always holds.
#[derive(Debug, Clone, Default)]
pub struct StepResult {
    pub sends: Vec<SendEvent>,
    pub first_deliveries: u32,
    pub duplicate_receptions: u64,
    /// Sends addressed to failed nodes: counted as traffic, never delivered.
    pub dropped: u64,
}

/// Gossip tuning knobs, lifted out of the full run config.
#[derive(Debug, Clone, Copy)]
pub struct GossipParams {
    pub fanout: u32,
    pub style: GossipStyle,
    /// Decay: each duplicate event deactivates the affected node with
    /// probability 1/k.
    pub k: u64,
}

fn expect_kind(overlay: &Overlay, expected: OverlayKind) -> Result<()> {
    if overlay.kind() != expected {
        return Err(Error::WrongOverlayKind {
            expected,
            actual: overlay.kind(),
        });
    }
    Ok(())
}

/// Applies `sends` to round-start `states`: grouped per recipient, lowest
/// sender id wins the first delivery, everything else is a duplicate
/// reception. Returns counters plus the per-recipient duplicate counts,
/// which gossip feeds into decay.
fn apply_deliveries(
    states: &mut [NodeState],
    alive: &[bool],
    round: u32,
    msg: MessageId,
    sends: &[SendEvent],
) -> (StepResult, Vec<(NodeId, u32)>) {
    let mut result = StepResult::default();
    let mut dup_counts = Vec::new();
    let mut by_recipient: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for s in sends {
        if !alive[s.to.index()] {
            result.dropped += 1;
            continue;
        }
        by_recipient.entry(s.to).or_default().push(s.from);
    }
    for (to, mut senders) in by_recipient {
        senders.sort_unstable();
        let state = &mut states[to.index()];
        let duplicates = if state.informed {
            // already knew at round start: every copy is a duplicate
            senders.len() as u32
        } else {
            state.informed = true;
            state.active = true;
            state.first_sender = Some(senders[0]);
            state.seen.insert(msg);
            state.informed_round = Some(round);
            result.first_deliveries += 1;
            senders.len() as u32 - 1
        };
        if duplicates > 0 {
            result.duplicate_receptions += u64::from(duplicates);
            dup_counts.push((to, duplicates));
        }
    }
    (result, dup_counts)
}

/// One synchronous gossip round over a contact graph.
///
/// push: every alive active node sends to `fanout` contacts chosen
/// uniformly from its list. pull: every alive uninformed node asks `fanout`
/// chosen contacts; each asked contact that is informed responds this same
/// round, and only the response counts as a send. push_pull does both.
///
/// Deactivated nodes still answer pulls (lost interest is not a lost
/// message), and answering one never triggers decay on the responder.
pub fn gossip_step(
    overlay: &Overlay,
    states: &mut [NodeState],
    alive: &[bool],
    round: u32,
    params: &GossipParams,
    seed: u64,
    msg: MessageId,
) -> Result<StepResult> {
    expect_kind(overlay, OverlayKind::ContactGraph)?;
    debug_assert!(round >= 1, "round 0 is injection only");
    let n = overlay.len();
    let do_push = matches!(params.style, GossipStyle::Push | GossipStyle::PushPull);
    let do_pull = matches!(params.style, GossipStyle::Pull | GossipStyle::PushPull);

    let informed_at_start: Vec<bool> = states.iter().map(|s| s.informed).collect();

    let mut sends = Vec::new();
    let mut rngs: Vec<Option<Prng>> = vec![None; n as usize];
    // duplicate events owed to each node: its own pushes that landed on
    // already-informed peers, plus (below) duplicate copies it received
    let mut decay_events = vec![0u32; n as usize];
    let mut picks = Vec::new();
    for u in 0..n {
        if !alive[u as usize] {
            continue;
        }
        let state = &states[u as usize];
        let selecting = (do_push && state.active) || (do_pull && !state.informed);
        if !selecting {
            continue;
        }
        let list = overlay.neighbors(NodeId(u));
        let rng = rngs[u as usize].get_or_insert_with(|| Prng::stream(seed, round as u64, u as u64));
        rng.choose_distinct(list.len() as u32, params.fanout)?
            .iter()
            .for_each(|&i| picks.push(list[i as usize]));
        if do_push && state.active {
            for &to in &picks {
                sends.push(SendEvent {
                    from: NodeId(u),
                    to,
                    round,
                    message: msg,
                });
                if informed_at_start[to.index()] {
                    decay_events[u as usize] += 1;
                }
            }
        } else {
            // pull: informed contacts answer within the round
            for &c in &picks {
                if alive[c.index()] && informed_at_start[c.index()] {
                    sends.push(SendEvent {
                        from: c,
                        to: NodeId(u),
                        round,
                        message: msg,
                    });
                }
            }
        }
        picks.clear();
    }

    let (mut result, dup_counts) = apply_deliveries(states, alive, round, msg, &sends);
    for (to, count) in dup_counts {
        decay_events[to.index()] += count;
    }

    // decay: one 1/k roll per duplicate event; any hit deactivates
    for u in 0..n as usize {
        if decay_events[u] == 0 || !states[u].active {
            continue;
        }
        let rng = rngs[u].get_or_insert_with(|| Prng::stream(seed, round as u64, u as u64));
        let mut hit = false;
        for _ in 0..decay_events[u] {
            hit |= rng.one_in(params.k);
        }
        if hit {
            states[u].active = false;
        }
    }

    result.sends = sends;
    Ok(result)
}

fn flood_step(
    overlay: &Overlay,
    states: &mut [NodeState],
    alive: &[bool],
    round: u32,
    msg: MessageId,
) -> StepResult {
    debug_assert!(round >= 1, "round 0 is injection only");
    let mut sends = Vec::new();
    for u in 0..overlay.len() {
        let state = &states[u as usize];
        if state.informed_round != Some(round - 1) {
            continue;
        }
        for &v in overlay.neighbors(NodeId(u)) {
            if Some(v) != state.first_sender {
                sends.push(SendEvent {
                    from: NodeId(u),
                    to: v,
                    round,
                    message: msg,
                });
            }
        }
    }
    let (mut result, _) = apply_deliveries(states, alive, round, msg, &sends);
    result.sends = sends;
    result
}

/// One tree-broadcast round: every node first informed in round `round - 1`
/// (the origin, for round 1) forwards to every tree neighbor except the one
/// it heard from. No randomness, no decay.
pub fn tree_step(
    overlay: &Overlay,
    states: &mut [NodeState],
    alive: &[bool],
    round: u32,
    msg: MessageId,
) -> Result<StepResult> {
    expect_kind(overlay, OverlayKind::BinaryTree)?;
    Ok(flood_step(overlay, states, alive, round, msg))
}

/// One cluster-broadcast round: same forwarding rule as [`tree_step`] but
/// over the clustered overlay, so first receipt fans out to group buddies
/// and both adjacent groups. A recipient that has already seen the message
/// id records a duplicate and refuses to forward it again, which is the
/// whole broadcast-storm suppression.
pub fn cluster_step(
    overlay: &Overlay,
    states: &mut [NodeState],
    alive: &[bool],
    round: u32,
    msg: MessageId,
) -> Result<StepResult> {
    expect_kind(overlay, OverlayKind::ClusteredTree)?;
    Ok(flood_step(overlay, states, alive, round, msg))
}

/// True when the nodes first informed at `round` have anybody left to
/// forward to next round. When false, a flood run has nothing further to do.
pub fn flood_frontier_will_send(overlay: &Overlay, states: &[NodeState], round: u32) -> bool {
    states.iter().enumerate().any(|(u, st)| {
        st.informed_round == Some(round)
            && overlay
                .neighbors(NodeId(u as u32))
                .iter()
                .any(|&v| Some(v) != st.first_sender)
    })
}
