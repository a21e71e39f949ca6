//! Run configuration and its validity rules.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::NodeId;

/// Which propagation protocol a run simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Gossip,
    Tree,
    TreeCluster,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gossip => "gossip",
            Mode::Tree => "tree",
            Mode::TreeCluster => "tree_cluster",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gossip" => Ok(Mode::Gossip),
            "tree" => Ok(Mode::Tree),
            "tree_cluster" => Ok(Mode::TreeCluster),
            other => Err(Error::invalid(format!(
                "mode: unknown value {other:?} (expected gossip, tree or tree_cluster)"
            ))),
        }
    }
}

/// Gossip exchange style: informed nodes send, uninformed nodes ask, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GossipStyle {
    Push,
    Pull,
    PushPull,
}

impl fmt::Display for GossipStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GossipStyle::Push => "push",
            GossipStyle::Pull => "pull",
            GossipStyle::PushPull => "push_pull",
        })
    }
}

impl FromStr for GossipStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "push" => Ok(GossipStyle::Push),
            "pull" => Ok(GossipStyle::Pull),
            "push_pull" => Ok(GossipStyle::PushPull),
            other => Err(Error::invalid(format!(
                "gossip_style: unknown value {other:?} (expected push, pull or push_pull)"
            ))),
        }
    }
}

/// Full description of one simulated run. Replaying an identical config
/// reproduces identical round logs and summary, byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: Mode,
    /// Network size.
    pub n: u32,
    /// Gossip contact-list size per node. Ignored outside gossip mode.
    pub contacts: u32,
    /// Peers contacted per round per acting node (gossip only).
    pub fanout: u32,
    pub gossip_style: GossipStyle,
    /// Rumor-mongering decay: each duplicate event deactivates the affected
    /// node with probability 1/k. Larger k means slower interest loss;
    /// `u64::MAX` effectively disables decay.
    pub k: u64,
    /// Cluster group size. 1 degenerates to the plain tree.
    pub group_size: u32,
    /// Node that injects the broadcast at round 0.
    pub origin: NodeId,
    /// Nodes crashed before round 0: they never send, receive, or relay.
    pub failed: BTreeSet<NodeId>,
    /// Hard cap on simulated rounds.
    pub max_rounds: u32,
    pub seed: u64,
}

impl SimConfig {
    /// Checks every field-level invariant; the message names the first
    /// offending field.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n: node count must be positive"));
        }
        if self.origin.0 >= self.n {
            return Err(Error::invalid(format!(
                "origin: node {} is outside [0, {})",
                self.origin, self.n
            )));
        }
        if let Some(bad) = self.failed.iter().find(|f| f.0 >= self.n) {
            return Err(Error::invalid(format!(
                "failed: node {} is outside [0, {})",
                bad, self.n
            )));
        }
        if self.failed.contains(&self.origin) {
            return Err(Error::invalid(format!(
                "failed: origin {} must not be in the failed set",
                self.origin
            )));
        }
        if self.k == 0 {
            return Err(Error::invalid("k: decay parameter must be positive"));
        }
        match self.mode {
            Mode::Gossip => {
                if self.contacts == 0 {
                    return Err(Error::invalid("contacts: must be positive in gossip mode"));
                }
                if self.contacts > self.n.saturating_sub(1) {
                    return Err(Error::invalid(format!(
                        "contacts: {} exceeds n - 1 = {}",
                        self.contacts,
                        self.n.saturating_sub(1)
                    )));
                }
                if self.fanout == 0 {
                    return Err(Error::invalid("fanout: must be positive in gossip mode"));
                }
                if self.fanout > self.contacts {
                    return Err(Error::invalid(format!(
                        "fanout: {} exceeds contacts = {}",
                        self.fanout, self.contacts
                    )));
                }
            }
            Mode::Tree => {}
            Mode::TreeCluster => {
                if self.group_size == 0 {
                    return Err(Error::invalid("group_size: must be at least 1"));
                }
                if !self.n.is_multiple_of(self.group_size) {
                    return Err(Error::invalid(format!(
                        "n: {} is not a multiple of group_size {}",
                        self.n, self.group_size
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of nodes that are not in the failed set.
    pub fn alive_count(&self) -> u32 {
        self.n - self.failed.len() as u32
    }

    /// Parameter key shared by all seeds of one experiment cell: every
    /// config field except the seed. Space-separated so it never needs CSV
    /// quoting.
    pub fn group_key(&self) -> String {
        format!(
            "mode={} n={} contacts={} fanout={} style={} k={} group_size={} origin={} failed={}",
            self.mode,
            self.n,
            self.contacts,
            self.fanout,
            self.gossip_style,
            self.k,
            self.group_size,
            self.origin,
            self.failed.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base(mode: Mode, n: u32) -> SimConfig {
        SimConfig {
            mode,
            n,
            contacts: 4,
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

    fn err_text(c: &SimConfig) -> String {
        c.validate().unwrap_err().to_string()
    }

    #[test]
    fn valid_configs_pass() {
        base(Mode::Tree, 15).validate().unwrap();
        base(Mode::Gossip, 100).validate().unwrap();
        base(Mode::TreeCluster, 9).validate().unwrap();
    }

    #[test]
    fn rejects_zero_n() {
        assert!(err_text(&base(Mode::Tree, 0)).contains("n:"));
    }

    #[test]
    fn rejects_origin_out_of_range() {
        let mut c = base(Mode::Tree, 5);
        c.origin = NodeId(5);
        assert!(err_text(&c).contains("origin"));
    }

    #[test]
    fn rejects_failed_origin() {
        let mut c = base(Mode::Tree, 5);
        c.failed.insert(NodeId(0));
        assert!(err_text(&c).contains("origin"));
    }

    #[test]
    fn rejects_contacts_at_or_above_n() {
        let mut c = base(Mode::Gossip, 4);
        c.contacts = 4;
        assert!(err_text(&c).contains("contacts"));
    }

    #[test]
    fn rejects_fanout_above_contacts() {
        let mut c = base(Mode::Gossip, 100);
        c.fanout = 5;
        assert!(err_text(&c).contains("fanout"));
    }

    #[test]
    fn rejects_zero_k() {
        let mut c = base(Mode::Gossip, 100);
        c.k = 0;
        assert!(err_text(&c).contains("k:"));
    }

    #[test]
    fn rejects_indivisible_cluster() {
        let mut c = base(Mode::TreeCluster, 10);
        c.group_size = 3;
        assert!(err_text(&c).contains("multiple of group_size"));
    }

    #[test]
    fn mode_and_style_round_trip_strings() {
        for m in [Mode::Gossip, Mode::Tree, Mode::TreeCluster] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        for s in [GossipStyle::Push, GossipStyle::Pull, GossipStyle::PushPull] {
            assert_eq!(s.to_string().parse::<GossipStyle>().unwrap(), s);
        }
        assert!("flood".parse::<Mode>().is_err());
    }
}
