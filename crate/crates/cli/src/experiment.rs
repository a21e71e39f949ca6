//! Experiment files: a JSON mirror of the run config where some fields may
//! be lists (sweep axes), plus seed block and output directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use treecast_core::{ConfigPatch, GossipStyle, Mode, NodeId, SimConfig};

use crate::CliError;

/// A scalar or a list of values for one sweep axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Axis<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> Axis<T> {
    fn values(&self) -> Vec<T> {
        match self {
            Axis::One(v) => vec![v.clone()],
            Axis::Many(vs) => vs.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// Number of seeds: base, base+1, ...
    pub count: u32,
    pub base: u64,
}

/// Parsed experiment file. Unknown keys are rejected. The sweep axes are
/// {mode, n, contacts, fanout, k, group_size}; everything else is a scalar
/// applied to every cell.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentFile {
    pub mode: Option<Axis<Mode>>,
    pub n: Option<Axis<u32>>,
    pub contacts: Option<Axis<u32>>,
    pub fanout: Option<Axis<u32>>,
    pub gossip_style: Option<GossipStyle>,
    pub k: Option<Axis<u64>>,
    pub group_size: Option<Axis<u32>>,
    pub origin: Option<u32>,
    pub failed: Option<Vec<u32>>,
    pub max_rounds: Option<u32>,
    pub seeds: Option<SeedSpec>,
    pub out_dir: Option<PathBuf>,
}

pub fn load_file(path: &Path) -> Result<ExperimentFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Command-line values; each one beats the corresponding file value.
#[derive(Debug, Default)]
pub struct InlineOverrides {
    pub mode: Option<Mode>,
    pub n: Option<u32>,
    pub contacts: Option<u32>,
    pub fanout: Option<u32>,
    pub gossip_style: Option<GossipStyle>,
    pub k: Option<u64>,
    pub group_size: Option<u32>,
    pub origin: Option<u32>,
    pub failed: Option<BTreeSet<NodeId>>,
    pub max_rounds: Option<u32>,
    pub seed: Option<u64>,
    pub seed_count: Option<u32>,
}

/// A fully expanded sweep, ready for the engine.
#[derive(Debug)]
pub struct Experiment {
    pub base: SimConfig,
    pub seeds: Vec<u64>,
    pub overrides: Vec<ConfigPatch>,
    pub out_dir: Option<PathBuf>,
}

fn axis<T: Copy>(
    name: &str,
    inline: Option<T>,
    file: &Option<Axis<T>>,
    default: T,
) -> Result<Vec<T>, CliError> {
    let values = match (inline, file) {
        (Some(v), _) => vec![v],
        (None, Some(a)) => a.values(),
        (None, None) => vec![default],
    };
    if values.is_empty() {
        return Err(CliError::Config(format!("config: axis {name:?} is an empty list")));
    }
    Ok(values)
}

/// Merges defaults, file values, and inline overrides, then expands the
/// axes in fixed key order (mode, n, contacts, fanout, k, group_size);
/// seeds are innermost, so run ids stay stable.
pub fn build(file: ExperimentFile, inline: InlineOverrides) -> Result<Experiment, CliError> {
    let mut base = SimConfig {
        mode: Mode::Tree,
        n: 15,
        contacts: 4,
        fanout: 1,
        gossip_style: GossipStyle::Push,
        k: 1,
        group_size: 3,
        origin: NodeId(0),
        failed: BTreeSet::new(),
        max_rounds: 64,
        seed: 1,
    };
    if let Some(style) = file.gossip_style {
        base.gossip_style = style;
    }
    if let Some(origin) = file.origin {
        base.origin = NodeId(origin);
    }
    if let Some(failed) = &file.failed {
        base.failed = failed.iter().map(|&f| NodeId(f)).collect();
    }
    if let Some(max_rounds) = file.max_rounds {
        base.max_rounds = max_rounds;
    }
    if let Some(style) = inline.gossip_style {
        base.gossip_style = style;
    }
    if let Some(origin) = inline.origin {
        base.origin = NodeId(origin);
    }
    if let Some(failed) = inline.failed {
        base.failed = failed;
    }
    if let Some(max_rounds) = inline.max_rounds {
        base.max_rounds = max_rounds;
    }

    let modes = axis("mode", inline.mode, &file.mode, base.mode)?;
    let ns = axis("n", inline.n, &file.n, base.n)?;
    let contacts = axis("contacts", inline.contacts, &file.contacts, base.contacts)?;
    let fanouts = axis("fanout", inline.fanout, &file.fanout, base.fanout)?;
    let ks = axis("k", inline.k, &file.k, base.k)?;
    let group_sizes = axis("group_size", inline.group_size, &file.group_size, base.group_size)?;

    let seed_base = inline.seed.or(file.seeds.as_ref().map(|s| s.base)).unwrap_or(1);
    let seed_count = inline
        .seed_count
        .or(file.seeds.as_ref().map(|s| s.count))
        .unwrap_or(1);
    if seed_count == 0 {
        return Err(CliError::Config("seeds: count must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..seed_count)
        .map(|i| seed_base.wrapping_add(u64::from(i)))
        .collect();

    let mut overrides = Vec::new();
    for &mode in &modes {
        for &n in &ns {
            for &contact in &contacts {
                for &fanout in &fanouts {
                    for &k in &ks {
                        for &group_size in &group_sizes {
                            overrides.push(ConfigPatch {
                                mode: Some(mode),
                                n: Some(n),
                                contacts: Some(contact),
                                fanout: Some(fanout),
                                k: Some(k),
                                group_size: Some(group_size),
                                ..Default::default()
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(Experiment {
        base,
        seeds,
        overrides,
        out_dir: file.out_dir,
    })
}
