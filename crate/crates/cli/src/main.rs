//! `treecast`: run seeded broadcast-propagation experiments and export
//! overlay topologies.
//!
//! Exit codes: 0 success, 2 configuration error, 1 runtime error.

mod experiment;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treecast_core::{
    aggregate, build_binary_tree, build_clustered_tree, build_contact_graph, metrics, run_sweep,
    Aggregate, Mode, NodeId, Prng, RoundLog, RunSummary, SweepCell,
};

use experiment::{ExperimentFile, InlineOverrides};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or experiment file: exit 2.
    Config(String),
    /// Failure while executing a valid request: exit 1.
    Runtime(String),
}

#[derive(Parser)]
#[command(
    name = "treecast",
    version,
    about = "Deterministic simulator comparing gossip, tree, and tree-cluster broadcast"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation sweep and write rounds.csv, summary.csv, aggregate.csv
    Run(RunArgs),
    /// Print an overlay as an edge list
    Topology(TopologyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment file; inline flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// gossip, tree or tree_cluster
    #[arg(long)]
    mode: Option<String>,
    /// Network size
    #[arg(long)]
    n: Option<u32>,
    /// Gossip contact-list size
    #[arg(long)]
    contacts: Option<u32>,
    /// Gossip peers contacted per round
    #[arg(long)]
    fanout: Option<u32>,
    /// push, pull or push_pull
    #[arg(long)]
    gossip_style: Option<String>,
    /// Decay parameter: each duplicate event deactivates with probability 1/k
    #[arg(long)]
    k: Option<u64>,
    /// Cluster group size
    #[arg(long)]
    group_size: Option<u32>,
    /// Origin node
    #[arg(long)]
    origin: Option<u32>,
    /// Comma-separated failed nodes, e.g. 1,5,9
    #[arg(long)]
    failed: Option<String>,
    /// Round cap
    #[arg(long)]
    max_rounds: Option<u32>,
    /// Base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds: base, base+1, ...
    #[arg(long)]
    seed_count: Option<u32>,
    /// Output directory (default: config out_dir, then $TREECAST_OUT_DIR, then .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TopologyArgs {
    /// gossip, tree or tree_cluster
    #[arg(long)]
    mode: String,
    /// Network size
    #[arg(long)]
    n: u32,
    /// Cluster group size (tree_cluster; default 3)
    #[arg(long)]
    group_size: Option<u32>,
    /// Contact-list size (gossip; default 4)
    #[arg(long)]
    contacts: Option<u32>,
    /// Seed for the gossip contact graph (default 1)
    #[arg(long)]
    seed: Option<u64>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Topology(args) => cmd_topology(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_failed(list: &str) -> Result<BTreeSet<NodeId>, CliError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map(NodeId)
                .map_err(|e| CliError::Config(format!("failed: bad node id {s:?}: {e}")))
        })
        .collect()
}

fn inline_overrides(args: &RunArgs) -> Result<InlineOverrides, CliError> {
    Ok(InlineOverrides {
        mode: args
            .mode
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(|e: treecast_core::Error| CliError::Config(e.to_string()))?,
        gossip_style: args
            .gossip_style
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(|e: treecast_core::Error| CliError::Config(e.to_string()))?,
        n: args.n,
        contacts: args.contacts,
        fanout: args.fanout,
        k: args.k,
        group_size: args.group_size,
        origin: args.origin,
        failed: args.failed.as_deref().map(parse_failed).transpose()?,
        max_rounds: args.max_rounds,
        seed: args.seed,
        seed_count: args.seed_count,
    })
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => experiment::load_file(path)?,
        None => ExperimentFile::default(),
    };
    let inline = inline_overrides(&args)?;
    let exp = experiment::build(file, inline)?;

    // the sweep must contain at least one valid cell
    let mut first_invalid = None;
    let valid = exp
        .overrides
        .iter()
        .filter(|patch| {
            let config = patch.apply(&exp.base);
            match config.validate() {
                Ok(()) => true,
                Err(e) => {
                    first_invalid.get_or_insert(e.to_string());
                    false
                }
            }
        })
        .count();
    if valid == 0 {
        return Err(CliError::Config(format!(
            "sweep expands to no valid configuration: {}",
            first_invalid.unwrap_or_else(|| "empty sweep".into())
        )));
    }

    let out_dir = args
        .out
        .clone()
        .or_else(|| exp.out_dir.clone())
        .or_else(|| std::env::var_os("TREECAST_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Runtime(format!("cannot create output dir {}: {e}", out_dir.display()))
    })?;

    let cells = run_sweep(&exp.base, &exp.seeds, &exp.overrides);
    let mut ok: Vec<(&SweepCell, &RunSummary, &[RoundLog])> = Vec::new();
    for cell in &cells {
        match &cell.outcome {
            Ok((summary, logs)) => ok.push((cell, summary, logs)),
            Err(e) => eprintln!(
                "run {} skipped ({}, seed {}): {e}",
                cell.run_id,
                cell.config.group_key(),
                cell.config.seed
            ),
        }
    }

    let round_rows: Vec<metrics::RoundRow> = ok
        .iter()
        .flat_map(|(cell, _, logs)| {
            logs.iter().map(|log| metrics::RoundRow {
                run_id: cell.run_id,
                log,
            })
        })
        .collect();
    let summary_rows: Vec<metrics::SummaryRow> = ok
        .iter()
        .map(|(cell, summary, _)| metrics::SummaryRow {
            run_id: cell.run_id,
            summary,
        })
        .collect();

    // one aggregate row per parameter group, in first-appearance order
    type Grouped<'a> = Vec<(String, Vec<(&'a RunSummary, &'a [RoundLog])>)>;
    let mut groups: Grouped = Vec::new();
    for (_, summary, logs) in &ok {
        let key = summary.config.group_key();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push((summary, logs)),
            None => groups.push((key, vec![(summary, logs)])),
        }
    }
    let aggregates: Vec<Aggregate> = groups
        .iter()
        .map(|(_, members)| aggregate(members).map_err(|e| CliError::Runtime(e.to_string())))
        .collect::<Result<_, _>>()?;

    let io = |e: treecast_core::Error| CliError::Runtime(e.to_string());
    metrics::write_csv(&round_rows, &out_dir.join("rounds.csv")).map_err(io)?;
    metrics::write_csv(&summary_rows, &out_dir.join("summary.csv")).map_err(io)?;
    metrics::write_csv(&aggregates, &out_dir.join("aggregate.csv")).map_err(io)?;

    println!(
        "{} run(s) ({} skipped) -> {}",
        ok.len(),
        cells.len() - ok.len(),
        out_dir.display()
    );
    print!("{}", mode_comparison(&ok));
    Ok(())
}

/// One line per mode: convergence rate, mean rounds among converged runs,
/// mean sends, duplicate ratio.
fn mode_comparison(ok: &[(&SweepCell, &RunSummary, &[RoundLog])]) -> String {
    use std::fmt::Write;
    let mut modes: Vec<Mode> = Vec::new();
    for (_, s, _) in ok {
        if !modes.contains(&s.config.mode) {
            modes.push(s.config.mode);
        }
    }
    let mut out = String::new();
    for mode in modes {
        let runs: Vec<&RunSummary> = ok
            .iter()
            .filter(|(_, s, _)| s.config.mode == mode)
            .map(|(_, s, _)| *s)
            .collect();
        let count = runs.len() as f64;
        let converged: Vec<&&RunSummary> = runs.iter().filter(|s| s.converged).collect();
        let mean_rounds = if converged.is_empty() {
            "n/a".to_owned()
        } else {
            let mean = converged
                .iter()
                .map(|s| f64::from(s.convergence_round.unwrap()))
                .sum::<f64>()
                / converged.len() as f64;
            format!("{mean:.2}")
        };
        let mean_sends = runs.iter().map(|s| s.total_sends as f64).sum::<f64>() / count;
        let dup_ratio = runs
            .iter()
            .map(|s| {
                if s.total_sends == 0 {
                    0.0
                } else {
                    s.total_duplicates as f64 / s.total_sends as f64
                }
            })
            .sum::<f64>()
            / count;
        let _ = writeln!(
            out,
            "{mode}: {} runs, convergence rate {:.3}, mean convergence round {mean_rounds}, \
             mean sends {:.1}, duplicate ratio {:.3}",
            runs.len(),
            converged.len() as f64 / count,
            mean_sends,
            dup_ratio
        );
    }
    out
}

fn cmd_topology(args: TopologyArgs) -> Result<(), CliError> {
    let mode: Mode = args
        .mode
        .parse()
        .map_err(|e: treecast_core::Error| CliError::Config(e.to_string()))?;
    let overlay = match mode {
        Mode::Tree => build_binary_tree(args.n),
        Mode::TreeCluster => build_clustered_tree(args.n, args.group_size.unwrap_or(3)),
        Mode::Gossip => build_contact_graph(
            args.n,
            args.contacts.unwrap_or(4),
            // stream tag 0 matches the engine, so the printed overlay is the
            // one a run with the same seed uses
            &mut Prng::stream(args.seed.unwrap_or(1), 0, 0),
        ),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    if !overlay.is_weakly_connected() {
        eprintln!("warning: contact graph is not weakly connected");
    }
    match &args.out {
        Some(path) => std::fs::write(path, overlay.edge_list_string()).map_err(|e| {
            CliError::Runtime(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{}", overlay.edge_list_string()),
    }
    Ok(())
}
