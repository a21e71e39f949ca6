//! Independent oracles for the integration and acceptance suites.
//!
//! Everything here recomputes expected values from first principles — raw
//! BFS over explicit edge lists, parent-index formulas — so the checks stay
//! independent of the library code paths they verify.

#![allow(dead_code)] // each test target compiles its own copy

use std::collections::VecDeque;

use treecast_core::{NodeId, Overlay, OverlayKind};

/// Undirected edges of an overlay, read straight off the neighbor lists.
/// For contact graphs this is the union digraph collapsed to undirected.
pub fn overlay_edges(overlay: &Overlay) -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for u in 0..overlay.len() {
        for &v in overlay.neighbors(NodeId(u)) {
            if overlay.kind() == OverlayKind::ContactGraph || v.0 > u {
                edges.push((u.min(v.0), u.max(v.0)));
            }
        }
    }
    // collapse mutual contact-list entries to one undirected edge
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Undirected adjacency lists from an explicit edge list.
pub fn adjacency(n: u32, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n as usize];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    adj
}

/// BFS hop counts over prebuilt adjacency lists, never entering blocked
/// nodes. `None` marks unreachable (or blocked) nodes.
pub fn bfs_adjacency(adj: &[Vec<u32>], from: u32, blocked: &[u32]) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    if blocked.contains(&from) {
        return dist;
    }
    dist[from as usize] = Some(0u32);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize].unwrap();
        for &v in &adj[u as usize] {
            if dist[v as usize].is_none() && !blocked.contains(&v) {
                dist[v as usize] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// BFS hop counts over an explicit undirected edge list, never entering
/// blocked nodes. `None` marks unreachable (or blocked) nodes.
pub fn bfs_over_edges(
    n: u32,
    edges: &[(u32, u32)],
    from: u32,
    blocked: &[u32],
) -> Vec<Option<u32>> {
    bfs_adjacency(&adjacency(n, edges), from, blocked)
}

/// Max BFS distance from `from` to any non-blocked node; `None` when some
/// non-blocked node is unreachable.
pub fn eccentricity_over_edges(
    n: u32,
    edges: &[(u32, u32)],
    from: u32,
    blocked: &[u32],
) -> Option<u32> {
    let dist = bfs_over_edges(n, edges, from, blocked);
    let mut ecc = 0;
    for v in 0..n {
        if blocked.contains(&v) {
            continue;
        }
        ecc = ecc.max(dist[v as usize]?);
    }
    Some(ecc)
}

/// Edges of the complete binary tree on `n` nodes, from the parent formula
/// alone.
pub fn heap_tree_edges(n: u32) -> Vec<(u32, u32)> {
    (1..n).map(|i| ((i - 1) / 2, i)).collect()
}

/// Height of the complete binary tree on `n` nodes: depth of the last node.
pub fn heap_tree_height(n: u32) -> u32 {
    assert!(n >= 1);
    let mut depth = 0;
    let mut i = n - 1;
    while i > 0 {
        i = (i - 1) / 2;
        depth += 1;
    }
    depth
}

/// Members of the subtree rooted at `r` in the complete binary tree on `n`
/// nodes, by walking the children formula.
pub fn heap_subtree(n: u32, r: u32) -> Vec<u32> {
    let mut members = Vec::new();
    let mut stack = vec![r];
    while let Some(u) = stack.pop() {
        members.push(u);
        for c in [2 * u + 1, 2 * u + 2] {
            if c < n {
                stack.push(c);
            }
        }
    }
    members.sort_unstable();
    members
}
