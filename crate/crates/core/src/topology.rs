//! Overlay construction: random contact graphs, balanced binary trees, and
//! clustered trees, plus the adjacency queries the rest of the crate runs on.
//!
//! Overlays are immutable once built and safe to share across concurrent
//! runs.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::id::NodeId;
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlayKind {
    /// Directed per-node contact lists (gossip "friends"). A knowing B does
    /// not imply B knows A.
    ContactGraph,
    /// Complete binary tree, undirected edges.
    BinaryTree,
    /// Binary tree of fully-meshed groups with complete bipartite links
    /// between adjacent groups, undirected edges.
    ClusteredTree,
}

impl fmt::Display for OverlayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlayKind::ContactGraph => "contact_graph",
            OverlayKind::BinaryTree => "binary_tree",
            OverlayKind::ClusteredTree => "clustered_tree",
        })
    }
}

/// Per-node tree shape, present on binary-tree overlays.
#[derive(Debug, Clone)]
pub struct TreeMeta {
    pub parent: Vec<Option<NodeId>>,
    pub children: Vec<Vec<NodeId>>,
    /// Depth in edges from the root.
    pub depth: Vec<u32>,
    /// Max depth over all nodes.
    pub height: u32,
}

/// Group structure of a clustered-tree overlay. The groups themselves form a
/// complete binary tree; `height` is that tree's height.
#[derive(Debug, Clone)]
pub struct GroupMeta {
    pub group_size: u32,
    /// Group index of each node: node i belongs to group i / group_size.
    pub group_of: Vec<u32>,
    /// Member list per group, ascending.
    pub members: Vec<Vec<NodeId>>,
    pub parent: Vec<Option<u32>>,
    pub children: Vec<Vec<u32>>,
    pub depth: Vec<u32>,
    pub height: u32,
}

/// Immutable adjacency structure produced by one of the builders.
#[derive(Debug, Clone)]
pub struct Overlay {
    kind: OverlayKind,
    n: u32,
    /// Per-node neighbor lists, ascending. Out-edges for contact graphs,
    /// symmetric adjacency for the tree kinds.
    neighbors: Vec<Vec<NodeId>>,
    tree: Option<TreeMeta>,
    groups: Option<GroupMeta>,
    /// Whether the union of the lists, read undirected, is connected.
    /// Checked at build time; a disconnected contact graph is reported here,
    /// never silently retried. Tree kinds are connected by construction.
    weakly_connected: bool,
}

impl Overlay {
    pub fn kind(&self) -> OverlayKind {
        self.kind
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.neighbors[node.index()]
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weakly_connected
    }

    pub fn tree_meta(&self) -> Option<&TreeMeta> {
        self.tree.as_ref()
    }

    pub fn group_meta(&self) -> Option<&GroupMeta> {
        self.groups.as_ref()
    }

    /// Number of distinct links: directed entries for contact graphs,
    /// undirected edges for the tree kinds.
    pub fn edge_count(&self) -> u64 {
        let total: u64 = self.neighbors.iter().map(|l| l.len() as u64).sum();
        match self.kind {
            OverlayKind::ContactGraph => total,
            _ => total / 2,
        }
    }

    /// Hop counts from `from` to every node, following stored neighbor lists
    /// (out-edges on contact graphs). `None` marks unreachable nodes.
    pub fn bfs_distances(&self, from: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n as usize];
        dist[from.index()] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap();
            for &v in &self.neighbors[u.index()] {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest-path length in hops, or `None` when `v` is unreachable from
    /// `u`.
    pub fn hop_distance(&self, u: NodeId, v: NodeId) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        self.bfs_distances(u)[v.index()]
    }

    /// Max hop distance from `u` to any node; `None` if some node is
    /// unreachable.
    pub fn eccentricity(&self, u: NodeId) -> Option<u32> {
        self.bfs_distances(u)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Edge-list export: header `# kind n [group_size]`, then one `u v` pair
    /// per line. Contact-graph lines are directed (u knows v); tree kinds
    /// list each undirected edge once with u < v.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match &self.groups {
            Some(g) => writeln!(w, "# {} {} {}", self.kind, self.n, g.group_size)?,
            None => writeln!(w, "# {} {}", self.kind, self.n)?,
        }
        for u in 0..self.n {
            for &v in &self.neighbors[u as usize] {
                if self.kind == OverlayKind::ContactGraph || v.0 > u {
                    writeln!(w, "{u} {v}")?;
                }
            }
        }
        Ok(())
    }

    pub fn edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("edge list is ascii")
    }

    /// Builds a contact-graph overlay from explicit lists. Mostly useful for
    /// tests that need a specific shape; checks the same invariants as
    /// [`build_contact_graph`].
    pub fn from_contact_lists(lists: Vec<Vec<NodeId>>) -> Result<Overlay> {
        let n = lists.len() as u32;
        if n == 0 {
            return Err(Error::invalid("contact lists: empty network"));
        }
        for (i, list) in lists.iter().enumerate() {
            let mut seen = vec![false; n as usize];
            for &v in list {
                if v.0 >= n {
                    return Err(Error::invalid(format!(
                        "contact lists: node {i} lists {v} outside [0, {n})"
                    )));
                }
                if v.index() == i {
                    return Err(Error::invalid(format!(
                        "contact lists: node {i} lists itself"
                    )));
                }
                if seen[v.index()] {
                    return Err(Error::invalid(format!(
                        "contact lists: node {i} lists {v} twice"
                    )));
                }
                seen[v.index()] = true;
            }
        }
        let mut lists = lists;
        for list in &mut lists {
            list.sort_unstable();
        }
        let weakly_connected = undirected_connected(&lists);
        Ok(Overlay {
            kind: OverlayKind::ContactGraph,
            n,
            neighbors: lists,
            tree: None,
            groups: None,
            weakly_connected,
        })
    }
}

/// BFS over the union graph read undirected.
fn undirected_connected(lists: &[Vec<NodeId>]) -> bool {
    let n = lists.len();
    if n == 0 {
        return true;
    }
    let mut undirected = vec![Vec::new(); n];
    for (u, list) in lists.iter().enumerate() {
        for &v in list {
            undirected[u].push(v.index());
            undirected[v.index()].push(u);
        }
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &undirected[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// Gives every node a uniform sample of `contacts` distinct other nodes as
/// its directed contact list. Consumes exactly `n * contacts` draws from
/// `prng`, in node-index order.
pub fn build_contact_graph(n: u32, contacts: u32, prng: &mut Prng) -> Result<Overlay> {
    if n == 0 {
        return Err(Error::invalid("n: node count must be positive"));
    }
    if contacts == 0 {
        return Err(Error::invalid("contacts: must be positive"));
    }
    if contacts >= n {
        return Err(Error::invalid(format!(
            "contacts: {contacts} must be at most n - 1 = {}",
            n - 1
        )));
    }
    // sample from [0, n-1) and skip over self
    let mut scratch: Vec<u32> = (0..n - 1).collect();
    let mut sample = Vec::with_capacity(contacts as usize);
    let mut neighbors = Vec::with_capacity(n as usize);
    for i in 0..n {
        prng.choose_distinct_into(&mut scratch, contacts, &mut sample);
        let mut list: Vec<NodeId> = sample
            .iter()
            .map(|&v| NodeId(if v < i { v } else { v + 1 }))
            .collect();
        list.sort_unstable();
        neighbors.push(list);
    }
    let weakly_connected = undirected_connected(&neighbors);
    Ok(Overlay {
        kind: OverlayKind::ContactGraph,
        n,
        neighbors,
        tree: None,
        groups: None,
        weakly_connected,
    })
}

/// Shape of the complete binary tree on `count` positions: parent of i is
/// (i - 1) / 2. Returns (parent, children, depth, height).
#[allow(clippy::type_complexity)]
fn heap_shape(count: u32) -> (Vec<Option<u32>>, Vec<Vec<u32>>, Vec<u32>, u32) {
    let mut parent = vec![None; count as usize];
    let mut children = vec![Vec::new(); count as usize];
    let mut depth = vec![0u32; count as usize];
    let mut height = 0;
    for i in 1..count {
        let p = (i - 1) / 2;
        parent[i as usize] = Some(p);
        children[p as usize].push(i);
        depth[i as usize] = depth[p as usize] + 1;
        height = height.max(depth[i as usize]);
    }
    (parent, children, depth, height)
}

/// Nodes join in index order as leaves of a complete binary tree, level by
/// level: node 0 is the root, parent(i) = (i - 1) / 2. This keeps the tree
/// as balanced as a binary tree can be, and makes construction a pure
/// function of `n`.
pub fn build_binary_tree(n: u32) -> Result<Overlay> {
    if n == 0 {
        return Err(Error::invalid("n: node count must be positive"));
    }
    let (parent, children, depth, height) = heap_shape(n);
    let mut neighbors = vec![Vec::new(); n as usize];
    for i in 1..n as usize {
        let p = parent[i].unwrap() as usize;
        neighbors[i].push(NodeId(p as u32));
        neighbors[p].push(NodeId(i as u32));
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    let tree = TreeMeta {
        parent: parent.into_iter().map(|p| p.map(NodeId)).collect(),
        children: children
            .into_iter()
            .map(|c| c.into_iter().map(NodeId).collect())
            .collect(),
        depth,
        height,
    };
    Ok(Overlay {
        kind: OverlayKind::BinaryTree,
        n,
        neighbors,
        tree: Some(tree),
        groups: None,
        weakly_connected: true,
    })
}

/// Arranges `n / group_size` groups of `group_size` nodes as a complete
/// binary tree of groups. Each group is a full mesh, and every node is also
/// adjacent to every member of the parent group and of each child group,
/// which is what gives the overlay multiple routes around any single failed
/// node.
pub fn build_clustered_tree(n: u32, group_size: u32) -> Result<Overlay> {
    if n == 0 {
        return Err(Error::invalid("n: node count must be positive"));
    }
    if group_size == 0 {
        return Err(Error::invalid("group_size: must be at least 1"));
    }
    if !n.is_multiple_of(group_size) {
        return Err(Error::invalid(format!(
            "n: {n} is not a multiple of group_size {group_size}"
        )));
    }
    let group_count = n / group_size;
    let (g_parent, g_children, g_depth, g_height) = heap_shape(group_count);

    let members: Vec<Vec<NodeId>> = (0..group_count)
        .map(|g| {
            (g * group_size..(g + 1) * group_size)
                .map(NodeId)
                .collect()
        })
        .collect();

    let mut neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); n as usize];
    for g in 0..group_count as usize {
        for &u in &members[g] {
            // group buddies: full mesh
            for &v in &members[g] {
                if v != u {
                    neighbors[u.index()].push(v);
                }
            }
            // complete bipartite links to the parent group
            if let Some(p) = g_parent[g] {
                neighbors[u.index()].extend(&members[p as usize]);
            }
            // and to each child group
            for &c in &g_children[g] {
                neighbors[u.index()].extend(&members[c as usize]);
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }

    let groups = GroupMeta {
        group_size,
        group_of: (0..n).map(|i| i / group_size).collect(),
        members,
        parent: g_parent,
        children: g_children,
        depth: g_depth,
        height: g_height,
    };
    Ok(Overlay {
        kind: OverlayKind::ClusteredTree,
        n,
        neighbors,
        tree: None,
        groups: Some(groups),
        weakly_connected: true,
    })
}
