//! Graph model, group labels and the structural statistics used to
//! parameterize experiments.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// Binary group membership. `A` orders before `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::A, Group::B];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Group::A => 0,
            Group::B => 1,
        }
    }

    #[inline]
    pub fn other(self) -> Group {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
        })
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(Group::A),
            "B" => Ok(Group::B),
            other => Err(format!("unknown group token `{other}` (expected A or B)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("network must contain at least one node")]
    Empty,
    #[error("group labels cover {labels} nodes but the network has {nodes}")]
    GroupCountMismatch { labels: usize, nodes: usize },
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(NodeId, NodeId, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) has non-positive or non-finite weight {2}")]
    BadWeight(NodeId, NodeId, f64),
}

/// Undirected simple graph on dense node ids `0..N` with a group label per
/// node and optional symmetric edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    adjacency: Vec<Vec<NodeId>>,
    groups: Vec<Group>,
    // parallel to `adjacency` when present
    weights: Option<Vec<Vec<f64>>>,
}

impl Network {
    pub fn from_edges(
        groups: Vec<Group>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, NetworkError> {
        Self::build(groups, edges.into_iter().map(|(u, v)| (u, v, None)), false)
    }

    pub fn from_weighted_edges(
        groups: Vec<Group>,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self, NetworkError> {
        Self::build(groups, edges.into_iter().map(|(u, v, w)| (u, v, Some(w))), true)
    }

    fn build(
        groups: Vec<Group>,
        edges: impl Iterator<Item = (NodeId, NodeId, Option<f64>)>,
        weighted: bool,
    ) -> Result<Self, NetworkError> {
        let n = groups.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut weights = weighted.then(|| vec![Vec::new(); n]);
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(NetworkError::NodeOutOfRange(u, v, n));
            }
            if u == v {
                return Err(NetworkError::SelfLoop(u));
            }
            if adjacency[u].contains(&v) {
                return Err(NetworkError::DuplicateEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            if let Some(ws) = weights.as_mut() {
                let w = w.unwrap_or(1.0);
                if !(w.is_finite() && w > 0.0) {
                    return Err(NetworkError::BadWeight(u, v, w));
                }
                ws[u].push(w);
                ws[v].push(w);
            }
        }
        Ok(Network { adjacency, groups, weights })
    }

    /// Assembles a network from parts already known to satisfy the
    /// invariants (used by the generators).
    pub(crate) fn from_parts_unchecked(
        adjacency: Vec<Vec<NodeId>>,
        groups: Vec<Group>,
        weights: Option<Vec<Vec<f64>>>,
    ) -> Self {
        debug_assert_eq!(adjacency.len(), groups.len());
        Network { adjacency, groups, weights }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    /// Weights parallel to [`Network::neighbors`], when the network is weighted.
    pub fn neighbor_weights(&self, node: NodeId) -> Option<&[f64]> {
        self.weights.as_ref().map(|w| w[node].as_slice())
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    pub fn group(&self, node: NodeId) -> Group {
        self.groups[node]
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adjacency[a].contains(&b)
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let pos = self.adjacency[u].iter().position(|&x| x == v)?;
        self.weights.as_ref().map(|w| w[u][pos])
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in node order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn group_count(&self, group: Group) -> usize {
        self.groups.iter().filter(|&&g| g == group).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn set_groups(&mut self, groups: Vec<Group>) {
        assert_eq!(groups.len(), self.node_count(), "one label per node");
        self.groups = groups;
    }

    pub(crate) fn groups_mut(&mut self) -> &mut [Group] {
        &mut self.groups
    }

    pub(crate) fn adjacency_mut(&mut self) -> (&mut Vec<Vec<NodeId>>, Option<&mut Vec<Vec<f64>>>) {
        (&mut self.adjacency, self.weights.as_mut())
    }

    /// Ordered edge-endpoint counts: entry `[x][y]` is the number of ordered
    /// pairs `(i, j)` joined by an edge with `group(i) = x`, `group(j) = y`.
    /// Each undirected edge contributes one pair per direction.
    pub fn cross_pair_counts(&self) -> [[u64; 2]; 2] {
        let mut counts = [[0u64; 2]; 2];
        for (i, nb) in self.adjacency.iter().enumerate() {
            let gi = self.groups[i].index();
            for &j in nb {
                counts[gi][self.groups[j].index()] += 1;
            }
        }
        counts
    }

    /// Connected components as sorted node lists, in order of their smallest
    /// member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Induced subgraph on `nodes` (must be sorted and distinct), ids
    /// re-densified in the given order.
    pub fn induced(&self, nodes: &[NodeId]) -> Network {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            remap[old] = new;
        }
        let mut adjacency = Vec::with_capacity(nodes.len());
        let mut weights = self.weights.as_ref().map(|_| Vec::with_capacity(nodes.len()));
        for &old in nodes {
            let mut nb = Vec::new();
            let mut ws = Vec::new();
            for (pos, &v) in self.adjacency[old].iter().enumerate() {
                if remap[v] != usize::MAX {
                    nb.push(remap[v]);
                    if let Some(w) = &self.weights {
                        ws.push(w[old][pos]);
                    }
                }
            }
            adjacency.push(nb);
            if let Some(w) = weights.as_mut() {
                w.push(ws);
            }
        }
        let groups = nodes.iter().map(|&i| self.groups[i]).collect();
        Network { adjacency, groups, weights }
    }
}

/// A 2×2 row-stochastic matrix of link-type proportions. A row is `None`
/// when its source group contributed no links (undefined, never coerced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecruitmentMatrix {
    /// `rows[x] = Some([s_xA, s_xB])`
    pub rows: [Option<[f64; 2]>; 2],
}

impl RecruitmentMatrix {
    /// Row-normalizes a table of counts; zero rows become undefined.
    pub fn from_counts(counts: [[f64; 2]; 2]) -> Self {
        let row = |c: [f64; 2]| {
            let total = c[0] + c[1];
            (total > 0.0).then(|| [c[0] / total, c[1] / total])
        };
        RecruitmentMatrix { rows: [row(counts[0]), row(counts[1])] }
    }

    #[inline]
    pub fn get(&self, from: Group, to: Group) -> Option<f64> {
        self.rows[from.index()].map(|r| r[to.index()])
    }

    pub fn s_ab(&self) -> Option<f64> {
        self.get(Group::A, Group::B)
    }

    pub fn s_ba(&self) -> Option<f64> {
        self.get(Group::B, Group::A)
    }
}

/// Population-level structure of a labeled network.
///
/// Group-conditional statistics are `None` when the group they condition on
/// is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub p_a: f64,
    pub s_star: RecruitmentMatrix,
    pub mean_degree_a: Option<f64>,
    pub mean_degree_b: Option<f64>,
    pub mean_degree: f64,
    pub homophily: Option<f64>,
    pub activity_ratio: Option<f64>,
}

impl NetworkStats {
    /// Degree volume of group `A` (sum of degrees of A nodes).
    pub fn volume_a(&self) -> Option<f64> {
        self.mean_degree_a.map(|d| d * self.n_a as f64)
    }
}

pub fn compute_stats(net: &Network) -> NetworkStats {
    let n = net.node_count();
    let counts = net.cross_pair_counts();
    let mut sizes = [0usize; 2];
    for &g in net.groups() {
        sizes[g.index()] += 1;
    }
    let volume = [(counts[0][0] + counts[0][1]) as f64, (counts[1][0] + counts[1][1]) as f64];
    let mean_degree_of = |x: usize| (sizes[x] > 0).then(|| volume[x] / sizes[x] as f64);
    let s_star = RecruitmentMatrix::from_counts([
        [counts[0][0] as f64, counts[0][1] as f64],
        [counts[1][0] as f64, counts[1][1] as f64],
    ]);
    let p_a = sizes[0] as f64 / n as f64;
    let p_b = sizes[1] as f64 / n as f64;
    let both = sizes[0] > 0 && sizes[1] > 0;
    let homophily = if both { s_star.s_ab().map(|s| 1.0 - s / p_b) } else { None };
    let mean_degree_a = mean_degree_of(0);
    let mean_degree_b = mean_degree_of(1);
    let activity_ratio = match (mean_degree_a, mean_degree_b) {
        (Some(a), Some(b)) if both && b > 0.0 => Some(a / b),
        _ => None,
    };
    NetworkStats {
        node_count: n,
        edge_count: ((volume[0] + volume[1]) / 2.0) as usize,
        n_a: sizes[0],
        n_b: sizes[1],
        p_a,
        s_star,
        mean_degree_a,
        mean_degree_b,
        mean_degree: (volume[0] + volume[1]) / n as f64,
        homophily,
        activity_ratio,
    }
}

/// Largest connected component, ties broken toward the component holding
/// the smallest original node id.
pub fn giant_component(net: &Network) -> Network {
    let comps = net.components();
    let mut best = 0;
    for (idx, c) in comps.iter().enumerate() {
        if c.len() > comps[best].len() {
            best = idx;
        }
    }
    net.induced(&comps[best])
}
