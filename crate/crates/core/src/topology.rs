//! Gossip-network topologies and their auxiliary percolation graphs.
//!
//! Network nodes are labeled `1..=n`; label [`SOURCE`] (0) is reserved for the
//! source. A node `i` pushes its packet to each neighbor `j` as a Poisson process
//! of rate `lambda / deg(i)`, and the source pushes to every node at rate
//! `lambda / n`.
//!
//! The auxiliary graph reverses every channel and turns it into an exponential
//! edge weight with the channel's rate, plus one arc `(i, SOURCE)` per node.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Label of the source node `n0`.
pub const SOURCE: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Complete,
    Ring,
    Grid,
    Custom,
}

impl Family {
    /// Families whose automorphism group acts transitively on nodes.
    pub fn is_vertex_transitive(self) -> bool {
        !matches!(self, Family::Custom)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Ring => "ring",
            Family::Grid => "grid",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Family::Complete),
            "ring" => Ok(Family::Ring),
            "grid" => Ok(Family::Grid),
            "custom" => Ok(Family::Custom),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Undirected gossip topology together with its Poisson rate parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GossipNetwork {
    family: Family,
    lambda: f64,
    lambda_e: f64,
    // Index 0 (the source) is always empty; neighbor lists are sorted.
    adjacency: Vec<Vec<NodeId>>,
}

impl GossipNetwork {
    pub fn complete(n: usize, lambda: f64, lambda_e: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("complete graph needs n >= 2, got {n}")));
        }
        let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
        Self::build(Family::Complete, n, lambda, lambda_e, edges)
    }

    pub fn ring(n: usize, lambda: f64, lambda_e: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
        }
        let edges = (1..=n).map(|i| (i, i % n + 1));
        Self::build(Family::Ring, n, lambda, lambda_e, edges)
    }

    /// Torus grid of `side * side` nodes. Parallel edges from the wrap-around
    /// collapse when `side == 2`.
    pub fn grid(side: usize, lambda: f64, lambda_e: f64) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidSize(format!("grid needs side >= 2, got {side}")));
        }
        let label = |r: usize, c: usize| r * side + c + 1;
        let mut edges = BTreeSet::new();
        for r in 0..side {
            for c in 0..side {
                let here = label(r, c);
                for there in [label(r, (c + 1) % side), label((r + 1) % side, c)] {
                    edges.insert((here.min(there), here.max(there)));
                }
            }
        }
        Self::build(Family::Grid, side * side, lambda, lambda_e, edges)
    }

    /// Arbitrary connected topology. Duplicate pairs and self-loops are rejected.
    ///
    /// A single node with no edges is accepted as the degenerate network in
    /// which every packet comes straight from the source.
    pub fn from_edges<I>(n: usize, lambda: f64, lambda_e: f64, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (a, b) in edges {
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("parallel edge {{{a}, {b}}}")));
            }
            list.push(key);
        }
        Self::build(Family::Custom, n, lambda, lambda_e, list)
    }

    fn build<I>(family: Family, n: usize, lambda: f64, lambda_e: f64, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n == 0 {
            return Err(Error::InvalidSize("network needs at least one node".into()));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(lambda_e.is_finite() && lambda_e >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda_e must be non-negative, got {lambda_e}")));
        }
        let mut adjacency = vec![Vec::new(); n + 1];
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            for v in [a, b] {
                if v == SOURCE || v > n {
                    return Err(Error::InvalidGraph(format!("node {v} outside 1..={n}")));
                }
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::InvalidGraph("parallel edges".into()));
            }
        }
        let net = Self { family, lambda, lambda_e, adjacency };
        net.check_connected()?;
        Ok(net)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.n();
        if n == 1 {
            return Ok(());
        }
        if let Some(i) = self.nodes().find(|&i| self.degree(i) == 0) {
            return Err(Error::InvalidGraph(format!("node {i} is isolated")));
        }
        let mut seen = vec![false; n + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached != n {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected ({reached} of {n} nodes reachable from node 1)"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        1..=self.n()
    }

    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.adjacency[i].len()
    }

    /// Undirected edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |i| self.adjacency[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Rate at which the source pushes to any single node.
    pub fn source_rate(&self) -> f64 {
        self.lambda / self.n() as f64
    }

    /// Rate of the directed channel from `i` to each of its neighbors.
    pub fn forward_rate(&self, i: NodeId) -> f64 {
        self.lambda / self.degree(i) as f64
    }

    pub fn is_vertex_transitive(&self) -> bool {
        self.family.is_vertex_transitive()
    }

    /// Re-tag the network with a known family after loading it from an edge list.
    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    /// Writes the edge-list format: a `n lambda lambda_e` header, then one `i j` per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.n(), self.lambda, self.lambda_e)?;
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, f64, f64)> = None;
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line: lineno, message };
            match header {
                None => {
                    let [n, lambda, lambda_e] = fields[..] else {
                        return Err(parse_err(format!("expected header `n lambda lambda_e`, found `{content}`")));
                    };
                    header = Some((
                        n.parse().map_err(|e| parse_err(format!("bad node count: {e}")))?,
                        lambda.parse().map_err(|e| parse_err(format!("bad lambda: {e}")))?,
                        lambda_e.parse().map_err(|e| parse_err(format!("bad lambda_e: {e}")))?,
                    ));
                }
                Some(_) => {
                    let [a, b] = fields[..] else {
                        return Err(parse_err(format!("expected `i j`, found `{content}`")));
                    };
                    edges.push((
                        a.parse().map_err(|e| parse_err(format!("bad node label: {e}")))?,
                        b.parse().map_err(|e| parse_err(format!("bad node label: {e}")))?,
                    ));
                }
            }
        }
        let (n, lambda, lambda_e) =
            header.ok_or_else(|| Error::Parse { line: 0, message: "empty edge list".into() })?;
        Self::from_edges(n, lambda, lambda_e, edges)
    }
}

/// One arc of the auxiliary graph, carrying the rate of its exponential weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub rate: f64,
}

/// The reversed, exponentially weighted version of a [`GossipNetwork`].
///
/// Arc ids are stable: internal arcs come first, ordered by `(tail, head)`,
/// followed by the source arcs `(i, SOURCE)` for `i = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryGraph {
    n: usize,
    family: Family,
    arcs: Vec<Arc>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl AuxiliaryGraph {
    pub fn new(net: &GossipNetwork) -> Self {
        let n = net.n();
        let mut arcs = Vec::with_capacity(2 * net.edge_count() + n);
        for i in net.nodes() {
            for &j in net.neighbors(i) {
                // reverse of channel j -> i
                arcs.push(Arc { tail: i, head: j, rate: net.forward_rate(j) });
            }
        }
        for i in net.nodes() {
            arcs.push(Arc { tail: i, head: SOURCE, rate: net.source_rate() });
        }
        let mut outgoing = vec![Vec::new(); n + 1];
        let mut incoming = vec![Vec::new(); n + 1];
        for (id, arc) in arcs.iter().enumerate() {
            outgoing[arc.tail].push(id);
            incoming[arc.head].push(id);
        }
        Self { n, family: net.family(), arcs, outgoing, incoming }
    }

    /// Number of network nodes, excluding the source.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Node count including the source.
    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_vertex_transitive(&self) -> bool {
        self.family.is_vertex_transitive()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn outgoing(&self, v: NodeId) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn incoming(&self, v: NodeId) -> &[usize] {
        &self.incoming[v]
    }

    pub fn arc_id(&self, tail: NodeId, head: NodeId) -> Option<usize> {
        self.outgoing.get(tail)?.iter().copied().find(|&id| self.arcs[id].head == head)
    }

    pub fn internal_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| a.head != SOURCE)
    }

    pub fn source_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| a.head == SOURCE)
    }

    /// Undo the reversal: each internal arc `(i, j)` becomes the directed
    /// channel `(j, i)` with the same rate. Source arcs are dropped.
    pub fn reversed_channels(&self) -> Vec<(NodeId, NodeId, f64)> {
        let mut channels: Vec<_> = self.internal_arcs().map(|a| (a.head, a.tail, a.rate)).collect();
        channels.sort_by_key(|x| (x.0, x.1));
        channels
    }
}

pub fn build_complete(n: usize, lambda: f64, lambda_e: f64) -> Result<GossipNetwork> {
    GossipNetwork::complete(n, lambda, lambda_e)
}

pub fn build_ring(n: usize, lambda: f64, lambda_e: f64) -> Result<GossipNetwork> {
    GossipNetwork::ring(n, lambda, lambda_e)
}

pub fn build_grid(side: usize, lambda: f64, lambda_e: f64) -> Result<GossipNetwork> {
    GossipNetwork::grid(side, lambda, lambda_e)
}

pub fn build_auxiliary(net: &GossipNetwork) -> AuxiliaryGraph {
    AuxiliaryGraph::new(net)
}
