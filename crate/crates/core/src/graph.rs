//! Node-labelled undirected multigraphs and the edge-list text format.
//!
//! Labels are mapped to dense indices in first-mention order. Parallel edges
//! are stored as a multiplicity on the unordered pair.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    /// Per node, `(neighbor, multiplicity)` sorted by neighbor.
    adj: Vec<Vec<(NodeId, u64)>>,
    /// Unordered pairs in the orientation and order they were first seen.
    pairs: Vec<(NodeId, NodeId)>,
    edge_total: u64,
}

/// Incremental constructor used by the parser and the dataset generators.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    mult: HashMap<(NodeId, NodeId), u64>,
    pairs: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    /// Adds `weight` parallel edges between `u` and `v`.
    pub fn edge(&mut self, u: &str, v: &str, weight: u64) -> Result<()> {
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop on `{u}`")));
        }
        if weight == 0 {
            return Err(Error::InvalidArgument(
                "edge multiplicity must be positive".into(),
            ));
        }
        let a = self.node(u);
        let b = self.node(v);
        let key = (a.min(b), a.max(b));
        let slot = self.mult.entry(key).or_insert_with(|| {
            self.pairs.push((a, b));
            0
        });
        *slot = slot
            .checked_add(weight)
            .ok_or(Error::Overflow("edge multiplicity"))?;
        Ok(())
    }

    pub fn build(self) -> Multigraph {
        let n = self.labels.len();
        let mut adj = vec![Vec::new(); n];
        let mut edge_total = 0u64;
        for (&(a, b), &w) in &self.mult {
            adj[a].push((b, w));
            adj[b].push((a, w));
            edge_total += w;
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Multigraph {
            labels: self.labels,
            index: self.index,
            adj,
            pairs: self.pairs,
            edge_total,
        }
    }
}

impl Multigraph {
    /// Parses the edge-list format: one `u v` or `u v w` per line, `#` starts
    /// a comment, repeated pairs accumulate.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line, msg };
            let (u, v, w) = match tokens.as_slice() {
                [] => continue,
                [u, v] => (*u, *v, 1u64),
                [u, v, w] => {
                    let w: i128 = w
                        .parse()
                        .map_err(|_| err(format!("multiplicity `{w}` is not an integer")))?;
                    if w <= 0 {
                        return Err(err(format!("multiplicity must be positive, got {w}")));
                    }
                    let w = u64::try_from(w).map_err(|_| err("multiplicity too large".into()))?;
                    (*u, *v, w)
                }
                _ => {
                    return Err(err(format!(
                        "expected `u v` or `u v w`, found {} tokens",
                        tokens.len()
                    )))
                }
            };
            if u == v {
                return Err(err(format!("self-loop on `{u}`")));
            }
            b.edge(u, v, w).map_err(|e| err(e.to_string()))?;
        }
        Ok(b.build())
    }

    /// One line per unordered pair, `w` omitted when 1, in first-mention order.
    /// Isolated nodes have no representation in this format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.pairs {
            let w = self.multiplicity(a, b);
            if w == 1 {
                let _ = writeln!(out, "{} {}", self.labels[a], self.labels[b]);
            } else {
                let _ = writeln!(out, "{} {} {}", self.labels[a], self.labels[b], w);
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Total number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edge_total
    }

    /// Number of adjacent unordered pairs, ignoring multiplicity.
    pub fn simple_edge_count(&self) -> u64 {
        self.pairs.len() as u64
    }

    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Result<NodeId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn node_ids<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<NodeId>> {
        labels.iter().map(|l| self.node_id(l.as_ref())).collect()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.labels.len()
    }

    pub fn neighbors(&self, i: NodeId) -> &[(NodeId, u64)] {
        &self.adj[i]
    }

    pub fn multiplicity(&self, i: NodeId, j: NodeId) -> u64 {
        match self.adj[i].binary_search_by_key(&j, |&(n, _)| n) {
            Ok(pos) => self.adj[i][pos].1,
            Err(_) => 0,
        }
    }

    pub fn adjacent(&self, i: NodeId, j: NodeId) -> bool {
        self.multiplicity(i, j) > 0
    }

    /// Multiplicity-weighted degree.
    pub fn degree(&self, i: NodeId) -> u64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    /// Edges as `(u, v, multiplicity)` in first-mention order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        self.pairs
            .iter()
            .map(move |&(a, b)| (a, b, self.multiplicity(a, b)))
    }

    pub(crate) fn check_nodes(&self, set: &[NodeId]) -> Result<()> {
        match set.iter().find(|&&i| i >= self.node_count()) {
            Some(&bad) => Err(Error::NodeIndex(bad)),
            None => Ok(()),
        }
    }

    /// The subgraph `g|S`: nodes of `set` in index order, and every edge with
    /// both endpoints in `set`.
    pub fn induced_subgraph(&self, set: &[NodeId]) -> Result<Multigraph> {
        self.check_nodes(set)?;
        let mut keep = vec![false; self.node_count()];
        for &i in set {
            keep[i] = true;
        }
        let mut b = GraphBuilder::new();
        for i in self.nodes().filter(|&i| keep[i]) {
            b.node(&self.labels[i]);
        }
        for (u, v, w) in self.edges() {
            if keep[u] && keep[v] {
                b.edge(&self.labels[u], &self.labels[v], w)?;
            }
        }
        Ok(b.build())
    }

    /// Graph with the edge between `i` and `j` removed entirely (all parallel
    /// copies).
    pub fn without_pair(&self, i: NodeId, j: NodeId) -> Multigraph {
        let mut b = GraphBuilder::new();
        for l in &self.labels {
            b.node(l);
        }
        for (u, v, w) in self.edges() {
            if (u, v) != (i, j) && (u, v) != (j, i) {
                b.edge(&self.labels[u], &self.labels[v], w)
                    .expect("edges of a valid graph");
            }
        }
        b.build()
    }

    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let all: Vec<NodeId> = self.nodes().collect();
        self.components_within(&all)
    }

    /// Connected components of `g|set`, each sorted, ordered by least member.
    pub fn components_within(&self, set: &[NodeId]) -> Vec<Vec<NodeId>> {
        let mut inside = vec![false; self.node_count()];
        for &i in set {
            inside[i] = true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for &start in &sorted {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adj[u] {
                    if inside[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
