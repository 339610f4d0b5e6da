//! Geodesic counting inside coalitions.
//!
//! A geodesic between `u` and `v` is a shortest path. Parallel edges make
//! distinct paths, so a node sequence contributes the product of the
//! multiplicities along it.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::graph::{Multigraph, NodeId};

/// All-pairs hop distances and geodesic counts, indexed by position in
/// [`GeodesicProfile::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicProfile {
    pub nodes: Vec<NodeId>,
    dist: Vec<Vec<Option<usize>>>,
    sigma: Vec<Vec<BigUint>>,
}

impl GeodesicProfile {
    /// `None` when the two nodes lie in different components.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.dist[a][b]
    }

    /// Number of geodesics; zero when unreachable, one on the diagonal.
    pub fn sigma(&self, a: usize, b: usize) -> &BigUint {
        &self.sigma[a][b]
    }

    fn position(&self, node: NodeId) -> Option<usize> {
        self.nodes.iter().position(|&n| n == node)
    }

    pub fn distance_between(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let a = self.position(u)?;
        let b = self.position(v)?;
        self.dist[a][b]
    }

    pub fn sigma_between(&self, u: NodeId, v: NodeId) -> BigUint {
        match (self.position(u), self.position(v)) {
            (Some(a), Some(b)) => self.sigma[a][b].clone(),
            _ => BigUint::zero(),
        }
    }
}

/// Geodesic profile of the whole graph.
pub fn geodesic_profile(g: &Multigraph) -> GeodesicProfile {
    let all: Vec<NodeId> = g.nodes().collect();
    geodesics_within(g, &all)
}

/// Geodesic profile of `g|set`, by one breadth-first layering per source.
pub fn geodesics_within(g: &Multigraph, set: &[NodeId]) -> GeodesicProfile {
    let mut nodes = set.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let k = nodes.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (pos, &v) in nodes.iter().enumerate() {
        local[v] = pos;
    }
    let adj: Vec<Vec<(usize, u64)>> = nodes
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&(w, _)| local[w] != usize::MAX)
                .map(|&(w, m)| (local[w], m))
                .collect()
        })
        .collect();

    let mut dist = vec![vec![None; k]; k];
    let mut sigma = vec![vec![BigUint::zero(); k]; k];
    for s in 0..k {
        let d = &mut dist[s];
        let sg = &mut sigma[s];
        d[s] = Some(0);
        sg[s] = BigUint::one();
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = d[u].expect("queued nodes are reached");
            for &(v, m) in &adj[u] {
                match d[v] {
                    None => {
                        d[v] = Some(du + 1);
                        sg[v] = &sg[u] * m;
                        queue.push_back(v);
                    }
                    Some(dv) if dv == du + 1 => {
                        let add = &sg[u] * m;
                        sg[v] += add;
                    }
                    _ => {}
                }
            }
        }
    }
    GeodesicProfile { nodes, dist, sigma }
}

/// Geodesic counts `a_1..a_L` of a coalition, summed over unordered pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathProfile {
    /// `counts[k - 1]` is the number of geodesics of length `k`.
    pub counts: Vec<BigUint>,
}

impl PathProfile {
    /// Largest finite distance inside the coalition, 0 for a singleton.
    pub fn max_distance(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, k: usize) -> BigUint {
        if k == 0 {
            return BigUint::zero();
        }
        self.counts.get(k - 1).cloned().unwrap_or_default()
    }
}

/// Per-node geodesic counts `a^i_k`: geodesics of length `k` that contain
/// node `i` as an endpoint or interior node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePathProfile {
    pub nodes: Vec<NodeId>,
    /// `counts[p][k - 1]` for node `nodes[p]`; every row has length `L`.
    pub counts: Vec<Vec<BigUint>>,
}

impl NodePathProfile {
    pub fn of(&self, node: NodeId) -> Option<&[BigUint]> {
        let p = self.nodes.iter().position(|&n| n == node)?;
        Some(&self.counts[p])
    }

    pub fn max_distance(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }
}

fn pad_to(v: &mut Vec<BigUint>, len: usize) {
    if v.len() < len {
        v.resize(len, BigUint::zero());
    }
}

pub fn coalition_path_counts(g: &Multigraph, set: &[NodeId]) -> Result<PathProfile> {
    g.check_nodes(set)?;
    let geo = geodesics_within(g, set);
    Ok(path_counts_from(&geo))
}

pub(crate) fn path_counts_from(geo: &GeodesicProfile) -> PathProfile {
    let k = geo.nodes.len();
    let mut counts: Vec<BigUint> = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if let Some(d) = geo.distance(a, b) {
                pad_to(&mut counts, d);
                counts[d - 1] += geo.sigma(a, b);
            }
        }
    }
    PathProfile { counts }
}

pub fn node_path_counts(g: &Multigraph, set: &[NodeId]) -> Result<NodePathProfile> {
    g.check_nodes(set)?;
    let geo = geodesics_within(g, set);
    Ok(node_counts_from(&geo))
}

#[allow(clippy::needless_range_loop)]
pub(crate) fn node_counts_from(geo: &GeodesicProfile) -> NodePathProfile {
    let k = geo.nodes.len();
    let max_d = (0..k)
        .flat_map(|a| (0..k).filter_map(move |b| geo.distance(a, b)))
        .max()
        .unwrap_or(0);
    let mut counts = vec![vec![BigUint::zero(); max_d]; k];
    for s in 0..k {
        for t in s + 1..k {
            let Some(d) = geo.distance(s, t) else {
                continue;
            };
            let slot = d - 1;
            let through_ends = geo.sigma(s, t);
            counts[s][slot] += through_ends;
            counts[t][slot] += through_ends;
            for i in 0..k {
                if i == s || i == t {
                    continue;
                }
                if let (Some(a), Some(b)) = (geo.distance(s, i), geo.distance(i, t)) {
                    if a + b == d {
                        counts[i][slot] += geo.sigma(s, i) * geo.sigma(i, t);
                    }
                }
            }
        }
    }
    NodePathProfile {
        nodes: geo.nodes.clone(),
        counts,
    }
}
