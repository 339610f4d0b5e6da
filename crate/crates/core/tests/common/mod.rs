#![allow(dead_code)]

use coopnet_core::graph::{GraphBuilder, Multigraph, NodeId};
use coopnet_core::Partition;
use rand::Rng;

fn name(i: usize) -> String {
    format!("n{i}")
}

/// G(n, p) with multiplicities drawn from `1..=max_mult`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, max_mult: u64) -> Multigraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.node(&name(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                b.edge(&name(i), &name(j), rng.gen_range(1..=max_mult))
                    .unwrap();
            }
        }
    }
    b.build()
}

/// Rejection-samples G(n, p) until connected.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64, max_mult: u64) -> Multigraph {
    loop {
        let g = random_graph(rng, n, p, max_mult);
        if g.connected_components().len() == 1 {
            return g;
        }
    }
}

/// Distance-hereditary multigraph grown by pendant, false-twin and true-twin
/// extensions of a single vertex.
pub fn random_distance_hereditary<R: Rng>(rng: &mut R, n: usize, max_mult: u64) -> Multigraph {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
    for y in 1..n {
        let x = rng.gen_range(0..y);
        let mut nbrs = match rng.gen_range(0..3) {
            0 => vec![x],
            1 if !adj[x].is_empty() => adj[x].clone(),
            _ => {
                let mut v = adj[x].clone();
                v.push(x);
                v
            }
        };
        nbrs.sort_unstable();
        for &z in &nbrs {
            adj[z].push(y);
        }
        adj.push(nbrs);
    }
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.node(&name(i));
    }
    for (u, row) in adj.iter().enumerate() {
        for &v in row {
            if u < v {
                b.edge(&name(u), &name(v), rng.gen_range(1..=max_mult))
                    .unwrap();
            }
        }
    }
    b.build()
}

pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let k = rng.gen_range(1..=n.max(1));
    let mut blocks: Vec<Vec<NodeId>> = vec![Vec::new(); k];
    for i in 0..n {
        blocks[rng.gen_range(0..k)].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    Partition::from_blocks(n, blocks).unwrap()
}

/// All simple paths between `s` and `t` inside `set`, as node sequences.
fn simple_paths(g: &Multigraph, set: &[NodeId], s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    fn walk(
        g: &Multigraph,
        inside: &[bool],
        t: NodeId,
        path: &mut Vec<NodeId>,
        on: &mut [bool],
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for v in g.nodes() {
            if inside[v] && !on[v] && g.adjacent(u, v) {
                on[v] = true;
                path.push(v);
                walk(g, inside, t, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    let mut inside = vec![false; g.node_count()];
    for &i in set {
        inside[i] = true;
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    let mut out = Vec::new();
    walk(g, &inside, t, &mut vec![s], &mut on, &mut out);
    out
}

fn weight(g: &Multigraph, path: &[NodeId]) -> u128 {
    path.windows(2)
        .map(|w| g.multiplicity(w[0], w[1]) as u128)
        .product()
}

type WeightedPaths = Vec<(Vec<NodeId>, u128)>;

/// Shortest simple paths between `s` and `t` in `g|set` with their weights.
pub fn brute_geodesics(
    g: &Multigraph,
    set: &[NodeId],
    s: NodeId,
    t: NodeId,
) -> Option<(usize, WeightedPaths)> {
    let paths = simple_paths(g, set, s, t);
    let d = paths.iter().map(|p| p.len() - 1).min()?;
    Some((
        d,
        paths
            .into_iter()
            .filter(|p| p.len() - 1 == d)
            .map(|p| {
                let w = weight(g, &p);
                (p, w)
            })
            .collect(),
    ))
}

/// `a_k` by enumeration.
pub fn brute_path_counts(g: &Multigraph, set: &[NodeId]) -> Vec<u128> {
    let mut counts: Vec<u128> = Vec::new();
    for (x, &s) in set.iter().enumerate() {
        for &t in &set[x + 1..] {
            if let Some((d, paths)) = brute_geodesics(g, set, s, t) {
                if counts.len() < d {
                    counts.resize(d, 0);
                }
                counts[d - 1] += paths.iter().map(|(_, w)| w).sum::<u128>();
            }
        }
    }
    counts
}

/// `a^i_k` by enumeration, rows in the order of `set`, padded to a common
/// length.
pub fn brute_node_counts(g: &Multigraph, set: &[NodeId]) -> Vec<Vec<u128>> {
    let mut rows = vec![Vec::<u128>::new(); set.len()];
    for (x, &s) in set.iter().enumerate() {
        for &t in &set[x + 1..] {
            if let Some((d, paths)) = brute_geodesics(g, set, s, t) {
                for (path, w) in paths {
                    for (pos, &m) in set.iter().enumerate() {
                        if path.contains(&m) {
                            let row = &mut rows[pos];
                            if row.len() < d {
                                row.resize(d, 0);
                            }
                            row[d - 1] += w;
                        }
                    }
                }
            }
        }
    }
    let len = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut rows {
        r.resize(len, 0);
    }
    rows
}

/// Every subset of the graph's nodes (as sorted id lists) whose induced
/// subgraph is connected.
pub fn connected_subsets(g: &Multigraph) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    (1usize..1 << n)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| g.components_within(s).len() == 1)
        .collect()
}
