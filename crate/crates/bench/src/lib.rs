//! Fixtures shared by the benchmarks in `benches/`.

use coopnet_core::graph::NodeId;
use coopnet_core::{datasets, Multigraph, Partition};

/// Subgraph of the karate club induced by members `1..=n`.
pub fn karate_prefix(n: usize) -> Multigraph {
    let g = datasets::karate();
    let set: Vec<NodeId> = (0..n.min(g.node_count())).collect();
    g.induced_subgraph(&set).expect("prefix of the karate club")
}

/// The eight Example 2 partitions built from unions of consecutive cliques.
pub fn example2_candidates() -> Vec<Partition> {
    let g = datasets::example2();
    let groups = datasets::example2_groups();
    let shapes: [&[&[usize]]; 8] = [
        &[&[0, 1, 2, 3]],
        &[&[0], &[1, 2, 3]],
        &[&[0], &[1, 2], &[3]],
        &[&[0], &[1], &[2], &[3]],
        &[&[0, 1], &[2, 3]],
        &[&[0, 1, 2], &[3]],
        &[&[0], &[1], &[2, 3]],
        &[&[0, 1], &[2], &[3]],
    ];
    shapes
        .iter()
        .map(|shape| {
            let blocks = shape
                .iter()
                .map(|b| b.iter().flat_map(|&k| groups[k].iter().copied()).collect())
                .collect();
            Partition::from_blocks(g.node_count(), blocks).expect("clique unions")
        })
        .collect()
}
