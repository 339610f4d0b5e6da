//! Built-in graphs: the six-node multigraph, the four-clique chain and
//! Zachary's karate club.

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, Multigraph, NodeId};

pub const NAMES: [&str; 3] = ["example1", "example2", "karate"];

pub fn load(name: &str) -> Result<Multigraph> {
    match name {
        "example1" => Ok(example1()),
        "example2" => Ok(example2()),
        "karate" => Ok(karate()),
        _ => Err(Error::UnknownDataset {
            name: name.to_string(),
            available: NAMES.join(", "),
        }),
    }
}

const EXAMPLE1: &str = "\
A B
A C
B C 2
A D
D E
D F
E F 2
";

/// Two triangles `{A,B,C}` and `{D,E,F}` joined by `A-D`; `B-C` and `E-F`
/// are double edges. Every node has degree 3 and `m = 9`.
pub fn example1() -> Multigraph {
    Multigraph::parse_edge_list(EXAMPLE1).expect("embedded edge list")
}

pub const EXAMPLE2_CLIQUES: [usize; 4] = [8, 5, 6, 7];

/// Cliques of sizes 8, 5, 6, 7 on labels `1..=26`, chained by 1, 2 and 1
/// bridge edges. Bridges use the lowest free nodes of each clique so that no
/// node carries two bridges.
pub fn example2() -> Multigraph {
    let groups = example2_groups();
    let mut b = GraphBuilder::new();
    for g in &groups {
        for (x, &u) in g.iter().enumerate() {
            for &v in &g[x + 1..] {
                b.edge(&(u + 1).to_string(), &(v + 1).to_string(), 1)
                    .expect("distinct nodes");
            }
        }
    }
    let bridges = [
        (groups[0][0], groups[1][0]),
        (groups[1][1], groups[2][0]),
        (groups[1][2], groups[2][1]),
        (groups[2][2], groups[3][0]),
    ];
    for (u, v) in bridges {
        b.edge(&(u + 1).to_string(), &(v + 1).to_string(), 1)
            .expect("distinct nodes");
    }
    b.build()
}

/// Node ids of the four cliques of [`example2`].
pub fn example2_groups() -> Vec<Vec<NodeId>> {
    let mut start = 0;
    EXAMPLE2_CLIQUES
        .iter()
        .map(|&size| {
            let g: Vec<NodeId> = (start..start + size).collect();
            start += size;
            g
        })
        .collect()
}

const KARATE: &str = "\
1 2
1 3
2 3
1 4
2 4
3 4
1 5
1 6
1 7
5 7
6 7
1 8
2 8
3 8
4 8
1 9
3 9
3 10
1 11
5 11
6 11
1 12
1 13
4 13
1 14
2 14
3 14
4 14
6 17
7 17
1 18
2 18
1 20
2 20
1 22
2 22
24 26
25 26
3 28
24 28
25 28
3 29
24 30
27 30
2 31
9 31
1 32
25 32
26 32
29 32
3 33
9 33
15 33
16 33
19 33
21 33
23 33
24 33
30 33
31 33
32 33
9 34
10 34
14 34
15 34
16 34
19 34
20 34
21 34
23 34
24 34
27 34
28 34
29 34
30 34
31 34
32 34
33 34
";

/// Zachary's karate club, 34 members labelled `1..=34`, 78 edges.
pub fn karate() -> Multigraph {
    let g = Multigraph::parse_edge_list(KARATE).expect("embedded edge list");
    // Relabel into numeric order so node ids follow the member numbers.
    let mut b = GraphBuilder::new();
    for i in 1..=34 {
        b.node(&i.to_string());
    }
    for (u, v, w) in g.edges() {
        b.edge(g.label(u), g.label(v), w).expect("valid edge");
    }
    b.build()
}

/// The instructor's side after node 3 and node 10 join it (17 members).
pub const KARATE_S17: [u32; 17] = [1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 17, 18, 20, 22];

/// Labels of the 15-member block of the two-way split used as a starting
/// point: the 17-member side without nodes 3 and 10.
pub fn karate_s15() -> Vec<String> {
    KARATE_S17
        .iter()
        .filter(|&&x| x != 3 && x != 10)
        .map(u32::to_string)
        .collect()
}

pub fn karate_s16() -> Vec<String> {
    KARATE_S17
        .iter()
        .filter(|&&x| x != 10)
        .map(u32::to_string)
        .collect()
}

pub fn karate_s17() -> Vec<String> {
    KARATE_S17.iter().map(u32::to_string).collect()
}
