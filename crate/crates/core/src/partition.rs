//! Partitions of the node set, single-player moves, and the generic
//! better-response loop shared by the Myerson and hedonic engines.

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, NodeId};
use crate::rational::{self, Rational};

/// Disjoint nonempty blocks covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<NodeId>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Validates that `blocks` is a disjoint cover of `0..n` with no empty
    /// block. Members are sorted; block order is kept.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        let mut out = Vec::with_capacity(blocks.len());
        for (b, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &i in &block {
                if i >= n {
                    return Err(Error::NodeIndex(i));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "node {i} appears in more than one block"
                    )));
                }
                block_of[i] = b;
            }
            out.push(block);
        }
        if let Some(missing) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "node {missing} is not covered"
            )));
        }
        Ok(Self {
            blocks: out,
            block_of,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|i| vec![i]).collect(),
            block_of: (0..n).collect(),
        }
    }

    /// The grand coalition (no blocks at all when `n == 0`).
    pub fn grand(n: usize) -> Self {
        if n == 0 {
            return Self {
                blocks: Vec::new(),
                block_of: Vec::new(),
            };
        }
        Self {
            blocks: vec![(0..n).collect()],
            block_of: vec![0; n],
        }
    }

    /// Builds a partition from label blocks; every node of `g` must be covered.
    pub fn from_labels<S: AsRef<str>>(g: &Multigraph, blocks: &[Vec<S>]) -> Result<Self> {
        let ids = blocks
            .iter()
            .map(|b| g.node_ids(b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(g.node_count(), ids)
    }

    /// `block` plus every remaining node as a second block.
    pub fn split_off<S: AsRef<str>>(g: &Multigraph, block: &[S]) -> Result<Self> {
        let first = g.node_ids(block)?;
        let mut inside = vec![false; g.node_count()];
        for &i in &first {
            inside[i] = true;
        }
        let rest: Vec<NodeId> = g.nodes().filter(|&i| !inside[i]).collect();
        let mut blocks = vec![first];
        if !rest.is_empty() {
            blocks.push(rest);
        }
        Self::from_blocks(g.node_count(), blocks)
    }

    pub fn node_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<NodeId>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[NodeId] {
        &self.blocks[b]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block holding `i`.
    pub fn block_of(&self, i: NodeId) -> usize {
        self.block_of[i]
    }

    /// The members of the coalition `i` would belong to after `mv`, `i`
    /// included.
    pub fn target_with(&self, mv: &Move) -> Vec<NodeId> {
        let mut members = match mv.target {
            Target::Block(b) => self.blocks[b].clone(),
            Target::Fresh => Vec::new(),
        };
        members.push(mv.node);
        members.sort_unstable();
        members
    }

    pub fn apply_move(&self, mv: &Move) -> Result<Partition> {
        let mut next = self.clone();
        next.apply_in_place(mv)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, mv: &Move) -> Result<()> {
        let n = self.node_count();
        if mv.node >= n {
            return Err(Error::NodeIndex(mv.node));
        }
        if mv.source >= self.blocks.len() || self.block_of[mv.node] != mv.source {
            return Err(Error::InvalidMove(format!(
                "node {} is not in block {}",
                mv.node, mv.source
            )));
        }
        match mv.target {
            Target::Block(t) if t == mv.source => {
                return Err(Error::InvalidMove("target equals source".into()))
            }
            Target::Block(t) if t >= self.blocks.len() => {
                return Err(Error::InvalidMove(format!("no block {t}")))
            }
            Target::Fresh if self.blocks[mv.source].len() == 1 => {
                return Err(Error::InvalidMove(
                    "a singleton cannot move to a fresh block".into(),
                ))
            }
            _ => {}
        }
        let src = &mut self.blocks[mv.source];
        src.retain(|&x| x != mv.node);
        let emptied = src.is_empty();
        let mut target = match mv.target {
            Target::Block(t) => {
                let blk = &mut self.blocks[t];
                let pos = blk.binary_search(&mv.node).unwrap_err();
                blk.insert(pos, mv.node);
                t
            }
            Target::Fresh => {
                self.blocks.push(vec![mv.node]);
                self.blocks.len() - 1
            }
        };
        if emptied {
            self.blocks.remove(mv.source);
            if target > mv.source {
                target -= 1;
            }
            for b in self.block_of.iter_mut() {
                if *b > mv.source {
                    *b -= 1;
                }
            }
        }
        self.block_of[mv.node] = target;
        debug_assert!(self.is_valid());
        Ok(())
    }

    /// Disjoint-cover check, used after every dynamics step in debug builds.
    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.node_count()];
        for (b, block) in self.blocks.iter().enumerate() {
            if block.is_empty() {
                return false;
            }
            for &i in block {
                if i >= seen.len() || seen[i] || self.block_of[i] != b {
                    return false;
                }
                seen[i] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Every single-player deviation of `i`: other blocks in index order, then
    /// a fresh block unless `i` is already alone.
    pub fn enumerate_deviations(&self, i: NodeId) -> Vec<Move> {
        let source = self.block_of[i];
        let mut out: Vec<Move> = (0..self.blocks.len())
            .filter(|&b| b != source)
            .map(|b| Move {
                node: i,
                source,
                target: Target::Block(b),
            })
            .collect();
        if self.blocks[source].len() > 1 {
            out.push(Move {
                node: i,
                source,
                target: Target::Fresh,
            });
        }
        out
    }

    /// Blocks sorted by least member with sorted members.
    pub fn canonical_blocks(&self) -> Vec<Vec<NodeId>> {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable_by_key(|b| b[0]);
        blocks
    }

    pub fn canonical(&self) -> Partition {
        Partition::from_blocks(self.node_count(), self.canonical_blocks())
            .expect("reordering keeps a valid partition")
    }

    /// Byte encoding of the canonical blocks: node indices separated by `,`,
    /// blocks by `|`. Equal partitions give equal strings and vice versa.
    pub fn canonical_form(&self) -> Vec<u8> {
        self.canonical_blocks()
            .iter()
            .map(|b| b.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("|")
            .into_bytes()
    }

    /// Canonical label blocks.
    pub fn label_blocks(&self, g: &Multigraph) -> Vec<Vec<String>> {
        self.canonical_blocks()
            .iter()
            .map(|b| b.iter().map(|&i| g.label(i).to_string()).collect())
            .collect()
    }

    pub fn to_file(&self, g: &Multigraph) -> PartitionFile {
        PartitionFile {
            blocks: self.label_blocks(g),
        }
    }

    /// Human-readable form, e.g. `{A,B,C} {D,E,F}`.
    pub fn display<'a>(&'a self, g: &'a Multigraph) -> impl fmt::Display + 'a {
        DisplayPartition { p: self, g }
    }
}

struct DisplayPartition<'a> {
    p: &'a Partition,
    g: &'a Multigraph,
}

impl fmt::Display for DisplayPartition<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.p.label_blocks(self.g);
        for (x, b) in blocks.iter().enumerate() {
            if x > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{{{}}}", b.join(","))?;
        }
        Ok(())
    }
}

/// JSON shape `{"blocks": [["A","B"],["C"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub blocks: Vec<Vec<String>>,
}

impl PartitionFile {
    pub fn to_partition(&self, g: &Multigraph) -> Result<Partition> {
        Partition::from_labels(g, &self.blocks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Block(usize),
    /// A new, previously empty coalition.
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub node: NodeId,
    pub source: usize,
    pub target: Target,
}

/// Payoff model plugged into [`run_dynamics`].
pub trait DeviationGain {
    /// Change in the mover's payoff; the move is taken only when positive.
    fn gain(&self, p: &Partition, mv: &Move) -> Result<Rational>;

    /// Quantity recorded in the trace after an accepted move.
    fn objective(&self, p: &Partition, mover: NodeId) -> Result<Rational>;

    /// True when gains are exact differences of a potential over partitions.
    /// Such runs cannot cycle and skip both the step cap and cycle detection.
    fn has_potential(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Nodes in index order, first improving deviation taken.
    RoundRobin,
    /// Nodes and deviations shuffled each round from a fixed seed.
    SeededRandom,
    /// The single best deviation over all nodes at every step.
    GreedyBest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub policy: Policy,
    pub seed: u64,
    pub max_steps: u64,
}

impl Schedule {
    pub fn round_robin(max_steps: u64) -> Self {
        Self {
            policy: Policy::RoundRobin,
            seed: 0,
            max_steps,
        }
    }

    /// Round robin with the default cap of `1000 * n` accepted moves.
    pub fn default_for(n: usize) -> Self {
        Self::round_robin(1000 * n.max(1) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Stable,
    CapReached,
    CycleDetected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub mv: Move,
    pub gain: Rational,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub status: Status,
}

/// One accepted move as written to JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepFile {
    pub node: String,
    pub from: usize,
    /// Block index, or `"fresh"`.
    pub to: String,
    pub gain: String,
    pub objective: String,
}

impl Trace {
    pub fn to_file(&self, g: &Multigraph) -> Vec<TraceStepFile> {
        self.steps
            .iter()
            .map(|s| TraceStepFile {
                node: g.label(s.mv.node).to_string(),
                from: s.mv.source,
                to: match s.mv.target {
                    Target::Block(b) => b.to_string(),
                    Target::Fresh => "fresh".to_string(),
                },
                gain: rational::to_pq(&s.gain),
                objective: rational::to_pq(&s.objective),
            })
            .collect()
    }
}

fn first_improving<G: DeviationGain + ?Sized>(
    payoff: &G,
    p: &Partition,
    moves: &[Move],
) -> Result<Option<(Move, Rational)>> {
    for mv in moves {
        let gain = payoff.gain(p, mv)?;
        if gain > Rational::zero() {
            return Ok(Some((*mv, gain)));
        }
    }
    Ok(None)
}

/// Applies strictly improving single-player deviations until none is left,
/// the step cap is hit, or (without a potential) a partition repeats.
pub fn run_dynamics<G: DeviationGain + ?Sized>(
    payoff: &G,
    start: Partition,
    sched: &Schedule,
) -> Result<(Partition, Trace)> {
    if sched.max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be positive".into()));
    }
    let guarded = !payoff.has_potential();
    let n = start.node_count();
    let mut p = start;
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    if guarded {
        seen.insert(p.canonical_form());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    let mut cursor = 0usize;
    let mut idle = 0usize;
    let mut order: Vec<NodeId> = Vec::new();
    let mut moved_this_round = false;
    let mut round_started = false;

    let status = loop {
        if n == 0 {
            break Status::Stable;
        }
        let found = match sched.policy {
            Policy::RoundRobin => {
                if idle >= n {
                    break Status::Stable;
                }
                let i = cursor;
                cursor = (cursor + 1) % n;
                match first_improving(payoff, &p, &p.enumerate_deviations(i))? {
                    Some(hit) => {
                        idle = 0;
                        Some(hit)
                    }
                    None => {
                        idle += 1;
                        None
                    }
                }
            }
            Policy::SeededRandom => {
                if order.is_empty() {
                    if round_started && !moved_this_round {
                        break Status::Stable;
                    }
                    order = (0..n).collect();
                    order.shuffle(&mut rng);
                    order.reverse();
                    moved_this_round = false;
                    round_started = true;
                }
                let i = order.pop().expect("nonempty order");
                let mut moves = p.enumerate_deviations(i);
                moves.shuffle(&mut rng);
                let hit = first_improving(payoff, &p, &moves)?;
                if hit.is_some() {
                    moved_this_round = true;
                }
                hit
            }
            Policy::GreedyBest => {
                let mut best: Option<(Move, Rational)> = None;
                for i in 0..n {
                    for mv in p.enumerate_deviations(i) {
                        let gain = payoff.gain(&p, &mv)?;
                        if gain > Rational::zero() && best.as_ref().is_none_or(|(_, b)| gain > *b) {
                            best = Some((mv, gain));
                        }
                    }
                }
                match best {
                    Some(hit) => Some(hit),
                    None => break Status::Stable,
                }
            }
        };
        let Some((mv, gain)) = found else { continue };
        if guarded && steps.len() as u64 >= sched.max_steps {
            break Status::CapReached;
        }
        p.apply_in_place(&mv)?;
        let objective = payoff.objective(&p, mv.node)?;
        steps.push(TraceStep {
            mv,
            gain,
            objective,
        });
        if guarded && !seen.insert(p.canonical_form()) {
            break Status::CycleDetected;
        }
    };
    Ok((p, Trace { steps, status }))
}
