//! Additively separable, symmetric hedonic games on a graph.
//!
//! A player's utility for a coalition is the sum of its pair values with the
//! other members. Because the pair values are symmetric, the sum of pair
//! values inside all blocks is a potential: every single-player move changes
//! it by exactly the mover's gain, so better-response dynamics terminate at a
//! Nash-stable partition.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, NodeId};
use crate::partition::{run_dynamics, DeviationGain, Move, Partition, Schedule, Target, Trace};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Beta {
    Uniform(Rational),
    /// `beta_ij = 2m / (d_i d_j)`.
    DegreeNormalized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueFunction {
    /// `1 - alpha` for adjacent pairs, `-alpha` otherwise. Multiplicities are
    /// ignored.
    Alpha(Rational),
    /// `beta_ij (A_ij - gamma d_i d_j / 2m)` with multiplicity-weighted
    /// `A`, `d` and `m`.
    Modularity { gamma: Rational, beta: Beta },
}

impl ValueFunction {
    pub fn alpha(a: Rational) -> Result<Self> {
        if !rational::in_unit_interval(&a) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {a} must lie in [0, 1]"
            )));
        }
        Ok(Self::Alpha(a))
    }

    /// Standard modularity: `gamma = 1`, uniform `beta = 1`.
    pub fn modularity() -> Self {
        Self::Modularity {
            gamma: Rational::one(),
            beta: Beta::Uniform(Rational::one()),
        }
    }

    pub fn is_alpha(&self) -> bool {
        matches!(self, Self::Alpha(_))
    }
}

impl fmt::Display for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Alpha(a) => write!(f, "alpha={a}"),
            Self::Modularity { gamma, beta } => match beta {
                Beta::Uniform(b) => write!(f, "modularity(gamma={gamma}, beta={b})"),
                Beta::DegreeNormalized => {
                    write!(f, "modularity(gamma={gamma}, beta=degree-normalized)")
                }
            },
        }
    }
}

fn r_u64(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn pair_value(vf: &ValueFunction, g: &Multigraph, i: NodeId, j: NodeId) -> Result<Rational> {
    g.check_nodes(&[i, j])?;
    if i == j {
        return Err(Error::InvalidArgument(
            "pair values are defined for distinct nodes only".into(),
        ));
    }
    match vf {
        ValueFunction::Alpha(a) => Ok(if g.adjacent(i, j) {
            Rational::one() - a
        } else {
            -a.clone()
        }),
        ValueFunction::Modularity { gamma, beta } => {
            let two_m = 2 * g.edge_count();
            if two_m == 0 {
                return Err(Error::InvalidArgument(
                    "modularity needs at least one edge".into(),
                ));
            }
            let (di, dj) = (g.degree(i), g.degree(j));
            let expected = r_u64(di) * r_u64(dj) / r_u64(two_m);
            let raw = r_u64(g.multiplicity(i, j)) - gamma * expected;
            let b = match beta {
                Beta::Uniform(b) => b.clone(),
                Beta::DegreeNormalized => {
                    if di == 0 || dj == 0 {
                        return Err(Error::InvalidArgument(format!(
                            "degree-normalized weights need positive degrees ({} or {} is isolated)",
                            g.label(i),
                            g.label(j)
                        )));
                    }
                    r_u64(two_m) / (r_u64(di) * r_u64(dj))
                }
            };
            Ok(b * raw)
        }
    }
}

/// Symmetric matrix of pair values with a zero diagonal.
#[allow(clippy::needless_range_loop)]
pub fn pair_values(vf: &ValueFunction, g: &Multigraph) -> Result<Vec<Vec<Rational>>> {
    let n = g.node_count();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = pair_value(vf, g, i, j)?;
            m[j][i] = v.clone();
            m[i][j] = v;
        }
    }
    Ok(m)
}

/// `intercept + slope * alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    #[serde(with = "rational::serde_pq")]
    pub intercept: Rational,
    #[serde(with = "rational::serde_pq")]
    pub slope: Rational,
}

impl LinearForm {
    pub fn eval(&self, alpha: &Rational) -> Rational {
        &self.intercept + &self.slope * alpha
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slope.is_zero() {
            return write!(f, "{}", self.intercept);
        }
        let mag = self.slope.abs();
        let sign = if self.slope.is_negative() { "-" } else { "+" };
        if mag.is_one() {
            write!(f, "{}{}α", self.intercept, sign)
        } else {
            write!(f, "{}{}{}α", self.intercept, sign, mag)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    pub value: Rational,
    /// For the α-model, the potential as a function of α.
    pub linear: Option<LinearForm>,
}

fn choose2(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

/// Binarized edge count inside `block`.
fn simple_edges_within(g: &Multigraph, block: &[NodeId]) -> u64 {
    let mut inside = vec![false; g.node_count()];
    for &i in block {
        inside[i] = true;
    }
    block
        .iter()
        .map(|&i| {
            g.neighbors(i)
                .iter()
                .filter(|&&(j, _)| inside[j] && j > i)
                .count() as u64
        })
        .sum()
}

/// α-model potential as a function of α: `sum_k m(S_k) - C(n(S_k), 2) α`.
pub fn alpha_linear_form(g: &Multigraph, p: &Partition) -> LinearForm {
    let (mut edges, mut pairs) = (0u64, 0u64);
    for b in p.blocks() {
        edges += simple_edges_within(g, b);
        pairs += choose2(b.len());
    }
    LinearForm {
        intercept: r_u64(edges),
        slope: -r_u64(pairs),
    }
}

/// Sum of pair values over unordered pairs inside each block.
pub fn pairwise_potential(vf: &ValueFunction, g: &Multigraph, p: &Partition) -> Result<Rational> {
    let mut total = Rational::zero();
    for b in p.blocks() {
        for (x, &i) in b.iter().enumerate() {
            for &j in &b[x + 1..] {
                total += pair_value(vf, g, i, j)?;
            }
        }
    }
    Ok(total)
}

pub fn potential(vf: &ValueFunction, g: &Multigraph, p: &Partition) -> Result<Potential> {
    check_partition(g, p)?;
    match vf {
        ValueFunction::Alpha(a) => {
            let form = alpha_linear_form(g, p);
            Ok(Potential {
                value: form.eval(a),
                linear: Some(form),
            })
        }
        ValueFunction::Modularity { .. } => Ok(Potential {
            value: pairwise_potential(vf, g, p)?,
            linear: None,
        }),
    }
}

fn check_partition(g: &Multigraph, p: &Partition) -> Result<()> {
    if p.node_count() != g.node_count() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} nodes but the graph has {}",
            p.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Utility change of the mover: its pair values with the target coalition
/// minus those with the rest of its current one.
pub fn move_gain(vf: &ValueFunction, g: &Multigraph, p: &Partition, mv: &Move) -> Result<Rational> {
    check_partition(g, p)?;
    let i = mv.node;
    let mut gain = Rational::zero();
    if let Target::Block(t) = mv.target {
        for &j in p.block(t) {
            gain += pair_value(vf, g, i, j)?;
        }
    }
    for &j in p.block(mv.source) {
        if j != i {
            gain -= pair_value(vf, g, i, j)?;
        }
    }
    Ok(gain)
}

/// Hedonic payoffs with cached pair values, for use in [`run_dynamics`].
#[derive(Debug, Clone)]
pub struct HedonicGain {
    values: Vec<Vec<Rational>>,
}

impl HedonicGain {
    pub fn new(vf: &ValueFunction, g: &Multigraph) -> Result<Self> {
        Ok(Self {
            values: pair_values(vf, g)?,
        })
    }

    pub fn potential(&self, p: &Partition) -> Rational {
        let mut total = Rational::zero();
        for b in p.blocks() {
            for (x, &i) in b.iter().enumerate() {
                for &j in &b[x + 1..] {
                    total += &self.values[i][j];
                }
            }
        }
        total
    }
}

impl DeviationGain for HedonicGain {
    fn gain(&self, p: &Partition, mv: &Move) -> Result<Rational> {
        let row = &self.values[mv.node];
        let mut gain = Rational::zero();
        if let Target::Block(t) = mv.target {
            for &j in p.block(t) {
                gain += &row[j];
            }
        }
        for &j in p.block(mv.source) {
            gain -= &row[j];
        }
        Ok(gain)
    }

    /// The potential after the move.
    fn objective(&self, p: &Partition, _mover: NodeId) -> Result<Rational> {
        Ok(self.potential(p))
    }

    fn has_potential(&self) -> bool {
        true
    }
}

/// True when no player strictly gains by moving to another block or to a
/// fresh one; otherwise one improving move.
pub fn nash_stable(
    vf: &ValueFunction,
    g: &Multigraph,
    p: &Partition,
) -> Result<(bool, Option<Move>)> {
    check_partition(g, p)?;
    let payoff = HedonicGain::new(vf, g)?;
    for i in g.nodes() {
        for mv in p.enumerate_deviations(i) {
            if payoff.gain(p, &mv)? > Rational::zero() {
                return Ok((false, Some(mv)));
            }
        }
    }
    Ok((true, None))
}

pub fn better_response(
    vf: &ValueFunction,
    g: &Multigraph,
    start: Partition,
    sched: &Schedule,
) -> Result<(Partition, Trace)> {
    check_partition(g, &start)?;
    let payoff = HedonicGain::new(vf, g)?;
    run_dynamics(&payoff, start, sched)
}

/// Where two α-model potentials meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Crossing {
    At(Rational),
    /// Parallel forms, or a crossing outside `[0, 1]`.
    None,
    AlwaysEqual,
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crossing::At(a) => write!(f, "{a}"),
            Crossing::None => f.write_str("none"),
            Crossing::AlwaysEqual => f.write_str("always equal"),
        }
    }
}

pub fn crossing(a: &LinearForm, b: &LinearForm) -> Crossing {
    if a == b {
        return Crossing::AlwaysEqual;
    }
    if a.slope == b.slope {
        return Crossing::None;
    }
    let x = (&b.intercept - &a.intercept) / (&a.slope - &b.slope);
    if rational::in_unit_interval(&x) {
        Crossing::At(x)
    } else {
        Crossing::None
    }
}

/// The α at which the α-model potentials of two partitions coincide.
pub fn partition_threshold(g: &Multigraph, p1: &Partition, p2: &Partition) -> Result<Crossing> {
    check_partition(g, p1)?;
    check_partition(g, p2)?;
    Ok(crossing(
        &alpha_linear_form(g, p1),
        &alpha_linear_form(g, p2),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub lo: Rational,
    pub hi: Rational,
    /// Index into the candidate list after de-duplication.
    pub partition_id: usize,
    pub partition: Partition,
    pub form: LinearForm,
}

/// Winning candidate per α interval. Intervals are closed and share their
/// endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with header
    /// `alpha_lo,alpha_hi,partition_id,partition_canonical,potential_intercept,potential_slope`.
    /// Blocks in `partition_canonical` are separated by `|`, members by spaces.
    pub fn to_csv(&self, g: &Multigraph) -> String {
        let mut out = String::from(
            "alpha_lo,alpha_hi,partition_id,partition_canonical,potential_intercept,potential_slope\n",
        );
        for row in &self.rows {
            let canon = row
                .partition
                .label_blocks(g)
                .iter()
                .map(|b| b.join(" "))
                .collect::<Vec<_>>()
                .join("|");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rational::to_pq(&row.lo),
                rational::to_pq(&row.hi),
                row.partition_id,
                canon,
                rational::to_pq(&row.form.intercept),
                rational::to_pq(&row.form.slope),
            ));
        }
        out
    }

    /// Breakpoints strictly inside the swept range.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.rows.iter().skip(1).map(|r| r.lo.clone()).collect()
    }
}

fn dedup_candidates(candidates: &[Partition]) -> Vec<Partition> {
    let mut seen = HashSet::new();
    candidates
        .iter()
        .filter(|p| seen.insert(p.canonical_form()))
        .map(Partition::canonical)
        .collect()
}

/// Upper envelope of the candidates' α-model potentials over `[lo, hi]`.
pub fn alpha_sweep(
    g: &Multigraph,
    candidates: &[Partition],
    lo: &Rational,
    hi: &Rational,
) -> Result<SweepTable> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate partitions".into()));
    }
    if lo > hi || !rational::in_unit_interval(lo) || !rational::in_unit_interval(hi) {
        return Err(Error::InvalidArgument(format!(
            "sweep range [{lo}, {hi}] must be a subinterval of [0, 1]"
        )));
    }
    for p in candidates {
        check_partition(g, p)?;
    }
    let cands = dedup_candidates(candidates);
    let forms: Vec<LinearForm> = cands.iter().map(|p| alpha_linear_form(g, p)).collect();

    // Highest value at lo; ties go to the steeper line, then the earlier one.
    let better = |a: usize, b: usize, x: &Rational| -> bool {
        let (va, vb) = (forms[a].eval(x), forms[b].eval(x));
        match va.cmp(&vb) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => forms[a].slope > forms[b].slope,
        }
    };
    let mut cur = 0;
    for c in 1..forms.len() {
        if better(c, cur, lo) {
            cur = c;
        }
    }

    let mut rows: Vec<SweepRow> = Vec::new();
    let mut x = lo.clone();
    loop {
        let mut next: Option<(Rational, usize)> = None;
        for (j, f) in forms.iter().enumerate() {
            if f.slope <= forms[cur].slope {
                continue;
            }
            let xj = (&forms[cur].intercept - &f.intercept) / (&f.slope - &forms[cur].slope);
            if xj <= x {
                continue;
            }
            let replace = match &next {
                None => true,
                Some((bx, bj)) => xj < *bx || (xj == *bx && f.slope > forms[*bj].slope),
            };
            if replace {
                next = Some((xj, j));
            }
        }
        match next {
            Some((xn, j)) if xn < *hi => {
                push_row(&mut rows, &x, &xn, cur, &cands, &forms);
                x = xn;
                cur = j;
            }
            _ => {
                push_row(&mut rows, &x, hi, cur, &cands, &forms);
                break;
            }
        }
    }
    Ok(SweepTable { rows })
}

fn push_row(
    rows: &mut Vec<SweepRow>,
    lo: &Rational,
    hi: &Rational,
    id: usize,
    cands: &[Partition],
    forms: &[LinearForm],
) {
    if let Some(last) = rows.last_mut() {
        if last.partition_id == id {
            last.hi = hi.clone();
            return;
        }
    }
    rows.push(SweepRow {
        lo: lo.clone(),
        hi: hi.clone(),
        partition_id: id,
        partition: cands[id].clone(),
        form: forms[id].clone(),
    });
}

/// Runs α-model better response from every start at each of the `grid + 1`
/// evenly spaced α values in `[lo, hi]` and returns the distinct outcomes in
/// order of discovery.
pub fn discover_candidates(
    g: &Multigraph,
    starts: &[Partition],
    grid: usize,
    lo: &Rational,
    hi: &Rational,
    sched: &Schedule,
) -> Result<Vec<Partition>> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    if starts.is_empty() {
        return Err(Error::InvalidArgument("no starting partitions".into()));
    }
    let step = (hi - lo) / rational::int(grid as i64);
    let alphas: Vec<Rational> = (0..=grid)
        .map(|k| lo + &step * rational::int(k as i64))
        .collect();
    let found: Vec<Vec<Partition>> = alphas
        .par_iter()
        .map(|a| -> Result<Vec<Partition>> {
            let vf = ValueFunction::alpha(a.clone())?;
            starts
                .iter()
                .map(|s| better_response(&vf, g, s.clone(), sched).map(|(p, _)| p))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(dedup_candidates(
        &found.into_iter().flatten().collect::<Vec<_>>(),
    ))
}

pub const BRUTEFORCE_MAX_NODES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub partition: Partition,
    pub potential: Potential,
    /// Number of set partitions scored, Bell(n).
    pub examined: u64,
}

/// Global potential maximum over all set partitions (Bell(n) of them). Ties
/// go to the partition with the smallest canonical form.
pub fn bruteforce_max_partition(
    vf: &ValueFunction,
    g: &Multigraph,
) -> Result<(Partition, Potential)> {
    let found = bruteforce_search(vf, g)?;
    Ok((found.partition, found.potential))
}

pub fn bruteforce_search(vf: &ValueFunction, g: &Multigraph) -> Result<BruteForce> {
    let n = g.node_count();
    if n > BRUTEFORCE_MAX_NODES {
        return Err(Error::TooLarge {
            what: "brute-force partition search",
            limit: BRUTEFORCE_MAX_NODES,
            got: n,
        });
    }
    let values = pair_values(vf, g)?;
    // Scale to a common denominator and search over machine integers.
    let denom = values
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut w = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let scaled = values[i][j].numer() * (&denom / values[i][j].denom());
            w[i][j] = scaled
                .to_i128()
                .ok_or(Error::Overflow("brute-force potential scaling"))?;
        }
    }
    let mut search = Search {
        w: &w,
        blocks: Vec::new(),
        best: None,
        examined: 0,
    };
    search.descend(0, 0)?;
    let blocks = match search.best {
        Some((_, b)) => b,
        None => Vec::new(),
    };
    let partition = Partition::from_blocks(n, blocks)?;
    let potential = potential(vf, g, &partition)?;
    Ok(BruteForce {
        partition,
        potential,
        examined: search.examined,
    })
}

struct Search<'a> {
    w: &'a [Vec<i128>],
    blocks: Vec<Vec<NodeId>>,
    best: Option<(i128, Vec<Vec<NodeId>>)>,
    examined: u64,
}

impl Search<'_> {
    fn descend(&mut self, i: usize, acc: i128) -> Result<()> {
        let n = self.w.len();
        if i == n {
            self.examined += 1;
            let better = match &self.best {
                None => true,
                Some((b, blocks)) => {
                    acc > *b || (acc == *b && encode(&self.blocks) < encode(blocks))
                }
            };
            if better {
                self.best = Some((acc, self.blocks.clone()));
            }
            return Ok(());
        }
        for b in 0..=self.blocks.len() {
            let fresh = b == self.blocks.len();
            let mut add = 0i128;
            if !fresh {
                for &j in &self.blocks[b] {
                    add = add
                        .checked_add(self.w[i][j])
                        .ok_or(Error::Overflow("brute-force potential"))?;
                }
                self.blocks[b].push(i);
            } else {
                self.blocks.push(vec![i]);
            }
            let next = acc
                .checked_add(add)
                .ok_or(Error::Overflow("brute-force potential"))?;
            self.descend(i + 1, next)?;
            if fresh {
                self.blocks.pop();
            } else {
                self.blocks[b].pop();
            }
        }
        Ok(())
    }
}

/// Restricted-growth enumeration already yields blocks ordered by least
/// member with sorted members, i.e. canonical order.
fn encode(blocks: &[Vec<NodeId>]) -> Vec<u8> {
    Partition::from_blocks(blocks.iter().map(Vec::len).sum(), blocks.to_vec())
        .expect("search state is a partition")
        .canonical_form()
}
