//! Coalition values from discounted geodesic counts and their Myerson
//! allocation.
//!
//! A connected coalition earns `a_1 r + a_2 r^2 + ... + a_L r^L` where `a_k`
//! counts geodesics of length `k`. Payoffs are kept as polynomials in the
//! discount `r` and evaluated only when two of them are compared.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, NodeId};
use crate::partition::{DeviationGain, Move, Partition, Target};
use crate::paths::{self, geodesics_within, PathProfile};
use crate::rational::{self, Rational};

/// `c_1 r + c_2 r^2 + ...` with no constant term. Trailing zero coefficients
/// are trimmed so that equal polynomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct CharPoly {
    /// `coeffs[k - 1]` multiplies `r^k`.
    coeffs: Vec<Rational>,
}

impl CharPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// From coefficients of `r, r^2, ...`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `r^k`; zero for `k == 0`.
    pub fn coeff(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.coeffs
            .get(k - 1)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, r: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * r;
        }
        acc
    }

    /// `["0/1", c_1, c_2, ...]`, indexed by power.
    pub fn to_json_array(&self) -> Vec<String> {
        std::iter::once(Rational::zero())
            .chain(self.coeffs.iter().cloned())
            .map(|c| rational::to_pq(&c))
            .collect()
    }

    pub fn from_json_array(items: &[String]) -> Result<Self> {
        let parsed = items
            .iter()
            .map(|s| rational::parse(s))
            .collect::<Result<Vec<_>>>()?;
        match parsed.split_first() {
            None => Ok(Self::zero()),
            Some((c0, rest)) if c0.is_zero() => Ok(Self::new(rest.to_vec())),
            Some(_) => Err(Error::InvalidArgument(
                "characteristic polynomials have no constant term".into(),
            )),
        }
    }
}

impl Add for &CharPoly {
    type Output = CharPoly;

    fn add(self, rhs: &CharPoly) -> CharPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        CharPoly::new((1..=len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &CharPoly {
    type Output = CharPoly;

    fn sub(self, rhs: &CharPoly) -> CharPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        CharPoly::new((1..=len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl AddAssign<&CharPoly> for CharPoly {
    fn add_assign(&mut self, rhs: &CharPoly) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for CharPoly {
    fn sum<I: Iterator<Item = CharPoly>>(iter: I) -> Self {
        iter.fold(CharPoly::zero(), |acc, p| &acc + &p)
    }
}

/// Renders as `3/2 r + 4/3 r^2 + r^3`; coefficients are `p/q` or integers.
impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = i + 1;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            if k == 1 {
                f.write_str("r")?;
            } else {
                write!(f, "r^{k}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn big(u: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(u.clone()))
}

/// `v(S)` with `c_k = a_k`.
pub fn characteristic_value(profile: &PathProfile) -> CharPoly {
    CharPoly::new(profile.counts.iter().map(big).collect())
}

/// `v_g(S)`: the sum of `v` over the connected components of `g|S`.
pub fn component_characteristic(g: &Multigraph, set: &[NodeId]) -> Result<CharPoly> {
    g.check_nodes(set)?;
    let mut total = CharPoly::zero();
    for comp in g.components_within(set) {
        total += &characteristic_value(&paths::coalition_path_counts(g, &comp)?);
    }
    Ok(total)
}

/// Per-node payoff polynomials of one coalition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MyersonAllocation {
    pub entries: Vec<(NodeId, CharPoly)>,
}

impl MyersonAllocation {
    pub fn get(&self, node: NodeId) -> Option<&CharPoly> {
        self.entries
            .iter()
            .find(|(n, _)| *n == node)
            .map(|(_, p)| p)
    }

    pub fn total(&self) -> CharPoly {
        self.entries.iter().map(|(_, p)| p.clone()).sum()
    }
}

fn shares(counts: &[BigUint]) -> CharPoly {
    CharPoly::new(
        counts
            .iter()
            .enumerate()
            .map(|(i, a)| big(a) / rational::int(i as i64 + 2))
            .collect(),
    )
}

/// Myerson value of every member of `set` in the game on `g|set`: the
/// coefficient of `r^k` is `a^i_k / (k + 1)`.
pub fn myerson_allocation(g: &Multigraph, set: &[NodeId]) -> Result<MyersonAllocation> {
    let profile = paths::node_path_counts(g, set)?;
    Ok(MyersonAllocation {
        entries: profile
            .nodes
            .iter()
            .zip(&profile.counts)
            .map(|(&n, c)| (n, shares(c)))
            .collect(),
    })
}

/// Payoff of `node` in the game on `g|coalition`, counting only geodesics
/// that pass through it.
pub fn player_value(g: &Multigraph, coalition: &[NodeId], node: NodeId) -> Result<CharPoly> {
    g.check_nodes(coalition)?;
    let geo = geodesics_within(g, coalition);
    let Some(me) = geo.nodes.iter().position(|&x| x == node) else {
        return Err(Error::InvalidArgument(format!(
            "node {node} is not in the coalition"
        )));
    };
    let k = geo.nodes.len();
    let mut counts: Vec<BigUint> = Vec::new();
    let mut bump = |d: usize, add: BigUint| {
        if counts.len() < d {
            counts.resize(d, BigUint::zero());
        }
        counts[d - 1] += add;
    };
    for s in 0..k {
        for t in s + 1..k {
            let Some(d) = geo.distance(s, t) else {
                continue;
            };
            if s == me || t == me {
                bump(d, geo.sigma(s, t).clone());
            } else if let (Some(a), Some(b)) = (geo.distance(s, me), geo.distance(me, t)) {
                if a + b == d {
                    bump(d, geo.sigma(s, me) * geo.sigma(me, t));
                }
            }
        }
    }
    Ok(shares(&counts))
}

pub const ORACLE_MAX_NODES: usize = 12;

/// Myerson value of `node` on the whole graph by explicit enumeration of
/// marginal contributions over all coalitions that exclude it, weighted by
/// `s! (n - s - 1)! / n!`. Exponential; limited to 12 nodes.
pub fn myerson_shapley_oracle(g: &Multigraph, node: NodeId) -> Result<CharPoly> {
    let n = g.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(Error::TooLarge {
            what: "the Shapley-form Myerson oracle",
            limit: ORACLE_MAX_NODES,
            got: n,
        });
    }
    g.check_nodes(&[node])?;
    let members = |mask: usize| -> Vec<NodeId> { (0..n).filter(|&j| mask >> j & 1 == 1).collect() };
    let mut value = Vec::with_capacity(1 << n);
    for mask in 0..1usize << n {
        value.push(component_characteristic(g, &members(mask))?);
    }
    let fact: Vec<BigInt> = (0..=n)
        .scan(BigInt::one(), |acc, k| {
            if k > 0 {
                *acc *= k;
            }
            Some(acc.clone())
        })
        .collect();
    let bit = 1usize << node;
    let mut total = CharPoly::zero();
    for mask in 0..1usize << n {
        if mask & bit != 0 {
            continue;
        }
        let s = mask.count_ones() as usize;
        let weight = Rational::new(fact[s].clone() * &fact[n - s - 1], fact[n].clone());
        let marginal = &value[mask | bit] - &value[mask];
        let scaled = CharPoly::new(marginal.coeffs().iter().map(|c| c * &weight).collect());
        total += &scaled;
    }
    Ok(total)
}

fn check_discount(r: &Rational) -> Result<()> {
    if rational::in_unit_interval(r) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "discount r = {r} must lie in [0, 1]"
        )))
    }
}

/// Payoff polynomial the mover would receive after `mv` (zero in a fresh
/// coalition) minus the one it has now.
pub fn myerson_gain_poly(g: &Multigraph, p: &Partition, mv: &Move) -> Result<CharPoly> {
    let current = player_value(g, p.block(mv.source), mv.node)?;
    let after = match mv.target {
        Target::Fresh => CharPoly::zero(),
        Target::Block(_) => player_value(g, &p.target_with(mv), mv.node)?,
    };
    Ok(&after - &current)
}

pub fn myerson_gain(g: &Multigraph, p: &Partition, mv: &Move, r: &Rational) -> Result<Rational> {
    check_discount(r)?;
    Ok(myerson_gain_poly(g, p, mv)?.eval(r))
}

/// Myerson best response as a [`DeviationGain`] at a fixed discount.
#[derive(Debug, Clone)]
pub struct MyersonGain<'g> {
    g: &'g Multigraph,
    r: Rational,
}

impl<'g> MyersonGain<'g> {
    pub fn new(g: &'g Multigraph, r: Rational) -> Result<Self> {
        check_discount(&r)?;
        Ok(Self { g, r })
    }

    pub fn discount(&self) -> &Rational {
        &self.r
    }
}

impl DeviationGain for MyersonGain<'_> {
    fn gain(&self, p: &Partition, mv: &Move) -> Result<Rational> {
        Ok(myerson_gain_poly(self.g, p, mv)?.eval(&self.r))
    }

    /// The mover's payoff in its new coalition.
    fn objective(&self, p: &Partition, mover: NodeId) -> Result<Rational> {
        Ok(player_value(self.g, p.block(p.block_of(mover)), mover)?.eval(&self.r))
    }
}

/// Nash (internal) stability under Myerson payoffs, with one improving move
/// as witness when unstable.
pub fn myerson_nash_stable(
    g: &Multigraph,
    p: &Partition,
    r: &Rational,
) -> Result<(bool, Option<Move>)> {
    let payoff = MyersonGain::new(g, r.clone())?;
    for i in g.nodes() {
        for mv in p.enumerate_deviations(i) {
            if payoff.gain(p, &mv)? > Rational::zero() {
                return Ok((false, Some(mv)));
            }
        }
    }
    Ok((true, None))
}

/// An entry of `node` into block `block` that benefits the entrant and that
/// no incumbent has reason to refuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnblockedEntry {
    pub node: NodeId,
    pub block: usize,
}

/// External stability: every profitable entry into an existing coalition
/// must be blocked by an incumbent whose payoff would strictly fall.
pub fn external_stability_check(
    g: &Multigraph,
    p: &Partition,
    r: &Rational,
) -> Result<(bool, Option<UnblockedEntry>)> {
    check_discount(r)?;
    for i in g.nodes() {
        for mv in p.enumerate_deviations(i) {
            let Target::Block(k) = mv.target else {
                continue;
            };
            if myerson_gain(g, p, &mv, r)? <= Rational::zero() {
                continue;
            }
            let joined = p.target_with(&mv);
            let mut blocked = false;
            for &j in p.block(k) {
                let before = player_value(g, p.block(k), j)?.eval(r);
                let after = player_value(g, &joined, j)?.eval(r);
                if after < before {
                    blocked = true;
                    break;
                }
            }
            if !blocked {
                return Ok((false, Some(UnblockedEntry { node: i, block: k })));
            }
        }
    }
    Ok((true, None))
}
