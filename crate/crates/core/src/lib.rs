//! Community detection on undirected multigraphs through cooperative games.
//!
//! Two engines share one partition machinery:
//!
//! * [`myerson`]: coalition values from discounted geodesic counts, players
//!   allocated by the Myerson value, and single-player best-response moves.
//! * [`hedonic`]: additively separable symmetric hedonic games (the α-model and
//!   the generalized-modularity family) whose potential makes better-response
//!   dynamics converge.
//!
//! All payoffs, potentials and thresholds are exact rationals.

pub mod datasets;
pub mod error;
pub mod graph;
pub mod hedonic;
pub mod myerson;
pub mod partition;
pub mod paths;
pub mod rational;

pub use error::{Error, Result};
pub use graph::{Multigraph, NodeId};
pub use hedonic::{Crossing, HedonicGain, Potential, SweepRow, SweepTable, ValueFunction};
pub use myerson::{CharPoly, MyersonAllocation, MyersonGain};
pub use partition::{
    run_dynamics, DeviationGain, Move, Partition, Policy, Schedule, Status, Target, Trace,
    TraceStep,
};
pub use paths::{GeodesicProfile, NodePathProfile, PathProfile};
pub use rational::Rational;
