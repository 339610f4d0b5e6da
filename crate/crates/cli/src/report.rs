use coopnet_core::partition::{PartitionFile, TraceStepFile};
use coopnet_core::rational::to_pq;
use coopnet_core::{Move, Multigraph, Partition, Rational, Schedule, Status, Target, Trace};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input: InputInfo,
    pub params: Params,
    pub initial: PartitionFile,
    pub partition: PartitionFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocations: Option<Vec<Allocation>>,
    pub trace: TraceInfo,
    pub stability: Stability,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub sha256: String,
    pub nodes: usize,
    pub edges: u64,
}

#[derive(Debug, Serialize)]
pub struct Params {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    pub init: String,
    pub schedule: Schedule,
}

#[derive(Debug, Serialize)]
pub struct PotentialInfo {
    pub value: String,
    /// `[intercept, slope]` of the α-model linear form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<[String; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Allocation {
    pub node: String,
    pub block: usize,
    pub poly: Vec<String>,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_r: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TraceInfo {
    pub status: Status,
    pub steps: Vec<TraceStepFile>,
}

impl TraceInfo {
    pub fn new(trace: &Trace, g: &Multigraph) -> Self {
        Self {
            status: trace.status,
            steps: trace.to_file(g),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Witness {
    pub node: String,
    pub from: usize,
    pub to: String,
    pub gain: String,
}

impl Witness {
    pub fn new(g: &Multigraph, mv: &Move, gain: &Rational) -> Self {
        Self {
            node: g.label(mv.node).to_string(),
            from: mv.source,
            to: match mv.target {
                Target::Block(b) => b.to_string(),
                Target::Fresh => "fresh".into(),
            },
            gain: to_pq(gain),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EntryWitness {
    pub node: String,
    pub block: usize,
}

#[derive(Debug, Serialize)]
pub struct Stability {
    pub nash_stable: bool,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_witness: Option<EntryWitness>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

pub fn partition_file(g: &Multigraph, p: &Partition) -> PartitionFile {
    p.canonical().to_file(g)
}
