mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coopnet_core::hedonic::{
    alpha_sweep, better_response, discover_candidates, move_gain, nash_stable, partition_threshold,
    potential, Beta, ValueFunction,
};
use coopnet_core::myerson::{
    characteristic_value, external_stability_check, myerson_allocation, myerson_gain,
    myerson_nash_stable, myerson_shapley_oracle, player_value,
};
use coopnet_core::paths::coalition_path_counts;
use coopnet_core::rational::{in_unit_interval, to_pq};
use coopnet_core::{
    datasets, run_dynamics, Error, Multigraph, MyersonGain, Partition, Policy, Rational, Schedule,
};
use serde::Serialize;

use input::{parse_beta, parse_rational, LoadedGraph};
use report::{
    partition_file, Allocation, EntryWitness, InputInfo, Params, PotentialInfo, RunReport,
    Stability, Timing, TraceInfo, Witness,
};

#[derive(Parser)]
#[command(
    name = "coopnet",
    version,
    about = "Community detection with cooperative games on multigraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run better-response dynamics and write a run report.
    #[command(subcommand)]
    Partition(PartitionCommand),
    #[command(subcommand)]
    Myerson(MyersonCommand),
    /// Check a partition for profitable single-player deviations.
    Stability(StabilityArgs),
    /// α at which two partitions have equal α-model potential.
    Threshold(ThresholdArgs),
    /// α-model winners over an α range, as CSV.
    Sweep(SweepArgs),
    /// Print a built-in graph.
    Dataset(DatasetArgs),
}

#[derive(Subcommand)]
enum PartitionCommand {
    /// Hedonic game: α-model or generalized modularity.
    Hedonic(HedonicRun),
    /// Myerson-value payoffs at discount r.
    Myerson(MyersonRun),
}

#[derive(Subcommand)]
enum MyersonCommand {
    /// Characteristic value and Myerson allocation of a coalition.
    Value(ValueArgs),
}

#[derive(Args)]
struct HedonicModel {
    #[arg(long, value_parser = parse_rational, conflicts_with = "modularity")]
    alpha: Option<Rational>,
    #[arg(long)]
    modularity: bool,
    #[arg(long, value_parser = parse_rational, default_value = "1")]
    gamma: Rational,
    /// `uniform:p/q` or `degree-norm`.
    #[arg(long, value_parser = parse_beta, default_value = "uniform:1")]
    beta: Beta,
}

impl HedonicModel {
    fn value_function(&self) -> Result<ValueFunction> {
        input::value_function(
            self.alpha.as_ref(),
            self.modularity,
            &self.gamma,
            &self.beta,
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    RoundRobin,
    Random,
    Greedy,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long, value_enum, default_value = "round-robin")]
    schedule: ScheduleKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 1000 times the node count.
    #[arg(long)]
    max_steps: Option<u64>,
}

impl ScheduleArgs {
    fn build(&self, n: usize) -> Schedule {
        Schedule {
            policy: match self.schedule {
                ScheduleKind::RoundRobin => Policy::RoundRobin,
                ScheduleKind::Random => Policy::SeededRandom,
                ScheduleKind::Greedy => Policy::GreedyBest,
            },
            seed: self.seed,
            max_steps: self.max_steps.unwrap_or(Schedule::default_for(n).max_steps),
        }
    }
}

#[derive(Args)]
struct HedonicRun {
    /// Edge-list file or dataset name.
    #[arg(long)]
    graph: String,
    #[command(flatten)]
    model: HedonicModel,
    /// `singletons`, `grand` or a partition JSON file.
    #[arg(long, default_value = "singletons")]
    init: String,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MyersonRun {
    #[arg(long)]
    graph: String,
    #[arg(long, value_parser = parse_rational)]
    r: Rational,
    #[arg(long, default_value = "singletons")]
    init: String,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValueArgs {
    #[arg(long)]
    graph: String,
    /// Comma-separated node labels.
    #[arg(long, value_delimiter = ',', required = true)]
    coalition: Vec<String>,
    #[arg(long, value_parser = parse_rational)]
    r: Option<Rational>,
    /// Also compute the Shapley-form value by subset enumeration.
    #[arg(long)]
    oracle: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Hedonic,
    Myerson,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    partition: String,
    #[arg(long, value_enum)]
    model: Model,
    #[command(flatten)]
    hedonic: HedonicModel,
    #[arg(long, value_parser = parse_rational)]
    r: Option<Rational>,
    /// Myerson model only: check that every profitable entry is blocked.
    #[arg(long)]
    external: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    p1: String,
    #[arg(long)]
    p2: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: String,
    /// Starting partitions for candidate discovery. Defaults to singletons
    /// and the grand coalition.
    #[arg(long, num_args = 1..)]
    starts: Vec<String>,
    /// Sweep exactly these partitions instead of discovering candidates.
    #[arg(long, num_args = 1.., conflicts_with_all = ["starts", "grid"])]
    candidates: Vec<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_parser = parse_rational, default_value = "0")]
    lo: Rational,
    #[arg(long, value_parser = parse_rational, default_value = "1")]
    hi: Rational,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Edgelist,
    Info,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    name: String,
    #[arg(long, value_enum, default_value = "info")]
    emit: Emit,
}

fn input_info(lg: &LoadedGraph) -> InputInfo {
    InputInfo {
        source: lg.source.clone(),
        sha256: lg.sha256.clone(),
        nodes: lg.graph.node_count(),
        edges: lg.graph.edge_count(),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn elapsed_ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn hedonic_stability(vf: &ValueFunction, g: &Multigraph, p: &Partition) -> Result<Stability> {
    let (stable, mv) = nash_stable(vf, g, p)?;
    let witness = match mv {
        Some(mv) => Some(Witness::new(g, &mv, &move_gain(vf, g, p, &mv)?)),
        None => None,
    };
    Ok(Stability {
        nash_stable: stable,
        witness,
        external_stable: None,
        external_witness: None,
    })
}

fn myerson_stability(
    g: &Multigraph,
    p: &Partition,
    r: &Rational,
    external: bool,
) -> Result<Stability> {
    let (stable, mv) = myerson_nash_stable(g, p, r)?;
    let witness = match mv {
        Some(mv) => Some(Witness::new(g, &mv, &myerson_gain(g, p, &mv, r)?)),
        None => None,
    };
    let (external_stable, external_witness) = if external {
        let (ok, entry) = external_stability_check(g, p, r)?;
        let entry = entry.map(|e| EntryWitness {
            node: g.label(e.node).to_string(),
            block: e.block,
        });
        (Some(ok), entry)
    } else {
        (None, None)
    };
    Ok(Stability {
        nash_stable: stable,
        witness,
        external_stable,
        external_witness,
    })
}

fn hedonic_params(vf: &ValueFunction, init: &str, schedule: Schedule) -> Params {
    let (model, alpha, gamma, beta) = match vf {
        ValueFunction::Alpha(a) => ("alpha", Some(to_pq(a)), None, None),
        ValueFunction::Modularity { gamma, beta } => (
            "modularity",
            None,
            Some(to_pq(gamma)),
            Some(input::beta_text(beta)),
        ),
    };
    Params {
        model: model.into(),
        alpha,
        gamma,
        beta,
        r: None,
        init: input::init_kind(init).into(),
        schedule,
    }
}

fn partition_hedonic(a: &HedonicRun) -> Result<()> {
    let t = Instant::now();
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let vf = a.model.value_function()?;
    let start = input::initial_partition(g, &a.init)?;
    let sched = a.schedule.build(g.node_count());
    let (end, trace) = better_response(&vf, g, start.clone(), &sched)?;
    let end = end.canonical();
    let pot = potential(&vf, g, &end)?;
    let report = RunReport {
        command: "partition hedonic".into(),
        input: input_info(&lg),
        params: hedonic_params(&vf, &a.init, sched),
        initial: partition_file(g, &start),
        partition: partition_file(g, &end),
        potential: Some(PotentialInfo {
            value: to_pq(&pot.value),
            linear: pot.linear.map(|f| [to_pq(&f.intercept), to_pq(&f.slope)]),
        }),
        allocations: None,
        trace: TraceInfo::new(&trace, g),
        stability: hedonic_stability(&vf, g, &end)?,
        timing: Timing {
            elapsed_ms: elapsed_ms(t),
        },
    };
    input::write_output(a.out.as_deref(), &json(&report)?)
}

fn allocations(g: &Multigraph, p: &Partition, r: Option<&Rational>) -> Result<Vec<Allocation>> {
    let mut out = Vec::new();
    for (b, block) in p.blocks().iter().enumerate() {
        for &i in block {
            let y = player_value(g, block, i)?;
            out.push(Allocation {
                node: g.label(i).to_string(),
                block: b,
                poly: y.to_json_array(),
                text: y.to_string(),
                at_r: r.map(|r| to_pq(&y.eval(r))),
            });
        }
    }
    Ok(out)
}

fn check_r(r: &Rational) -> Result<()> {
    if !in_unit_interval(r) {
        bail!("r = {r} must lie in [0, 1]");
    }
    Ok(())
}

fn partition_myerson(a: &MyersonRun) -> Result<()> {
    let t = Instant::now();
    check_r(&a.r)?;
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let start = input::initial_partition(g, &a.init)?;
    let sched = a.schedule.build(g.node_count());
    let payoff = MyersonGain::new(g, a.r.clone())?;
    let (end, trace) = run_dynamics(&payoff, start.clone(), &sched)?;
    let end = end.canonical();
    let report = RunReport {
        command: "partition myerson".into(),
        input: input_info(&lg),
        params: Params {
            model: "myerson".into(),
            alpha: None,
            gamma: None,
            beta: None,
            r: Some(to_pq(&a.r)),
            init: input::init_kind(&a.init).into(),
            schedule: sched,
        },
        initial: partition_file(g, &start),
        partition: partition_file(g, &end),
        potential: None,
        allocations: Some(allocations(g, &end, Some(&a.r))?),
        trace: TraceInfo::new(&trace, g),
        stability: myerson_stability(g, &end, &a.r, true)?,
        timing: Timing {
            elapsed_ms: elapsed_ms(t),
        },
    };
    input::write_output(a.out.as_deref(), &json(&report)?)
}

#[derive(Serialize)]
struct ValueReport {
    coalition: Vec<String>,
    value: Vec<String>,
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    at_r: Option<String>,
    allocations: Vec<Allocation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Vec<Allocation>>,
}

fn myerson_value(a: &ValueArgs) -> Result<()> {
    if let Some(r) = &a.r {
        check_r(r)?;
    }
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let mut set = Vec::new();
    for label in &a.coalition {
        let id = g.node_id(label.trim())?;
        if !set.contains(&id) {
            set.push(id);
        }
    }
    let v = characteristic_value(&coalition_path_counts(g, &set)?);
    let alloc = myerson_allocation(g, &set)?;
    let r = a.r.as_ref();
    let entries = |polys: Vec<(usize, coopnet_core::CharPoly)>| -> Vec<Allocation> {
        polys
            .into_iter()
            .map(|(i, y)| Allocation {
                node: g.label(i).to_string(),
                block: 0,
                poly: y.to_json_array(),
                text: y.to_string(),
                at_r: r.map(|r| to_pq(&y.eval(r))),
            })
            .collect()
    };
    let closed = entries(
        set.iter()
            .map(|&i| (i, alloc.get(i).unwrap().clone()))
            .collect(),
    );
    let oracle = if a.oracle {
        let h = g.induced_subgraph(&set)?;
        let mut polys = Vec::new();
        for &i in &set {
            let local = h.node_id(g.label(i)).unwrap();
            polys.push((i, myerson_shapley_oracle(&h, local)?));
        }
        Some(entries(polys))
    } else {
        None
    };
    let report = ValueReport {
        coalition: set.iter().map(|&i| g.label(i).to_string()).collect(),
        value: v.to_json_array(),
        text: v.to_string(),
        at_r: r.map(|r| to_pq(&v.eval(r))),
        allocations: closed,
        oracle,
    };
    print!("{}", json(&report)?);
    Ok(())
}

fn stability(a: &StabilityArgs) -> Result<()> {
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let p = input::read_partition(g, &a.partition)?;
    let verdict = match a.model {
        Model::Hedonic => {
            if a.external {
                bail!("--external applies to --model myerson");
            }
            if a.r.is_some() {
                bail!("--r applies to --model myerson");
            }
            hedonic_stability(&a.hedonic.value_function()?, g, &p)?
        }
        Model::Myerson => {
            if a.hedonic.alpha.is_some() || a.hedonic.modularity {
                bail!("--model myerson takes --r, not a hedonic value function");
            }
            let Some(r) = &a.r else {
                bail!("--model myerson requires --r");
            };
            check_r(r)?;
            myerson_stability(g, &p, r, a.external)?
        }
    };
    print!("{}", json(&verdict)?);
    Ok(())
}

fn threshold(a: &ThresholdArgs) -> Result<()> {
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let p1 = input::read_partition(g, &a.p1)?;
    let p2 = input::read_partition(g, &a.p2)?;
    println!("{}", partition_threshold(g, &p1, &p2)?);
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let lg = input::load_graph(&a.graph)?;
    let g = &lg.graph;
    let candidates = if a.candidates.is_empty() {
        let starts = if a.starts.is_empty() {
            vec![
                Partition::singletons(g.node_count()),
                Partition::grand(g.node_count()),
            ]
        } else {
            a.starts
                .iter()
                .map(|s| input::initial_partition(g, s))
                .collect::<Result<_>>()?
        };
        let sched = a.schedule.build(g.node_count());
        discover_candidates(g, &starts, a.grid.unwrap_or(20), &a.lo, &a.hi, &sched)?
    } else {
        a.candidates
            .iter()
            .map(|s| input::read_partition(g, s))
            .collect::<Result<_>>()?
    };
    let table = alpha_sweep(g, &candidates, &a.lo, &a.hi)?;
    input::write_output(a.out.as_deref(), &table.to_csv(g))
}

#[derive(Serialize)]
struct DatasetInfo {
    name: String,
    nodes: usize,
    edges: u64,
    simple_edges: u64,
    components: usize,
    min_degree: u64,
    max_degree: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    clique_sizes: Option<Vec<usize>>,
}

fn dataset(a: &DatasetArgs) -> Result<()> {
    let g = datasets::load(&a.name)?;
    match a.emit {
        Emit::Edgelist => print!("{}", g.to_edge_list()),
        Emit::Info => {
            let degrees: Vec<u64> = g.nodes().map(|i| g.degree(i)).collect();
            let info = DatasetInfo {
                name: a.name.clone(),
                nodes: g.node_count(),
                edges: g.edge_count(),
                simple_edges: g.simple_edge_count(),
                components: g.connected_components().len(),
                min_degree: degrees.iter().copied().min().unwrap_or(0),
                max_degree: degrees.iter().copied().max().unwrap_or(0),
                clique_sizes: (a.name == "example2").then(|| datasets::EXAMPLE2_CLIQUES.to_vec()),
            };
            print!("{}", json(&info)?);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Partition(PartitionCommand::Hedonic(a)) => partition_hedonic(a),
        Command::Partition(PartitionCommand::Myerson(a)) => partition_myerson(a),
        Command::Myerson(MyersonCommand::Value(a)) => myerson_value(a),
        Command::Stability(a) => stability(a),
        Command::Threshold(a) => threshold(a),
        Command::Sweep(a) => sweep(a),
        Command::Dataset(a) => dataset(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let too_large = err
        .chain()
        .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::TooLarge { .. })));
    if too_large {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
