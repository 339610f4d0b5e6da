use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use coopnet_core::hedonic::{Beta, ValueFunction};
use coopnet_core::partition::PartitionFile;
use coopnet_core::rational::{self, Rational};
use coopnet_core::{datasets, Multigraph, Partition};
use sha2::{Digest, Sha256};

/// A graph together with the digest of the bytes it was read from.
pub struct LoadedGraph {
    pub graph: Multigraph,
    pub source: String,
    pub sha256: String,
}

fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Reads an edge-list file, or falls back to a built-in dataset name.
pub fn load_graph(arg: &str) -> Result<LoadedGraph> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let graph = Multigraph::parse_edge_list(&text).with_context(|| format!("parsing {arg}"))?;
        return Ok(LoadedGraph {
            graph,
            source: "file".into(),
            sha256: digest(text.as_bytes()),
        });
    }
    if datasets::NAMES.contains(&arg) {
        let graph = datasets::load(arg)?;
        let sha256 = digest(graph.to_edge_list().as_bytes());
        return Ok(LoadedGraph {
            graph,
            source: format!("dataset:{arg}"),
            sha256,
        });
    }
    bail!(
        "{arg} is neither a readable file nor a dataset ({})",
        datasets::NAMES.join(", ")
    )
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

pub fn parse_beta(s: &str) -> Result<Beta, String> {
    if s == "degree-norm" {
        return Ok(Beta::DegreeNormalized);
    }
    match s.strip_prefix("uniform:") {
        Some(v) => Ok(Beta::Uniform(parse_rational(v)?)),
        None => Err(format!("expected uniform:p/q or degree-norm, got {s}")),
    }
}

pub fn beta_text(b: &Beta) -> String {
    match b {
        Beta::Uniform(v) => format!("uniform:{}", rational::to_pq(v)),
        Beta::DegreeNormalized => "degree-norm".into(),
    }
}

pub fn value_function(
    alpha: Option<&Rational>,
    modularity: bool,
    gamma: &Rational,
    beta: &Beta,
) -> Result<ValueFunction> {
    match (alpha, modularity) {
        (Some(a), false) => Ok(ValueFunction::alpha(a.clone())?),
        (None, true) => Ok(ValueFunction::Modularity {
            gamma: gamma.clone(),
            beta: beta.clone(),
        }),
        _ => bail!("give exactly one of --alpha or --modularity"),
    }
}

pub fn read_partition(g: &Multigraph, path: &str) -> Result<Partition> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let file: PartitionFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    Ok(file
        .to_partition(g)
        .with_context(|| format!("partition in {path}"))?
        .canonical())
}

/// `singletons`, `grand` or a partition file.
pub fn initial_partition(g: &Multigraph, init: &str) -> Result<Partition> {
    match init {
        "singletons" => Ok(Partition::singletons(g.node_count())),
        "grand" => Ok(Partition::grand(g.node_count())),
        path => read_partition(g, path),
    }
}

pub fn init_kind(init: &str) -> &'static str {
    match init {
        "singletons" => "singletons",
        "grand" => "grand",
        _ => "file",
    }
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
