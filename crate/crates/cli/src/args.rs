use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "ctfactor", version, about = "Cycle factors of blown-up cycles: gadgets, solvers, experiments")]
pub struct Cli {
    /// Master seed; every random choice is derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Wall-clock budget for solver calls, in milliseconds.
    #[arg(long, global = true)]
    pub budget_ms: Option<u64>,
    /// Write outputs and `manifest.json` here.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Build a gadget or check the absorber properties.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Exact 2-density of a graph.
    M2(M2Args),
    /// Solve or verify C_t-factors.
    #[command(subcommand)]
    Factor(FactorCmd),
    /// Regularity, G_exp membership and typicality checks.
    Regcheck(RegcheckArgs),
    /// Random graph sampling and experiments.
    #[command(subcommand)]
    Gnp(GnpCmd),
    /// Adversarial edge deletions.
    #[command(subcommand)]
    Attack(AttackCmd),
    /// The absorbing pipeline.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Build a template hypergraph.
    Template(TemplateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetName {
    CtTree,
    Ladder,
    Switcher,
    Absorber,
    Fconn,
    FabsMinus,
    CompactSwitcher,
    CompactAbsorber,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum GadgetCmd {
    Build {
        #[arg(long, value_enum)]
        kind: GadgetName,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Ladder rung widths and length.
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 1)]
        b: usize,
        #[arg(long, default_value_t = 3)]
        l: usize,
    },
    /// Factor claims, 2-density bound and blow-up labelling for one (t, k).
    Verify {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum M2Method {
    Flow,
    Closure,
    Exact,
}

#[derive(Debug, Args, Serialize)]
pub struct M2Args {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = M2Method::Flow)]
    pub method: M2Method,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum FactorCmd {
    Solve {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        input: PathBuf,
        /// Only canonical cycles over the input's parts.
        #[arg(long)]
        canonical: bool,
    },
    /// Check a certificate covers every vertex of the input.
    Verify {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegMode {
    Pair,
    Gexp,
    Typical,
}

#[derive(Debug, Args, Serialize)]
pub struct RegcheckArgs {
    #[arg(long, value_enum)]
    pub mode: RegMode,
    /// Partitioned graph JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    #[arg(long, default_value = "1")]
    pub p: String,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Parts of the pair, 1-based.
    #[arg(long, default_value_t = 1)]
    pub x: usize,
    #[arg(long, default_value_t = 2)]
    pub y: usize,
    /// Only the lower-regularity half of the definition.
    #[arg(long)]
    pub lower: bool,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum GnpCmd {
    /// G(n, p); `p` accepts `0.3`, `1/4`, `C*n^-a/b`, `C*ln(n)/n`.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
    },
    /// Random subgraph of the complete blow-up of C_t.
    Blowup {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n_tilde: usize,
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "1")]
        alpha: String,
    },
    /// k-th neighbourhood growth of sampled vertex sets.
    Probe {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        nu: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        singleton_fallback: bool,
    },
    /// Edge counts of random vertex pairs against the expectation.
    EdgeBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct Host {
    /// Graph JSON.
    #[arg(long, conflicts_with_all = ["n", "complete"])]
    pub input: Option<PathBuf>,
    /// Sample G(n, p) instead.
    #[arg(long, requires = "p")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<String>,
    /// Use the complete graph K_n.
    #[arg(long, conflicts_with = "n")]
    pub complete: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum AttackCmd {
    /// Delete every edge inside the second neighbourhood of a vertex.
    SecondNeighborhood {
        #[command(flatten)]
        host: Host,
        /// Defaults to a maximum-degree vertex.
        #[arg(long)]
        target: Option<usize>,
    },
    /// Delete every edge inside a set of n/2 - 1 vertices.
    HalfCut {
        #[command(flatten)]
        host: Host,
        #[arg(long)]
        t: usize,
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
pub enum PipelineCmd {
    Run {
        /// PipelineConfig JSON; missing fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Partitioned graph JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct TemplateArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub m: usize,
    /// Defaults to 40^t.
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub verify_cap: usize,
}
