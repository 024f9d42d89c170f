//! `cakes`: build cluster trees and run exact nearest-neighbor search from
//! the command line.

mod commands;
mod dispatch;

use std::path::PathBuf;
use std::process::ExitCode;

use cakes_core::{Error, Strategy};
use clap::{Args, Parser, Subcommand};

const BENCH_COLUMNS: &str = "\
Benchmark CSV header:
  dataset,distance,strategy,permuted,algorithm,k,cardinality,throughput_qps,mean_recall,mean_distance_count
Columns:
  dataset              dataset name (file stem, with -xM for augmented copies)
  distance             distance function
  strategy             unbalanced or balanced
  permuted             true if the dataset was reordered depth-first
  algorithm            repeated-rnn, breadth-sieve, depth-sieve or linear
  k                    number of neighbors requested
  cardinality          number of points searched
  throughput_qps       queries per second of wall time
  mean_recall          mean recall against linear search, ties forgiven
  mean_distance_count  mean distance evaluations per query (empty without --count-distances)

LFD CSV columns, in order:
  cardinality,depth,clusters,min,p5,p25,p50,p75,p95,max
Percentiles weight each cluster by its cardinality.";

const LFD_COLUMNS: &str = "\
CSV columns, in order:
  depth,clusters,min,p5,p25,p50,p75,p95,max
One row per tree depth. Percentiles of local fractal dimension weight each
cluster by its cardinality.";

#[derive(Parser, Debug)]
#[command(name = "cakes", version, about = "Exact k-NN and rho-NN search over divisive cluster trees")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// euclidean, cosine, dtw (vectors), hamming or levenshtein (sequences).
    /// Search and lfd-report default to the distance in the tree file;
    /// everything else defaults to euclidean.
    #[arg(long, global = true)]
    pub distance: Option<String>,

    /// raw-f32, csv or sequences. Applies to every dataset file read or
    /// written. Inferred from the file extension when omitted.
    #[arg(long, global = true)]
    pub format: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Append noisy copies of every point to a vector dataset.
    Augment(AugmentArgs),
    /// Build a tree and write it to a file.
    Build(BuildArgs),
    /// Search a tree with a file of queries; one JSON line per query.
    Search(SearchArgs),
    /// Exact k-NN by linear search, saved as JSON lines.
    GroundTruth(GroundTruthArgs),
    /// Throughput, recall and distance counts for several algorithms.
    #[command(after_help = BENCH_COLUMNS)]
    Bench(BenchArgs),
    /// Per-depth LFD percentiles of a tree, as CSV.
    #[command(after_help = LFD_COLUMNS)]
    LfdReport(LfdReportArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// uniform-hypercube, manifold or sequences.
    #[arg(long)]
    pub kind: String,
    /// Number of points.
    #[arg(short, long)]
    pub n: usize,
    /// Dimensionality of vectors.
    #[arg(short, long, default_value_t = 2)]
    pub dim: usize,
    /// Intrinsic dimension of a manifold.
    #[arg(long, default_value_t = 2)]
    pub intrinsic: usize,
    /// Length of generated sequences.
    #[arg(long, default_value_t = 32)]
    pub length: usize,
    /// Symbols of generated sequences.
    #[arg(long, default_value = "ACGT")]
    pub alphabet: String,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Also writes `<output>.sources.json` naming the source of each copy.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Output cardinality as a multiple of the input cardinality.
    #[arg(short, long)]
    pub multiplier: usize,
    /// Largest Euclidean distance of a copy from its source.
    #[arg(short, long)]
    pub epsilon: f64,
}

#[derive(Args, Debug, Clone)]
pub struct TreeOptions {
    /// unbalanced or balanced.
    #[arg(long, default_value = "unbalanced")]
    pub strategy: Strategy,
    /// Reorder the dataset depth-first so clusters are contiguous.
    #[arg(long)]
    pub permute: bool,
    /// Split only clusters with more points than this.
    #[arg(long, default_value_t = 1)]
    pub min_cardinality: usize,
    /// Split only clusters with a larger radius than this.
    #[arg(long, default_value_t = 0.0)]
    pub min_radius: f64,
    /// Split only clusters shallower than this.
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tree: TreeOptions,
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct Target {
    /// Number of neighbors.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Search radius.
    #[arg(short, long)]
    pub radius: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(short, long)]
    pub tree: PathBuf,
    /// The dataset the tree was built from.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub queries: PathBuf,
    /// repeated-rnn, breadth-sieve, depth-sieve, linear or auto. Radius
    /// queries use rho-NN search unless this is linear.
    #[arg(short, long, default_value = "depth-sieve")]
    pub algo: String,
    #[command(flatten)]
    pub target: Target,
    /// Depth of the cluster centers used as the tuning panel.
    #[arg(long, default_value_t = cakes_core::tuning::DEFAULT_DEPTH)]
    pub tune_depth: usize,
    /// Results file. Standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Leave elapsed_us out of the results.
    #[arg(long)]
    pub no_timing: bool,
    /// Threads answering queries.
    #[arg(short, long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct GroundTruthArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub queries: PathBuf,
    #[arg(short, long)]
    pub k: usize,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(short, long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub queries: PathBuf,
    /// Comma-separated values of k.
    #[arg(short, long, value_delimiter = ',', default_value = "1,10,100")]
    pub k: Vec<usize>,
    /// Comma-separated algorithms.
    #[arg(short, long, value_delimiter = ',', default_value = "repeated-rnn,breadth-sieve,depth-sieve,linear")]
    pub algos: Vec<String>,
    /// Comma-separated multipliers; each one augments the dataset and runs
    /// every algorithm again.
    #[arg(long, value_delimiter = ',')]
    pub augment: Vec<usize>,
    /// Noise radius for --augment.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Fill the mean_distance_count column.
    #[arg(long)]
    pub count_distances: bool,
    #[command(flatten)]
    pub tree: TreeOptions,
    /// Benchmark CSV. Standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the per-depth LFD table of each tree here.
    #[arg(long)]
    pub lfd_output: Option<PathBuf>,
    #[arg(short, long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct LfdReportArgs {
    #[arg(short, long)]
    pub tree: PathBuf,
    #[arg(short, long)]
    pub input: PathBuf,
    /// CSV file. Standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// 2 for bad input, 1 for anything that should not have happened.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::State(_) => 1,
        _ => 2,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        let msg = info
            .payload()
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| info.payload().downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        eprintln!("cakes: internal error: {}", one_line(&msg));
        std::process::exit(1);
    }));

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("cakes: {}", one_line(first));
            return ExitCode::from(2);
        }
    };

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cakes: {}", one_line(&e.to_string()));
            ExitCode::from(exit_code(&e))
        }
    }
}
