use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use cakes_core::dataset::{save_sequences, save_vectors};
use cakes_core::output::{QueryKind, ResultLine};
use cakes_core::recall::recall;
use cakes_core::search::{linear_knn, linear_rnn, rho_nn};
use cakes_core::tree::{read_header, LfdRow};
use cakes_core::{
    augment, auto_tune, synthetic, Algorithm, AnyDataset, AugmentSpec, Dataset, DistanceKind, Error, Format,
    GroundTruth, Metric, PartitionCriteria, Result, SearchReport, Tree,
};
use rayon::prelude::*;

use crate::dispatch::{dispatch, Job, Store};
use crate::{
    AugmentArgs, BenchArgs, BuildArgs, Cli, Command, GenArgs, GroundTruthArgs, LfdReportArgs, SearchArgs, TreeOptions,
};

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Context { seed: cli.seed, distance: cli.distance, format: cli.format };
    match cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Augment(a) => augment_cmd(&ctx, a),
        Command::Build(a) => build(&ctx, a),
        Command::Search(a) => search(&ctx, a),
        Command::GroundTruth(a) => ground_truth(&ctx, a),
        Command::Bench(a) => bench(&ctx, a),
        Command::LfdReport(a) => lfd_report(&ctx, a),
    }
}

struct Context {
    seed: u64,
    distance: Option<String>,
    format: Option<String>,
}

impl Context {
    fn format_for(&self, path: &Path) -> Result<Format> {
        if let Some(f) = &self.format {
            return f.parse();
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        match ext.as_str() {
            "csv" => Ok(Format::Csv),
            "bin" | "f32" | "raw" => Ok(Format::RawF32),
            "txt" | "seq" | "fa" | "fasta" => Ok(Format::Sequences),
            _ => Err(Error::Input(format!("cannot infer the format of {}; pass --format", path.display()))),
        }
    }

    fn load(&self, path: &Path) -> Result<AnyDataset> {
        let format = self.format_for(path)?;
        AnyDataset::load(path, format).map_err(|e| match e {
            Error::Io(io) => Error::Input(format!("{}: {io}", path.display())),
            other => other,
        })
    }

    /// The requested distance, or `fallback` when none was given.
    fn distance_or(&self, fallback: &str) -> Result<DistanceKind> {
        self.distance.as_deref().unwrap_or(fallback).parse()
    }

    fn criteria(opts: &TreeOptions) -> Result<PartitionCriteria> {
        if opts.min_radius.is_nan() || opts.min_radius < 0.0 {
            return Err(Error::Input(format!("--min-radius must be non-negative, got {}", opts.min_radius)));
        }
        Ok(PartitionCriteria {
            min_cardinality: opts.min_cardinality,
            min_radius: opts.min_radius,
            max_depth: opts.max_depth,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Input("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::State(format!("cannot start worker threads: {e}")))
}

fn gen(ctx: &Context, a: GenArgs) -> Result<()> {
    let format = ctx.format_for(&a.output)?;
    match a.kind.as_str() {
        "uniform-hypercube" | "manifold" => {
            let store = if a.kind == "manifold" {
                if a.intrinsic > a.dim {
                    return Err(Error::Input(format!(
                        "intrinsic dimension {} exceeds dimensionality {}",
                        a.intrinsic, a.dim
                    )));
                }
                synthetic::manifold(a.n, a.dim, a.intrinsic, ctx.seed)?
            } else {
                synthetic::uniform_hypercube(a.n, a.dim, ctx.seed)?
            };
            save_vectors(&store, &a.output, format)
        }
        "sequences" => {
            if format != Format::Sequences {
                return Err(Error::Input("sequences can only be written in the sequences format".into()));
            }
            let store = synthetic::random_sequences(a.n, a.length, a.alphabet.as_bytes(), ctx.seed)?;
            save_sequences(&store, &a.output)
        }
        other => {
            Err(Error::Input(format!("unknown kind {other:?}; expected uniform-hypercube, manifold or sequences")))
        }
    }
}

fn augment_cmd(ctx: &Context, a: AugmentArgs) -> Result<()> {
    let format = ctx.format_for(&a.output)?;
    let data = ctx.load(&a.input)?.into_vectors()?;
    let out = augment(&data, AugmentSpec { multiplier: a.multiplier, epsilon: a.epsilon, seed: ctx.seed })?;
    save_vectors(out.data.store(), &a.output, format)?;
    let mut sidecar = a.output.into_os_string();
    sidecar.push(".sources.json");
    std::fs::write(&sidecar, out.sources_json() + "\n")?;
    println!("{}", serde_json::json!({ "cardinality": out.data.cardinality() }));
    Ok(())
}

fn build(ctx: &Context, a: BuildArgs) -> Result<()> {
    let kind = ctx.distance_or("euclidean")?;
    let data = ctx.load(&a.input)?;
    let criteria = Context::criteria(&a.tree)?;
    let job = BuildJob { opts: a.tree, criteria, seed: ctx.seed, output: a.output };
    let summary = dispatch(kind, data, job)?;
    println!("{summary}");
    Ok(())
}

struct BuildJob {
    opts: TreeOptions,
    criteria: PartitionCriteria,
    seed: u64,
    output: PathBuf,
}

impl Job for BuildJob {
    type Output = serde_json::Value;

    fn run<S, M>(self, data: Dataset<S>, metric: M) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        let start = Instant::now();
        let mut tree = Tree::build(data, metric, self.criteria, self.opts.strategy, self.seed);
        if self.opts.permute {
            tree.depth_first_reorder()?;
        }
        let elapsed = start.elapsed();
        let mut w = create(&self.output)?;
        tree.write(&mut w)?;
        w.flush()?;
        let (leaves, mean_leaf_radius) = tree.metric_entropy();
        Ok(serde_json::json!({
            "clusters": tree.clusters().len(),
            "leaves": leaves,
            "mean_leaf_radius": mean_leaf_radius,
            "max_depth": tree.max_depth(),
            "build_ms": elapsed.as_secs_f64() * 1e3,
        }))
    }
}

/// Loads a tree file and its dataset, taking the distance from the tree
/// header unless one was given.
fn with_tree<J: TreeJob>(ctx: &Context, tree: &Path, input: &Path, job: J) -> Result<J::Output> {
    let header = read_header(&mut open(tree)?)?;
    let kind = ctx.distance_or(&header.distance)?;
    let data = ctx.load(input)?;
    dispatch(kind, data, LoadTree { path: tree.to_path_buf(), job })
}

trait TreeJob {
    type Output;

    fn run<S, M>(self, tree: Tree<S, M>) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static;
}

struct LoadTree<J> {
    path: PathBuf,
    job: J,
}

impl<J: TreeJob> Job for LoadTree<J> {
    type Output = J::Output;

    fn run<S, M>(self, data: Dataset<S>, metric: M) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        let tree = Tree::read(&mut open(&self.path)?, data, metric)?;
        self.job.run(tree)
    }
}

fn search(ctx: &Context, a: SearchArgs) -> Result<()> {
    let algo = match a.algo.as_str() {
        "auto" => None,
        name => Some(Algorithm::from_str(name)?),
    };
    let queries = ctx.load(&a.queries)?;
    let pool = pool(a.workers)?;
    let job = SearchJob { queries, algo, args: &a, pool };
    let lines = with_tree(ctx, &a.tree, &a.input, job)?;
    let mut w = sink(a.output.as_ref())?;
    for line in &lines {
        line.write(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

struct SearchJob<'a> {
    queries: AnyDataset,
    algo: Option<Algorithm>,
    args: &'a SearchArgs,
    pool: rayon::ThreadPool,
}

impl TreeJob for SearchJob<'_> {
    type Output = Vec<ResultLine>;

    fn run<S, M>(self, tree: Tree<S, M>) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        let queries = S::from_any(self.queries)?;
        check_queries(tree.data(), &queries)?;
        let timing = !self.args.no_timing;
        let Self { args, pool, .. } = self;

        if let Some(rho) = args.target.radius {
            let linear = self.algo == Some(Algorithm::Linear);
            let name = if linear { "linear" } else { "rnn" };
            let run = |q: &S::Point| {
                if linear {
                    linear_rnn(tree.data(), tree.metric(), q, rho)
                } else {
                    rho_nn(&tree, q, rho)
                }
            };
            return answer(&pool, &queries, run, |i, r| ResultLine::new(i, name, QueryKind::Rnn(rho), r, timing));
        }

        let k = args.target.k.expect("clap requires k or radius");
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k > tree.cardinality() {
            return Err(Error::KTooLarge { k, cardinality: tree.cardinality() });
        }
        let algo = match self.algo {
            Some(a) => a,
            None => {
                let tuning = auto_tune(&tree, k, args.tune_depth)?;
                eprintln!("{}", tuning.to_json());
                tuning.chosen
            }
        };
        answer(
            &pool,
            &queries,
            |q| algo.knn(&tree, q, k),
            |i, r| ResultLine::new(i, algo.name(), QueryKind::Knn(k), r, timing),
        )
    }
}

fn check_queries<S: Store>(data: &Dataset<S>, queries: &Dataset<S>) -> Result<()> {
    match (data.dimensionality(), queries.dimensionality()) {
        (Some(left), Some(right)) if left != right => Err(Error::DimensionMismatch { left, right }),
        _ => Ok(()),
    }
}

/// Runs every query on the pool and keeps results in query order.
fn answer<S, T>(
    pool: &rayon::ThreadPool,
    queries: &Dataset<S>,
    run: impl Fn(&S::Point) -> Result<SearchReport> + Sync,
    line: impl Fn(usize, &SearchReport) -> T + Sync,
) -> Result<Vec<T>>
where
    S: Store,
    T: Send,
{
    pool.install(|| {
        (0..queries.cardinality()).into_par_iter().map(|i| run(queries.get(i)).map(|r| line(i, &r))).collect()
    })
}

fn ground_truth(ctx: &Context, a: GroundTruthArgs) -> Result<()> {
    let kind = ctx.distance_or("euclidean")?;
    let data = ctx.load(&a.input)?;
    let queries = ctx.load(&a.queries)?;
    let pool = pool(a.workers)?;
    let truth = dispatch(kind, data, TruthJob { queries, k: a.k, pool })?;
    let mut w = create(&a.output)?;
    truth.write(&mut w)?;
    w.flush()?;
    Ok(())
}

struct TruthJob {
    queries: AnyDataset,
    k: usize,
    pool: rayon::ThreadPool,
}

impl Job for TruthJob {
    type Output = GroundTruth;

    fn run<S, M>(self, data: Dataset<S>, metric: M) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        let queries = S::from_any(self.queries)?;
        check_queries(&data, &queries)?;
        let neighbors = answer(&self.pool, &queries, |q| linear_knn(&data, &metric, q, self.k), |_, r| pairs(r))?;
        Ok(GroundTruth { k: self.k, distance: metric.name().to_string(), neighbors })
    }
}

fn pairs(r: &SearchReport) -> Vec<(usize, f64)> {
    r.neighbors.iter().map(|n| (n.index, n.distance)).collect()
}

fn bench(ctx: &Context, a: BenchArgs) -> Result<()> {
    let kind = ctx.distance_or("euclidean")?;
    let algos = a.algos.iter().map(|s| s.parse()).collect::<Result<Vec<Algorithm>>>()?;
    if a.k.is_empty() || algos.is_empty() {
        return Err(Error::Input("--k and --algos must not be empty".into()));
    }
    let criteria = Context::criteria(&a.tree)?;
    let base = ctx.load(&a.input)?;
    let queries = ctx.load(&a.queries)?;

    let datasets = if a.augment.is_empty() {
        vec![base]
    } else {
        let vectors = base.into_vectors()?;
        a.augment
            .iter()
            .map(|&m| {
                let spec = AugmentSpec { multiplier: m, epsilon: a.epsilon, seed: ctx.seed };
                augment(&vectors, spec).map(|out| AnyDataset::Vectors(out.data))
            })
            .collect::<Result<Vec<_>>>()?
    };

    let pool = pool(a.workers)?;
    let mut out = sink(a.output.as_ref())?;
    writeln!(out, "{}", BenchRow::HEADER)?;
    let mut lfd = a.lfd_output.as_ref().map(|p| create(p)).transpose()?;
    if let Some(w) = lfd.as_mut() {
        writeln!(w, "cardinality,{}", LfdRow::CSV_HEADER)?;
    }
    for data in datasets {
        let job = BenchJob {
            queries: queries.clone(),
            algos: &algos,
            ks: &a.k,
            opts: &a.tree,
            criteria,
            seed: ctx.seed,
            count: a.count_distances,
            pool: &pool,
        };
        let (rows, lfd_rows) = dispatch(kind, data, job)?;
        for row in rows {
            writeln!(out, "{}", row.to_csv())?;
        }
        if let Some(w) = lfd.as_mut() {
            for (n, row) in lfd_rows {
                writeln!(w, "{n},{}", row.to_csv())?;
            }
        }
    }
    out.flush()?;
    if let Some(mut w) = lfd {
        w.flush()?;
    }
    Ok(())
}

struct BenchRow {
    dataset: String,
    distance: &'static str,
    strategy: &'static str,
    permuted: bool,
    algorithm: Algorithm,
    k: usize,
    cardinality: usize,
    throughput: f64,
    recall: f64,
    distance_count: Option<f64>,
}

impl BenchRow {
    const HEADER: &'static str =
        "dataset,distance,strategy,permuted,algorithm,k,cardinality,throughput_qps,mean_recall,mean_distance_count";

    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{:.6},{}",
            self.dataset,
            self.distance,
            self.strategy,
            self.permuted,
            self.algorithm.name(),
            self.k,
            self.cardinality,
            self.throughput,
            self.recall,
            self.distance_count.map_or_else(String::new, |c| format!("{c:.3}")),
        )
    }
}

struct BenchJob<'a> {
    queries: AnyDataset,
    algos: &'a [Algorithm],
    ks: &'a [usize],
    opts: &'a TreeOptions,
    criteria: PartitionCriteria,
    seed: u64,
    count: bool,
    pool: &'a rayon::ThreadPool,
}

impl Job for BenchJob<'_> {
    type Output = (Vec<BenchRow>, Vec<(usize, LfdRow)>);

    fn run<S, M>(self, data: Dataset<S>, metric: M) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        let queries = S::from_any(self.queries)?;
        check_queries(&data, &queries)?;
        let n = data.cardinality();
        for &k in self.ks {
            if k == 0 {
                return Err(Error::ZeroK);
            }
            if k > n {
                return Err(Error::KTooLarge { k, cardinality: n });
            }
        }
        let name = data.name().to_string();
        let mut tree = Tree::build(data, metric, self.criteria, self.opts.strategy, self.seed);
        if self.opts.permute {
            tree.depth_first_reorder()?;
        }

        let kmax = *self.ks.iter().max().expect("non-empty");
        let truth = answer(self.pool, &queries, |q| linear_knn(tree.data(), &metric, q, kmax), |_, r| pairs(r))?;

        let mut rows = Vec::new();
        for &k in self.ks {
            for &algo in self.algos {
                let start = Instant::now();
                let reports =
                    answer(self.pool, &queries, |q| algo.knn(&tree, q, k), |_, r| (pairs(r), r.distance_count))?;
                let secs = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
                let m = reports.len() as f64;
                let recall = reports.iter().zip(&truth).map(|((got, _), t)| recall(got, t, k)).sum::<f64>() / m;
                let count = reports.iter().map(|(_, c)| *c as f64).sum::<f64>() / m;
                rows.push(BenchRow {
                    dataset: name.clone(),
                    distance: metric.name(),
                    strategy: tree.strategy().name(),
                    permuted: tree.is_permuted(),
                    algorithm: algo,
                    k,
                    cardinality: n,
                    throughput: m / secs,
                    recall,
                    distance_count: self.count.then_some(count),
                });
            }
        }
        let lfd = tree.lfd_report().into_iter().map(|r| (n, r)).collect();
        Ok((rows, lfd))
    }
}

fn lfd_report(ctx: &Context, a: LfdReportArgs) -> Result<()> {
    let rows = with_tree(ctx, &a.tree, &a.input, LfdJob)?;
    let mut w = sink(a.output.as_ref())?;
    writeln!(w, "{}", LfdRow::CSV_HEADER)?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    w.flush()?;
    Ok(())
}

struct LfdJob;

impl TreeJob for LfdJob {
    type Output = Vec<LfdRow>;

    fn run<S, M>(self, tree: Tree<S, M>) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static,
    {
        Ok(tree.lfd_report())
    }
}
