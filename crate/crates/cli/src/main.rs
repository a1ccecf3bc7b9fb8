//! `fgim`: build, merge and evaluate graph-based ANN indexes.
//!
//! Reports are JSON on stdout; artifacts go to the files named by flags.
//! Exit status is 0 on success, 2 for bad arguments or inputs, 1 otherwise.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use fgim_core::build::{build_index, BuildParams, BuildVariant, HnswParams, VamanaParams};
use fgim_core::dataset::{Dataset, PointSet};
use fgim_core::eval::{compute_ground_truth, measure_search, write_csv, EvalReport};
use fgim_core::idmap::{IdMap, IdMapSpec};
use fgim_core::io::{
    gen_synthetic, load_index, read_fvecs, read_ivecs, save_index, write_fvecs, write_ivecs, Distribution,
};
use fgim_core::merge::{fgim_merge, MergeInput, MergeParams, MergeSource, OutputKind};
use fgim_core::{Error, Metric};

#[derive(Parser)]
#[command(name = "fgim", version, about = "Build, merge and evaluate graph-based ANN indexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as .fvecs.
    Gen(GenArgs),
    /// Build an index over a dataset.
    Build(BuildArgs),
    /// Merge two or more indexes into one.
    Merge(MergeArgs),
    /// Measure recall, throughput and distance counts of an index.
    Eval(EvalArgs),
    /// Compute exact nearest neighbors of queries as .ivecs.
    Groundtruth(GroundtruthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Cosine,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Cosine => Metric::Cosine,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Uniform,
    Gaussian,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    distribution: DistributionArg,
    /// Mixture components for the gaussian distribution.
    #[arg(long, default_value_t = 10)]
    clusters: usize,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Hnsw,
    Vamana,
}

#[derive(Args)]
struct BuildArgs {
    /// Base vectors (.fvecs).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// HNSW: links per upper layer (base layer gets twice as many).
    #[arg(long, default_value_t = 16)]
    m: usize,
    /// HNSW: construction pool size.
    #[arg(long, default_value_t = 200)]
    ef_construction: usize,
    /// Vamana: degree bound.
    #[arg(long, default_value_t = 32)]
    r: usize,
    /// Vamana: construction pool size.
    #[arg(long, default_value_t = 100)]
    l: usize,
    /// Vamana: pruning slack.
    #[arg(long, default_value_t = 1.2)]
    alpha: f32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MergeArgs {
    /// Input index; repeat once per input, in the same order as --data.
    #[arg(long = "index", required = true)]
    indexes: Vec<PathBuf>,
    /// Vectors of the matching --index.
    #[arg(long = "data", required = true)]
    data: Vec<PathBuf>,
    /// JSON id map (per input: offset, invalid ids/ranges, all_invalid).
    /// Defaults to all vertices valid, inputs laid out back to back.
    #[arg(long)]
    id_map: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed cross-query pool size instead of the minimum one.
    #[arg(long)]
    cross_pool: Option<usize>,
    /// Skip the indegree repair after each refinement sweep.
    #[arg(long)]
    no_repair: bool,
    /// Rebuild HNSW upper layers on top of the merged graph.
    #[arg(long)]
    hierarchical: bool,
    #[arg(long, default_value_t = 200)]
    ef_construction: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Merged index.
    #[arg(long)]
    out: PathBuf,
    /// Merged vectors in global id order (.fvecs).
    #[arg(long)]
    out_data: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    index: PathBuf,
    /// Vectors the index was built over (.fvecs).
    #[arg(long)]
    data: PathBuf,
    /// Query vectors (.fvecs).
    #[arg(long)]
    queries: PathBuf,
    /// Ground truth (.ivecs).
    #[arg(long)]
    truth: PathBuf,
    /// Pool sizes to measure.
    #[arg(long, value_delimiter = ',', default_value = "10,20,50,100,200,400")]
    l_grid: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Also write (l, recall, qps, mean_ndc) rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GroundtruthArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Build(a) => build(a),
        Command::Merge(a) => merge(a),
        Command::Eval(a) => eval(a),
        Command::Groundtruth(a) => groundtruth(a),
    };
    match result {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fgim: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn gen(a: GenArgs) -> Result<Value, Error> {
    let dist = match a.distribution {
        DistributionArg::Uniform => Distribution::UniformCube,
        DistributionArg::Gaussian => Distribution::GaussianMixture { clusters: a.clusters },
    };
    let data = gen_synthetic(a.n, a.dim, a.seed, dist, a.metric.into());
    write_fvecs(&a.out, &data)?;
    Ok(serde_json::json!({ "vectors": data.len(), "dim": a.dim, "out": a.out }))
}

fn build(a: BuildArgs) -> Result<Value, Error> {
    let data = read_fvecs(&a.data, a.metric.into())?;
    let variant = match a.variant {
        VariantArg::Hnsw => BuildVariant::HnswLike(HnswParams { m: a.m, ef_construction: a.ef_construction }),
        VariantArg::Vamana => BuildVariant::VamanaLike(VamanaParams { r: a.r, l: a.l, alpha: a.alpha }),
    };
    let params = BuildParams { variant, seed: a.seed, threads: a.threads };
    let t = Instant::now();
    let graph = build_index(&data, &params)?;
    let secs = t.elapsed().as_secs_f64();
    save_index(&graph, &a.out)?;
    Ok(to_value(&EvalReport::new(&graph, 0, Vec::new(), Some(secs))))
}

fn merge(a: MergeArgs) -> Result<Value, Error> {
    if a.indexes.len() != a.data.len() {
        return Err(Error::Param(format!(
            "{} --index but {} --data arguments",
            a.indexes.len(),
            a.data.len()
        )));
    }
    let graphs = a.indexes.iter().map(load_index).collect::<Result<Vec<_>, _>>()?;
    let datasets = graphs
        .iter()
        .zip(&a.data)
        .map(|(g, p)| read_fvecs(p, g.metric()))
        .collect::<Result<Vec<_>, _>>()?;
    let sizes: Vec<usize> = datasets.iter().map(Dataset::len).collect();
    let id_map = match &a.id_map {
        Some(p) => IdMap::from_spec(&read_spec(p)?, &sizes)?,
        None => IdMap::sequential(&sizes),
    };
    let sources = graphs.iter().zip(&datasets).map(|(g, d)| MergeSource::new(g, d)).collect();
    let input = MergeInput::new(sources, id_map)?;
    let params = MergeParams {
        k: a.k,
        max_iterations: a.max_iterations,
        seed: a.seed,
        cross_pool_override: a.cross_pool,
        indegree_repair: !a.no_repair,
        output: if a.hierarchical { OutputKind::Hierarchical } else { OutputKind::Flat },
        ef_construction: a.ef_construction,
        threads: a.threads,
    };
    let out = fgim_merge(&input, &params)?;
    save_index(&out.graph, &a.out)?;
    write_fvecs(&a.out_data, &out.data)?;
    let mut report = to_value(&EvalReport::new(&out.graph, 0, Vec::new(), Some(out.report.total_seconds)));
    report["merge"] = to_value(&out.report);
    Ok(report)
}

fn read_spec(path: &Path) -> Result<IdMapSpec, Error> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn eval(a: EvalArgs) -> Result<Value, Error> {
    let graph = load_index(&a.index)?;
    let data = read_fvecs(&a.data, graph.metric())?;
    let queries = read_fvecs(&a.queries, graph.metric())?;
    let truth = read_ivecs(&a.truth)?;
    if data.len() != graph.num_vertices() {
        return Err(Error::Param("dataset size does not match the index".into()));
    }
    let points = measure_search(&graph, &data, &queries, &truth, &a.l_grid, a.k)?;
    if let Some(p) = &a.csv {
        write_csv(&points, BufWriter::new(File::create(p)?))?;
    }
    Ok(to_value(&EvalReport::new(&graph, a.k, points, None)))
}

fn groundtruth(a: GroundtruthArgs) -> Result<Value, Error> {
    let data = read_fvecs(&a.data, a.metric.into())?;
    let queries = read_fvecs(&a.queries, a.metric.into())?;
    let truth = compute_ground_truth(&data, &queries, a.k, a.threads)?;
    write_ivecs(&a.out, &truth.ids)?;
    Ok(serde_json::json!({ "queries": truth.len(), "k": a.k, "out": a.out }))
}
