//! Command-line harness: graph generation, partitioning, simulation
//! campaigns, bound evaluation, threshold sweeps, timing benchmarks, and
//! multi-path experiments, all seeded and emitting digest-stamped files.

mod config;
mod runner;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pathloc::bounds::{
    ClosedFormBound, ThetaTable, bound_destination_fine, bound_destination_super,
    bound_hamming_fine, bound_hamming_super, rgg_closed_form,
};
use pathloc::digest::digest_hex;
use pathloc::error::{Error, Result};
use pathloc::graph::{DistanceMode, Graph, RggConfig, load_edge_list, random_walk_path};
use pathloc::partition::{Partitioned, coarse_hop_distances, max_distance_vector};
use pathloc::signal::{NoiseModel, synthesize_observations};

use config::{DecoderKind, ExperimentConfig, GraphSource, PartitionSpec, SweepTarget};
use runner::{
    MULTIPATH_CSV_HEADER, SWEEP_CSV_HEADER, SimulationSetup, benchmark, bisect_threshold,
    multipath_point, run_trials,
};

#[derive(Parser)]
#[command(
    name = "pathloc",
    version,
    about = "Localize a moving agent's path on a graph from noisy per-node observations",
    long_about = "Localize a moving agent's path on a graph from noisy per-node observations.\n\
        Decoders: per-step argmax (naive), exact path-constrained Viterbi, and a fast\n\
        multiscale variant on a partitioned (super-)graph, together with computable\n\
        upper bounds on the multiscale decoder's expected Hamming and destination\n\
        errors. All commands are deterministic under --seed; every output file and CSV\n\
        row is stamped with a digest of the configuration that produced it."
)]
struct Cli {
    /// Master seed for all stochastic components.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory where output files are written.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// JSON experiment configuration (simulate/sweep/multipath); replaces
    /// the corresponding command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph (random geometric or from an edge list) and write
    /// its JSON document.
    Generate {
        #[command(subcommand)]
        source: GenerateSource,
    },
    /// Partition a graph and write an importable "node cluster" file plus a
    /// summary.
    Partition {
        /// Graph JSON document.
        #[arg(long)]
        graph: PathBuf,
        #[command(subcommand)]
        method: PartitionMethod,
    },
    /// Run decoding trials and write one CSV row per trial.
    Simulate(SimulateArgs),
    /// Evaluate an error bound for a reference walk and write the report.
    Bound(BoundArgs),
    /// Find, per partition, the threshold snr at which the target metric is
    /// met, writing every evaluated sweep point as a CSV row.
    Sweep(SweepArgs),
    /// Time exact vs multiscale decoding on one graph/partition pair.
    Benchmark(BenchmarkArgs),
    /// Sequential multi-path decoding error over a (k, snr) grid.
    Multipath(MultipathArgs),
}

#[derive(Subcommand)]
enum GenerateSource {
    /// Random geometric graph on the unit square.
    Rgg {
        /// Expected node count of the Poisson point process.
        #[arg(long, default_value_t = 1000.0)]
        lambda: f64,
        /// Connection radius.
        #[arg(long, short = 'r')]
        radius: f64,
        /// Draw exactly this many nodes instead of a Poisson count.
        #[arg(long)]
        fixed_n: Option<usize>,
        /// Output file (default: `<out-dir>/graph-<digest>.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ingest a "u v" edge-list file (comments start with '#'; ids are
    /// relabeled densely; duplicates and self-loops dropped).
    EdgeList {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PartitionMethod {
    /// B x B square tessellation of the unit-square layout.
    Square {
        #[arg(long, short = 'b')]
        b: u32,
    },
    /// Iterative hub removal until components are small.
    HubShatter {
        /// Hubs removed per round (default: 0.5% of nodes).
        #[arg(long)]
        hubs_per_round: Option<usize>,
        /// Component size at which shattering stops (default: 1% of nodes).
        #[arg(long)]
        max_cluster_size: Option<usize>,
    },
    /// Import a "node cluster" assignment file.
    Import {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Partition file (required by the multiscale decoder).
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DecoderArg::Multiscale)]
    decoder: DecoderArg,
    #[arg(long, short = 't', default_value_t = 100)]
    t: usize,
    /// Signal-to-noise ratio mu/sigma (sigma is fixed to 1).
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 50)]
    trials: u64,
    /// Also write trial 0's chain as CSV plus a JSON summary.
    #[arg(long)]
    dump_chain: bool,
    /// Also write trial 0's observation matrix as a binary dump.
    #[arg(long)]
    dump_observations: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Naive,
    Exact,
    Multiscale,
}

impl From<DecoderArg> for DecoderKind {
    fn from(value: DecoderArg) -> DecoderKind {
        match value {
            DecoderArg::Naive => DecoderKind::Naive,
            DecoderArg::Exact => DecoderKind::Exact,
            DecoderArg::Multiscale => DecoderKind::Multiscale,
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, value_enum)]
    kind: BoundKindArg,
    #[arg(long, short = 't', default_value_t = 100)]
    t: usize,
    #[arg(long)]
    snr: f64,
    /// Seed of the reference walk the bound is evaluated for.
    #[arg(long, default_value_t = 7)]
    truth_seed: u64,
    /// Coarse destination metric (destination-super).
    #[arg(long, value_enum, default_value_t = CoarseMetric::Hop)]
    coarse_metric: CoarseMetric,
    /// Fine destination metric (destination-fine).
    #[arg(long, value_enum, default_value_t = FineMetric::Euclidean)]
    fine_metric: FineMetric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundKindArg {
    HammingSuper,
    HammingFine,
    DestinationSuper,
    DestinationFine,
    RggClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoarseMetric {
    /// Hop distance in the super-graph.
    Hop,
    /// Euclidean distance between square centers (square partitions only).
    SquareCenters,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FineMetric {
    Euclidean,
    Hop,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Square partitions to sweep, as squares-per-side values.
    #[arg(long, value_delimiter = ',')]
    b_list: Vec<u32>,
    /// Partition files to sweep (alternative to --b-list).
    #[arg(long, value_delimiter = ',')]
    partition_files: Vec<PathBuf>,
    /// Target metric: "hamming:0.05" (normalized) or "destination:0.01".
    #[arg(long, default_value = "hamming:0.05")]
    target: String,
    #[arg(long, short = 't', default_value_t = 100)]
    t: usize,
    #[arg(long, default_value_t = 50)]
    trials: u64,
    #[arg(long, default_value_t = 1.0)]
    snr_min: f64,
    #[arg(long, default_value_t = 12.0)]
    snr_max: f64,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, short = 't', default_value_t = 100)]
    t: usize,
    /// Timed repetitions after one warmup.
    #[arg(long, default_value_t = 9)]
    repeats: usize,
}

#[derive(Args)]
struct MultipathArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Square partition side used when no partition file is given.
    #[arg(long, short = 'b', default_value_t = 30)]
    b: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 5])]
    k_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [4.0, 5.0, 6.0])]
    snr_list: Vec<f64>,
    #[arg(long, short = 't', default_value_t = 100)]
    t: usize,
    #[arg(long, default_value_t = 20)]
    trials: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads
        && let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
    {
        eprintln!("error: could not configure {threads} threads: {err}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 = validation, 3 = runtime/numeric, 4 = budget/resource.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::EmptyGraph
        | Error::InvalidInput(_)
        | Error::LayoutMissing
        | Error::DimensionMismatch(_) => 2,
        Error::BudgetExceeded(_) | Error::VarianceGuard(_) => 4,
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<()> {
    fs::create_dir_all(&cli.out_dir)?;
    match &cli.command {
        Command::Generate { source } => cmd_generate(&cli, source),
        Command::Partition { graph, method } => cmd_partition(&cli, graph, method),
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Bound(args) => cmd_bound(&cli, args),
        Command::Sweep(args) => cmd_sweep(&cli, args),
        Command::Benchmark(args) => cmd_benchmark(&cli, args),
        Command::Multipath(args) => cmd_multipath(&cli, args),
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::from_json(&fs::read_to_string(path)?)
}

fn read_partition(path: &Path, graph: &Graph) -> Result<Partitioned> {
    pathloc::partition::import_partition(&fs::read_to_string(path)?, graph)
}

fn out_path(cli: &Cli, name: &str) -> PathBuf {
    cli.out_dir.join(name)
}

fn cmd_generate(cli: &Cli, source: &GenerateSource) -> Result<()> {
    match source {
        GenerateSource::Rgg {
            lambda,
            radius,
            fixed_n,
            out,
        } => {
            let config = RggConfig {
                lambda: *lambda,
                radius: *radius,
                seed: cli.seed,
                fixed_n: *fixed_n,
            };
            let graph = pathloc::graph::generate_rgg(&config)?;
            let json = graph.to_json();
            let digest = digest_hex(json.as_bytes());
            let path = out
                .clone()
                .unwrap_or_else(|| out_path(cli, &format!("graph-{digest}.json")));
            fs::write(&path, &json)?;
            println!(
                "graph: {} nodes, {} edges -> {}",
                graph.node_count(),
                graph.edge_count(),
                path.display()
            );
        }
        GenerateSource::EdgeList { input, out } => {
            let loaded = load_edge_list(&fs::read_to_string(input)?)?;
            let json = loaded.graph.to_json();
            let digest = digest_hex(json.as_bytes());
            let path = out
                .clone()
                .unwrap_or_else(|| out_path(cli, &format!("graph-{digest}.json")));
            fs::write(&path, &json)?;
            println!(
                "graph: {} nodes, {} edges ({} duplicate edges and {} self-loops dropped) -> {}",
                loaded.graph.node_count(),
                loaded.graph.edge_count(),
                loaded.duplicate_edges_dropped,
                loaded.self_loops_dropped,
                path.display()
            );
        }
    }
    Ok(())
}

fn cmd_partition(cli: &Cli, graph_path: &Path, method: &PartitionMethod) -> Result<()> {
    let graph = read_graph(graph_path)?;
    let spec = match method {
        PartitionMethod::Square { b } => PartitionSpec::Square {
            squares_per_side: *b,
        },
        PartitionMethod::HubShatter {
            hubs_per_round,
            max_cluster_size,
        } => PartitionSpec::HubShatter {
            hubs_per_round: *hubs_per_round,
            max_cluster_size: *max_cluster_size,
        },
        PartitionMethod::Import { file } => PartitionSpec::Import { path: file.clone() },
    };
    let started = Instant::now();
    let parts = spec.build(&graph)?;
    let partition_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(warning) = &parts.warning {
        eprintln!("warning: {warning}");
    }
    let text = parts.partition.to_text();
    let digest = digest_hex(text.as_bytes());
    let path = out_path(cli, &format!("partition-{digest}.txt"));
    fs::write(&path, &text)?;

    let sizes = parts.partition.cluster_sizes();
    let summary = serde_json::json!({
        "clusters": parts.partition.cluster_count(),
        "maxClusterSize": parts.partition.max_cluster_size(),
        "superEdges": parts.supergraph.super_edge_count(),
        "selfLoops": (0..parts.partition.cluster_count() as u32)
            .filter(|&c| parts.supergraph.self_loop(c)).count(),
        "clusterSizeHistogramHead": {
            "1": sizes.iter().filter(|&&s| s == 1).count(),
            "2to10": sizes.iter().filter(|&&s| (2..=10).contains(&s)).count(),
            "11plus": sizes.iter().filter(|&&s| s > 10).count(),
        },
        "partitionMs": partition_ms,
        "warning": parts.warning,
        "configDigest": digest,
    });
    let summary_path = out_path(cli, &format!("partition-{digest}.summary.json"));
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    println!(
        "partition: {} clusters (max size {}) -> {}",
        parts.partition.cluster_count(),
        parts.partition.max_cluster_size(),
        path.display()
    );
    Ok(())
}

fn simulate_config(cli: &Cli, args: &SimulateArgs) -> Result<ExperimentConfig> {
    if let Some(path) = &cli.config {
        return ExperimentConfig::from_file(path);
    }
    let graph = args
        .graph
        .clone()
        .ok_or_else(|| Error::InvalidInput("--graph (or --config) is required".into()))?;
    let snr = args
        .snr
        .ok_or_else(|| Error::InvalidInput("--snr (or --config) is required".into()))?;
    Ok(ExperimentConfig {
        graph: GraphSource::GraphFile { path: graph },
        partition: args
            .partition
            .clone()
            .map(|path| PartitionSpec::Import { path }),
        partition_list: Vec::new(),
        t: args.t,
        trials: args.trials,
        snr_grid: vec![snr],
        seed: cli.seed,
        target: None,
        k_list: Vec::new(),
        decoder: args.decoder.into(),
    })
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    let config = simulate_config(cli, args)?;
    let digest = config.digest();
    let graph = config.graph.load()?;
    let partitioned = match &config.partition {
        Some(spec) => Some(spec.build(&graph)?),
        None => None,
    };
    if config.decoder == DecoderKind::Multiscale && partitioned.is_none() {
        return Err(Error::InvalidInput(
            "the multiscale decoder needs --partition".into(),
        ));
    }

    let mut csv = String::from(
        "trial,snr,hamming,hammingNormalized,hammingCoarse,destination,sumSignal,connected,decodeMs,configDigest\n",
    );
    for &snr in &config.snr_grid {
        let noise = NoiseModel::new(snr, 1.0)?;
        let setup = SimulationSetup {
            graph: &graph,
            partitioned: partitioned.as_ref(),
            decoder: config.decoder,
            t_len: config.t,
            noise,
            seed: config.seed,
        };
        let records = run_trials(&setup, config.trials)?;
        for record in &records {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                record.trial,
                snr,
                record.hamming,
                record.hamming as f64 / config.t as f64,
                record
                    .hamming_coarse
                    .map(|h| h.to_string())
                    .unwrap_or_default(),
                record
                    .destination
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                record.sum_signal,
                record.connected,
                record.decode_ms,
                digest
            ));
        }
        let mean: f64 = records.iter().map(|r| r.hamming as f64).sum::<f64>()
            / records.len() as f64
            / config.t as f64;
        println!(
            "snr {snr}: mean normalized Hamming {mean:.4} over {} trials",
            config.trials
        );

        if args.dump_chain || args.dump_observations {
            dump_first_trial(
                cli,
                &config,
                &graph,
                partitioned.as_ref(),
                snr,
                &digest,
                args,
            )?;
        }
    }
    let path = out_path(cli, &format!("simulate-{digest}.csv"));
    fs::write(&path, csv)?;
    println!("rows -> {}", path.display());
    Ok(())
}

fn dump_first_trial(
    cli: &Cli,
    config: &ExperimentConfig,
    graph: &Graph,
    partitioned: Option<&Partitioned>,
    snr: f64,
    digest: &str,
    args: &SimulateArgs,
) -> Result<()> {
    let noise = NoiseModel::new(snr, 1.0)?;
    let walk_seed = config
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(1);
    let truth = random_walk_path(graph, config.t, walk_seed, None)?;
    let obs = synthesize_observations(
        graph,
        std::slice::from_ref(&truth),
        noise,
        walk_seed ^ 0xABCD_EF01_2345_6789,
    )?;
    if args.dump_observations {
        let path = out_path(cli, &format!("observations-{digest}-trial0.bin"));
        let mut file = fs::File::create(&path)?;
        obs.write_dump(&mut file)?;
        println!("observations -> {}", path.display());
    }
    if args.dump_chain {
        let started = Instant::now();
        let chain = match config.decoder {
            DecoderKind::Naive => pathloc::decoder::naive_argmax_chain(&obs, graph),
            DecoderKind::Exact => {
                pathloc::decoder::viterbi_max_sum_path(graph, &obs, pathloc::decoder::Level::Fine)?
            }
            DecoderKind::Multiscale => {
                let parts = partitioned.expect("validated above");
                pathloc::decoder::multiscale_viterbi(
                    graph,
                    &parts.partition,
                    &parts.supergraph,
                    &obs,
                )?
                .fine
            }
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let mut rows = String::from("t,id\n");
        for (t, &id) in chain.ids.iter().enumerate() {
            rows.push_str(&format!("{t},{id}\n"));
        }
        let csv_path = out_path(cli, &format!("chain-{digest}-trial0.csv"));
        fs::write(&csv_path, rows)?;
        let hamming = pathloc::decoder::hamming_distance(&chain.ids, &truth.nodes)?;
        let destination = if graph.layout().is_some() {
            Some(pathloc::decoder::destination_distance(
                &chain.ids,
                truth.last(),
                graph,
                DistanceMode::Euclidean,
            )?)
        } else {
            None
        };
        let summary = serde_json::json!({
            "sumSignal": chain.sum_signal,
            "connected": chain.connected,
            "hamming": hamming,
            "destination": destination,
            "wallTimeMs": wall_ms,
        });
        let json_path = out_path(cli, &format!("chain-{digest}-trial0.json"));
        fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
        println!("chain -> {} / {}", csv_path.display(), json_path.display());
    }
    Ok(())
}

fn cmd_bound(cli: &Cli, args: &BoundArgs) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let parts = read_partition(&args.partition, &graph)?;
    let noise = NoiseModel::new(args.snr, 1.0)?;
    let truth = random_walk_path(&graph, args.t, args.truth_seed, None)?;
    let projected = parts.partition.project(&truth);
    let table = ThetaTable::for_supergraph(noise, &parts.supergraph);
    let final_cluster = *projected.last().unwrap();

    let report = match args.kind {
        BoundKindArg::HammingSuper => bound_hamming_super(&parts.supergraph, &projected, &table)?,
        BoundKindArg::HammingFine => bound_hamming_fine(&parts.supergraph, &projected, &table)?,
        BoundKindArg::DestinationSuper => {
            let dist = match args.coarse_metric {
                CoarseMetric::Hop => coarse_hop_distances(&parts.supergraph, final_cluster)?,
                CoarseMetric::SquareCenters => parts
                    .partition
                    .grid()
                    .ok_or_else(|| {
                        Error::InvalidInput("square-centers metric needs a square partition".into())
                    })?
                    .center_distances_from(final_cluster),
            };
            bound_destination_super(&parts.supergraph, &projected, &table, &dist)?
        }
        BoundKindArg::DestinationFine => {
            let mode = match args.fine_metric {
                FineMetric::Euclidean => DistanceMode::Euclidean,
                FineMetric::Hop => DistanceMode::Hop,
            };
            let dmax = max_distance_vector(&graph, &parts.partition, final_cluster, mode)?;
            bound_destination_fine(&parts.supergraph, &projected, &table, &dmax)?
        }
        BoundKindArg::RggClosedForm => {
            let s_m = parts.partition.max_cluster_size();
            let payload = match rgg_closed_form(&noise, s_m, args.t) {
                ClosedFormBound::Bound(value) => serde_json::json!({
                    "kind": "rggClosedForm",
                    "value": value,
                    "normalizedValue": value / args.t as f64,
                    "maxClusterSize": s_m,
                    "thetaParams": {"mu": args.snr, "sigma": 1.0, "s": args.snr / 2.0},
                }),
                ClosedFormBound::ConditionViolated { snr, threshold } => serde_json::json!({
                    "kind": "rggClosedForm",
                    "conditionViolated": true,
                    "snr": snr,
                    "thresholdSnr": threshold,
                    "maxClusterSize": s_m,
                }),
            };
            let text = serde_json::to_string_pretty(&payload)?;
            let path = out_path(cli, &format!("bound-{}.json", digest_hex(text.as_bytes())));
            fs::write(&path, &text)?;
            println!("{text}");
            println!("-> {}", path.display());
            return Ok(());
        }
    };
    let text = report.to_json();
    let path = out_path(cli, &format!("bound-{}.json", report.config_digest));
    fs::write(&path, &text)?;
    println!("{text}");
    println!("-> {}", path.display());
    Ok(())
}

fn parse_target(text: &str) -> Result<SweepTarget> {
    let (name, value) = text.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!(
            "target '{text}' must look like hamming:0.05 or destination:0.01"
        ))
    })?;
    let value: f64 = value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad target value in '{text}'")))?;
    match name {
        "hamming" => Ok(SweepTarget::Hamming(value)),
        "destination" => Ok(SweepTarget::Destination(value)),
        _ => Err(Error::InvalidInput(format!(
            "unknown target metric '{name}'"
        ))),
    }
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let config = if let Some(path) = &cli.config {
        ExperimentConfig::from_file(path)?
    } else {
        let graph = args
            .graph
            .clone()
            .ok_or_else(|| Error::InvalidInput("--graph (or --config) is required".into()))?;
        let mut partition_list: Vec<PartitionSpec> = args
            .b_list
            .iter()
            .map(|&b| PartitionSpec::Square {
                squares_per_side: b,
            })
            .collect();
        partition_list.extend(
            args.partition_files
                .iter()
                .map(|p| PartitionSpec::Import { path: p.clone() }),
        );
        if partition_list.is_empty() {
            return Err(Error::InvalidInput(
                "sweep needs --b-list or --partition-files".into(),
            ));
        }
        ExperimentConfig {
            graph: GraphSource::GraphFile { path: graph },
            partition: None,
            partition_list,
            t: args.t,
            trials: args.trials,
            snr_grid: vec![args.snr_min, args.snr_max],
            seed: cli.seed,
            target: Some(parse_target(&args.target)?),
            k_list: Vec::new(),
            decoder: DecoderKind::Multiscale,
        }
    };
    let digest = config.digest();
    let target = config
        .target
        .ok_or_else(|| Error::InvalidInput("sweep config needs a target".into()))?;
    let (snr_lo, snr_hi) = match config.snr_grid.as_slice() {
        [lo, hi] => (*lo, *hi),
        _ => (1.0, 12.0),
    };
    let graph = config.graph.load()?;

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    let mut thresholds = Vec::new();
    for spec in &config.partition_list {
        let parts = spec.build(&graph)?;
        if let Some(warning) = &parts.warning {
            eprintln!("warning: {warning}");
        }
        let mut points = Vec::new();
        let result = bisect_threshold(
            &config,
            &graph,
            &parts,
            &target,
            snr_lo,
            snr_hi,
            &mut points,
        )?;
        points.sort_by(|a, b| a.snr.total_cmp(&b.snr));
        for point in &points {
            csv.push_str(&point.csv_row(&digest));
            csv.push('\n');
        }
        println!(
            "m {}: simulated threshold snr {:.2}, bound-implied {}",
            result.m,
            result.simulated_threshold_snr,
            result
                .bound_threshold_snr
                .map(|s| format!("{s:.2}"))
                .unwrap_or_else(|| "not reached on bracket".into()),
        );
        thresholds.push(result);
    }
    let csv_path = out_path(cli, &format!("sweep-{digest}.csv"));
    fs::write(&csv_path, csv)?;
    let thr_path = out_path(cli, &format!("thresholds-{digest}.json"));
    fs::write(&thr_path, serde_json::to_string_pretty(&thresholds)?)?;
    println!("rows -> {}", csv_path.display());
    println!("thresholds -> {}", thr_path.display());
    Ok(())
}

fn cmd_benchmark(cli: &Cli, args: &BenchmarkArgs) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let partition_text = fs::read_to_string(&args.partition)?;
    let parts = pathloc::partition::import_partition(&partition_text, &graph)?;
    let result = benchmark(
        &graph,
        &parts,
        || pathloc::partition::import_partition(&partition_text, &graph),
        args.t,
        args.repeats,
        cli.seed,
    )?;
    let text = serde_json::to_string_pretty(&result)?;
    let path = out_path(
        cli,
        &format!("benchmark-{}.json", digest_hex(text.as_bytes())),
    );
    fs::write(&path, &text)?;
    println!(
        "nodes {} edges {} clusters {} super-edges {}",
        result.nodes, result.edges, result.clusters, result.super_edges
    );
    println!(
        "per-step decode: exact {:.4} ms, multiscale {:.4} ms ({:.1}x speedup)",
        result.exact_per_step_ms, result.multiscale_per_step_ms, result.speedup_per_step
    );
    println!(
        "partition {:.1} ms, coarsen {:.1} ms, totals: exact {:.1} ms vs multiscale {:.1} ms",
        result.partition_ms, result.coarsen_ms, result.exact_total_ms, result.multiscale_total_ms
    );
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_multipath(cli: &Cli, args: &MultipathArgs) -> Result<()> {
    let config = if let Some(path) = &cli.config {
        ExperimentConfig::from_file(path)?
    } else {
        let graph = args
            .graph
            .clone()
            .ok_or_else(|| Error::InvalidInput("--graph (or --config) is required".into()))?;
        let partition = match &args.partition {
            Some(path) => PartitionSpec::Import { path: path.clone() },
            None => PartitionSpec::Square {
                squares_per_side: args.b,
            },
        };
        ExperimentConfig {
            graph: GraphSource::GraphFile { path: graph },
            partition: Some(partition),
            partition_list: Vec::new(),
            t: args.t,
            trials: args.trials,
            snr_grid: args.snr_list.clone(),
            seed: cli.seed,
            target: None,
            k_list: args.k_list.clone(),
            decoder: DecoderKind::Multiscale,
        }
    };
    let digest = config.digest();
    let graph = config.graph.load()?;
    let parts = config.require_partition()?.build(&graph)?;
    if let Some(warning) = &parts.warning {
        eprintln!("warning: {warning}");
    }
    let mut csv = String::from(MULTIPATH_CSV_HEADER);
    csv.push('\n');
    for &k in &config.k_list {
        for &snr in &config.snr_grid {
            let point = multipath_point(&config, &graph, &parts, k, snr)?;
            println!(
                "k {k} snr {snr}: normalized set-Hamming {:.4} (stderr {:.4})",
                point.set_hamming_mean, point.set_hamming_stderr
            );
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                point.k,
                point.snr,
                point.trials,
                point.set_hamming_mean,
                point.set_hamming_stderr,
                digest
            ));
        }
    }
    let path = out_path(cli, &format!("multipath-{digest}.csv"));
    fs::write(&path, csv)?;
    println!("rows -> {}", path.display());
    Ok(())
}
