//! Trial execution, sweeps, and timing for the CLI commands.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use pathloc::bounds::{
    ThetaTable, bound_destination_fine, bound_destination_super, bound_hamming_fine,
};
use pathloc::decoder::{
    ChainEstimate, Level, coarse_viterbi, hamming_distance, multipath_multiscale,
    multiscale_viterbi, naive_argmax_chain, set_hamming_distance, viterbi_max_sum_path,
};
use pathloc::error::{Error, Result};
use pathloc::graph::{DistanceMode, Graph, TruePath, random_walk_path};
use pathloc::partition::{Partitioned, coarse_hop_distances, max_distance_vector};
use pathloc::signal::{NoiseModel, SignalSeries, coarsen_observations, synthesize_observations};

use crate::config::{DecoderKind, ExperimentConfig, SweepTarget};

/// One simulated trial of one decoder.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub trial: u64,
    pub hamming: usize,
    /// Coarse-level Hamming against the projected truth (multiscale only).
    pub hamming_coarse: Option<usize>,
    /// Euclidean destination error; absent without a layout.
    pub destination: Option<f64>,
    pub sum_signal: f64,
    pub connected: bool,
    pub decode_ms: f64,
}

pub struct SimulationSetup<'a> {
    pub graph: &'a Graph,
    pub partitioned: Option<&'a Partitioned>,
    pub decoder: DecoderKind,
    pub t_len: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

fn trial_seeds(master: u64, trial: u64) -> (u64, u64) {
    let walk = master
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(trial * 2 + 1);
    (walk, walk ^ 0xABCD_EF01_2345_6789)
}

/// Run one seeded trial: fresh walk, fresh noise, one decode.
pub fn run_trial(setup: &SimulationSetup, trial: u64) -> Result<TrialRecord> {
    let (walk_seed, noise_seed) = trial_seeds(setup.seed, trial);
    let truth = random_walk_path(setup.graph, setup.t_len, walk_seed, None)?;
    let obs = synthesize_observations(
        setup.graph,
        std::slice::from_ref(&truth),
        setup.noise,
        noise_seed,
    )?;

    let started = Instant::now();
    let (chain, coarse): (ChainEstimate, Option<ChainEstimate>) = match setup.decoder {
        DecoderKind::Naive => (naive_argmax_chain(&obs, setup.graph), None),
        DecoderKind::Exact => (viterbi_max_sum_path(setup.graph, &obs, Level::Fine)?, None),
        DecoderKind::Multiscale => {
            let parts = setup.partitioned.ok_or_else(|| {
                Error::InvalidInput("multiscale decoding needs a partition".into())
            })?;
            let decoded =
                multiscale_viterbi(setup.graph, &parts.partition, &parts.supergraph, &obs)?;
            (decoded.fine, Some(decoded.coarse))
        }
    };
    let decode_ms = started.elapsed().as_secs_f64() * 1e3;

    let hamming = hamming_distance(&chain.ids, &truth.nodes)?;
    let hamming_coarse = match (&coarse, setup.partitioned) {
        (Some(coarse_chain), Some(parts)) => {
            let projected = parts.partition.project(&truth);
            Some(hamming_distance(&coarse_chain.ids, &projected)?)
        }
        _ => None,
    };
    let destination = if setup.graph.layout().is_some() {
        Some(pathloc::decoder::destination_distance(
            &chain.ids,
            truth.last(),
            setup.graph,
            DistanceMode::Euclidean,
        )?)
    } else {
        None
    };
    Ok(TrialRecord {
        trial,
        hamming,
        hamming_coarse,
        destination,
        sum_signal: chain.sum_signal,
        connected: chain.connected,
        decode_ms,
    })
}

pub fn run_trials(setup: &SimulationSetup, trials: u64) -> Result<Vec<TrialRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(setup, trial))
        .collect()
}

pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregated statistics of one (partition, snr) sweep point.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    pub m: usize,
    pub snr: f64,
    pub trials: u64,
    pub hamming_coarse_mean: f64,
    pub hamming_coarse_stderr: f64,
    pub hamming_fine_mean: f64,
    pub hamming_fine_stderr: f64,
    pub dest_mean: f64,
    pub dest_stderr: f64,
    pub bound_hamming_fine: f64,
    pub bound_dest_fine: f64,
    pub decode_step_ms: f64,
}

pub const SWEEP_CSV_HEADER: &str = "m,snr,trials,hammingCoarseMean,hammingCoarseStderr,\
hammingFineMean,hammingFineStderr,destMean,destStderr,boundHammingFine,boundDestFine,\
decodeStepMs,configDigest";

impl SweepPoint {
    pub fn csv_row(&self, digest: &str) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.snr,
            self.trials,
            self.hamming_coarse_mean,
            self.hamming_coarse_stderr,
            self.hamming_fine_mean,
            self.hamming_fine_stderr,
            self.dest_mean,
            self.dest_stderr,
            self.bound_hamming_fine,
            self.bound_dest_fine,
            self.decode_step_ms,
            digest
        )
    }
}

/// Bounds evaluated on a reference walk (one fixed truth per partition).
pub struct ReferenceBounds {
    /// Fine Hamming bound, normalized by T.
    pub hamming_fine: f64,
    /// Fine destination bound (max inter-cluster node distance weights);
    /// its zero-mismatch term is the true cluster's own diameter, so it
    /// never drops below that floor however high the snr.
    pub dest_fine: f64,
    /// Coarse destination bound (square centers when the partition is a
    /// grid, hop distance otherwise); goes to zero with rising snr and is
    /// therefore what threshold certification uses.
    pub dest_super: f64,
}

pub fn reference_bounds(
    graph: &Graph,
    parts: &Partitioned,
    t_len: usize,
    snr: f64,
    seed: u64,
) -> Result<ReferenceBounds> {
    let noise = NoiseModel::new(snr, 1.0)?;
    let truth = random_walk_path(graph, t_len, seed, None)?;
    let projected = parts.partition.project(&truth);
    let table = ThetaTable::for_supergraph(noise, &parts.supergraph);
    let hamming = bound_hamming_fine(&parts.supergraph, &projected, &table)?;
    let final_cluster = *projected.last().unwrap();
    let dest_fine = if graph.layout().is_some() {
        let dmax = max_distance_vector(
            graph,
            &parts.partition,
            final_cluster,
            DistanceMode::Euclidean,
        )?;
        bound_destination_fine(&parts.supergraph, &projected, &table, &dmax)?.value
    } else {
        f64::NAN
    };
    let coarse_dist = match parts.partition.grid() {
        Some(grid) => grid.center_distances_from(final_cluster),
        None => coarse_hop_distances(&parts.supergraph, final_cluster)?,
    };
    let dest_super =
        bound_destination_super(&parts.supergraph, &projected, &table, &coarse_dist)?.value;
    Ok(ReferenceBounds {
        hamming_fine: hamming.value / t_len as f64,
        dest_fine,
        dest_super,
    })
}

/// Simulate one (partition, snr) point of a sweep.
pub fn sweep_point(
    config: &ExperimentConfig,
    graph: &Graph,
    parts: &Partitioned,
    snr: f64,
) -> Result<SweepPoint> {
    let noise = NoiseModel::new(snr, 1.0)?;
    let setup = SimulationSetup {
        graph,
        partitioned: Some(parts),
        decoder: DecoderKind::Multiscale,
        t_len: config.t,
        noise,
        seed: config
            .seed
            .wrapping_add((snr * 100.0) as u64)
            .wrapping_mul(0x100_0000_01B3),
    };
    let records = run_trials(&setup, config.trials)?;
    let t = config.t as f64;
    let coarse: Vec<f64> = records
        .iter()
        .map(|r| r.hamming_coarse.unwrap_or(0) as f64 / t)
        .collect();
    let fine: Vec<f64> = records.iter().map(|r| r.hamming as f64 / t).collect();
    let dest: Vec<f64> = records
        .iter()
        .map(|r| r.destination.unwrap_or(f64::NAN))
        .collect();
    let (cm, cs) = mean_stderr(&coarse);
    let (fm, fs) = mean_stderr(&fine);
    let (dm, ds) = mean_stderr(&dest);
    let decode_step_ms =
        records.iter().map(|r| r.decode_ms).sum::<f64>() / records.len() as f64 / t;
    let bounds = reference_bounds(graph, parts, config.t, snr, config.seed ^ 0x5EED)?;
    Ok(SweepPoint {
        m: parts.partition.cluster_count(),
        snr,
        trials: config.trials,
        hamming_coarse_mean: cm,
        hamming_coarse_stderr: cs,
        hamming_fine_mean: fm,
        hamming_fine_stderr: fs,
        dest_mean: dm,
        dest_stderr: ds,
        bound_hamming_fine: bounds.hamming_fine,
        bound_dest_fine: bounds.dest_fine,
        decode_step_ms,
    })
}

fn target_metric(point: &SweepPoint, target: &SweepTarget) -> (f64, f64) {
    match target {
        SweepTarget::Hamming(goal) => (point.hamming_fine_mean, *goal),
        SweepTarget::Destination(goal) => (point.dest_mean, *goal),
    }
}

/// Threshold results for one partition.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdResult {
    pub m: usize,
    pub simulated_threshold_snr: f64,
    pub bound_threshold_snr: Option<f64>,
}

pub const SNR_RESOLUTION: f64 = 0.05;

fn snap(snr: f64) -> f64 {
    (snr / SNR_RESOLUTION).round() * SNR_RESOLUTION
}

/// Bisect the snr at which the trial-averaged target metric crosses its
/// goal; every evaluated point is pushed onto `points`.
pub fn bisect_threshold(
    config: &ExperimentConfig,
    graph: &Graph,
    parts: &Partitioned,
    target: &SweepTarget,
    snr_lo: f64,
    snr_hi: f64,
    points: &mut Vec<SweepPoint>,
) -> Result<ThresholdResult> {
    let evaluate = |snr: f64, points: &mut Vec<SweepPoint>| -> Result<f64> {
        let point = sweep_point(config, graph, parts, snr)?;
        let (value, goal) = target_metric(&point, target);
        points.push(point);
        Ok(value - goal)
    };
    let (mut lo, mut hi) = (snap(snr_lo), snap(snr_hi));
    let at_lo = evaluate(lo, points)?;
    let at_hi = evaluate(hi, points)?;
    if at_lo <= 0.0 || at_hi > 0.0 {
        return Err(Error::InvalidInput(format!(
            "bisection bracket is not monotone (error {at_lo:+.4} at snr {lo}, {at_hi:+.4} at \
             snr {hi}); widen the bracket or increase --trials"
        )));
    }
    while hi - lo > SNR_RESOLUTION + 1e-9 {
        let mid = snap((lo + hi) / 2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if evaluate(mid, points)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Bound-implied threshold on the same grid (deterministic, no trials).
    let bound_threshold = bisect_bound_threshold(config, graph, parts, target, snr_lo, snr_hi)?;
    Ok(ThresholdResult {
        m: parts.partition.cluster_count(),
        simulated_threshold_snr: snap(hi),
        bound_threshold_snr: bound_threshold,
    })
}

fn bound_value_for_target(
    config: &ExperimentConfig,
    graph: &Graph,
    parts: &Partitioned,
    target: &SweepTarget,
    snr: f64,
) -> Result<f64> {
    let bounds = reference_bounds(graph, parts, config.t, snr, config.seed ^ 0x5EED)?;
    Ok(match target {
        SweepTarget::Hamming(goal) => bounds.hamming_fine - goal,
        SweepTarget::Destination(goal) => bounds.dest_super - goal,
    })
}

fn bisect_bound_threshold(
    config: &ExperimentConfig,
    graph: &Graph,
    parts: &Partitioned,
    target: &SweepTarget,
    snr_lo: f64,
    snr_hi: f64,
) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (snap(snr_lo), snap(snr_hi));
    if bound_value_for_target(config, graph, parts, target, hi)? > 0.0 {
        // The bound never certifies the target on this bracket.
        return Ok(None);
    }
    if bound_value_for_target(config, graph, parts, target, lo)? <= 0.0 {
        return Ok(Some(lo));
    }
    while hi - lo > SNR_RESOLUTION + 1e-9 {
        let mid = snap((lo + hi) / 2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if bound_value_for_target(config, graph, parts, target, mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(snap(hi)))
}

/// Timing summary for one graph/partition pair.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchmarkResult {
    pub nodes: usize,
    pub edges: usize,
    pub clusters: usize,
    pub super_edges: usize,
    pub partition_ms: f64,
    pub coarsen_ms: f64,
    pub exact_per_step_ms: f64,
    pub multiscale_per_step_ms: f64,
    pub refine_ms: f64,
    pub exact_total_ms: f64,
    pub multiscale_total_ms: f64,
    pub speedup_per_step: f64,
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

/// Decode timings with one warmup pass excluded, medians over `repeats`.
/// Partitioning time is measured by `rebuild_partition`; synthesis is not
/// counted anywhere.
pub fn benchmark(
    graph: &Graph,
    parts: &Partitioned,
    rebuild_partition: impl Fn() -> Result<Partitioned>,
    t_len: usize,
    repeats: usize,
    seed: u64,
) -> Result<BenchmarkResult> {
    let noise = NoiseModel::new(5.0, 1.0)?;
    let truth = random_walk_path(graph, t_len, seed, None)?;
    let obs = synthesize_observations(graph, &[truth], noise, seed ^ 0xBEEF)?;

    let t0 = Instant::now();
    let rebuilt = rebuild_partition()?;
    let partition_ms = t0.elapsed().as_secs_f64() * 1e3;
    assert_eq!(
        rebuilt.partition.cluster_count(),
        parts.partition.cluster_count()
    );

    let t1 = Instant::now();
    let coarse_series = coarsen_observations(&obs, &parts.partition)?;
    let coarsen_ms = t1.elapsed().as_secs_f64() * 1e3;

    // Warmup.
    let _ = viterbi_max_sum_path(graph, &obs, Level::Fine)?;
    let _ = coarse_viterbi(&parts.supergraph, &coarse_series)?;

    let mut fine_ms = Vec::with_capacity(repeats);
    let mut coarse_ms = Vec::with_capacity(repeats);
    let mut refine_ms_samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        let _ = viterbi_max_sum_path(graph, &obs, Level::Fine)?;
        fine_ms.push(t.elapsed().as_secs_f64() * 1e3);

        let t = Instant::now();
        let coarse_chain = coarse_viterbi(&parts.supergraph, &coarse_series)?;
        coarse_ms.push(t.elapsed().as_secs_f64() * 1e3);

        let t = Instant::now();
        for (t_idx, &cluster) in coarse_chain.ids.iter().enumerate() {
            let row = obs.row(t_idx);
            let members = parts.partition.members(cluster);
            let mut best = members[0];
            for &v in members {
                if row[v as usize] > row[best as usize] {
                    best = v;
                }
            }
            std::hint::black_box(best);
        }
        refine_ms_samples.push(t.elapsed().as_secs_f64() * 1e3);
    }
    let fine_total = median(&mut fine_ms);
    let coarse_total = median(&mut coarse_ms);
    let refine = median(&mut refine_ms_samples);
    let t = t_len as f64;
    Ok(BenchmarkResult {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        clusters: parts.partition.cluster_count(),
        super_edges: parts.supergraph.super_edge_count(),
        partition_ms,
        coarsen_ms,
        exact_per_step_ms: fine_total / t,
        multiscale_per_step_ms: coarse_total / t,
        refine_ms: refine,
        exact_total_ms: fine_total,
        multiscale_total_ms: partition_ms + coarsen_ms + coarse_total + refine,
        speedup_per_step: fine_total / coarse_total,
    })
}

/// One (k, snr) point of a multi-path experiment.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultipathPoint {
    pub k: usize,
    pub snr: f64,
    pub trials: u64,
    pub set_hamming_mean: f64,
    pub set_hamming_stderr: f64,
}

pub const MULTIPATH_CSV_HEADER: &str = "k,snr,trials,setHammingMean,setHammingStderr,configDigest";

/// Average normalized set-based Hamming error of sequential multi-path
/// decoding; normalization is by k*T so curves are comparable across k.
pub fn multipath_point(
    config: &ExperimentConfig,
    graph: &Graph,
    parts: &Partitioned,
    k: usize,
    snr: f64,
) -> Result<MultipathPoint> {
    let noise = NoiseModel::new(snr, 1.0)?;
    let t_len = config.t;
    let errors: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let base = config
                .seed
                .wrapping_mul(31)
                .wrapping_add(trial * 1009 + (snr * 100.0) as u64);
            let paths: Vec<TruePath> = (0..k)
                .map(|j| random_walk_path(graph, t_len, base.wrapping_add(j as u64 * 97), None))
                .collect::<Result<_>>()?;
            let obs = synthesize_observations(graph, &paths, noise, base ^ 0xF00D)?;
            let decoded =
                multipath_multiscale(graph, &parts.partition, &parts.supergraph, &obs, k)?;
            let truth_sets: Vec<Vec<u32>> = (0..t_len)
                .map(|t| {
                    let mut set: Vec<u32> = paths.iter().map(|p| p.nodes[t]).collect();
                    set.sort_unstable();
                    set.dedup();
                    set
                })
                .collect();
            let distance = set_hamming_distance(&truth_sets, &decoded.node_sets)?;
            Ok(distance / (k * t_len) as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&errors);
    Ok(MultipathPoint {
        k,
        snr,
        trials: config.trials,
        set_hamming_mean: mean,
        set_hamming_stderr: stderr,
    })
}
