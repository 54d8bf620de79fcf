//! Chain estimators and their error metrics.
//!
//! The exact estimator maximizes the sum of observed values along a connected
//! path by dynamic programming over (time, end node) — the trellis recursion
//! of classic Viterbi decoding. The multiscale variant runs the same
//! recursion on the super-graph over the coarsened (per-cluster max) signal,
//! then picks the strongest node inside each decoded cluster. Tie-breaking is
//! everywhere "lowest id wins" so decodes are reproducible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, Graph, Topology, hop_distance};
use crate::partition::{Partition, SuperGraph};
use crate::signal::{
    CoarseObservationSeries, ObservationSeries, SignalSeries, coarsen_observations,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Level {
    Fine,
    Coarse,
}

/// A length-T sequence of node or cluster ids with its objective value.
///
/// Chains from the path-constrained decoders are connected at their level;
/// the naive estimator and the multiscale refinement may return chains that
/// are not (the flag records what actually holds).
#[derive(Clone, Debug)]
pub struct ChainEstimate {
    pub ids: Vec<u32>,
    pub level: Level,
    /// Sum of the series values along the chain.
    pub sum_signal: f64,
    pub connected: bool,
}

impl ChainEstimate {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Hamming distance to another chain at the same level.
    pub fn hamming_to(&self, other: &ChainEstimate) -> Result<usize> {
        if self.level != other.level {
            return Err(Error::DimensionMismatch(
                "chains compared across levels".into(),
            ));
        }
        hamming_distance(&self.ids, &other.ids)
    }
}

/// Count of positions where the two id sequences disagree.
pub fn hamming_distance(a: &[u32], b: &[u32]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "chain lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Hamming distance divided by the horizon.
pub fn normalized_hamming(a: &[u32], b: &[u32]) -> Result<f64> {
    Ok(hamming_distance(a, b)? as f64 / a.len() as f64)
}

/// Distance between the chain's final node and the true final node.
pub fn destination_distance(
    chain: &[u32],
    true_final: u32,
    graph: &Graph,
    mode: DistanceMode,
) -> Result<f64> {
    let last = *chain
        .last()
        .ok_or_else(|| Error::InvalidInput("empty chain".into()))?;
    match mode {
        DistanceMode::Euclidean => graph.euclidean_distance(last, true_final),
        DistanceMode::Hop => {
            hop_distance(graph, last, true_final)?
                .map(f64::from)
                .ok_or(Error::Unreachable {
                    a: last,
                    b: true_final,
                })
        }
    }
}

fn chain_is_connected<G: Topology>(graph: &G, ids: &[u32]) -> bool {
    ids.windows(2).all(|pair| {
        graph
            .step_neighbors(pair[0])
            .binary_search(&pair[1])
            .is_ok()
    })
}

/// Per-step independent argmax — the estimator that ignores the path
/// constraint entirely. Ties break to the lowest node id.
pub fn naive_argmax_chain(obs: &ObservationSeries, graph: &Graph) -> ChainEstimate {
    let mut ids = Vec::with_capacity(obs.t_len());
    let mut sum = 0.0;
    for t in 0..obs.t_len() {
        let row = obs.row(t);
        let mut best = 0usize;
        for (v, &y) in row.iter().enumerate() {
            if y > row[best] {
                best = v;
            }
        }
        ids.push(best as u32);
        sum += row[best];
    }
    let connected = chain_is_connected(graph, &ids);
    ChainEstimate {
        ids,
        level: Level::Fine,
        sum_signal: sum,
        connected,
    }
}

/// Trellis decoder: the connected path maximizing the summed series values.
///
/// State scores carry -inf for states with no predecessor, which therefore
/// never win a tie; if every state dies at some step the instance is
/// undecodable and that is an error. Cost is Theta((n + |E|) T).
pub fn viterbi_max_sum_path<G, S>(graph: &G, series: &S, level: Level) -> Result<ChainEstimate>
where
    G: Topology,
    S: SignalSeries,
{
    let n = graph.node_count();
    let t_len = series.t_len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if t_len == 0 {
        return Err(Error::InvalidInput("empty series".into()));
    }
    if series.width() != n {
        return Err(Error::DimensionMismatch(format!(
            "series width {} vs {} states",
            series.width(),
            n
        )));
    }

    let mut score_prev: Vec<f64> = series.row(0).to_vec();
    let mut score_cur = vec![f64::NEG_INFINITY; n];
    // predecessors[t - 1][v] for t = 1..T
    let mut predecessors: Vec<u32> = Vec::new();
    if t_len > 1 {
        predecessors.resize((t_len - 1) * n, u32::MAX);
    }

    for t in 1..t_len {
        let row = series.row(t);
        let preds = &mut predecessors[(t - 1) * n..t * n];
        let mut any_alive = false;
        for v in 0..n {
            let mut best = f64::NEG_INFINITY;
            let mut best_u = u32::MAX;
            for &u in graph.step_neighbors(v as u32) {
                let s = score_prev[u as usize];
                if s > best {
                    best = s;
                    best_u = u;
                }
            }
            if best_u == u32::MAX {
                score_cur[v] = f64::NEG_INFINITY;
            } else {
                score_cur[v] = best + row[v];
                any_alive = true;
            }
            preds[v] = best_u;
        }
        if !any_alive {
            return Err(Error::AllStatesUnreachable { t: t + 1 });
        }
        std::mem::swap(&mut score_prev, &mut score_cur);
    }

    let mut end = 0usize;
    for v in 1..n {
        if score_prev[v] > score_prev[end] {
            end = v;
        }
    }
    if score_prev[end] == f64::NEG_INFINITY {
        return Err(Error::AllStatesUnreachable { t: t_len });
    }

    let mut ids = vec![0u32; t_len];
    ids[t_len - 1] = end as u32;
    for t in (1..t_len).rev() {
        ids[t - 1] = predecessors[(t - 1) * n + ids[t] as usize];
    }
    Ok(ChainEstimate {
        ids,
        level,
        sum_signal: score_prev[end],
        connected: true,
    })
}

/// The trellis decoder run on the super-graph with the coarsened signal; a
/// cluster is its own neighbor exactly when it has a self-loop.
pub fn coarse_viterbi(
    supergraph: &SuperGraph,
    coarse: &CoarseObservationSeries,
) -> Result<ChainEstimate> {
    viterbi_max_sum_path(supergraph, coarse, Level::Coarse)
}

/// Output of the two-stage decoder: the coarse chain and its in-cluster
/// refinement.
#[derive(Clone, Debug)]
pub struct MultiscaleEstimate {
    pub coarse: ChainEstimate,
    pub fine: ChainEstimate,
}

/// Two-stage decode: coarse trellis pass over cluster maxima, then per step
/// the strongest node inside the decoded cluster. The refinement needs no
/// path constraint of its own; its chain may be disconnected in the fine
/// graph and the flag records whether it happens to be.
pub fn multiscale_viterbi(
    graph: &Graph,
    partition: &Partition,
    supergraph: &SuperGraph,
    obs: &ObservationSeries,
) -> Result<MultiscaleEstimate> {
    let coarse_series = coarsen_observations(obs, partition)?;
    let coarse = coarse_viterbi(supergraph, &coarse_series)?;
    let mut ids = Vec::with_capacity(obs.t_len());
    let mut sum = 0.0;
    for (t, &cluster) in coarse.ids.iter().enumerate() {
        let row = obs.row(t);
        let members = partition.members(cluster);
        let mut best = members[0];
        for &v in members {
            if row[v as usize] > row[best as usize] {
                best = v;
            }
        }
        ids.push(best);
        sum += row[best as usize];
    }
    let connected = chain_is_connected(graph, &ids);
    Ok(MultiscaleEstimate {
        coarse,
        fine: ChainEstimate {
            ids,
            level: Level::Fine,
            sum_signal: sum,
            connected,
        },
    })
}

/// Sequentially decoded multi-path estimate.
#[derive(Clone, Debug)]
pub struct MultipathEstimate {
    pub chains: Vec<ChainEstimate>,
    /// Per time step, the sorted set of nodes claimed by any decoded path.
    pub node_sets: Vec<Vec<u32>>,
}

/// Decode k paths by sequential peeling: decode one path with the multiscale
/// decoder, subtract its activation from the observations, repeat.
pub fn multipath_multiscale(
    graph: &Graph,
    partition: &Partition,
    supergraph: &SuperGraph,
    obs: &ObservationSeries,
    k: usize,
) -> Result<MultipathEstimate> {
    if k == 0 {
        return Err(Error::InvalidInput("path count must be >= 1".into()));
    }
    let mu = obs.noise().mu();
    let t_len = obs.t_len();
    let mut residual = obs.clone();
    let mut chains = Vec::with_capacity(k);
    for round in 0..k {
        let decoded = multiscale_viterbi(graph, partition, supergraph, &residual)?;
        if round + 1 < k {
            residual = residual.subtract_path_signal(&decoded.fine.ids, mu)?;
        }
        chains.push(decoded.fine);
    }
    let mut node_sets = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut set: Vec<u32> = chains.iter().map(|c| c.ids[t]).collect();
        set.sort_unstable();
        set.dedup();
        node_sets.push(set);
    }
    Ok(MultipathEstimate { chains, node_sets })
}

/// Set-based Hamming distance for multi-path estimates: half the symmetric
/// difference between the true and estimated node sets, summed over time.
pub fn set_hamming_distance(truth_sets: &[Vec<u32>], estimate_sets: &[Vec<u32>]) -> Result<f64> {
    if truth_sets.len() != estimate_sets.len() {
        return Err(Error::DimensionMismatch(format!(
            "set sequences differ in length: {} vs {}",
            truth_sets.len(),
            estimate_sets.len()
        )));
    }
    let mut total = 0.0;
    for (a, b) in truth_sets.iter().zip(estimate_sets) {
        let shared = a.iter().filter(|v| b.binary_search(v).is_ok()).count();
        let sym_diff = (a.len() - shared) + (b.len() - shared);
        total += sym_diff as f64 / 2.0;
    }
    Ok(total)
}
