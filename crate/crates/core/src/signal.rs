//! Path-signal synthesis, Gaussian observations, and coarsening.
//!
//! Observations follow the additive model y_t = x_t + w_t with
//! w_t ~ N(0, sigma^2 I): the activated node(s) at each step carry mean mu,
//! everything else mean zero. The coarse series takes the per-cluster maximum
//! at every step; the max (rather than the mean) keeps the activated node's
//! contribution visible however large the cluster.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, TruePath};
use crate::partition::Partition;
use crate::rng::SeededRng;

/// Activation mean and noise level; the ratio mu/sigma is the SNR quoted by
/// every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    mu: f64,
    sigma: f64,
}

impl NoiseModel {
    pub fn new(mu: f64, sigma: f64) -> Result<NoiseModel> {
        let mu_ok = mu.is_finite() && mu > 0.0;
        if !mu_ok {
            return Err(Error::InvalidInput(format!(
                "mu must be positive, got {mu}"
            )));
        }
        let sigma_ok = sigma.is_finite() && sigma > 0.0;
        if !sigma_ok {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(NoiseModel { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn snr(&self) -> f64 {
        self.mu / self.sigma
    }
}

/// T x n matrix of noisy observations plus the ground truth that produced it.
#[derive(Clone, Debug)]
pub struct ObservationSeries {
    t_len: usize,
    n: usize,
    values: Vec<f64>,
    truth: Vec<TruePath>,
    noise: NoiseModel,
    seed: u64,
}

/// Accessor shared by fine and coarse series so decoders can run on either.
pub trait SignalSeries {
    fn t_len(&self) -> usize;
    fn width(&self) -> usize;
    fn row(&self, t: usize) -> &[f64];
}

impl ObservationSeries {
    /// Wrap an existing matrix (row-major, t-major) as a series.
    pub fn from_matrix(
        t_len: usize,
        n: usize,
        values: Vec<f64>,
        noise: NoiseModel,
    ) -> Result<ObservationSeries> {
        if values.len() != t_len * n {
            return Err(Error::DimensionMismatch(format!(
                "matrix of {} values for T={t_len}, n={n}",
                values.len()
            )));
        }
        Ok(ObservationSeries {
            t_len,
            n,
            values,
            truth: Vec::new(),
            noise,
            seed: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn truth(&self) -> &[TruePath] {
        &self.truth
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, t: usize, v: u32) -> f64 {
        self.values[t * self.n + v as usize]
    }

    /// New series with `mu` subtracted at `(t, chain[t])` for every step;
    /// the peeling step of sequential multi-path decoding.
    pub fn subtract_path_signal(&self, chain: &[u32], mu: f64) -> Result<ObservationSeries> {
        if chain.len() != self.t_len {
            return Err(Error::DimensionMismatch(format!(
                "chain length {} vs T={}",
                chain.len(),
                self.t_len
            )));
        }
        let mut out = self.clone();
        for (t, &v) in chain.iter().enumerate() {
            if v as usize >= self.n {
                return Err(Error::InvalidInput(format!("node {v} out of range")));
            }
            out.values[t * self.n + v as usize] -= mu;
        }
        Ok(out)
    }

    /// Raw little-endian dump: 8-byte magic, then T and n as u64, then the
    /// row-major (t-major) f64 matrix.
    pub fn write_dump<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(DUMP_MAGIC)?;
        writer.write_all(&(self.t_len as u64).to_le_bytes())?;
        writer.write_all(&(self.n as u64).to_le_bytes())?;
        for value in &self.values {
            writer.write_all(&value.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut reader: R, noise: NoiseModel) -> Result<ObservationSeries> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::InvalidInput("bad observation dump magic".into()));
        }
        let mut word = [0u8; 8];
        reader.read_exact(&mut word)?;
        let t_len = u64::from_le_bytes(word) as usize;
        reader.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        let mut values = Vec::with_capacity(t_len * n);
        for _ in 0..t_len * n {
            reader.read_exact(&mut word)?;
            values.push(f64::from_le_bytes(word));
        }
        ObservationSeries::from_matrix(t_len, n, values, noise)
    }
}

const DUMP_MAGIC: &[u8; 8] = b"PLOBS\x01\x00\x00";

impl SignalSeries for ObservationSeries {
    fn t_len(&self) -> usize {
        self.t_len
    }

    fn width(&self) -> usize {
        self.n
    }

    fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.n..(t + 1) * self.n]
    }
}

/// Per-cluster maxima of a fine series, one row per time step.
#[derive(Clone, Debug)]
pub struct CoarseObservationSeries {
    t_len: usize,
    m: usize,
    values: Vec<f64>,
}

impl CoarseObservationSeries {
    pub fn cluster_count(&self) -> usize {
        self.m
    }

    pub fn value(&self, t: usize, cluster: u32) -> f64 {
        self.values[t * self.m + cluster as usize]
    }
}

impl SignalSeries for CoarseObservationSeries {
    fn t_len(&self) -> usize {
        self.t_len
    }

    fn width(&self) -> usize {
        self.m
    }

    fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.m..(t + 1) * self.m]
    }
}

/// Draw a full observation series for one or more simultaneous paths.
///
/// Noise is drawn t-major then node-minor from the seed's stream, so a series
/// regenerates bit-identically from (graph, truth, noise, seed). Overlapping
/// paths activate a node once (set semantics), not additively.
pub fn synthesize_observations(
    graph: &Graph,
    paths: &[TruePath],
    noise: NoiseModel,
    seed: u64,
) -> Result<ObservationSeries> {
    if paths.is_empty() {
        return Err(Error::InvalidInput("at least one path required".into()));
    }
    let t_len = paths[0].len();
    if t_len == 0 {
        return Err(Error::InvalidInput(
            "paths must have positive length".into(),
        ));
    }
    for path in paths {
        if path.len() != t_len {
            return Err(Error::DimensionMismatch(format!(
                "path lengths differ: {} vs {}",
                path.len(),
                t_len
            )));
        }
        for &v in &path.nodes {
            if v as usize >= graph.node_count() {
                return Err(Error::InvalidInput(format!("path node {v} out of range")));
            }
        }
    }
    let n = graph.node_count();
    let mut rng = SeededRng::new(seed);
    let mut values = Vec::with_capacity(t_len * n);
    for _ in 0..t_len {
        for _ in 0..n {
            values.push(noise.sigma() * rng.next_gaussian());
        }
    }
    let mut activated: Vec<u32> = Vec::with_capacity(paths.len());
    for t in 0..t_len {
        activated.clear();
        activated.extend(paths.iter().map(|p| p.nodes[t]));
        activated.sort_unstable();
        activated.dedup();
        for &v in &activated {
            values[t * n + v as usize] += noise.mu();
        }
    }
    Ok(ObservationSeries {
        t_len,
        n,
        values,
        truth: paths.to_vec(),
        noise,
        seed,
    })
}

/// Per-cluster maximum of each observation row, exactly.
pub fn coarsen_observations(
    obs: &ObservationSeries,
    partition: &Partition,
) -> Result<CoarseObservationSeries> {
    if partition.node_count() != obs.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} nodes, series has {}",
            partition.node_count(),
            obs.node_count()
        )));
    }
    let m = partition.cluster_count();
    let t_len = obs.t_len();
    let mut values = vec![f64::NEG_INFINITY; t_len * m];
    for t in 0..t_len {
        let row = obs.row(t);
        let out = &mut values[t * m..(t + 1) * m];
        for (v, &y) in row.iter().enumerate() {
            let c = partition.cluster_of(v as u32) as usize;
            if y > out[c] {
                out[c] = y;
            }
        }
    }
    Ok(CoarseObservationSeries { t_len, m, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{RggConfig, generate_rgg, random_walk_path};
    use crate::partition::Partition;

    fn tiny_graph() -> Graph {
        Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap()
    }

    #[test]
    fn near_noiseless_series_reveals_the_path() {
        let graph = tiny_graph();
        let path = random_walk_path(&graph, 20, 3, None).unwrap();
        let noise = NoiseModel::new(1.0, 1e-12).unwrap();
        let obs = synthesize_observations(&graph, std::slice::from_ref(&path), noise, 9).unwrap();
        for t in 0..20 {
            let row = obs.row(t);
            let argmax = (0..4).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            assert_eq!(argmax as u32, path.nodes[t]);
        }
    }

    #[test]
    fn on_path_sample_mean_matches_mu() {
        let graph = tiny_graph();
        let path = random_walk_path(&graph, 1, 1, Some(0)).unwrap();
        let noise = NoiseModel::new(1.0, 1.0).unwrap();
        let trials = 10_000;
        let mut sum = 0.0;
        for trial in 0..trials {
            let obs =
                synthesize_observations(&graph, std::slice::from_ref(&path), noise, trial).unwrap();
            sum += obs.value(0, path.nodes[0]);
        }
        let mean = sum / f64::from(trials as u32);
        assert!((mean - 1.0).abs() < 0.03, "mean {mean}");
    }

    #[test]
    fn overlapping_paths_activate_once() {
        let graph = tiny_graph();
        let a = TruePath { nodes: vec![0, 1] };
        let b = TruePath { nodes: vec![0, 3] };
        let noise = NoiseModel::new(5.0, 1e-12).unwrap();
        let obs = synthesize_observations(&graph, &[a, b], noise, 2).unwrap();
        // Overlap at (t=0, node 0) carries mu, not 2*mu.
        assert!((obs.value(0, 0) - 5.0).abs() < 1e-9);
        assert!((obs.value(1, 1) - 5.0).abs() < 1e-9);
        assert!((obs.value(1, 3) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let graph = tiny_graph();
        let path = random_walk_path(&graph, 50, 7, None).unwrap();
        let noise = NoiseModel::new(2.0, 1.0).unwrap();
        let a = synthesize_observations(&graph, std::slice::from_ref(&path), noise, 42).unwrap();
        let b = synthesize_observations(&graph, &[path], noise, 42).unwrap();
        for t in 0..50 {
            assert_eq!(a.row(t), b.row(t));
        }
    }

    #[test]
    fn mismatched_path_lengths_error() {
        let graph = tiny_graph();
        let a = TruePath { nodes: vec![0, 1] };
        let b = TruePath { nodes: vec![0] };
        let noise = NoiseModel::new(1.0, 1.0).unwrap();
        assert!(matches!(
            synthesize_observations(&graph, &[a, b], noise, 0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn coarsening_with_singletons_is_identity() {
        let graph = tiny_graph();
        let path = random_walk_path(&graph, 10, 2, None).unwrap();
        let noise = NoiseModel::new(1.0, 1.0).unwrap();
        let obs = synthesize_observations(&graph, &[path], noise, 1).unwrap();
        let partition = Partition::from_assignment(4, &[0, 1, 2, 3]).unwrap();
        let coarse = coarsen_observations(&obs, &partition).unwrap();
        for t in 0..10 {
            assert_eq!(coarse.row(t), obs.row(t));
        }
    }

    #[test]
    fn coarsening_takes_the_cluster_max() {
        let noise = NoiseModel::new(1.0, 1.0).unwrap();
        let obs = ObservationSeries::from_matrix(1, 2, vec![3.0, -1.0], noise).unwrap();
        let partition = Partition::from_assignment(2, &[0, 0]).unwrap();
        let coarse = coarsen_observations(&obs, &partition).unwrap();
        assert_eq!(coarse.value(0, 0), 3.0);
    }

    #[test]
    fn coarsening_matches_double_loop_oracle() {
        let graph = generate_rgg(&RggConfig {
            lambda: 0.0,
            radius: 0.2,
            seed: 4,
            fixed_n: Some(50),
        })
        .unwrap();
        let path = random_walk_path(&graph, 12, 9, None).unwrap();
        let noise = NoiseModel::new(2.0, 1.0).unwrap();
        let obs = synthesize_observations(&graph, &[path], noise, 77).unwrap();
        let assign: Vec<u32> = (0..50u32).map(|v| v % 7).collect();
        let partition = Partition::from_assignment(50, &assign).unwrap();
        let coarse = coarsen_observations(&obs, &partition).unwrap();
        for t in 0..12 {
            for c in 0..7u32 {
                let mut expect = f64::NEG_INFINITY;
                for v in 0..50u32 {
                    if assign[v as usize] == c {
                        expect = expect.max(obs.value(t, v));
                    }
                }
                assert_eq!(coarse.value(t, c), expect);
            }
        }
    }

    #[test]
    fn subtract_then_restore_round_trips_exactly() {
        // Dyadic values make the subtraction lossless, so restoring must give
        // back the original bits.
        let noise = NoiseModel::new(1.0, 1.0).unwrap();
        let values = vec![5.0, 0.25, -1.5, 2.0, 0.0, -0.75];
        let obs = ObservationSeries::from_matrix(3, 2, values.clone(), noise).unwrap();
        let chain = vec![0u32, 1, 0];
        let peeled = obs.subtract_path_signal(&chain, 1.0).unwrap();
        let restored = peeled.subtract_path_signal(&chain, -1.0).unwrap();
        for t in 0..3 {
            assert_eq!(restored.row(t), obs.row(t));
        }
        assert_eq!(peeled.value(0, 0), 4.0);
        assert_eq!(peeled.value(0, 1), 0.25);
    }

    #[test]
    fn subtracting_one_path_leaves_the_other() {
        // Noise-free two-path signal built by hand: removing path one leaves
        // exactly the path-two indicator matrix.
        let mu = 2.0;
        let path1 = vec![0u32, 1, 2];
        let path2 = [3u32, 2, 1];
        let n = 4;
        let mut values = vec![0.0; 3 * n];
        for t in 0..3 {
            values[t * n + path1[t] as usize] += mu;
            if path2[t] != path1[t] {
                values[t * n + path2[t] as usize] += mu;
            }
        }
        let noise = NoiseModel::new(mu, 1.0).unwrap();
        let obs = ObservationSeries::from_matrix(3, n, values, noise).unwrap();
        let peeled = obs.subtract_path_signal(&path1, mu).unwrap();
        for t in 0..3 {
            for v in 0..n as u32 {
                let expect = if v == path2[t] { mu } else { 0.0 };
                assert_eq!(peeled.value(t, v), expect, "t={t} v={v}");
            }
        }
    }

    #[test]
    fn dump_round_trip() {
        let noise = NoiseModel::new(1.5, 0.5).unwrap();
        let obs =
            ObservationSeries::from_matrix(2, 3, vec![1.0, -2.5, 0.0, 3.25, 4.0, -0.125], noise)
                .unwrap();
        let mut buffer = Vec::new();
        obs.write_dump(&mut buffer).unwrap();
        assert_eq!(buffer.len(), 24 + 6 * 8);
        let back = ObservationSeries::read_dump(buffer.as_slice(), noise).unwrap();
        assert_eq!(back.t_len(), 2);
        assert_eq!(back.row(0), obs.row(0));
        assert_eq!(back.row(1), obs.row(1));
    }
}
