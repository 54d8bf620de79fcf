//! Serializable experiment configuration.
//!
//! Every output row carries the FNV digest of the configuration that
//! produced it, so a CSV line can always be traced back to (and regenerated
//! from) its exact inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pathloc::digest::digest_hex;
use pathloc::error::{Error, Result};
use pathloc::graph::{Graph, RggConfig, generate_rgg, load_edge_list};
use pathloc::partition::{
    HubShatterConfig, Partitioned, hub_shatter_partition, import_partition, square_partition,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(
    rename_all = "camelCase",
    rename_all_fields = "camelCase",
    tag = "kind"
)]
pub enum GraphSource {
    /// Random geometric graph on the unit square.
    Rgg {
        lambda: f64,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixed_n: Option<usize>,
        seed: u64,
    },
    /// Raw "u v" edge-list file.
    EdgeList { path: PathBuf },
    /// Previously serialized graph document.
    GraphFile { path: PathBuf },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::Rgg {
                lambda,
                radius,
                fixed_n,
                seed,
            } => generate_rgg(&RggConfig {
                lambda: *lambda,
                radius: *radius,
                seed: *seed,
                fixed_n: *fixed_n,
            }),
            GraphSource::EdgeList { path } => {
                let text = fs::read_to_string(path)?;
                Ok(load_edge_list(&text)?.graph)
            }
            GraphSource::GraphFile { path } => {
                let text = fs::read_to_string(path)?;
                Graph::from_json(&text)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(
    rename_all = "camelCase",
    rename_all_fields = "camelCase",
    tag = "method"
)]
pub enum PartitionSpec {
    Square {
        squares_per_side: u32,
    },
    HubShatter {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hubs_per_round: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_cluster_size: Option<usize>,
    },
    Import {
        path: PathBuf,
    },
}

impl PartitionSpec {
    pub fn build(&self, graph: &Graph) -> Result<Partitioned> {
        match self {
            PartitionSpec::Square { squares_per_side } => {
                square_partition(graph, *squares_per_side)
            }
            PartitionSpec::HubShatter {
                hubs_per_round,
                max_cluster_size,
            } => {
                let defaults = HubShatterConfig::defaults(graph.node_count());
                let config = HubShatterConfig {
                    hubs_per_round: hubs_per_round.unwrap_or(defaults.hubs_per_round),
                    max_cluster_size: max_cluster_size.unwrap_or(defaults.max_cluster_size),
                };
                hub_shatter_partition(graph, &config)
            }
            PartitionSpec::Import { path } => {
                let text = fs::read_to_string(path)?;
                import_partition(&text, graph)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DecoderKind {
    Naive,
    Exact,
    Multiscale,
}

/// Metric targeted by a threshold sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "metric", content = "value")]
pub enum SweepTarget {
    /// Normalized Hamming error at most this value.
    Hamming(f64),
    /// Euclidean destination error at most this value.
    Destination(f64),
}

/// A full experiment: graph, partitioning, horizon, noise grid, trial count.
/// Commands that sweep partitions take a list of partition specs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partition_list: Vec<PartitionSpec>,
    pub t: usize,
    pub trials: u64,
    /// snr values with the sigma = 1 convention (snr = mu).
    pub snr_grid: Vec<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SweepTarget>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_list: Vec<usize>,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
}

fn default_decoder() -> DecoderKind {
    DecoderKind::Multiscale
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        digest_hex(text.as_bytes())
    }

    pub fn require_partition(&self) -> Result<&PartitionSpec> {
        self.partition.as_ref().ok_or_else(|| {
            Error::InvalidInput("this command needs a partition specification".into())
        })
    }
}
