//! Helpers shared by the integration test suites.
#![allow(dead_code)]

use pathloc::bounds::ThetaTable;
use pathloc::graph::Graph;
use pathloc::partition::SuperGraph;
use pathloc::signal::NoiseModel;

/// Small deterministic graph from an edge-inclusion bitmask.
pub fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if bits >> (bit % 64) & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges, None).unwrap()
}

/// Deterministic random coarse instance: super-graph, a valid truth walk of
/// length at most `t_target`, and a theta table covering its sizes.
pub fn coarse_instance(seed: u64, m: usize, t_target: usize) -> (SuperGraph, Vec<u32>, ThetaTable) {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut edges = Vec::new();
    for a in 0..m as u32 {
        for b in (a + 1)..m as u32 {
            if next() % 100 < 55 {
                edges.push((a, b));
            }
        }
    }
    let self_loop: Vec<bool> = (0..m).map(|_| next() % 100 < 60).collect();
    let sizes: Vec<u32> = (0..m).map(|_| (next() % 6 + 1) as u32).collect();
    let sg = SuperGraph::from_parts(m, &edges, self_loop, sizes).unwrap();
    let start = (next() % m as u64) as u32;
    let mut truth = vec![start];
    while truth.len() < t_target {
        let here = *truth.last().unwrap();
        let steps = pathloc::graph::Topology::step_neighbors(&sg, here);
        if steps.is_empty() {
            break;
        }
        truth.push(steps[(next() % steps.len() as u64) as usize]);
    }
    let mu = 1.0 + (next() % 30) as f64 / 10.0;
    let noise = NoiseModel::new(mu, 1.0).unwrap();
    let table = ThetaTable::for_supergraph(noise, &sg);
    (sg, truth, table)
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
