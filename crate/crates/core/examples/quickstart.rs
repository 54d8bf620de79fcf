//! Minimal end-to-end run: generate a geometric graph, partition it, decode
//! one noisy trajectory, and evaluate the matching error bound.

use pathloc::bounds::{ThetaTable, bound_hamming_fine};
use pathloc::decoder::{hamming_distance, multiscale_viterbi};
use pathloc::graph::{RggConfig, generate_rgg, random_walk_path};
use pathloc::partition::square_partition;
use pathloc::signal::{NoiseModel, synthesize_observations};

fn main() -> pathloc::Result<()> {
    let graph = generate_rgg(&RggConfig {
        lambda: 0.0,
        radius: 0.06,
        seed: 7,
        fixed_n: Some(2000),
    })?;
    let parts = square_partition(&graph, 10)?;
    let truth = random_walk_path(&graph, 100, 42, None)?;
    let noise = NoiseModel::new(6.0, 1.0)?;
    let obs = synthesize_observations(&graph, std::slice::from_ref(&truth), noise, 1)?;

    let decoded = multiscale_viterbi(&graph, &parts.partition, &parts.supergraph, &obs)?;
    let projected = parts.partition.project(&truth);
    let table = ThetaTable::for_supergraph(noise, &parts.supergraph);
    let bound = bound_hamming_fine(&parts.supergraph, &projected, &table)?;

    let errors = hamming_distance(&decoded.fine.ids, &truth.nodes)?;
    println!(
        "decoded {} steps with {} wrong; expected-error bound {:.3}",
        decoded.fine.len(),
        errors,
        bound.value
    );
    Ok(())
}
