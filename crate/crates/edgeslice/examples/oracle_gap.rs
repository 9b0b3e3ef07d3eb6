//! Approximation gap of the k-path pipeline against the exhaustive
//! optimum on small instances.
//!
//! cargo run --release -p edgeslice --example oracle_gap

use edgeslice::comm_graph::generate_rgg;
use edgeslice::evaluator::{brute_force_optimum, evaluate};
use edgeslice::model_graph::{Layer, ModelGraph};
use edgeslice::partitioner::{partition_model, TransferConfig};
use edgeslice::placement::k_path_matching;

fn small_chain(seed: u64) -> ModelGraph {
    // Deterministic pseudo-random chain with a dominant input tensor.
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut next = |lo: u64, hi: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        lo + state % (hi - lo)
    };
    let n = 5 + (seed % 3) as usize;
    let mut layers = vec![Layer {
        id: "l0".into(),
        output_elements: 120_000,
        memory_bytes: next(8, 32) * 1024 * 1024,
    }];
    for i in 1..n {
        layers.push(Layer {
            id: format!("l{i}"),
            output_elements: next(1_000, 60_000),
            memory_bytes: next(8, 32) * 1024 * 1024,
        });
    }
    let edges: Vec<(String, String)> = (0..n - 1)
        .map(|i| (format!("l{i}"), format!("l{}", i + 1)))
        .collect();
    ModelGraph::from_parts(layers, &edges).expect("chain is valid")
}

fn main() -> Result<(), edgeslice::Error> {
    let cfg = TransferConfig::default();
    let kappa = 64 * 1024 * 1024;
    let mut ratios = Vec::new();
    for seed in 0..30u64 {
        let graph = small_chain(seed);
        let points = graph.candidate_partition_points();
        let comm = generate_rgg(8, 0x06AC + seed);
        let Ok((_, _, oracle)) = brute_force_optimum(&points, &graph, &comm, kappa, 5, &cfg)
        else {
            continue;
        };
        let scheme = partition_model(&graph, &points, kappa, 5, &cfg)?;
        let placement = k_path_matching(&scheme, &comm, 5, seed)?;
        let beta = evaluate(&scheme, &placement, &comm)?.bottleneck_s;
        let ratio = beta / oracle.bottleneck_s;
        ratios.push(ratio);
        println!("instance {seed:>2}: k-path {beta:.4} s, optimum {:.4} s, ratio {ratio:.3}", oracle.bottleneck_s);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    println!("\nmean approximation ratio over {} instances: {mean:.3}", ratios.len());
    Ok(())
}
