//! Compare the k-path matcher against the random and joint-optimization
//! baselines on one experiment cell.
//!
//! cargo run --release -p edgeslice --example baseline_comparison

use edgeslice::baselines::{joint_optimization_baseline, random_baseline};
use edgeslice::comm_graph::generate_rgg;
use edgeslice::evaluator::evaluate;
use edgeslice::partitioner::{partition_model, TransferConfig};
use edgeslice::placement::k_path_matching;
use edgeslice::sweep::resolve_model;

fn main() -> Result<(), edgeslice::Error> {
    let (name, graph) = resolve_model("inception_resnet_v2_like")?;
    let points = graph.candidate_partition_points();
    let cfg = TransferConfig::default();
    let kappa = 64 * 1024 * 1024;
    let scheme = partition_model(&graph, &points, kappa, 11, &cfg)?;

    println!("{name} on 50-node clusters, 64 MB capacity, mean over 25 trials\n");
    let trials = 25u64;
    let (mut kpath, mut joint, mut random) = (0.0, 0.0, 0.0);
    for seed in 0..trials {
        let comm = generate_rgg(50, 0xBA5E + seed);
        let p = k_path_matching(&scheme, &comm, 11, seed)?;
        kpath += evaluate(&scheme, &p, &comm)?.bottleneck_s;
        let (s, p) = joint_optimization_baseline(&points, &graph, &comm, kappa, &cfg)?;
        joint += evaluate(&s, &p, &comm)?.bottleneck_s;
        let (s, p) = random_baseline(&points, &graph, &comm, kappa, &cfg, seed)?;
        random += evaluate(&s, &p, &comm)?.bottleneck_s;
    }
    let n = trials as f64;
    println!("k-path matching : {:.4} s", kpath / n);
    println!("joint greedy    : {:.4} s ({:.2}x k-path)", joint / n, joint / kpath);
    println!("random          : {:.4} s ({:.2}x k-path)", random / n, random / kpath);
    Ok(())
}
