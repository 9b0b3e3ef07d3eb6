//! Full pipeline on one random cluster: partition, match, evaluate.
//!
//! cargo run --release -p edgeslice --example place_pipeline

use edgeslice::comm_graph::generate_rgg;
use edgeslice::evaluator::evaluate;
use edgeslice::partitioner::{partition_model, TransferConfig};
use edgeslice::placement::k_path_matching;
use edgeslice::sweep::resolve_model;

fn main() -> Result<(), edgeslice::Error> {
    let (name, graph) = resolve_model("inception_resnet_v2_like")?;
    let points = graph.candidate_partition_points();
    let scheme = partition_model(
        &graph,
        &points,
        64 * 1024 * 1024,
        11,
        &TransferConfig::default(),
    )?;
    println!(
        "{name}: {} candidates, {} pipeline segments",
        points.len(),
        scheme.partitions.len() - 1
    );

    let comm = generate_rgg(50, 0xED6E);
    let placement = k_path_matching(&scheme, &comm, 11, 7)?;
    let report = evaluate(&scheme, &placement, &comm)?;
    println!("node sequence: {:?}", placement.node_sequence);
    for (hop, latency) in report.per_hop_latency_s.iter().enumerate() {
        let (a, b) = (
            placement.node_sequence[hop],
            placement.node_sequence[hop + 1],
        );
        println!(
            "  hop {hop}: {a:>2} -> {b:>2} at {:>6.2} Mbps, {latency:.4} s",
            comm.bandwidth(a, b)
        );
    }
    println!(
        "bottleneck {:.4} s, throughput {:.3} Hz, lower bound {:.4} s (ratio {:.3})",
        report.bottleneck_s, report.throughput_hz, report.lower_bound_s, report.approx_ratio
    );
    Ok(())
}
