//! Partition a bundled model at several node capacities and print the
//! chosen pipeline segments.
//!
//! cargo run --release -p edgeslice --example partition_model

use edgeslice::partitioner::{partition_model, TransferConfig};
use edgeslice::sweep::resolve_model;

fn main() -> Result<(), edgeslice::Error> {
    let (name, graph) = resolve_model("resnet50_like")?;
    let points = graph.candidate_partition_points();
    println!(
        "{name}: {} layers, candidate partition points: {:?}",
        graph.layer_count(),
        points.ids(&graph)
    );

    let cfg = TransferConfig::default();
    for capacity_mb in [64u64, 128, 256, 512] {
        match partition_model(&graph, &points, capacity_mb * 1024 * 1024, 8, &cfg) {
            Ok(scheme) => {
                println!("\ncapacity {capacity_mb} MB -> {} segments:", scheme.partitions.len() - 1);
                for p in &scheme.partitions {
                    let kind = if p.is_dispatcher { "dispatcher" } else { "segment" };
                    println!(
                        "  {kind:<10} boundary {:<10} {:>8.1} KiB transfer, {:>6.1} MiB resident, class {}",
                        p.boundary_layer,
                        p.transfer_bytes / 1024.0,
                        p.memory_bytes as f64 / (1024.0 * 1024.0),
                        p.class
                    );
                }
            }
            Err(e) => println!("\ncapacity {capacity_mb} MB -> {e}"),
        }
    }
    Ok(())
}
