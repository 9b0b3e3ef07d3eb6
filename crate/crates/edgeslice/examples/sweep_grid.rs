//! A reduced experiment sweep written as CSV, mirroring the full grid's
//! structure.
//!
//! cargo run --release -p edgeslice --example sweep_grid

use edgeslice::sweep::{run_sweep, ExperimentConfig};

fn main() -> Result<(), edgeslice::Error> {
    let config = ExperimentConfig {
        node_counts: vec![5, 10, 20],
        class_counts: vec![2, 8, 20],
        capacities_mb: vec![64, 256],
        trials: 10,
        ..ExperimentConfig::default()
    };
    let output = run_sweep(&config)?;
    std::fs::create_dir_all("results")?;
    std::fs::write("results/sweep_small.csv", output.to_csv_string())?;
    std::fs::write("results/sweep_small_aggregate.csv", output.aggregate_csv_string())?;
    println!(
        "wrote {} rows to results/sweep_small.csv",
        output.rows.len()
    );

    let kpath_50 = output.mean_beta(|r| {
        r.algorithm == edgeslice::sweep::Algorithm::KPath && r.n_nodes == 20
    });
    let random_50 = output.mean_beta(|r| {
        r.algorithm == edgeslice::sweep::Algorithm::Random && r.n_nodes == 20
    });
    if let (Some(k), Some(r)) = (kpath_50, random_50) {
        println!("20-node cells: mean k-path beta {k:.4} s, mean random beta {r:.4} s");
    }
    Ok(())
}
