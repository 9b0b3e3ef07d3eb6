//! Simulated pipeline throughput across ring, grid, and cluster layouts.
//!
//! cargo run --release -p edgeslice --example shape_throughput

use edgeslice::sweep::{run_shapes, shapes_csv_string, ShapesConfig};

fn main() -> Result<(), edgeslice::Error> {
    let rows = run_shapes(&ShapesConfig::default())?;
    print!("{}", shapes_csv_string(&rows));
    Ok(())
}
