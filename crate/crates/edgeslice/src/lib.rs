//! Split a DNN layer graph into memory-feasible pipeline segments and
//! place them on a simulated wireless edge cluster so the slowest
//! communication hop is as fast as possible.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`model_graph`] finds the candidate partition points of a layer DAG:
//!    the vertices where a cut separates the model cleanly.
//! 2. [`partitioner`] picks the contiguous segments between candidates
//!    that fit node memory and move the least data, and prepends the
//!    dispatcher stage that feeds input batches.
//! 3. [`comm_graph`] models the cluster: a complete graph of nodes with
//!    Shannon-capacity bandwidths from their positions. [`rgg_stats`]
//!    derives its closed-form statistics.
//! 4. [`placement`] matches transfer-size classes to bandwidth classes by
//!    color-coding k-path search under bisected thresholds.
//!
//! [`evaluator`] scores any (scheme, placement) pair and houses the
//! exhaustive oracle; [`baselines`] holds the comparison algorithms;
//! [`pipeline_sim`] measures steady-state throughput by discrete-event
//! simulation; [`sweep`] drives full experiment grids with deterministic
//! seeding.
//!
//! The `examples/` directory has one runnable program per capability:
//!
//! ```text
//! cargo run --release -p edgeslice --example partition_model
//! cargo run --release -p edgeslice --example place_pipeline
//! cargo run --release -p edgeslice --example rgg_statistics
//! cargo run --release -p edgeslice --example baseline_comparison
//! cargo run --release -p edgeslice --example sweep_grid
//! cargo run --release -p edgeslice --example shape_throughput
//! cargo run --release -p edgeslice --example oracle_gap
//! cargo run --release -p edgeslice --example generate_fixtures
//! ```

pub mod baselines;
pub mod comm_graph;
pub mod error;
pub mod evaluator;
pub mod fixtures;
pub mod model_graph;
pub mod partitioner;
pub mod pipeline_sim;
pub mod placement;
pub mod rgg_stats;
pub mod sweep;

pub use error::{Error, Result};
pub use evaluator::LatencyReport;
pub use model_graph::{CandidatePoints, Layer, ModelGraph};
pub use partitioner::{PartitionScheme, TransferConfig};
pub use placement::Placement;
