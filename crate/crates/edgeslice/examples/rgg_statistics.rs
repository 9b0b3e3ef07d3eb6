//! Analytic statistics of the random communication graph, with a
//! Monte-Carlo cross-check.
//!
//! cargo run --release -p edgeslice --example rgg_statistics

use edgeslice::rgg_stats;

fn main() {
    print!("{}", rgg_stats::statistics_report(1000, 1_000_000, 42));
}
