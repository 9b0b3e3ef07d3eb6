//! Closed-form statistics of the random geometric communication graph.
//!
//! With device coordinates X, Y independent and uniform over
//! (-B, -1) union (1, B), the router-link bandwidth r(X, Y) has computable
//! moments. From the mean bandwidth a threshold radius follows, and with
//! it the expected degree, the fraction of vertices in the largest
//! connected cluster, and the cluster coefficient of the above-threshold
//! subgraph.

use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::comm_graph::{sample_position, SIGNAL_CONSTANT_A, WIFI_RANGE_B};

/// RGG summary: bandwidth moments plus clustering characteristics of the
/// above-mean-bandwidth subgraph.
#[derive(Debug, Clone)]
pub struct RggStatistics {
    pub mean_mu: f64,
    pub stddev_sigma: f64,
    pub cv: f64,
    pub cluster_coefficient: f64,
    /// Distance at which the mean bandwidth is reached, scaled by B.
    pub threshold_radius: f64,
    /// Largest-cluster fraction P(alpha) at the 50-node reference size.
    pub largest_cluster_fraction: f64,
}

fn router_bandwidth(x: f64, y: f64) -> f64 {
    (1.0 + SIGNAL_CONSTANT_A / (x * x + y * y)).log2()
}

/// Midpoint-rule quadrature of E[r] and E[r^2] over the four rectangular
/// quadrants of the position domain, `resolution` cells per axis.
pub fn quadrature_moments(resolution: usize) -> (f64, f64) {
    assert!(resolution >= 10);
    let b = WIFI_RANGE_B;
    let h = (b - 1.0) / resolution as f64;
    let density = 1.0 / (2.0 * (b - 1.0));
    let weight = density * density * h * h;
    let mut mean = 0.0;
    let mut second = 0.0;
    for &sx in &[-1.0, 1.0] {
        for &sy in &[-1.0, 1.0] {
            for i in 0..resolution {
                let x = sx * (1.0 + (i as f64 + 0.5) * h);
                for j in 0..resolution {
                    let y = sy * (1.0 + (j as f64 + 0.5) * h);
                    let r = router_bandwidth(x, y);
                    mean += r * weight;
                    second += r * r * weight;
                }
            }
        }
    }
    (mean, second)
}

/// Distance at which the router bandwidth equals `mu`, scaled to B.
pub fn threshold_radius(mu: f64) -> f64 {
    (SIGNAL_CONSTANT_A / (2f64.powf(mu) - 1.0)).sqrt() / WIFI_RANGE_B
}

/// Expected degree of an n-vertex RGG with normalized radius r in 2-D.
pub fn mean_degree(n: usize, r: f64) -> f64 {
    // unit-ball volume pi * r^2, doubled per dimension
    let a = std::f64::consts::PI * r * r;
    let b = 4.0 * a;
    n as f64 * b
}

/// Fraction of vertices in the largest connected cluster for expected
/// degree `alpha`, truncated at n terms.
pub fn largest_cluster_fraction(n: usize, alpha: f64) -> f64 {
    let ln_q = alpha.ln() - alpha;
    let mut sum = 0.0;
    let mut ln_factorial = 0.0;
    for k in 1..=n {
        ln_factorial += (k as f64).ln();
        let ln_term = (k as f64 - 1.0) * (k as f64).ln() - ln_factorial + k as f64 * ln_q;
        sum += ln_term.exp();
    }
    1.0 - sum / alpha
}

/// Probability that two vertices sharing a neighbor are adjacent in a 2-D
/// RGG; independent of n.
pub fn cluster_coefficient() -> f64 {
    // H(1) in two dimensions reduces to a single term with
    // Gamma(1) = 1 and Gamma(3/2) = sqrt(pi) / 2.
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let h1 = (1.0 / sqrt_pi) * (2.0 / sqrt_pi) * 0.75f64.powf(1.5);
    1.0 - h1
}

/// Full analytic summary at the given quadrature resolution per axis.
pub fn analytic_rgg_statistics(resolution: usize) -> RggStatistics {
    let (mu, second) = quadrature_moments(resolution);
    let sigma = (second - mu * mu).sqrt();
    let r = threshold_radius(mu);
    RggStatistics {
        mean_mu: mu,
        stddev_sigma: sigma,
        cv: sigma / mu,
        cluster_coefficient: cluster_coefficient(),
        threshold_radius: r,
        largest_cluster_fraction: largest_cluster_fraction(50, mean_degree(50, r)),
    }
}

/// Human-readable statistics dump for the CLI.
pub fn statistics_report(resolution: usize, mc_samples: usize, seed: u64) -> String {
    use std::fmt::Write;
    let stats = analytic_rgg_statistics(resolution);
    let mut out = String::new();
    let _ = writeln!(out, "mean bandwidth mu        = {:.4} Mbps", stats.mean_mu);
    let _ = writeln!(out, "stddev sigma             = {:.4} Mbps", stats.stddev_sigma);
    let _ = writeln!(out, "coefficient of variation = {:.4}", stats.cv);
    let _ = writeln!(out, "threshold radius r       = {:.4}", stats.threshold_radius);
    let _ = writeln!(out, "cluster coefficient C    = {:.4}", stats.cluster_coefficient);
    for n in [10usize, 50] {
        let alpha = mean_degree(n, stats.threshold_radius);
        let p = largest_cluster_fraction(n, alpha);
        let _ = writeln!(out, "N = {n:>2}: mean degree alpha = {alpha:.3}, P(alpha) = {p}");
    }
    if mc_samples > 0 {
        let empirical = monte_carlo_mean_bandwidth(mc_samples, seed);
        let _ = writeln!(
            out,
            "monte carlo mean ({mc_samples} samples, seed {seed}) = {empirical:.4} Mbps"
        );
    }
    out
}

/// Empirical mean router bandwidth over `samples` positions drawn the same
/// way the RGG generator draws them.
pub fn monte_carlo_mean_bandwidth(samples: usize, seed: u64) -> f64 {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let (x, y) = sample_position(&mut rng);
        total += router_bandwidth(x, y);
    }
    total / samples as f64
}
