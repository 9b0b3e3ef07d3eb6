//! Communication graphs: random geometric clusters and fixed shapes.
//!
//! Nodes are points on a plane served by one WiFi router at the origin;
//! link bandwidth follows Shannon capacity with inverse-square signal
//! decay. The cluster is a complete weighted graph: every node pair gets a
//! bandwidth from its displacement.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};

pub const COMM_FORMAT_VERSION: &str = "edgeslice-comm/1";

/// Router range in meters.
pub const WIFI_RANGE_B: f64 = 150.0;
/// Signal constant calibrated so that bandwidth at 80 m is 5.5 Mbps.
pub const SIGNAL_CONSTANT_A: f64 = 283_230.0;
/// Positions keep |x|, |y| > 1, so any pair is at least sqrt(2) apart;
/// pairwise squared distances are clamped to this floor.
pub const MIN_PAIR_DISTANCE_SQ: f64 = 2.0;

/// Shannon-capacity bandwidth in Mbps at squared distance `dsq`, with the
/// domain floor applied.
pub fn pair_bandwidth(dsq: f64, a: f64) -> f64 {
    (1.0 + a / dsq.max(MIN_PAIR_DISTANCE_SQ)).log2()
}

/// Bandwidth of a device at distance `d` from the router.
pub fn bandwidth_at_distance(d: f64, a: f64) -> Result<f64> {
    if !(d > 1.0 && d < WIFI_RANGE_B) {
        return Err(Error::Domain { x: d, y: 0.0 });
    }
    Ok((1.0 + a / (d * d)).log2())
}

/// Bandwidth of a device at position (x, y); both coordinates must lie in
/// (-B, -1) or (1, B).
pub fn bandwidth_at(x: f64, y: f64, a: f64) -> Result<f64> {
    let valid = |c: f64| c.abs() > 1.0 && c.abs() < WIFI_RANGE_B;
    if !valid(x) || !valid(y) {
        return Err(Error::Domain { x, y });
    }
    Ok((1.0 + a / (x * x + y * y)).log2())
}

/// Draws one coordinate uniformly over (-B, -1) union (1, B).
fn sample_coordinate(rng: &mut Pcg64) -> f64 {
    let magnitude = rng.gen_range(1.0..WIFI_RANGE_B);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

pub(crate) fn sample_position(rng: &mut Pcg64) -> (f64, f64) {
    (sample_coordinate(rng), sample_coordinate(rng))
}

/// Node layouts mirroring common physical deployments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ring,
    Grid,
    Cluster,
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Ring => write!(f, "ring"),
            Shape::Grid => write!(f, "grid"),
            Shape::Cluster => write!(f, "cluster"),
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ring" => Ok(Shape::Ring),
            "grid" => Ok(Shape::Grid),
            "cluster" => Ok(Shape::Cluster),
            other => Err(format!("unknown shape {other:?}")),
        }
    }
}

/// Complete weighted graph of compute nodes.
#[derive(Debug, Clone)]
pub struct CommGraph {
    positions: Vec<(f64, f64)>,
    bandwidth: Vec<f64>,
    wifi_range: f64,
    signal_constant: f64,
}

impl CommGraph {
    fn from_positions(positions: Vec<(f64, f64)>) -> Self {
        let n = positions.len();
        let mut bandwidth = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = positions[i].0 - positions[j].0;
                let dy = positions[i].1 - positions[j].1;
                let w = pair_bandwidth(dx * dx + dy * dy, SIGNAL_CONSTANT_A);
                bandwidth[i * n + j] = w;
                bandwidth[j * n + i] = w;
            }
        }
        CommGraph {
            positions,
            bandwidth,
            wifi_range: WIFI_RANGE_B,
            signal_constant: SIGNAL_CONSTANT_A,
        }
    }

    /// Graph with an explicit symmetric bandwidth matrix and no meaningful
    /// positions; handy for hand-built topologies.
    pub fn from_bandwidth_matrix(n: usize, weight: impl Fn(usize, usize) -> f64) -> Self {
        let mut bandwidth = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let w = weight(i, j);
                assert!(w > 0.0, "bandwidths must be positive");
                bandwidth[i * n + j] = w;
                bandwidth[j * n + i] = w;
            }
        }
        CommGraph {
            positions: vec![(0.0, 0.0); n],
            bandwidth,
            wifi_range: WIFI_RANGE_B,
            signal_constant: SIGNAL_CONSTANT_A,
        }
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, i: usize) -> (f64, f64) {
        self.positions[i]
    }

    pub fn bandwidth(&self, i: usize, j: usize) -> f64 {
        self.bandwidth[i * self.node_count() + j]
    }

    pub fn max_bandwidth(&self) -> f64 {
        let n = self.node_count();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.bandwidth(i, j));
            }
        }
        best
    }

    /// Undirected edges `(weight, i, j)` sorted by descending weight, with
    /// index order breaking ties for determinism.
    pub fn edges_desc(&self) -> Vec<(f64, usize, usize)> {
        let n = self.node_count();
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((self.bandwidth(i, j), i, j));
            }
        }
        edges.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("bandwidths are finite")
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        edges
    }

    pub fn to_json_string(&self) -> String {
        let file = CommFile {
            version: COMM_FORMAT_VERSION.to_string(),
            wifi_range: self.wifi_range,
            signal_constant: self.signal_constant,
            positions: self.positions.clone(),
            bandwidth: self.bandwidth.clone(),
        };
        serde_json::to_string_pretty(&file).expect("comm graph serialization cannot fail")
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: CommFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            reason: e.to_string(),
        })?;
        if file.version != COMM_FORMAT_VERSION {
            return Err(Error::Parse {
                path: origin.to_string(),
                reason: format!(
                    "unsupported format version {:?}, expected {:?}",
                    file.version, COMM_FORMAT_VERSION
                ),
            });
        }
        let n = file.positions.len();
        if file.bandwidth.len() != n * n {
            return Err(Error::Parse {
                path: origin.to_string(),
                reason: "bandwidth matrix does not match node count".into(),
            });
        }
        Ok(CommGraph {
            positions: file.positions,
            bandwidth: file.bandwidth,
            wifi_range: file.wifi_range,
            signal_constant: file.signal_constant,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CommFile {
    version: String,
    wifi_range: f64,
    signal_constant: f64,
    positions: Vec<(f64, f64)>,
    bandwidth: Vec<f64>,
}

/// Random geometric cluster: node positions i.i.d. uniform over the
/// router's service annulus, bandwidths from pairwise displacement.
pub fn generate_rgg(n: usize, seed: u64) -> CommGraph {
    assert!(n >= 2);
    let mut rng = Pcg64::seed_from_u64(seed);
    let positions: Vec<(f64, f64)> = (0..n).map(|_| sample_position(&mut rng)).collect();
    CommGraph::from_positions(positions)
}

/// Fixed-shape cluster. `spacing` is the grid lattice constant; ring and
/// cluster layouts occupy the same footprint area (n * spacing^2) so the
/// shapes stay comparable at a given size.
pub fn generate_shape(shape: Shape, n: usize, spacing: f64, seed: u64) -> CommGraph {
    assert!(n >= 2 && spacing > 0.0);
    let positions = match shape {
        Shape::Ring => {
            let radius = spacing * (n as f64 / std::f64::consts::PI).sqrt();
            (0..n)
                .map(|i| {
                    let angle = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    (radius * angle.cos(), radius * angle.sin())
                })
                .collect()
        }
        Shape::Grid => {
            let (rows, cols) = most_square_factors(n);
            let mut positions = Vec::with_capacity(n);
            for r in 0..rows {
                for c in 0..cols {
                    positions.push((c as f64 * spacing, r as f64 * spacing));
                }
            }
            positions
        }
        Shape::Cluster => {
            let mut rng = Pcg64::seed_from_u64(seed);
            let sigma = spacing;
            let separation = 10.0 * sigma;
            let first = n.div_ceil(2);
            let mut positions = Vec::with_capacity(n);
            for i in 0..n {
                let center_x = if i < first { 0.0 } else { separation };
                let (gx, gy) = gaussian_pair(&mut rng);
                positions.push((center_x + sigma * gx, sigma * gy));
            }
            positions
        }
    };
    CommGraph::from_positions(positions)
}

/// rows x cols with rows the largest divisor of n at most sqrt(n):
/// 5 -> 1x5, 9 -> 3x3, 20 -> 4x5.
fn most_square_factors(n: usize) -> (usize, usize) {
    let mut rows = 1;
    for d in 1..=n {
        if d * d > n {
            break;
        }
        if n.is_multiple_of(d) {
            rows = d;
        }
    }
    (rows, n / rows)
}

fn gaussian_pair(rng: &mut Pcg64) -> (f64, f64) {
    // Box-Muller transform.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}
