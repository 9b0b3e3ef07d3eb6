//! Experiment harness: the capacity/class/node sweep grid, shape runs,
//! and stable CSV emission.
//!
//! Every cell derives its own seed from the master seed and the cell key,
//! so reruns with the same config are byte-identical and the same
//! communication graph serves all three algorithms in a cell. Cells run
//! on a worker pool; rows are sorted before writing so scheduling cannot
//! leak into the output.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{joint_optimization_baseline, random_baseline};
use crate::comm_graph::{generate_rgg, generate_shape, CommGraph, Shape};
use crate::error::{Error, Result};
use crate::evaluator::evaluate;
use crate::fixtures;
use crate::model_graph::{load_model_graph, ModelGraph};
use crate::partitioner::{partition_model, PartitionScheme, TransferConfig};
use crate::pipeline_sim::simulate;
use crate::placement::{k_path_matching, EdgeClassification, Placement};

pub const CONFIG_FORMAT_VERSION: &str = "edgeslice-config/1";
pub const SWEEP_CSV_VERSION: &str = "edgeslice-sweep/1";
pub const SHAPES_CSV_VERSION: &str = "edgeslice-shapes/1";
pub const PLACEMENT_FORMAT_VERSION: &str = "edgeslice-placement/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    KPath,
    Joint,
    Random,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::KPath => write!(f, "kpath"),
            Algorithm::Joint => write!(f, "joint"),
            Algorithm::Random => write!(f, "random"),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kpath" => Ok(Algorithm::KPath),
            "joint" => Ok(Algorithm::Joint),
            "random" => Ok(Algorithm::Random),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

fn default_version() -> String {
    CONFIG_FORMAT_VERSION.to_string()
}
fn default_models() -> Vec<String> {
    fixtures::FIXTURE_NAMES.iter().map(|s| s.to_string()).collect()
}
fn default_nodes() -> Vec<usize> {
    vec![5, 10, 15, 20, 50]
}
fn default_classes() -> Vec<usize> {
    vec![2, 5, 8, 11, 14, 17, 20]
}
fn default_capacities() -> Vec<u64> {
    vec![64, 128, 256, 512]
}
fn default_trials() -> u32 {
    50
}
fn default_seed() -> u64 {
    42
}
fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::KPath, Algorithm::Joint, Algorithm::Random]
}
fn default_retries() -> usize {
    3
}

/// Sweep configuration; the defaults reproduce the standard grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: String,
    /// Bundled fixture names or paths to model files.
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    #[serde(default = "default_nodes")]
    pub node_counts: Vec<usize>,
    #[serde(default = "default_classes")]
    pub class_counts: Vec<usize>,
    #[serde(default = "default_capacities")]
    pub capacities_mb: Vec<u64>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub transfer: TransferConfig,
    /// Matching failures retry with the class count halved, at most this
    /// many times.
    #[serde(default = "default_retries")]
    pub matching_retries: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        if config.version != CONFIG_FORMAT_VERSION {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: format!(
                    "unsupported config version {:?}, expected {:?}",
                    config.version, CONFIG_FORMAT_VERSION
                ),
            });
        }
        assert!(!config.models.is_empty() && config.trials >= 1);
        Ok(config)
    }
}

/// Resolves a model argument: bundled fixture name first, then a path.
pub fn resolve_model(name_or_path: &str) -> Result<(String, ModelGraph)> {
    if let Some(graph) = fixtures::by_name(name_or_path) {
        return Ok((name_or_path.to_string(), graph));
    }
    let graph = load_model_graph(name_or_path)?;
    let name = Path::new(name_or_path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name_or_path.to_string());
    Ok((name, graph))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Deterministic per-cell seed; the algorithm is excluded so every
/// algorithm in a cell sees the same communication graph.
pub fn cell_seed(
    master: u64,
    model: &str,
    nodes: usize,
    classes: usize,
    capacity_mb: u64,
    trial: u32,
) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&master.to_le_bytes());
    eat(model.as_bytes());
    eat(&(nodes as u64).to_le_bytes());
    eat(&(classes as u64).to_le_bytes());
    eat(&capacity_mb.to_le_bytes());
    eat(&trial.to_le_bytes());
    splitmix64(h)
}

/// Matching with the documented retry policy: halve the class count on
/// failure, at most `retries` times. Returns the placement and the class
/// count that succeeded.
pub fn place_with_retry(
    scheme: &PartitionScheme,
    comm: &CommGraph,
    n_classes: usize,
    seed: u64,
    retries: usize,
) -> Result<(Placement, usize)> {
    let mut classes = n_classes.max(2);
    let mut last_err = None;
    for attempt in 0..=retries {
        match k_path_matching(scheme, comm, classes, seed) {
            Ok(p) => return Ok((p, classes)),
            Err(e) => last_err = Some(e),
        }
        if classes == 2 || attempt == retries {
            break;
        }
        classes = (classes / 2).max(2);
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// One sweep observation; metric fields stay empty when the cell was
/// infeasible or matching failed.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub model: String,
    pub n_nodes: usize,
    pub n_classes: usize,
    pub capacity_mb: u64,
    pub algorithm: Algorithm,
    pub beta_s: Option<f64>,
    pub bound_s: Option<f64>,
    pub ratio: Option<f64>,
    pub seed: u64,
    pub trial: u32,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
}

impl SweepOutput {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {SWEEP_CSV_VERSION}");
        let _ = writeln!(
            out,
            "model,n_nodes,n_classes,capacity_mb,algorithm,beta_s,bound_s,ratio,seed"
        );
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.model,
                r.n_nodes,
                r.n_classes,
                r.capacity_mb,
                r.algorithm,
                fmt(r.beta_s),
                fmt(r.bound_s),
                fmt(r.ratio),
                r.seed
            );
        }
        out
    }

    /// Mean bottleneck per (model, nodes, classes, capacity, algorithm)
    /// cell, skipping empty observations.
    pub fn aggregate_csv_string(&self) -> String {
        let mut cells: HashMap<(String, usize, usize, u64, Algorithm), (f64, usize)> =
            HashMap::new();
        for r in &self.rows {
            if let Some(beta) = r.beta_s {
                let e = cells
                    .entry((r.model.clone(), r.n_nodes, r.n_classes, r.capacity_mb, r.algorithm))
                    .or_insert((0.0, 0));
                e.0 += beta;
                e.1 += 1;
            }
        }
        let mut keys: Vec<_> = cells.keys().cloned().collect();
        keys.sort();
        let mut out = String::new();
        let _ = writeln!(out, "# {SWEEP_CSV_VERSION} aggregate");
        let _ = writeln!(out, "model,n_nodes,n_classes,capacity_mb,algorithm,mean_beta_s,trials_ok");
        for key in keys {
            let (sum, count) = cells[&key];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                key.0,
                key.1,
                key.2,
                key.3,
                key.4,
                sum / count as f64,
                count
            );
        }
        out
    }

    /// Mean bottleneck over the non-empty rows selected by `filter`.
    pub fn mean_beta(&self, filter: impl Fn(&SweepRow) -> bool) -> Option<f64> {
        let betas: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| filter(r))
            .filter_map(|r| r.beta_s)
            .collect();
        if betas.is_empty() {
            None
        } else {
            Some(betas.iter().sum::<f64>() / betas.len() as f64)
        }
    }
}

/// Runs the full grid: every (model, nodes, classes, capacity, algorithm,
/// trial) produces one row. Infeasible partitionings and failed matchings
/// produce rows with empty metrics rather than errors.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    let models: Vec<(String, ModelGraph)> = config
        .models
        .iter()
        .map(|m| resolve_model(m))
        .collect::<Result<_>>()?;
    let points: Vec<_> = models
        .iter()
        .map(|(_, g)| g.candidate_partition_points())
        .collect();

    // Schemes depend only on (model, classes, capacity); compute up front.
    let mut schemes: HashMap<(usize, usize, u64), Option<PartitionScheme>> = HashMap::new();
    for (mi, (_, graph)) in models.iter().enumerate() {
        for &classes in &config.class_counts {
            for &cap in &config.capacities_mb {
                let scheme =
                    partition_model(graph, &points[mi], cap * 1024 * 1024, classes, &config.transfer)
                        .ok();
                schemes.insert((mi, classes, cap), scheme);
            }
        }
    }

    struct Task {
        model_idx: usize,
        nodes: usize,
        classes: usize,
        capacity_mb: u64,
        trial: u32,
        seed: u64,
    }
    let mut tasks = Vec::new();
    for (mi, (name, _)) in models.iter().enumerate() {
        for &nodes in &config.node_counts {
            for &classes in &config.class_counts {
                for &cap in &config.capacities_mb {
                    for trial in 0..config.trials {
                        tasks.push(Task {
                            model_idx: mi,
                            nodes,
                            classes,
                            capacity_mb: cap,
                            trial,
                            seed: cell_seed(config.seed, name, nodes, classes, cap, trial),
                        });
                    }
                }
            }
        }
    }

    let mut rows: Vec<SweepRow> = tasks
        .par_iter()
        .flat_map_iter(|task| {
            let (name, graph) = &models[task.model_idx];
            let pts = &points[task.model_idx];
            let scheme = &schemes[&(task.model_idx, task.classes, task.capacity_mb)];
            let comm = generate_rgg(task.nodes, task.seed);
            let all_bandwidths: Vec<f64> =
                comm.edges_desc().iter().map(|&(w, _, _)| w).collect();
            let kappa = task.capacity_mb * 1024 * 1024;
            config
                .algorithms
                .iter()
                .map(|&algorithm| {
                    let mut row = SweepRow {
                        model: name.clone(),
                        n_nodes: task.nodes,
                        n_classes: task.classes,
                        capacity_mb: task.capacity_mb,
                        algorithm,
                        beta_s: None,
                        bound_s: None,
                        ratio: None,
                        seed: task.seed,
                        trial: task.trial,
                    };
                    let outcome = match algorithm {
                        Algorithm::KPath => scheme.as_ref().and_then(|s| {
                            row.bound_s = Some(crate::evaluator::latency_lower_bound(
                                &s.transfer_sizes(),
                                &all_bandwidths,
                            ));
                            place_with_retry(
                                s,
                                &comm,
                                task.classes,
                                splitmix64(task.seed ^ 0x1),
                                config.matching_retries,
                            )
                            .ok()
                            .map(|(p, _)| (s.clone(), p))
                        }),
                        Algorithm::Joint => joint_optimization_baseline(
                            pts,
                            graph,
                            &comm,
                            kappa,
                            &config.transfer,
                        )
                        .ok(),
                        Algorithm::Random => random_baseline(
                            pts,
                            graph,
                            &comm,
                            kappa,
                            &config.transfer,
                            splitmix64(task.seed ^ 0x2),
                        )
                        .ok(),
                    };
                    if let Some((scheme, placement)) = outcome {
                        if let Ok(report) = evaluate(&scheme, &placement, &comm) {
                            row.beta_s = Some(report.bottleneck_s);
                            row.bound_s = Some(report.lower_bound_s);
                            row.ratio = Some(report.approx_ratio);
                        }
                    }
                    row
                })
                .collect::<Vec<_>>()
        })
        .collect();

    rows.sort_by(|a, b| {
        (&a.model, a.n_nodes, a.n_classes, a.capacity_mb, a.algorithm, a.trial).cmp(&(
            &b.model,
            b.n_nodes,
            b.n_classes,
            b.capacity_mb,
            b.algorithm,
            b.trial,
        ))
    });
    Ok(SweepOutput { rows })
}

/// Shape-comparison configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapesConfig {
    pub model: String,
    pub sizes: Vec<usize>,
    pub shapes: Vec<Shape>,
    pub spacing_m: f64,
    pub capacity_mb: u64,
    pub n_classes: usize,
    pub batches: usize,
    pub seed: u64,
    #[serde(default)]
    pub transfer: TransferConfig,
}

impl Default for ShapesConfig {
    fn default() -> Self {
        ShapesConfig {
            model: "resnet50_like".into(),
            sizes: vec![5, 9, 20],
            shapes: vec![Shape::Ring, Shape::Grid, Shape::Cluster],
            spacing_m: 20.0,
            capacity_mb: 64,
            n_classes: 5,
            batches: 1000,
            seed: 42,
            transfer: TransferConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShapeRow {
    pub shape: Shape,
    pub n_nodes: usize,
    pub throughput_hz: f64,
    pub e2e_latency_s: f64,
}

/// Simulated throughput and latency per (shape, size) under the same
/// partition scheme.
pub fn run_shapes(config: &ShapesConfig) -> Result<Vec<ShapeRow>> {
    let (name, graph) = resolve_model(&config.model)?;
    let points = graph.candidate_partition_points();
    let scheme = partition_model(
        &graph,
        &points,
        config.capacity_mb * 1024 * 1024,
        config.n_classes,
        &config.transfer,
    )?;
    let mut rows = Vec::new();
    for &n in &config.sizes {
        for &shape in &config.shapes {
            let seed = cell_seed(config.seed, &name, n, config.n_classes, config.capacity_mb, 0)
                ^ shape as u64;
            let comm = generate_shape(shape, n, config.spacing_m, seed);
            let (placement, _) =
                place_with_retry(&scheme, &comm, config.n_classes, splitmix64(seed), 3)?;
            let run = simulate(&scheme, &placement, &comm, config.batches, None)?;
            rows.push(ShapeRow {
                shape,
                n_nodes: n,
                throughput_hz: run.measured_throughput_hz,
                e2e_latency_s: run.end_to_end_latency_s,
            });
        }
    }
    Ok(rows)
}

pub fn shapes_csv_string(rows: &[ShapeRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {SHAPES_CSV_VERSION}");
    let _ = writeln!(out, "shape,n_nodes,throughput_hz,e2e_latency_s");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.shape, r.n_nodes, r.throughput_hz, r.e2e_latency_s
        );
    }
    out
}

/// Placement report: node ids plus per-hop bandwidth, class, and latency.
pub fn placement_report_json(
    scheme: &PartitionScheme,
    placement: &Placement,
    comm: &CommGraph,
    algorithm: Algorithm,
    n_classes: usize,
    seed: u64,
) -> Result<String> {
    #[derive(Serialize)]
    struct Hop {
        from_node: usize,
        to_node: usize,
        transfer_bytes: f64,
        bandwidth_mbps: f64,
        bandwidth_class: usize,
        latency_s: f64,
    }
    #[derive(Serialize)]
    struct Report {
        version: &'static str,
        algorithm: String,
        seed: u64,
        node_sequence: Vec<usize>,
        hops: Vec<Hop>,
        bottleneck_s: f64,
        throughput_hz: f64,
        lower_bound_s: f64,
        approx_ratio: f64,
    }
    let report = evaluate(scheme, placement, comm)?;
    let classes = EdgeClassification::fit(comm, n_classes);
    let (carried, _) = scheme.carried();
    let hops = placement
        .node_sequence
        .windows(2)
        .zip(carried.iter().zip(&report.per_hop_latency_s))
        .map(|(w, (&bytes, &latency))| {
            let bw = comm.bandwidth(w[0], w[1]);
            Hop {
                from_node: w[0],
                to_node: w[1],
                transfer_bytes: bytes,
                bandwidth_mbps: bw,
                bandwidth_class: classes.class_of(bw).0,
                latency_s: latency,
            }
        })
        .collect();
    Ok(serde_json::to_string_pretty(&Report {
        version: PLACEMENT_FORMAT_VERSION,
        algorithm: algorithm.to_string(),
        seed,
        node_sequence: placement.node_sequence.clone(),
        hops,
        bottleneck_s: report.bottleneck_s,
        throughput_hz: report.throughput_hz,
        lower_bound_s: report.lower_bound_s,
        approx_ratio: report.approx_ratio,
    })
    .expect("report serialization cannot fail"))
}
