//! Transfer sizes, size classes, and optimal contiguous partitioning.
//!
//! Candidate partition points induce a DAG of memory-feasible contiguous
//! ranges; the cheapest root-to-leaf path through it is the partitioning
//! that moves the least data between pipeline stages. A virtual dispatcher
//! partition, which feeds input batches to the first stage, is prepended to
//! the chosen partitions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_graph::{CandidatePoints, ModelGraph};

pub const PARTS_FORMAT_VERSION: &str = "edgeslice-parts/1";

/// Modeled compression: float32 tensors shrunk by a scalar ratio.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransferConfig {
    pub bytes_per_element: f64,
    pub compression_ratio: f64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            bytes_per_element: 4.0,
            compression_ratio: 3.024,
        }
    }
}

/// Compressed bytes that cross a cut placed after a layer with
/// `output_elements` outputs.
pub fn transfer_size_bytes(output_elements: u64, cfg: &TransferConfig) -> f64 {
    assert!(cfg.compression_ratio > 0.0);
    output_elements as f64 * cfg.bytes_per_element / cfg.compression_ratio
}

/// Discrete size class; higher means larger transfers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassLabel(pub usize);

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Equal-frequency binning of transfer sizes. Duplicate quantile
/// breakpoints collapse, so the effective class count can be lower than
/// requested.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferClassifier {
    n_classes: usize,
    breakpoints: Vec<f64>,
}

impl TransferClassifier {
    pub fn fit(sizes: &[f64], n_classes: usize) -> Self {
        assert!(!sizes.is_empty() && n_classes >= 2);
        let mut sorted = sizes.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("sizes must be finite"));
        let mut breakpoints = Vec::new();
        for j in 1..n_classes {
            let idx = (j * sorted.len()) / n_classes;
            let bp = sorted[idx.min(sorted.len() - 1)];
            if breakpoints.last().is_none_or(|&last| bp > last) && bp > sorted[0] {
                breakpoints.push(bp);
            }
        }
        TransferClassifier { n_classes, breakpoints }
    }

    pub fn from_breakpoints(n_classes: usize, breakpoints: Vec<f64>) -> Self {
        TransferClassifier { n_classes, breakpoints }
    }

    pub fn classify(&self, size: f64) -> ClassLabel {
        ClassLabel(self.breakpoints.iter().filter(|&&bp| size >= bp).count())
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn top_class(&self) -> ClassLabel {
        ClassLabel(self.breakpoints.len())
    }
}

/// Doane's histogram bin-count estimate, used as guidance for how many
/// size classes a model's transfer distribution needs.
pub fn doane_bin_count(values: &[f64]) -> usize {
    let n = values.len() as f64;
    if values.len() < 3 {
        return 1;
    }
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 1;
    }
    let g1 = m3 / m2.powf(1.5);
    let sigma_g1 = (6.0 * (n - 2.0) / ((n + 1.0) * (n + 3.0))).sqrt();
    (1.0 + n.log2() + (1.0 + g1.abs() / sigma_g1).log2()).round().max(1.0) as usize
}

/// DAG of memory-feasible contiguous candidate ranges. Vertices are
/// inclusive index ranges into the candidate list; edges join ranges that
/// are adjacent in it.
#[derive(Debug, Clone)]
pub struct PartitionGraph {
    ranges: Vec<(usize, usize)>,
    range_memory: Vec<u64>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    n_points: usize,
    point_transfers: Vec<f64>,
    point_ids: Vec<String>,
    capacity_bytes: u64,
}

impl PartitionGraph {
    pub fn vertex_count(&self) -> usize {
        self.ranges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    pub fn point_transfers(&self) -> &[f64] {
        &self.point_transfers
    }

    pub fn point_id(&self, idx: usize) -> &str {
        &self.point_ids[idx]
    }

    pub fn range_memory(&self, v: usize) -> u64 {
        self.range_memory[v]
    }

    pub fn capacity_bytes(&self) -> u64 {
        self.capacity_bytes
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.ranges[v].1 == self.n_points - 1
    }
}

/// Builds the partition graph for the given candidate points under a node
/// memory capacity of `kappa_bytes`.
pub fn build_partition_graph(
    points: &CandidatePoints,
    graph: &ModelGraph,
    kappa_bytes: u64,
    cfg: &TransferConfig,
) -> Result<PartitionGraph> {
    assert!(!points.is_empty());
    let k = points.len();
    let depths = points.depths();

    // Memory of a range is the memory of every layer whose depth falls in
    // (depth of the range start's predecessor, depth of the range end].
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let mut mem_at_depth = vec![0u64; max_depth + 1];
    for v in 0..graph.layer_count() {
        mem_at_depth[depths[v]] += graph.layer(v).memory_bytes;
    }
    let mut cum = vec![0u64; max_depth + 2];
    for d in 0..=max_depth {
        cum[d + 1] = cum[d] + mem_at_depth[d];
    }
    let range_mem = |i: usize, j: usize| -> u64 {
        let hi = cum[points.depth_of_point(j) + 1];
        let lo = if i == 0 { 0 } else { cum[points.depth_of_point(i - 1) + 1] };
        hi - lo
    };

    for j in 0..k {
        let w = range_mem(j, j);
        if w >= kappa_bytes {
            return Err(Error::Infeasible {
                capacity_bytes: kappa_bytes,
                reason: format!(
                    "minimal partition at point {:?} needs {} B",
                    graph.layer_id(points.point(j)),
                    w
                ),
            });
        }
    }

    let mut ranges = Vec::new();
    let mut range_memory = Vec::new();
    let mut starting_at: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in i..k {
            let w = range_mem(i, j);
            if w < kappa_bytes {
                starting_at[i].push(ranges.len());
                ranges.push((i, j));
                range_memory.push(w);
            } else {
                // Memory only grows with the range; no larger end fits.
                break;
            }
        }
    }

    let children: Vec<Vec<usize>> = ranges
        .iter()
        .map(|&(_, j)| {
            if j + 1 < k {
                starting_at[j + 1].clone()
            } else {
                Vec::new()
            }
        })
        .collect();
    let roots = starting_at[0].clone();

    let point_transfers: Vec<f64> = (0..k)
        .map(|idx| transfer_size_bytes(graph.layer(points.point(idx)).output_elements, cfg))
        .collect();
    let point_ids: Vec<String> = (0..k)
        .map(|idx| graph.layer_id(points.point(idx)).to_string())
        .collect();

    Ok(PartitionGraph {
        ranges,
        range_memory,
        children,
        roots,
        n_points: k,
        point_transfers,
        point_ids,
        capacity_bytes: kappa_bytes,
    })
}

/// One pipeline stage: a contiguous candidate range, or the dispatcher.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Partition {
    pub range: Option<(usize, usize)>,
    pub memory_bytes: u64,
    pub boundary_layer: String,
    pub transfer_bytes: f64,
    pub class: ClassLabel,
    pub is_dispatcher: bool,
}

/// A chosen partitioning: the dispatcher followed by the model segments in
/// execution order, with their transfer sizes and size classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub partitions: Vec<Partition>,
    pub n_classes: usize,
    pub breakpoints: Vec<f64>,
    /// Transfer sizes of every candidate point, kept so the scheme can be
    /// re-classified at a different class count.
    pub candidate_transfers: Vec<f64>,
    pub total_cost: f64,
}

impl PartitionScheme {
    /// Transfer sizes S, one per partition (dispatcher first).
    pub fn transfer_sizes(&self) -> Vec<f64> {
        self.partitions.iter().map(|p| p.transfer_bytes).collect()
    }

    pub fn classes(&self) -> Vec<ClassLabel> {
        self.partitions.iter().map(|p| p.class).collect()
    }

    /// Transfers that actually cross a network hop: everything except the
    /// terminal partition's output, which returns to the dispatcher and is
    /// negligible by comparison.
    pub fn carried(&self) -> (Vec<f64>, Vec<ClassLabel>) {
        let s = self.transfer_sizes();
        let c = self.classes();
        let n = s.len().saturating_sub(1);
        (s[..n].to_vec(), c[..n].to_vec())
    }

    pub fn classifier(&self) -> TransferClassifier {
        TransferClassifier::from_breakpoints(self.n_classes, self.breakpoints.clone())
    }

    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct PartsFile<'a> {
            version: &'static str,
            #[serde(flatten)]
            scheme: &'a PartitionScheme,
        }
        serde_json::to_string_pretty(&PartsFile {
            version: PARTS_FORMAT_VERSION,
            scheme: self,
        })
        .expect("scheme serialization cannot fail")
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct PartsFile {
            version: String,
            #[serde(flatten)]
            scheme: PartitionScheme,
        }
        let file: PartsFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            reason: e.to_string(),
        })?;
        if file.version != PARTS_FORMAT_VERSION {
            return Err(Error::Parse {
                path: origin.to_string(),
                reason: format!(
                    "unsupported format version {:?}, expected {:?}",
                    file.version, PARTS_FORMAT_VERSION
                ),
            });
        }
        Ok(file.scheme)
    }
}

/// Suffix path from a vertex to a leaf: cost plus the range sequence.
#[derive(Debug, Clone, PartialEq)]
struct Suffix {
    cost: f64,
    ends: Vec<usize>,
}

impl Suffix {
    fn better_than(&self, other: &Suffix) -> bool {
        if self.cost != other.cost {
            return self.cost < other.cost;
        }
        if self.ends.len() != other.ends.len() {
            return self.ends.len() < other.ends.len();
        }
        self.ends < other.ends
    }
}

fn min_cost_path(
    pg: &PartitionGraph,
    v: usize,
    memo: &mut Option<HashMap<usize, Suffix>>,
) -> Suffix {
    let (_, end) = pg.ranges[v];
    if pg.children[v].is_empty() {
        return Suffix { cost: 0.0, ends: vec![end] };
    }
    let cached = memo.as_ref().and_then(|m| m.get(&end).cloned());
    let best_child = match cached {
        Some(s) => s,
        None => {
            let mut best: Option<Suffix> = None;
            for &c in &pg.children[v] {
                let s = min_cost_path(pg, c, memo);
                if best.as_ref().is_none_or(|b| s.better_than(b)) {
                    best = Some(s);
                }
            }
            let best = best.expect("non-leaf vertex has children");
            if let Some(m) = memo.as_mut() {
                m.insert(end, best.clone());
            }
            best
        }
    };
    let mut ends = Vec::with_capacity(best_child.ends.len() + 1);
    ends.push(end);
    ends.extend_from_slice(&best_child.ends);
    Suffix {
        cost: best_child.cost + pg.point_transfers[end],
        ends,
    }
}

pub(crate) fn solve_partitioning(
    pg: &PartitionGraph,
    classifier: &TransferClassifier,
    use_memo: bool,
) -> Result<PartitionScheme> {
    if pg.roots.is_empty() {
        return Err(Error::NoPath);
    }
    let mut memo = if use_memo { Some(HashMap::new()) } else { None };
    let mut best: Option<Suffix> = None;
    for &r in &pg.roots {
        let s = min_cost_path(pg, r, &mut memo);
        if best.as_ref().is_none_or(|b| s.better_than(b)) {
            best = Some(s);
        }
    }
    let best = best.expect("roots are non-empty");
    if *best.ends.last().expect("path is non-empty") != pg.n_points - 1 {
        return Err(Error::NoPath);
    }

    let mut partitions = Vec::with_capacity(best.ends.len() + 1);
    partitions.push(Partition {
        range: None,
        memory_bytes: 0,
        boundary_layer: pg.point_ids[0].clone(),
        transfer_bytes: pg.point_transfers[0],
        class: classifier.classify(pg.point_transfers[0]),
        is_dispatcher: true,
    });
    let mut start = 0usize;
    let mut total_cost = 0.0;
    for &end in &best.ends {
        let idx = pg
            .ranges
            .iter()
            .position(|&r| r == (start, end))
            .expect("path ranges exist in the graph");
        partitions.push(Partition {
            range: Some((start, end)),
            memory_bytes: pg.range_memory[idx],
            boundary_layer: pg.point_ids[end].clone(),
            transfer_bytes: pg.point_transfers[end],
            class: classifier.classify(pg.point_transfers[end]),
            is_dispatcher: false,
        });
        total_cost += pg.point_transfers[end];
        start = end + 1;
    }
    Ok(PartitionScheme {
        partitions,
        n_classes: classifier.n_classes(),
        breakpoints: classifier.breakpoints().to_vec(),
        candidate_transfers: pg.point_transfers.clone(),
        total_cost,
    })
}

/// Minimum-total-transfer partitioning with the dispatcher prepended.
/// Ties prefer fewer partitions, then the lexicographically smallest
/// boundary sequence.
pub fn optimal_partition(
    pg: &PartitionGraph,
    classifier: &TransferClassifier,
) -> Result<PartitionScheme> {
    solve_partitioning(pg, classifier, true)
}

/// Convenience pipeline: candidates -> classifier -> graph -> scheme.
/// The classifier is fit on the transfer sizes of all candidate points.
pub fn partition_model(
    graph: &ModelGraph,
    points: &CandidatePoints,
    kappa_bytes: u64,
    n_classes: usize,
    cfg: &TransferConfig,
) -> Result<PartitionScheme> {
    let pg = build_partition_graph(points, graph, kappa_bytes, cfg)?;
    let classifier = TransferClassifier::fit(pg.point_transfers(), n_classes);
    optimal_partition(&pg, &classifier)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::model_graph::Layer;
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64;

    fn chain_model(elements: &[u64], memory: &[u64]) -> ModelGraph {
        let layers: Vec<Layer> = elements
            .iter()
            .zip(memory)
            .enumerate()
            .map(|(i, (&e, &m))| Layer {
                id: format!("l{i}"),
                output_elements: e,
                memory_bytes: m,
            })
            .collect();
        let edges: Vec<(String, String)> = (0..elements.len() - 1)
            .map(|i| (format!("l{i}"), format!("l{}", i + 1)))
            .collect();
        ModelGraph::from_parts(layers, &edges).unwrap()
    }

    #[test]
    fn transfer_size_formula() {
        let cfg = TransferConfig::default();
        let t = transfer_size_bytes(150_328, &cfg);
        assert!((t - 198_846.56).abs() < 0.2, "got {t}");
        assert_eq!(transfer_size_bytes(0, &cfg), 0.0);
        let unit = TransferConfig {
            bytes_per_element: 1.0,
            compression_ratio: 3.024,
        };
        assert!((transfer_size_bytes(3024, &unit) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn classifier_one_value_per_bin() {
        let c = TransferClassifier::fit(&[1.0, 2.0, 3.0], 3);
        let labels: Vec<ClassLabel> = [1.0, 2.0, 3.0].iter().map(|&s| c.classify(s)).collect();
        assert_eq!(labels, vec![ClassLabel(0), ClassLabel(1), ClassLabel(2)]);
    }

    #[test]
    fn classifier_degenerate_distribution() {
        let c = TransferClassifier::fit(&[7.0; 10], 3);
        let l = c.classify(7.0);
        assert!((0..10).all(|_| c.classify(7.0) == l));
        assert!(c.breakpoints().is_empty());
    }

    #[test]
    fn classifier_quantile_balance() {
        let mut rng = Pcg64::seed_from_u64(5);
        let sizes: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let c = TransferClassifier::fit(&sizes, 5);
        let mut counts = vec![0usize; 5];
        for &s in &sizes {
            counts[c.classify(s).0] += 1;
        }
        for count in counts {
            assert!((199..=201).contains(&count), "unbalanced bin: {count}");
        }
    }

    #[test]
    fn doane_bin_count_sanity() {
        let uniform: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let bins = doane_bin_count(&uniform);
        assert!((6..=10).contains(&bins), "got {bins}");
        assert_eq!(doane_bin_count(&[1.0, 1.0]), 1);
    }

    fn five_point_chain() -> (ModelGraph, CandidatePoints) {
        let g = chain_model(&[10, 20, 30, 40, 50], &[100, 100, 100, 100, 100]);
        let p = g.candidate_partition_points();
        (g, p)
    }

    #[test]
    fn partition_graph_all_subarrays() {
        let (g, p) = five_point_chain();
        let pg = build_partition_graph(&p, &g, u64::MAX, &TransferConfig::default()).unwrap();
        assert_eq!(pg.vertex_count(), 15);
        assert_eq!(pg.edge_count(), 20);
        assert_eq!(pg.roots().len(), 5);
        assert_eq!(pg.ranges().iter().filter(|r| r.1 == 4).count(), 5);
    }

    #[test]
    fn partition_graph_infeasible_capacity() {
        let (g, p) = five_point_chain();
        let err = build_partition_graph(&p, &g, 50, &TransferConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    #[test]
    fn partition_graph_forced_chain() {
        let (g, p) = five_point_chain();
        let pg = build_partition_graph(&p, &g, 150, &TransferConfig::default()).unwrap();
        assert_eq!(pg.vertex_count(), 5);
        assert_eq!(pg.edge_count(), 4);
    }

    #[test]
    fn forced_chain_cost_is_sum_of_all_candidate_transfers() {
        let (g, p) = five_point_chain();
        let cfg = TransferConfig::default();
        let pg = build_partition_graph(&p, &g, 150, &cfg).unwrap();
        let classifier = TransferClassifier::fit(pg.point_transfers(), 3);
        let scheme = optimal_partition(&pg, &classifier).unwrap();
        let expected: f64 = pg.point_transfers().iter().sum();
        assert!((scheme.total_cost - expected).abs() < 1e-9);
        assert_eq!(scheme.partitions.len(), 6);
        assert!(scheme.partitions[0].is_dispatcher);
    }

    #[test]
    fn two_point_ranges_match_exhaustive_composition_search() {
        let g = chain_model(&[5, 9, 2, 8, 3, 7], &[100; 6]);
        let p = g.candidate_partition_points();
        // Capacity admits at most two points per partition.
        let pg = build_partition_graph(&p, &g, 250, &TransferConfig::default()).unwrap();
        assert!(pg.ranges().iter().all(|(i, j)| j - i <= 1));
        let classifier = TransferClassifier::fit(pg.point_transfers(), 3);
        let scheme = optimal_partition(&pg, &classifier).unwrap();
        let (cost, _) = brute_force_partition_cost(&pg).unwrap();
        assert!((scheme.total_cost - cost).abs() < 1e-9);
    }

    fn random_blocky_model(rng: &mut Pcg64, max_points: usize) -> ModelGraph {
        // Chain of candidate layers, optionally separated by two-wide
        // levels that are not candidates themselves.
        let n_points = 3 + rng.gen_range(0..max_points - 2);
        let mut layers = Vec::new();
        let mut edges = Vec::new();
        let mut prev: Vec<String> = Vec::new();
        let mut next_id = 0usize;
        let mut fresh = |layers: &mut Vec<Layer>, rng: &mut Pcg64| {
            let id = format!("v{next_id}");
            next_id += 1;
            layers.push(Layer {
                id: id.clone(),
                output_elements: rng.gen_range(1..5000),
                memory_bytes: rng.gen_range(1..40) * 1024 * 1024,
            });
            id
        };
        for step in 0..n_points {
            let id = fresh(&mut layers, rng);
            for p in &prev {
                edges.push((p.clone(), id.clone()));
            }
            prev = vec![id];
            if step + 1 < n_points && rng.gen_bool(0.4) {
                let a = fresh(&mut layers, rng);
                let b = fresh(&mut layers, rng);
                for p in &prev {
                    edges.push((p.clone(), a.clone()));
                    edges.push((p.clone(), b.clone()));
                }
                prev = vec![a, b];
            }
        }
        if prev.len() > 1 {
            let id = fresh(&mut layers, rng);
            for p in &prev {
                edges.push((p.clone(), id.clone()));
            }
        }
        ModelGraph::from_parts(layers, &edges).unwrap()
    }

    #[test]
    fn optimal_matches_brute_force_on_random_models() {
        let mut rng = Pcg64::seed_from_u64(0xA161);
        let mut checked = 0;
        for _ in 0..50 {
            let g = random_blocky_model(&mut rng, 12);
            let p = g.candidate_partition_points();
            if p.len() > 14 {
                continue;
            }
            for cap_mb in [64u64, 128, 256] {
                let kappa = cap_mb * 1024 * 1024;
                let cfg = TransferConfig::default();
                let pg = match build_partition_graph(&p, &g, kappa, &cfg) {
                    Ok(pg) => pg,
                    Err(_) => continue,
                };
                let classifier = TransferClassifier::fit(pg.point_transfers(), 3);
                let scheme = optimal_partition(&pg, &classifier).unwrap();
                let (cost, ends) = brute_force_partition_cost(&pg).unwrap();
                assert!(
                    (scheme.total_cost - cost).abs() < 1e-6,
                    "dp {} vs brute {}",
                    scheme.total_cost,
                    cost
                );
                let dp_ends: Vec<usize> = scheme.partitions[1..]
                    .iter()
                    .map(|p| p.range.unwrap().1)
                    .collect();
                assert_eq!(dp_ends, ends, "tie-break mismatch");
                checked += 1;
            }
        }
        assert!(checked > 50, "not enough feasible instances: {checked}");
    }

    #[test]
    fn raising_capacity_never_raises_cost() {
        let mut rng = Pcg64::seed_from_u64(0x0CAFE);
        for _ in 0..20 {
            let g = random_blocky_model(&mut rng, 10);
            let p = g.candidate_partition_points();
            let cfg = TransferConfig::default();
            let mut last: Option<f64> = None;
            for cap_mb in [64u64, 96, 128, 192, 256, 512] {
                let kappa = cap_mb * 1024 * 1024;
                let cost = build_partition_graph(&p, &g, kappa, &cfg)
                    .ok()
                    .and_then(|pg| {
                        let c = TransferClassifier::fit(pg.point_transfers(), 3);
                        optimal_partition(&pg, &c).ok()
                    })
                    .map(|s| s.total_cost);
                if let (Some(prev), Some(cur)) = (last, cost) {
                    assert!(cur <= prev + 1e-9, "cost rose with capacity");
                }
                if cost.is_some() {
                    last = cost;
                }
            }
        }
    }

    #[test]
    fn memoization_is_sound() {
        let mut rng = Pcg64::seed_from_u64(0x3E30);
        for _ in 0..20 {
            let g = random_blocky_model(&mut rng, 10);
            let p = g.candidate_partition_points();
            let cfg = TransferConfig::default();
            let pg = match build_partition_graph(&p, &g, 128 * 1024 * 1024, &cfg) {
                Ok(pg) => pg,
                Err(_) => continue,
            };
            let classifier = TransferClassifier::fit(pg.point_transfers(), 3);
            let with = solve_partitioning(&pg, &classifier, true).unwrap();
            let without = solve_partitioning(&pg, &classifier, false).unwrap();
            assert_eq!(with.total_cost, without.total_cost);
            let ends = |s: &PartitionScheme| -> Vec<usize> {
                s.partitions[1..].iter().map(|p| p.range.unwrap().1).collect()
            };
            assert_eq!(ends(&with), ends(&without));
        }
    }

    #[test]
    fn scheme_roundtrips_through_json() {
        let (g, p) = five_point_chain();
        let cfg = TransferConfig::default();
        let scheme = partition_model(&g, &p, u64::MAX, 3, &cfg).unwrap();
        let text = scheme.to_json_string();
        let back = PartitionScheme::from_json_str(&text, "roundtrip").unwrap();
        assert_eq!(back.partitions.len(), scheme.partitions.len());
        assert_eq!(back.transfer_sizes(), scheme.transfer_sizes());
    }
}
