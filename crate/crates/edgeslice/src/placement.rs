//! Placement of partition pipelines onto the communication graph.
//!
//! Transfer-size classes are matched to bandwidth classes greedily: for
//! each class from largest to smallest, the maximal runs of that class in
//! the transfer list are placed longest-first by searching for a k-vertex
//! path in the subgraph of edges above a bisected bandwidth threshold. The
//! path search is the color-coding algorithm: vertices get random colors
//! and a subset-DP finds a path whose colors are all distinct, which forces
//! the vertices to be distinct too. Nodes consumed by one run stay
//! available only as shared endpoints for the neighboring runs.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::comm_graph::CommGraph;
use crate::error::{Error, Result};
use crate::partitioner::{ClassLabel, PartitionScheme, TransferClassifier};

/// Bandwidth classification of the communication graph's edges, aligned
/// in count with the transfer-size classes.
#[derive(Debug, Clone)]
pub struct EdgeClassification {
    classifier: TransferClassifier,
}

impl EdgeClassification {
    pub fn fit(graph: &CommGraph, n_classes: usize) -> Self {
        let weights: Vec<f64> = graph.edges_desc().iter().map(|&(w, _, _)| w).collect();
        EdgeClassification {
            classifier: TransferClassifier::fit(&weights, n_classes),
        }
    }

    pub fn class_of(&self, bandwidth: f64) -> ClassLabel {
        self.classifier.classify(bandwidth)
    }

    pub fn n_classes(&self) -> usize {
        self.classifier.n_classes()
    }

    pub fn thresholds(&self) -> &[f64] {
        self.classifier.breakpoints()
    }
}

/// One maximal run of a class inside the carried-transfer list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassRun {
    pub start: usize,
    pub len: usize,
}

/// Maximal runs of `class`, longest first (ties by start index).
pub fn find_subarrays(classes: &[ClassLabel], class: ClassLabel) -> Vec<ClassRun> {
    assert!(!classes.is_empty());
    let mut runs = Vec::new();
    let mut i = 0;
    while i < classes.len() {
        if classes[i] == class {
            let start = i;
            while i < classes.len() && classes[i] == class {
                i += 1;
            }
            runs.push(ClassRun { start, len: i - start });
        } else {
            i += 1;
        }
    }
    runs.sort_by(|a, b| b.len.cmp(&a.len).then(a.start.cmp(&b.start)));
    runs
}

const MAX_KPATH_VERTICES: usize = 64;
const MAX_KPATH_LEN: usize = 25;

/// Trial budget for one threshold probe: ceil(e^k * ln(1/delta)) with
/// delta = 0.01, so a probe misses an existing path with probability
/// at most 1%.
pub fn color_coding_trials(k: usize) -> usize {
    ((k as f64).exp() * 100f64.ln()).ceil() as usize
}

/// Random-coloring k-path search on an undirected graph of `n` vertices.
/// Honors optional endpoint constraints; a path "ends" at `end` only with
/// exactly k vertices, and any earlier arrival abandons that branch.
/// Returns a simple path of k vertices or `None` if no trial finds one.
pub fn color_coding_k_path(
    n: usize,
    edges: &[(usize, usize)],
    k: usize,
    start: Option<usize>,
    end: Option<usize>,
    trials: usize,
    seed: u64,
) -> Option<Vec<usize>> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut adj = vec![0u64; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    color_coding_with_rng(&adj, k, start, end, trials, &mut rng)
}

pub(crate) fn color_coding_with_rng(
    adj: &[u64],
    k: usize,
    start: Option<usize>,
    end: Option<usize>,
    trials: usize,
    rng: &mut Pcg64,
) -> Option<Vec<usize>> {
    let n = adj.len();
    assert!(n <= MAX_KPATH_VERTICES && k <= MAX_KPATH_LEN);
    assert!(k >= 1);
    if k > n {
        return None;
    }
    if k == 1 {
        return match (start, end) {
            (Some(s), Some(u)) if s != u => None,
            (Some(s), _) => Some(vec![s]),
            (_, Some(u)) => Some(vec![u]),
            _ => Some(vec![0]),
        };
    }
    if let (Some(s), Some(u)) = (start, end) {
        debug_assert_ne!(s, u);
        if k == 2 {
            return (adj[s] >> u & 1 == 1).then(|| vec![s, u]);
        }
    }

    for _ in 0..trials {
        let colors: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        if let Some(path) = colorful_path(adj, k, start, end, &colors) {
            return Some(path);
        }
    }
    None
}

/// Subset DP over colors with vertex sets as bitmasks. `reach[set]` holds
/// every vertex where some path using exactly the colors in `set` can end.
fn colorful_path(
    adj: &[u64],
    k: usize,
    start: Option<usize>,
    end: Option<usize>,
    colors: &[usize],
) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut color_mask = vec![0u64; k];
    for v in 0..n {
        color_mask[colors[v]] |= 1 << v;
    }
    // The constrained terminal never appears mid-path: drop it from the DP
    // and attach it as the final vertex afterwards.
    let blocked: u64 = end.map_or(0, |u| 1 << u);

    let full: usize = 1 << k;
    let mut reach = vec![0u64; full];
    match start {
        Some(s) => {
            if blocked >> s & 1 == 1 {
                return None;
            }
            reach[1 << colors[s]] = 1 << s;
        }
        None => {
            for c in 0..k {
                reach[1 << c] = color_mask[c] & !blocked;
            }
        }
    }

    let want = k - usize::from(end.is_some());
    let mut done = false;
    for set in 1..full {
        let frontier = reach[set];
        if frontier == 0 {
            continue;
        }
        let size = (set as u32).count_ones() as usize;
        if size == want {
            match end {
                None => {
                    done = true;
                    break;
                }
                Some(u) => {
                    let mut neighbors = 0u64;
                    let mut rest = frontier;
                    while rest != 0 {
                        let v = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        neighbors |= adj[v];
                    }
                    if neighbors >> u & 1 == 1 && set >> colors[u] & 1 == 0 {
                        done = true;
                        break;
                    }
                }
            }
            continue;
        }
        let mut neighbors = 0u64;
        let mut rest = frontier;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            neighbors |= adj[v];
        }
        neighbors &= !blocked;
        for c in 0..k {
            if set >> c & 1 == 0 {
                reach[set | 1 << c] |= neighbors & color_mask[c];
            }
        }
    }
    if !done {
        return None;
    }

    // Backtrack one witness path.
    let (mut set, mut v) = match end {
        None => {
            let set = (1..full)
                .find(|&s| (s as u32).count_ones() as usize == k && reach[s] != 0)?;
            (set, reach[set].trailing_zeros() as usize)
        }
        Some(u) => {
            let set = (1..full).find(|&s| {
                (s as u32).count_ones() as usize == k - 1
                    && s >> colors[u] & 1 == 0
                    && reach[s] & adj[u] != 0
            })?;
            (set, u)
        }
    };
    let mut path = vec![v];
    if end.is_some() {
        let pred = reach[set] & adj[v];
        v = pred.trailing_zeros() as usize;
        path.push(v);
    }
    while (set as u32).count_ones() > 1 {
        let without = set & !(1 << colors[v]);
        let pred = reach[without] & adj[v];
        debug_assert_ne!(pred, 0);
        v = pred.trailing_zeros() as usize;
        path.push(v);
        set = without;
    }
    path.reverse();
    debug_assert_eq!(path.len(), k);
    if let Some(s) = start {
        debug_assert_eq!(path[0], s);
    }
    Some(path)
}

/// Ordered assignment of pipeline slots to cluster nodes; slot 0 is the
/// dispatcher.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub node_sequence: Vec<usize>,
}

impl Placement {
    pub fn len(&self) -> usize {
        self.node_sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_sequence.is_empty()
    }

    /// Bandwidth of each consecutive hop under `graph`.
    pub fn hop_bandwidths(&self, graph: &CommGraph) -> Vec<f64> {
        self.node_sequence
            .windows(2)
            .map(|w| graph.bandwidth(w[0], w[1]))
            .collect()
    }
}

/// One matching pass over a communication graph: owns the consumed-node
/// set and the RNG driving the color-coding trials.
pub struct Matcher<'g> {
    graph: &'g CommGraph,
    consumed: Vec<bool>,
    rng: Pcg64,
}

impl<'g> Matcher<'g> {
    pub fn new(graph: &'g CommGraph, seed: u64) -> Self {
        Matcher {
            graph,
            consumed: vec![false; graph.node_count()],
            rng: Pcg64::seed_from_u64(seed),
        }
    }

    fn available(&self, start: Option<usize>, end: Option<usize>) -> Vec<usize> {
        (0..self.graph.node_count())
            .filter(|&v| !self.consumed[v] || start == Some(v) || end == Some(v))
            .collect()
    }

    /// Maximum-threshold k-path honoring the anchors, found by binary
    /// search over the descending edge-weight list. Marks the path's nodes
    /// consumed. Returns the path and the winning threshold.
    pub fn subgraph_k_path(
        &mut self,
        k: usize,
        start: Option<usize>,
        end: Option<usize>,
    ) -> Result<(Vec<usize>, f64)> {
        let nodes = self.available(start, end);
        let fail = |k: usize| Error::MatchingFailure { class: 0, k, start_slot: 0 };
        if nodes.len() < k || k > MAX_KPATH_LEN || nodes.len() > MAX_KPATH_VERTICES {
            return Err(fail(k));
        }
        let local_of = |id: usize| nodes.binary_search(&id).expect("anchors are available");
        let s_local = start.map(local_of);
        let u_local = end.map(local_of);

        let mut edges: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate().skip(i + 1) {
                edges.push((self.graph.bandwidth(a, b), i, j));
            }
        }
        edges.sort_by(|x, y| {
            y.0.partial_cmp(&x.0)
                .expect("bandwidths are finite")
                .then(x.1.cmp(&y.1))
                .then(x.2.cmp(&y.2))
        });

        let trials = color_coding_trials(k);
        let mut best: Option<(Vec<usize>, f64)> = None;
        let (mut low, mut high) = (0usize, edges.len());
        while low < high {
            let median = (low + high) / 2;
            let threshold = edges[median].0;
            let adj = adjacency_at_threshold(&edges, nodes.len(), threshold);
            let found = probe_feasible(&adj, k, s_local, u_local)
                .then(|| color_coding_with_rng(&adj, k, s_local, u_local, trials, &mut self.rng))
                .flatten();
            match found {
                Some(path) => {
                    best = Some((path, threshold));
                    high = median;
                }
                None => low = median + 1,
            }
        }
        let (local_path, threshold) = best.ok_or_else(|| fail(k))?;
        let path: Vec<usize> = local_path.into_iter().map(|i| nodes[i]).collect();
        for &v in &path {
            self.consumed[v] = true;
        }
        Ok((path, threshold))
    }
}

fn adjacency_at_threshold(edges: &[(f64, usize, usize)], n: usize, threshold: f64) -> Vec<u64> {
    let mut adj = vec![0u64; n];
    for &(w, i, j) in edges {
        if w < threshold {
            break;
        }
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    adj
}

/// Cheap necessary condition for a k-path: the relevant connected
/// component must hold at least k vertices and both anchors.
fn probe_feasible(adj: &[u64], k: usize, start: Option<usize>, end: Option<usize>) -> bool {
    let n = adj.len();
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n {
        if component[v] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0usize;
        let mut stack = vec![v];
        component[v] = id;
        while let Some(x) = stack.pop() {
            size += 1;
            let mut rest = adj[x];
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if component[w] == usize::MAX {
                    component[w] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    match (start, end) {
        (Some(s), Some(u)) => component[s] == component[u] && sizes[component[s]] >= k,
        (Some(s), None) => sizes[component[s]] >= k,
        (None, Some(u)) => sizes[component[u]] >= k,
        (None, None) => sizes.iter().any(|&s| s >= k),
    }
}

/// Matches the scheme's transfer classes onto the cluster, class by class
/// from largest to smallest, longest runs first. Transfer labels come from
/// an equal-frequency classifier over the model's candidate transfer
/// sizes, re-fit at `n_classes` so bandwidth and transfer class counts
/// stay equal.
pub fn k_path_matching(
    scheme: &PartitionScheme,
    graph: &CommGraph,
    n_classes: usize,
    seed: u64,
) -> Result<Placement> {
    assert!(n_classes >= 2);
    let transfers = scheme.transfer_sizes();
    let slots = transfers.len();
    if graph.node_count() < slots {
        return Err(Error::MatchingFailure { class: 0, k: slots, start_slot: 0 });
    }
    let classifier = TransferClassifier::fit(&scheme.candidate_transfers, n_classes);
    let carried = &transfers[..slots - 1];
    let labels: Vec<ClassLabel> = carried.iter().map(|&t| classifier.classify(t)).collect();

    let mut assignment: Vec<Option<usize>> = vec![None; slots];
    let mut matcher = Matcher::new(graph, seed);
    for class_value in (0..n_classes).rev() {
        let class = ClassLabel(class_value);
        for run in find_subarrays(&labels, class) {
            let start_v = assignment[run.start];
            let end_v = assignment[run.start + run.len];
            let k = run.len + 1;
            let (path, _threshold) = matcher
                .subgraph_k_path(k, start_v, end_v)
                .map_err(|_| Error::MatchingFailure {
                    class: class_value,
                    k,
                    start_slot: run.start,
                })?;
            for (offset, &node) in path.iter().enumerate() {
                let slot = run.start + offset;
                debug_assert!(assignment[slot].is_none() || assignment[slot] == Some(node));
                assignment[slot] = Some(node);
            }
        }
    }
    let node_sequence: Vec<usize> = assignment
        .into_iter()
        .collect::<Option<Vec<usize>>>()
        .expect("runs cover every slot");
    debug_assert!(sequence_is_simple(&node_sequence));
    Ok(Placement { node_sequence })
}

fn sequence_is_simple(seq: &[usize]) -> bool {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}
