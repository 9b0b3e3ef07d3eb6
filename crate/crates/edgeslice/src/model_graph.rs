//! Model computation graphs and candidate partition point discovery.
//!
//! A model is an unweighted DAG of layers with a single source (the input
//! layer) and a single sink (the output layer). A vertex is a *candidate
//! partition point* when it is the only vertex at its topological depth and
//! every path from the previous candidate passes through it. The ordered
//! list of candidates is where the model may be cut into pipeline stages.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: &str = "edgeslice-model/1";

/// One layer of the model: flat output element count and resident footprint.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Layer {
    pub id: String,
    pub output_elements: u64,
    pub memory_bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeRecord {
    from: String,
    to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    version: String,
    layers: Vec<Layer>,
    edges: Vec<EdgeRecord>,
}

/// Validated single-source, single-sink layer DAG.
#[derive(Debug, Clone)]
pub struct ModelGraph {
    layers: Vec<Layer>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
}

impl ModelGraph {
    /// Builds and validates a graph from layers and directed id pairs.
    pub fn from_parts(layers: Vec<Layer>, edges: &[(String, String)]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, layer) in layers.iter().enumerate() {
            if index.insert(layer.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate layer id {:?}", layer.id)));
            }
        }
        let n = layers.len();
        if n == 0 {
            return Err(Error::Validation("model has no layers".into()));
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (from, to) in edges {
            let &u = index
                .get(from)
                .ok_or_else(|| Error::Validation(format!("edge references unknown layer {from:?}")))?;
            let &v = index
                .get(to)
                .ok_or_else(|| Error::Validation(format!("edge references unknown layer {to:?}")))?;
            if u == v {
                return Err(Error::Validation(format!("cycle: self loop on {from:?}")));
            }
            if !succ[u].contains(&v) {
                succ[u].push(v);
                pred[v].push(u);
            }
        }
        for adj in succ.iter_mut().chain(pred.iter_mut()) {
            adj.sort_unstable();
        }

        let sources: Vec<usize> = (0..n).filter(|&v| pred[v].is_empty()).collect();
        let sinks: Vec<usize> = (0..n).filter(|&v| succ[v].is_empty()).collect();
        if sources.is_empty() {
            return Err(Error::Validation("cycle: no vertex with in-degree 0".into()));
        }
        if sources.len() > 1 {
            let names: Vec<&str> = sources.iter().map(|&v| layers[v].id.as_str()).collect();
            return Err(Error::Validation(format!("multiple sources: {}", names.join(", "))));
        }
        if sinks.is_empty() {
            return Err(Error::Validation("cycle: no vertex with out-degree 0".into()));
        }
        if sinks.len() > 1 {
            let names: Vec<&str> = sinks.iter().map(|&v| layers[v].id.as_str()).collect();
            return Err(Error::Validation(format!("multiple sinks: {}", names.join(", "))));
        }

        let graph = ModelGraph {
            layers,
            index,
            succ,
            pred,
            source: sources[0],
            sink: sinks[0],
        };

        // Kahn toposort doubles as the cycle check.
        if let Some(v) = graph.find_cycle_member() {
            return Err(Error::Validation(format!("cycle through {:?}", graph.layers[v].id)));
        }
        if let Some(v) = graph.find_unreachable() {
            return Err(Error::Validation(format!("unreachable vertex {:?}", graph.layers[v].id)));
        }
        for layer in &graph.layers {
            if layer.output_elements == 0 {
                return Err(Error::Validation(format!(
                    "layer {:?} has zero output elements",
                    layer.id
                )));
            }
        }
        Ok(graph)
    }

    fn find_cycle_member(&self) -> Option<usize> {
        let n = self.layers.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if seen == n {
            None
        } else {
            (0..n).find(|&v| indeg[v] > 0)
        }
    }

    fn find_unreachable(&self) -> Option<usize> {
        let n = self.layers.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..n).find(|&v| !seen[v])
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            reason: e.to_string(),
        })?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::Parse {
                path: origin.to_string(),
                reason: format!(
                    "unsupported format version {:?}, expected {:?}",
                    file.version, MODEL_FORMAT_VERSION
                ),
            });
        }
        let edges: Vec<(String, String)> =
            file.edges.into_iter().map(|e| (e.from, e.to)).collect();
        Self::from_parts(file.layers, &edges)
    }

    pub fn to_json_string(&self) -> String {
        let file = ModelFile {
            version: MODEL_FORMAT_VERSION.to_string(),
            layers: self.layers.clone(),
            edges: self
                .edge_list()
                .into_iter()
                .map(|(u, v)| EdgeRecord {
                    from: self.layers[u].id.clone(),
                    to: self.layers[v].id.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, idx: usize) -> &Layer {
        &self.layers[idx]
    }

    pub fn layer_id(&self, idx: usize) -> &str {
        &self.layers[idx].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, adj) in self.succ.iter().enumerate() {
            for &v in adj {
                edges.push((u, v));
            }
        }
        edges
    }

    /// Longest-path length (in edges) from the source to each vertex,
    /// computed by relaxing successors in topological order.
    pub fn longest_path_depths(&self) -> Vec<usize> {
        let n = self.layers.len();
        let mut depth = vec![0usize; n];
        for v in self.topological_order() {
            for &w in &self.succ[v] {
                depth[w] = depth[w].max(depth[v] + 1);
            }
        }
        depth
    }

    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.layers.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        order
    }

    /// True iff every directed path leaving `from` reaches `to` before any
    /// vertex deeper than `to`. The walk fails as soon as it sees a vertex
    /// with depth greater than `to`'s and succeeds on arrival at `to`;
    /// results are memoized per vertex, which leaves the answer unchanged.
    pub fn all_paths_through(&self, depths: &[usize], from: usize, to: usize) -> bool {
        debug_assert!(depths[from] < depths[to]);
        let mut memo = vec![0u8; self.layers.len()];
        self.succ[from]
            .iter()
            .all(|&w| self.ap_walk(depths, to, w, &mut memo))
    }

    fn ap_walk(&self, depths: &[usize], to: usize, w: usize, memo: &mut [u8]) -> bool {
        if w == to {
            return true;
        }
        if depths[w] > depths[to] {
            return false;
        }
        match memo[w] {
            1 => return true,
            2 => return false,
            _ => {}
        }
        let ok = self.succ[w].iter().all(|&x| self.ap_walk(depths, to, x, memo));
        memo[w] = if ok { 1 } else { 2 };
        ok
    }

    /// Ordered candidate partition points: the source, then every vertex
    /// that is alone at its depth and through which all paths from the
    /// previous candidate pass.
    pub fn candidate_partition_points(&self) -> CandidatePoints {
        let depths = self.longest_path_depths();
        let n = self.layers.len();
        let max_depth = depths.iter().copied().max().unwrap_or(0);
        let mut at_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
        for v in 0..n {
            at_depth[depths[v]].push(v);
        }
        let mut points = vec![self.source];
        for level in at_depth.iter().skip(1) {
            if let [v] = level[..] {
                let prev = *points.last().expect("points starts with the source");
                if self.all_paths_through(&depths, prev, v) {
                    points.push(v);
                }
            }
        }
        CandidatePoints { points, depths }
    }
}

/// Ordered candidate partition points plus the depth map they came from.
#[derive(Debug, Clone)]
pub struct CandidatePoints {
    points: Vec<usize>,
    depths: Vec<usize>,
}

impl CandidatePoints {
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> usize {
        self.points[k]
    }

    pub fn depth_of_point(&self, k: usize) -> usize {
        self.depths[self.points[k]]
    }

    pub fn ids<'g>(&self, graph: &'g ModelGraph) -> Vec<&'g str> {
        self.points.iter().map(|&v| graph.layer_id(v)).collect()
    }

    /// Cut points strictly between the source and the terminal layer; a
    /// model with none cannot be split into more than a head and a tail.
    pub fn interior(&self, graph: &ModelGraph) -> Vec<usize> {
        self.points
            .iter()
            .copied()
            .filter(|&v| v != graph.source() && v != graph.sink())
            .collect()
    }
}

/// Loads and validates a model DAG file.
pub fn load_model_graph<P: AsRef<Path>>(path: P) -> Result<ModelGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    ModelGraph::from_json_str(&text, &path.display().to_string())
}
