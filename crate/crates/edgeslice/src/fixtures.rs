//! Bundled synthetic model fixtures.
//!
//! Three layer DAGs exercise the pipeline end to end: a residual
//! linear-with-diamonds network, a long inception-style network with many
//! cut points, and an interleaved dual-chain network that admits no
//! interior cut point at all. Element counts and footprints are sized like
//! the vision models they imitate.

use std::path::Path;

use crate::error::Result;
use crate::model_graph::{Layer, ModelGraph};

struct Builder {
    layers: Vec<Layer>,
    edges: Vec<(String, String)>,
    tips: Vec<String>,
}

impl Builder {
    fn new(id: &str, output_elements: u64, memory_bytes: u64) -> Self {
        Builder {
            layers: vec![Layer {
                id: id.to_string(),
                output_elements,
                memory_bytes,
            }],
            edges: Vec::new(),
            tips: vec![id.to_string()],
        }
    }

    fn add_layer(&mut self, id: &str, output_elements: u64, memory_bytes: u64) {
        self.layers.push(Layer {
            id: id.to_string(),
            output_elements,
            memory_bytes,
        });
    }

    /// Appends one layer fed by every current tip.
    fn chain(&mut self, id: &str, output_elements: u64, memory_bytes: u64) {
        self.add_layer(id, output_elements, memory_bytes);
        for tip in std::mem::take(&mut self.tips) {
            self.edges.push((tip, id.to_string()));
        }
        self.tips = vec![id.to_string()];
    }

    /// Appends a residual block: a main path of `main` layers plus an
    /// identity skip, rejoining at an add layer.
    fn residual_block(&mut self, name: &str, main: &[(u64, u64)], out: (u64, u64)) {
        let entry = self.tips[0].clone();
        let mut prev = entry.clone();
        for (i, &(elems, mem)) in main.iter().enumerate() {
            let id = format!("{name}_conv{}", i + 1);
            self.add_layer(&id, elems, mem);
            self.edges.push((prev, id.clone()));
            prev = id;
        }
        let add = format!("{name}_add");
        self.add_layer(&add, out.0, out.1);
        self.edges.push((prev, add.clone()));
        self.edges.push((entry, add.clone()));
        self.tips = vec![add];
    }

    /// Appends a two-branch block (one layer against a two-layer chain)
    /// rejoining at an add layer.
    fn branch_block(&mut self, name: &str, mid: (u64, u64), out: (u64, u64)) {
        let entry = self.tips[0].clone();
        let b1 = format!("{name}_b1");
        let b2a = format!("{name}_b2a");
        let b2b = format!("{name}_b2b");
        let add = format!("{name}_add");
        self.add_layer(&b1, mid.0, mid.1);
        self.add_layer(&b2a, mid.0, mid.1);
        self.add_layer(&b2b, mid.0, mid.1);
        self.add_layer(&add, out.0, out.1);
        self.edges.push((entry.clone(), b1.clone()));
        self.edges.push((entry, b2a.clone()));
        self.edges.push((b2a, b2b.clone()));
        self.edges.push((b1, add.clone()));
        self.edges.push((b2b, add.clone()));
        self.tips = vec![add];
    }

    fn build(self) -> ModelGraph {
        ModelGraph::from_parts(self.layers, &self.edges).expect("fixture must validate")
    }
}

const MB: u64 = 1024 * 1024;

/// Residual network in the 100 MB class: a stem, four stages of bottleneck
/// blocks with identity skips, and a pooled classifier head.
pub fn resnet50_like() -> ModelGraph {
    let mut b = Builder::new("input", 150_328, 10_000);
    b.chain("conv1", 802_816, 38_000);
    b.chain("pool1", 200_704, 4_096);
    let stages: [(usize, u64, u64); 4] = [
        (3, 802_816, 287_000 * 4),
        (4, 401_408, 305_000 * 4),
        (6, 200_704, 1_183_000 * 4),
        (3, 100_352, 4_966_000 * 4),
    ];
    for (stage, &(blocks, out_elems, block_mem)) in stages.iter().enumerate() {
        for block in 0..blocks {
            let name = format!("s{}b{}", stage + 1, block + 1);
            let mid = out_elems / 4;
            let main = [
                (mid, block_mem * 3 / 10),
                (mid, block_mem * 4 / 10),
                (out_elems, block_mem * 5 / 20),
            ];
            b.residual_block(&name, &main, (out_elems, block_mem / 20));
        }
    }
    b.chain("pool5", 2_048, 4_096);
    b.chain("fc", 1_000, 2_049_000 * 4);
    b.build()
}

/// Inception-style network in the 260 MB class with a long stem and three
/// stages of two-branch residual blocks: more than forty cut points.
pub fn inception_resnet_v2_like() -> ModelGraph {
    let mut b = Builder::new("input", 268_203, 10_000);
    let stem: [(u64, u64); 5] = [
        (691_488, 2 * MB),
        (345_744, 4 * MB),
        (264_992, 6 * MB),
        (235_200, 8 * MB),
        (392_000, 8 * MB),
    ];
    for (i, &(elems, mem)) in stem.iter().enumerate() {
        b.chain(&format!("stem{}", i + 1), elems, mem);
    }
    for i in 0..10 {
        b.branch_block(&format!("a{}", i + 1), (98_000, 140_000), (392_000, 140_000));
    }
    b.chain("reduction_a", 314_432, 11 * MB);
    for i in 0..20 {
        b.branch_block(&format!("b{}", i + 1), (57_800, 1_150_000), (231_200, 1_150_000));
    }
    b.chain("reduction_b", 133_120, 20 * MB);
    for i in 0..10 {
        b.branch_block(&format!("c{}", i + 1), (33_280, 2_300_000), (133_120, 2_300_000));
    }
    b.chain("final_conv", 98_304, 12 * MB);
    b.chain("pool", 1_536, 4_096);
    b.chain("fc", 1_000, 6 * MB);
    b.build()
}

/// Interleaved dual-chain network: every level holds two cross-linked
/// cells, so no vertex between the input and the terminal has a unique
/// depth and the body cannot be split anywhere.
pub fn nasnet_like() -> ModelGraph {
    let levels = 6;
    let mut layers = vec![Layer {
        id: "input".into(),
        output_elements: 328_683,
        memory_bytes: 10_000,
    }];
    let mut edges = Vec::new();
    for level in 0..levels {
        for cell in ["a", "b"] {
            layers.push(Layer {
                id: format!("l{level}{cell}"),
                output_elements: 100_000,
                memory_bytes: 50 * MB,
            });
        }
        let (ca, cb) = (format!("l{level}a"), format!("l{level}b"));
        if level == 0 {
            edges.push(("input".into(), ca));
            edges.push(("input".into(), cb));
        } else {
            let (pa, pb) = (format!("l{}a", level - 1), format!("l{}b", level - 1));
            edges.push((pa.clone(), ca.clone()));
            edges.push((pa, cb.clone()));
            edges.push((pb.clone(), ca));
            edges.push((pb, cb));
        }
    }
    layers.push(Layer {
        id: "output".into(),
        output_elements: 1_000,
        memory_bytes: 4 * MB,
    });
    edges.push((format!("l{}a", levels - 1), "output".into()));
    edges.push((format!("l{}b", levels - 1), "output".into()));
    ModelGraph::from_parts(layers, &edges).expect("fixture must validate")
}

/// Five-layer linear model: every vertex is a cut point.
pub fn chain() -> ModelGraph {
    let elements = [150_000u64, 90_000, 60_000, 30_000, 1_000];
    let layers: Vec<Layer> = elements
        .iter()
        .enumerate()
        .map(|(i, &e)| Layer {
            id: format!("l{i}"),
            output_elements: e,
            memory_bytes: 20 * MB,
        })
        .collect();
    let edges: Vec<(String, String)> = (0..elements.len() - 1)
        .map(|i| (format!("l{i}"), format!("l{}", i + 1)))
        .collect();
    ModelGraph::from_parts(layers, &edges).expect("fixture must validate")
}

/// Two parallel branches rejoining immediately: only the endpoints are
/// cut points.
pub fn diamond() -> ModelGraph {
    let layers: Vec<Layer> = ["a", "b", "c", "d"]
        .iter()
        .map(|id| Layer {
            id: id.to_string(),
            output_elements: 50_000,
            memory_bytes: 20 * MB,
        })
        .collect();
    let edges = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
        .map(|(u, v)| (u.to_string(), v.to_string()));
    ModelGraph::from_parts(layers, &edges).expect("fixture must validate")
}

/// Model fixtures used by the default sweep.
pub const FIXTURE_NAMES: [&str; 3] = [
    "resnet50_like",
    "inception_resnet_v2_like",
    "nasnet_like",
];

/// Small fixtures exercising candidate-point discovery.
pub const CANDIDATE_FIXTURE_NAMES: [&str; 2] = ["chain", "diamond"];

pub fn by_name(name: &str) -> Option<ModelGraph> {
    match name {
        "resnet50_like" => Some(resnet50_like()),
        "inception_resnet_v2_like" => Some(inception_resnet_v2_like()),
        "nasnet_like" => Some(nasnet_like()),
        "chain" => Some(chain()),
        "diamond" => Some(diamond()),
        _ => None,
    }
}

/// Writes every bundled fixture file into `dir`.
pub fn write_fixture_files<P: AsRef<Path>>(dir: P) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for name in FIXTURE_NAMES.iter().chain(&CANDIDATE_FIXTURE_NAMES) {
        let graph = by_name(name).expect("known fixture");
        std::fs::write(dir.join(format!("{name}.json")), graph.to_json_string())?;
    }
    Ok(())
}
