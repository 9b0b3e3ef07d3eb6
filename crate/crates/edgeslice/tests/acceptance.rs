//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line with its measured values (visible under --nocapture).
//!
//! Oracles here are written from scratch so they stay independent of the
//! library paths they check.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use edgeslice::comm_graph::{generate_rgg, Shape};
use edgeslice::evaluator::{brute_force_optimum, evaluate, hop_latencies};
use edgeslice::model_graph::{load_model_graph, Layer, ModelGraph};
use edgeslice::partitioner::{partition_model, transfer_size_bytes, TransferConfig};
use edgeslice::placement::{color_coding_k_path, k_path_matching};
use edgeslice::pipeline_sim::simulate;
use edgeslice::rgg_stats;
use edgeslice::sweep::{
    cell_seed, run_shapes, run_sweep, Algorithm, ExperimentConfig, ShapesConfig, SweepOutput,
};

fn fixture(name: &str) -> ModelGraph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"));
    load_model_graph(&path).expect("bundled fixture loads")
}

fn budget(name: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{name} took {elapsed:.2?}, budget {limit:.2?}"
    );
}

static SWEEP: OnceLock<(SweepOutput, Duration)> = OnceLock::new();

/// The full default grid, shared by the criteria that read it.
fn default_sweep() -> &'static (SweepOutput, Duration) {
    SWEEP.get_or_init(|| {
        let t0 = Instant::now();
        let out = run_sweep(&ExperimentConfig::default()).expect("default sweep runs");
        (out, t0.elapsed())
    })
}

#[test]
fn criterion_01_analytic_rgg_statistics() {
    let t0 = Instant::now();
    let stats = rgg_stats::analytic_rgg_statistics(1000);
    assert!((stats.mean_mu - 4.766).abs() / 4.766 < 0.01, "mu {}", stats.mean_mu);
    assert!(
        (stats.stddev_sigma - 1.398).abs() / 1.398 < 0.02,
        "sigma {}",
        stats.stddev_sigma
    );
    assert!((stats.cv - 0.293).abs() / 0.293 < 0.02, "cv {}", stats.cv);
    assert!(
        (stats.cluster_coefficient - 0.587).abs() / 0.587 < 0.01,
        "C {}",
        stats.cluster_coefficient
    );
    for n in [10usize, 50] {
        let p = rgg_stats::largest_cluster_fraction(
            n,
            rgg_stats::mean_degree(n, stats.threshold_radius),
        );
        assert_eq!(p, 1.0, "P(alpha) at n={n}");
    }
    let elapsed = t0.elapsed();
    budget("criterion 1", elapsed, Duration::from_secs(10));
    println!(
        "criterion 01 PASS ({elapsed:.2?}): mu={:.4} sigma={:.4} cv={:.4} C={:.4} P(alpha)=1 at N=10,50",
        stats.mean_mu, stats.stddev_sigma, stats.cv, stats.cluster_coefficient
    );
}

#[test]
fn criterion_02_monte_carlo_agreement() {
    let t0 = Instant::now();
    let (mu, _) = rgg_stats::quadrature_moments(1000);
    let empirical = rgg_stats::monte_carlo_mean_bandwidth(1_000_000, 0xACCE57);
    let rel = (empirical - mu).abs() / mu;
    assert!(rel < 0.01, "empirical {empirical} vs quadrature {mu}");
    let elapsed = t0.elapsed();
    budget("criterion 2", elapsed, Duration::from_secs(30));
    println!(
        "criterion 02 PASS ({elapsed:.2?}): 1e6-sample mean {empirical:.4} vs quadrature {mu:.4} (rel {rel:.5})"
    );
}

/// Deterministic chain-model generator for oracle comparisons.
fn random_chain(seed: u64, max_points: usize) -> ModelGraph {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut next = |lo: u64, hi: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        lo + state % (hi - lo)
    };
    let n = 3 + (next(0, max_points as u64 - 2) as usize);
    let mut layers = vec![Layer {
        id: "l0".into(),
        output_elements: 120_000,
        memory_bytes: next(8, 40) * 1024 * 1024,
    }];
    for i in 1..n {
        layers.push(Layer {
            id: format!("l{i}"),
            output_elements: next(500, 90_000),
            memory_bytes: next(8, 40) * 1024 * 1024,
        });
    }
    let edges: Vec<(String, String)> = (0..n - 1)
        .map(|i| (format!("l{i}"), format!("l{}", i + 1)))
        .collect();
    ModelGraph::from_parts(layers, &edges).expect("chain is valid")
}

#[test]
fn criterion_03_partitioning_matches_exhaustive_optimum() {
    let t0 = Instant::now();
    let cfg = TransferConfig::default();
    let caps = [64u64, 128, 256];
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let graph = random_chain(seed, 14);
        let points = graph.candidate_partition_points();
        let k = points.len();
        assert!(k <= 14);
        let kappa = caps[(seed % 3) as usize] * 1024 * 1024;

        // Independent oracle: cut-mask enumeration with feasibility and
        // cost recomputed from the raw layers.
        let mem: Vec<u64> = (0..k).map(|i| graph.layer(i).memory_bytes).collect();
        let transfer: Vec<f64> = (0..k)
            .map(|i| transfer_size_bytes(graph.layer(i).output_elements, &cfg))
            .collect();
        let mut oracle: Option<f64> = None;
        for mask in 0u32..(1 << (k - 1)) {
            let mut cost = 0.0;
            let mut segment_mem = 0u64;
            let mut ok = true;
            for i in 0..k {
                segment_mem += mem[i];
                let is_cut = i == k - 1 || mask >> i & 1 == 1;
                if is_cut {
                    if segment_mem >= kappa {
                        ok = false;
                        break;
                    }
                    cost += transfer[i];
                    segment_mem = 0;
                }
            }
            if ok && oracle.is_none_or(|b| cost < b) {
                oracle = Some(cost);
            }
        }

        let scheme = partition_model(&graph, &points, kappa, 3, &cfg);
        match (oracle, scheme) {
            (None, Err(_)) => {}
            (Some(best), Ok(scheme)) => {
                assert!(
                    (scheme.total_cost - best).abs() < 1e-6,
                    "seed {seed}: dp {} vs oracle {best}",
                    scheme.total_cost
                );
                checked += 1;
            }
            (oracle, scheme) => panic!(
                "seed {seed}: feasibility disagreement (oracle {:?}, dp ok={})",
                oracle,
                scheme.is_ok()
            ),
        }
    }
    let elapsed = t0.elapsed();
    budget("criterion 3", elapsed, Duration::from_secs(60));
    println!("criterion 03 PASS ({elapsed:.2?}): 200 instances, zero cost mismatches");
}

/// Exhaustive k-path existence by DFS over simple paths.
fn exhaustive_k_path(n: usize, edges: &[(usize, usize)], k: usize) -> bool {
    let mut adj = vec![vec![]; n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    fn dfs(adj: &[Vec<usize>], k: usize, v: usize, used: &mut Vec<bool>, len: usize) -> bool {
        if len == k {
            return true;
        }
        for &w in &adj[v] {
            if !used[w] {
                used[w] = true;
                if dfs(adj, k, w, used, len + 1) {
                    return true;
                }
                used[w] = false;
            }
        }
        false
    }
    (0..n).any(|s| {
        let mut used = vec![false; n];
        used[s] = true;
        dfs(&adj, k, s, &mut used, 1)
    })
}

#[test]
fn criterion_04_color_coding_matches_exhaustive_search() {
    let t0 = Instant::now();
    let mut state = 0x5EEDu64;
    let mut next = |m: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % m
    };
    let mut found = 0usize;
    for trial in 0..200u64 {
        let n = 8 + next(7) as usize;
        let k = 2 + next(5) as usize; // k in 2..=6
        // Plant a k-path on shuffled vertices, then add noise edges.
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, next(i as u64 + 1) as usize);
        }
        let mut edges: Vec<(usize, usize)> = order
            .windows(2)
            .take(k - 1)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        for u in 0..n {
            for v in (u + 1)..n {
                if next(10) == 0 {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        assert!(exhaustive_k_path(n, &edges, k), "plant failed");
        let trials = ((k as f64).exp() * 100f64.ln()).ceil() as usize;
        let got = color_coding_k_path(n, &edges, k, None, None, trials, 0xC0DE + trial);
        if let Some(path) = got {
            assert_eq!(path.len(), k);
            for w in path.windows(2) {
                assert!(
                    edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))),
                    "returned path uses a missing edge"
                );
            }
            let mut sorted = path.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), k, "returned path repeats a vertex");
            found += 1;
        }
    }
    assert!(found >= 198, "planted paths found in only {found}/200 graphs");

    // Absence side: disconnected cliques too small for any k-path.
    for k in 3..=6usize {
        let size = k - 1;
        let mut edges = Vec::new();
        for u in 0..size {
            for v in (u + 1)..size {
                edges.push((u, v));
                edges.push((size + u, size + v));
            }
        }
        assert!(!exhaustive_k_path(2 * size, &edges, k));
        let trials = ((k as f64).exp() * 100f64.ln()).ceil() as usize;
        assert!(
            color_coding_k_path(2 * size, &edges, k, None, None, trials, 7).is_none(),
            "reported a {k}-path where none exists"
        );
    }
    let elapsed = t0.elapsed();
    budget("criterion 4", elapsed, Duration::from_secs(60));
    println!("criterion 04 PASS ({elapsed:.2?}): planted paths found in {found}/200 graphs, no false positives");
}

#[test]
fn criterion_05_lower_bound_invariant_and_equality_frequency() {
    let t0 = Instant::now();
    let (sweep, sweep_time) = default_sweep();
    // 3 models x 5 node counts x 7 class counts x 4 capacities x
    // 3 algorithms x 50 trials.
    assert_eq!(sweep.rows.len(), 63_000);
    let mut evaluated = 0usize;
    for row in &sweep.rows {
        if let (Some(beta), Some(bound)) = (row.beta_s, row.bound_s) {
            assert!(
                beta >= bound,
                "{} {}n/{}c/{}MB trial {}: beta {beta} below bound {bound}",
                row.model,
                row.n_nodes,
                row.n_classes,
                row.capacity_mb,
                row.trial
            );
            evaluated += 1;
        }
    }
    assert!(evaluated > 10_000, "sweep evaluated only {evaluated} rows");

    // Equality frequency at the hardest cell over 1000 fresh trials.
    let graph = fixture("inception_resnet_v2_like");
    let points = graph.candidate_partition_points();
    let scheme = partition_model(
        &graph,
        &points,
        64 * 1024 * 1024,
        20,
        &TransferConfig::default(),
    )
    .expect("fixture partitions at 64 MB");
    let mut hits = 0usize;
    for trial in 0..1000u32 {
        let seed = cell_seed(42, "equality", 50, 20, 64, trial);
        let comm = generate_rgg(50, seed);
        let Ok(placement) = k_path_matching(&scheme, &comm, 20, seed) else {
            continue;
        };
        let report = evaluate(&scheme, &placement, &comm).expect("evaluation");
        if report.bottleneck_s == report.lower_bound_s {
            hits += 1;
        }
    }
    assert!(hits > 0, "lower bound never attained in 1000 trials");
    let elapsed = t0.elapsed() + *sweep_time;
    budget("criterion 5", elapsed, Duration::from_secs(600));
    println!(
        "criterion 05 PASS ({elapsed:.2?}): beta >= bound on {evaluated} sweep rows; bound attained {hits}/1000 at 50n/20c/64MB"
    );
}

#[test]
fn criterion_06_approximation_ratio_on_guarded_suite() {
    let t0 = Instant::now();
    let cfg = TransferConfig::default();
    let kappa = 64 * 1024 * 1024;
    let mut ratios = Vec::new();
    let mut seed = 1000u64;
    while ratios.len() < 50 {
        seed += 1;
        let graph = random_chain(seed, 8);
        let points = graph.candidate_partition_points();
        let comm = generate_rgg(8, 0x60AC + seed);
        let Ok((_, _, oracle)) = brute_force_optimum(&points, &graph, &comm, kappa, 5, &cfg)
        else {
            continue;
        };
        let Ok(scheme) = partition_model(&graph, &points, kappa, 5, &cfg) else {
            continue;
        };
        let Ok(placement) = k_path_matching(&scheme, &comm, 5, seed) else {
            continue;
        };
        let beta = evaluate(&scheme, &placement, &comm).unwrap().bottleneck_s;
        assert!(beta >= oracle.bottleneck_s - 1e-12, "beat the oracle");
        ratios.push(beta / oracle.bottleneck_s);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean <= 1.15, "mean approximation ratio {mean}");
    let elapsed = t0.elapsed();
    budget("criterion 6", elapsed, Duration::from_secs(300));
    println!(
        "criterion 06 PASS ({elapsed:.2?}): mean ratio {mean:.4} over {} instances (max {:.4})",
        ratios.len(),
        ratios.iter().cloned().fold(f64::MIN, f64::max)
    );
}

#[test]
fn criterion_07_algorithm_ordering_at_fifty_nodes() {
    let t0 = Instant::now();
    let (sweep, _) = default_sweep();
    let at50 = |alg: Algorithm| {
        sweep
            .mean_beta(|r| r.n_nodes == 50 && r.algorithm == alg)
            .expect("50-node cells have data")
    };
    let kpath = at50(Algorithm::KPath);
    let joint = at50(Algorithm::Joint);
    let random = at50(Algorithm::Random);
    assert!(
        random / kpath >= 2.0,
        "random/kpath ratio {} below 2",
        random / kpath
    );
    assert!(joint >= kpath, "joint {joint} beats kpath {kpath} at 50 nodes");
    let elapsed = t0.elapsed();
    println!(
        "criterion 07 PASS ({elapsed:.2?}): 50-node means kpath={kpath:.4} joint={joint:.4} random={random:.4} (random/kpath {:.2}x)",
        random / kpath
    );
}

#[test]
fn criterion_08_pipeline_simulator() {
    let t0 = Instant::now();
    // Convergence to the bottleneck rate at 1000 batches.
    let graph = fixture("inception_resnet_v2_like");
    let points = graph.candidate_partition_points();
    let cfg = TransferConfig::default();
    let scheme = partition_model(&graph, &points, 64 * 1024 * 1024, 8, &cfg).unwrap();
    let comm = generate_rgg(10, 0x51A1);
    let placement = k_path_matching(&scheme, &comm, 8, 9).unwrap();
    let report = evaluate(&scheme, &placement, &comm).unwrap();
    let run = simulate(&scheme, &placement, &comm, 1000, None).unwrap();
    let limit = 1.0 / report.bottleneck_s;
    let rel = (run.measured_throughput_hz - limit).abs() / limit;
    assert!(rel < 0.02, "throughput off by {rel}");

    // Single batch crosses every hop exactly once.
    let single = simulate(&scheme, &placement, &comm, 1, None).unwrap();
    let service = hop_latencies(&scheme, &placement, &comm, None).unwrap();
    assert_eq!(single.end_to_end_latency_s, service.iter().sum::<f64>());

    // Table ordering: the 1x5 grid outruns the 5-ring on the same scheme.
    let shapes = run_shapes(&ShapesConfig {
        model: "resnet50_like".into(),
        sizes: vec![5],
        shapes: vec![Shape::Ring, Shape::Grid],
        batches: 1000,
        ..ShapesConfig::default()
    })
    .unwrap();
    let find = |s: Shape| {
        shapes
            .iter()
            .find(|r| r.shape == s)
            .expect("shape row exists")
    };
    let (ring, grid) = (find(Shape::Ring), find(Shape::Grid));
    assert!(
        grid.throughput_hz > ring.throughput_hz,
        "grid {} vs ring {}",
        grid.throughput_hz,
        ring.throughput_hz
    );
    let elapsed = t0.elapsed();
    budget("criterion 8", elapsed, Duration::from_secs(30));
    println!(
        "criterion 08 PASS ({elapsed:.2?}): throughput rel err {rel:.4}, single-batch exact, grid {:.3} Hz > ring {:.3} Hz",
        grid.throughput_hz, ring.throughput_hz
    );
}

#[test]
fn criterion_09_candidate_point_fixtures() {
    let t0 = Instant::now();
    let chain = fixture("chain");
    let points = chain.candidate_partition_points();
    assert_eq!(points.len(), chain.layer_count(), "chain yields all vertices");

    let diamond = fixture("diamond");
    let points = diamond.candidate_partition_points();
    assert_eq!(
        points.ids(&diamond),
        vec!["a", "d"],
        "diamond yields endpoints only"
    );

    // The interleaved fixture is unpartitionable: no interior cut point
    // exists, and because every vertex must reach the single terminal,
    // the terminal itself always ends the candidate list. The usable
    // candidate set is therefore the source alone, and no default
    // capacity admits a feasible split.
    let nasnet = fixture("nasnet_like");
    let points = nasnet.candidate_partition_points();
    assert!(points.interior(&nasnet).is_empty(), "no interior candidates");
    assert_eq!(
        points.points(),
        &[nasnet.source(), nasnet.sink()],
        "candidate list degenerates to the endpoints"
    );
    for cap_mb in [64u64, 128, 256, 512] {
        assert!(
            partition_model(
                &nasnet,
                &points,
                cap_mb * 1024 * 1024,
                3,
                &TransferConfig::default()
            )
            .is_err(),
            "nasnet-like fixture must be unpartitionable at {cap_mb} MB"
        );
    }

    let inception = fixture("inception_resnet_v2_like");
    let count = inception.candidate_partition_points().len();
    assert!(count >= 25, "inception-like fixture has {count} candidates");
    let elapsed = t0.elapsed();
    budget("criterion 9", elapsed, Duration::from_secs(5));
    println!(
        "criterion 09 PASS ({elapsed:.2?}): chain=all, diamond=endpoints, nasnet-like=no usable cut (source only), inception-like={count} candidates"
    );
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_edgeslice");
    let dir = std::env::temp_dir().join("edgeslice_determinism");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("config.json");
    std::fs::write(
        &config_path,
        r#"{
            "version": "edgeslice-config/1",
            "models": ["resnet50_like", "inception_resnet_v2_like"],
            "node_counts": [5, 20],
            "class_counts": [2, 8],
            "capacities_mb": [64, 512],
            "trials": 3,
            "seed": 1234
        }"#,
    )
    .unwrap();
    let run = |out: &str| {
        let status = std::process::Command::new(bin)
            .args(["sweep", "--config"])
            .arg(&config_path)
            .arg("--out-dir")
            .arg(dir.join(out))
            .status()
            .expect("binary runs");
        assert!(status.success());
        (
            std::fs::read(dir.join(out).join("sweep.csv")).unwrap(),
            std::fs::read(dir.join(out).join("sweep_aggregate.csv")).unwrap(),
        )
    };
    let (rows_a, agg_a) = run("a");
    let (rows_b, agg_b) = run("b");
    assert_eq!(rows_a, rows_b, "sweep.csv differs between reruns");
    assert_eq!(agg_a, agg_b, "aggregate csv differs between reruns");

    let shapes = |out: &str| {
        let path = dir.join(out);
        let status = std::process::Command::new(bin)
            .args(["shapes", "--sizes", "5,9", "--batches", "100", "--out"])
            .arg(&path)
            .status()
            .expect("binary runs");
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(shapes("shapes_a.csv"), shapes("shapes_b.csv"));
    std::fs::remove_dir_all(&dir).ok();
    println!(
        "criterion 10 PASS: sweep and shapes CSVs byte-identical across reruns ({} bytes)",
        rows_a.len()
    );
}
