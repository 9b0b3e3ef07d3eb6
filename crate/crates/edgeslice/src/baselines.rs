//! Comparison algorithms run under the same feasibility rules as the main
//! pipeline: a uniformly random partition/placement and a greedy joint
//! optimizer that grows the cheapest partitions while walking the locally
//! best bandwidth edges.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::comm_graph::CommGraph;
use crate::error::{Error, Result};
use crate::evaluator::BYTES_TO_MEGABITS;
use crate::model_graph::{CandidatePoints, ModelGraph};
use crate::partitioner::{
    build_partition_graph, PartitionGraph, PartitionScheme, TransferClassifier, TransferConfig,
};
use crate::placement::Placement;

/// Baseline schemes label their classes with a nominal 3-way split; the
/// labels are informational since neither baseline consults them.
const BASELINE_CLASSES: usize = 3;

/// Draws that keep rejecting infeasible partitions are abandoned here.
const DRAW_CAP: usize = 10_000;

fn scheme_from_ends(pg: &PartitionGraph, ends: &[usize]) -> PartitionScheme {
    use crate::partitioner::Partition;
    let classifier = TransferClassifier::fit(pg.point_transfers(), BASELINE_CLASSES);
    let transfers = pg.point_transfers();
    let mut partitions = vec![Partition {
        range: None,
        memory_bytes: 0,
        boundary_layer: pg.point_id(0).to_string(),
        transfer_bytes: transfers[0],
        class: classifier.classify(transfers[0]),
        is_dispatcher: true,
    }];
    let mut total_cost = 0.0;
    let mut start = 0usize;
    for &end in ends {
        let idx = pg
            .ranges()
            .iter()
            .position(|&r| r == (start, end))
            .expect("chosen ranges are feasible");
        partitions.push(Partition {
            range: Some((start, end)),
            memory_bytes: pg.range_memory(idx),
            boundary_layer: pg.point_id(end).to_string(),
            transfer_bytes: transfers[end],
            class: classifier.classify(transfers[end]),
            is_dispatcher: false,
        });
        total_cost += transfers[end];
        start = end + 1;
    }
    PartitionScheme {
        partitions,
        n_classes: classifier.n_classes(),
        breakpoints: classifier.breakpoints().to_vec(),
        candidate_transfers: transfers.to_vec(),
        total_cost,
    }
}

/// Repeatedly draws a random unused node and a random feasible contiguous
/// partition until the model is covered.
pub fn random_baseline(
    points: &CandidatePoints,
    graph: &ModelGraph,
    comm: &CommGraph,
    kappa_bytes: u64,
    cfg: &TransferConfig,
    seed: u64,
) -> Result<(PartitionScheme, Placement)> {
    let pg = build_partition_graph(points, graph, kappa_bytes, cfg)?;
    let k = points.len();
    let feasible: std::collections::HashSet<(usize, usize)> =
        pg.ranges().iter().copied().collect();
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut unused: Vec<usize> = (0..comm.node_count()).collect();
    let draw_node = |rng: &mut Pcg64, unused: &mut Vec<usize>| -> Result<usize> {
        if unused.is_empty() {
            return Err(Error::MatchingFailure { class: 0, k: 0, start_slot: 0 });
        }
        let i = rng.gen_range(0..unused.len());
        Ok(unused.swap_remove(i))
    };

    let mut seq = vec![draw_node(&mut rng, &mut unused)?];
    let mut ends = Vec::new();
    let mut start = 0usize;
    let mut draws = 0usize;
    while start < k {
        let node = draw_node(&mut rng, &mut unused)?;
        loop {
            draws += 1;
            if draws > DRAW_CAP {
                return Err(Error::Infeasible {
                    capacity_bytes: kappa_bytes,
                    reason: format!("random draw cap of {DRAW_CAP} exceeded"),
                });
            }
            let end = rng.gen_range(start..k);
            if feasible.contains(&(start, end)) {
                ends.push(end);
                start = end + 1;
                break;
            }
        }
        seq.push(node);
    }
    Ok((scheme_from_ends(&pg, &ends), Placement { node_sequence: seq }))
}

/// Greedy partition choice shared by every start node: from each uncovered
/// prefix, take the feasible range with the smallest boundary transfer.
fn greedy_ends(pg: &PartitionGraph, n_points: usize) -> Vec<usize> {
    let feasible: std::collections::HashSet<(usize, usize)> =
        pg.ranges().iter().copied().collect();
    let transfers = pg.point_transfers();
    let mut ends = Vec::new();
    let mut start = 0usize;
    while start < n_points {
        let mut best: Option<usize> = None;
        for end in start..n_points {
            if !feasible.contains(&(start, end)) {
                continue;
            }
            if best.is_none_or(|b| transfers[end] < transfers[b]) {
                best = Some(end);
            }
        }
        let end = best.expect("singleton ranges are feasible");
        ends.push(end);
        start = end + 1;
    }
    ends
}

/// For every start node, walks the locally highest-bandwidth unvisited
/// neighbor chain and keeps the start whose walk gives the smallest
/// bottleneck. Deterministic: ties fall to the lower node index.
pub fn joint_optimization_baseline(
    points: &CandidatePoints,
    graph: &ModelGraph,
    comm: &CommGraph,
    kappa_bytes: u64,
    cfg: &TransferConfig,
) -> Result<(PartitionScheme, Placement)> {
    let pg = build_partition_graph(points, graph, kappa_bytes, cfg)?;
    let ends = greedy_ends(&pg, points.len());
    let scheme = scheme_from_ends(&pg, &ends);
    let slots = ends.len() + 1;
    let n = comm.node_count();
    if n < slots {
        return Err(Error::MatchingFailure { class: 0, k: slots, start_slot: 0 });
    }
    let (carried, _) = scheme.carried();

    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in 0..n {
        let mut seq = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        while seq.len() < slots {
            let cur = *seq.last().expect("sequence is non-empty");
            let next = (0..n)
                .filter(|&v| !used[v])
                .max_by(|&a, &b| {
                    comm.bandwidth(cur, a)
                        .partial_cmp(&comm.bandwidth(cur, b))
                        .expect("bandwidths are finite")
                        .then(b.cmp(&a))
                })
                .expect("cluster has enough nodes");
            used[next] = true;
            seq.push(next);
        }
        let bottleneck = carried
            .iter()
            .zip(seq.windows(2))
            .map(|(&bytes, w)| bytes * BYTES_TO_MEGABITS / comm.bandwidth(w[0], w[1]))
            .fold(f64::MIN, f64::max);
        if best.as_ref().is_none_or(|(b, _)| bottleneck < *b) {
            best = Some((bottleneck, seq));
        }
    }
    let (_, seq) = best.expect("at least one start node");
    Ok((scheme, Placement { node_sequence: seq }))
}
