//! Per-hop latency evaluation, the bottleneck lower bound, and the
//! exhaustive optimality oracle used by tests.
//!
//! Transfer sizes are stored in bytes and converted to megabits at
//! evaluation time; bandwidths are in Mbps, latencies in seconds. The hop
//! from the dispatcher into the first compute node counts toward the
//! bottleneck; the return hop carrying the final result back does not.

use crate::comm_graph::CommGraph;
use crate::error::{Error, Result};
use crate::model_graph::{CandidatePoints, ModelGraph};
use crate::partitioner::{
    build_partition_graph, PartitionScheme, TransferClassifier, TransferConfig,
};
use crate::placement::Placement;

pub const BYTES_TO_MEGABITS: f64 = 8e-6;

/// Latency summary of one placed pipeline.
#[derive(Debug, Clone)]
pub struct LatencyReport {
    pub per_hop_latency_s: Vec<f64>,
    pub bottleneck_s: f64,
    pub throughput_hz: f64,
    pub lower_bound_s: f64,
    pub approx_ratio: f64,
}

/// Provable floor on the bottleneck: the largest transfer must cross some
/// edge, and the best it can get is the fastest edge.
pub fn latency_lower_bound(transfer_bytes: &[f64], bandwidths_mbps: &[f64]) -> f64 {
    assert!(!transfer_bytes.is_empty() && !bandwidths_mbps.is_empty());
    let max_transfer = transfer_bytes.iter().cloned().fold(f64::MIN, f64::max);
    let max_bandwidth = bandwidths_mbps.iter().cloned().fold(f64::MIN, f64::max);
    assert!(max_bandwidth > 0.0);
    max_transfer * BYTES_TO_MEGABITS / max_bandwidth
}

/// Communication time of each hop, with an optional additive per-hop
/// compute term.
pub fn hop_latencies(
    scheme: &PartitionScheme,
    placement: &Placement,
    graph: &CommGraph,
    compute_s: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if placement.len() != scheme.partitions.len() {
        return Err(Error::LengthMismatch(format!(
            "{} placement slots for {} partitions",
            placement.len(),
            scheme.partitions.len()
        )));
    }
    let (carried, _) = scheme.carried();
    let bandwidths = placement.hop_bandwidths(graph);
    debug_assert_eq!(carried.len(), bandwidths.len());
    if let Some(c) = compute_s {
        if c.len() != carried.len() {
            return Err(Error::LengthMismatch(format!(
                "{} compute terms for {} hops",
                c.len(),
                carried.len()
            )));
        }
    }
    Ok(carried
        .iter()
        .zip(&bandwidths)
        .enumerate()
        .map(|(i, (&bytes, &mbps))| {
            bytes * BYTES_TO_MEGABITS / mbps + compute_s.map_or(0.0, |c| c[i])
        })
        .collect())
}

/// Evaluates a placed scheme: per-hop latencies, bottleneck, throughput,
/// lower bound, and the achieved ratio.
pub fn evaluate(
    scheme: &PartitionScheme,
    placement: &Placement,
    graph: &CommGraph,
) -> Result<LatencyReport> {
    let per_hop = hop_latencies(scheme, placement, graph, None)?;
    let bottleneck = per_hop.iter().cloned().fold(f64::MIN, f64::max);
    let all_bandwidths: Vec<f64> = graph.edges_desc().iter().map(|&(w, _, _)| w).collect();
    let bound = latency_lower_bound(&scheme.transfer_sizes(), &all_bandwidths);
    Ok(LatencyReport {
        per_hop_latency_s: per_hop,
        bottleneck_s: bottleneck,
        throughput_hz: 1.0 / bottleneck,
        lower_bound_s: bound,
        approx_ratio: bottleneck / bound,
    })
}

const ORACLE_MAX_POINTS: usize = 14;
const ORACLE_MAX_NODES: usize = 8;

/// Exhaustive global optimum over all feasible contiguous partitionings
/// crossed with all injective node sequences. Guarded to small instances;
/// ties resolve to the first optimum in (cut set, node sequence)
/// lexicographic enumeration order, i.e. the smallest node sequence.
pub fn brute_force_optimum(
    points: &CandidatePoints,
    graph: &ModelGraph,
    comm: &CommGraph,
    kappa_bytes: u64,
    n_classes: usize,
    cfg: &TransferConfig,
) -> Result<(PartitionScheme, Placement, LatencyReport)> {
    let k = points.len();
    let n = comm.node_count();
    if k > ORACLE_MAX_POINTS || n > ORACLE_MAX_NODES {
        return Err(Error::InstanceTooLarge(format!(
            "{k} candidate points, {n} nodes (limits {ORACLE_MAX_POINTS}, {ORACLE_MAX_NODES})"
        )));
    }
    let pg = build_partition_graph(points, graph, kappa_bytes, cfg)?;
    let classifier = TransferClassifier::fit(pg.point_transfers(), n_classes);
    let feasible: std::collections::HashSet<(usize, usize)> =
        pg.ranges().iter().copied().collect();
    let transfers = pg.point_transfers();

    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for mask in 0u32..(1 << (k - 1)) {
        let mut ends: Vec<usize> = (0..k - 1).filter(|&j| mask >> j & 1 == 1).collect();
        ends.push(k - 1);
        if ends.len() + 1 > n {
            continue;
        }
        let mut start = 0usize;
        let mut ok = true;
        for &end in &ends {
            if !feasible.contains(&(start, end)) {
                ok = false;
                break;
            }
            start = end + 1;
        }
        if !ok {
            continue;
        }
        // Carried transfers: dispatcher plus all but the last partition.
        let mut carried_mbit = vec![transfers[0] * BYTES_TO_MEGABITS];
        for &end in &ends[..ends.len() - 1] {
            carried_mbit.push(transfers[end] * BYTES_TO_MEGABITS);
        }
        let slots = ends.len() + 1;
        let mut seq: Vec<usize> = Vec::with_capacity(slots);
        let mut used = vec![false; n];
        search_sequences(
            comm,
            &carried_mbit,
            slots,
            &mut seq,
            &mut used,
            0.0,
            &ends,
            &mut best,
        );
    }

    let (_, ends, seq) = best.ok_or(Error::NoPath)?;
    let scheme = scheme_from_ends(&pg, &classifier, &ends);
    let placement = Placement { node_sequence: seq };
    let report = evaluate(&scheme, &placement, comm)?;
    Ok((scheme, placement, report))
}

#[allow(clippy::too_many_arguments)]
fn search_sequences(
    comm: &CommGraph,
    carried_mbit: &[f64],
    slots: usize,
    seq: &mut Vec<usize>,
    used: &mut [bool],
    max_so_far: f64,
    ends: &[usize],
    best: &mut Option<(f64, Vec<usize>, Vec<usize>)>,
) {
    if let Some((b, _, _)) = best {
        if max_so_far >= *b {
            return;
        }
    }
    if seq.len() == slots {
        *best = Some((max_so_far, ends.to_vec(), seq.clone()));
        return;
    }
    for node in 0..comm.node_count() {
        if used[node] {
            continue;
        }
        let hop_latency = if let Some(&prev) = seq.last() {
            carried_mbit[seq.len() - 1] / comm.bandwidth(prev, node)
        } else {
            0.0
        };
        used[node] = true;
        seq.push(node);
        search_sequences(
            comm,
            carried_mbit,
            slots,
            seq,
            used,
            max_so_far.max(hop_latency),
            ends,
            best,
        );
        seq.pop();
        used[node] = false;
    }
}

fn scheme_from_ends(
    pg: &crate::partitioner::PartitionGraph,
    classifier: &TransferClassifier,
    ends: &[usize],
) -> PartitionScheme {
    use crate::partitioner::Partition;
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
            .expect("oracle ranges are feasible");
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
