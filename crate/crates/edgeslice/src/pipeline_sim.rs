//! Discrete-event simulation of the staged inference pipeline.
//!
//! Each hop is a store-and-forward transmitter that moves one batch at a
//! time at its link bandwidth; upstream hops start on the next batch while
//! downstream hops still carry earlier ones. The dispatcher admits a new
//! batch the moment the first hop frees, and buffering between hops is
//! unbounded.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::comm_graph::CommGraph;
use crate::error::{Error, Result};
use crate::evaluator::hop_latencies;
use crate::partitioner::PartitionScheme;
use crate::placement::Placement;

/// Outcome of one simulated run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub batch_count: usize,
    pub measured_throughput_hz: f64,
    pub end_to_end_latency_s: f64,
    pub makespan_s: f64,
    pub per_hop_busy_fraction: Vec<f64>,
}

#[derive(Debug, PartialEq)]
struct Event {
    time: f64,
    stage: usize,
    batch: usize,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (time, stage, batch).
        other
            .time
            .partial_cmp(&self.time)
            .expect("event times are finite")
            .then(other.stage.cmp(&self.stage))
            .then(other.batch.cmp(&self.batch))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Runs `batches` through the placed pipeline and measures steady-state
/// throughput, mean end-to-end latency, and per-hop utilization.
pub fn simulate(
    scheme: &PartitionScheme,
    placement: &Placement,
    graph: &CommGraph,
    batches: usize,
    compute_times_s: Option<&[f64]>,
) -> Result<PipelineRun> {
    assert!(batches >= 1);
    let service = hop_latencies(scheme, placement, graph, compute_times_s)?;
    simulate_hops(&service, batches)
}

/// Core event loop over explicit per-hop service times.
pub fn simulate_hops(service: &[f64], batches: usize) -> Result<PipelineRun> {
    let stages = service.len();
    if stages == 0 {
        return Err(Error::LengthMismatch("pipeline has no hops".into()));
    }

    let mut events = BinaryHeap::new();
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); stages];
    let mut idle = vec![true; stages];
    let mut entry_time = vec![0.0f64; batches];
    let mut exit_time = vec![0.0f64; batches];
    let mut busy = vec![0.0f64; stages];

    entry_time[0] = 0.0;
    idle[0] = false;
    busy[0] += service[0];
    events.push(Event { time: service[0], stage: 0, batch: 0 });
    let mut admitted = 1usize;

    while let Some(Event { time, stage, batch }) = events.pop() {
        // Batch leaves `stage`; hand it to the next hop or out the end.
        if stage + 1 < stages {
            if idle[stage + 1] {
                idle[stage + 1] = false;
                busy[stage + 1] += service[stage + 1];
                events.push(Event {
                    time: time + service[stage + 1],
                    stage: stage + 1,
                    batch,
                });
            } else {
                queues[stage + 1].push_back(batch);
            }
        } else {
            exit_time[batch] = time;
        }

        // The stage frees: pull queued work, or admit a fresh batch at the
        // dispatcher-facing hop.
        if let Some(next) = queues[stage].pop_front() {
            busy[stage] += service[stage];
            events.push(Event { time: time + service[stage], stage, batch: next });
        } else if stage == 0 && admitted < batches {
            entry_time[admitted] = time;
            busy[0] += service[0];
            events.push(Event { time: time + service[0], stage: 0, batch: admitted });
            admitted += 1;
        } else {
            idle[stage] = true;
        }
    }

    let makespan = exit_time[batches - 1];
    let total_latency: f64 = exit_time
        .iter()
        .zip(&entry_time)
        .map(|(e, s)| e - s)
        .sum();
    Ok(PipelineRun {
        batch_count: batches,
        measured_throughput_hz: batches as f64 / makespan,
        end_to_end_latency_s: total_latency / batches as f64,
        makespan_s: makespan,
        per_hop_busy_fraction: busy.iter().map(|b| b / makespan).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comm_graph::{generate_shape, Shape};
    use crate::evaluator::BYTES_TO_MEGABITS;
    use crate::partitioner::{ClassLabel, Partition};
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64;

    /// Tandem-queue recurrence: departure of batch b from stage j.
    fn recurrence_oracle(service: &[f64], batches: usize) -> (f64, f64) {
        let stages = service.len();
        let mut prev = vec![0.0f64; stages];
        let mut entries = vec![0.0f64; batches];
        let mut total_latency = 0.0;
        for b in 0..batches {
            let mut cur = vec![0.0f64; stages];
            let admit = if b == 0 { 0.0 } else { prev[0] };
            entries[b] = admit;
            cur[0] = admit + service[0];
            for j in 1..stages {
                cur[j] = cur[j - 1].max(prev[j]) + service[j];
            }
            total_latency += cur[stages - 1] - entries[b];
            prev = cur;
        }
        (prev[stages - 1], total_latency / batches as f64)
    }

    #[test]
    fn single_hop_throughput_and_latency() {
        let run = simulate_hops(&[2.0], 10).unwrap();
        assert_eq!(run.makespan_s, 20.0);
        assert_eq!(run.measured_throughput_hz, 0.5);
        assert_eq!(run.end_to_end_latency_s, 2.0);
        assert_eq!(run.per_hop_busy_fraction, vec![1.0]);
    }

    #[test]
    fn two_hop_steady_state() {
        let run = simulate_hops(&[2.0, 1.0], 500).unwrap();
        assert!((run.measured_throughput_hz - 0.5).abs() < 0.01);
        assert!((run.end_to_end_latency_s - 3.0).abs() < 0.01);
    }

    #[test]
    fn single_batch_latency_is_exact_sum() {
        let service = [0.7, 1.3, 0.2, 2.5];
        let run = simulate_hops(&service, 1).unwrap();
        let expected: f64 = service.iter().sum();
        assert_eq!(run.end_to_end_latency_s, expected);
        assert_eq!(run.makespan_s, expected);
    }

    #[test]
    fn des_matches_tandem_recurrence() {
        let mut rng = Pcg64::seed_from_u64(0xDE5);
        for _ in 0..50 {
            let stages = rng.gen_range(1..7);
            let service: Vec<f64> = (0..stages).map(|_| rng.gen_range(0.1..3.0)).collect();
            let batches = rng.gen_range(1..60);
            let run = simulate_hops(&service, batches).unwrap();
            let (makespan, latency) = recurrence_oracle(&service, batches);
            assert!((run.makespan_s - makespan).abs() < 1e-9);
            assert!((run.end_to_end_latency_s - latency).abs() < 1e-9);
        }
    }

    #[test]
    fn throughput_converges_to_bottleneck_rate() {
        let service = [1.4, 0.9, 2.1, 0.3];
        let run = simulate_hops(&service, 1000).unwrap();
        let limit = 1.0 / 2.1;
        assert!(
            (run.measured_throughput_hz - limit).abs() / limit < 0.02,
            "throughput {} vs limit {limit}",
            run.measured_throughput_hz
        );
        // The bottleneck hop saturates.
        assert!(run.per_hop_busy_fraction[2] > 0.99);
        assert!(run.per_hop_busy_fraction[2] <= 1.0 + 1e-9);
    }

    #[test]
    fn latency_never_below_service_sum() {
        let service = [1.0, 1.0, 1.0];
        let run = simulate_hops(&service, 200).unwrap();
        assert!(run.end_to_end_latency_s >= service.iter().sum::<f64>() - 1e-12);
    }

    fn scheme_with_transfers(transfers: &[f64]) -> PartitionScheme {
        let partitions: Vec<Partition> = transfers
            .iter()
            .enumerate()
            .map(|(i, &t)| Partition {
                range: if i == 0 { None } else { Some((i - 1, i - 1)) },
                memory_bytes: 0,
                boundary_layer: format!("p{i}"),
                transfer_bytes: t,
                class: ClassLabel(0),
                is_dispatcher: i == 0,
            })
            .collect();
        PartitionScheme {
            partitions,
            n_classes: 2,
            breakpoints: vec![],
            candidate_transfers: transfers.to_vec(),
            total_cost: transfers.iter().sum(),
        }
    }

    #[test]
    fn grid_line_outruns_ring_on_same_scheme() {
        // Five equal carried transfers over five nodes placed in index
        // order: every ring chord is longer than the grid spacing, so each
        // hop is slower and the ring's throughput strictly trails.
        let mbit = 1.0 / BYTES_TO_MEGABITS;
        let scheme = scheme_with_transfers(&[8.0 * mbit; 5]);
        let placement = Placement { node_sequence: vec![0, 1, 2, 3, 4] };
        let ring = generate_shape(Shape::Ring, 5, 20.0, 0);
        let grid = generate_shape(Shape::Grid, 5, 20.0, 0);
        let ring_run = simulate(&scheme, &placement, &ring, 300, None).unwrap();
        let grid_run = simulate(&scheme, &placement, &grid, 300, None).unwrap();
        assert!(
            grid_run.measured_throughput_hz > ring_run.measured_throughput_hz,
            "grid {} vs ring {}",
            grid_run.measured_throughput_hz,
            ring_run.measured_throughput_hz
        );
        assert!(grid_run.end_to_end_latency_s < ring_run.end_to_end_latency_s);
    }

    #[test]
    fn compute_times_add_to_single_batch_latency() {
        let mbit = 1.0 / BYTES_TO_MEGABITS;
        let scheme = scheme_with_transfers(&[2.0 * mbit, 1.0 * mbit, 0.1 * mbit]);
        let graph = CommGraph::from_bandwidth_matrix(3, |_, _| 1.0);
        let placement = Placement { node_sequence: vec![0, 1, 2] };
        let compute = [0.5, 0.25];
        let run = simulate(&scheme, &placement, &graph, 1, Some(&compute)).unwrap();
        assert!((run.end_to_end_latency_s - (2.0 + 1.0 + 0.75)).abs() < 1e-12);
    }
}
