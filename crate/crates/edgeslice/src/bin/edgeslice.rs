//! Command-line entry point; every subcommand is a thin wrapper over the
//! library. Exit codes: 0 success, 2 parse/validation, 3 infeasible,
//! 4 matching failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use edgeslice::comm_graph::{generate_rgg, CommGraph, Shape};
use edgeslice::error::Error;
use edgeslice::evaluator::brute_force_optimum;
use edgeslice::partitioner::{partition_model, PartitionScheme, TransferConfig};
use edgeslice::rgg_stats;
use edgeslice::sweep::{
    self, place_with_retry, placement_report_json, resolve_model, Algorithm, ExperimentConfig,
    ShapesConfig,
};

#[derive(Parser)]
#[command(name = "edgeslice", about = "DNN partitioning and placement over simulated edge clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a model into memory-feasible pipeline segments.
    Partition {
        /// Bundled fixture name or model file path.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 64)]
        capacity_mb: u64,
        #[arg(long, default_value_t = 8)]
        classes: usize,
        #[arg(long, default_value_t = 3.024)]
        lambda: f64,
        #[arg(long, default_value_t = 4.0)]
        bytes_per_element: f64,
        /// Output path for the partition report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place a partition scheme onto a communication graph.
    Place {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        comm: PathBuf,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        retries: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full experiment grid and write sweep CSVs.
    Sweep {
        /// Config file; defaults reproduce the standard grid.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
    /// Simulate ring/grid/cluster layouts and write a shapes CSV.
    Shapes {
        #[arg(long, default_value = "resnet50_like")]
        model: String,
        #[arg(long, value_delimiter = ',', default_value = "5,9,20")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "ring,grid,cluster")]
        shapes: Vec<Shape>,
        #[arg(long, default_value_t = 20.0)]
        spacing: f64,
        #[arg(long, default_value_t = 64)]
        capacity_mb: u64,
        #[arg(long, default_value_t = 5)]
        classes: usize,
        #[arg(long, default_value_t = 1000)]
        batches: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the analytic communication-graph statistics.
    Stats {
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Exhaustive small-instance optimum (guarded).
    Oracle {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 64)]
        capacity_mb: u64,
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Generate a random communication graph file for reuse.
    GenComm {
        #[arg(long, default_value_t = 20)]
        nodes: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_or_print(out: Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Partition {
            model,
            capacity_mb,
            classes,
            lambda,
            bytes_per_element,
            out,
        } => {
            let (name, graph) = resolve_model(&model)?;
            let points = graph.candidate_partition_points();
            eprintln!(
                "{name}: {} layers, {} candidate partition points",
                graph.layer_count(),
                points.len()
            );
            if points.interior(&graph).is_empty() {
                eprintln!("note: no interior cut point; the model body is one indivisible block");
            }
            let cfg = TransferConfig {
                bytes_per_element,
                compression_ratio: lambda,
            };
            let scheme =
                partition_model(&graph, &points, capacity_mb * 1024 * 1024, classes, &cfg)?;
            eprintln!(
                "{} partitions, total transfer {:.1} KiB",
                scheme.partitions.len() - 1,
                scheme.total_cost / 1024.0
            );
            write_or_print(out, &scheme.to_json_string())
        }
        Command::Place {
            scheme,
            comm,
            classes,
            seed,
            retries,
            out,
        } => {
            let scheme_text = std::fs::read_to_string(&scheme)?;
            let scheme =
                PartitionScheme::from_json_str(&scheme_text, &scheme.display().to_string())?;
            let comm_text = std::fs::read_to_string(&comm)?;
            let comm = CommGraph::from_json_str(&comm_text, &comm.display().to_string())?;
            let classes = classes.unwrap_or(scheme.n_classes);
            let (placement, used_classes) =
                place_with_retry(&scheme, &comm, classes, seed, retries)?;
            if used_classes != classes {
                eprintln!("matched after retrying with {used_classes} classes");
            }
            let report = placement_report_json(
                &scheme,
                &placement,
                &comm,
                Algorithm::KPath,
                used_classes,
                seed,
            )?;
            write_or_print(out, &report)
        }
        Command::Sweep { config, out_dir } => {
            let config = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            let output = sweep::run_sweep(&config)?;
            std::fs::create_dir_all(&out_dir)?;
            let rows_path = out_dir.join("sweep.csv");
            std::fs::write(&rows_path, output.to_csv_string())?;
            let agg_path = out_dir.join("sweep_aggregate.csv");
            std::fs::write(&agg_path, output.aggregate_csv_string())?;
            eprintln!(
                "wrote {} rows to {} (aggregate at {})",
                output.rows.len(),
                rows_path.display(),
                agg_path.display()
            );
            Ok(())
        }
        Command::Shapes {
            model,
            sizes,
            shapes,
            spacing,
            capacity_mb,
            classes,
            batches,
            seed,
            out,
        } => {
            let config = ShapesConfig {
                model,
                sizes,
                shapes,
                spacing_m: spacing,
                capacity_mb,
                n_classes: classes,
                batches,
                seed,
                transfer: TransferConfig::default(),
            };
            let rows = sweep::run_shapes(&config)?;
            write_or_print(out, &sweep::shapes_csv_string(&rows))
        }
        Command::Stats {
            resolution,
            mc_samples,
            seed,
        } => {
            print!("{}", rgg_stats::statistics_report(resolution, mc_samples, seed));
            Ok(())
        }
        Command::Oracle {
            model,
            nodes,
            capacity_mb,
            classes,
            seed,
        } => {
            let (name, graph) = resolve_model(&model)?;
            let points = graph.candidate_partition_points();
            let comm = generate_rgg(nodes, seed);
            let (scheme, placement, report) = brute_force_optimum(
                &points,
                &graph,
                &comm,
                capacity_mb * 1024 * 1024,
                classes,
                &TransferConfig::default(),
            )?;
            eprintln!(
                "{name}: optimum over {} partitions on {nodes} nodes",
                scheme.partitions.len() - 1
            );
            println!(
                "{}",
                placement_report_json(&scheme, &placement, &comm, Algorithm::KPath, classes, seed)?
            );
            eprintln!("bottleneck {:.6} s (bound {:.6} s)", report.bottleneck_s, report.lower_bound_s);
            Ok(())
        }
        Command::GenComm { nodes, seed, out } => {
            let comm = generate_rgg(nodes, seed);
            write_or_print(Some(out), &comm.to_json_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
