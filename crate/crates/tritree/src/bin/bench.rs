//! Command-line benchmark runner.
//!
//! Subcommands: `run` (cross-validated benchmark from a config file),
//! `gen` (write a synthetic dataset as CSV), `export-tree` (render a saved
//! tree model as DOT or JSON), `bayes` (Monte Carlo Bayes-error estimate of
//! a generator).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tritree::bench::{emit_report, export_tree, run_benchmark, BenchConfig, ExportFormat};
use tritree::data::{
    estimate_bayes_error_mc, gen_ringnorm, gen_two_moons, gen_twonorm, gen_waveform,
    registered_bayes_error, write_csv, GeneratorId,
};
use tritree::tree::FittedTree;

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Ternary decision tree benchmark runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the benchmark described by a config file and write reports.
    Run {
        /// Config file path (see the crate README for the format).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json / report.csv / report.txt.
        /// Defaults to $BENCH_OUT_DIR, then ./bench-out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit nonzero if any dataset was aborted.
        #[arg(long)]
        strict: bool,
    },
    /// Generate a synthetic dataset and write it as CSV.
    Gen {
        /// twonorm | ringnorm | waveform | two_moons
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Noise level (two_moons only).
        #[arg(long, default_value_t = 0.25)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a saved tree model (JSON) as Graphviz DOT or canonical JSON.
    ExportTree {
        #[arg(long)]
        model: PathBuf,
        /// dot | json
        #[arg(long, default_value = "dot")]
        format: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo Bayes-error estimate for a generator with a known
    /// optimal rule.
    Bayes {
        /// twonorm | ringnorm | waveform
        #[arg(long)]
        generator: String,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> tritree::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            strict,
        } => {
            let config = BenchConfig::from_file(&config)?;
            let out_dir = out
                .or_else(|| std::env::var_os("BENCH_OUT_DIR").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("bench-out"));
            let report = run_benchmark(&config)?;
            let paths = emit_report(&report, &out_dir)?;
            for p in &paths {
                println!("wrote {}", p.display());
            }
            let aborted: Vec<_> = report
                .skipped
                .iter()
                .filter(|s| s.method.is_none())
                .collect();
            if !aborted.is_empty() {
                let summary = serde_json::json!({
                    "aborted_datasets": aborted
                        .iter()
                        .map(|s| serde_json::json!({"dataset": s.dataset, "reason": s.reason}))
                        .collect::<Vec<_>>(),
                });
                eprintln!("{summary}");
                if strict {
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            dataset,
            n,
            seed,
            noise,
            out,
        } => {
            let data = match dataset.as_str() {
                "two_moons" => gen_two_moons(n, noise, seed),
                other => match other.parse::<GeneratorId>()? {
                    GeneratorId::Twonorm => gen_twonorm(n, seed),
                    GeneratorId::Ringnorm => gen_ringnorm(n, seed),
                    GeneratorId::Waveform => gen_waveform(n, seed),
                },
            };
            write_csv(&data, &out)?;
            println!(
                "wrote {} ({} rows, {} features, {} classes)",
                out.display(),
                data.n_rows(),
                data.n_features(),
                data.n_classes()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportTree { model, format, out } => {
            let text =
                std::fs::read_to_string(&model).map_err(|e| tritree::Error::io(&model, e))?;
            let tree = FittedTree::from_json(&text)?;
            let format: ExportFormat = format.parse()?;
            let rendered = export_tree(&tree, format);
            match out {
                Some(path) => {
                    std::fs::write(&path, rendered).map_err(|e| tritree::Error::io(&path, e))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{rendered}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bayes {
            generator,
            samples,
            seed,
        } => {
            let id: GeneratorId = generator.parse()?;
            let estimate = estimate_bayes_error_mc(id, samples, seed);
            println!(
                "{id}: bayes_error_mc = {estimate:.6} ({samples} samples, seed {seed}; registered reference {:.3})",
                registered_bayes_error(id)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
