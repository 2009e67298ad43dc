use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use topograph::fusion::FusionMode;
use topograph::FiltrationKind;
use topograph_cli::commands;
use topograph_cli::config::{parse_patch, parse_resolution, Overrides, PipelineConfig};
use topograph_cli::selftest::run_check;

const EXIT_INVALID: u8 = 1;
const EXIT_CHECK: u8 = 2;

#[derive(Parser)]
#[command(name = "topograph", version, about = "Patch-wise persistent-homology encodings of raster images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct PipelineArgs {
    /// JSON configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    patch_size: Option<usize>,
    /// Persistence-image resolution, e.g. 7 or 7x7
    #[arg(long, value_parser = parse_resolution)]
    pi_res: Option<(usize, usize)>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated list, e.g. intensity,gradient
    #[arg(long, value_delimiter = ',', value_parser = parse_filtration)]
    filtrations: Option<Vec<FiltrationKind>>,
    /// none, cmvfm, concat or meanpool
    #[arg(long, value_parser = parse_fusion)]
    fusion: Option<FusionMode>,
    /// Directory holding fusion weights and their manifest.json
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Seed for generated fusion weights
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

impl PipelineArgs {
    fn resolve(self) -> Result<PipelineConfig> {
        let overrides = Overrides {
            patch_size: self.patch_size,
            pi_resolution: self.pi_res,
            sigma: self.sigma,
            filtrations: self.filtrations,
            fusion: self.fusion,
            weights: self.weights,
            seed: self.seed,
            out: self.out,
            jobs: self.jobs,
        };
        PipelineConfig::resolve(self.config.as_deref(), overrides)
    }
}

fn parse_fusion(s: &str) -> Result<FusionMode, String> {
    s.parse().map_err(|e: topograph::Error| e.to_string())
}

fn parse_filtration(s: &str) -> Result<FiltrationKind, String> {
    s.parse().map_err(|e: topograph::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Print the persistence diagram of an image or of one of its patches
    Diagram {
        image: PathBuf,
        #[arg(long, default_value = "intensity", value_parser = parse_filtration)]
        filtration: FiltrationKind,
        /// Patch coordinates ROW,COL; the patch is min-max normalized first
        #[arg(long, value_parser = parse_patch)]
        patch: Option<(usize, usize)>,
        #[arg(long, default_value_t = 28)]
        patch_size: usize,
        /// Write the dump to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one TopoImage per filtration for each image or directory of PNGs
    Topoimage {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also write a PNG preview of this channel next to each NPY file
        #[arg(long, num_args = 0..=1, default_missing_value = "0")]
        preview: Option<usize>,
    },
    /// Fuse an image with TopoImages previously written by `topoimage`
    Fuse {
        image: PathBuf,
        /// Directory containing <stem>.<filtration>.npy files
        views: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Compare fast persistence with the reduction oracle on random grids
    Check {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Suggest a patch side from an average object area
    SuggestPatch {
        avg_object_pixels: u64,
        #[arg(default_value_t = 224)]
        image_side: usize,
    },
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker pool")?;
    Ok(pool.install(f))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Diagram {
            image,
            filtration,
            patch,
            patch_size,
            out,
        } => {
            let dump = commands::diagram(&image, filtration, patch, patch_size)?;
            match out {
                Some(path) => std::fs::write(&path, dump).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{dump}"),
            }
        }
        Command::Topoimage {
            inputs,
            pipeline,
            preview,
        } => {
            let cfg = pipeline.resolve()?;
            let inputs = commands::collect_inputs(&inputs)?;
            let outcome = with_jobs(cfg.jobs, || commands::topoimage_batch(&inputs, &cfg, preview))??;
            for path in &outcome.written {
                println!("{}", path.display());
            }
            for (path, err) in &outcome.failures {
                eprintln!("error: {}: {err}", path.display());
            }
            if !outcome.failures.is_empty() {
                eprintln!("{} of {} images failed", outcome.failures.len(), inputs.len());
                return Ok(EXIT_INVALID);
            }
        }
        Command::Fuse { image, views, pipeline } => {
            let cfg = pipeline.resolve()?;
            let path = with_jobs(cfg.jobs, || commands::fuse(&image, &views, &cfg))??;
            println!("{}", path.display());
        }
        Command::Check {
            count,
            seed,
            inject_fault,
        } => {
            let report = run_check(count, seed, inject_fault);
            println!("{}", report.summary());
            if !report.passed() {
                println!("check FAILED");
                return Ok(EXIT_CHECK);
            }
        }
        Command::SuggestPatch {
            avg_object_pixels,
            image_side,
        } => println!("{}", commands::suggest_patch(avg_object_pixels, image_side)?),
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
