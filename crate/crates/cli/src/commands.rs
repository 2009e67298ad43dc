//! Command implementations, independent of argument parsing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use topograph::cubical::compute_diagram;
use topograph::fusion::{
    cmvfm_fuse, fuse_concat, fuse_meanpool, init_weights, load_weights, CmvfmDims, FusionMode,
};
use topograph::image_io::{export_png_preview, export_tensor, load_image, load_tensor};
use topograph::topoimage::{build_multiview, normalize_patch, suggest_patch_size, PatchGrid};
use topograph::{FiltrationKind, ScalarGrid, Tensor};

use crate::config::PipelineConfig;

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// Diagram dump of the whole filtered image, or of one normalized patch.
pub fn diagram(
    image: &Path,
    kind: FiltrationKind,
    patch: Option<(usize, usize)>,
    patch_size: usize,
) -> Result<String> {
    let img = load_image(image)?;
    let g = kind.apply(&img);
    let target = match patch {
        None => g,
        Some((row, col)) => {
            let grid = PatchGrid::new(g.height(), g.width(), patch_size)?;
            if row >= grid.rows || col >= grid.cols {
                bail!(
                    "patch ({row}, {col}) out of range: the image has {} x {} patches (row < {}, col < {})",
                    grid.rows,
                    grid.cols,
                    grid.rows,
                    grid.cols
                );
            }
            let (y, x) = grid.origin(row, col);
            let p = grid.patch_size;
            ScalarGrid::new(p, p, normalize_patch(&g.window(y, x, p, p)))?
        }
    };
    Ok(compute_diagram(&target).dump())
}

/// Files given directly, plus the `.png` files of any directory, sorted.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.is_file()
                        && f.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn view_path(dir: &Path, image: &Path, kind: FiltrationKind) -> PathBuf {
    dir.join(format!("{}.{}.npy", stem(image), kind.name()))
}

pub fn fused_path(dir: &Path, image: &Path, mode: FusionMode) -> PathBuf {
    dir.join(format!("{}.fused.{}.npy", stem(image), mode.name()))
}

#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub written: Vec<PathBuf>,
    pub failures: Vec<(PathBuf, String)>,
}

fn topoimage_one(image: &Path, cfg: &PipelineConfig, preview: Option<usize>) -> Result<Vec<PathBuf>> {
    let img = load_image(image)?;
    let views = build_multiview(&img, &cfg.topo_config())?;
    let mut written = Vec::new();
    for (kind, view) in cfg.filtrations.iter().zip(&views) {
        let path = view_path(&cfg.out, image, *kind);
        export_tensor(view.tensor(), &path)?;
        let png = path.with_extension("png");
        written.push(path);
        if let Some(channel) = preview {
            export_png_preview(view.tensor(), channel, &png)?;
            written.push(png);
        }
    }
    Ok(written)
}

/// Builds every view of every input. Failures are collected per file.
pub fn topoimage_batch(inputs: &[PathBuf], cfg: &PipelineConfig, preview: Option<usize>) -> Result<BatchOutcome> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let results: Vec<Result<Vec<PathBuf>>> = inputs
        .par_iter()
        .map(|image| topoimage_one(image, cfg, preview))
        .collect();
    let mut outcome = BatchOutcome::default();
    for (image, result) in inputs.iter().zip(results) {
        match result {
            Ok(files) => outcome.written.extend(files),
            Err(e) => outcome.failures.push((image.clone(), format!("{e:#}"))),
        }
    }
    Ok(outcome)
}

/// Fuses `image` with its views from `views_dir`, one per configured
/// filtration, and writes the result into the output directory.
pub fn fuse(image: &Path, views_dir: &Path, cfg: &PipelineConfig) -> Result<PathBuf> {
    if cfg.fusion == FusionMode::None {
        bail!("no fusion requested");
    }
    let img = load_image(image)?.to_tensor();
    let views: Vec<Tensor> = cfg
        .filtrations
        .iter()
        .map(|&kind| {
            let path = view_path(views_dir, image, kind);
            load_tensor(&path).with_context(|| format!("loading view {}", path.display()))
        })
        .collect::<Result<_>>()?;
    let fused = match cfg.fusion {
        FusionMode::Concat => fuse_concat(&img, &views)?,
        FusionMode::Meanpool => fuse_meanpool(&img, &views)?,
        FusionMode::Cmvfm => {
            let weights = match (&cfg.weights, cfg.seed) {
                (Some(dir), _) => load_weights(dir)?,
                (None, Some(seed)) => init_weights(
                    seed,
                    &CmvfmDims {
                        view_channels: views.iter().map(Tensor::channels).collect(),
                        hidden: cfg.hidden_channels,
                        image_channels: img.channels(),
                    },
                ),
                (None, None) => return Err(anyhow!("cmvfm fusion needs --weights or --seed")),
            };
            cmvfm_fuse(&img, &views, &weights)?
        }
        FusionMode::None => unreachable!("rejected above"),
    };
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let path = fused_path(&cfg.out, image, cfg.fusion);
    export_tensor(&fused, &path)?;
    Ok(path)
}

pub fn suggest_patch(avg_object_pixels: u64, image_side: usize) -> Result<usize> {
    Ok(suggest_patch_size(avg_object_pixels, image_side)?)
}
