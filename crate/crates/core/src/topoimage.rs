//! TopoImage construction: per-patch persistence images tiled back over the
//! patch footprints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubical::compute_diagram;
use crate::error::{Error, Result};
use crate::filtration::{FiltrationKind, ScalarGrid};
use crate::image_io::{RasterImage, Tensor};
use crate::persistence_image::{feature_vector, PiConfig};

/// Candidate patch sides for [`suggest_patch_size`].
pub const PATCH_CANDIDATES: [usize; 5] = [7, 14, 28, 56, 112];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopoConfig {
    pub patch_size: usize,
    pub pi: PiConfig,
    pub filtrations: Vec<FiltrationKind>,
}

impl Default for TopoConfig {
    fn default() -> Self {
        Self {
            patch_size: 28,
            pi: PiConfig::default(),
            filtrations: vec![FiltrationKind::Intensity, FiltrationKind::Gradient],
        }
    }
}

impl TopoConfig {
    pub fn channels(&self) -> usize {
        self.pi.channels()
    }
}

/// Square, non-overlapping tiling of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub rows: usize,
    pub cols: usize,
}

impl PatchGrid {
    pub fn new(height: usize, width: usize, patch_size: usize) -> Result<Self> {
        if patch_size == 0 || !height.is_multiple_of(patch_size) || !width.is_multiple_of(patch_size) {
            return Err(Error::PatchSize {
                height,
                width,
                patch_size,
            });
        }
        Ok(Self {
            patch_size,
            rows: height / patch_size,
            cols: width / patch_size,
        })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left pixel of patch `(row, col)`.
    pub fn origin(&self, row: usize, col: usize) -> (usize, usize) {
        (row * self.patch_size, col * self.patch_size)
    }

    /// Patch `(row, col)` pairs in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> {
        let (rows, cols) = (self.rows, self.cols);
        (0..rows).flat_map(move |r| (0..cols).map(move |c| (r, c)))
    }
}

/// Multi-channel image whose channel vector is constant on each patch.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoImage {
    tensor: Tensor,
    grid: PatchGrid,
}

impl TopoImage {
    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn into_tensor(self) -> Tensor {
        self.tensor
    }

    pub fn patch_grid(&self) -> PatchGrid {
        self.grid
    }

    pub fn shape(&self) -> [usize; 3] {
        self.tensor.shape()
    }

    /// Channel vector of patch `(row, col)`, read at its top-left pixel.
    pub fn patch_vector(&self, row: usize, col: usize) -> Vec<f32> {
        let (y, x) = self.grid.origin(row, col);
        let [c, h, w] = self.tensor.shape();
        (0..c).map(|k| self.tensor.data()[(k * h + y) * w + x]).collect()
    }
}

/// Min-max rescale into `[0, 1]`; a constant patch maps to zeros.
pub fn normalize_patch(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if range > 0.0 {
        values.iter().map(|&v| (v - lo) / range).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Feature vector of one patch: normalize, compute its diagram, vectorize.
pub fn patch_feature(g: &ScalarGrid, grid: &PatchGrid, row: usize, col: usize, pi: &PiConfig) -> Vec<f64> {
    let (y, x) = grid.origin(row, col);
    let p = grid.patch_size;
    let patch = ScalarGrid::new(p, p, normalize_patch(&g.window(y, x, p, p)))
        .expect("patch window matches its declared size");
    feature_vector(&compute_diagram(&patch), pi)
}

/// Feature vectors of every patch in row-major patch order. Patches are
/// processed on the current rayon pool; the result does not depend on it.
pub fn patch_features(g: &ScalarGrid, cfg: &TopoConfig) -> Result<(PatchGrid, Vec<Vec<f64>>)> {
    cfg.pi.validate()?;
    let grid = PatchGrid::new(g.height(), g.width(), cfg.patch_size)?;
    let coords: Vec<(usize, usize)> = grid.iter().collect();
    let features = coords
        .par_iter()
        .map(|&(r, c)| patch_feature(g, &grid, r, c, &cfg.pi))
        .collect();
    Ok((grid, features))
}

pub fn build_topoimage(g: &ScalarGrid, cfg: &TopoConfig) -> Result<TopoImage> {
    let (grid, features) = patch_features(g, cfg)?;
    let (h, w) = (g.height(), g.width());
    let channels = cfg.channels();
    let p = grid.patch_size;
    let mut data = vec![0.0f32; channels * h * w];
    for ((r, c), feature) in grid.iter().zip(&features) {
        let (y0, x0) = grid.origin(r, c);
        for (k, &v) in feature.iter().enumerate() {
            let v = v as f32;
            for y in y0..y0 + p {
                let start = (k * h + y) * w + x0;
                data[start..start + p].fill(v);
            }
        }
    }
    Ok(TopoImage {
        tensor: Tensor::new([channels, h, w], data)?,
        grid,
    })
}

/// One TopoImage per configured filtration, in configuration order.
pub fn build_multiview(img: &RasterImage, cfg: &TopoConfig) -> Result<Vec<TopoImage>> {
    if cfg.filtrations.is_empty() {
        return Err(Error::Config("at least one filtration is required".into()));
    }
    cfg.filtrations
        .iter()
        .map(|kind| build_topoimage(&kind.apply(img), cfg))
        .collect()
}

/// Candidate patch side whose area is closest to the average object area.
/// Ties go to the smaller side.
pub fn suggest_patch_size(avg_object_pixels: u64, image_side: usize) -> Result<usize> {
    if avg_object_pixels == 0 {
        return Err(Error::Config("average object size must be at least one pixel".into()));
    }
    PATCH_CANDIDATES
        .iter()
        .copied()
        .filter(|&s| image_side.is_multiple_of(s))
        .min_by_key(|&s| ((s * s) as u64).abs_diff(avg_object_pixels))
        .ok_or(Error::NoAdmissiblePatch { image_side })
}
