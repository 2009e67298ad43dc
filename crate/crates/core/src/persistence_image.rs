//! Persistence images: diagrams rasterized on a fixed birth x persistence
//! grid.
//!
//! Every diagram point `(b, d)` is moved to `(b, b - d)`, weighted linearly
//! by its persistence and spread by an isotropic Gaussian. A cell's value is
//! the exact Gaussian mass inside the cell, computed as a product of 1-D CDF
//! differences, so the image is additive over points.
//!
//! Rows index the persistence axis (row 0 holds the lowest persistence) and
//! columns index the birth axis.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::cubical::PersistenceDiagram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    /// Dimensions 0 and 1 share one image.
    Combined,
    /// One image per dimension, dimension 0 first.
    PerDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiConfig {
    /// `(rows, cols)`: persistence cells x birth cells.
    pub resolution: (usize, usize),
    pub sigma: f64,
    pub birth_range: (f64, f64),
    pub persistence_range: (f64, f64),
    pub mode: PiMode,
}

impl Default for PiConfig {
    fn default() -> Self {
        Self {
            resolution: (7, 7),
            sigma: 0.05,
            birth_range: (0.0, 1.0),
            persistence_range: (0.0, 1.0),
            mode: PiMode::Combined,
        }
    }
}

impl PiConfig {
    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.resolution;
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!(
                "persistence image resolution must be positive, got {rows}x{cols}"
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        for (name, (lo, hi)) in [
            ("birth", self.birth_range),
            ("persistence", self.persistence_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("{name} range [{lo}, {hi}] is degenerate")));
            }
        }
        if self.persistence_range.1 <= 0.0 {
            return Err(Error::Config("persistence range must reach above zero".into()));
        }
        Ok(())
    }

    pub fn dimensions(&self) -> usize {
        match self.mode {
            PiMode::Combined => 1,
            PiMode::PerDimension => 2,
        }
    }

    /// Length of the feature vector produced by [`feature_vector`].
    pub fn channels(&self) -> usize {
        self.dimensions() * self.resolution.0 * self.resolution.1
    }

    /// Weight of a point with the given persistence.
    pub fn weight(&self, persistence: f64) -> f64 {
        persistence / self.persistence_range.1
    }

    /// Lipschitz constant of a single cell of the image with respect to the
    /// 1-Wasserstein distance (L-infinity ground metric on birth/death
    /// coordinates), given the largest point weight in either diagram.
    ///
    /// A shift of `delta` in birth/death moves a point by at most `delta`
    /// along the birth axis and `2 delta` along the persistence axis. Each
    /// 1-D cell mass changes at most `1 / (sigma sqrt(2 pi))` per unit shift
    /// and the weight at most `1 / p_max` per unit of persistence, giving
    /// `2 / p_max + 3 w_max / (sigma sqrt(2 pi))`. Matching a point to the
    /// diagonal costs `pers / 2` and removes at most `pers / p_max`, which the
    /// same constant covers.
    pub fn stability_constant(&self, max_weight: f64) -> f64 {
        2.0 / self.persistence_range.1 + 3.0 * max_weight / (self.sigma * (2.0 * PI).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceImage {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl PersistenceImage {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} image needs {} weights, got {}",
                rows * cols,
                weights.len()
            )));
        }
        Ok(Self { rows, cols, weights })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `(birth, persistence)` coordinates of every pair, all dimensions pooled.
pub fn birth_persistence_points(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.pairs()
        .iter()
        .map(|p| (p.birth, p.birth - p.death))
        .collect()
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gaussian mass of each of `cells` equal bins over `[lo, hi]` for a
/// normal centred at `mean`.
fn bin_masses(mean: f64, sigma: f64, (lo, hi): (f64, f64), cells: usize) -> Vec<f64> {
    let step = (hi - lo) / cells as f64;
    let cdf: Vec<f64> = (0..=cells)
        .map(|k| normal_cdf((lo + step * k as f64 - mean) / sigma))
        .collect();
    cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect()
}

fn rasterize(points: &[(f64, f64)], cfg: &PiConfig) -> PersistenceImage {
    let (rows, cols) = cfg.resolution;
    let mut image = PersistenceImage::zeros(rows, cols);
    for &(birth, persistence) in points {
        let weight = cfg.weight(persistence);
        if weight == 0.0 {
            continue;
        }
        let along_birth = bin_masses(birth, cfg.sigma, cfg.birth_range, cols);
        let along_pers = bin_masses(persistence, cfg.sigma, cfg.persistence_range, rows);
        for (r, &py) in along_pers.iter().enumerate() {
            let row = &mut image.weights[r * cols..(r + 1) * cols];
            for (cell, &px) in row.iter_mut().zip(&along_birth) {
                *cell += weight * py * px;
            }
        }
    }
    image
}

/// One image in `Combined` mode, one per dimension (0 then 1) in
/// `PerDimension` mode.
pub fn vectorize(d: &PersistenceDiagram, cfg: &PiConfig) -> Vec<PersistenceImage> {
    match cfg.mode {
        PiMode::Combined => vec![rasterize(&birth_persistence_points(d), cfg)],
        PiMode::PerDimension => (0..2u8)
            .map(|dim| {
                let points: Vec<(f64, f64)> = d
                    .dimension(dim)
                    .map(|p| (p.birth, p.birth - p.death))
                    .collect();
                rasterize(&points, cfg)
            })
            .collect(),
    }
}

/// Row-major flattening.
pub fn flatten(pi: &PersistenceImage) -> Vec<f64> {
    pi.weights.clone()
}

/// All images of [`vectorize`] flattened and concatenated; length
/// [`PiConfig::channels`].
pub fn feature_vector(d: &PersistenceDiagram, cfg: &PiConfig) -> Vec<f64> {
    vectorize(d, cfg).iter().flat_map(flatten).collect()
}
