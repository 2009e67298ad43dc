//! Scalar filtration fields derived from images.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image_io::RasterImage;

/// Largest `|L|` the gradient view is scaled by.
pub const GRADIENT_SCALE: f64 = 8.0;

/// A finite `height x width` field of reals in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Shape(format!("empty grid {height}x{width}")));
        }
        if values.len() != height * width {
            return Err(Error::Shape(format!(
                "{height}x{width} grid needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                values.push(f(y, x));
            }
        }
        Self::new(height, width, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Copy of the `height x width` block whose top-left corner is `(top, left)`.
    pub fn window(&self, top: usize, left: usize, height: usize, width: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(height * width);
        for y in top..top + height {
            let row = y * self.width;
            out.extend_from_slice(&self.values[row + left..row + left + width]);
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.values.chunks_exact(self.width) {
            values.extend(row.iter().rev());
        }
        Self { values, ..*self }
    }

    pub fn flip_vertical(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.values.chunks_exact(self.width).rev() {
            values.extend_from_slice(row);
        }
        Self { values, ..*self }
    }

    fn plane(height: usize, width: usize, values: Vec<f64>) -> Self {
        Self {
            height,
            width,
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationKind {
    Intensity,
    Gradient,
}

impl FiltrationKind {
    pub fn name(self) -> &'static str {
        match self {
            FiltrationKind::Intensity => "intensity",
            FiltrationKind::Gradient => "gradient",
        }
    }

    pub fn apply(self, img: &RasterImage) -> ScalarGrid {
        match self {
            FiltrationKind::Intensity => intensity_filtration(img),
            FiltrationKind::Gradient => gradient_filtration(img),
        }
    }
}

impl fmt::Display for FiltrationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FiltrationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intensity" => Ok(FiltrationKind::Intensity),
            "gradient" => Ok(FiltrationKind::Gradient),
            other => Err(Error::Config(format!(
                "unknown filtration '{other}' (expected intensity or gradient)"
            ))),
        }
    }
}

fn channel_grid(img: &RasterImage, c: usize) -> ScalarGrid {
    ScalarGrid::plane(
        img.height(),
        img.width(),
        img.channel(c).iter().map(|&v| v as f64).collect(),
    )
}

/// Grayscale values unchanged; RGB as `sqrt(r^2 + g^2 + b^2) / sqrt(3)`.
pub fn intensity_filtration(img: &RasterImage) -> ScalarGrid {
    if img.channels() == 1 {
        return channel_grid(img, 0);
    }
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    let values = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| {
            let (r, g, b) = (r as f64, g as f64, b as f64);
            ((r * r + g * g + b * b) / 3.0).sqrt()
        })
        .collect();
    ScalarGrid::plane(img.height(), img.width(), values)
}

/// 5-point Laplacian with clamp-to-edge padding.
pub fn laplacian(g: &ScalarGrid) -> ScalarGrid {
    let (h, w) = (g.height, g.width);
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let center = g.get(y, x);
            // grouped so that flips and constants are handled exactly
            let vertical = (g.get(up, x) - center) + (g.get(down, x) - center);
            let horizontal = (g.get(y, left) - center) + (g.get(y, right) - center);
            out.push(vertical + horizontal);
        }
    }
    ScalarGrid::plane(h, w, out)
}

/// Mean absolute Laplacian over channels, divided by [`GRADIENT_SCALE`].
pub fn gradient_filtration(img: &RasterImage) -> ScalarGrid {
    let n = img.channels();
    let mut acc = vec![0.0f64; img.width() * img.height()];
    for c in 0..n {
        let lap = laplacian(&channel_grid(img, c));
        for (a, v) in acc.iter_mut().zip(lap.values()) {
            *a += v.abs();
        }
    }
    let values = acc
        .into_iter()
        .map(|s| s / n as f64 / GRADIENT_SCALE)
        .collect();
    ScalarGrid::plane(img.height(), img.width(), values)
}
