//! Combining multi-view TopoImages with the source image.
//!
//! [`cmvfm_fuse`] is the forward pass of the cross-modality-view fusion
//! module: each view is compressed to the image's channel count by two
//! conv/BN/ReLU blocks, added to the image and min-max normalized; several
//! views are then summed and normalized once more. [`fuse_concat`] and
//! [`fuse_meanpool`] are the two simple baselines.
//!
//! Sums and normalizations run in `f64`; results are rounded to `f32` once
//! per stage, in view order, so the output is independent of scheduling.

mod weights;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use weights::{
    init_weights, load_weights, save_weights, ArrayRef, BlockEntry, CmvfmDims, CmvfmWeights,
    ConvBlockWeights, Manifest, ViewEntry, ViewWeights, DEFAULT_BN_EPS, DEFAULT_HIDDEN_CHANNELS,
    MANIFEST_FILE,
};

use crate::error::{Error, Result};
use crate::image_io::Tensor;
use crate::topoimage::TopoImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    None,
    Cmvfm,
    Concat,
    Meanpool,
}

impl FusionMode {
    pub fn name(self) -> &'static str {
        match self {
            FusionMode::None => "none",
            FusionMode::Cmvfm => "cmvfm",
            FusionMode::Concat => "concat",
            FusionMode::Meanpool => "meanpool",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(FusionMode::None),
            "cmvfm" => Ok(FusionMode::Cmvfm),
            "concat" => Ok(FusionMode::Concat),
            "meanpool" => Ok(FusionMode::Meanpool),
            other => Err(Error::Config(format!(
                "unknown fusion mode '{other}' (expected none, cmvfm, concat or meanpool)"
            ))),
        }
    }
}

impl AsRef<Tensor> for TopoImage {
    fn as_ref(&self) -> &Tensor {
        self.tensor()
    }
}

impl AsRef<Tensor> for Tensor {
    fn as_ref(&self) -> &Tensor {
        self
    }
}

/// 3x3 convolution (stride 1, zero padding 1) plus bias, inference-mode
/// batch norm, then ReLU.
pub fn conv_block_forward(x: &Tensor, w: &ConvBlockWeights) -> Result<Tensor> {
    if x.channels() != w.in_ch {
        return Err(Error::ChannelMismatch {
            expected: w.in_ch,
            actual: x.channels(),
        });
    }
    w.validate()?;
    let (h, wd) = (x.height(), x.width());
    let plane = h * wd;
    let outputs: Vec<Vec<f32>> = (0..w.out_ch)
        .into_par_iter()
        .map(|oc| {
            let mut acc = vec![w.bias[oc] as f64; plane];
            for ic in 0..w.in_ch {
                let src = x.channel(ic);
                for ky in 0..3 {
                    for kx in 0..3 {
                        let k = w.kernel_at(oc, ic, ky, kx) as f64;
                        if k == 0.0 {
                            continue;
                        }
                        let (ys, ye) = (usize::from(ky == 0), h - usize::from(ky == 2).min(h));
                        let (xs, xe) = (usize::from(kx == 0), wd - usize::from(kx == 2).min(wd));
                        for y in ys..ye {
                            let sy = y + ky - 1;
                            let dst = &mut acc[y * wd..(y + 1) * wd];
                            let row = &src[sy * wd..(sy + 1) * wd];
                            for xx in xs..xe {
                                dst[xx] += k * row[xx + kx - 1] as f64;
                            }
                        }
                    }
                }
            }
            let denom = (w.bn_var[oc] as f64 + w.bn_eps as f64).sqrt();
            let (gamma, beta, mean) = (w.bn_gamma[oc] as f64, w.bn_beta[oc] as f64, w.bn_mean[oc] as f64);
            acc.into_iter()
                .map(|v| ((v - mean) / denom * gamma + beta).max(0.0) as f32)
                .collect()
        })
        .collect();
    Tensor::new([w.out_ch, h, wd], outputs.concat())
}

/// Min-max rescale into `[0, 1]`; a constant input maps to zeros.
fn normalize(values: &[f64]) -> Vec<f64> {
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

fn to_f32(values: Vec<f64>) -> Vec<f32> {
    values.into_iter().map(|v| v as f32).collect()
}

/// Whole-tensor min-max normalization.
pub fn min_max_normalize(t: &Tensor) -> Tensor {
    let values: Vec<f64> = t.data().iter().map(|&v| v as f64).collect();
    Tensor::from_parts_unchecked(t.shape(), to_f32(normalize(&values)))
}

fn check_spatial<T: AsRef<Tensor>>(img: &Tensor, views: &[T]) -> Result<()> {
    for (i, v) in views.iter().enumerate() {
        let v = v.as_ref();
        if (v.height(), v.width()) != (img.height(), img.width()) {
            return Err(Error::Shape(format!(
                "view {i} is {}x{}, image is {}x{}",
                v.height(),
                v.width(),
                img.height(),
                img.width()
            )));
        }
    }
    Ok(())
}

/// Compressed view added to the image, normalized to `[0, 1]`.
fn fuse_view(img: &Tensor, view: &Tensor, w: &ViewWeights) -> Result<Vec<f32>> {
    let hidden = conv_block_forward(view, &w.block1)?;
    let compressed = conv_block_forward(&hidden, &w.block2)?;
    let sum: Vec<f64> = img
        .data()
        .iter()
        .zip(compressed.data())
        .map(|(&a, &b)| a as f64 + b as f64)
        .collect();
    Ok(to_f32(normalize(&sum)))
}

pub fn cmvfm_fuse<T: AsRef<Tensor> + Sync>(img: &Tensor, views: &[T], w: &CmvfmWeights) -> Result<Tensor> {
    if views.is_empty() {
        return Err(Error::Config("fusion needs at least one view".into()));
    }
    check_spatial(img, views)?;
    let channels: Vec<usize> = views.iter().map(|v| v.as_ref().channels()).collect();
    w.validate(Some(&channels), Some(img.channels()))?;

    let fused: Vec<Vec<f32>> = views
        .par_iter()
        .zip(&w.views)
        .map(|(v, vw)| fuse_view(img, v.as_ref(), vw))
        .collect::<Result<_>>()?;
    if fused.len() == 1 {
        let single = fused.into_iter().next().expect("one view");
        return Ok(Tensor::from_parts_unchecked(img.shape(), single));
    }
    let mut total = vec![0.0f64; img.data().len()];
    for f in &fused {
        for (t, &v) in total.iter_mut().zip(f) {
            *t += v as f64;
        }
    }
    Ok(Tensor::from_parts_unchecked(img.shape(), to_f32(normalize(&total))))
}

/// Image channels followed by every view's channels, in list order.
pub fn fuse_concat<T: AsRef<Tensor>>(img: &Tensor, views: &[T]) -> Result<Tensor> {
    check_spatial(img, views)?;
    let channels = img.channels() + views.iter().map(|v| v.as_ref().channels()).sum::<usize>();
    let mut data = Vec::with_capacity(channels * img.height() * img.width());
    data.extend_from_slice(img.data());
    for v in views {
        data.extend_from_slice(v.as_ref().data());
    }
    Tensor::new([channels, img.height(), img.width()], data)
}

/// Reduce `view` to `target` channels by averaging consecutive groups of
/// `ceil(C / target)` channels. Channels past the last group are zero.
pub fn pool_channels(view: &Tensor, target: usize) -> Vec<f64> {
    let c = view.channels();
    let plane = view.height() * view.width();
    let group = c.div_ceil(target.max(1)).max(1);
    let mut out = vec![0.0f64; target * plane];
    for j in 0..target {
        let (start, end) = ((j * group).min(c), ((j + 1) * group).min(c));
        if start == end {
            continue;
        }
        let dst = &mut out[j * plane..(j + 1) * plane];
        for k in start..end {
            for (d, &v) in dst.iter_mut().zip(view.channel(k)) {
                *d += v as f64;
            }
        }
        let n = (end - start) as f64;
        dst.iter_mut().for_each(|d| *d /= n);
    }
    out
}

/// Elementwise mean of the image and every channel-pooled view.
pub fn fuse_meanpool<T: AsRef<Tensor>>(img: &Tensor, views: &[T]) -> Result<Tensor> {
    check_spatial(img, views)?;
    if views.is_empty() {
        return Ok(img.clone());
    }
    let mut total: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();
    for v in views {
        for (t, p) in total.iter_mut().zip(pool_channels(v.as_ref(), img.channels())) {
            *t += p;
        }
    }
    let n = (views.len() + 1) as f64;
    Tensor::new(img.shape(), total.into_iter().map(|t| (t / n) as f32).collect())
}
