//! Fusion-module weights: deterministic initialization and an on-disk
//! format of one NPY file per array plus a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::npy;

pub const DEFAULT_HIDDEN_CHANNELS: usize = 16;
pub const DEFAULT_BN_EPS: f32 = 1e-5;
pub const MANIFEST_FILE: &str = "manifest.json";

/// One 3x3 convolution followed by inference-mode batch norm and ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvBlockWeights {
    pub out_ch: usize,
    pub in_ch: usize,
    /// `(out_ch, in_ch, 3, 3)` in C order.
    pub kernel: Vec<f32>,
    pub bias: Vec<f32>,
    pub bn_gamma: Vec<f32>,
    pub bn_beta: Vec<f32>,
    pub bn_mean: Vec<f32>,
    pub bn_var: Vec<f32>,
    pub bn_eps: f32,
}

impl ConvBlockWeights {
    /// Zero kernel and bias with identity batch norm.
    pub fn zeros(out_ch: usize, in_ch: usize) -> Self {
        Self {
            out_ch,
            in_ch,
            kernel: vec![0.0; out_ch * in_ch * 9],
            bias: vec![0.0; out_ch],
            bn_gamma: vec![1.0; out_ch],
            bn_beta: vec![0.0; out_ch],
            bn_mean: vec![0.0; out_ch],
            bn_var: vec![1.0; out_ch],
            bn_eps: DEFAULT_BN_EPS,
        }
    }

    pub fn kernel_at(&self, out: usize, inp: usize, ky: usize, kx: usize) -> f32 {
        self.kernel[((out * self.in_ch + inp) * 3 + ky) * 3 + kx]
    }

    pub fn validate(&self) -> Result<()> {
        let vectors = [
            ("bias", &self.bias),
            ("bn_gamma", &self.bn_gamma),
            ("bn_beta", &self.bn_beta),
            ("bn_mean", &self.bn_mean),
            ("bn_var", &self.bn_var),
        ];
        if self.kernel.len() != self.out_ch * self.in_ch * 9 {
            return Err(Error::Weights(format!(
                "kernel holds {} values, expected ({}, {}, 3, 3)",
                self.kernel.len(),
                self.out_ch,
                self.in_ch
            )));
        }
        for (name, v) in vectors {
            if v.len() != self.out_ch {
                return Err(Error::Weights(format!(
                    "{name} holds {} values, expected {}",
                    v.len(),
                    self.out_ch
                )));
            }
        }
        if self.bn_var.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::Weights("bn_var must be non-negative".into()));
        }
        if self.bn_eps.is_nan() || self.bn_eps <= 0.0 {
            return Err(Error::Weights("bn_eps must be positive".into()));
        }
        let finite = self
            .kernel
            .iter()
            .chain(vectors.iter().flat_map(|(_, v)| v.iter()))
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Weights("weights must be finite".into()));
        }
        Ok(())
    }
}

/// Compression path of one view: `C -> M -> C_img`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewWeights {
    pub block1: ConvBlockWeights,
    pub block2: ConvBlockWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmvfmWeights {
    pub views: Vec<ViewWeights>,
}

/// Channel layout the fusion weights are built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmvfmDims {
    pub view_channels: Vec<usize>,
    pub hidden: usize,
    pub image_channels: usize,
}

impl CmvfmWeights {
    pub fn zeros(dims: &CmvfmDims) -> Self {
        Self {
            views: dims
                .view_channels
                .iter()
                .map(|&c| ViewWeights {
                    block1: ConvBlockWeights::zeros(dims.hidden, c),
                    block2: ConvBlockWeights::zeros(dims.image_channels, dims.hidden),
                })
                .collect(),
        }
    }

    /// Checks internal consistency and, when given, agreement with the views
    /// and image the weights will be applied to.
    pub fn validate(&self, view_channels: Option<&[usize]>, image_channels: Option<usize>) -> Result<()> {
        if let Some(channels) = view_channels {
            if channels.len() != self.views.len() {
                return Err(Error::Weights(format!(
                    "weights cover {} views, got {}",
                    self.views.len(),
                    channels.len()
                )));
            }
        }
        for (i, v) in self.views.iter().enumerate() {
            v.block1.validate()?;
            v.block2.validate()?;
            if v.block1.out_ch != v.block2.in_ch {
                return Err(Error::Weights(format!(
                    "view {i}: block1 emits {} channels but block2 expects {}",
                    v.block1.out_ch, v.block2.in_ch
                )));
            }
            if let Some(&c) = view_channels.and_then(|vc| vc.get(i)) {
                if v.block1.in_ch != c {
                    return Err(Error::Weights(format!(
                        "view {i}: block1 expects {} channels, view has {c}",
                        v.block1.in_ch
                    )));
                }
            }
            if let Some(c) = image_channels {
                if v.block2.out_ch != c {
                    return Err(Error::Weights(format!(
                        "view {i}: block2 emits {} channels, image has {c}",
                        v.block2.out_ch
                    )));
                }
            }
        }
        Ok(())
    }
}

fn kaiming_block(rng: &mut ChaCha8Rng, out_ch: usize, in_ch: usize) -> ConvBlockWeights {
    let fan_in = (in_ch * 9) as f64;
    let normal = Normal::new(0.0, (2.0 / fan_in).sqrt()).expect("positive std");
    let mut block = ConvBlockWeights::zeros(out_ch, in_ch);
    for k in block.kernel.iter_mut() {
        *k = normal.sample(rng) as f32;
    }
    block
}

/// Seeded He-normal kernels, zero biases and identity batch norm. Arrays are
/// drawn in view order, block 1 before block 2.
pub fn init_weights(seed: u64, dims: &CmvfmDims) -> CmvfmWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CmvfmWeights {
        views: dims
            .view_channels
            .iter()
            .map(|&c| {
                let block1 = kaiming_block(&mut rng, dims.hidden, c);
                let block2 = kaiming_block(&mut rng, dims.image_channels, dims.hidden);
                ViewWeights { block1, block2 }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArrayRef {
    File(String),
    Described { file: String, shape: Vec<usize> },
}

impl ArrayRef {
    fn file(&self) -> &str {
        match self {
            ArrayRef::File(f) | ArrayRef::Described { file: f, .. } => f,
        }
    }

    fn declared_shape(&self) -> Option<&[usize]> {
        match self {
            ArrayRef::File(_) => None,
            ArrayRef::Described { shape, .. } => Some(shape),
        }
    }
}

fn default_eps() -> f32 {
    DEFAULT_BN_EPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub kernel: ArrayRef,
    pub bias: ArrayRef,
    pub bn_gamma: ArrayRef,
    pub bn_beta: ArrayRef,
    pub bn_mean: ArrayRef,
    pub bn_var: ArrayRef,
    #[serde(default = "default_eps")]
    pub bn_eps: f32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewEntry {
    pub block1: BlockEntry,
    pub block2: BlockEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub views: Vec<ViewEntry>,
}

fn read_array(dir: &Path, entry: &ArrayRef, expected: Option<&[usize]>) -> Result<npy::NpyArray> {
    let path: PathBuf = dir.join(entry.file());
    let arr = npy::load(&path)?;
    if let Some(declared) = entry.declared_shape() {
        if declared != arr.shape.as_slice() {
            return Err(Error::Weights(format!(
                "{} has shape {:?}, manifest declares {declared:?}",
                path.display(),
                arr.shape
            )));
        }
    }
    if let Some(expected) = expected {
        if expected != arr.shape.as_slice() {
            return Err(Error::Weights(format!(
                "{} has shape {:?}, expected {expected:?}",
                path.display(),
                arr.shape
            )));
        }
    }
    Ok(arr)
}

fn read_block(dir: &Path, entry: &BlockEntry) -> Result<ConvBlockWeights> {
    let kernel = read_array(dir, &entry.kernel, None)?;
    let (out_ch, in_ch) = match kernel.shape.as_slice() {
        &[o, i, 3, 3] => (o, i),
        other => {
            return Err(Error::Weights(format!(
                "kernel {} has shape {other:?}, expected (out, in, 3, 3)",
                entry.kernel.file()
            )))
        }
    };
    let vector = |r: &ArrayRef| read_array(dir, r, Some(&[out_ch])).map(|a| a.data);
    let block = ConvBlockWeights {
        out_ch,
        in_ch,
        kernel: kernel.data,
        bias: vector(&entry.bias)?,
        bn_gamma: vector(&entry.bn_gamma)?,
        bn_beta: vector(&entry.bn_beta)?,
        bn_mean: vector(&entry.bn_mean)?,
        bn_var: vector(&entry.bn_var)?,
        bn_eps: entry.bn_eps,
    };
    block.validate()?;
    Ok(block)
}

pub fn load_weights(dir: &Path) -> Result<CmvfmWeights> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Weights(format!("{}: {e}", manifest_path.display())))?;
    let views = manifest
        .views
        .iter()
        .map(|v| {
            Ok(ViewWeights {
                block1: read_block(dir, &v.block1)?,
                block2: read_block(dir, &v.block2)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = CmvfmWeights { views };
    weights.validate(None, None)?;
    Ok(weights)
}

fn write_block(dir: &Path, prefix: &str, b: &ConvBlockWeights) -> Result<BlockEntry> {
    let save = |suffix: &str, shape: Vec<usize>, data: &[f32]| -> Result<ArrayRef> {
        let file = format!("{prefix}_{suffix}.npy");
        npy::save(&dir.join(&file), &shape, data)?;
        Ok(ArrayRef::Described { file, shape })
    };
    Ok(BlockEntry {
        kernel: save("k", vec![b.out_ch, b.in_ch, 3, 3], &b.kernel)?,
        bias: save("bias", vec![b.out_ch], &b.bias)?,
        bn_gamma: save("gamma", vec![b.out_ch], &b.bn_gamma)?,
        bn_beta: save("beta", vec![b.out_ch], &b.bn_beta)?,
        bn_mean: save("mean", vec![b.out_ch], &b.bn_mean)?,
        bn_var: save("var", vec![b.out_ch], &b.bn_var)?,
        bn_eps: b.bn_eps,
    })
}

pub fn save_weights(weights: &CmvfmWeights, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let views = weights
        .views
        .iter()
        .enumerate()
        .map(|(i, v)| {
            Ok(ViewEntry {
                block1: write_block(dir, &format!("v{i}_b1"), &v.block1)?,
                block2: write_block(dir, &format!("v{i}_b2"), &v.block2)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = serde_json::to_string_pretty(&Manifest { views })
        .map_err(|e| Error::Weights(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
