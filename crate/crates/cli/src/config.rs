//! Pipeline configuration: JSON file, then command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use topograph::fusion::{FusionMode, DEFAULT_HIDDEN_CHANNELS};
use topograph::persistence_image::{PiConfig, PiMode};
use topograph::topoimage::TopoConfig;
use topograph::FiltrationKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub patch_size: usize,
    pub pi_resolution: (usize, usize),
    pub sigma: f64,
    pub pi_mode: PiMode,
    pub filtrations: Vec<FiltrationKind>,
    pub fusion: FusionMode,
    pub weights: Option<PathBuf>,
    pub seed: Option<u64>,
    pub hidden_channels: usize,
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let topo = TopoConfig::default();
        Self {
            patch_size: topo.patch_size,
            pi_resolution: topo.pi.resolution,
            sigma: topo.pi.sigma,
            pi_mode: topo.pi.mode,
            filtrations: topo.filtrations,
            fusion: FusionMode::None,
            weights: None,
            seed: None,
            hidden_channels: DEFAULT_HIDDEN_CHANNELS,
            out: PathBuf::from("."),
            jobs: 0,
        }
    }
}

/// Values given on the command line; each one replaces the configured value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub patch_size: Option<usize>,
    pub pi_resolution: Option<(usize, usize)>,
    pub sigma: Option<f64>,
    pub filtrations: Option<Vec<FiltrationKind>>,
    pub fusion: Option<FusionMode>,
    pub weights: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid configuration")?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Defaults, then the optional file, then the overrides; validated.
    pub fn resolve(file: Option<&Path>, overrides: Overrides) -> Result<Self> {
        let mut cfg = match file {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.patch_size {
            self.patch_size = v;
        }
        if let Some(v) = o.pi_resolution {
            self.pi_resolution = v;
        }
        if let Some(v) = o.sigma {
            self.sigma = v;
        }
        if let Some(v) = o.filtrations {
            self.filtrations = v;
        }
        if let Some(v) = o.fusion {
            self.fusion = v;
        }
        if o.weights.is_some() {
            self.weights = o.weights;
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if let Some(v) = o.out {
            self.out = v;
        }
        if let Some(v) = o.jobs {
            self.jobs = v;
        }
    }

    pub fn topo_config(&self) -> TopoConfig {
        TopoConfig {
            patch_size: self.patch_size,
            pi: PiConfig {
                resolution: self.pi_resolution,
                sigma: self.sigma,
                mode: self.pi_mode,
                ..PiConfig::default()
            },
            filtrations: self.filtrations.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_size == 0 {
            bail!("patch_size must be positive");
        }
        self.topo_config().pi.validate()?;
        if self.filtrations.is_empty() {
            bail!("at least one filtration is required");
        }
        if self.hidden_channels == 0 {
            bail!("hidden_channels must be positive");
        }
        if self.fusion == FusionMode::Cmvfm && self.weights.is_none() && self.seed.is_none() {
            bail!("cmvfm fusion needs --weights or --seed");
        }
        Ok(())
    }
}

/// `7`, `7x7` or `7,7`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).map(str::trim).collect();
    let num = |p: &str| p.parse::<usize>().map_err(|_| format!("invalid resolution '{s}'"));
    match parts.as_slice() {
        [n] => num(n).map(|n| (n, n)),
        [r, c] => Ok((num(r)?, num(c)?)),
        _ => Err(format!("invalid resolution '{s}' (expected ROWSxCOLS)")),
    }
}

/// Comma-separated filtration names.
pub fn parse_filtrations(s: &str) -> Result<Vec<FiltrationKind>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<FiltrationKind>().map_err(|e| e.to_string()))
        .collect()
}

/// `ROW,COL` patch coordinates.
pub fn parse_patch(s: &str) -> Result<(usize, usize), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [r, c] => match (r.parse(), c.parse()) {
            (Ok(r), Ok(c)) => Ok((r, c)),
            _ => Err(format!("invalid patch coordinates '{s}'")),
        },
        _ => Err(format!("invalid patch coordinates '{s}' (expected ROW,COL)")),
    }
}
