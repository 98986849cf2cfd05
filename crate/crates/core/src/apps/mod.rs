//! Application pipelines built on [`crate::sgwls`].

mod colorize;
mod enhance;
mod tonemap;
mod upsample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sgwls::SmoothConfig;
use crate::snake::Axis;
use crate::weights::WeightParams;

pub use colorize::colorize;
pub use enhance::detail_enhance;
pub use tonemap::{tone_map, ToneMapParams, TONEMAP_LAMBDAS};
pub use upsample::{depth_upsample, project_sparse};

/// Passes used by every preset.
pub const PRESET_ITERATIONS: usize = 4;

/// Detail boost used by the enhancement preset.
pub const ENHANCE_BOOST: f64 = 3.0;

/// Named parameter sets for the pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Enhance,
    /// First (finest) tone-mapping level; the other levels only change lambda.
    Tonemap,
    Upsample2x,
    Upsample4x,
    Upsample8x,
    Colorize,
    /// Small-radius 4x upsampling baseline to compare against [`Preset::Upsample4x`].
    Upsample4xSmallRadius,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Enhance,
        Preset::Tonemap,
        Preset::Upsample2x,
        Preset::Upsample4x,
        Preset::Upsample8x,
        Preset::Colorize,
        Preset::Upsample4xSmallRadius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Enhance => "enhance",
            Preset::Tonemap => "tonemap",
            Preset::Upsample2x => "upsample2x",
            Preset::Upsample4x => "upsample4x",
            Preset::Upsample8x => "upsample8x",
            Preset::Colorize => "colorize",
            Preset::Upsample4xSmallRadius => "upsample4x-r1",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown preset {name:?}")))
    }

    pub fn config(self) -> SmoothConfig {
        let (lambda, r, tau, weight) = match self {
            Preset::Enhance => (900.0, 1, 1, WeightParams::frac(1.2, 1.2)),
            Preset::Tonemap => (TONEMAP_LAMBDAS[0], 1, 1, WeightParams::frac(1.2, 1.2)),
            Preset::Upsample2x => (100.0, 4, 4, WeightParams::exp(4.0, 3.0)),
            Preset::Upsample4x => (200.0, 4, 4, WeightParams::exp(4.0, 3.0)),
            Preset::Upsample8x => (400.0, 4, 4, WeightParams::exp(4.0, 3.0)),
            Preset::Colorize => (900.0, 4, 2, WeightParams::exp(4.0, 2.0)),
            Preset::Upsample4xSmallRadius => (900.0, 1, 1, WeightParams::exp(1.0, 3.0)),
        };
        SmoothConfig {
            lambda,
            r,
            tau,
            iterations: PRESET_ITERATIONS,
            weight,
            first_axis: Axis::Column,
            threads: 1,
        }
    }

    /// Upsampling factor for the depth presets.
    pub fn upsample_factor(self) -> Option<usize> {
        match self {
            Preset::Upsample2x => Some(2),
            Preset::Upsample4x | Preset::Upsample4xSmallRadius => Some(4),
            Preset::Upsample8x => Some(8),
            _ => None,
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        Preset::from_name(s)
    }
}
