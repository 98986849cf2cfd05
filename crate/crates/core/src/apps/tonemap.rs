//! Multi-level base/detail tone mapping in the log-luminance domain.
//!
//! `level_0 = log10 L` and `level_i = smooth(level_{i-1})` with increasing
//! lambda, guided by `level_0`. The coarsest level is the base; the detail
//! layers are `level_{i-1} - level_i`, so `base + sum(details) = level_0`.
//!
//! The base is compressed linearly in the log domain: its source range is
//! scaled to `target_range` decades with the maximum mapped to `0` (white).
//! This is a plain linear stand-in for a nonlinear tone curve. With no
//! target the base is left untouched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{luminance, Image};
use crate::sgwls::{smooth, SmoothConfig};

/// Smoothing strengths of the three levels, finest to coarsest.
pub const TONEMAP_LAMBDAS: [f64; 3] = [5.0, 40.0, 320.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneMapParams {
    /// Output base range in decades; `None` keeps the source range and anchor.
    pub target_range: Option<f64>,
    pub detail_weights: [f64; 3],
    pub lambdas: [f64; 3],
}

impl Default for ToneMapParams {
    fn default() -> Self {
        ToneMapParams {
            target_range: Some(2.0),
            detail_weights: [1.0; 3],
            lambdas: TONEMAP_LAMBDAS,
        }
    }
}

/// Tone maps `hdr` (1 or 3 channels, positive luminance).
///
/// `cfg` supplies everything except lambda, which comes from `params.lambdas`.
/// Colour is carried over by scaling every channel with the luminance ratio.
pub fn tone_map(hdr: &Image, params: &ToneMapParams, cfg: &SmoothConfig) -> Result<Image> {
    if let Some(t) = params.target_range {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("target range must be > 0, got {t}")));
        }
    }
    let lum = luminance(hdr);
    if let Some(v) = lum.data().iter().find(|&&v| v <= 0.0) {
        return Err(Error::invalid(format!("luminance must be positive, found {v}")));
    }
    let log_lum = lum.map(f64::log10)?;

    let mut levels = vec![log_lum.clone()];
    for &lambda in &params.lambdas {
        let prev = levels.last().expect("non-empty");
        levels.push(smooth(prev, &log_lum, &cfg.with_lambda(lambda))?);
    }
    let base = &levels[3];

    let mut out_log = match params.target_range {
        None => base.clone(),
        Some(target) => {
            let (lo, hi) = base.range();
            let scale = if hi > lo { target / (hi - lo) } else { 1.0 };
            base.map(|b| (b - hi) * scale)?
        }
    };
    for (i, w) in params.detail_weights.iter().enumerate() {
        let detail = levels[i].zip_map(&levels[i + 1], |a, b| a - b)?;
        out_log = out_log.zip_map(&detail, |o, d| o + w * d)?;
    }

    let c = hdr.channels();
    let mut data = Vec::with_capacity(hdr.data().len());
    for (i, px) in hdr.data().chunks_exact(c).enumerate() {
        let ratio = 10f64.powf(out_log.data()[i]) / lum.data()[i];
        data.extend(px.iter().map(|v| v * ratio));
    }
    Image::new(hdr.width(), hdr.height(), c, data)
}
