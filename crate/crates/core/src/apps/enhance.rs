use crate::error::Result;
use crate::image::Image;
use crate::sgwls::{smooth, SmoothConfig};

/// Amplifies the detail layer `img - smooth(img)` by `boost` and clamps to `[0, 1]`.
///
/// The input is its own guidance; colour images are smoothed per channel
/// with weights from the full RGB difference.
pub fn detail_enhance(img: &Image, boost: f64, cfg: &SmoothConfig) -> Result<Image> {
    let base = smooth(img, img, cfg)?;
    Ok(base.zip_map(img, |b, v| (b + boost * (v - b)).clamp(0.0, 1.0))?)
}
