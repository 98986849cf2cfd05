use crate::error::{Error, Result};
use crate::image::{rgb_to_yuv, yuv_to_rgb, Image};
use crate::sgwls::{interpolate_sparse, SmoothConfig, SparseField};

/// Propagates scribble chroma over a grey image.
///
/// `scribbles` is RGB and is read only where `mask` is one. The U and V
/// channels are interpolated under the guidance of `gray`, recombined with
/// `Y = gray` and converted back to RGB, clamped to `[0, 1]`. Pixels the
/// interpolation cannot reach keep zero chroma.
pub fn colorize(gray: &Image, scribbles: &Image, mask: &Image, cfg: &SmoothConfig) -> Result<Image> {
    if gray.channels() != 1 {
        return Err(Error::Channels {
            expected: 1,
            actual: gray.channels(),
        });
    }
    if !gray.same_size(scribbles) {
        return Err(Error::Dimensions("scribbles and grey image differ in size".into()));
    }
    let yuv = rgb_to_yuv(scribbles)?;
    // Y rides along so the field stays a regular 3-channel image; it is replaced below.
    let field = SparseField::new(yuv, mask.clone())?;
    let interp = interpolate_sparse(&field, gray, cfg)?.image;
    let out = Image::from_planes(&[gray.clone(), interp.plane(1), interp.plane(2)])?;
    Ok(yuv_to_rgb(&out)?.clamped())
}
