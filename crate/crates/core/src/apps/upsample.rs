use crate::error::{Error, Result};
use crate::image::Image;
use crate::sgwls::{interpolate_sparse, SmoothConfig, SparseField};

/// Places low-resolution sample `(i, j)` at `(i * factor, j * factor)` on a
/// `width x height` grid, returning the sparse field.
pub fn project_sparse(low: &Image, factor: usize, width: usize, height: usize) -> Result<SparseField> {
    if factor == 0 {
        return Err(Error::invalid("upsampling factor must be >= 1"));
    }
    if low.width() * factor != width || low.height() * factor != height {
        return Err(Error::Dimensions(format!(
            "{}x{} at factor {factor} does not give {width}x{height}",
            low.width(),
            low.height()
        )));
    }
    let c = low.channels();
    let mut values = vec![0.0; width * height * c];
    let mut mask = vec![0.0; width * height];
    for row in 0..low.height() {
        for col in 0..low.width() {
            let idx = row * factor * width + col * factor;
            mask[idx] = 1.0;
            values[idx * c..(idx + 1) * c].copy_from_slice(low.pixel(row, col));
        }
    }
    SparseField::new(Image::new(width, height, c, values)?, Image::new(width, height, 1, mask)?)
}

/// Guided upsampling of a low-resolution depth map by sparse interpolation.
///
/// Pixels the interpolation cannot reach come out as zero.
pub fn depth_upsample(low: &Image, guidance: &Image, factor: usize, cfg: &SmoothConfig) -> Result<Image> {
    let field = project_sparse(low, factor, guidance.width(), guidance.height())?;
    Ok(interpolate_sparse(&field, guidance, cfg)?.image)
}
