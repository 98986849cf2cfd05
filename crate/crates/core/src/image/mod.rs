//! Image container, color conversion and file codecs.
//!
//! Samples are stored as `f64` in row-major, channel-interleaved order. LDR
//! images use the nominal range `[0, 1]`; HDR images are unbounded positive.

mod codec;
mod color;

pub use codec::{decode, encode, read_image, write_image, Format};
pub use color::{luminance, rgb_to_yuv, yuv_to_rgb};

use crate::error::{Error, Result};

/// A 2D raster of real samples with 1 or 3 interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    /// Wraps `data` as an image, checking the length and that every sample is finite.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!(
                "images carry 1 or 3 channels, got {channels}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::Dimensions(format!(
                "empty image {width}x{height}"
            )));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::Length {
                expected,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {pos}")));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image where every sample of every channel equals `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds a single-channel image from a function of `(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, 1, data)
    }

    /// Interleaves single-channel planes into one image.
    pub fn from_planes(planes: &[Image]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::invalid("no planes to interleave"))?;
        for p in planes {
            if p.channels != 1 {
                return Err(Error::Channels {
                    expected: 1,
                    actual: p.channels,
                });
            }
            if !p.same_size(first) {
                return Err(Error::Dimensions("planes differ in size".into()));
            }
        }
        let n = first.pixel_count();
        let mut data = Vec::with_capacity(n * planes.len());
        for i in 0..n {
            for p in planes {
                data.push(p.data[i]);
            }
        }
        Self::new(first.width, first.height, planes.len(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn same_size(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, channel: usize, value: f64) {
        self.data[(row * self.width + col) * self.channels + channel] = value;
    }

    /// All channel samples of one pixel.
    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Extracts one channel as a single-channel image.
    pub fn plane(&self, channel: usize) -> Image {
        assert!(channel < self.channels, "channel {channel} out of range");
        let data = self
            .data
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect();
        Image {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// Splits the image into single-channel planes.
    pub fn planes(&self) -> Vec<Image> {
        (0..self.channels).map(|c| self.plane(c)).collect()
    }

    /// Applies `f` to every sample. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Image> {
        Image::new(
            self.width,
            self.height,
            self.channels,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Combines two same-shaped images sample by sample.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Image> {
        if !self.same_size(other) || self.channels != other.channels {
            return Err(Error::Dimensions(format!(
                "{}x{}x{} vs {}x{}x{}",
                self.width, self.height, self.channels, other.width, other.height, other.channels
            )));
        }
        Image::new(
            self.width,
            self.height,
            self.channels,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Swaps rows and columns.
    pub fn transpose(&self) -> Image {
        let mut data = vec![0.0; self.data.len()];
        let c = self.channels;
        for row in 0..self.height {
            for col in 0..self.width {
                let src = (row * self.width + col) * c;
                let dst = (col * self.height + row) * c;
                data[dst..dst + c].copy_from_slice(&self.data[src..src + c]);
            }
        }
        Image {
            width: self.height,
            height: self.width,
            channels: c,
            data,
        }
    }

    /// Clamps every sample into `[0, 1]`.
    pub fn clamped(&self) -> Image {
        Image {
            data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            ..self.clone()
        }
    }

    /// Smallest and largest sample over all channels.
    pub fn range(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Largest absolute sample difference to another image of the same shape.
    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Mean absolute sample difference to another image of the same shape.
    pub fn mean_abs_diff(&self, other: &Image) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum();
        sum / self.data.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_length_and_nan() {
        assert!(matches!(
            Image::new(2, 2, 1, vec![0.0; 3]),
            Err(Error::Length { expected: 4, actual: 3 })
        ));
        assert!(Image::new(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(Image::new(1, 1, 2, vec![0.0; 2]).is_err());
    }

    #[test]
    fn planes_round_trip() {
        let img = Image::new(2, 1, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let planes = img.planes();
        assert_eq!(planes[1].data(), &[0.2, 0.5]);
        assert_eq!(Image::from_planes(&planes).unwrap(), img);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let img = Image::from_fn(3, 2, |r, c| (r * 3 + c) as f64).unwrap();
        let t = img.transpose();
        assert_eq!((t.width(), t.height()), (2, 3));
        assert_eq!(t.get(2, 1, 0), img.get(1, 2, 0));
        assert_eq!(t.transpose(), img);
    }
}
