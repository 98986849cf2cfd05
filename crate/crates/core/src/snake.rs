//! Serpentine flattening of `2r + 1` adjacent columns (or rows) into a band.
//!
//! In column mode the window `[k - r, k + r]` of columns is read row by row;
//! every second row (the 2nd, 4th, ... counting from one) is read right to
//! left, and the rows are concatenated. Consecutive band entries therefore stay
//! 2D neighbours across row turns, and any `r + 1` consecutive entries lie
//! within `r` rows and `r` columns of each other. Row mode is the transpose.
//!
//! When the image is narrower than `2r + 1` across the window direction the
//! window covers the whole extent instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Windows of adjacent columns, one band per center column.
    Column,
    /// Windows of adjacent rows, one band per center row.
    Row,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Column => Axis::Row,
            Axis::Row => Axis::Column,
        }
    }

    /// Number of centers available for this axis: image width for columns.
    pub fn cross_extent(self, width: usize, height: usize) -> usize {
        match self {
            Axis::Column => width,
            Axis::Row => height,
        }
    }
}

/// Pixel coordinates `(row, col)` of each band position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandLayout {
    axis: Axis,
    center: usize,
    window: (usize, usize),
    coords: Vec<(usize, usize)>,
}

impl BandLayout {
    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Half-open range of columns (or rows) covered by the band.
    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    pub fn coords(&self) -> &[(usize, usize)] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Gathers one channel of `img` in band order into `out`.
    pub fn gather_into(&self, img: &Image, channel: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.coords.iter().map(|&(r, c)| img.get(r, c, channel)));
    }

    /// Gathers a row-major plane of the given width in band order into `out`.
    pub fn gather_plane(&self, plane: &[f64], width: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.coords.iter().map(|&(r, c)| plane[r * width + c]));
    }
}

/// A band of values together with its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub layout: BandLayout,
    pub values: Vec<f64>,
}

fn window_bounds(center: usize, r: usize, extent: usize) -> Result<(usize, usize)> {
    if center >= extent {
        return Err(Error::invalid(format!(
            "band center {center} outside extent {extent}"
        )));
    }
    if extent < 2 * r + 1 {
        return Ok((0, extent));
    }
    let c = center.clamp(r, extent - r - 1);
    Ok((c - r, c + r + 1))
}

/// Serpentine layout of the band centered at `center` (0-based).
pub fn extract_layout(
    width: usize,
    height: usize,
    center: usize,
    r: usize,
    axis: Axis,
) -> Result<BandLayout> {
    let (lo, hi) = window_bounds(center, r, axis.cross_extent(width, height))?;
    let lines = match axis {
        Axis::Column => height,
        Axis::Row => width,
    };
    let mut coords = Vec::with_capacity(lines * (hi - lo));
    for line in 0..lines {
        // Rows are counted from one, so the odd 0-based lines are reversed.
        let reversed = line % 2 == 1;
        let mut push = |p: usize| match axis {
            Axis::Column => coords.push((line, p)),
            Axis::Row => coords.push((p, line)),
        };
        if reversed {
            (lo..hi).rev().for_each(&mut push);
        } else {
            (lo..hi).for_each(&mut push);
        }
    }
    Ok(BandLayout {
        axis,
        center,
        window: (lo, hi),
        coords,
    })
}

/// Flattens the window around `center` of a single-channel image.
pub fn extract_band(img: &Image, center: usize, r: usize, axis: Axis) -> Result<Band> {
    if img.channels() != 1 {
        return Err(Error::Channels {
            expected: 1,
            actual: img.channels(),
        });
    }
    let layout = extract_layout(img.width(), img.height(), center, r, axis)?;
    let mut values = Vec::new();
    layout.gather_into(img, 0, &mut values);
    Ok(Band { layout, values })
}

/// Band centers `r, r + tau, r + 2 tau, ...` with `extent - r - 1` always included.
///
/// Centers are 0-based. `tau` must lie in `1..=2r+1` so consecutive windows
/// leave no gap. An extent narrower than `2r + 1` yields a single center.
pub fn band_centers(extent: usize, r: usize, tau: usize) -> Result<Vec<usize>> {
    if tau == 0 || tau > 2 * r + 1 {
        return Err(Error::invalid(format!(
            "stride {tau} outside 1..={}",
            2 * r + 1
        )));
    }
    if extent == 0 {
        return Err(Error::invalid("empty extent"));
    }
    if extent < 2 * r + 1 {
        return Ok(vec![extent / 2]);
    }
    let last = extent - r - 1;
    let mut centers: Vec<usize> = (r..=last).step_by(tau).collect();
    if centers.last() != Some(&last) {
        centers.push(last);
    }
    Ok(centers)
}

/// Running per-pixel sums and contribution counts for overlap averaging.
///
/// Sums are kept per plane (channel) in row-major order.
#[derive(Debug, Clone)]
pub struct Accumulator {
    width: usize,
    height: usize,
    sums: Vec<Vec<f64>>,
    counts: Vec<u32>,
}

impl Accumulator {
    pub fn new(width: usize, height: usize, planes: usize) -> Self {
        Accumulator {
            width,
            height,
            sums: vec![vec![0.0; width * height]; planes],
            counts: vec![0; width * height],
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Adds one solved band per plane at the band's original coordinates.
    pub fn add_band(&mut self, layout: &BandLayout, solved: &[Vec<f64>]) -> Result<()> {
        if solved.len() != self.sums.len() {
            return Err(Error::Channels {
                expected: self.sums.len(),
                actual: solved.len(),
            });
        }
        if let Some(s) = solved.iter().find(|s| s.len() != layout.len()) {
            return Err(Error::Length {
                expected: layout.len(),
                actual: s.len(),
            });
        }
        if let Some(&(row, col)) = layout
            .coords()
            .iter()
            .find(|&&(row, col)| row >= self.height || col >= self.width)
        {
            return Err(Error::Dimensions(format!(
                "band coordinate ({row}, {col}) outside {}x{} raster",
                self.width, self.height
            )));
        }
        for &(row, col) in layout.coords() {
            self.counts[row * self.width + col] += 1;
        }
        for (sum, values) in self.sums.iter_mut().zip(solved) {
            for (&(row, col), v) in layout.coords().iter().zip(values) {
                sum[row * self.width + col] += v;
            }
        }
        Ok(())
    }

    /// Divides sums by counts, plane by plane. Fails if any pixel received no contribution.
    pub fn average_planes(&self) -> Result<Vec<Vec<f64>>> {
        if let Some(px) = self.counts.iter().position(|&c| c == 0) {
            return Err(Error::Dimensions(format!(
                "pixel ({}, {}) not covered by any band",
                px / self.width,
                px % self.width
            )));
        }
        Ok(self
            .sums
            .iter()
            .map(|sum| {
                sum.iter()
                    .zip(&self.counts)
                    .map(|(s, &c)| s / c as f64)
                    .collect()
            })
            .collect())
    }

    /// Averages into an interleaved image (1 or 3 planes).
    pub fn average(&self) -> Result<Image> {
        let planes = self.average_planes()?;
        let n = self.width * self.height;
        let mut data = Vec::with_capacity(n * planes.len());
        for i in 0..n {
            data.extend(planes.iter().map(|p| p[i]));
        }
        Image::new(self.width, self.height, planes.len(), data)
    }
}

/// Adds a single-channel solved band into `accum`.
pub fn scatter_band(band: &Band, solved: &[f64], accum: &mut Accumulator) -> Result<()> {
    accum.add_band(&band.layout, &[solved.to_vec()])
}
