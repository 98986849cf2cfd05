//! Semi-global WLS smoothing.
//!
//! One directional pass slides a `(2r + 1)`-wide window across the image with
//! stride `tau`. Each window is flattened into a serpentine band, the band's
//! 1D WLS subsystem is built from the static guidance image and solved with
//! the r-band LU factorization, and the solutions are scattered back and
//! averaged where windows overlap. `iterations` counts directional passes,
//! alternating between column and row windows starting with `first_axis`.
//!
//! Band solves inside a pass are independent. With more than one thread they
//! run on a rayon pool, but solutions are always accumulated in increasing
//! center order, so the output does not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banded::{assemble_subsystem, rband_lu_factorize};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::snake::{band_centers, extract_layout, Accumulator, Axis, BandLayout};
use crate::weights::{edge_weights_along_band, WeightParams};

/// Smoothed index-map values below this are treated as carrying no data.
pub const SPARSE_FLOOR: f64 = 1e-8;

/// Bands solved between two accumulation steps.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothConfig {
    pub lambda: f64,
    pub r: usize,
    pub tau: usize,
    /// Number of directional passes.
    pub iterations: usize,
    pub weight: WeightParams,
    pub first_axis: Axis,
    /// Worker threads for band solves; 1 runs everything on the calling thread.
    pub threads: usize,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        SmoothConfig {
            lambda: 900.0,
            r: 1,
            tau: 1,
            iterations: 4,
            weight: WeightParams::frac(1.2, 1.2),
            first_axis: Axis::Column,
            threads: 1,
        }
    }
}

impl SmoothConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.r < 1 {
            return Err(Error::invalid("radius must be >= 1"));
        }
        if self.tau < 1 || self.tau > 2 * self.r + 1 {
            return Err(Error::invalid(format!(
                "stride {} outside 1..={}",
                self.tau,
                2 * self.r + 1
            )));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        if self.threads < 1 {
            return Err(Error::invalid("threads must be >= 1"));
        }
        self.weight.validate()
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Edge-preserving smoothing of `target` under `guidance`.
///
/// Every channel of `target` is filtered with the same weights, taken from
/// all channels of `guidance`.
pub fn smooth(target: &Image, guidance: &Image, cfg: &SmoothConfig) -> Result<Image> {
    if !target.same_size(guidance) {
        return Err(Error::Dimensions(format!(
            "target {}x{} vs guidance {}x{}",
            target.width(),
            target.height(),
            guidance.width(),
            guidance.height()
        )));
    }
    cfg.validate()?;
    if cfg.lambda == 0.0 {
        return Ok(target.clone());
    }
    let planes = smooth_planes(target.planes().into_iter().map(Image::into_data).collect(), guidance, cfg)?;
    let n = target.pixel_count();
    let mut data = Vec::with_capacity(n * planes.len());
    for i in 0..n {
        data.extend(planes.iter().map(|p| p[i]));
    }
    Image::new(target.width(), target.height(), target.channels(), data)
}

/// Smooths any number of row-major planes sharing the guidance's dimensions.
pub fn smooth_planes(planes: Vec<Vec<f64>>, guidance: &Image, cfg: &SmoothConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let (w, h) = (guidance.width(), guidance.height());
    if planes.is_empty() {
        return Err(Error::invalid("no planes to smooth"));
    }
    if let Some(p) = planes.iter().find(|p| p.len() != w * h) {
        return Err(Error::Length {
            expected: w * h,
            actual: p.len(),
        });
    }
    if cfg.lambda == 0.0 {
        return Ok(planes);
    }
    let pool = if cfg.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let mut current = planes;
    let mut axis = cfg.first_axis;
    for _ in 0..cfg.iterations {
        current = directional_pass(&current, guidance, axis, cfg, pool.as_ref())?;
        axis = axis.other();
    }
    Ok(current)
}

fn directional_pass(
    planes: &[Vec<f64>],
    guidance: &Image,
    axis: Axis,
    cfg: &SmoothConfig,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<Vec<f64>>> {
    let (w, h) = (guidance.width(), guidance.height());
    let centers = band_centers(axis.cross_extent(w, h), cfg.r, cfg.tau)?;
    let mut acc = Accumulator::new(w, h, planes.len());
    let solve = |&center: &usize| solve_band(planes, guidance, center, axis, cfg);
    for chunk in centers.chunks(CHUNK) {
        let solved: Vec<(BandLayout, Vec<Vec<f64>>)> = match pool {
            Some(pool) => pool.install(|| chunk.par_iter().map(solve).collect::<Result<_>>())?,
            None => chunk.iter().map(solve).collect::<Result<_>>()?,
        };
        for (layout, values) in &solved {
            acc.add_band(layout, values)?;
        }
    }
    acc.average_planes()
}

/// Solves one band for every plane, sharing a single factorization.
fn solve_band(
    planes: &[Vec<f64>],
    guidance: &Image,
    center: usize,
    axis: Axis,
    cfg: &SmoothConfig,
) -> Result<(BandLayout, Vec<Vec<f64>>)> {
    let w = guidance.width();
    let layout = extract_layout(w, guidance.height(), center, cfg.r, axis)?;
    let weights = edge_weights_along_band(guidance, &layout, cfg.r, &cfg.weight)?;
    let mut values = Vec::with_capacity(layout.len());
    layout.gather_plane(&planes[0], w, &mut values);
    let system = assemble_subsystem(&values, &weights, cfg.lambda, cfg.r)?;
    let factors = rband_lu_factorize(&system)?;
    let mut out = Vec::with_capacity(planes.len());
    for (i, plane) in planes.iter().enumerate() {
        if i > 0 {
            values = Vec::with_capacity(layout.len());
            layout.gather_plane(plane, w, &mut values);
        }
        factors.solve_unit_row_sum(&mut values)?;
        out.push(std::mem::take(&mut values));
    }
    Ok((layout, out))
}

/// Sparse samples `values` defined where `mask` is one.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseField {
    values: Image,
    mask: Image,
}

impl SparseField {
    /// Pairs values with a 0/1 index map; values where the mask is zero are cleared.
    pub fn new(values: Image, mask: Image) -> Result<Self> {
        if mask.channels() != 1 {
            return Err(Error::Channels {
                expected: 1,
                actual: mask.channels(),
            });
        }
        if !values.same_size(&mask) {
            return Err(Error::Dimensions("values and mask differ in size".into()));
        }
        if let Some(v) = mask.data().iter().find(|&&m| m != 0.0 && m != 1.0) {
            return Err(Error::invalid(format!("mask sample {v} is not 0 or 1")));
        }
        let c = values.channels();
        let cleared: Vec<f64> = values
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| if mask.data()[i / c] == 1.0 { v } else { 0.0 })
            .collect();
        let values = Image::new(values.width(), values.height(), c, cleared)?;
        Ok(SparseField { values, mask })
    }

    pub fn values(&self) -> &Image {
        &self.values
    }

    pub fn mask(&self) -> &Image {
        &self.mask
    }

    pub fn defined(&self) -> usize {
        self.mask.data().iter().filter(|&&m| m == 1.0).count()
    }
}

/// Result of a sparse interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub image: Image,
    /// Pixels where the smoothed index map fell below [`SPARSE_FLOOR`]; they are set to zero.
    pub unresolved: Vec<bool>,
}

impl Interpolation {
    pub fn unresolved_count(&self) -> usize {
        self.unresolved.iter().filter(|&&u| u).count()
    }
}

/// Propagates sparse samples by smoothing values and index map and taking their ratio.
pub fn interpolate_sparse(field: &SparseField, guidance: &Image, cfg: &SmoothConfig) -> Result<Interpolation> {
    if field.defined() == 0 {
        return Err(Error::EmptyMask);
    }
    if !field.values.same_size(guidance) {
        return Err(Error::Dimensions("sparse field and guidance differ in size".into()));
    }
    let mut planes: Vec<Vec<f64>> = field.values.planes().into_iter().map(Image::into_data).collect();
    planes.push(field.mask.data().to_vec());
    let smoothed = smooth_planes(planes, guidance, cfg)?;
    let (denominator, numerators) = smoothed.split_last().expect("mask plane present");

    let c = field.values.channels();
    let n = guidance.pixel_count();
    let mut data = Vec::with_capacity(n * c);
    let mut unresolved = vec![false; n];
    for i in 0..n {
        let d = denominator[i];
        if d < SPARSE_FLOOR {
            unresolved[i] = true;
            data.extend(std::iter::repeat_n(0.0, c));
        } else {
            data.extend(numerators.iter().map(|p| p[i] / d));
        }
    }
    Ok(Interpolation {
        image: Image::new(guidance.width(), guidance.height(), c, data)?,
        unresolved,
    })
}
