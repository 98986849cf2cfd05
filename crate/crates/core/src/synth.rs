//! Deterministic synthetic scenes for tests, benchmarks and the self-test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::image::Image;

fn gaussian(sigma: f64) -> Normal<f64> {
    Normal::new(0.0, sigma).expect("finite non-negative sigma")
}

/// Piecewise-constant grey scene: a vertical step, a bright block and a dark
/// horizontal strip, plus Gaussian noise, clamped to `[0, 1]`.
pub fn step_scene(width: usize, height: usize, noise: f64, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = gaussian(noise);
    Image::from_fn(width, height, |row, col| {
        let mut v = if col < width / 2 { 0.2 } else { 0.6 };
        if (height / 4..height / 2).contains(&row) && (width / 4..3 * width / 4).contains(&col) {
            v = 0.9;
        }
        if row >= 3 * height / 4 {
            v -= 0.15;
        }
        (v + dist.sample(&mut rng)).clamp(0.0, 1.0)
    })
}

/// Vertical step of height `step` from `low`, with a sinusoidal vertical
/// texture of the given amplitude and period (pixels) on both sides.
pub fn textured_step(width: usize, height: usize, low: f64, step: f64, amplitude: f64, period: f64) -> Result<Image> {
    Image::from_fn(width, height, |row, col| {
        let base = if col < width / 2 { low } else { low + step };
        base + amplitude * (std::f64::consts::TAU * row as f64 / period).sin()
    })
}

/// Depth scene with its aligned colour guidance.
#[derive(Debug, Clone)]
pub struct DepthScene {
    /// Noise-free piecewise-constant depth in `[0, 1]`.
    pub depth: Image,
    /// RGB guidance whose regions coincide with the depth regions.
    pub guidance: Image,
}

/// Random axis-aligned rectangles at random depths over a background plane.
///
/// Each region gets a distinct random colour; guidance carries mild texture
/// noise so that weights are not trivially binary.
pub fn depth_scene(width: usize, height: usize, regions: usize, seed: u64) -> Result<DepthScene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label = vec![0usize; width * height];
    for id in 1..=regions {
        let rw = rng.random_range(width / 6..=width / 2);
        let rh = rng.random_range(height / 6..=height / 2);
        let r0 = rng.random_range(0..=height - rh);
        let c0 = rng.random_range(0..=width - rw);
        for row in r0..r0 + rh {
            for col in c0..c0 + rw {
                label[row * width + col] = id;
            }
        }
    }
    let depths: Vec<f64> = (0..=regions).map(|_| rng.random_range(0.1..0.9)).collect();
    let colours: Vec<[f64; 3]> = (0..=regions)
        .map(|_| [rng.random_range(0.1..0.9), rng.random_range(0.1..0.9), rng.random_range(0.1..0.9)])
        .collect();
    let texture = gaussian(0.005);
    let depth = Image::new(width, height, 1, label.iter().map(|&l| depths[l]).collect())?;
    let mut rgb = Vec::with_capacity(3 * width * height);
    for &l in &label {
        for ch in 0..3 {
            rgb.push((colours[l][ch] + texture.sample(&mut rng)).clamp(0.0, 1.0));
        }
    }
    Ok(DepthScene {
        depth,
        guidance: Image::new(width, height, 3, rgb)?,
    })
}

/// Samples every `factor`-th pixel starting at the top-left and adds Gaussian noise.
pub fn downsample_noisy(img: &Image, factor: usize, noise: f64, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = gaussian(noise);
    let w = img.width().div_ceil(factor);
    let h = img.height().div_ceil(factor);
    Image::from_fn(w, h, |row, col| img.get(row * factor, col * factor, 0) + dist.sample(&mut rng))
}

/// Horizontal HDR luminance ramp spanning `decades` orders of magnitude from `min`.
pub fn hdr_ramp(width: usize, height: usize, min: f64, decades: f64) -> Result<Image> {
    let span = (width.max(2) - 1) as f64;
    Image::from_fn(width, height, |_, col| min * 10f64.powf(decades * col as f64 / span))
}

/// Uniform noise image in `[0, 1)`.
pub fn uniform(width: usize, height: usize, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |_, _| rng.random::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenes_are_deterministic() {
        assert_eq!(step_scene(20, 16, 0.05, 3).unwrap(), step_scene(20, 16, 0.05, 3).unwrap());
        assert_ne!(step_scene(20, 16, 0.05, 3).unwrap(), step_scene(20, 16, 0.05, 4).unwrap());
        let a = depth_scene(32, 32, 4, 9).unwrap();
        let b = depth_scene(32, 32, 4, 9).unwrap();
        assert_eq!(a.depth, b.depth);
        assert_eq!(a.guidance, b.guidance);
    }

    #[test]
    fn step_scene_range() {
        let (lo, hi) = step_scene(64, 64, 0.05, 1).unwrap().range();
        assert!(lo >= 0.0 && hi <= 1.0 && hi - lo > 0.5);
    }

    #[test]
    fn downsampling_picks_top_left_sites() {
        let img = Image::from_fn(8, 8, |r, c| (r * 8 + c) as f64).unwrap();
        let low = downsample_noisy(&img, 4, 0.0, 0).unwrap();
        assert_eq!(low.data(), &[0.0, 4.0, 32.0, 36.0]);
    }

    #[test]
    fn ramp_spans_requested_decades() {
        let ramp = hdr_ramp(11, 2, 0.01, 2.0).unwrap();
        assert!((ramp.get(0, 0, 0) - 0.01).abs() < 1e-15);
        assert!((ramp.get(1, 10, 0) - 1.0).abs() < 1e-12);
    }
}
