//! Guidance weights between pixel pairs.
//!
//! Two kernels are provided:
//!
//! * fractional: `1 / (|i - j|^alpha_s + eps) * 1 / (|G_i - G_j|^alpha_r + eps)`
//! * exponential: `exp(-|i - j|^2 / 2 sigma_s^2) * exp(-|G_i - G_j|^2 / 2 sigma_r^2)`
//!
//! `|i - j|` is the Euclidean distance between the original 2D coordinates of
//! the two pixels. `|G_i - G_j|` is the L2 norm of the guidance difference over
//! channels, multiplied by [`WeightParams::range_scale`] so sigma/alpha values
//! can be stated against 8-bit style ranges while images stay in `[0, 1]`.
//! Both constructors default to a scale of 255.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::snake::BandLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Frac,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub kind: WeightKind,
    pub alpha_s: f64,
    pub alpha_r: f64,
    pub sigma_s: f64,
    pub sigma_r: f64,
    pub epsilon: f64,
    /// Multiplier applied to guidance differences before the range kernel.
    pub range_scale: f64,
}

pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Guidance in `[0, 1]` is compared as if it were 8-bit.
pub const DEFAULT_RANGE_SCALE: f64 = 255.0;

impl WeightParams {
    /// Fractional kernel with guidance differences measured on a `[0, 255]` scale.
    pub fn frac(alpha_s: f64, alpha_r: f64) -> Self {
        WeightParams {
            kind: WeightKind::Frac,
            alpha_s,
            alpha_r,
            sigma_s: 1.0,
            sigma_r: 1.0,
            epsilon: DEFAULT_EPSILON,
            range_scale: DEFAULT_RANGE_SCALE,
        }
    }

    /// Exponential kernel with guidance differences measured on a `[0, 255]` scale.
    pub fn exp(sigma_s: f64, sigma_r: f64) -> Self {
        WeightParams {
            kind: WeightKind::Exp,
            alpha_s: 1.0,
            alpha_r: 1.0,
            sigma_s,
            sigma_r,
            epsilon: DEFAULT_EPSILON,
            range_scale: DEFAULT_RANGE_SCALE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.epsilon) {
            return Err(Error::invalid("epsilon must be > 0"));
        }
        if !positive(self.range_scale) {
            return Err(Error::invalid("range_scale must be > 0"));
        }
        match self.kind {
            WeightKind::Exp if !positive(self.sigma_s) || !positive(self.sigma_r) => {
                Err(Error::invalid("sigma_s and sigma_r must be > 0"))
            }
            WeightKind::Frac
                if !(self.alpha_s.is_finite() && self.alpha_r.is_finite())
                    || self.alpha_s < 0.0
                    || self.alpha_r < 0.0 =>
            {
                Err(Error::invalid("alpha_s and alpha_r must be finite and >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// Spatial factor of the kernel for a pixel distance `d`.
    #[inline]
    pub fn spatial(&self, d: f64) -> f64 {
        match self.kind {
            WeightKind::Frac => 1.0 / (d.powf(self.alpha_s) + self.epsilon),
            WeightKind::Exp => (-d * d / (2.0 * self.sigma_s * self.sigma_s)).exp(),
        }
    }

    /// Range factor of the kernel for an (unscaled) guidance difference.
    #[inline]
    pub fn range(&self, diff: f64) -> f64 {
        let g = diff * self.range_scale;
        match self.kind {
            WeightKind::Frac => 1.0 / (g.powf(self.alpha_r) + self.epsilon),
            WeightKind::Exp => (-g * g / (2.0 * self.sigma_r * self.sigma_r)).exp(),
        }
    }

    #[inline]
    pub fn weight(&self, spatial_dist: f64, range_diff: f64) -> f64 {
        self.combine(self.spatial(spatial_dist), self.range(range_diff))
    }

    /// Product of the two factors. Exponential weights are floored at the
    /// smallest normal f64 so they stay strictly positive under underflow.
    #[inline]
    fn combine(&self, spatial: f64, range: f64) -> f64 {
        let w = spatial * range;
        match self.kind {
            WeightKind::Frac => w,
            WeightKind::Exp => w.max(f64::MIN_POSITIVE),
        }
    }
}

/// Fractional weight; `range_diff` is taken as already scaled.
pub fn frac_weight(spatial_dist: f64, range_diff: f64, p: &WeightParams) -> f64 {
    1.0 / (spatial_dist.powf(p.alpha_s) + p.epsilon) * 1.0 / (range_diff.powf(p.alpha_r) + p.epsilon)
}

/// Exponential weight; `range_diff` is taken as already scaled.
pub fn exp_weight(spatial_dist: f64, range_diff: f64, p: &WeightParams) -> f64 {
    let w = (-spatial_dist * spatial_dist / (2.0 * p.sigma_s * p.sigma_s)).exp()
        * (-range_diff * range_diff / (2.0 * p.sigma_r * p.sigma_r)).exp();
    w.max(f64::MIN_POSITIVE)
}

/// L2 norm of the channel-wise difference between two guidance pixels.
#[inline]
pub fn guidance_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Weights between every band position `k` and its `r` successors.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    len: usize,
    r: usize,
    values: Vec<f64>,
}

impl WeightTable {
    pub fn new(len: usize, r: usize) -> Self {
        WeightTable {
            len,
            r,
            values: vec![0.0; len * r],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn radius(&self) -> usize {
        self.r
    }

    /// Weight between positions `k` and `k + t`, `1 <= t <= r`. Zero past the end.
    #[inline]
    pub fn get(&self, k: usize, t: usize) -> f64 {
        debug_assert!((1..=self.r).contains(&t));
        self.values[k * self.r + t - 1]
    }

    #[inline]
    pub fn set(&mut self, k: usize, t: usize, w: f64) {
        debug_assert!(k + t < self.len, "offset past band end");
        self.values[k * self.r + t - 1] = w;
    }
}

/// Computes the weight table of a band from the guidance image.
///
/// Spatial distances use the original 2D coordinates recorded in `layout`.
pub fn edge_weights_along_band(
    guidance: &Image,
    layout: &BandLayout,
    r: usize,
    p: &WeightParams,
) -> Result<WeightTable> {
    let coords = layout.coords();
    if coords.is_empty() {
        return Err(Error::invalid("band carries no coordinates"));
    }
    if let Some(&(row, col)) = coords
        .iter()
        .find(|&&(row, col)| row >= guidance.height() || col >= guidance.width())
    {
        return Err(Error::Dimensions(format!(
            "band coordinate ({row}, {col}) outside {}x{} guidance",
            guidance.width(),
            guidance.height()
        )));
    }

    // Band neighbours within r positions are within r rows and columns of each
    // other, so the spatial factor only takes (r + 1)^2 distinct values.
    let side = r + 1;
    let spatial: Vec<f64> = (0..side * side)
        .map(|i| {
            let (dr, dc) = ((i / side) as f64, (i % side) as f64);
            p.spatial((dr * dr + dc * dc).sqrt())
        })
        .collect();

    let s = coords.len();
    let mut table = WeightTable::new(s, r);
    for k in 0..s {
        let (rk, ck) = coords[k];
        let gk = guidance.pixel(rk, ck);
        for t in 1..=r.min(s - 1 - k) {
            let (rj, cj) = coords[k + t];
            let dr = rk.abs_diff(rj);
            let dc = ck.abs_diff(cj);
            let sw = if dr <= r && dc <= r {
                spatial[dr * side + dc]
            } else {
                p.spatial(((dr * dr + dc * dc) as f64).sqrt())
            };
            let w = p.combine(sw, p.range(guidance_distance(gk, guidance.pixel(rj, cj))));
            table.set(k, t, w);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snake::{extract_layout, Axis};
    use proptest::prelude::*;

    #[test]
    fn frac_examples() {
        let p = WeightParams::frac(1.2, 1.2);
        let w = frac_weight(1.0, 0.0, &p);
        assert!((w - 1.0 / (1.0 + 1e-4) / 1e-4).abs() < 1e-9);
        assert!((w - 9999.0).abs() < 1e-3);
        assert!((frac_weight(0.0, 0.0, &p) - 1e8).abs() < 1e-6);
        assert!(frac_weight(1.0, 0.5, &p) > frac_weight(1.0, 0.9, &p));
    }

    #[test]
    fn exp_examples() {
        let p = WeightParams::exp(4.0, 3.0);
        assert_eq!(exp_weight(0.0, 0.0, &p), 1.0);
        let w = exp_weight(4.0 * 2f64.sqrt(), 0.0, &p);
        assert!((w - (-1.0f64).exp()).abs() < 1e-12);
        assert!((w - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn param_validation() {
        let mut p = WeightParams::exp(4.0, 3.0);
        assert!(p.validate().is_ok());
        p.sigma_r = 0.0;
        assert!(p.validate().is_err());
        let mut f = WeightParams::frac(1.2, 1.2);
        f.epsilon = 0.0;
        assert!(f.validate().is_err());
    }

    #[test]
    fn constant_guidance_with_wide_sigma_gives_unit_weights() {
        let g = Image::filled(5, 5, 1, 0.3).unwrap();
        let p = WeightParams::exp(1e12, 1.0);
        let layout = extract_layout(5, 5, 2, 2, Axis::Column).unwrap();
        let t = edge_weights_along_band(&g, &layout, 2, &p).unwrap();
        for k in 0..t.len() {
            for off in 1..=2.min(t.len() - 1 - k) {
                assert!((t.get(k, off) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn serpentine_neighbours_are_spatially_adjacent() {
        // 3x3 image numbered 1..9; in the column band, "4" sits next to "5".
        let g = Image::from_fn(3, 3, |r, c| (r * 3 + c + 1) as f64 / 9.0).unwrap();
        let layout = extract_layout(3, 3, 1, 1, Axis::Column).unwrap();
        let coords = layout.coords();
        let five = coords.iter().position(|&p| p == (1, 1)).unwrap();
        let four = coords.iter().position(|&p| p == (1, 0)).unwrap();
        assert_eq!(five.abs_diff(four), 1);
        let p = WeightParams::frac(1.2, 1.2);
        let t = edge_weights_along_band(&g, &layout, 1, &p).unwrap();
        let k = five.min(four);
        let expected = frac_weight(1.0, 255.0 / 9.0, &p);
        assert!((t.get(k, 1) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn matches_pairwise_brute_force() {
        let g = Image::new(
            4,
            6,
            3,
            (0..72).map(|i| ((i * 37 % 101) as f64) / 101.0).collect(),
        )
        .unwrap();
        for p in [WeightParams::frac(1.2, 0.8), WeightParams::exp(2.0, 40.0)] {
            for axis in [Axis::Column, Axis::Row] {
                let layout = extract_layout(4, 6, 1, 1, axis).unwrap();
                let t = edge_weights_along_band(&g, &layout, 2, &p).unwrap();
                let c = layout.coords();
                for k in 0..c.len() {
                    for off in 1..=2.min(c.len() - 1 - k) {
                        let (a, b) = (c[k], c[k + off]);
                        let d = (((a.0 as f64) - b.0 as f64).powi(2)
                            + ((a.1 as f64) - b.1 as f64).powi(2))
                        .sqrt();
                        let diff: f64 = (0..3)
                            .map(|ch| (g.get(a.0, a.1, ch) - g.get(b.0, b.1, ch)).powi(2))
                            .sum::<f64>()
                            .sqrt()
                            * p.range_scale;
                        let want = match p.kind {
                            WeightKind::Frac => frac_weight(d, diff, &p),
                            WeightKind::Exp => exp_weight(d, diff, &p),
                        };
                        assert!((t.get(k, off) - want).abs() <= 1e-12 * want.max(1.0));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_positive_bounded(
            d in 0.0f64..10.0,
            a in proptest::collection::vec(0.0f64..1.0, 3),
            b in proptest::collection::vec(0.0f64..1.0, 3),
            alpha in 0.1f64..2.0,
            sigma in 0.1f64..10.0,
        ) {
            let fp = WeightParams::frac(alpha, alpha);
            let ep = WeightParams::exp(sigma, sigma);
            for p in [fp, ep] {
                let ab = p.weight(d, guidance_distance(&a, &b));
                let ba = p.weight(d, guidance_distance(&b, &a));
                prop_assert_eq!(ab, ba);
                prop_assert!(ab > 0.0 && ab.is_finite());
            }
            prop_assert!(ep.weight(d, guidance_distance(&a, &b)) <= 1.0);
        }
    }
}
