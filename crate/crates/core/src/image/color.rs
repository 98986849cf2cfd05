//! BT.601 full-range luma/chroma conversion.
//!
//! `U = (B - Y) / 1.772` and `V = (R - Y) / 1.402`, so white maps to
//! `(1, 0, 0)`. The inverse is solved from the same luma weights rather than
//! from rounded matrix coefficients, which keeps the round trip at f64 precision.

use super::Image;
use crate::error::{Error, Result};

const KR: f64 = 0.299;
const KB: f64 = 0.114;
const KG: f64 = 1.0 - KR - KB;
const U_SCALE: f64 = 2.0 * (1.0 - KB);
const V_SCALE: f64 = 2.0 * (1.0 - KR);

#[inline]
fn luma(r: f64, g: f64, b: f64) -> f64 {
    KR * r + KG * g + KB * b
}

fn require_rgb(img: &Image) -> Result<()> {
    if img.channels() != 3 {
        return Err(Error::Channels {
            expected: 3,
            actual: img.channels(),
        });
    }
    Ok(())
}

pub fn rgb_to_yuv(img: &Image) -> Result<Image> {
    require_rgb(img)?;
    let mut out = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        let y = luma(px[0], px[1], px[2]);
        out.extend_from_slice(&[y, (px[2] - y) / U_SCALE, (px[0] - y) / V_SCALE]);
    }
    Image::new(img.width(), img.height(), 3, out)
}

pub fn yuv_to_rgb(img: &Image) -> Result<Image> {
    require_rgb(img)?;
    let mut out = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        let (y, u, v) = (px[0], px[1], px[2]);
        let r = y + V_SCALE * v;
        let b = y + U_SCALE * u;
        let g = (y - KR * r - KB * b) / KG;
        out.extend_from_slice(&[r, g, b]);
    }
    Image::new(img.width(), img.height(), 3, out)
}

/// Single-channel luma plane. A one-channel image is returned unchanged.
pub fn luminance(img: &Image) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| luma(px[0], px[1], px[2]))
        .collect();
    Image::new(img.width(), img.height(), 1, data).expect("luma of finite samples is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn px(r: f64, g: f64, b: f64) -> Image {
        Image::new(1, 1, 3, vec![r, g, b]).unwrap()
    }

    #[test]
    fn black_and_white() {
        assert_eq!(rgb_to_yuv(&px(0.0, 0.0, 0.0)).unwrap().data(), &[0.0, 0.0, 0.0]);
        let w = rgb_to_yuv(&px(1.0, 1.0, 1.0)).unwrap();
        assert!((w.data()[0] - 1.0).abs() < 1e-15);
        assert!(w.data()[1].abs() < 1e-15);
        assert!(w.data()[2].abs() < 1e-15);
    }

    #[test]
    fn wrong_channel_count() {
        let gray = Image::filled(2, 2, 1, 0.5).unwrap();
        assert!(matches!(
            rgb_to_yuv(&gray),
            Err(Error::Channels { expected: 3, actual: 1 })
        ));
        assert!(yuv_to_rgb(&gray).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(r in 0.0f64..=1.0, g in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let back = yuv_to_rgb(&rgb_to_yuv(&px(r, g, b)).unwrap()).unwrap();
            for (x, y) in back.data().iter().zip([r, g, b]) {
                prop_assert!((x - y).abs() <= 1e-6);
            }
            let yuv = rgb_to_yuv(&px(r, g, b)).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&yuv.data()[0]));
        }
    }
}
