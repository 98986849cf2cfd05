//! Worked examples checked against exact dense solves.

use sgwls::apps::{colorize, detail_enhance, Preset, ENHANCE_BOOST};
use sgwls::banded::dense_solve;
use sgwls::image::rgb_to_yuv;
use sgwls::reference::assemble_full;
use sgwls::{interpolate_sparse, smooth, synth, Image, SmoothConfig, SparseField};

/// Exact sparse interpolation `A^-1 F / A^-1 H` of one channel by dense elimination.
fn exact_interpolation(values: &[f64], mask: &[f64], guidance: &Image, cfg: &SmoothConfig) -> Vec<f64> {
    let sys = assemble_full(guidance, cfg.lambda, cfg.r, &cfg.weight).unwrap();
    let n = sys.len();
    let f: Vec<f64> = values.iter().zip(mask).map(|(v, m)| v * m).collect();
    let num = dense_solve(sys.to_dense(), n, f).unwrap();
    let den = dense_solve(sys.to_dense(), n, mask.to_vec()).unwrap();
    num.iter().zip(&den).map(|(a, b)| a / b).collect()
}

#[test]
fn sparse_ramp_matches_exact_interpolation() {
    let (w, h) = (16, 16);
    let ramp = Image::from_fn(w, h, |row, col| (row + col) as f64 / 30.0).unwrap();
    let mask = Image::from_fn(w, h, |row, col| if row % 4 == 0 && col % 4 == 0 { 1.0 } else { 0.0 }).unwrap();
    let guidance = Image::filled(w, h, 1, 0.5).unwrap();
    let cfg = Preset::Upsample4x.config();

    let sg = interpolate_sparse(&SparseField::new(ramp.clone(), mask.clone()).unwrap(), &guidance, &cfg).unwrap();
    assert_eq!(sg.unresolved_count(), 0);
    let exact = exact_interpolation(ramp.data(), mask.data(), &guidance, &cfg);
    let (lo, hi) = ramp.range();
    let err = sg.image.data().iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / (hi - lo);
    assert!(err <= 0.02, "max deviation from exact interpolation {:.2}% of range", err * 100.0);
}

#[test]
fn two_region_colorization_follows_the_regions() {
    let (w, h) = (32, 32);
    let gray = Image::from_fn(w, h, |_, col| if col < w / 2 { 0.2 } else { 0.8 }).unwrap();
    let mut scribbles = Image::from_planes(&[gray.clone(), gray.clone(), gray.clone()]).unwrap();
    let mut mask = Image::filled(w, h, 1, 0.0).unwrap();
    for (row, col, rgb) in [(16, 8, [0.6, 0.1, 0.1]), (16, 24, [0.6, 0.8, 1.0])] {
        for (c, v) in rgb.into_iter().enumerate() {
            scribbles.set(row, col, c, v);
        }
        mask.set(row, col, 0, 1.0);
    }
    let cfg = Preset::Colorize.config();
    let yuv = rgb_to_yuv(&scribbles).unwrap();
    let chroma = |p: &Image, row: usize, col: usize| [p.get(row, col, 1), p.get(row, col, 2)];
    let seeds = [chroma(&yuv, 16, 8), chroma(&yuv, 16, 24)];
    let closer_to_own = |uv: [f64; 2], region: usize| {
        let d = |s: [f64; 2]| (uv[0] - s[0]).hypot(uv[1] - s[1]);
        d(seeds[region]) < d(seeds[1 - region])
    };
    let share = |pick: &dyn Fn(usize, usize) -> [f64; 2]| -> [f64; 2] {
        let mut hits = [0usize; 2];
        for row in 0..h {
            for col in 0..w {
                let region = usize::from(col >= w / 2);
                hits[region] += usize::from(closer_to_own(pick(row, col), region));
            }
        }
        hits.map(|n| n as f64 / (w * h / 2) as f64)
    };

    let out = rgb_to_yuv(&colorize(&gray, &scribbles, &mask, &cfg).unwrap()).unwrap();
    let sg = share(&|row, col| chroma(&out, row, col));
    let exact_u = exact_interpolation(&yuv.plane(1).into_data(), mask.data(), &gray, &cfg);
    let exact_v = exact_interpolation(&yuv.plane(2).into_data(), mask.data(), &gray, &cfg);
    let exact = share(&|row, col| [exact_u[row * w + col], exact_v[row * w + col]]);
    assert!(exact.iter().all(|&s| s >= 0.99), "exact oracle shares {exact:?}");
    assert!(sg.iter().all(|&s| s >= 0.99), "SG-WLS shares {sg:?}");
}

fn column_mean(img: &Image, cols: std::ops::Range<usize>) -> f64 {
    let n = (cols.len() * img.height()) as f64;
    cols.flat_map(|c| (0..img.height()).map(move |r| (r, c))).map(|(r, c)| img.get(r, c, 0)).sum::<f64>() / n
}

/// Half the peak-to-peak swing down column `col`.
fn texture_amplitude(img: &Image, col: usize) -> f64 {
    let column: Vec<f64> = (0..img.height()).map(|r| img.get(r, col, 0)).collect();
    let (lo, hi) = column.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    (hi - lo) / 2.0
}

#[test]
fn detail_boost_scales_texture_and_keeps_the_step() {
    let (w, h, low, step, amp) = (64, 64, 0.3, 0.3, 0.02);
    let input = synth::textured_step(w, h, low, step, amp, 8.0).unwrap();
    let out = detail_enhance(&input, ENHANCE_BOOST, &Preset::Enhance.config()).unwrap();

    let gain = texture_amplitude(&out, w / 4) / texture_amplitude(&input, w / 4);
    assert!((gain - ENHANCE_BOOST).abs() <= 0.1 * ENHANCE_BOOST, "texture gain {gain:.3}");

    let measured = column_mean(&out, w / 2 + 4..w - 4) - column_mean(&out, 4..w / 2 - 4);
    assert!((measured - step).abs() <= 0.05 * step, "step amplitude {measured:.4} vs {step}");

    let ideal_hi = low + step + ENHANCE_BOOST * amp;
    let ideal_lo = low - ENHANCE_BOOST * amp;
    let (olo, ohi) = out.range();
    assert!(ohi <= ideal_hi + 0.05 * step && olo >= ideal_lo - 0.05 * step, "overshoot: range {olo:.3}..{ohi:.3}");
}

#[test]
fn smoothing_with_separate_guidance_follows_guide_edges() {
    let guide = Image::from_fn(32, 32, |_, col| if col < 16 { 0.0 } else { 1.0 }).unwrap();
    let noisy = synth::uniform(32, 32, 3).unwrap();
    let out = smooth(&noisy, &guide, &Preset::Enhance.config()).unwrap();
    // Averaging happens within each guidance region, so the two halves settle
    // on their own means rather than a common one.
    let (left, right) = (column_mean(&noisy, 0..16), column_mean(&noisy, 16..32));
    assert!((column_mean(&out, 2..14) - left).abs() < 0.02);
    assert!((column_mean(&out, 18..30) - right).abs() < 0.02);
    assert!(out.mean_abs_diff(&noisy) > 0.1);
}
