//! Quick oracle checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::{dense_solve_oracle, rband_lu_factorize, solve_banded, BandedSystem};
use crate::error::Result;
use crate::image::{decode, encode, Format, Image};
use crate::reference::{assemble_full, conjugate_gradient};
use crate::sgwls::{smooth, SmoothConfig};
use crate::snake::Axis;
use crate::synth;
use crate::weights::WeightParams;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Random symmetric strictly diagonally dominant banded system.
pub fn random_spd_banded(rng: &mut impl Rng, n: usize, r: usize) -> BandedSystem {
    let mut sys = BandedSystem::zeros(n, r);
    let r = sys.bandwidth();
    let mut row_sums = vec![0.0; n];
    for k in 0..n {
        for i in 1..=r.min(n - 1 - k) {
            let v = -rng.random_range(0.01..1.0);
            sys.set_upper(k, i, v);
            sys.set_lower(k, i, v);
            row_sums[k] += v.abs();
            row_sums[k + i] += v.abs();
        }
    }
    for (k, s) in row_sums.iter().enumerate() {
        sys.set_diag(k, s + rng.random_range(0.5..2.0));
    }
    let rhs = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    sys.set_rhs(rhs).expect("length matches");
    sys
}

/// Textbook Thomas elimination for `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]`.
///
/// Returns `(pivots, multipliers, x)` where `multipliers[k] = upper[k] / pivots[k]`.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut piv = vec![0.0; n];
    let mut mult = vec![0.0; n.saturating_sub(1)];
    let mut y = vec![0.0; n];
    piv[0] = diag[0];
    y[0] = rhs[0] / piv[0];
    for k in 1..n {
        mult[k - 1] = upper[k - 1] / piv[k - 1];
        piv[k] = diag[k] - lower[k] * mult[k - 1];
        y[k] = (rhs[k] - lower[k] * y[k - 1]) / piv[k];
    }
    let mut x = y;
    for k in (0..n - 1).rev() {
        x[k] -= mult[k] * x[k + 1];
    }
    (piv, mult, x)
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn banded_vs_dense(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let n = rng.random_range(5..200);
        let r = rng.random_range(1..=8);
        let sys = random_spd_banded(rng, n, r);
        let fast = solve_banded(&sys)?;
        let dense = dense_solve_oracle(&sys)?;
        let scale = dense.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let err = fast.iter().zip(&dense).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst = worst.max(err / scale);
    }
    Ok(check("banded solve matches dense elimination", worst <= 1e-8, format!("max relative error {worst:.2e}")))
}

fn thomas_reduction(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(2..100);
        let sys = random_spd_banded(rng, n, 1);
        let f = rband_lu_factorize(&sys)?;
        let lower: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { sys.lower(k - 1, 1) }).collect();
        let upper: Vec<f64> = (0..n - 1).map(|k| sys.upper(k, 1)).collect();
        let (piv, mult, _) = thomas(&lower, sys.diag(), &upper, sys.rhs());
        for k in 0..n {
            worst = worst.max((f.alpha()[k] - piv[k]).abs());
            if k + 1 < n {
                worst = worst.max((f.beta(k, 1) - mult[k]).abs());
                worst = worst.max((f.gamma(k, 1) - lower[k + 1]).abs());
            }
        }
    }
    Ok(check("r=1 factors match Thomas elimination", worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn constant_invariance(rng: &mut ChaCha8Rng) -> Result<Check> {
    let guide = synth::step_scene(40, 30, 0.05, 5)?;
    let mut worst: f64 = 0.0;
    for cfg in [SmoothConfig::default(), SmoothConfig { r: 3, tau: 2, weight: WeightParams::exp(3.0, 10.0), ..SmoothConfig::default() }] {
        let c = rng.random_range(-5.0..5.0);
        let img = Image::filled(40, 30, 1, c)?;
        worst = worst.max(smooth(&img, &guide, &cfg)?.max_abs_diff(&img));
    }
    Ok(check("constant images are preserved", worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn row_exactness() -> Result<Check> {
    let img = synth::uniform(64, 1, 11)?;
    let cfg = SmoothConfig {
        r: 2,
        iterations: 1,
        first_axis: Axis::Row,
        weight: WeightParams::exp(2.0, 30.0),
        lambda: 30.0,
        ..SmoothConfig::default()
    };
    let out = smooth(&img, &img, &cfg)?;
    let sys = assemble_full(&img, cfg.lambda, cfg.r, &cfg.weight)?;
    let exact = conjugate_gradient(&sys, img.data())?.solution;
    let scale = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let err = out.data().iter().zip(&exact).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale;
    Ok(check("single-row pass equals exact WLS", err <= 1e-8, format!("relative error {err:.2e}")))
}

fn codec_round_trip() -> Result<Check> {
    // PFM stores f32 samples.
    let img = synth::uniform(7, 5, 2)?.map(|v| v as f32 as f64)?;
    let exact = decode(&encode(&img, Format::Pfm)?)? == img;
    let ldr = decode(&encode(&img, Format::Pgm)?)?;
    let err = ldr.max_abs_diff(&img);
    Ok(check(
        "image codecs round-trip",
        exact && err <= 1.0 / 510.0 + 1e-12,
        format!("pfm exact: {exact}, pgm max error {err:.2e}"),
    ))
}

/// Runs every check; a check that errors counts as failed.
pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let named: [(&'static str, Result<Check>); 5] = [
        ("banded", banded_vs_dense(&mut rng)),
        ("thomas", thomas_reduction(&mut rng)),
        ("constant", constant_invariance(&mut rng)),
        ("row", row_exactness()),
        ("codec", codec_round_trip()),
    ];
    for (name, res) in named {
        out.push(res.unwrap_or_else(|e| check(name, false, e.to_string())));
    }
    out
}
