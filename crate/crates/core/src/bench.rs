//! Timing harness.
//!
//! Records are emitted as CSV with the header `op,M,N,r,tau,T,seconds`,
//! where `op` is `sgwls` or `wls_cg`, `M` is the height and `N` the width.
//! Each timing is the minimum over a number of repeats.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::reference::{assemble_full, solve_full};
use crate::sgwls::{smooth, SmoothConfig};
use crate::synth;

pub const CSV_HEADER: &str = "op,M,N,r,tau,T,seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Sgwls,
    WlsCg,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Sgwls => "sgwls",
            Op::WlsCg => "wls_cg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub op: Op,
    pub height: usize,
    pub width: usize,
    pub r: usize,
    pub tau: usize,
    pub iterations: usize,
    pub seconds: f64,
}

impl Record {
    pub fn pixels(&self) -> usize {
        self.height * self.width
    }
}

/// Benchmark grid. `cg_max_pixels` limits which sizes also time the CG reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub sizes: Vec<(usize, usize)>,
    pub radii: Vec<usize>,
    pub strides: Vec<usize>,
    pub iterations: Vec<usize>,
    pub repeats: usize,
    pub base: SmoothConfig,
    pub with_cg: bool,
    pub cg_max_pixels: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            sizes: vec![(256, 256)],
            radii: vec![1, 2, 4],
            strides: vec![1, 2, 4],
            iterations: vec![4],
            repeats: 3,
            base: SmoothConfig::default(),
            with_cg: false,
            cg_max_pixels: 128 * 128,
        }
    }
}

/// Minimum wall time of `repeats` runs of `f`.
pub fn min_time<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        std::hint::black_box(f()?);
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(best)
}

/// Times SG-WLS on `img` guided by itself.
pub fn time_sgwls(img: &Image, cfg: &SmoothConfig, repeats: usize) -> Result<f64> {
    min_time(repeats, || smooth(img, img, cfg))
}

/// Times assembly plus CG solve of the full system.
pub fn time_wls_cg(img: &Image, cfg: &SmoothConfig, repeats: usize) -> Result<f64> {
    min_time(repeats, || {
        let sys = assemble_full(img, cfg.lambda, cfg.r, &cfg.weight)?;
        solve_full(&sys, img)
    })
}

/// Runs the grid. Returns the records and the skipped `(r, tau)` pairs
/// (stride larger than the window).
pub fn run(grid: &Grid) -> Result<(Vec<Record>, Vec<(usize, usize)>)> {
    if grid.sizes.is_empty() || grid.radii.is_empty() || grid.strides.is_empty() || grid.iterations.is_empty() {
        return Err(Error::invalid("benchmark grid has an empty axis"));
    }
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &(h, w) in &grid.sizes {
        let img = synth::step_scene(w, h, 0.05, 1)?;
        for &r in &grid.radii {
            for &tau in &grid.strides {
                if tau > 2 * r + 1 {
                    if !skipped.contains(&(r, tau)) {
                        skipped.push((r, tau));
                    }
                    continue;
                }
                for &t in &grid.iterations {
                    let cfg = SmoothConfig {
                        r,
                        tau,
                        iterations: t,
                        ..grid.base
                    };
                    cfg.validate()?;
                    records.push(Record {
                        op: Op::Sgwls,
                        height: h,
                        width: w,
                        r,
                        tau,
                        iterations: t,
                        seconds: time_sgwls(&img, &cfg, grid.repeats)?,
                    });
                }
            }
            if grid.with_cg && w * h <= grid.cg_max_pixels {
                let cfg = SmoothConfig { r, ..grid.base };
                records.push(Record {
                    op: Op::WlsCg,
                    height: h,
                    width: w,
                    r,
                    tau: 0,
                    iterations: 0,
                    seconds: time_wls_cg(&img, &cfg, 1)?,
                });
            }
        }
    }
    Ok((records, skipped))
}

pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6}",
            r.op.as_str(),
            r.height,
            r.width,
            r.r,
            r.tau,
            r.iterations,
            r.seconds
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::invalid(format!("unexpected CSV header {other:?}"))),
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 7 {
                return Err(Error::invalid(format!("bad CSV row {line:?}")));
            }
            let op = match f[0] {
                "sgwls" => Op::Sgwls,
                "wls_cg" => Op::WlsCg,
                other => return Err(Error::invalid(format!("unknown op {other:?}"))),
            };
            let int = |s: &str| s.parse::<usize>().map_err(|e| Error::invalid(format!("{s:?}: {e}")));
            Ok(Record {
                op,
                height: int(f[1])?,
                width: int(f[2])?,
                r: int(f[3])?,
                tau: int(f[4])?,
                iterations: int(f[5])?,
                seconds: f[6].parse().map_err(|e| Error::invalid(format!("{:?}: {e}", f[6])))?,
            })
        })
        .collect()
}

/// Least-squares fit of `y = c x` and its coefficient of determination.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let c = sxy / sxx;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    (c, 1.0 - ss_res / ss_tot)
}
