//! `sgwls` command-line front end.
//!
//! Every filtering subcommand starts from a preset, applies `--preset` if
//! given, then any explicit smoothing flag. The effective configuration is
//! echoed as one JSON line on stderr before work starts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sgwls::apps::{colorize, depth_upsample, detail_enhance, tone_map, Preset, ToneMapParams, ENHANCE_BOOST};
use sgwls::bench::{self, Grid};
use sgwls::image::{read_image, write_image};
use sgwls::{selftest, smooth, Axis, Image, SmoothConfig, WeightKind, WeightParams};

#[derive(Parser, Debug)]
#[command(name = "sgwls", version, about = "Semi-global weighted least squares image smoothing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Edge-preserving smoothing.
    Smooth {
        #[command(flatten)]
        opts: SmoothOpts,
        /// Guidance image; defaults to the input.
        #[arg(long)]
        guide: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Detail enhancement by boosting the residual of a smoothed base.
    Enhance {
        #[command(flatten)]
        opts: SmoothOpts,
        #[arg(long, default_value_t = ENHANCE_BOOST)]
        boost: f64,
        input: PathBuf,
        output: PathBuf,
    },
    /// Base/detail tone mapping of an HDR image.
    Tonemap {
        #[command(flatten)]
        opts: SmoothOpts,
        /// Base range in decades after compression.
        #[arg(long, default_value_t = 2.0, conflicts_with = "no_compress")]
        target_range: f64,
        /// Keep the base range; output then reconstructs the input.
        #[arg(long)]
        no_compress: bool,
        /// Weights of the three detail layers, finest first.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 1.0])]
        detail_weights: Vec<f64>,
        /// Smoothing strengths of the three levels, finest first.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        level_lambdas: Option<Vec<f64>>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Guided depth upsampling.
    Upsample {
        #[command(flatten)]
        opts: SmoothOpts,
        /// High-resolution guidance image.
        #[arg(long)]
        guide: PathBuf,
        /// Upsampling factor; inferred from the image sizes when omitted.
        #[arg(long)]
        factor: Option<usize>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Scribble-based colorization of a grey image.
    Colorize {
        #[command(flatten)]
        opts: SmoothOpts,
        /// RGB scribble image.
        #[arg(long)]
        scribbles: PathBuf,
        /// 0/1 mask of scribbled pixels; defaults to pixels whose colour differs from the grey input.
        #[arg(long)]
        mask: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Timing table as CSV (`op,M,N,r,tau,T,seconds`).
    Bench(BenchOpts),
    /// Runs the built-in oracle checks.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct SmoothOpts {
    #[arg(long, value_parser = Preset::from_name)]
    preset: Option<Preset>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    /// Directional passes.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, value_enum)]
    weights: Option<KindArg>,
    #[arg(long = "as")]
    alpha_s: Option<f64>,
    #[arg(long = "ar")]
    alpha_r: Option<f64>,
    #[arg(long = "ss")]
    sigma_s: Option<f64>,
    #[arg(long = "sr")]
    sigma_r: Option<f64>,
    #[arg(long = "eps")]
    epsilon: Option<f64>,
    #[arg(long)]
    range_scale: Option<f64>,
    #[arg(long, value_enum)]
    first_axis: Option<AxisArg>,
    /// Worker threads; 1 is the deterministic reference mode.
    #[arg(long, env = "SGWLS_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct BenchOpts {
    /// Square image sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [256])]
    size: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4])]
    r: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4])]
    tau: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [4])]
    iters: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Also time the full CG solve for sizes up to `--cg-max`.
    #[arg(long)]
    cg: bool,
    #[arg(long, default_value_t = 128)]
    cg_max: usize,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, env = "SGWLS_THREADS", default_value_t = 1)]
    threads: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum KindArg {
    Frac,
    Exp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum AxisArg {
    Column,
    Row,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

impl SmoothOpts {
    fn resolve(&self, default: Preset) -> SmoothConfig {
        let mut cfg = self.preset.unwrap_or(default).config();
        if let Some(kind) = self.weights {
            let kind = match kind {
                KindArg::Frac => WeightKind::Frac,
                KindArg::Exp => WeightKind::Exp,
            };
            if kind != cfg.weight.kind {
                cfg.weight = match kind {
                    WeightKind::Frac => WeightParams::frac(1.2, 1.2),
                    WeightKind::Exp => WeightParams::exp(4.0, 3.0),
                };
            }
        }
        let w = &mut cfg.weight;
        set(&mut w.alpha_s, self.alpha_s);
        set(&mut w.alpha_r, self.alpha_r);
        set(&mut w.sigma_s, self.sigma_s);
        set(&mut w.sigma_r, self.sigma_r);
        set(&mut w.epsilon, self.epsilon);
        set(&mut w.range_scale, self.range_scale);
        set(&mut cfg.lambda, self.lambda);
        set(&mut cfg.r, self.r);
        set(&mut cfg.tau, self.tau);
        set(&mut cfg.iterations, self.iters);
        set(&mut cfg.threads, self.threads);
        if let Some(axis) = self.first_axis {
            cfg.first_axis = match axis {
                AxisArg::Column => Axis::Column,
                AxisArg::Row => Axis::Row,
            };
        }
        cfg
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn echo(command: &str, preset: Preset, cfg: &SmoothConfig, extra: serde_json::Value) -> CliResult<()> {
    cfg.validate()?;
    let line = json!({ "command": command, "preset": preset.name(), "config": cfg, "options": extra });
    eprintln!("{line}");
    Ok(())
}

fn read(path: &Path) -> CliResult<Image> {
    Ok(read_image(path)?)
}

fn write(img: &Image, path: &Path) -> CliResult<()> {
    Ok(write_image(img, path)?)
}

/// Pixels where the scribble image departs from the grey input.
fn scribble_mask(gray: &Image, scribbles: &Image) -> CliResult<Image> {
    if !gray.same_size(scribbles) || scribbles.channels() != 3 {
        return Err("scribbles must be an RGB image of the grey input's size".into());
    }
    let data = gray
        .data()
        .iter()
        .zip(scribbles.data().chunks_exact(3))
        .map(|(g, px)| if px.iter().any(|v| (v - g).abs() > 1e-3) { 1.0 } else { 0.0 })
        .collect();
    Ok(Image::new(gray.width(), gray.height(), 1, data)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Smooth { opts, guide, input, output } => {
            let preset = opts.preset.unwrap_or(Preset::Enhance);
            let cfg = opts.resolve(Preset::Enhance);
            echo("smooth", preset, &cfg, json!({ "guide": guide }))?;
            let img = read(&input)?;
            let guidance = match &guide {
                Some(p) => read(p)?,
                None => img.clone(),
            };
            write(&smooth(&img, &guidance, &cfg)?, &output)
        }
        Command::Enhance { opts, boost, input, output } => {
            let preset = opts.preset.unwrap_or(Preset::Enhance);
            let cfg = opts.resolve(Preset::Enhance);
            echo("enhance", preset, &cfg, json!({ "boost": boost }))?;
            write(&detail_enhance(&read(&input)?, boost, &cfg)?, &output)
        }
        Command::Tonemap {
            opts,
            target_range,
            no_compress,
            detail_weights,
            level_lambdas,
            input,
            output,
        } => {
            let preset = opts.preset.unwrap_or(Preset::Tonemap);
            let cfg = opts.resolve(Preset::Tonemap);
            let mut params = ToneMapParams {
                target_range: (!no_compress).then_some(target_range),
                detail_weights: [detail_weights[0], detail_weights[1], detail_weights[2]],
                ..ToneMapParams::default()
            };
            if let Some(l) = level_lambdas {
                params.lambdas = [l[0], l[1], l[2]];
            }
            echo("tonemap", preset, &cfg, serde_json::to_value(params)?)?;
            write(&tone_map(&read(&input)?, &params, &cfg)?, &output)
        }
        Command::Upsample {
            opts,
            guide,
            factor,
            input,
            output,
        } => {
            let low = read(&input)?;
            let guidance = read(&guide)?;
            let factor = match factor {
                Some(f) => f,
                None if low.width() > 0 && guidance.width() % low.width() == 0 => guidance.width() / low.width(),
                None => return Err("cannot infer the upsampling factor; pass --factor".into()),
            };
            let default = match factor {
                2 => Preset::Upsample2x,
                8 => Preset::Upsample8x,
                _ => Preset::Upsample4x,
            };
            let preset = opts.preset.unwrap_or(default);
            let cfg = opts.resolve(default);
            echo("upsample", preset, &cfg, json!({ "factor": factor }))?;
            write(&depth_upsample(&low, &guidance, factor, &cfg)?, &output)
        }
        Command::Colorize {
            opts,
            scribbles,
            mask,
            input,
            output,
        } => {
            let preset = opts.preset.unwrap_or(Preset::Colorize);
            let cfg = opts.resolve(Preset::Colorize);
            echo("colorize", preset, &cfg, json!({ "mask": mask }))?;
            let gray = sgwls::image::luminance(&read(&input)?);
            let scribbles = read(&scribbles)?;
            let mask = match &mask {
                Some(p) => read(p)?.map(|v| if v >= 0.5 { 1.0 } else { 0.0 })?,
                None => scribble_mask(&gray, &scribbles)?,
            };
            write(&colorize(&gray, &scribbles, &mask, &cfg)?, &output)
        }
        Command::Bench(b) => {
            let mut base = SmoothConfig::default().with_threads(b.threads);
            set(&mut base.lambda, b.lambda);
            let grid = Grid {
                sizes: b.size.iter().map(|&s| (s, s)).collect(),
                radii: b.r,
                strides: b.tau,
                iterations: b.iters,
                repeats: b.repeats,
                base,
                with_cg: b.cg,
                cg_max_pixels: b.cg_max * b.cg_max,
            };
            let (records, skipped) = bench::run(&grid)?;
            for (r, tau) in skipped {
                eprintln!("skipped r={r} tau={tau}: stride exceeds the window width {}", 2 * r + 1);
            }
            let csv = bench::to_csv(&records);
            match b.out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Selftest { seed } => {
            let checks = selftest::run(seed);
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed > 0 {
                return Err(format!("{failed} self-test check(s) failed").into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
