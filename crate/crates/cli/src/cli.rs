use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "colorcurve",
    version,
    about = "Plane + cubic color models for single-process materials"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default parameters.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, env = "COLORCURVE_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub report_format: Option<ReportFormat>,
    /// Quantizer: minimum-variance, median-cut, octree or k-means.
    #[arg(long, global = true)]
    pub method: Option<String>,
    #[arg(long, global = true)]
    pub palette_size: Option<usize>,
    /// Conformity distance threshold (RGB units).
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Minimum votes for a curve sample to count as covered (strict).
    #[arg(long, global = true)]
    pub ls: Option<u32>,
    /// Minimum coverage length for an accepted region (strict).
    #[arg(long, global = true)]
    pub lt: Option<f64>,
    /// Scale of the adaptive vote threshold used by `recognize`.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Fraction of the observed u-range added on each side of the curve.
    #[arg(long, global = true)]
    pub extrapolation: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for multi-image commands (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    /// JSON document.
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce an image to a palette; writes palette.json, histogram.csv and quantized.png.
    Quantize { image: PathBuf },
    /// Fit the plane + cubic model; writes model.json, palette.json and outliers.png.
    Fit { image: PathBuf },
    /// Label each image's color variation as shading, reflectance or ambiguous.
    Classify {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[arg(long)]
        shading_min: Option<f64>,
        #[arg(long)]
        reflectance_max: Option<f64>,
    },
    /// Find regions matching a model; writes <stem>-mask.png and <stem>-overlay.png per probe.
    Detect {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Score whole probes against a model.
    Recognize {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Planarity and reconstruction error of all four quantizers on one image.
    CompareQuantizers { image: PathBuf },
    /// Write a seeded synthetic test image.
    RenderSynthetic(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SceneKind {
    /// Texture painted from the reference browning curve.
    Exemplar,
    /// Left half from the curve, right half from an offset line; also writes truth.png.
    TwoMaterial,
    /// Uniform-albedo surface under one light.
    Lambertian,
    /// Colors scattered around a random planar cubic.
    NearPlanar,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_enum, default_value = "exemplar")]
    pub kind: SceneKind,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    /// Per-channel Gaussian noise (RGB units).
    #[arg(long, default_value_t = 3.0)]
    pub sigma: f64,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "synthetic.png")]
    pub name: String,
}
