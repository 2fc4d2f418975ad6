//! Effective run parameters: command-line flags, then the config file, then
//! built-in defaults.

use crate::cli::{CommonArgs, ReportFormat};
use crate::error::{CliError, CliResult};
use colorcurve::curve::{CurveConfig, DEFAULT_DISTANCE_THRESHOLD, DEFAULT_EXTRAPOLATION};
use colorcurve::matcher::{
    CoverageRule, DetectionParams, RecognitionParams, DEFAULT_KAPPA, DEFAULT_MIN_COVERAGE,
    DEFAULT_MIN_REGION_PIXELS, DEFAULT_MIN_VOTES,
};
use colorcurve::quantize::DEFAULT_PALETTE_SIZE;
use colorcurve::shading::ShadingThresholds;
use colorcurve::QuantizeMethod;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Contents of a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub out_dir: Option<PathBuf>,
    pub report_format: Option<ReportFormat>,
    pub method: Option<String>,
    pub palette_size: Option<usize>,
    pub dt: Option<f64>,
    pub ls: Option<u32>,
    pub lt: Option<f64>,
    pub kappa: Option<f64>,
    pub extrapolation: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub shading_min: Option<f64>,
    pub reflectance_max: Option<f64>,
    pub min_region_pixels: Option<usize>,
    pub coverage_rule: Option<CoverageRule>,
    pub weighted_fit: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub out_dir: PathBuf,
    pub report_format: ReportFormat,
    pub method: QuantizeMethod,
    pub palette_size: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub curve: CurveConfig,
    pub detection: DetectionParams,
    pub recognition: RecognitionParams,
    pub thresholds: ShadingThresholds,
}

fn check(ok: bool, what: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what()))
    }
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::merge(args, file)
    }

    pub fn merge(args: &CommonArgs, file: ConfigFile) -> CliResult<Self> {
        let method = match args.method.clone().or(file.method) {
            Some(name) => name
                .parse::<QuantizeMethod>()
                .map_err(|e| CliError::Config(e.to_string()))?,
            None => QuantizeMethod::MinimumVariance,
        };
        let palette_size = args
            .palette_size
            .or(file.palette_size)
            .unwrap_or(DEFAULT_PALETTE_SIZE);
        check((4..=65536).contains(&palette_size), || {
            format!("palette size {palette_size} outside [4, 65536]")
        })?;
        let d_t = args.dt.or(file.dt).unwrap_or(DEFAULT_DISTANCE_THRESHOLD);
        check(d_t > 0.0 && d_t.is_finite(), || {
            format!("dt {d_t} must be positive")
        })?;
        let l_s = args.ls.or(file.ls).unwrap_or(DEFAULT_MIN_VOTES);
        let l_t = args.lt.or(file.lt).unwrap_or(DEFAULT_MIN_COVERAGE);
        check(l_t >= 0.0 && !l_t.is_nan(), || {
            format!("lt {l_t} must be nonnegative")
        })?;
        let kappa = args.kappa.or(file.kappa).unwrap_or(DEFAULT_KAPPA);
        check(kappa >= 0.0 && kappa.is_finite(), || {
            format!("kappa {kappa} must be nonnegative")
        })?;
        let extrapolation = args
            .extrapolation
            .or(file.extrapolation)
            .unwrap_or(DEFAULT_EXTRAPOLATION);
        check((0.0..=1.0).contains(&extrapolation), || {
            format!("extrapolation {extrapolation} outside [0, 1]")
        })?;
        let jobs = args.jobs.or(file.jobs);
        check(jobs != Some(0), || "jobs must be at least 1".into())?;
        let coverage_rule = file.coverage_rule.unwrap_or_default();

        let defaults = ShadingThresholds::default();
        let thresholds = ShadingThresholds {
            shading_min_v1: file.shading_min.unwrap_or(defaults.shading_min_v1),
            reflectance_max_v1: file.reflectance_max.unwrap_or(defaults.reflectance_max_v1),
        };
        thresholds
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        Ok(Self {
            out_dir: args
                .out_dir
                .clone()
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            report_format: args
                .report_format
                .or(file.report_format)
                .unwrap_or(ReportFormat::Text),
            method,
            palette_size,
            seed: args.seed.or(file.seed).unwrap_or(0),
            jobs,
            curve: CurveConfig {
                extrapolation_fraction: extrapolation,
                cube_margin: d_t,
                weighted: file.weighted_fit.unwrap_or(false),
                ..CurveConfig::default()
            },
            detection: DetectionParams {
                d_t,
                l_s,
                l_t,
                min_region_pixels: file.min_region_pixels.unwrap_or(DEFAULT_MIN_REGION_PIXELS),
                coverage_rule,
            },
            recognition: RecognitionParams {
                d_t,
                kappa,
                l_s_floor: l_s,
                coverage_rule,
            },
            thresholds,
        })
    }

    /// Applies the classify-specific threshold flags.
    pub fn with_thresholds(
        mut self,
        shading_min: Option<f64>,
        reflectance_max: Option<f64>,
    ) -> CliResult<Self> {
        if let Some(v) = shading_min {
            self.thresholds.shading_min_v1 = v;
        }
        if let Some(v) = reflectance_max {
            self.thresholds.reflectance_max_v1 = v;
        }
        self.thresholds
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<ConfigFile> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = parse("dt = 30.0\nls = 12\nmethod = \"octree\"\n").unwrap();
        let args = CommonArgs {
            dt: Some(40.0),
            ..CommonArgs::default()
        };
        let s = Settings::merge(&args, file).unwrap();
        assert_eq!(s.detection.d_t, 40.0);
        assert_eq!(s.detection.l_s, 12);
        assert_eq!(s.method, QuantizeMethod::Octree);
        assert_eq!(s.detection.l_t, DEFAULT_MIN_COVERAGE);
        assert_eq!(s.palette_size, 256);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("d_t = 25.0\n").is_err());
    }

    #[test]
    fn out_of_range_values_are_config_errors() {
        for text in [
            "dt = -1.0",
            "palette-size = 1",
            "kappa = -0.5",
            "extrapolation = 3.0",
            "method = \"lloyd\"",
        ] {
            let r = Settings::merge(&CommonArgs::default(), parse(text).unwrap());
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }
}
