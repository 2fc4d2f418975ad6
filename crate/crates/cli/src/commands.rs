use crate::cli::{RenderArgs, ReportFormat, SceneKind};
use crate::error::{CliError, CliResult};
use crate::io::{load_image, stem, write_atomic, write_mask, write_png, LoadedImage};
use crate::settings::Settings;
use colorcurve::curve::{
    deserialize_model, fit_curve_with, outlier_mask, serialize_model, Provenance,
};
use colorcurve::matcher::{detect, recognize};
use colorcurve::overlay::{detection_overlay, render_overlay, RED};
use colorcurve::quantize::{error_histogram, quantize_with, QuantizeOptions};
use colorcurve::shading::{classify_variation_with, synthesize_lambertian, Variation};
use colorcurve::synth::{
    curve_exemplar, lambertian_scene, near_planar_image, two_material_scene, ReferenceCurve,
};
use colorcurve::{CurveModel, Palette, QuantizeMethod, RasterImage};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Threshold of the "pixels reconstructed within" statistic.
const ERROR_THRESHOLD: f64 = 10.0;

fn json_text<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

/// Writes `<command>-report.json` or `<command>-report.csv`.
fn write_report<D: Serialize + ?Sized, R: Serialize>(
    settings: &Settings,
    command: &str,
    document: &D,
    rows: &[R],
) -> CliResult<PathBuf> {
    let (ext, text) = match settings.report_format {
        ReportFormat::Text => ("json", json_text(document)?),
        ReportFormat::Csv => ("csv", csv_text(rows)?),
    };
    let path = settings.out_dir.join(format!("{command}-report.{ext}"));
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn quantize_image(
    image: &RasterImage,
    method: QuantizeMethod,
    settings: &Settings,
) -> CliResult<Palette> {
    let options = QuantizeOptions {
        palette_size: settings.palette_size,
        seed: settings.seed,
    };
    Ok(quantize_with(image, method, &options)?)
}

fn load_model(path: &Path) -> CliResult<CurveModel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::decode(path, e))?;
    deserialize_model(&text).map_err(|e| CliError::decode(path, e))
}

/// Runs `f` over the inputs on a pool of `settings.jobs` threads, keeping
/// input order in the results.
fn for_each_input<T: Send>(
    settings: &Settings,
    inputs: &[PathBuf],
    f: impl Fn(&Path) -> CliResult<T> + Sync,
) -> CliResult<Vec<T>> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| inputs.par_iter().map(|p| f(p)).collect())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct QuantizeRow {
    method: QuantizeMethod,
    colors: usize,
    v1: f64,
    v2: f64,
    mean_error: f64,
    max_error: f64,
    fraction_below_10: f64,
}

fn quantize_row(image: &RasterImage, palette: &Palette) -> CliResult<QuantizeRow> {
    let pm = colorcurve::spectral::planarity_measure(palette.colors())?;
    let hist = error_histogram(image, palette)?;
    Ok(QuantizeRow {
        method: palette.method(),
        colors: palette.len(),
        v1: pm.v1,
        v2: pm.v2,
        mean_error: hist.mean_error,
        max_error: hist.max_error,
        fraction_below_10: hist.fraction_below(ERROR_THRESHOLD),
    })
}

pub fn quantize(settings: &Settings, input: &Path) -> CliResult<()> {
    let LoadedImage { image, .. } = load_image(input)?;
    let palette = quantize_image(&image, settings.method, settings)?;
    let hist = error_histogram(&image, &palette)?;
    let dir = &settings.out_dir;
    write_atomic(
        &dir.join("palette.json"),
        json_text(&palette.to_document())?.as_bytes(),
    )?;
    write_atomic(&dir.join("histogram.csv"), hist.to_csv().as_bytes())?;
    write_png(
        &dir.join("quantized.png"),
        &palette.reconstruct(image.width(), image.height())?,
    )?;
    let row = quantize_row(&image, &palette)?;
    println!(
        "{}: {} colors, PM [{:.2}, {:.2}], mean error {:.2}, {:.1}% of pixels within {ERROR_THRESHOLD}",
        row.method,
        row.colors,
        row.v1,
        row.v2,
        row.mean_error,
        100.0 * row.fraction_below_10
    );
    write_report(settings, "quantize", &row, std::slice::from_ref(&row))?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FitRow {
    v1: f64,
    v2: f64,
    a0: f64,
    a1: f64,
    a2: f64,
    a3: f64,
    u_min: f64,
    u_max: f64,
    arc_length: f64,
    outlier_fraction: f64,
}

pub fn fit(settings: &Settings, input: &Path) -> CliResult<()> {
    let LoadedImage { image, hash } = load_image(input)?;
    let palette = quantize_image(&image, settings.method, settings)?;
    let model = fit_curve_with(&palette, &settings.curve)?.with_provenance(Provenance {
        source_hash: hash,
        quantizer: settings.method.id().to_string(),
        palette_size: palette.len(),
    });
    let outliers = outlier_mask(&image, &model, settings.detection.d_t);
    let dir = &settings.out_dir;
    write_atomic(&dir.join("model.json"), serialize_model(&model).as_bytes())?;
    write_atomic(
        &dir.join("palette.json"),
        json_text(&palette.to_document())?.as_bytes(),
    )?;
    write_png(
        &dir.join("outliers.png"),
        &render_overlay(&image, &outliers.mask, RED)?,
    )?;

    let pm = model.planarity();
    let [a0, a1, a2, a3] = model.coefficients();
    let [u_min, u_max] = model.u_domain();
    let row = FitRow {
        v1: pm.v1,
        v2: pm.v2,
        a0,
        a1,
        a2,
        a3,
        u_min,
        u_max,
        arc_length: model.arc_length(),
        outlier_fraction: outliers.outlier_fraction,
    };
    println!(
        "model: PM {pm}, arc length {:.1}, {:.2}% outliers at dt = {}",
        row.arc_length,
        100.0 * row.outlier_fraction,
        settings.detection.d_t
    );
    write_report(settings, "fit", &row, std::slice::from_ref(&row))?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClassifyRow {
    image: String,
    label: Variation,
    v1: f64,
    v2: f64,
    line_residual: f64,
    shading_min_v1: f64,
    reflectance_max_v1: f64,
}

pub fn classify(settings: &Settings, inputs: &[PathBuf]) -> CliResult<()> {
    let rows = for_each_input(settings, inputs, |path| {
        let image = load_image(path)?.image;
        let palette = quantize_image(&image, settings.method, settings)?;
        let label = classify_variation_with(palette.colors(), &settings.thresholds)?;
        Ok(ClassifyRow {
            image: path.display().to_string(),
            label: label.label,
            v1: label.pm.v1,
            v2: label.pm.v2,
            line_residual: label.line_residual,
            shading_min_v1: settings.thresholds.shading_min_v1,
            reflectance_max_v1: settings.thresholds.reflectance_max_v1,
        })
    })?;
    for r in &rows {
        println!(
            "{}: {:?} (v1 = {:.2}, v2 = {:.2})",
            r.image, r.label, r.v1, r.v2
        );
    }
    write_report(settings, "classify", &rows, &rows)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RegionRow {
    image: String,
    region: usize,
    pixels: usize,
    coverage_length: f64,
    accepted: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RegionEntry {
    pixels: usize,
    coverage_length: f64,
    accepted: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProbeDetection {
    image: String,
    conforming_pixels: usize,
    accepted_pixels: usize,
    regions: Vec<RegionEntry>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DetectReport {
    d_t: f64,
    l_s: u32,
    l_t: f64,
    probes: Vec<ProbeDetection>,
}

pub fn detect_probes(settings: &Settings, model_path: &Path, inputs: &[PathBuf]) -> CliResult<()> {
    let model = load_model(model_path)?;
    let params = settings.detection;
    let probes = for_each_input(settings, inputs, |path| {
        let image = load_image(path)?.image;
        let result = detect(&image, &model, &params)?;
        let accepted = result.accepted_mask();
        let name = stem(path);
        write_mask(
            &settings.out_dir.join(format!("{name}-mask.png")),
            &accepted,
        )?;
        let overlay = detection_overlay(&image, &result.conformity_mask, &accepted)?;
        write_png(
            &settings.out_dir.join(format!("{name}-overlay.png")),
            &overlay,
        )?;
        Ok(ProbeDetection {
            image: path.display().to_string(),
            conforming_pixels: result.conformity_mask.count(),
            accepted_pixels: accepted.count(),
            regions: result
                .regions
                .iter()
                .map(|r| RegionEntry {
                    pixels: r.len(),
                    coverage_length: r.coverage_length,
                    accepted: r.accepted,
                })
                .collect(),
        })
    })?;
    for p in &probes {
        let n = p.regions.iter().filter(|r| r.accepted).count();
        println!(
            "{}: {n} of {} regions accepted, {} pixels",
            p.image,
            p.regions.len(),
            p.accepted_pixels
        );
    }
    let rows: Vec<RegionRow> = probes
        .iter()
        .flat_map(|p| {
            p.regions.iter().enumerate().map(|(i, r)| RegionRow {
                image: p.image.clone(),
                region: i,
                pixels: r.pixels,
                coverage_length: r.coverage_length,
                accepted: r.accepted,
            })
        })
        .collect();
    let report = DetectReport {
        d_t: params.d_t,
        l_s: params.l_s,
        l_t: params.l_t,
        probes,
    };
    write_report(settings, "detect", &report, &rows)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RecognizeRow {
    image: String,
    score: f64,
    adaptive_ls: u32,
    conforming_pixels: usize,
    arc_length: f64,
}

pub fn recognize_probes(
    settings: &Settings,
    model_path: &Path,
    inputs: &[PathBuf],
) -> CliResult<()> {
    let model = load_model(model_path)?;
    let rows = for_each_input(settings, inputs, |path| {
        let image = load_image(path)?.image;
        let s = recognize(&image, &model, &settings.recognition)?;
        Ok(RecognizeRow {
            image: path.display().to_string(),
            score: s.score,
            adaptive_ls: s.adaptive_ls,
            conforming_pixels: s.conforming_pixels,
            arc_length: model.arc_length(),
        })
    })?;
    for r in &rows {
        println!(
            "{}: score {:.1} of {:.1} (ls = {})",
            r.image, r.score, r.arc_length, r.adaptive_ls
        );
    }
    write_report(settings, "recognize", &rows, &rows)?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CompareReport {
    methods: Vec<QuantizeRow>,
    max_delta_v1: f64,
    max_delta_v2: f64,
}

fn max_pairwise_delta(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    hi - lo
}

pub fn compare_quantizers(settings: &Settings, input: &Path) -> CliResult<()> {
    let image = load_image(input)?.image;
    let methods = QuantizeMethod::ALL
        .par_iter()
        .map(|m| {
            let palette = quantize_image(&image, *m, settings)?;
            quantize_row(&image, &palette)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let v1: Vec<f64> = methods.iter().map(|r| r.v1).collect();
    let v2: Vec<f64> = methods.iter().map(|r| r.v2).collect();
    let report = CompareReport {
        max_delta_v1: max_pairwise_delta(&v1),
        max_delta_v2: max_pairwise_delta(&v2),
        methods,
    };
    for r in &report.methods {
        println!(
            "{:<17} PM [{:.2}, {:.2}]  mean error {:.2}",
            r.method.id(),
            r.v1,
            r.v2,
            r.mean_error
        );
    }
    println!("max pairwise |dv2| = {:.3}", report.max_delta_v2);
    write_report(settings, "compare", &report, &report.methods)?;
    Ok(())
}

pub fn render_synthetic(settings: &Settings, args: &RenderArgs) -> CliResult<()> {
    if args.width == 0 || args.height == 0 {
        return Err(CliError::Config("width and height must be positive".into()));
    }
    if !(args.sigma >= 0.0 && args.sigma.is_finite()) {
        return Err(CliError::Config(format!(
            "sigma {} must be nonnegative",
            args.sigma
        )));
    }
    let (w, h, seed) = (args.width, args.height, settings.seed);
    let curve = ReferenceCurve::browning();
    let image = match args.kind {
        SceneKind::Exemplar => curve_exemplar(&curve, w, h, args.sigma, seed),
        SceneKind::TwoMaterial => {
            let (image, truth) = two_material_scene(&curve, w, h, 60.0, args.sigma, seed);
            write_mask(&settings.out_dir.join("truth.png"), &truth)?;
            image
        }
        SceneKind::Lambertian => {
            synthesize_lambertian(&lambertian_scene(w, h, [0.9, 0.6, 0.3], 0.9, seed))?
        }
        SceneKind::NearPlanar => near_planar_image(w, h, 4.0, 1.0, seed),
    };
    let path = settings.out_dir.join(&args.name);
    write_png(&path, &image)?;
    println!("wrote {}", path.display());
    Ok(())
}
