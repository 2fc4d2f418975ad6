use colorcurve::synth::{near_planar_image, ReferenceCurve};
use colorcurve::RasterImage;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_colorcurve"));
    c.env_remove("COLORCURVE_OUT_DIR").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out-dir").arg(out).output().unwrap()
}

fn save(image: &RasterImage, path: &Path) {
    image::save_buffer(
        path,
        &image.to_rgb8(),
        image.width() as u32,
        image.height() as u32,
        image::ColorType::Rgb8,
    )
    .unwrap();
}

fn exemplar(dir: &Path) -> PathBuf {
    let path = dir.join("exemplar.png");
    save(
        &colorcurve::synth::curve_exemplar(&ReferenceCurve::browning(), 160, 160, 3.0, 1),
        &path,
    );
    path
}

fn report(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn fit_then_detect_finds_the_exemplar() {
    let dir = tempfile::tempdir().unwrap();
    let img = exemplar(dir.path());
    let out = dir.path().join("out");
    let fit = run(&["fit", img.to_str().unwrap()], &out);
    assert!(
        fit.status.success(),
        "{}",
        String::from_utf8_lossy(&fit.stderr)
    );
    for name in [
        "model.json",
        "palette.json",
        "outliers.png",
        "fit-report.json",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let model = out.join("model.json");
    let det = run(
        &[
            "detect",
            "--model",
            model.to_str().unwrap(),
            img.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(det.status.code(), Some(0));
    let mask = image::open(out.join("exemplar-mask.png"))
        .unwrap()
        .to_luma8();
    assert!(mask.pixels().any(|p| p.0[0] == 255));
    assert!(out.join("exemplar-overlay.png").is_file());
    assert!(
        report(&out, "detect-report.json")["probes"][0]["acceptedPixels"]
            .as_u64()
            .unwrap()
            > 0
    );

    // an unreachable coverage threshold is a valid, empty result
    let none = run(
        &[
            "detect",
            "--model",
            model.to_str().unwrap(),
            "--lt",
            "1e9",
            img.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(none.status.code(), Some(0));
    assert_eq!(
        report(&out, "detect-report.json")["probes"][0]["acceptedPixels"],
        0
    );
}

#[test]
fn compare_quantizers_reports_four_methods() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("planar.png");
    save(&near_planar_image(128, 128, 4.0, 1.0, 2), &img);
    let out = run(&["compare-quantizers", img.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let r = report(dir.path(), "compare-report.json");
    assert_eq!(r["methods"].as_array().unwrap().len(), 4);
    assert!(r["maxDeltaV2"].as_f64().unwrap() <= 1.0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("max pairwise"));
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let img = exemplar(dir.path());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "d_t = 25\n").unwrap();
    let c = run(
        &[
            "fit",
            img.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(c.status.code(), Some(2));
    assert_eq!(
        run(&["fit", img.to_str().unwrap(), "--dt", "-3"], &out)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["fit", img.to_str().unwrap(), "--method", "lloyd"], &out)
            .status
            .code(),
        Some(2)
    );

    let junk = dir.path().join("junk.png");
    std::fs::write(&junk, b"definitely not a png").unwrap();
    assert_eq!(
        run(&["fit", junk.to_str().unwrap()], &out).status.code(),
        Some(3)
    );
    let bad_model = dir.path().join("model.json");
    std::fs::write(&bad_model, "{\"version\": 1}").unwrap();
    let d = run(
        &[
            "detect",
            "--model",
            bad_model.to_str().unwrap(),
            img.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(d.status.code(), Some(3));

    let flat = dir.path().join("flat.png");
    save(
        &RasterImage::filled(32, 32, colorcurve::RgbPoint::splat(90.0)).unwrap(),
        &flat,
    );
    let f = run(&["fit", flat.to_str().unwrap()], &out);
    assert_eq!(f.status.code(), Some(4));
    assert!(!f.stderr.is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let img = exemplar(dir.path());
    let out = dir.path().join("out");
    assert!(run(&["fit", img.to_str().unwrap()], &out).status.success());
    let model = out.join("model.json");
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "lt = 1e9\nreport-format = \"text\"\n").unwrap();
    let base = [
        "detect",
        "--model",
        model.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        img.to_str().unwrap(),
    ];

    assert!(run(&base, &out).status.success());
    assert_eq!(report(&out, "detect-report.json")["lT"], 1e9);
    let mut with_flag = base.to_vec();
    with_flag.extend(["--lt", "100"]);
    assert!(run(&with_flag, &out).status.success());
    assert_eq!(report(&out, "detect-report.json")["lT"], 100.0);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let img = exemplar(dir.path());
    let target = dir.path().join("env-out");
    let status = bin()
        .args(["classify", img.to_str().unwrap(), "--report-format", "csv"])
        .env("COLORCURVE_OUT_DIR", &target)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(target.join("classify-report.csv")).unwrap();
    assert!(csv.starts_with("image,label,v1,v2,lineResidual"));
    // nothing but finished artifacts in the output directory
    let names: Vec<String> = std::fs::read_dir(&target)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["classify-report.csv".to_string()]);
}

#[test]
fn jpeg_and_multiple_probes() {
    let dir = tempfile::tempdir().unwrap();
    let png = exemplar(dir.path());
    let jpg = dir.path().join("probe.jpg");
    image::open(&png).unwrap().save(&jpg).unwrap();
    let out = dir.path().join("out");
    assert!(run(&["fit", png.to_str().unwrap()], &out).status.success());
    let model = out.join("model.json");
    let r = run(
        &[
            "recognize",
            "--jobs",
            "2",
            "--model",
            model.to_str().unwrap(),
            png.to_str().unwrap(),
            jpg.to_str().unwrap(),
        ],
        &out,
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let rows = report(&out, "recognize-report.json");
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[1]["score"].as_f64().unwrap() > 0.0);
}

#[test]
fn render_synthetic_writes_truth_for_two_material() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "render-synthetic",
            "--kind",
            "two-material",
            "--width",
            "64",
            "--height",
            "48",
            "--name",
            "scene.png",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let scene = image::open(dir.path().join("scene.png")).unwrap();
    assert_eq!((scene.width(), scene.height()), (64, 48));
    assert!(dir.path().join("truth.png").is_file());
}
