use colorcurve::curve::{fit_curve, outlier_mask};
use colorcurve::matcher::{
    conformity_mask, covered_length, detect, recognize, vote_histogram, CoverageRule,
    DetectionParams, RecognitionParams,
};
use colorcurve::quantize::quantize;
use colorcurve::synth::{curve_exemplar, rng, two_material_scene, ReferenceCurve};
use colorcurve::{CurveModel, QuantizeMethod, RasterImage, RgbPoint};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::sync::OnceLock;

fn browning_model() -> &'static (RasterImage, CurveModel) {
    static MODEL: OnceLock<(RasterImage, CurveModel)> = OnceLock::new();
    MODEL.get_or_init(|| {
        let img = curve_exemplar(&ReferenceCurve::browning(), 128, 128, 3.0, 7);
        let palette = quantize(&img, QuantizeMethod::MinimumVariance, 256).unwrap();
        let model = fit_curve(&palette).unwrap();
        (img, model)
    })
}

/// Exemplar-like probe with enough noise that only part of it conforms.
fn probe(seed: u64) -> RasterImage {
    let sigma = 4.0 + 3.0 * (seed % 5) as f64;
    curve_exemplar(&ReferenceCurve::browning(), 64, 64, sigma, 1000 + seed)
}

/// Pixels drawn near model samples with indices in `range`, with small noise.
fn arc_probe(
    model: &CurveModel,
    range: std::ops::Range<usize>,
    n: usize,
    seed: u64,
) -> RasterImage {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let pixels = (0..n)
        .map(|_| {
            let s = model.samples()[r.random_range(range.clone())];
            RgbPoint::new(
                s.r + noise.sample(&mut r),
                s.g + noise.sample(&mut r),
                s.b + noise.sample(&mut r),
            )
            .clamped()
        })
        .collect();
    RasterImage::new(n / 100, 100, pixels).unwrap()
}

#[test]
fn exemplars_detect_themselves() {
    for seed in 0..4 {
        let curve = if seed == 0 {
            ReferenceCurve::browning()
        } else {
            ReferenceCurve::random(seed, 30.0)
        };
        let img = curve_exemplar(&curve, 128, 128, 3.0, seed);
        let model =
            fit_curve(&quantize(&img, QuantizeMethod::MinimumVariance, 256).unwrap()).unwrap();
        let result = detect(&img, &model, &DetectionParams::default()).unwrap();
        let conforming = result.conformity_mask.count();
        let best = result.accepted().map(|r| r.len()).max().unwrap_or(0);
        assert!(
            best as f64 >= 0.9 * conforming as f64,
            "seed {seed}: {best} of {conforming}"
        );

        let outliers = outlier_mask(&img, &model, 25.0);
        let inliers = img.len() - outliers.mask.count();
        assert!(conforming as f64 >= 0.95 * inliers as f64);
    }
}

#[test]
fn two_material_scene_segments_the_model_half() {
    let (_, model) = browning_model();
    let (scene, truth) = two_material_scene(&ReferenceCurve::browning(), 192, 160, 60.0, 3.0, 9);
    let found = detect(&scene, model, &DetectionParams::default())
        .unwrap()
        .accepted_mask();
    let both = found
        .bits()
        .iter()
        .zip(truth.bits())
        .filter(|(a, b)| **a && **b)
        .count();
    let either = found
        .bits()
        .iter()
        .zip(truth.bits())
        .filter(|(a, b)| **a || **b)
        .count();
    let iou = both as f64 / either as f64;
    assert!(iou >= 0.9, "IoU {iou}");
}

#[test]
fn conformity_grows_with_distance_threshold() {
    let (_, model) = browning_model();
    for seed in 0..20 {
        let img = probe(seed);
        let masks: Vec<_> = [15.0, 25.0, 40.0]
            .iter()
            .map(|d| conformity_mask(&img, model, *d))
            .collect();
        for pair in masks.windows(2) {
            assert!(
                pair[0]
                    .bits()
                    .iter()
                    .zip(pair[1].bits())
                    .all(|(a, b)| !a || *b),
                "seed {seed}"
            );
        }
    }
}

#[test]
fn coverage_shrinks_with_vote_threshold() {
    let (_, model) = browning_model();
    for seed in 0..20 {
        let img = probe(seed);
        let coverage = |l_s: u32| -> Vec<f64> {
            let params = DetectionParams {
                l_s,
                ..DetectionParams::default()
            };
            detect(&img, model, &params)
                .unwrap()
                .regions
                .iter()
                .map(|r| r.coverage_length)
                .collect()
        };
        let (a, b, c) = (coverage(5), coverage(10), coverage(20));
        for i in 0..a.len() {
            assert!(a[i] >= b[i] && b[i] >= c[i], "seed {seed} region {i}");
        }
    }
}

#[test]
fn accepted_set_shrinks_with_coverage_threshold() {
    let (_, model) = browning_model();
    for seed in 0..20 {
        let img = probe(seed);
        let accepted = |l_t: f64| -> Vec<bool> {
            let params = DetectionParams {
                l_t,
                ..DetectionParams::default()
            };
            detect(&img, model, &params)
                .unwrap()
                .regions
                .iter()
                .map(|r| r.accepted)
                .collect()
        };
        let (a, b, c) = (accepted(100.0), accepted(150.0), accepted(220.0));
        for i in 0..a.len() {
            assert!((!b[i] || a[i]) && (!c[i] || b[i]), "seed {seed} region {i}");
        }
    }
}

#[test]
fn acceptance_ignores_scan_order() {
    let (img, model) = browning_model();
    let result = detect(img, model, &DetectionParams::default()).unwrap();
    let mut r = rng(5);
    for region in &result.regions {
        let mut nearest: Vec<usize> = region
            .pixels
            .iter()
            .map(|&(x, y)| model.distance(img.get(x, y)).nearest_sample_index)
            .collect();
        nearest.shuffle(&mut r);
        let len = covered_length(
            &vote_histogram(nearest, model.samples().len()),
            model,
            10,
            CoverageRule::BothEndpoints,
        );
        assert_eq!(len, region.coverage_length);
    }

    // a transposed image visits the same pixels in a different order
    let (w, h) = (img.width(), img.height());
    let transposed =
        RasterImage::new(h, w, (0..w * h).map(|i| img.get(i / h, i % h)).collect()).unwrap();
    let other = detect(&transposed, model, &DetectionParams::default()).unwrap();
    let summary = |d: &colorcurve::matcher::DetectionResult| {
        let mut v: Vec<(usize, bool)> = d.regions.iter().map(|r| (r.len(), r.accepted)).collect();
        v.sort();
        v
    };
    assert_eq!(summary(&result), summary(&other));
}

#[test]
fn score_stays_within_arc_length() {
    let (_, model) = browning_model();
    let params = RecognitionParams {
        coverage_rule: CoverageRule::EitherEndpoint,
        ..RecognitionParams::default()
    };
    for seed in 0..10 {
        let s = recognize(&probe(seed), model, &params).unwrap();
        assert!(s.score >= 0.0 && s.score <= model.arc_length() + 1e-9);
    }
}

#[test]
fn recognition_orders_full_arc_above_partial_arc() {
    let (_, model) = browning_model();
    let params = RecognitionParams::default();
    let n = model.samples().len();
    let full = recognize(&arc_probe(model, 0..n, 20_000, 1), model, &params).unwrap();
    let part = recognize(&arc_probe(model, 0..n / 4, 20_000, 2), model, &params).unwrap();
    assert_eq!(full.conforming_pixels, part.conforming_pixels);
    assert!(full.score > part.score, "{} vs {}", full.score, part.score);

    let far = RasterImage::filled(50, 50, RgbPoint::new(0.0, 0.0, 255.0)).unwrap();
    assert_eq!(recognize(&far, model, &params).unwrap().score, 0.0);
}

#[test]
fn crops_never_score_higher() {
    let (_, model) = browning_model();
    let params = RecognitionParams::default();
    let mut r = rng(17);
    for seed in 0..10 {
        let img = curve_exemplar(
            &ReferenceCurve::browning(),
            128,
            128,
            3.0 + seed as f64,
            50 + seed,
        );
        let full = recognize(&img, model, &params).unwrap();
        let (w, h) = (r.random_range(16..=128), r.random_range(16..=128));
        let (x0, y0) = (r.random_range(0..=128 - w), r.random_range(0..=128 - h));
        let crop = recognize(&img.crop(x0, y0, w, h).unwrap(), model, &params).unwrap();
        assert!(
            crop.score <= full.score,
            "seed {seed}: {} > {}",
            crop.score,
            full.score
        );
    }
}

#[test]
fn self_recognition_matches_covered_length() {
    let (img, model) = browning_model();
    let score = recognize(img, model, &RecognitionParams::default()).unwrap();
    let nearest = model
        .distances(img.pixels())
        .into_iter()
        .filter(|d| d.distance < 25.0)
        .map(|d| d.nearest_sample_index);
    let own = covered_length(
        &vote_histogram(nearest, model.samples().len()),
        model,
        10,
        CoverageRule::BothEndpoints,
    );
    assert!(
        (score.score - own).abs() <= 0.1 * own,
        "{} vs {own}",
        score.score
    );
}
