use colorcurve::quantize::{error_histogram, quantize, QuantizeMethod};
use colorcurve::spectral::planarity_measure;
use colorcurve::synth::{curve_exemplar, near_planar_image, ReferenceCurve};
use colorcurve::{RasterImage, RgbPoint};

/// Two linear blends: the top half ramps `a → b`, the bottom half `c → d`.
/// The blend parameter advances per pixel in scan order, so every pixel of a
/// half has a distinct color on its segment.
fn two_ramp(size: usize) -> RasterImage {
    let (a, b) = (
        RgbPoint::new(230.0, 190.0, 120.0),
        RgbPoint::new(60.0, 40.0, 20.0),
    );
    let (c, d) = (
        RgbPoint::new(20.0, 120.0, 200.0),
        RgbPoint::new(210.0, 240.0, 90.0),
    );
    let half = size * size / 2;
    let px = (0..size * size)
        .map(|i| {
            let t = (i % half) as f64 / (half - 1) as f64;
            if i < half {
                a * (1.0 - t) + b * t
            } else {
                c * (1.0 - t) + d * t
            }
        })
        .collect();
    RasterImage::new(size, size, px).unwrap()
}

/// Exhaustive per-pixel error, computed without the histogram code.
fn mean_error(img: &RasterImage, method: QuantizeMethod) -> f64 {
    let pal = quantize(img, method, 256).unwrap();
    img.pixels()
        .iter()
        .zip(pal.assignment())
        .map(|(p, a)| p.distance(pal.colors()[*a as usize]))
        .sum::<f64>()
        / img.len() as f64
}

#[test]
fn two_ramp_reconstruction_error() {
    let img = two_ramp(256);
    for m in QuantizeMethod::ALL {
        let e = mean_error(&img, m);
        assert!(e <= 2.0, "{m}: mean error {e}");
    }
}

#[test]
fn textured_material_mostly_within_ten_units() {
    let imgs = [
        curve_exemplar(&ReferenceCurve::browning(), 160, 160, 3.0, 11),
        near_planar_image(160, 160, 6.0, 2.0, 12),
    ];
    for img in &imgs {
        let pal = quantize(img, QuantizeMethod::MinimumVariance, 256).unwrap();
        let h = error_histogram(img, &pal).unwrap();
        assert!(h.fraction_below(10.0) >= 0.9, "{}", h.fraction_below(10.0));
    }
}

#[test]
fn planarity_is_similar_across_methods() {
    let img = curve_exemplar(&ReferenceCurve::browning(), 160, 160, 3.0, 5);
    let v2: Vec<f64> = QuantizeMethod::ALL
        .iter()
        .map(|m| {
            planarity_measure(quantize(&img, *m, 256).unwrap().colors())
                .unwrap()
                .v2
        })
        .collect();
    for a in &v2 {
        for b in &v2 {
            assert!((a - b).abs() <= 1.0, "{v2:?}");
        }
    }
}

#[test]
fn quantization_is_deterministic() {
    let img = near_planar_image(96, 96, 6.0, 2.0, 3);
    for m in QuantizeMethod::ALL {
        assert_eq!(
            quantize(&img, m, 64).unwrap(),
            quantize(&img, m, 64).unwrap()
        );
    }
}
