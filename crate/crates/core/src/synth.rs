//! Seeded synthetic scenes with known ground truth: Lambertian renders,
//! exemplars painted from a reference cubic, two-material probes and
//! near-planar textures. Used by the test suites and `render-synthetic`.

use crate::color::RgbPoint;
use crate::error::Result;
use crate::image::{Mask, RasterImage};
use crate::shading::LambertianScene;
use crate::spectral::PlaneFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth scalar field in `[0, 1]` built from a few random sinusoids, then
/// rank-equalized so its values are spread uniformly over the interval.
pub fn smooth_field(width: usize, height: usize, rng: &mut impl Rng) -> Vec<f64> {
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let angle = rng.random_range(0.0..PI);
            let freq = rng.random_range(0.5..2.0) * 2.0 * PI / width.max(height) as f64;
            (
                angle.cos() * freq,
                angle.sin() * freq,
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.5..1.0),
            )
        })
        .collect();
    let raw: Vec<f64> = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            waves
                .iter()
                .map(|(fx, fy, ph, amp)| amp * (fx * x + fy * y + ph).sin())
                .sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
    let last = (raw.len().max(2) - 1) as f64;
    let mut field = vec![0.0; raw.len()];
    for (rank, i) in order.into_iter().enumerate() {
        field[i] = rank as f64 / last;
    }
    field
}

/// Unit normals of a smooth random height field (all facing `+z`).
pub fn smooth_normal_field(width: usize, height: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut r = rng(seed);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                r.random_range(0.0..width as f64),
                r.random_range(0.0..height as f64),
                r.random_range(0.15..0.4) * width.max(height) as f64,
                r.random_range(-1.0..1.0) * width.max(height) as f64 * 0.35,
            )
        })
        .collect();
    (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let (mut gx, mut gy) = (0.0, 0.0);
            for (cx, cy, s, a) in &bumps {
                let (dx, dy) = (x - cx, y - cy);
                let g = a * (-(dx * dx + dy * dy) / (2.0 * s * s)).exp();
                gx += -g * dx / (s * s);
                gy += -g * dy / (s * s);
            }
            let n = (gx * gx + gy * gy + 1.0).sqrt();
            [-gx / n, -gy / n, 1.0 / n]
        })
        .collect()
}

/// Scene with a random albedo and flux chosen so no channel clamps.
pub fn random_lambertian_scene(width: usize, height: usize, seed: u64) -> LambertianScene {
    let mut r = rng(seed ^ 0x5eed_1a4b);
    let albedo = [
        r.random_range(0.2..1.0),
        r.random_range(0.2..1.0),
        r.random_range(0.2..1.0),
    ];
    lambertian_scene(width, height, albedo, r.random_range(0.6..1.0), seed)
}

pub fn lambertian_scene(
    width: usize,
    height: usize,
    albedo: [f64; 3],
    flux: f64,
    seed: u64,
) -> LambertianScene {
    let tilt = [0.2f64, -0.1, 1.0];
    let n = (tilt[0] * tilt[0] + tilt[1] * tilt[1] + tilt[2] * tilt[2]).sqrt();
    LambertianScene {
        albedo,
        flux,
        light_direction: [tilt[0] / n, tilt[1] / n, tilt[2] / n],
        width,
        height,
        normals: smooth_normal_field(width, height, seed),
    }
}

/// A planar cubic in RGB: `frame.origin + u·axis_u + p(u)·axis_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    pub frame: PlaneFrame,
    pub coefficients: [f64; 4],
    pub u_range: [f64; 2],
}

impl ReferenceCurve {
    /// Pale-crust to dark-brown browning path.
    pub fn browning() -> Self {
        let axis_u = RgbPoint::new(1.0, 1.0, 0.8).normalized().unwrap();
        let axis_v = RgbPoint::new(1.0, -0.5, -0.625).normalized().unwrap();
        Self {
            frame: PlaneFrame {
                origin: RgbPoint::new(160.0, 120.0, 80.0),
                axis_u,
                axis_v,
                normal: axis_u.cross(axis_v),
            },
            coefficients: [0.0, 0.0, -0.0025, 1e-5],
            u_range: [-110.0, 110.0],
        }
    }

    /// Random curve whose points, padded by `margin`, stay inside the cube.
    pub fn random(seed: u64, margin: f64) -> Self {
        let mut r = rng(seed ^ 0xc0ffee);
        loop {
            let unit = |r: &mut ChaCha8Rng| loop {
                let v = RgbPoint::new(
                    r.random_range(-1.0..1.0),
                    r.random_range(-1.0..1.0),
                    r.random_range(-1.0..1.0),
                );
                if let Some(u) = v.normalized() {
                    break u;
                }
            };
            let axis_u = unit(&mut r);
            let w = unit(&mut r);
            let Some(axis_v) = (w - axis_u * axis_u.dot(w)).normalized() else {
                continue;
            };
            let half = r.random_range(90.0..120.0);
            let curve = Self {
                frame: PlaneFrame {
                    origin: RgbPoint::new(
                        r.random_range(100.0..155.0),
                        r.random_range(100.0..155.0),
                        r.random_range(100.0..155.0),
                    ),
                    axis_u,
                    axis_v,
                    normal: axis_u.cross(axis_v),
                },
                coefficients: [
                    0.0,
                    0.0,
                    r.random_range(-0.003..0.003),
                    r.random_range(-1.5e-5..1.5e-5),
                ],
                u_range: [-half, half],
            };
            if (0..=64).all(|i| curve.point(curve.u_at(i as f64 / 64.0)).in_cube(-margin)) {
                return curve;
            }
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let [a0, a1, a2, a3] = self.coefficients;
        ((a3 * u + a2) * u + a1) * u + a0
    }

    pub fn point(&self, u: f64) -> RgbPoint {
        self.frame.point_at(u, self.eval(u))
    }

    /// Parameter at fraction `t ∈ [0, 1]` of the range.
    pub fn u_at(&self, t: f64) -> f64 {
        self.u_range[0] + t * (self.u_range[1] - self.u_range[0])
    }
}

fn add_noise(p: RgbPoint, sigma: f64, rng: &mut impl Rng) -> RgbPoint {
    if sigma <= 0.0 {
        return p;
    }
    let n = Normal::new(0.0, sigma).expect("finite sigma");
    RgbPoint::new(
        p.r + n.sample(rng),
        p.g + n.sample(rng),
        p.b + n.sample(rng),
    )
    .clamped()
}

/// Full-frame material image: the curve parameter varies smoothly across the
/// frame and covers the whole range; isotropic noise `sigma` per channel.
pub fn curve_exemplar(
    curve: &ReferenceCurve,
    width: usize,
    height: usize,
    sigma: f64,
    seed: u64,
) -> RasterImage {
    let mut r = rng(seed);
    let field = smooth_field(width, height, &mut r);
    let pixels = field
        .iter()
        .map(|t| add_noise(curve.point(curve.u_at(*t)), sigma, &mut r))
        .collect();
    RasterImage::new(width, height, pixels).expect("generated pixels are valid")
}

/// Left half painted from `curve`, right half from a straight line offset
/// `offset` RGB units along the plane normal. Returns the ground-truth mask
/// of the curve half.
pub fn two_material_scene(
    curve: &ReferenceCurve,
    width: usize,
    height: usize,
    offset: f64,
    sigma: f64,
    seed: u64,
) -> (RasterImage, Mask) {
    let mut r = rng(seed);
    let field = smooth_field(width, height, &mut r);
    let n = curve.frame.normal;
    let line = |t: f64, s: f64| curve.frame.point_at(curve.u_at(t), 0.0) + n * (s * offset);
    // pick the offset side that stays inside the cube
    let inside = |s: f64| {
        (0..=32)
            .filter(|i| line(*i as f64 / 32.0, s).in_cube(0.0))
            .count()
    };
    let side = if inside(1.0) >= inside(-1.0) {
        1.0
    } else {
        -1.0
    };
    let mut truth = Mask::empty(width, height);
    let mut pixels = Vec::with_capacity(width * height);
    for (i, t) in field.iter().enumerate() {
        let x = i % width;
        let base = if x < width / 2 {
            truth.set(x, i / width, true);
            curve.point(curve.u_at(*t))
        } else {
            line(*t, side)
        };
        pixels.push(add_noise(base, sigma, &mut r));
    }
    (
        RasterImage::new(width, height, pixels).expect("generated pixels are valid"),
        truth,
    )
}

/// Colors scattered around a random planar cubic: in-plane spread
/// `in_plane_sigma` across the curve and `off_plane_sigma` along the normal.
pub fn near_planar_image(
    width: usize,
    height: usize,
    in_plane_sigma: f64,
    off_plane_sigma: f64,
    seed: u64,
) -> RasterImage {
    let curve = ReferenceCurve::random(seed, 3.0 * in_plane_sigma + 3.0 * off_plane_sigma);
    let mut r = rng(seed);
    let field = smooth_field(width, height, &mut r);
    let across = Normal::new(0.0, in_plane_sigma.max(1e-12)).expect("finite sigma");
    let off = Normal::new(0.0, off_plane_sigma.max(1e-12)).expect("finite sigma");
    let pixels = field
        .iter()
        .map(|t| {
            let u = curve.u_at(*t);
            let p = curve
                .frame
                .point_at(u, curve.eval(u) + across.sample(&mut r))
                + curve.frame.normal * off.sample(&mut r);
            p.clamped()
        })
        .collect();
    RasterImage::new(width, height, pixels).expect("generated pixels are valid")
}

/// Image whose pixels are exactly the given colors, repeated `copies` times
/// each, laid out row-major in a `width`-wide frame padded with `fill`.
pub fn tiled_image(
    colors: &[RgbPoint],
    copies: usize,
    width: usize,
    fill: RgbPoint,
) -> Result<RasterImage> {
    let n = colors.len() * copies;
    let height = n.div_ceil(width).max(1);
    let mut pixels: Vec<RgbPoint> = colors
        .iter()
        .flat_map(|c| std::iter::repeat_n(*c, copies))
        .collect();
    pixels.resize(width * height, fill);
    RasterImage::new(width, height, pixels)
}
