//! Eigen-analysis of RGB point clouds: covariance, planarity measure,
//! best-fit plane and best-fit line through the origin.

use crate::color::RgbPoint;
use crate::eigen::{symmetric_eigen3, Mat3};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// λ2/λ1 below which a cloud counts as collinear for plane fitting.
const COLLINEAR_RATIO: f64 = 1e-10;

/// Eigen-decomposition of the population covariance of a point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    /// λ1 ≥ λ2 ≥ λ3 ≥ 0, in RGB units².
    pub eigenvalues: [f64; 3],
    /// Orthonormal eigenvectors matching `eigenvalues`.
    pub eigenvectors: [RgbPoint; 3],
    pub centroid: RgbPoint,
}

impl EigenDecomposition {
    /// Covariance rebuilt as `Σ λᵢ eᵢ eᵢᵀ`.
    pub fn covariance(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (lambda, e) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let e = e.to_array();
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += lambda * e[i] * e[j];
                }
            }
        }
        m
    }

    pub fn planarity(&self) -> PlanarityMeasure {
        PlanarityMeasure::from_eigenvalues(self.eigenvalues)
    }
}

/// Cumulative variance percentages `[v1, v2]` captured by the one and two
/// largest eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanarityMeasure {
    pub v1: f64,
    pub v2: f64,
}

impl PlanarityMeasure {
    pub fn from_eigenvalues(l: [f64; 3]) -> Self {
        let sum = l[0] + l[1] + l[2];
        if sum <= 0.0 {
            return Self {
                v1: 100.0,
                v2: 100.0,
            };
        }
        Self {
            v1: (100.0 * l[0] / sum).clamp(0.0, 100.0),
            v2: (100.0 * (l[0] + l[1]) / sum).clamp(0.0, 100.0),
        }
    }

    /// Values rounded to two decimals, as shown in reports.
    pub fn rounded(&self) -> Self {
        let r = |v: f64| (v * 100.0).round() / 100.0;
        Self {
            v1: r(self.v1),
            v2: r(self.v2),
        }
    }
}

impl From<[f64; 2]> for PlanarityMeasure {
    fn from(a: [f64; 2]) -> Self {
        Self { v1: a[0], v2: a[1] }
    }
}

impl From<PlanarityMeasure> for [f64; 2] {
    fn from(pm: PlanarityMeasure) -> Self {
        [pm.v1, pm.v2]
    }
}

impl fmt::Display for PlanarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.2}, {:.2}]", self.v1, self.v2)
    }
}

/// Best-fit plane: centroid plus a right-handed orthonormal triad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaneFrame {
    pub origin: RgbPoint,
    pub axis_u: RgbPoint,
    pub axis_v: RgbPoint,
    pub normal: RgbPoint,
}

impl PlaneFrame {
    /// In-plane coordinates `(u, v)` and signed normal offset `w` of `p`.
    pub fn project(&self, p: RgbPoint) -> (f64, f64, f64) {
        let d = p - self.origin;
        (d.dot(self.axis_u), d.dot(self.axis_v), d.dot(self.normal))
    }

    pub fn point_at(&self, u: f64, v: f64) -> RgbPoint {
        self.origin + self.axis_u * u + self.axis_v * v
    }

    pub fn distance(&self, p: RgbPoint) -> f64 {
        (p - self.origin).dot(self.normal).abs()
    }
}

/// Line through `(0,0,0)` whose direction holds the channel albedo ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OriginLine {
    pub direction: RgbPoint,
    /// Root-mean-square orthogonal distance of the inputs, RGB units.
    pub rms_residual: f64,
}

impl OriginLine {
    pub fn distance(&self, p: RgbPoint) -> f64 {
        (p - self.direction * p.dot(self.direction)).norm()
    }
}

fn validate_weights(points: &[RgbPoint], weights: Option<&[f64]>) -> Result<()> {
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::MismatchedDimensions {
                expected: format!("{} weights", points.len()),
                found: format!("{} weights", w.len()),
            });
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter(
                "weights must be finite and nonnegative".into(),
            ));
        }
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point".into()));
    }
    Ok(())
}

/// Population covariance (divide by total weight) and centroid.
pub fn covariance_matrix(points: &[RgbPoint], weights: Option<&[f64]>) -> Result<(Mat3, RgbPoint)> {
    validate_weights(points, weights)?;
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let active: Vec<usize> = (0..points.len()).filter(|&i| weight(i) > 0.0).collect();
    if active.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 points, got {}",
            active.len()
        )));
    }
    let first = points[active[0]];
    if active.iter().all(|&i| points[i] == first) {
        return Err(Error::DegenerateInput("all points are identical".into()));
    }
    let total: f64 = active.iter().map(|&i| weight(i)).sum();
    let centroid = active
        .iter()
        .fold(RgbPoint::ZERO, |acc, &i| acc + points[i] * weight(i))
        / total;
    let mut cov = [[0.0; 3]; 3];
    for &i in &active {
        let d = (points[i] - centroid).to_array();
        let w = weight(i);
        for r in 0..3 {
            for c in r..3 {
                cov[r][c] += w * d[r] * d[c];
            }
        }
    }
    for r in 0..3 {
        for c in r..3 {
            cov[r][c] /= total;
            cov[c][r] = cov[r][c];
        }
    }
    Ok((cov, centroid))
}

/// Eigen-decomposition of the population covariance of `points`.
pub fn covariance_eigen(points: &[RgbPoint]) -> Result<EigenDecomposition> {
    covariance_eigen_weighted(points, None)
}

/// As [`covariance_eigen`], with optional per-point weights (e.g. pixel counts).
pub fn covariance_eigen_weighted(
    points: &[RgbPoint],
    weights: Option<&[f64]>,
) -> Result<EigenDecomposition> {
    let (cov, centroid) = covariance_matrix(points, weights)?;
    let (mut eigenvalues, eigenvectors) = symmetric_eigen3(&cov);
    for l in eigenvalues.iter_mut() {
        *l = l.max(0.0);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        centroid,
    })
}

pub fn planarity_measure(points: &[RgbPoint]) -> Result<PlanarityMeasure> {
    Ok(covariance_eigen(points)?.planarity())
}

pub fn planarity_measure_weighted(
    points: &[RgbPoint],
    weights: Option<&[f64]>,
) -> Result<PlanarityMeasure> {
    Ok(covariance_eigen_weighted(points, weights)?.planarity())
}

/// Plane minimizing the sum of squared orthogonal distances.
pub fn fit_plane(points: &[RgbPoint]) -> Result<PlaneFrame> {
    fit_plane_weighted(points, None)
}

pub fn fit_plane_weighted(points: &[RgbPoint], weights: Option<&[f64]>) -> Result<PlaneFrame> {
    let eig = covariance_eigen_weighted(points, weights)?;
    plane_from_eigen(&eig)
}

pub fn plane_from_eigen(eig: &EigenDecomposition) -> Result<PlaneFrame> {
    let [l1, l2, _] = eig.eigenvalues;
    if l2 <= COLLINEAR_RATIO * l1 {
        return Err(Error::DegenerateInput(
            "points are collinear; model them with a line instead of a plane".into(),
        ));
    }
    let axis_u = eig.eigenvectors[0];
    let axis_v = eig.eigenvectors[1];
    Ok(PlaneFrame {
        origin: eig.centroid,
        axis_u,
        axis_v,
        normal: axis_u.cross(axis_v),
    })
}

/// Least-squares line constrained through the origin.
///
/// Uses the leading eigenvector of the uncentered second-moment matrix;
/// centering would free the line from the origin.
pub fn fit_line_through_origin(points: &[RgbPoint]) -> Result<OriginLine> {
    validate_weights(points, None)?;
    if points.is_empty() || points.iter().all(|p| *p == RgbPoint::ZERO) {
        return Err(Error::DegenerateInput(
            "all points are at the origin".into(),
        ));
    }
    let n = points.len() as f64;
    let mut m = [[0.0; 3]; 3];
    for p in points {
        let a = p.to_array();
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += a[r] * a[c] / n;
            }
        }
    }
    let (_, vecs) = symmetric_eigen3(&m);
    let direction = vecs[0];
    let ms: f64 = points
        .iter()
        .map(|p| (*p - direction * p.dot(direction)).norm_squared())
        .sum::<f64>()
        / n;
    Ok(OriginLine {
        direction,
        rms_residual: ms.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: f64, g: f64, b: f64) -> RgbPoint {
        RgbPoint::new(r, g, b)
    }

    #[test]
    fn two_point_symmetric() {
        let c = p(128.0, 128.0, 128.0);
        let eig = covariance_eigen(&[c + p(-1.0, 0.0, 0.0), c + p(1.0, 0.0, 0.0)]).unwrap();
        assert_eq!(eig.centroid, c);
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(eig.eigenvalues[1].abs() < 1e-12 && eig.eigenvalues[2].abs() < 1e-12);
        assert!((eig.eigenvectors[0] - p(1.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn planar_square() {
        let sq = [
            p(0.0, 0.0, 0.0),
            p(2.0, 0.0, 0.0),
            p(0.0, 2.0, 0.0),
            p(2.0, 2.0, 0.0),
        ];
        let eig = covariance_eigen(&sq).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(eig.eigenvalues[2].abs() < 1e-12);
        assert!((eig.eigenvectors[2] - p(0.0, 0.0, 1.0)).norm() < 1e-12);
        assert!((planarity_measure(&sq).unwrap().v2 - 100.0).abs() < 1e-9);

        let plane = fit_plane(&sq).unwrap();
        assert!((plane.normal - p(0.0, 0.0, 1.0)).norm() < 1e-12);
        assert_eq!(plane.origin, p(1.0, 1.0, 0.0));
    }

    #[test]
    fn collinear_planarity_is_full() {
        let pts: Vec<_> = (0..=25).map(|t| RgbPoint::splat(10.0 * t as f64)).collect();
        let pm = planarity_measure(&pts).unwrap().rounded();
        assert_eq!((pm.v1, pm.v2), (100.0, 100.0));
        assert!(matches!(fit_plane(&pts), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            covariance_eigen(&[p(1.0, 2.0, 3.0)]),
            Err(Error::DegenerateInput(_))
        ));
        let same = vec![p(5.0, 5.0, 5.0); 10];
        assert!(matches!(
            covariance_eigen(&same),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_line_through_origin(&[RgbPoint::ZERO; 3]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn symmetric_plane_normal() {
        // points on r + g + b = 300
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                let r = 40.0 + 9.0 * i as f64;
                let g = 30.0 + 11.0 * j as f64;
                pts.push(p(r, g, 300.0 - r - g));
            }
        }
        let plane = fit_plane(&pts).unwrap();
        let n = RgbPoint::splat(1.0 / 3f64.sqrt());
        assert!((plane.normal.dot(n).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_ray_through_origin() {
        let d = p(0.8, 0.5, 0.33);
        let pts: Vec<_> = (50..=250).map(|t| d * t as f64).collect();
        let line = fit_line_through_origin(&pts).unwrap();
        assert!((line.direction - d.normalized().unwrap()).norm() < 1e-12);
        assert!(line.rms_residual < 1e-9);
    }

    #[test]
    fn single_repeated_point_line() {
        let line = fit_line_through_origin(&[p(100.0, 50.0, 25.0); 4]).unwrap();
        let d = line.direction;
        assert!(
            (d.r - 0.873).abs() < 5e-4 && (d.g - 0.436).abs() < 5e-4 && (d.b - 0.218).abs() < 5e-4
        );
        assert!(line.rms_residual < 1e-9);
    }

    #[test]
    fn display_rounds_to_two_decimals() {
        let pm = PlanarityMeasure {
            v1: 97.4666,
            v2: 99.4249,
        };
        assert_eq!(pm.to_string(), "[97.47, 99.42]");
    }

    #[test]
    fn weighted_matches_duplicated_points() {
        let pts = [
            p(10.0, 20.0, 30.0),
            p(50.0, 20.0, 10.0),
            p(30.0, 90.0, 40.0),
            p(5.0, 5.0, 80.0),
        ];
        let weights = [1.0, 3.0, 2.0, 1.0];
        let mut expanded = Vec::new();
        for (q, w) in pts.iter().zip(weights) {
            for _ in 0..w as usize {
                expanded.push(*q);
            }
        }
        let a = covariance_eigen_weighted(&pts, Some(&weights)).unwrap();
        let b = covariance_eigen(&expanded).unwrap();
        for k in 0..3 {
            assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-9);
        }
        assert!(matches!(
            covariance_eigen_weighted(&pts, Some(&[1.0])),
            Err(Error::MismatchedDimensions { .. })
        ));
    }
}
