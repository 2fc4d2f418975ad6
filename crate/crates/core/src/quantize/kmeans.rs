//! Weighted k-means over the color histogram, started from the median-cut
//! palette.

use super::{median_cut, nearest, ColorHistogram};
use crate::color::RgbPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const MAX_ITERATIONS: usize = 50;
/// Largest centroid move (RGB units) that still counts as converged.
pub const CONVERGENCE_EPSILON: f64 = 0.01;

pub(crate) fn palette(hist: &ColorHistogram, k: usize, seed: u64) -> Vec<RgbPoint> {
    let mut centroids = median_cut::palette(hist, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = hist
        .colors
        .par_iter()
        .map(|c| nearest(&centroids, *c))
        .collect();
    for iteration in 0..MAX_ITERATIONS {
        if iteration > 0 {
            labels = relabel(&hist.colors, &centroids, &labels);
        }
        let mut sums = vec![RgbPoint::ZERO; centroids.len()];
        let mut weights = vec![0.0; centroids.len()];
        for (e, &l) in labels.iter().enumerate() {
            let w = hist.counts[e] as f64;
            sums[l] += hist.colors[e] * w;
            weights[l] += w;
        }
        let mut shift: f64 = 0.0;
        for i in 0..centroids.len() {
            let next = if weights[i] > 0.0 {
                sums[i] / weights[i]
            } else {
                hist.colors[rng.random_range(0..hist.len())]
            };
            shift = shift.max(next.distance(centroids[i]));
            centroids[i] = next;
        }
        if shift < CONVERGENCE_EPSILON {
            break;
        }
    }
    centroids
}

/// Nearest centroid for every color, starting from the previous label and
/// skipping centroids that the triangle inequality rules out. Gives the same
/// answer as a full scan, including the lowest-index tie rule.
fn relabel(colors: &[RgbPoint], centroids: &[RgbPoint], previous: &[usize]) -> Vec<usize> {
    // For each centroid, the others ordered by squared distance from it.
    let neighbours: Vec<Vec<(f64, usize)>> = centroids
        .par_iter()
        .map(|a| {
            let mut row: Vec<(f64, usize)> = centroids
                .iter()
                .enumerate()
                .map(|(j, b)| (a.distance_squared(*b), j))
                .collect();
            row.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            row
        })
        .collect();
    colors
        .par_iter()
        .zip(previous.par_iter())
        .map(|(c, &start)| {
            let mut best = start;
            let mut best_d = c.distance_squared(centroids[start]);
            // Centroid j can only win when |c_start - c_j| <= 2 |x - c_start|,
            // widened slightly so rounding never prunes a tie.
            let reach = 4.0 * best_d * (1.0 + 1e-9) + 1e-12;
            for &(between, j) in &neighbours[start] {
                if between > reach {
                    break;
                }
                let d = c.distance_squared(centroids[j]);
                if d < best_d || (d == best_d && j < best) {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pruned_relabel_matches_full_scan() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<RgbPoint> = (0..2000)
            .map(|_| {
                RgbPoint::new(
                    r.random_range(0.0..255.0),
                    r.random_range(0.0..255.0),
                    r.random_range(0.0..40.0),
                )
            })
            .collect();
        let mut cents: Vec<RgbPoint> = pts[..37].to_vec();
        cents.push(cents[3]); // duplicate centroid exercises the tie rule
        let start: Vec<usize> = (0..pts.len()).map(|i| i % cents.len()).collect();
        let fast = relabel(&pts, &cents, &start);
        let slow: Vec<usize> = pts.iter().map(|p| nearest(&cents, *p)).collect();
        assert_eq!(fast, slow);
    }
}
