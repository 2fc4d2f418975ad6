//! Exemplar-based detection, segmentation and recognition scoring against a
//! [`CurveModel`].
//!
//! A probe pixel conforms when its curve distance is strictly below `d_t`.
//! Each conforming pixel votes for its nearest curve sample; a sample is
//! kept when it has strictly more than `l_s` votes, and the covered length
//! is the polyline length spanned by kept samples. A connected region is
//! accepted when that length strictly exceeds `l_t`.

use crate::curve::{CurveDistance, CurveModel, DEFAULT_DISTANCE_THRESHOLD};
use crate::error::{Error, Result};
use crate::image::{Mask, RasterImage};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub const DEFAULT_MIN_VOTES: u32 = 10;
pub const DEFAULT_MIN_COVERAGE: f64 = 150.0;
pub const DEFAULT_MIN_REGION_PIXELS: usize = 50;
pub const DEFAULT_KAPPA: f64 = 0.02;

/// Which polyline segments count as covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageRule {
    /// Both endpoint samples kept.
    #[default]
    BothEndpoints,
    /// At least one endpoint sample kept.
    EitherEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetectionParams {
    pub d_t: f64,
    pub l_s: u32,
    pub l_t: f64,
    pub min_region_pixels: usize,
    pub coverage_rule: CoverageRule,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            d_t: DEFAULT_DISTANCE_THRESHOLD,
            l_s: DEFAULT_MIN_VOTES,
            l_t: DEFAULT_MIN_COVERAGE,
            min_region_pixels: DEFAULT_MIN_REGION_PIXELS,
            coverage_rule: CoverageRule::BothEndpoints,
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_t > 0.0 && self.d_t.is_finite()) {
            return Err(Error::InvalidParameter(format!("d_t = {}", self.d_t)));
        }
        if !(self.l_t >= 0.0) {
            return Err(Error::InvalidParameter(format!("l_t = {}", self.l_t)));
        }
        Ok(())
    }
}

/// An 8-connected group of conforming pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// `(x, y)` in scan order.
    pub pixels: Vec<(usize, usize)>,
    /// Conforming-pixel votes per curve sample; empty until scored.
    pub vote_histogram: Vec<u32>,
    pub coverage_length: f64,
    pub accepted: bool,
}

impl Region {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub conformity_mask: Mask,
    pub regions: Vec<Region>,
    pub params: DetectionParams,
}

impl DetectionResult {
    pub fn accepted(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.accepted)
    }

    /// Pixels of accepted regions.
    pub fn accepted_mask(&self) -> Mask {
        let mut m = Mask::empty(self.conformity_mask.width(), self.conformity_mask.height());
        for r in self.accepted() {
            for &(x, y) in &r.pixels {
                m.set(x, y, true);
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RecognitionParams {
    pub d_t: f64,
    pub kappa: f64,
    /// Lower bound of the adaptive vote threshold.
    pub l_s_floor: u32,
    pub coverage_rule: CoverageRule,
}

impl Default for RecognitionParams {
    fn default() -> Self {
        Self {
            d_t: DEFAULT_DISTANCE_THRESHOLD,
            kappa: DEFAULT_KAPPA,
            l_s_floor: DEFAULT_MIN_VOTES,
            coverage_rule: CoverageRule::BothEndpoints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RecognitionScore {
    /// Covered arc length, RGB units.
    pub score: f64,
    pub adaptive_ls: u32,
    pub conforming_pixels: usize,
}

fn mask_from(image: &RasterImage, distances: &[CurveDistance], d_t: f64) -> Mask {
    let bits = distances.iter().map(|d| d.distance < d_t).collect();
    Mask::new(image.width(), image.height(), bits).expect("mask matches image")
}

/// Pixels whose curve distance is strictly below `d_t`.
pub fn conformity_mask(image: &RasterImage, model: &CurveModel, d_t: f64) -> Mask {
    mask_from(image, &model.distances(image.pixels()), d_t)
}

/// 8-connected components of set cells with at least `min_region_pixels`
/// cells, ordered by their first cell in scan order.
pub fn extract_regions(mask: &Mask, min_region_pixels: usize) -> Vec<Region> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || !mask.bits()[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut cells = Vec::new();
        while let Some(i) = queue.pop_front() {
            cells.push(i);
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if (dx, dy) == (0, 0)
                        || nx < 0
                        || ny < 0
                        || nx >= w as isize
                        || ny >= h as isize
                    {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if !seen[j] && mask.bits()[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if cells.len() >= min_region_pixels {
            cells.sort_unstable();
            regions.push(Region {
                pixels: cells.into_iter().map(|i| (i % w, i / w)).collect(),
                vote_histogram: Vec::new(),
                coverage_length: 0.0,
                accepted: false,
            });
        }
    }
    regions
}

/// Votes per curve sample from a list of nearest-sample indices.
pub fn vote_histogram(nearest: impl IntoIterator<Item = usize>, sample_count: usize) -> Vec<u32> {
    let mut votes = vec![0u32; sample_count];
    for i in nearest {
        votes[i] += 1;
    }
    votes
}

/// Polyline length covered by samples with more than `l_s` votes.
pub fn covered_length(votes: &[u32], model: &CurveModel, l_s: u32, rule: CoverageRule) -> f64 {
    let kept: Vec<bool> = votes.iter().map(|v| *v > l_s).collect();
    (0..kept.len().saturating_sub(1))
        .filter(|&i| match rule {
            CoverageRule::BothEndpoints => kept[i] && kept[i + 1],
            CoverageRule::EitherEndpoint => kept[i] || kept[i + 1],
        })
        .map(|i| model.segment_length(i))
        .sum()
}

/// Coverage length of `region` in `image`, counting only its conforming
/// pixels (those strictly within `d_t`).
pub fn coverage_length(
    region: &Region,
    image: &RasterImage,
    model: &CurveModel,
    d_t: f64,
    l_s: u32,
    rule: CoverageRule,
) -> f64 {
    let nearest = region
        .pixels
        .iter()
        .map(|&(x, y)| model.distance(image.get(x, y)))
        .filter(|d| d.distance < d_t)
        .map(|d| d.nearest_sample_index);
    covered_length(
        &vote_histogram(nearest, model.samples().len()),
        model,
        l_s,
        rule,
    )
}

/// Conformity mask, region extraction, and per-region coverage test.
pub fn detect(
    image: &RasterImage,
    model: &CurveModel,
    params: &DetectionParams,
) -> Result<DetectionResult> {
    params.validate()?;
    let distances = model.distances(image.pixels());
    let conformity_mask = mask_from(image, &distances, params.d_t);
    let mut regions = extract_regions(&conformity_mask, params.min_region_pixels);
    let n = model.samples().len();
    for region in regions.iter_mut() {
        let nearest = region
            .pixels
            .iter()
            .map(|&(x, y)| distances[y * image.width() + x].nearest_sample_index);
        region.vote_histogram = vote_histogram(nearest, n);
        region.coverage_length = covered_length(
            &region.vote_histogram,
            model,
            params.l_s,
            params.coverage_rule,
        );
        region.accepted = region.coverage_length > params.l_t;
    }
    Ok(DetectionResult {
        conformity_mask,
        regions,
        params: *params,
    })
}

/// `max(floor, round(kappa · conforming / samples))`.
pub fn adaptive_vote_threshold(
    conforming: usize,
    sample_count: usize,
    kappa: f64,
    floor: u32,
) -> u32 {
    let scaled = (kappa * conforming as f64 / sample_count as f64).round();
    floor.max(scaled.min(u32::MAX as f64) as u32)
}

/// Whole-probe score: arc length covered by the global vote histogram under
/// the adaptive vote threshold.
pub fn recognize(
    image: &RasterImage,
    model: &CurveModel,
    params: &RecognitionParams,
) -> Result<RecognitionScore> {
    if !(params.d_t > 0.0) || !(params.kappa >= 0.0 && params.kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "d_t = {}, kappa = {}",
            params.d_t, params.kappa
        )));
    }
    let n = model.samples().len();
    let nearest: Vec<usize> = model
        .distances(image.pixels())
        .into_iter()
        .filter(|d| d.distance < params.d_t)
        .map(|d| d.nearest_sample_index)
        .collect();
    let conforming = nearest.len();
    let adaptive_ls = adaptive_vote_threshold(conforming, n, params.kappa, params.l_s_floor);
    let votes = vote_histogram(nearest, n);
    let score = covered_length(&votes, model, adaptive_ls, params.coverage_rule);
    Ok(RecognitionScore {
        score,
        adaptive_ls,
        conforming_pixels: conforming,
    })
}
