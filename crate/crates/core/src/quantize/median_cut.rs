//! Median cut: repeatedly split the box with the widest channel range at the
//! pixel-weighted median of that channel.

use super::{ColorBox, ColorHistogram};
use crate::color::RgbPoint;

fn widest_axis(hist: &ColorHistogram, b: &ColorBox) -> (usize, f64) {
    (0..3).map(|a| (a, b.range(hist, a))).fold(
        (0, -1.0),
        |best, cur| if cur.1 > best.1 { cur } else { best },
    )
}

/// Splits at the value boundary closest to the weighted median.
fn split(hist: &ColorHistogram, b: &ColorBox, axis: usize) -> Option<(ColorBox, ColorBox)> {
    let sorted = b.sorted_along(hist, axis);
    let total: u64 = sorted.iter().map(|&e| hist.counts[e as usize]).sum();
    let half = total as f64 / 2.0;
    let mut acc = 0u64;
    let mut best: Option<(f64, usize)> = None;
    for cut in 1..sorted.len() {
        acc += hist.counts[sorted[cut - 1] as usize];
        let lo = hist.colors[sorted[cut - 1] as usize].component(axis);
        let hi = hist.colors[sorted[cut] as usize].component(axis);
        if lo == hi {
            continue;
        }
        let miss = (acc as f64 - half).abs();
        if best.is_none_or(|(m, _)| miss < m) {
            best = Some((miss, cut));
        }
    }
    let (_, cut) = best?;
    let (l, r) = sorted.split_at(cut);
    Some((
        ColorBox {
            entries: l.to_vec(),
        },
        ColorBox {
            entries: r.to_vec(),
        },
    ))
}

pub(crate) fn boxes(hist: &ColorHistogram, k: usize) -> Vec<ColorBox> {
    let first = ColorBox {
        entries: (0..hist.len() as u32).collect(),
    };
    // Open boxes paired with their widest axis and its range.
    let mut boxes = vec![(widest_axis(hist, &first), first)];
    let mut done: Vec<ColorBox> = Vec::new();
    while boxes.len() + done.len() < k && !boxes.is_empty() {
        let mut idx = 0;
        for (i, ((_, range), _)) in boxes.iter().enumerate() {
            if *range > (boxes[idx].0).1 {
                idx = i;
            }
        }
        let ((axis, _), target) = boxes.swap_remove(idx);
        if !target.is_splittable() {
            done.push(target);
            continue;
        }
        match split(hist, &target, axis) {
            Some((l, r)) => {
                boxes.push((widest_axis(hist, &l), l));
                boxes.push((widest_axis(hist, &r), r));
            }
            None => done.push(target),
        }
    }
    let boxes = boxes.into_iter().map(|(_, b)| b);
    let mut all: Vec<ColorBox> = boxes.into_iter().chain(done).collect();
    all.sort_by_key(|b| b.entries.iter().copied().min());
    all
}

pub(crate) fn palette(hist: &ColorHistogram, k: usize) -> Vec<RgbPoint> {
    boxes(hist, k)
        .iter()
        .map(|b| b.weighted_mean(hist))
        .collect()
}
