//! Minimum-variance quantization by recursive box splitting.
//!
//! The box with the largest summed squared error is split at the axis and
//! threshold that minimize the summed squared error of the two halves.

use super::{ColorBox, ColorHistogram};
use crate::color::RgbPoint;

struct Scored {
    cbox: ColorBox,
    sse: f64,
}

fn sse_of(hist: &ColorHistogram, entries: &[u32]) -> f64 {
    let (mut w, mut s, mut q) = (0.0, RgbPoint::ZERO, 0.0);
    for &e in entries {
        let n = hist.counts[e as usize] as f64;
        let c = hist.colors[e as usize];
        w += n;
        s += c * n;
        q += n * c.norm_squared();
    }
    (q - s.norm_squared() / w).max(0.0)
}

/// Best cut of a box: entries sorted along the chosen axis and the cut index.
fn best_split(hist: &ColorHistogram, cbox: &ColorBox) -> Option<(Vec<u32>, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for axis in 0..3 {
        let sorted = cbox.sorted_along(hist, axis);
        let n = sorted.len();
        let mut pw = vec![0.0; n + 1];
        let mut ps = vec![RgbPoint::ZERO; n + 1];
        let mut pq = vec![0.0; n + 1];
        for (i, &e) in sorted.iter().enumerate() {
            let w = hist.counts[e as usize] as f64;
            let c = hist.colors[e as usize];
            pw[i + 1] = pw[i] + w;
            ps[i + 1] = ps[i] + c * w;
            pq[i + 1] = pq[i] + w * c.norm_squared();
        }
        for cut in 1..n {
            let lo = hist.colors[sorted[cut - 1] as usize].component(axis);
            let hi = hist.colors[sorted[cut] as usize].component(axis);
            if lo == hi {
                continue;
            }
            let left = pq[cut] - ps[cut].norm_squared() / pw[cut];
            let rw = pw[n] - pw[cut];
            let rs = ps[n] - ps[cut];
            let right = (pq[n] - pq[cut]) - rs.norm_squared() / rw;
            let total = left.max(0.0) + right.max(0.0);
            if best.is_none_or(|b| total < b.0) {
                best = Some((total, axis, cut));
            }
        }
    }
    best.map(|(_, axis, cut)| (cbox.sorted_along(hist, axis), cut))
}

pub(crate) fn palette(hist: &ColorHistogram, k: usize) -> Vec<RgbPoint> {
    let all = ColorBox {
        entries: (0..hist.len() as u32).collect(),
    };
    let sse = sse_of(hist, &all.entries);
    let mut boxes = vec![Scored { cbox: all, sse }];
    let mut frozen: Vec<ColorBox> = Vec::new();
    while boxes.len() + frozen.len() < k {
        let Some(idx) = (0..boxes.len()).fold(None, |acc: Option<usize>, i| match acc {
            Some(j) if boxes[j].sse >= boxes[i].sse => Some(j),
            _ => Some(i),
        }) else {
            break;
        };
        let target = boxes.swap_remove(idx);
        if !target.cbox.is_splittable() {
            frozen.push(target.cbox);
            continue;
        }
        match best_split(hist, &target.cbox) {
            Some((sorted, cut)) => {
                let (l, r) = sorted.split_at(cut);
                for entries in [l.to_vec(), r.to_vec()] {
                    let sse = sse_of(hist, &entries);
                    boxes.push(Scored {
                        cbox: ColorBox { entries },
                        sse,
                    });
                }
            }
            None => frozen.push(target.cbox),
        }
    }
    let mut all_boxes: Vec<ColorBox> = boxes.into_iter().map(|s| s.cbox).chain(frozen).collect();
    // order palette entries by their first histogram entry for stable output
    all_boxes.sort_by_key(|b| b.entries.iter().copied().min());
    all_boxes.iter().map(|b| b.weighted_mean(hist)).collect()
}
