//! Octree quantization, depth 8. Leaves are merged into their parent,
//! lowest pixel count first, until the leaf count fits the palette.

use super::ColorHistogram;
use crate::color::RgbPoint;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

const DEPTH: usize = 8;

#[derive(Debug, Clone)]
struct Node {
    children: [Option<usize>; 8],
    parent: Option<usize>,
    depth: usize,
    count: u64,
    sum: RgbPoint,
    leaf: bool,
}

impl Node {
    fn new(parent: Option<usize>, depth: usize) -> Self {
        Self {
            children: [None; 8],
            parent,
            depth,
            count: 0,
            sum: RgbPoint::ZERO,
            leaf: depth == DEPTH,
        }
    }
}

fn child_slot(level: [u8; 3], depth: usize) -> usize {
    let bit = 7 - depth;
    (((level[0] >> bit) & 1) << 2 | ((level[1] >> bit) & 1) << 1 | ((level[2] >> bit) & 1)) as usize
}

pub(crate) fn palette(hist: &ColorHistogram, k: usize) -> Vec<RgbPoint> {
    let mut nodes = vec![Node::new(None, 0)];
    for (c, &n) in hist.colors.iter().zip(&hist.counts) {
        let level = c.to_rgb8();
        let mut cur = 0;
        nodes[cur].count += n;
        nodes[cur].sum += *c * n as f64;
        for depth in 0..DEPTH {
            let slot = child_slot(level, depth);
            let next = match nodes[cur].children[slot] {
                Some(i) => i,
                None => {
                    nodes.push(Node::new(Some(cur), depth + 1));
                    let i = nodes.len() - 1;
                    nodes[cur].children[slot] = Some(i);
                    i
                }
            };
            cur = next;
            nodes[cur].count += n;
            nodes[cur].sum += *c * n as f64;
        }
    }

    let mut leaves = nodes.iter().filter(|n| n.leaf).count();
    let reducible = |nodes: &[Node], i: usize| {
        !nodes[i].leaf && nodes[i].children.iter().flatten().all(|&c| nodes[c].leaf)
    };
    // min-heap on (count, deeper first, index)
    let mut heap = BinaryHeap::new();
    for i in 0..nodes.len() {
        if reducible(&nodes, i) {
            heap.push(Reverse((nodes[i].count, DEPTH - nodes[i].depth, i)));
        }
    }
    while leaves > k {
        let Some(Reverse((_, _, i))) = heap.pop() else {
            break;
        };
        let kids = nodes[i].children.iter().flatten().count();
        nodes[i].children = [None; 8];
        nodes[i].leaf = true;
        leaves = leaves + 1 - kids;
        if let Some(p) = nodes[i].parent {
            if reducible(&nodes, p) {
                heap.push(Reverse((nodes[p].count, DEPTH - nodes[p].depth, p)));
            }
        }
    }

    // depth-first walk gives a stable palette order
    let mut out = Vec::with_capacity(leaves);
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        if nodes[i].leaf {
            out.push(nodes[i].sum / nodes[i].count as f64);
        } else {
            stack.extend(nodes[i].children.iter().rev().flatten());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_reads_bits_msb_first() {
        assert_eq!(child_slot([0b1000_0000, 0, 0], 0), 4);
        assert_eq!(child_slot([0, 0, 1], 7), 1);
        assert_eq!(child_slot([0, 0b10, 0], 6), 2);
    }
}
