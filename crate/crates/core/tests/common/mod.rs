#![allow(dead_code)]

use firing_graph::f2core::BitVector;
use firing_graph::graph::{EdgeKind, FiringGraph};
use proptest::prelude::*;

/// Shape of a random layered graph: input count, cores per layer, output count.
#[derive(Clone, Debug)]
pub struct Shape {
    pub n_i: usize,
    pub layers: Vec<usize>,
    pub n_o: usize,
    /// Raw choices consumed while wiring edges and levels.
    pub choices: Vec<u32>,
}

pub fn shape() -> impl Strategy<Value = Shape> {
    (1usize..6, prop::collection::vec(1usize..4, 1..4), 1usize..3, prop::collection::vec(any::<u32>(), 256))
        .prop_map(|(n_i, layers, n_o, choices)| Shape { n_i, layers, n_o, choices })
}

/// Wires `shape` into a finalized graph. Every core gets at least one edge
/// from the previous layer plus random extra edges from any earlier layer.
pub fn build(shape: &Shape) -> FiringGraph {
    let mut pick = shape.choices.iter().cycle().copied();
    let mut next = move |bound: usize| pick.next().unwrap() as usize % bound;
    let n_c: usize = shape.layers.iter().sum();
    let mut layer_of = Vec::new();
    for (l, &count) in shape.layers.iter().enumerate() {
        layer_of.extend(std::iter::repeat_n(l + 1, count));
    }
    // Vertices of layer 0 are inputs, identified as (false, a); cores as (true, c).
    let members = |layer: usize| -> Vec<(bool, usize)> {
        if layer == 0 {
            (0..shape.n_i).map(|a| (false, a)).collect()
        } else {
            (0..n_c).filter(|&c| layer_of[c] == layer).map(|c| (true, c)).collect()
        }
    };
    let mut edges: Vec<((bool, usize), usize)> = Vec::new();
    for (c, &layer) in layer_of.iter().enumerate() {
        let prev = members(layer - 1);
        edges.push((prev[next(prev.len())], c));
        for earlier in 0..layer {
            for v in members(earlier) {
                if next(3) == 0 {
                    edges.push((v, c));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut indeg = vec![0usize; n_c];
    for (_, c) in &edges {
        indeg[*c] += 1;
    }
    let levels: Vec<usize> = indeg.iter().map(|&d| 1 + next(d)).collect();
    let width = shape.n_i + 2;
    let bits: Vec<usize> = (0..shape.n_i).map(|a| a + 1).collect();
    let mut g = FiringGraph::new(width, bits, levels, shape.n_o).unwrap();
    for ((is_core, src), dst) in edges {
        let w = 1 + next(5) as u64;
        let kind = if is_core { EdgeKind::CoreToCore } else { EdgeKind::InputToCore };
        g.set_edge(kind, src, dst, w);
    }
    let last = members(shape.layers.len());
    for o in 0..shape.n_o {
        let (_, c) = last[next(last.len())];
        g.set_edge(EdgeKind::CoreToOutput, c, o, 1);
        if next(2) == 0 {
            g.set_edge(EdgeKind::CoreToOutput, next(n_c), o, 1);
        }
    }
    g.finalize(None).unwrap()
}

pub fn input_sequence(width: usize, max_len: usize) -> impl Strategy<Value = Vec<BitVector>> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), width), 1..max_len)
        .prop_map(|rows| rows.iter().map(|r| BitVector::from_bools(r)).collect())
}
