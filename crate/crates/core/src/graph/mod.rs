//! The firing graph: a layered DAG of input, core and output vertices with
//! weighted integer links, per-vertex update masks and per-edge feedback budgets.
//!
//! Vertex ids used in snapshots and traces are global: inputs occupy
//! `0..n_i`, cores `n_i..n_i + n_c` and outputs the remaining `n_o` ids.

mod connectivity;
mod links;
mod propagate;
mod snapshot;

pub use connectivity::{connected_component_count, output_reachable_inputs};
pub use links::{Link, LinkMatrix};
pub(crate) use propagate::apply_structure_update;
pub use propagate::{
    backward_step, forward_block, forward_step, inject_feedback, structure_update, BackwardState, ForwardState,
    UpdateReport,
};

use crate::error::{Error, Result};

/// Which link matrix an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    InputToCore,
    CoreToCore,
    CoreToOutput,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiringGraph {
    grid_width: usize,
    input_bits: Vec<usize>,
    n_o: usize,
    pub(crate) input_links: LinkMatrix,
    pub(crate) core_links: LinkMatrix,
    pub(crate) output_links: LinkMatrix,
    levels: Vec<usize>,
    pub(crate) mask_i: Vec<bool>,
    pub(crate) mask_c: Vec<bool>,
    d_max: usize,
}

impl FiringGraph {
    /// An edgeless graph. Input vertex `a` observes grid bit `input_bits[a]`;
    /// `levels[c]` is the firing threshold of core `c`.
    pub fn new(grid_width: usize, input_bits: Vec<usize>, levels: Vec<usize>, n_o: usize) -> Result<Self> {
        let mut seen = vec![false; grid_width];
        for &b in &input_bits {
            if b >= grid_width {
                return Err(Error::IndexOutOfRange { index: b, width: grid_width });
            }
            if std::mem::replace(&mut seen[b], true) {
                return Err(Error::Contract(format!("grid bit {b} appears twice in the input layer")));
            }
        }
        if let Some(c) = levels.iter().position(|&l| l == 0) {
            return Err(Error::Contract(format!("core {c} has level 0")));
        }
        let n_i = input_bits.len();
        let n_c = levels.len();
        Ok(Self {
            grid_width,
            input_bits,
            n_o,
            input_links: LinkMatrix::new(n_i, n_c),
            core_links: LinkMatrix::new(n_c, n_c),
            output_links: LinkMatrix::new(n_c, n_o),
            levels,
            mask_i: vec![false; n_i],
            mask_c: vec![false; n_c],
            d_max: 0,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.input_bits.len()
    }

    pub fn n_cores(&self) -> usize {
        self.levels.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.n_o
    }

    pub fn grid_width(&self) -> usize {
        self.grid_width
    }

    pub fn input_bits(&self) -> &[usize] {
        &self.input_bits
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn input_links(&self) -> &LinkMatrix {
        &self.input_links
    }

    pub fn core_links(&self) -> &LinkMatrix {
        &self.core_links
    }

    pub fn output_links(&self) -> &LinkMatrix {
        &self.output_links
    }

    pub fn links(&self, kind: EdgeKind) -> &LinkMatrix {
        match kind {
            EdgeKind::InputToCore => &self.input_links,
            EdgeKind::CoreToCore => &self.core_links,
            EdgeKind::CoreToOutput => &self.output_links,
        }
    }

    pub(crate) fn links_mut(&mut self, kind: EdgeKind) -> &mut LinkMatrix {
        match kind {
            EdgeKind::InputToCore => &mut self.input_links,
            EdgeKind::CoreToCore => &mut self.core_links,
            EdgeKind::CoreToOutput => &mut self.output_links,
        }
    }

    /// Sets an edge weight; zero removes the edge.
    pub fn set_edge(&mut self, kind: EdgeKind, src: usize, dst: usize, weight: u64) {
        self.links_mut(kind).set_weight(src, dst, weight);
    }

    pub fn input_mask(&self, a: usize) -> bool {
        self.mask_i[a]
    }

    pub fn core_mask(&self, c: usize) -> bool {
        self.mask_c[c]
    }

    pub fn set_input_mask(&mut self, a: usize, allowed: bool) {
        self.mask_i[a] = allowed;
    }

    pub fn set_core_mask(&mut self, c: usize, allowed: bool) {
        self.mask_c[c] = allowed;
    }

    pub fn any_masked(&self) -> bool {
        self.mask_i.iter().chain(&self.mask_c).any(|&m| m)
    }

    pub fn input_vertex_of_bit(&self, bit: usize) -> Option<usize> {
        self.input_bits.iter().position(|&b| b == bit)
    }

    /// Sets the remaining feedback count of every maskable edge to `budget`
    /// and of every other edge to zero.
    pub fn arm_budgets(&mut self, budget: u32) {
        for (kind, masks) in [
            (EdgeKind::InputToCore, self.mask_i.clone()),
            (EdgeKind::CoreToCore, self.mask_c.clone()),
            (EdgeKind::CoreToOutput, self.mask_c.clone()),
        ] {
            let links = self.links_mut(kind);
            for (src, allowed) in masks.into_iter().enumerate() {
                for link in links.row_mut(src).values_mut() {
                    link.budget = if allowed { budget } else { 0 };
                }
            }
        }
    }

    /// True while some masked edge can still receive feedback.
    pub fn updates_enabled(&self) -> bool {
        let live = |links: &LinkMatrix, masks: &[bool]| {
            masks.iter().enumerate().any(|(src, &m)| m && links.row(src).any(|(_, l)| l.budget > 0))
        };
        live(&self.input_links, &self.mask_i)
            || live(&self.core_links, &self.mask_c)
            || live(&self.output_links, &self.mask_c)
    }

    /// Layer index of every core (inputs are layer 0). Fails if a core has no
    /// incoming edge or the core links contain a cycle.
    pub fn core_layers(&self) -> Result<Vec<usize>> {
        let n_c = self.n_cores();
        let mut layers: Vec<Option<usize>> = vec![None; n_c];
        let order = self.core_topological_order()?;
        for c in order {
            let from_inputs = (self.input_links.in_degree(c) > 0).then_some(0);
            let from_cores = self.core_links.column_sources(c).into_iter().filter_map(|src| layers[src]).max();
            let below = from_inputs.into_iter().chain(from_cores).max();
            match below {
                Some(l) => layers[c] = Some(l + 1),
                None => return Err(Error::Contract(format!("core {c} has no incoming edge"))),
            }
        }
        Ok(layers.into_iter().map(|l| l.unwrap_or(0)).collect())
    }

    /// Kahn order over the core-to-core links.
    pub(crate) fn core_topological_order(&self) -> Result<Vec<usize>> {
        let n_c = self.n_cores();
        let mut indeg: Vec<usize> = (0..n_c).map(|c| self.core_links.in_degree(c)).collect();
        let mut ready: Vec<usize> = (0..n_c).filter(|&c| indeg[c] == 0).rev().collect();
        let mut order = Vec::with_capacity(n_c);
        while let Some(c) = ready.pop() {
            order.push(c);
            for (dst, _) in self.core_links.row(c) {
                indeg[dst] -= 1;
                if indeg[dst] == 0 {
                    ready.push(dst);
                }
            }
        }
        if order.len() != n_c {
            return Err(Error::Contract("core links contain a cycle".into()));
        }
        Ok(order)
    }

    /// Number of core layers between the inputs and the outputs.
    pub fn depth(&self) -> Result<usize> {
        Ok(self.core_layers()?.into_iter().max().unwrap_or(0))
    }

    /// Smallest admissible feedback-buffer depth, `2 (L - 1) + 1` where `L`
    /// counts the input layer, every core layer and the output layer.
    pub fn required_d_max(&self) -> Result<usize> {
        let layers = self.depth()? + 2;
        Ok(2 * (layers - 1) + 1)
    }

    /// Checks the construction invariants and fixes the feedback-buffer depth
    /// (the minimum admissible one when `d_max` is `None`).
    pub fn finalize(mut self, d_max: Option<usize>) -> Result<Self> {
        let layers = self.core_layers()?;
        for (c, &level) in self.levels.iter().enumerate() {
            let indeg = self.input_links.in_degree(c) + self.core_links.in_degree(c);
            if level > indeg {
                return Err(Error::InvalidLevel { level, size: indeg });
            }
            // Every core at layer k needs a predecessor at layer k - 1.
            let k = layers[c];
            let has_prev = if k == 1 {
                self.input_links.in_degree(c) > 0
            } else {
                self.core_links.column_sources(c).into_iter().any(|src| layers[src] + 1 == k)
            };
            if !has_prev {
                return Err(Error::Contract(format!("core {c} lacks an edge from layer {}", k - 1)));
            }
        }
        let required = self.required_d_max()?;
        let d_max = d_max.unwrap_or(required);
        if d_max < required {
            return Err(Error::Contract(format!("d_max {d_max} is below the required {required}")));
        }
        self.d_max = d_max;
        Ok(self)
    }

    pub(crate) fn set_d_max_unchecked(&mut self, d_max: usize) {
        self.d_max = d_max;
    }

    /// Masked input vertices that still have an outgoing edge.
    pub fn masked_inputs_with_edges(&self) -> Vec<usize> {
        (0..self.n_inputs()).filter(|&a| self.mask_i[a] && self.input_links.out_degree(a) > 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> FiringGraph {
        let mut g = FiringGraph::new(4, vec![2], vec![1], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 10);
        g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
        g
    }

    #[test]
    fn finalize_sets_minimum_buffer_depth() {
        let g = chain().finalize(None).unwrap();
        assert_eq!(g.depth().unwrap(), 1);
        assert_eq!(g.d_max(), 5);
        assert!(chain().finalize(Some(4)).is_err());
    }

    #[test]
    fn level_above_in_degree_is_rejected() {
        let mut g = FiringGraph::new(4, vec![0, 1], vec![3], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 1);
        g.set_edge(EdgeKind::InputToCore, 1, 0, 1);
        assert_eq!(g.finalize(None).unwrap_err(), Error::InvalidLevel { level: 3, size: 2 });
    }

    #[test]
    fn orphan_core_is_rejected() {
        let g = FiringGraph::new(4, vec![0], vec![1], 1).unwrap();
        assert!(matches!(g.finalize(None), Err(Error::Contract(_))));
    }

    #[test]
    fn cycle_is_rejected() {
        let mut g = FiringGraph::new(2, vec![0], vec![1, 1], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 1);
        g.set_edge(EdgeKind::CoreToCore, 0, 1, 1);
        g.set_edge(EdgeKind::CoreToCore, 1, 0, 1);
        assert!(matches!(g.finalize(None), Err(Error::Contract(_))));
    }

    #[test]
    fn duplicate_input_bit_is_rejected() {
        assert!(FiringGraph::new(4, vec![1, 1], vec![1], 1).is_err());
        assert!(FiringGraph::new(4, vec![4], vec![1], 1).is_err());
    }

    #[test]
    fn budgets_follow_masks() {
        let mut g = chain();
        g.arm_budgets(7);
        assert_eq!(g.input_links().get(0, 0).unwrap().budget, 0);
        assert!(!g.updates_enabled());
        g.set_input_mask(0, true);
        g.arm_budgets(7);
        assert_eq!(g.input_links().get(0, 0).unwrap().budget, 7);
        assert_eq!(g.output_links().get(0, 0).unwrap().budget, 0);
        assert!(g.updates_enabled());
    }
}
