//! Forward transmit/process, feedback injection, backward transmit/shift and
//! structure updates.
//!
//! Backward column `k` pairs with forward memory slot `k` (the state `k` ticks
//! ago). Fresh output feedback is written to column 1 and every backward
//! transmission shifts by two, so a vertex at backward depth `i` is gated on
//! its activity `2i + 1` ticks before the feedback was emitted.

use std::collections::VecDeque;

use super::{EdgeKind, FiringGraph, Link};
use crate::error::{Error, Result};
use crate::f2core::BitVector;

/// Current layer states and the last `d_max + 1` input and core states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardState {
    x_o: BitVector,
    mem_i: VecDeque<BitVector>,
    mem_c: VecDeque<BitVector>,
}

impl ForwardState {
    /// All-zero history sized for `g`, which must be finalized.
    pub fn new(g: &FiringGraph) -> Result<Self> {
        if g.d_max() < 3 {
            return Err(Error::Contract(format!("graph d_max {} is below 3; finalize the graph first", g.d_max())));
        }
        let slots = g.d_max() + 1;
        Ok(Self {
            x_o: BitVector::zeros(g.n_outputs()),
            mem_i: VecDeque::from(vec![BitVector::zeros(g.n_inputs()); slots]),
            mem_c: VecDeque::from(vec![BitVector::zeros(g.n_cores()); slots]),
        })
    }

    pub fn input(&self) -> &BitVector {
        &self.mem_i[0]
    }

    pub fn core(&self) -> &BitVector {
        &self.mem_c[0]
    }

    pub fn output(&self) -> &BitVector {
        &self.x_o
    }

    /// Input state `age` ticks ago; slot 0 is the newest.
    pub fn input_at(&self, age: usize) -> &BitVector {
        &self.mem_i[age]
    }

    pub fn core_at(&self, age: usize) -> &BitVector {
        &self.mem_c[age]
    }

    pub fn memory_len(&self) -> usize {
        self.mem_i.len()
    }

    /// Advances one tick in place.
    pub fn advance(&mut self, g: &FiringGraph, x_i_new: BitVector) -> Result<()> {
        if x_i_new.width() != g.n_inputs() {
            return Err(Error::WidthMismatch { expected: g.n_inputs(), actual: x_i_new.width() });
        }
        let (x_c, x_o) = next_layers(g, &self.mem_i[0], &self.mem_c[0]);
        self.push(x_i_new, x_c, x_o);
        Ok(())
    }

    pub(crate) fn push(&mut self, x_i: BitVector, x_c: BitVector, x_o: BitVector) {
        self.mem_i.pop_back();
        self.mem_i.push_front(x_i);
        self.mem_c.pop_back();
        self.mem_c.push_front(x_c);
        self.x_o = x_o;
    }
}

fn next_layers(g: &FiringGraph, x_i: &BitVector, x_c: &BitVector) -> (BitVector, BitVector) {
    let mut counts = g.input_links.propagate(x_i);
    for (acc, extra) in counts.iter_mut().zip(g.core_links.propagate(x_c)) {
        *acc += extra;
    }
    let mut core = BitVector::zeros(g.n_cores());
    for (c, (&n, &level)) in counts.iter().zip(g.levels()).enumerate() {
        if n as usize >= level {
            core.set(c, true);
        }
    }
    let mut out = BitVector::zeros(g.n_outputs());
    for (o, n) in g.output_links.propagate(x_c).into_iter().enumerate() {
        if n >= 1 {
            out.set(o, true);
        }
    }
    (core, out)
}

/// Pure forward step: `x_c = [x_i_prev·I + x_c_prev·C >= level]`, `x_o = [x_c_prev·O >= 1]`.
pub fn forward_step(g: &FiringGraph, x_i_new: &BitVector, s: &ForwardState) -> Result<ForwardState> {
    let mut next = s.clone();
    next.advance(g, x_i_new.clone())?;
    Ok(next)
}

/// Feedback matrices, `n_c × d_max` for cores and `n_o × d_max` for outputs, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardState {
    d_max: usize,
    core: Vec<i64>,
    output: Vec<i64>,
}

impl BackwardState {
    pub fn new(g: &FiringGraph) -> Self {
        Self { d_max: g.d_max(), core: vec![0; g.n_cores() * g.d_max()], output: vec![0; g.n_outputs() * g.d_max()] }
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn core(&self, c: usize, k: usize) -> i64 {
        self.core[c * self.d_max + k]
    }

    pub fn output(&self, o: usize, k: usize) -> i64 {
        self.output[o * self.d_max + k]
    }

    pub fn is_zero(&self) -> bool {
        self.core.iter().chain(&self.output).all(|&v| v == 0)
    }

    /// Sum of absolute feedback held by the core and output matrices.
    pub fn magnitude(&self) -> (i64, i64) {
        let abs = |v: &[i64]| v.iter().map(|x| x.abs()).sum();
        (abs(&self.core), abs(&self.output))
    }

    /// Writes `x_o ∘ ((p + q) x_f − p)` into output column 1; other columns are zero.
    pub fn inject(&mut self, s: &ForwardState, x_f: bool, p: u32, q: u32) {
        self.output.fill(0);
        let value = if x_f { q as i64 } else { -(p as i64) };
        for o in s.output().iter_ones() {
            self.output[o * self.d_max + 1] = value;
        }
    }

    /// Moves feedback one layer back on `g`, gated by core activity, then
    /// shifts by two columns. Output feedback is consumed.
    pub fn transmit(&mut self, g: &FiringGraph, s: &ForwardState) {
        let d = self.d_max;
        let mut next = vec![0i64; self.core.len()];
        if !self.is_zero() {
            for c in 0..g.n_cores() {
                for k in 0..d.saturating_sub(2) {
                    if !s.core_at(k).get(c) {
                        continue;
                    }
                    let from_out: i64 = g.output_links.row(c).map(|(o, _)| self.output[o * d + k]).sum();
                    let from_core: i64 = g.core_links.row(c).map(|(c2, _)| self.core[c2 * d + k]).sum();
                    next[c * d + k + 2] = from_out + from_core;
                }
            }
        }
        self.core = next;
        self.output.fill(0);
    }
}

/// Pure feedback injection.
pub fn inject_feedback(
    _g: &FiringGraph,
    s: &ForwardState,
    b: &BackwardState,
    x_f: bool,
    p: u32,
    q: u32,
) -> BackwardState {
    let mut next = b.clone();
    next.inject(s, x_f, p, q);
    next
}

/// Pure backward transmit and column shift.
pub fn backward_step(g: &FiringGraph, s: &ForwardState, b: &BackwardState) -> BackwardState {
    let mut next = b.clone();
    next.transmit(g, s);
    next
}

/// Pure structure update.
pub fn structure_update(g: &FiringGraph, s: &ForwardState, b: &BackwardState) -> FiringGraph {
    let mut next = g.clone();
    apply_structure_update(&mut next, s, b);
    next
}

/// What one structure update did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateReport {
    /// Feedback events applied to edge weights.
    pub events: usize,
    /// Edges removed, as `(kind, src, dst)`.
    pub removed: Vec<(EdgeKind, usize, usize)>,
}

/// Applies one feedback event per nonzero eligible column, in column order,
/// until the budget runs out or the weight drops to zero. Returns true when
/// the edge must be removed.
fn apply_events(link: &mut Link, events: impl Iterator<Item = i64>, count: &mut usize) -> bool {
    for fb in events {
        if link.budget == 0 {
            break;
        }
        link.budget -= 1;
        *count += 1;
        let w = link.weight as i64 + fb;
        if w <= 0 {
            link.weight = 0;
            return true;
        }
        link.weight = w as u64;
    }
    false
}

pub(crate) fn apply_structure_update(g: &mut FiringGraph, s: &ForwardState, b: &BackwardState) -> UpdateReport {
    let mut report = UpdateReport::default();
    if b.is_zero() {
        return report;
    }
    let d = b.d_max();

    for a in 0..g.n_inputs() {
        if !g.mask_i[a] {
            continue;
        }
        let mem = |k: usize| s.input_at(k).get(a);
        let row = g.input_links.row_mut(a);
        row.retain(|&c, link| {
            let events = (0..d).filter(|&k| mem(k)).map(|k| b.core(c, k)).filter(|&v| v != 0);
            let gone = apply_events(link, events, &mut report.events);
            if gone {
                report.removed.push((EdgeKind::InputToCore, a, c));
            }
            !gone
        });
    }

    for src in 0..g.n_cores() {
        if !g.mask_c[src] {
            continue;
        }
        let mem = |k: usize| s.core_at(k).get(src);
        g.core_links.row_mut(src).retain(|&dst, link| {
            let events = (0..d).filter(|&k| mem(k)).map(|k| b.core(dst, k)).filter(|&v| v != 0);
            let gone = apply_events(link, events, &mut report.events);
            if gone {
                report.removed.push((EdgeKind::CoreToCore, src, dst));
            }
            !gone
        });
        g.output_links.row_mut(src).retain(|&o, link| {
            let events = (0..d).filter(|&k| mem(k)).map(|k| b.output(o, k)).filter(|&v| v != 0);
            let gone = apply_events(link, events, &mut report.events);
            if gone {
                report.removed.push((EdgeKind::CoreToOutput, src, o));
            }
            !gone
        });
    }

    // A vertex whose last outgoing edge vanished leaves the update mask.
    for &(kind, src, _) in &report.removed {
        match kind {
            EdgeKind::InputToCore => {
                if g.input_links.out_degree(src) == 0 {
                    g.mask_i[src] = false;
                }
            }
            EdgeKind::CoreToCore | EdgeKind::CoreToOutput => {
                if g.core_links.out_degree(src) == 0 && g.output_links.out_degree(src) == 0 {
                    g.mask_c[src] = false;
                }
            }
        }
    }
    report
}

/// Propagates a block of consecutive input states in one pass.
///
/// `x_i_prev` and `x_c_prev` are the input and core states of the tick before
/// the block. Returns `(x_c, x_o)` for every tick of the block, identical to
/// calling [`forward_step`] once per input.
pub fn forward_block(
    g: &FiringGraph,
    x_i_prev: &BitVector,
    x_c_prev: &BitVector,
    inputs: &[BitVector],
) -> Result<Vec<(BitVector, BitVector)>> {
    let ticks = inputs.len();
    if ticks == 0 {
        return Ok(Vec::new());
    }
    if let Some(x) = inputs.iter().chain([x_i_prev]).find(|x| x.width() != g.n_inputs()) {
        return Err(Error::WidthMismatch { expected: g.n_inputs(), actual: x.width() });
    }
    let nw = ticks.div_ceil(64);
    let (n_i, n_c, n_o) = (g.n_inputs(), g.n_cores(), g.n_outputs());

    // Input words shifted by one tick: bit t holds the input of tick t - 1.
    let mut input_words = vec![vec![0u64; nw]; n_i];
    for (t, x) in inputs.iter().enumerate() {
        for a in x.iter_ones() {
            input_words[a][t / 64] |= 1 << (t % 64);
        }
    }
    let shifted_inputs: Vec<Vec<u64>> =
        input_words.iter().enumerate().map(|(a, w)| shift_one(w, x_i_prev.get(a))).collect();

    let mut in_sources: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    for (a, c, _) in g.input_links.iter() {
        in_sources[c].push(a);
    }
    let mut core_sources: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    for (src, dst, _) in g.core_links.iter() {
        core_sources[dst].push(src);
    }

    let mut shifted_cores: Vec<Vec<u64>> = vec![Vec::new(); n_c];
    let mut core_words: Vec<Vec<u64>> = vec![vec![0u64; nw]; n_c];
    for c in g.core_topological_order()? {
        let sources: Vec<&[u64]> = in_sources[c]
            .iter()
            .map(|&a| shifted_inputs[a].as_slice())
            .chain(core_sources[c].iter().map(|&s| shifted_cores[s].as_slice()))
            .collect();
        core_words[c] = threshold_words(&sources, g.levels()[c], nw);
        shifted_cores[c] = shift_one(&core_words[c], x_c_prev.get(c));
    }

    let mut out_words = vec![vec![0u64; nw]; n_o];
    for (c, o, _) in g.output_links.iter() {
        for (acc, w) in out_words[o].iter_mut().zip(&shifted_cores[c]) {
            *acc |= w;
        }
    }

    Ok((0..ticks)
        .map(|t| {
            let bit = |w: &Vec<u64>| (w[t / 64] >> (t % 64)) & 1 == 1;
            let mut x_c = BitVector::zeros(n_c);
            for (c, w) in core_words.iter().enumerate() {
                if bit(w) {
                    x_c.set(c, true);
                }
            }
            let mut x_o = BitVector::zeros(n_o);
            for (o, w) in out_words.iter().enumerate() {
                if bit(w) {
                    x_o.set(o, true);
                }
            }
            (x_c, x_o)
        })
        .collect())
}

fn shift_one(words: &[u64], carry_in: bool) -> Vec<u64> {
    let mut carry = carry_in as u64;
    words
        .iter()
        .map(|&w| {
            let out = (w << 1) | carry;
            carry = w >> 63;
            out
        })
        .collect()
}

/// Per tick bit, whether at least `level` of the source words are set.
fn threshold_words(sources: &[&[u64]], level: usize, nw: usize) -> Vec<u64> {
    if level == 0 {
        return vec![u64::MAX; nw];
    }
    if level > sources.len() {
        return vec![0; nw];
    }
    if level == 1 {
        let mut acc = vec![0u64; nw];
        for s in sources {
            for (a, w) in acc.iter_mut().zip(s.iter()) {
                *a |= w;
            }
        }
        return acc;
    }
    let planes = usize::BITS as usize - sources.len().leading_zeros() as usize;
    (0..nw)
        .map(|wi| {
            // Bit-sliced counter: plane j holds bit j of each tick's count.
            let mut counter = vec![0u64; planes];
            for s in sources {
                let mut carry = s[wi];
                for plane in counter.iter_mut() {
                    if carry == 0 {
                        break;
                    }
                    let sum = *plane ^ carry;
                    carry &= *plane;
                    *plane = sum;
                }
            }
            let mut greater = 0u64;
            let mut equal = u64::MAX;
            for (j, plane) in counter.iter().enumerate().rev() {
                if (level >> j) & 1 == 1 {
                    equal &= plane;
                } else {
                    greater |= equal & plane;
                    equal &= !plane;
                }
            }
            greater | equal
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> FiringGraph {
        let mut g = FiringGraph::new(1, vec![0], vec![1], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 10);
        g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
        g.finalize(None).unwrap()
    }

    fn bit(on: bool) -> BitVector {
        BitVector::from_bools(&[on])
    }

    #[test]
    fn chain_fires_two_ticks_later() {
        let g = chain();
        let mut s = ForwardState::new(&g).unwrap();
        let mut trace = Vec::new();
        for t in 0..5 {
            s.advance(&g, bit(t == 1)).unwrap();
            trace.push((s.core().get(0), s.output().get(0)));
        }
        assert_eq!(trace, vec![(false, false), (false, false), (true, false), (false, true), (false, false)]);
    }

    #[test]
    fn and_vertex_needs_all_inputs() {
        let mut g = FiringGraph::new(2, vec![0, 1], vec![2], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 1);
        g.set_edge(EdgeKind::InputToCore, 1, 0, 1);
        g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
        let g = g.finalize(None).unwrap();
        let s = ForwardState::new(&g).unwrap();
        let s = forward_step(&g, &"10".parse().unwrap(), &s).unwrap();
        let s = forward_step(&g, &"00".parse().unwrap(), &s).unwrap();
        assert!(!s.core().get(0));
    }

    #[test]
    fn forward_rejects_width_mismatch() {
        let g = chain();
        let s = ForwardState::new(&g).unwrap();
        assert!(matches!(
            forward_step(&g, &BitVector::zeros(2), &s),
            Err(Error::WidthMismatch { expected: 1, actual: 2 })
        ));
    }

    #[test]
    fn injection_values() {
        let g = chain();
        let mut s = ForwardState::new(&g).unwrap();
        let b = BackwardState::new(&g);
        assert!(inject_feedback(&g, &s, &b, true, 1, 1).is_zero());
        s.push(bit(false), bit(false), bit(true));
        assert_eq!(inject_feedback(&g, &s, &b, true, 1, 1).output(0, 1), 1);
        assert_eq!(inject_feedback(&g, &s, &b, false, 2, 3).output(0, 1), -2);
    }

    #[test]
    fn chain_feedback_reaches_the_causing_input() {
        let mut g = chain();
        g.set_input_mask(0, true);
        g.arm_budgets(100);
        let mut s = ForwardState::new(&g).unwrap();
        let mut b = BackwardState::new(&g);
        // Input fires only at tick 0; the output fires at tick 2.
        for t in 0..6 {
            s.advance(&g, bit(t == 0)).unwrap();
            b.inject(&s, true, 1, 1);
            let next = backward_step(&g, &s, &b);
            g = structure_update(&g, &s, &b);
            b = next;
        }
        assert_eq!(g.input_links().weight(0, 0), 11);
        assert_eq!(g.input_links().get(0, 0).unwrap().budget, 99);
    }

    #[test]
    fn inactive_core_blocks_feedback() {
        let g = chain();
        let mut s = ForwardState::new(&g).unwrap();
        s.push(bit(false), bit(false), bit(true));
        let mut b = BackwardState::new(&g);
        b.inject(&s, true, 1, 1);
        assert!(backward_step(&g, &s, &b).is_zero());
    }

    #[test]
    fn negative_feedback_removes_edge_and_mask() {
        let mut g = FiringGraph::new(1, vec![0], vec![1], 1).unwrap();
        g.set_edge(EdgeKind::InputToCore, 0, 0, 2);
        g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
        let mut g = g.finalize(None).unwrap();
        g.set_input_mask(0, true);
        g.arm_budgets(10);
        let mut s = ForwardState::new(&g).unwrap();
        // Age 3 input active, core feedback -3 in column 3.
        s.push(bit(true), bit(false), bit(false));
        for _ in 0..3 {
            s.push(bit(false), bit(false), bit(false));
        }
        let mut b = BackwardState::new(&g);
        b.core[3] = -3;
        let report = apply_structure_update(&mut g, &s, &b);
        assert_eq!(report.removed, vec![(EdgeKind::InputToCore, 0, 0)]);
        assert_eq!(g.input_links().weight(0, 0), 0);
        assert!(!g.input_mask(0));
    }

    #[test]
    fn unmasked_edge_is_unchanged() {
        let mut g = chain();
        g.arm_budgets(10);
        let mut s = ForwardState::new(&g).unwrap();
        s.push(bit(true), bit(false), bit(false));
        let mut b = BackwardState::new(&g);
        b.core[0] = 1;
        assert_eq!(structure_update(&g, &s, &b), g);
    }

    #[test]
    fn threshold_counts_match_naive() {
        let sources: Vec<Vec<u64>> =
            (0..7u64).map(|i| vec![0x9E37_79B9_7F4A_7C15u64.rotate_left(i as u32 * 9)]).collect();
        let refs: Vec<&[u64]> = sources.iter().map(Vec::as_slice).collect();
        for level in 0..=8 {
            let got = threshold_words(&refs, level, 1)[0];
            for t in 0..64 {
                let n = sources.iter().filter(|w| (w[0] >> t) & 1 == 1).count();
                assert_eq!((got >> t) & 1 == 1, n >= level, "level {level} tick {t}");
            }
        }
    }
}
