//! The batched drain against a tick-by-tick drain assembled from the pure
//! propagation functions.

use std::collections::VecDeque;

use firing_graph::graph::{
    backward_step, forward_step, inject_feedback, structure_update, BackwardState, EdgeKind, FiringGraph, ForwardState,
};
use firing_graph::models::{GridModel, SignalPlusNoiseModel, SparseGridModel};
use firing_graph::pipeline::{
    build_joint, build_single, drain, drain_observed, sample, DrainConfig, DrainOutcome, StopReason,
};
use firing_graph::rng::{stream_rng, DRAIN_STREAM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Trace = Vec<Vec<(usize, usize, u64)>>;

fn masked_input_reaches_output(g: &FiringGraph) -> bool {
    let mut seen_core = vec![false; g.n_cores()];
    let mut stack: Vec<usize> = g.output_links().iter().map(|(c, _, _)| c).collect();
    while let Some(c) = stack.pop() {
        if std::mem::replace(&mut seen_core[c], true) {
            continue;
        }
        stack.extend(g.core_links().iter().filter(|&(_, d, _)| d == c).map(|(s, _, _)| s));
    }
    g.input_links().iter().any(|(a, c, _)| seen_core[c] && g.input_mask(a))
}

fn budget_left(g: &FiringGraph) -> bool {
    let input = g.input_links().iter().any(|(a, _, l)| g.input_mask(a) && l.budget > 0);
    let core = [EdgeKind::CoreToCore, EdgeKind::CoreToOutput]
        .into_iter()
        .any(|k| g.links(k).iter().any(|(c, _, l)| g.core_mask(c) && l.budget > 0));
    input || core
}

fn reference_stop(g: &FiringGraph) -> Option<StopReason> {
    if !masked_input_reaches_output(g) {
        Some(StopReason::Disconnected)
    } else if !budget_left(g) {
        Some(StopReason::BudgetExhausted)
    } else {
        None
    }
}

fn reference_drain(mut g: FiringGraph, model: &dyn GridModel, f: usize, cfg: &DrainConfig) -> (DrainOutcome, Trace) {
    g.arm_budgets(cfg.t);
    let mut rng = stream_rng(cfg.seed, DRAIN_STREAM);
    let bits = g.input_bits().to_vec();
    let mut s = ForwardState::new(&g).unwrap();
    let mut b = BackwardState::new(&g);
    let mut history = VecDeque::new();
    let mut trace = Vec::new();
    if let Some(stop) = reference_stop(&g) {
        return (DrainOutcome { graph: g, ticks: 0, stop }, trace);
    }
    for tick in 0..cfg.t_max {
        let x = model.next_projected(&bits, &mut rng);
        history.push_back(x.factors.get(f));
        s = forward_step(&g, &x.grid, &s).unwrap();
        if tick > cfg.decay as u64 {
            let x_f = history.pop_front().unwrap();
            b = inject_feedback(&g, &s, &b, x_f, cfg.p, cfg.q);
            let next_b = backward_step(&g, &s, &b);
            g = structure_update(&g, &s, &b);
            b = next_b;
        }
        trace.push(g.edge_triples());
        if let Some(stop) = reference_stop(&g) {
            return (DrainOutcome { graph: g, ticks: tick + 1, stop }, trace);
        }
    }
    (DrainOutcome { graph: g, ticks: cfg.t_max, stop: StopReason::MaxTicks }, trace)
}

fn observed(g: FiringGraph, model: &dyn GridModel, f: usize, cfg: &DrainConfig) -> (DrainOutcome, Trace) {
    let mut trace = Vec::new();
    let out = drain_observed(g, model, f, cfg, &mut |_, g| trace.push(g.edge_triples())).unwrap();
    (out, trace)
}

fn assert_agrees(g: FiringGraph, model: &dyn GridModel, f: usize, cfg: DrainConfig) {
    let (reference, ref_trace) = reference_drain(g.clone(), model, f, &cfg);
    assert!(reference.ticks > cfg.decay as u64 + 1, "drain ended before any feedback");
    for batch_size in [1, 5, 64] {
        let cfg = DrainConfig { batch_size, ..cfg };
        let (out, trace) = observed(g.clone(), model, f, &cfg);
        assert_eq!(out, reference, "batch {batch_size}");
        assert_eq!(trace, ref_trace, "batch {batch_size}");
    }
}

fn cfg(t: u32, p: u32, q: u32, decay: usize, seed: u64) -> DrainConfig {
    DrainConfig { t, t_max: 4000, p, q, decay, batch_size: 1, seed }
}

#[test]
fn single_graph_on_signal_plus_noise() {
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SignalPlusNoiseModel::new(40, 6, 0.3, 0.4, &mut rng).unwrap();
        let s = sample(&m, 0, 0.5, &[], &mut rng).unwrap();
        let g = build_single(40, &s.sampled, 8).unwrap();
        assert_agrees(g, &m, 0, cfg(60, 1, 1, 1, seed));
    }
}

#[test]
fn single_graph_on_sparse_grid() {
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let m = SparseGridModel::new(30, 6, 0.3, 0.2, &mut rng).unwrap();
        let s = sample(&m, 2, 1.0, &[], &mut rng).unwrap();
        let g = build_single(30, &s.sampled, 5).unwrap();
        assert_agrees(g, &m, 2, cfg(40, 2, 3, 1, seed));
    }
}

#[test]
fn joint_graph_on_signal_plus_noise() {
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let m = SignalPlusNoiseModel::new(30, 6, 0.3, 0.5, &mut rng).unwrap();
        let pre = m.target_bits()[..2].to_vec();
        let s = sample(&m, 0, 0.7, &pre, &mut rng).unwrap();
        let g = build_joint(30, &s.sampled, &s.preselected, 6).unwrap();
        assert_agrees(g, &m, 0, cfg(50, 3, 1, 2, seed));
    }
}

#[test]
fn tick_limit_is_reported() {
    let m = SignalPlusNoiseModel::with_targets(10, vec![0, 1], 0.3, 0.2).unwrap();
    let g = build_single(10, &[0, 1, 5], 50).unwrap();
    let c = DrainConfig { t_max: 30, ..cfg(30, 1, 1, 1, 4) };
    let (reference, _) = reference_drain(g.clone(), &m, 0, &c);
    assert_eq!(reference.stop, StopReason::MaxTicks);
    assert_eq!(drain(g, &m, 0, &DrainConfig { batch_size: 7, ..c }).unwrap(), reference);
}

#[test]
fn noiseless_targets_gain_q_per_event() {
    let m = SignalPlusNoiseModel::with_targets(12, vec![2, 4, 7], 0.4, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = sample(&m, 0, 1.0, &[], &mut rng).unwrap();
    assert_eq!(s.sampled, vec![2, 4, 7]);
    let (n, t, q) = (9, 25, 3);
    let g = build_single(12, &s.sampled, n).unwrap();
    let out = drain(g, &m, 0, &DrainConfig { batch_size: 16, ..cfg(t, 2, q, 1, 5) }).unwrap();
    assert_eq!(out.stop, StopReason::BudgetExhausted);
    for a in 0..3 {
        assert_eq!(out.graph.input_links().weight(a, 0), n + (t * q) as u64);
    }
}

#[test]
fn absent_factor_removes_every_edge() {
    let m = SignalPlusNoiseModel::with_targets(12, vec![0, 1], 0.0, 0.5).unwrap();
    let g = build_single(12, &[0, 3, 5, 8], 3).unwrap();
    let c = DrainConfig { batch_size: 10, ..cfg(100, 1, 1, 1, 2) };
    let out = drain(g.clone(), &m, 0, &c).unwrap();
    assert_eq!(out.stop, StopReason::Disconnected);
    assert_eq!(out.graph.input_links().nnz(), 0);
    assert!(!out.graph.any_masked());
    assert_eq!(reference_drain(g, &m, 0, &c).0, out);
}
