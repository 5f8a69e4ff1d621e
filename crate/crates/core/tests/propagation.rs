mod common;

use firing_graph::f2core::{BitVector, CharPoly};
use firing_graph::graph::{
    backward_step, forward_block, forward_step, inject_feedback, structure_update, BackwardState, EdgeKind,
    FiringGraph, ForwardState,
};
use proptest::prelude::*;

fn run_steps(g: &FiringGraph, inputs: &[BitVector]) -> Vec<ForwardState> {
    let mut s = ForwardState::new(g).unwrap();
    inputs
        .iter()
        .map(|x| {
            s = forward_step(g, x, &s).unwrap();
            s.clone()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn block_matches_tick_by_tick(shape in common::shape(), seq in common::input_sequence(5, 160), split in 0usize..40) {
        let g = common::build(&shape);
        let inputs: Vec<BitVector> = seq.iter().map(|x| {
            BitVector::from_bools(&(0..g.n_inputs()).map(|a| x.get(a)).collect::<Vec<_>>())
        }).collect();
        let split = split.min(inputs.len() - 1);
        let states = run_steps(&g, &inputs);
        let (x_i_prev, x_c_prev) = if split == 0 {
            (BitVector::zeros(g.n_inputs()), BitVector::zeros(g.n_cores()))
        } else {
            (states[split - 1].input().clone(), states[split - 1].core().clone())
        };
        let block = forward_block(&g, &x_i_prev, &x_c_prev, &inputs[split..]).unwrap();
        for (t, (x_c, x_o)) in block.iter().enumerate() {
            prop_assert_eq!(x_c, states[split + t].core());
            prop_assert_eq!(x_o, states[split + t].output());
        }
    }

    #[test]
    fn two_layer_vertex_evaluates_its_polynomial(
        set in prop::collection::btree_set(0usize..8, 1..6),
        level_pick in any::<usize>(),
        seq in common::input_sequence(8, 40),
    ) {
        let set: Vec<usize> = set.into_iter().collect();
        let level = 1 + level_pick % set.len();
        let mut g = FiringGraph::new(8, (0..8).collect(), vec![level], 1).unwrap();
        for &a in &set {
            g.set_edge(EdgeKind::InputToCore, a, 0, 1);
        }
        g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
        let g = g.finalize(None).unwrap();
        let poly = CharPoly::new(&set, level, 8).unwrap();
        let states = run_steps(&g, &seq);
        for t in 1..seq.len() {
            prop_assert_eq!(states[t].core().get(0), poly.eval(&seq[t - 1]).unwrap());
        }
    }

    #[test]
    fn joint_output_is_the_conditioned_event(seq in common::input_sequence(6, 40)) {
        // pre = inputs {0, 1, 2}, S = inputs {3, 4, 5}.
        let mut g = FiringGraph::new(6, (0..6).collect(), vec![3, 1, 2], 1).unwrap();
        for a in 0..3 {
            g.set_edge(EdgeKind::InputToCore, a, 0, 1);
            g.set_edge(EdgeKind::InputToCore, a + 3, 1, 9);
        }
        g.set_edge(EdgeKind::CoreToCore, 0, 2, 1);
        g.set_edge(EdgeKind::CoreToCore, 1, 2, 1);
        g.set_edge(EdgeKind::CoreToOutput, 2, 0, 1);
        let g = g.finalize(None).unwrap();
        let pre = CharPoly::new(&[0, 1, 2], 3, 6).unwrap();
        let s = CharPoly::new(&[3, 4, 5], 1, 6).unwrap();
        let states = run_steps(&g, &seq);
        for t in 3..seq.len() {
            let x = &seq[t - 3];
            let expected = pre.eval(x).unwrap() && s.eval(x).unwrap();
            prop_assert_eq!(states[t].output().get(0), expected);
        }
    }

    #[test]
    fn updates_keep_weights_positive_and_never_add_edges(
        shape in common::shape(),
        seq in common::input_sequence(5, 80),
        factor in prop::collection::vec(any::<bool>(), 80),
        p in 1u32..4,
        q in 1u32..4,
    ) {
        let mut g = common::build(&shape);
        for a in 0..g.n_inputs() {
            g.set_input_mask(a, true);
        }
        for c in 0..g.n_cores() {
            g.set_core_mask(c, c % 2 == 0);
        }
        g.arm_budgets(1000);
        let original: Vec<(usize, usize)> = g.edge_triples().iter().map(|&(s, d, _)| (s, d)).collect();
        let max_in = (0..g.n_cores())
            .map(|c| g.core_links().in_degree(c))
            .chain((0..g.n_outputs()).map(|o| g.output_links().in_degree(o)))
            .max()
            .unwrap_or(0) as i64;
        let mut s = ForwardState::new(&g).unwrap();
        let mut b = BackwardState::new(&g);
        for (t, x) in seq.iter().enumerate() {
            let x = BitVector::from_bools(&(0..g.n_inputs()).map(|a| x.get(a)).collect::<Vec<_>>());
            s = forward_step(&g, &x, &s).unwrap();
            b = inject_feedback(&g, &s, &b, factor[t], p, q);
            let emitted = b.magnitude().1;
            let g2 = structure_update(&g, &s, &b);
            let held = b.magnitude().0;
            b = backward_step(&g, &s, &b);
            // Each held value is copied once per predecessor of its vertex.
            prop_assert!(b.magnitude().0 <= (emitted + held) * max_in.max(1));
            g = g2;
            for (src, dst, w) in g.edge_triples() {
                prop_assert!(w > 0);
                prop_assert!(original.contains(&(src, dst)));
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_trajectories() {
    let shape = common::Shape { n_i: 4, layers: vec![2, 2], n_o: 1, choices: (0..256).map(|i| i * 7919).collect() };
    let g = common::build(&shape);
    let inputs: Vec<BitVector> = (0..50u64).map(|t| BitVector::from_state(4, t * 37 % 16)).collect();
    assert_eq!(run_steps(&g, &inputs), run_steps(&g, &inputs));
}

#[test]
fn two_parallel_cores_only_active_one_receives_feedback() {
    let mut g = FiringGraph::new(2, vec![0, 1], vec![1, 1], 1).unwrap();
    g.set_edge(EdgeKind::InputToCore, 0, 0, 5);
    g.set_edge(EdgeKind::InputToCore, 1, 1, 5);
    g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
    g.set_edge(EdgeKind::CoreToOutput, 1, 0, 1);
    let g = g.finalize(None).unwrap();
    let mut s = ForwardState::new(&g).unwrap();
    for x in ["10", "00", "00"] {
        s = forward_step(&g, &x.parse().unwrap(), &s).unwrap();
    }
    assert!(s.output().get(0));
    let b = inject_feedback(&g, &s, &BackwardState::new(&g), true, 1, 1);
    let b = backward_step(&g, &s, &b);
    assert_eq!((b.core(0, 3), b.core(1, 3)), (1, 0));
}
