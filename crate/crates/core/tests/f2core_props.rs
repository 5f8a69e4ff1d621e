use firing_graph::f2core::{
    norm, product, segment, subsets_of_size, verify_decomposition, verify_element_split, verify_partition, BitVector,
    CharPoly, DecompositionCase, ExplicitDistribution,
};
use proptest::prelude::*;

const WIDTH: usize = 7;

fn index_set() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..WIDTH, 0..=WIDTH).prop_map(|s| s.into_iter().collect())
}

fn state() -> impl Strategy<Value = BitVector> {
    (0u64..1 << WIDTH).prop_map(|s| BitVector::from_state(WIDTH, s))
}

/// Random table normalised to a distribution over `WIDTH` bits.
fn distribution() -> impl Strategy<Value = ExplicitDistribution> {
    prop::collection::vec(0u32..100, 1 << WIDTH).prop_filter_map("all-zero table", |w| {
        let total: u32 = w.iter().sum();
        (total > 0)
            .then(|| ExplicitDistribution::new(WIDTH, w.iter().map(|&v| v as f64 / total as f64).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn threshold_equals_some_active_subset(set in index_set(), level in 0usize..=WIDTH, x in state()) {
        prop_assume!(level <= set.len());
        let p = CharPoly::new(&set, level, WIDTH).unwrap();
        let literal = subsets_of_size(&set, level).iter().any(|j| j.iter().all(|&b| x.get(b)));
        prop_assert_eq!(p.eval(&x).unwrap(), literal);
    }

    #[test]
    fn segment_outside_range(set in index_set(), x in state(), over in 1i64..4, under in 1i64..4) {
        let m = BitVector::from_indices(WIDTH, set.iter().copied()).unwrap();
        prop_assert!(segment(&m, 0, &x));
        prop_assert!(!segment(&m, -under, &x));
        prop_assert!(!segment(&m, set.len() as i64 + over, &x));
    }

    #[test]
    fn norm_and_product_sum_over_states(
        a in index_set(), la in 0usize..4, b in index_set(), lb in 0usize..4, d in distribution(),
    ) {
        prop_assume!(la <= a.len() && lb <= b.len());
        let pa = CharPoly::new(&a, la, WIDTH).unwrap();
        let pb = CharPoly::new(&b, lb, WIDTH).unwrap();
        let (mut na, mut ab) = (0.0, 0.0);
        for s in 0..1u64 << WIDTH {
            let x = BitVector::from_state(WIDTH, s);
            let (fa, fb) = (pa.eval(&x).unwrap(), pb.eval(&x).unwrap());
            if fa {
                na += d.prob(s);
            }
            if fa && fb {
                ab += d.prob(s);
            }
        }
        prop_assert!((norm(&pa, &d).unwrap() - na).abs() < 1e-12);
        prop_assert!((product(&[pa.clone(), pb], &d).unwrap() - ab).abs() < 1e-12);
        prop_assert!((product(&[pa.clone(), pa.clone()], &d).unwrap() - na).abs() < 1e-12);
    }

    #[test]
    fn point_mass_norm_is_evaluation(set in index_set(), level in 0usize..4, x in state()) {
        prop_assume!(level <= set.len());
        let p = CharPoly::new(&set, level, WIDTH).unwrap();
        let d = ExplicitDistribution::point_mass(&x).unwrap();
        prop_assert_eq!(norm(&p, &d).unwrap(), if p.eval(&x).unwrap() { 1.0 } else { 0.0 });
    }

    #[test]
    fn partition_identity(set in index_set(), side in prop::collection::vec(any::<bool>(), WIDTH)) {
        prop_assume!(!set.is_empty());
        let (j, k): (Vec<usize>, Vec<usize>) = set.iter().partition(|&&b| side[b]);
        prop_assert!(verify_partition(&set, &j, &k, WIDTH).unwrap());
    }

    #[test]
    fn element_split_identity(set in index_set(), pick in any::<usize>()) {
        prop_assume!(!set.is_empty());
        let b = set[pick % set.len()];
        prop_assert!(verify_element_split(&set, b, WIDTH).unwrap());
    }

    #[test]
    fn decomposition_identity(
        role in prop::collection::vec(0u8..3, WIDTH),
        in_k in prop::collection::vec(any::<bool>(), WIDTH),
        lu in any::<usize>(),
        lv in any::<usize>(),
    ) {
        // role 0: outside, 1: outer set I, 2: inner set I'.
        let outer: Vec<usize> = (0..WIDTH).filter(|&b| role[b] == 1).collect();
        let inner: Vec<usize> = (0..WIDTH).filter(|&b| role[b] == 2).collect();
        let k: Vec<usize> = inner.iter().copied().filter(|&b| in_k[b]).collect();
        prop_assume!(!outer.is_empty() && !k.is_empty());
        let case = DecompositionCase {
            outer_level: 1 + lu % outer.len(),
            inner_level: 1 + lv % k.len(),
            outer,
            inner,
            k,
        };
        prop_assert!(verify_decomposition(&case, WIDTH).unwrap());
    }

    #[test]
    fn text_round_trip(x in state()) {
        let text = x.to_string();
        prop_assert_eq!(text.len(), WIDTH);
        prop_assert_eq!(text.parse::<BitVector>().unwrap(), x);
    }
}
