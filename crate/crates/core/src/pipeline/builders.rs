use crate::error::{Error, Result};
use crate::graph::{EdgeKind, FiringGraph};

fn sorted_unique(bits: &[usize], what: &str) -> Result<Vec<usize>> {
    let mut v = bits.to_vec();
    v.sort_unstable();
    let len = v.len();
    v.dedup();
    if v.len() != len {
        return Err(Error::Contract(format!("{what} contains duplicate bits")));
    }
    Ok(v)
}

/// Inputs `S`, one core `v(S, 1)` and one output. Input edges weigh `n_weight`
/// and are the only updatable ones.
pub fn build_single(grid_width: usize, sampled: &[usize], n_weight: u64) -> Result<FiringGraph> {
    if sampled.is_empty() {
        return Err(Error::Contract("sampled set is empty".into()));
    }
    if n_weight == 0 {
        return Err(Error::Contract("initial weight must be positive".into()));
    }
    let bits = sorted_unique(sampled, "sampled set")?;
    let mut g = FiringGraph::new(grid_width, bits.clone(), vec![1], 1)?;
    for a in 0..bits.len() {
        g.set_edge(EdgeKind::InputToCore, a, 0, n_weight);
        g.set_input_mask(a, true);
    }
    g.set_edge(EdgeKind::CoreToOutput, 0, 0, 1);
    g.finalize(None)
}

/// Core index of `u(pre, |pre|)` in a joint graph.
pub const JOINT_PRE_CORE: usize = 0;
/// Core index of `v(S, 1)`.
pub const JOINT_SAMPLED_CORE: usize = 1;
/// Core index of `w({u, v}, 2)`.
pub const JOINT_AND_CORE: usize = 2;

/// Inputs `S ∪ pre` in grid order; `u(pre, |pre|)` with fixed unit edges,
/// `v(S, 1)` with updatable edges of weight `n_weight`, `w({u, v}, 2)` and one output.
pub fn build_joint(grid_width: usize, sampled: &[usize], preselected: &[usize], n_weight: u64) -> Result<FiringGraph> {
    if sampled.is_empty() || preselected.is_empty() {
        return Err(Error::Contract("sampled and preselected sets must be nonempty".into()));
    }
    if n_weight == 0 {
        return Err(Error::Contract("initial weight must be positive".into()));
    }
    let s = sorted_unique(sampled, "sampled set")?;
    let pre = sorted_unique(preselected, "preselected set")?;
    if s.iter().any(|b| pre.binary_search(b).is_ok()) {
        return Err(Error::Contract("sampled and preselected sets overlap".into()));
    }
    let mut bits: Vec<usize> = s.iter().chain(&pre).copied().collect();
    bits.sort_unstable();
    let mut g = FiringGraph::new(grid_width, bits.clone(), vec![pre.len(), 1, 2], 1)?;
    for (a, b) in bits.iter().enumerate() {
        if pre.binary_search(b).is_ok() {
            g.set_edge(EdgeKind::InputToCore, a, JOINT_PRE_CORE, 1);
        } else {
            g.set_edge(EdgeKind::InputToCore, a, JOINT_SAMPLED_CORE, n_weight);
            g.set_input_mask(a, true);
        }
    }
    g.set_edge(EdgeKind::CoreToCore, JOINT_PRE_CORE, JOINT_AND_CORE, 1);
    g.set_edge(EdgeKind::CoreToCore, JOINT_SAMPLED_CORE, JOINT_AND_CORE, 1);
    g.set_edge(EdgeKind::CoreToOutput, JOINT_AND_CORE, 0, 1);
    g.finalize(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_component_count;

    #[test]
    fn single_shape() {
        let g = build_single(10, &[7, 2, 4], 10).unwrap();
        assert_eq!(g.input_bits(), &[2, 4, 7]);
        assert_eq!(g.input_links().nnz(), 3);
        assert!(g.input_links().iter().all(|(_, _, l)| l.weight == 10));
        assert_eq!((g.n_cores(), g.n_outputs(), g.levels()[0]), (1, 1, 1));
        assert_eq!(g.depth().unwrap(), 1);
        assert_eq!(connected_component_count(&g), 1);
        assert!(build_single(10, &[], 10).is_err());
    }

    #[test]
    fn joint_shape() {
        let g = build_joint(10, &[1, 8], &[3, 5, 6], 4).unwrap();
        assert_eq!(g.input_bits(), &[1, 3, 5, 6, 8]);
        assert_eq!(g.levels(), &[3, 1, 2]);
        assert_eq!(g.depth().unwrap(), 2);
        assert_eq!(g.d_max(), 7);
        let masked: Vec<bool> = (0..5).map(|a| g.input_mask(a)).collect();
        assert_eq!(masked, vec![true, false, false, false, true]);
        assert_eq!(g.input_links().weight(4, JOINT_SAMPLED_CORE), 4);
        assert!(matches!(build_joint(10, &[1, 3], &[3], 4), Err(Error::Contract(_))));
    }
}
