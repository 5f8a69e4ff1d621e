use std::collections::BTreeSet;

use super::FiringGraph;

/// Input vertices with a directed path of live edges to some output.
pub fn output_reachable_inputs(g: &FiringGraph) -> BTreeSet<usize> {
    let n_c = g.n_cores();
    let mut core_preds: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    for (src, dst, _) in g.core_links().iter() {
        core_preds[dst].push(src);
    }
    let mut reaches = vec![false; n_c];
    let mut stack: Vec<usize> = (0..n_c).filter(|&c| g.output_links().out_degree(c) > 0).collect();
    for &c in &stack {
        reaches[c] = true;
    }
    while let Some(c) = stack.pop() {
        for &p in &core_preds[c] {
            if !reaches[p] {
                reaches[p] = true;
                stack.push(p);
            }
        }
    }
    g.input_links().iter().filter(|(_, c, _)| reaches[*c]).map(|(a, _, _)| a).collect()
}

/// Weakly connected components of the live-edge graph; isolated vertices count.
pub fn connected_component_count(g: &FiringGraph) -> usize {
    let (n_i, n_c) = (g.n_inputs(), g.n_cores());
    let n = n_i + n_c + g.n_outputs();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut components = n;
    let edges = g
        .input_links()
        .iter()
        .map(|(a, c, _)| (a, n_i + c))
        .chain(g.core_links().iter().map(|(s, d, _)| (n_i + s, n_i + d)))
        .chain(g.output_links().iter().map(|(c, o, _)| (n_i + c, n_i + n_c + o)));
    for (u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components
}
