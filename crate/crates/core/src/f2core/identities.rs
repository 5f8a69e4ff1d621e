//! Exhaustive checkers for the partition and two-layer decomposition identities.
//!
//! Each checker enumerates all `2^width` grid states and compares both sides
//! of the identity literally, using [`segment`] for the single-level terms.

use crate::error::{Error, Result};
use crate::f2core::bitvec::BitVector;
use crate::f2core::poly::{check_enumerable, segment, CharPoly};

/// Every `size`-element subset of `items`, in lexicographic order.
pub fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let needed = size - cur.len();
        for i in start..items.len() {
            if items.len() - i < needed {
                break;
            }
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= items.len() {
        rec(items, size, 0, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

fn mask(set: &[usize], width: usize) -> Result<BitVector> {
    BitVector::from_indices(width, set.iter().copied())
}

fn states(width: usize) -> impl Iterator<Item = BitVector> {
    (0..1u64 << width).map(move |s| BitVector::from_state(width, s))
}

/// Checks `P_I^{l0}[x] = Σ_{l=l0}^{|I|} Σ_{j=0}^{|J|} P_{J,j}[x] · P_{K,l-j}[x]`
/// for every state and every `l0` in `1..=|I|`.
///
/// When one side of the partition is a singleton `{b}`, the element split
/// identity of [`verify_element_split`] is checked for `b` as well.
pub fn verify_partition(i: &[usize], j: &[usize], k: &[usize], width: usize) -> Result<bool> {
    check_enumerable(width)?;
    let im = mask(i, width)?;
    let jm = mask(j, width)?;
    let km = mask(k, width)?;
    if jm.and_count(&km) != 0 || jm.or(&km) != im {
        return Err(Error::Contract("J and K must partition I".into()));
    }
    let size_i = im.count_ones();
    let size_j = jm.count_ones() as i64;
    for x in states(width) {
        for l0 in 1..=size_i {
            let lhs = CharPoly::from_mask(im.clone(), l0)?.eval_unchecked(&x);
            let rhs = (l0 as i64..=size_i as i64)
                .any(|l| (0..=size_j).any(|jl| segment(&jm, jl, &x) && segment(&km, l - jl, &x)));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    for single in [j, k] {
        if let [b] = single {
            if !verify_element_split(i, *b, width)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks `P_{I,l}[x] = P_{I∖{b},l}[x] · P_{{b},0}[x] + P_{I∖{b},l-1}[x] · P_{{b},1}[x]`
/// for every state and every `l` in `0..=|I|+1`.
pub fn verify_element_split(i: &[usize], b: usize, width: usize) -> Result<bool> {
    check_enumerable(width)?;
    let im = mask(i, width)?;
    if b >= width || !im.get(b) {
        return Err(Error::Contract(format!("element {b} is not in I")));
    }
    let bm = mask(&[b], width)?;
    let rest = im.and_not(&bm);
    let top = im.count_ones() as i64 + 1;
    for x in states(width) {
        for l in 0..=top {
            let lhs = segment(&im, l, &x);
            let rhs =
                (segment(&rest, l, &x) && segment(&bm, 0, &x)) || (segment(&rest, l - 1, &x) && segment(&bm, 1, &x));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Layer-1 vertices `u(I, l_u)` and `v(I', l_v)` feeding `w({u, v}, 2)`, with
/// `K ⊆ I'` the set of bits whose joint activity is conditioned on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCase {
    pub outer: Vec<usize>,
    pub outer_level: usize,
    pub inner: Vec<usize>,
    pub inner_level: usize,
    pub k: Vec<usize>,
}

/// Checks `P_{K,|K|}[x] · P_{{u,v},2}[x'] = Σ_{l=l_u}^{|I|} Σ_{J ∈ S(I,l)} P_{J∪K, l+|K|}[x]`
/// with `x' = [P_u[x], P_v[x]]`, and the single-bit special case
/// `P_{b,1}[x] · P_{{u,v},2}[x'] = P_{I∪{b}, |I|+1}[x]` whenever
/// `l_u = |I|`, `l_v = 1` and `K = {b}`.
pub fn verify_decomposition(case: &DecompositionCase, width: usize) -> Result<bool> {
    check_enumerable(width)?;
    let im = mask(&case.outer, width)?;
    let ipm = mask(&case.inner, width)?;
    let km = mask(&case.k, width)?;
    if im.and_count(&ipm) != 0 {
        return Err(Error::Contract("I and I' must be disjoint".into()));
    }
    if !km.is_subset_of(&ipm) || km.count_ones() < case.inner_level {
        return Err(Error::Contract("K must be a subset of I' with |K| >= l_v".into()));
    }
    if case.outer_level == 0 || case.inner_level == 0 {
        return Err(Error::Contract("levels of u and v must be positive".into()));
    }
    let u = CharPoly::from_mask(im.clone(), case.outer_level)?;
    let v = CharPoly::from_mask(ipm.clone(), case.inner_level)?;

    let size_i = im.count_ones();
    let size_k = km.count_ones() as i64;
    let outer_subsets: Vec<Vec<BitVector>> = (0..=size_i)
        .map(|l| {
            subsets_of_size(&case.outer, l)
                .into_iter()
                .map(|js| mask(&js, width).map(|jm| jm.or(&km)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let pair = BitVector::ones(2);

    let special = case.outer_level == size_i && case.inner_level == 1 && case.k.len() == 1;
    let joined = im.or(&km);

    for x in states(width) {
        let x_prime = BitVector::from_bools(&[u.eval_unchecked(&x), v.eval_unchecked(&x)]);
        let w_fires = segment(&pair, 2, &x_prime);
        let lhs = segment(&km, size_k, &x) && w_fires;
        let rhs =
            (case.outer_level..=size_i).any(|l| outer_subsets[l].iter().any(|jk| segment(jk, l as i64 + size_k, &x)));
        if lhs != rhs {
            return Ok(false);
        }
        if special {
            let lhs4 = segment(&km, 1, &x) && w_fires;
            let rhs4 = segment(&joined, size_i as i64 + 1, &x);
            if lhs4 != rhs4 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
