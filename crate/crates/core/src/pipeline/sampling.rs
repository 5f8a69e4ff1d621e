use rand::distributions::{Bernoulli, Distribution};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::models::GridModel;

/// Instants consumed before sampling gives up.
pub const DEFAULT_MAX_INSTANTS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleResult {
    /// Sampled grid bits, ascending.
    pub sampled: Vec<usize>,
    /// Preselected grid bits, ascending.
    pub preselected: Vec<usize>,
    pub instants_consumed: u64,
}

/// Draws instants until factor `f` and every preselected bit are active, then
/// admits each other active bit with probability `p_s`; repeats until at
/// least one bit is admitted.
pub fn sample(
    model: &dyn GridModel,
    f: usize,
    p_s: f64,
    preselected: &[usize],
    rng: &mut dyn RngCore,
) -> Result<SampleResult> {
    sample_with_guard(model, f, p_s, preselected, rng, DEFAULT_MAX_INSTANTS)
}

pub fn sample_with_guard(
    model: &dyn GridModel,
    f: usize,
    p_s: f64,
    preselected: &[usize],
    rng: &mut dyn RngCore,
    max_instants: u64,
) -> Result<SampleResult> {
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(Error::InvalidParameter(format!("p_s = {p_s} outside (0, 1]")));
    }
    if f >= model.factor_count() {
        return Err(Error::IndexOutOfRange { index: f, width: model.factor_count() });
    }
    let n = model.width();
    let mut excluded = vec![false; n];
    for &b in preselected {
        if b >= n {
            return Err(Error::IndexOutOfRange { index: b, width: n });
        }
        excluded[b] = true;
    }
    let admit = Bernoulli::new(p_s).expect("checked probability");
    let mut sampled = Vec::new();
    let mut instants = 0;
    while sampled.is_empty() {
        if instants == max_instants {
            return Err(Error::SamplingTimeout(instants));
        }
        instants += 1;
        let state = model.next_state(rng);
        if !state.factors.get(f) || !preselected.iter().all(|&b| state.grid.get(b)) {
            continue;
        }
        for b in state.grid.iter_ones() {
            if !excluded[b] && admit.sample(rng) {
                excluded[b] = true;
                sampled.push(b);
            }
        }
    }
    let mut preselected = preselected.to_vec();
    preselected.sort_unstable();
    preselected.dedup();
    Ok(SampleResult { sampled, preselected, instants_consumed: instants })
}
