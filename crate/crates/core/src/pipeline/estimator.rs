use rand::RngCore;

use crate::error::{Error, Result};
use crate::f2core::CharPoly;
use crate::graph::{output_reachable_inputs, FiringGraph};
use crate::models::GridModel;

/// Evaluation length used when the caller has no preference.
pub const DEFAULT_EVAL_STEPS: usize = 10_000;

/// Grid bits of updatable inputs that still reach the output, ascending.
pub fn surviving_bits(g: &FiringGraph) -> Vec<usize> {
    output_reachable_inputs(g).into_iter().filter(|&a| g.input_mask(a)).map(|a| g.input_bits()[a]).collect()
}

/// Conjunction of every input that still reaches the output, fixed
/// (preselected) inputs included. Fails when no updatable input survived.
pub fn extract_estimator(g: &FiringGraph) -> Result<CharPoly> {
    let reachable = output_reachable_inputs(g);
    if !reachable.iter().any(|&a| g.input_mask(a)) {
        return Err(Error::NoSurvivors);
    }
    let bits: Vec<usize> = reachable.into_iter().map(|a| g.input_bits()[a]).collect();
    CharPoly::conjunction(&bits, g.grid_width())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub steps: usize,
    /// Instants where the estimator fired.
    pub fired: usize,
    /// Instants where the factor was active.
    pub factor_active: usize,
    /// Instants where both happened.
    pub both: usize,
}

impl Evaluation {
    /// `P̂(f active | estimator fires)`; `None` when it never fired.
    pub fn precision(&self) -> Option<f64> {
        (self.fired > 0).then(|| self.both as f64 / self.fired as f64)
    }

    /// `P̂(estimator fires | f active)`; `None` when the factor never fired.
    pub fn recall(&self) -> Option<f64> {
        (self.factor_active > 0).then(|| self.both as f64 / self.factor_active as f64)
    }

    pub fn precision_or_err(&self) -> Result<f64> {
        self.precision().ok_or(Error::EstimatorSilent)
    }
}

/// Runs `model` for `steps` instants and counts estimator and factor activity.
pub fn evaluate_estimator(
    est: &CharPoly,
    model: &dyn GridModel,
    f: usize,
    steps: usize,
    rng: &mut dyn RngCore,
) -> Result<Evaluation> {
    if steps == 0 {
        return Err(Error::InvalidParameter("evaluation needs at least one step".into()));
    }
    if est.width() != model.width() {
        return Err(Error::WidthMismatch { expected: model.width(), actual: est.width() });
    }
    if f >= model.factor_count() {
        return Err(Error::IndexOutOfRange { index: f, width: model.factor_count() });
    }
    let bits = est.index_set();
    let mut eval = Evaluation { steps, fired: 0, factor_active: 0, both: 0 };
    for _ in 0..steps {
        let s = model.next_projected(&bits, rng);
        let fires = s.grid.count_ones() >= est.level();
        let active = s.factors.get(f);
        eval.fired += fires as usize;
        eval.factor_active += active as usize;
        eval.both += (fires && active) as usize;
    }
    Ok(eval)
}
