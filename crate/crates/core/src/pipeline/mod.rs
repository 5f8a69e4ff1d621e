//! Sampling, graph construction, draining and estimator extraction.

mod builders;
mod drain;
mod estimator;
mod sampling;

pub use builders::{build_joint, build_single, JOINT_AND_CORE, JOINT_PRE_CORE, JOINT_SAMPLED_CORE};
pub use drain::{drain, drain_observed, DrainConfig, DrainOutcome, StopReason};
pub use estimator::{evaluate_estimator, extract_estimator, surviving_bits, Evaluation, DEFAULT_EVAL_STEPS};
pub use sampling::{sample, sample_with_guard, SampleResult, DEFAULT_MAX_INSTANTS};

use rand::RngCore;

use crate::error::Result;
use crate::graph::FiringGraph;
use crate::metrics::ScoreParams;
use crate::models::GridModel;

/// Everything one sample-build-drain round needs besides the model.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundConfig {
    pub factor: usize,
    pub p_s: f64,
    /// Empty for a single sampled graph; otherwise the joint graph's preselected bits.
    pub preselected: Vec<usize>,
    pub score: ScoreParams,
    pub t_max: u64,
    pub batch_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub sample: SampleResult,
    pub outcome: DrainOutcome,
}

/// Samples with `rng`, builds the single or joint graph, and drains it with
/// the drain stream of `drain_seed`.
pub fn run_round(model: &dyn GridModel, cfg: &RoundConfig, rng: &mut dyn RngCore, drain_seed: u64) -> Result<Round> {
    run_round_observed(model, cfg, rng, drain_seed, &mut |_, _| {})
}

/// [`run_round`] with a per-tick observer, as in [`drain_observed`].
pub fn run_round_observed(
    model: &dyn GridModel,
    cfg: &RoundConfig,
    rng: &mut dyn RngCore,
    drain_seed: u64,
    observer: &mut dyn FnMut(u64, &FiringGraph),
) -> Result<Round> {
    cfg.score.validate()?;
    let sample = sample(model, cfg.factor, cfg.p_s, &cfg.preselected, rng)?;
    let (graph, decay) = if cfg.preselected.is_empty() {
        (build_single(model.width(), &sample.sampled, cfg.score.n.max(1))?, 1)
    } else {
        (build_joint(model.width(), &sample.sampled, &sample.preselected, cfg.score.n.max(1))?, 2)
    };
    let drain_cfg = DrainConfig {
        t: cfg.score.t,
        t_max: cfg.t_max,
        p: cfg.score.p,
        q: cfg.score.q,
        decay,
        batch_size: cfg.batch_size,
        seed: drain_seed,
    };
    let outcome = drain_observed(graph, model, cfg.factor, &drain_cfg, observer)?;
    Ok(Round { sample, outcome })
}
