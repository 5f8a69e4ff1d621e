use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::f2core::BitVector;
use crate::graph::{
    apply_structure_update, forward_block, output_reachable_inputs, BackwardState, FiringGraph, ForwardState,
};
use crate::models::GridModel;
use crate::rng::{stream_rng, DRAIN_STREAM};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrainConfig {
    /// Feedback events each updatable edge may receive.
    pub t: u32,
    /// Tick limit.
    pub t_max: u64,
    pub p: u32,
    pub q: u32,
    /// Number of core layers between inputs and output.
    pub decay: usize,
    /// Ticks propagated per forward block.
    pub batch_size: usize,
    pub seed: u64,
}

impl DrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.p == 0 || self.q == 0 || self.batch_size == 0 {
            return Err(Error::InvalidParameter("T, p, q and batch_size must be positive".into()));
        }
        if self.t_max < self.t as u64 {
            return Err(Error::InvalidParameter(format!("T_max {} is below T {}", self.t_max, self.t)));
        }
        if self.decay == 0 {
            return Err(Error::InvalidParameter("decay must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// No updatable input vertex reaches the output any more.
    Disconnected,
    /// Every updatable edge has used its budget.
    BudgetExhausted,
    /// The tick limit was reached.
    MaxTicks,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrainOutcome {
    pub graph: FiringGraph,
    pub ticks: u64,
    pub stop: StopReason,
}

pub fn drain(g: FiringGraph, model: &dyn GridModel, f: usize, cfg: &DrainConfig) -> Result<DrainOutcome> {
    drain_observed(g, model, f, cfg, &mut |_, _| {})
}

/// Drains `g` against factor `f`, calling `observer(tick, graph)` after every tick.
///
/// Per tick: forward step, then (once the output can reflect a drawn state)
/// inject the feedback of the factor state `decay + 1` ticks back, update the
/// structure, and transmit feedback backward on the graph as it was before the update.
pub fn drain_observed(
    mut g: FiringGraph,
    model: &dyn GridModel,
    f: usize,
    cfg: &DrainConfig,
    observer: &mut dyn FnMut(u64, &FiringGraph),
) -> Result<DrainOutcome> {
    cfg.validate()?;
    if f >= model.factor_count() {
        return Err(Error::IndexOutOfRange { index: f, width: model.factor_count() });
    }
    if g.grid_width() != model.width() {
        return Err(Error::WidthMismatch { expected: model.width(), actual: g.grid_width() });
    }
    let depth = g.depth()?;
    if depth != cfg.decay {
        return Err(Error::Contract(format!("decay {} differs from graph depth {depth}", cfg.decay)));
    }
    g.arm_budgets(cfg.t);

    let bits = g.input_bits().to_vec();
    let mut rng = stream_rng(cfg.seed, DRAIN_STREAM);
    let lag = cfg.decay + 1;
    let mut factor_history: VecDeque<bool> = VecDeque::with_capacity(lag + 1);
    let mut fs = ForwardState::new(&g)?;
    let mut bs = BackwardState::new(&g);
    let mut tick = 0u64;

    if let Some(stop) = stop_reason(&g) {
        return Ok(DrainOutcome { graph: g, ticks: 0, stop });
    }
    while tick < cfg.t_max {
        let len = (cfg.t_max - tick).min(cfg.batch_size as u64) as usize;
        let mut inputs: Vec<BitVector> = Vec::with_capacity(len);
        let mut factors: Vec<bool> = Vec::with_capacity(len);
        for _ in 0..len {
            let s = model.next_projected(&bits, &mut rng);
            inputs.push(s.grid);
            factors.push(s.factors.get(f));
        }

        let mut start = 0;
        let mut block = forward_block(&g, fs.input(), fs.core(), &inputs)?;
        for idx in 0..len {
            let (x_c, x_o) = std::mem::replace(&mut block[idx - start], (BitVector::zeros(0), BitVector::zeros(0)));
            fs.push(inputs[idx].clone(), x_c, x_o);
            if factor_history.len() == lag + 1 {
                factor_history.pop_front();
            }
            factor_history.push_back(factors[idx]);

            if tick >= lag as u64 {
                bs.inject(&fs, factor_history[0], cfg.p, cfg.q);
                let mut next = bs.clone();
                next.transmit(&g, &fs);
                let report = apply_structure_update(&mut g, &fs, &bs);
                bs = next;
                if !report.removed.is_empty() && idx + 1 < len {
                    start = idx + 1;
                    block = forward_block(&g, fs.input(), fs.core(), &inputs[start..])?;
                }
            }

            observer(tick, &g);
            tick += 1;
            if let Some(stop) = stop_reason(&g) {
                return Ok(DrainOutcome { graph: g, ticks: tick, stop });
            }
        }
    }
    Ok(DrainOutcome { graph: g, ticks: tick, stop: StopReason::MaxTicks })
}

fn stop_reason(g: &FiringGraph) -> Option<StopReason> {
    let reachable = output_reachable_inputs(g);
    if !reachable.iter().any(|&a| g.input_mask(a)) {
        return Some(StopReason::Disconnected);
    }
    if !g.updates_enabled() {
        return Some(StopReason::BudgetExhausted);
    }
    None
}
