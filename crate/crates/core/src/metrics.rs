//! Purity, precision and recall coefficients and the score process.

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::GridModel;
use crate::pipeline::{run_round, surviving_bits, RoundConfig};
use crate::rng::{repetition_seed, stream_rng, MODEL_STREAM};

/// Recall `μ`, precision coefficient `ν` and purity `ω = ν / μ` of a couple `(I, l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub mu: f64,
    pub nu: f64,
    pub omega: f64,
}

impl Coefficients {
    pub fn from_rates(mu: f64, nu: f64) -> Result<Self> {
        if mu == 0.0 {
            return Err(Error::UndefinedPurity);
        }
        Ok(Self { mu, nu, omega: nu / mu })
    }
}

pub fn coefficients_exact(indices: &[usize], level: usize, model: &dyn GridModel, f: usize) -> Result<Coefficients> {
    let (mu, nu) = model.conditional_rates(indices, level, f)?;
    Coefficients::from_rates(mu, nu)
}

/// `φ = p_f / (p_f + (1 - p_f) ω)`.
pub fn precision_from_purity(omega: f64, factor_rate: f64) -> Result<f64> {
    if factor_rate == 0.0 {
        return Err(Error::UndefinedPrecision);
    }
    if omega.is_nan() || omega < 0.0 || !(0.0..=1.0).contains(&factor_rate) {
        return Err(Error::InvalidParameter(format!(
            "need omega >= 0 and a factor rate in (0, 1], got ({omega}, {factor_rate})"
        )));
    }
    Ok(factor_rate / (factor_rate + (1.0 - factor_rate) * omega))
}

/// `ψ = μ`; zero when the level cannot be reached.
pub fn recall_psi(indices: &[usize], level: usize, model: &dyn GridModel, f: usize) -> Result<f64> {
    Ok(model.conditional_rates(indices, level, f)?.0)
}

/// The 5-tuple `(ω, N, T, p, q)` driving a drain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreParams {
    pub omega_target: f64,
    pub n: u64,
    pub t: u32,
    pub p: u32,
    pub q: u32,
}

impl ScoreParams {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.p == 0 || self.q == 0 {
            return Err(Error::InvalidParameter(format!(
                "need T, p, q >= 1, got T = {}, p = {}, q = {}",
                self.t, self.p, self.q
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreStats {
    pub mean: f64,
    pub var_per_step: f64,
    /// Per-step success probability.
    pub q_s: f64,
}

/// Mean `N + T (φ (p + q) - p)` and per-step variance `(p + q)^2 φ (1 - φ)`.
pub fn score_stats(sp: &ScoreParams, phi: f64) -> Result<ScoreStats> {
    sp.validate()?;
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!("phi = {phi} is not a probability")));
    }
    let pq = (sp.p + sp.q) as f64;
    Ok(ScoreStats {
        mean: sp.n as f64 + sp.t as f64 * (phi * pq - sp.p as f64),
        var_per_step: pq * pq * phi * (1.0 - phi),
        q_s: phi,
    })
}

/// Cumulative score after each of `T` steps of `+q` with probability `φ`, else `-p`.
pub fn simulate_score(sp: &ScoreParams, phi: f64, seed: u64) -> Result<Vec<i64>> {
    sp.validate()?;
    let step = Bernoulli::new(phi).map_err(|_| Error::InvalidParameter(format!("phi = {phi} is not a probability")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = sp.n as i64;
    Ok((0..sp.t)
        .map(|_| {
            s += if step.sample(&mut rng) { sp.q as i64 } else { -(sp.p as i64) };
            s
        })
        .collect())
}

/// A Monte-Carlo proportion with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub estimate: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl Proportion {
    pub fn from_counts(hits: usize, trials: usize) -> Self {
        if trials == 0 {
            return Self { estimate: 0.0, std_err: 0.0, trials };
        }
        let p = hits as f64 / trials as f64;
        Self { estimate: p, std_err: (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }
}

/// Monte-Carlo `(μ̂, ν̂)` of `P_I^l` from `draws` instants of `model`.
///
/// Returns `None` for a rate whose conditioning event never occurred.
pub fn estimate_rates(
    indices: &[usize],
    level: usize,
    model: &dyn GridModel,
    f: usize,
    draws: usize,
    rng: &mut dyn rand::RngCore,
) -> (Option<f64>, Option<f64>) {
    let (mut on, mut on_fired, mut off, mut off_fired) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..draws {
        let s = model.next_projected(indices, rng);
        let fired = s.grid.count_ones() >= level;
        if s.factors.get(f) {
            on += 1;
            on_fired += fired as usize;
        } else {
            off += 1;
            off_fired += fired as usize;
        }
    }
    let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
    (ratio(on_fired, on), ratio(off_fired, off))
}

/// Event whose probability [`estimate_stopping_probability`] estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoppingEvent {
    /// No updatable input keeps an edge to the output.
    NoSurvivors,
    /// Every sampled bit linked to the factor lost its edge.
    AllTargetsRemoved,
}

/// Monte-Carlo probability of `event` over `reps` independent
/// sample-build-drain rounds. Repetition `r` uses seed `seed ^ r`.
pub fn estimate_stopping_probability(
    model: &dyn GridModel,
    round: &RoundConfig,
    reps: usize,
    seed: u64,
    event: StoppingEvent,
) -> Result<Proportion> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if round.score.t == 0 {
        return Ok(Proportion::from_counts(0, reps));
    }
    let targets = model.linked_bits(round.factor);
    let mut hits = 0;
    for r in 0..reps {
        let rep_seed = repetition_seed(seed, r as u64);
        let mut rng = stream_rng(rep_seed, MODEL_STREAM);
        let result = run_round(model, round, &mut rng, rep_seed)?;
        let survivors = surviving_bits(&result.outcome.graph);
        let happened = match event {
            StoppingEvent::NoSurvivors => survivors.is_empty(),
            StoppingEvent::AllTargetsRemoved => !survivors.iter().any(|b| targets.binary_search(b).is_ok()),
        };
        hits += happened as usize;
    }
    Ok(Proportion::from_counts(hits, reps))
}
