use rand::distributions::{Bernoulli, Distribution};
use rand::seq::index::sample;
use rand::RngCore;

use super::{binomial_tail, check_bits, check_probability, GridModel, GridSample};
use crate::error::{Error, Result};
use crate::f2core::BitVector;

/// One latent factor linked to `k` target bits; every bit also fires on its
/// own with probability `p_n`.
#[derive(Clone, Debug)]
pub struct SignalPlusNoiseModel {
    n: usize,
    p_f: f64,
    p_n: f64,
    target_bits: Vec<usize>,
    is_target: Vec<bool>,
    factor: Bernoulli,
    noise: Bernoulli,
}

impl SignalPlusNoiseModel {
    /// Picks `k` target bits uniformly at random.
    pub fn new(n: usize, k: usize, p_f: f64, p_n: f64, rng: &mut dyn RngCore) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let mut targets = sample(rng, n, k).into_vec();
        targets.sort_unstable();
        Self::with_targets(n, targets, p_f, p_n)
    }

    pub fn with_targets(n: usize, target_bits: Vec<usize>, p_f: f64, p_n: f64) -> Result<Self> {
        check_probability("p_f", p_f)?;
        check_probability("p_N", p_n)?;
        if p_n == 1.0 {
            return Err(Error::InvalidParameter("p_N must be below 1".into()));
        }
        check_bits(&target_bits, n)?;
        let mut is_target = vec![false; n];
        for &b in &target_bits {
            if std::mem::replace(&mut is_target[b], true) {
                return Err(Error::InvalidParameter(format!("target bit {b} listed twice")));
            }
        }
        if target_bits.is_empty() {
            return Err(Error::InvalidParameter("the factor needs at least one target bit".into()));
        }
        let mut target_bits = target_bits;
        target_bits.sort_unstable();
        Ok(Self {
            n,
            p_f,
            p_n,
            target_bits,
            is_target,
            factor: Bernoulli::new(p_f).expect("checked probability"),
            noise: Bernoulli::new(p_n).expect("checked probability"),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.target_bits.len()
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn p_n(&self) -> f64 {
        self.p_n
    }

    pub fn target_bits(&self) -> &[usize] {
        &self.target_bits
    }

    pub fn is_target(&self, b: usize) -> bool {
        self.is_target[b]
    }

    /// `(μ, ν)` of a set with `i` target bits and `j` other bits at `level`:
    /// `μ = P(i + Bin(j, p_N) >= level)`, `ν = P(Bin(i + j, p_N) >= level)`.
    pub fn analytic_rates(&self, i: usize, j: usize, level: usize) -> (f64, f64) {
        let mu = binomial_tail(j, level.saturating_sub(i), self.p_n);
        let mu = if level > i + j { 0.0 } else { mu };
        let nu = binomial_tail(i + j, level, self.p_n);
        (mu, nu)
    }
}

impl GridModel for SignalPlusNoiseModel {
    fn width(&self) -> usize {
        self.n
    }

    fn factor_count(&self) -> usize {
        1
    }

    fn factor_rate(&self, _f: usize) -> f64 {
        self.p_f
    }

    fn next_projected(&self, bits: &[usize], rng: &mut dyn RngCore) -> GridSample {
        let active = self.factor.sample(rng);
        let mut grid = BitVector::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            let noise = self.noise.sample(rng);
            if noise || (active && self.is_target[b]) {
                grid.set(j, true);
            }
        }
        GridSample { grid, factors: BitVector::from_bools(&[active]) }
    }

    fn conditional_rates(&self, indices: &[usize], level: usize, f: usize) -> Result<(f64, f64)> {
        if f != 0 {
            return Err(Error::IndexOutOfRange { index: f, width: 1 });
        }
        let set = BitVector::from_indices(self.n, indices.iter().copied())?;
        let i = set.iter_ones().filter(|&b| self.is_target[b]).count();
        let j = set.count_ones() - i;
        Ok(self.analytic_rates(i, j, level))
    }

    fn linked_bits(&self, _f: usize) -> Vec<usize> {
        self.target_bits.clone()
    }
}
