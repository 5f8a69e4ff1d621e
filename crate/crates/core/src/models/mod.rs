//! Generative measure-grid models and parameter tuning.

mod sparse;
mod spn;
mod tuning;

pub use sparse::SparseGridModel;
pub use spn::SignalPlusNoiseModel;
pub use tuning::{
    expected_sample_size, select_pair_below, select_tuple, sparse_omega, sparse_omega_minus, spn_margin,
    validate_tuple, weight_for_pair, PAIR_SUM_CAP,
};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::f2core::BitVector;

/// One instant of a model: the grid state and the state of every latent factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSample {
    pub grid: BitVector,
    pub factors: BitVector,
}

/// A stationary source of grid states driven by latent factors.
pub trait GridModel: Send + Sync {
    /// Number of grid bits.
    fn width(&self) -> usize;

    fn factor_count(&self) -> usize;

    /// Activation probability of factor `f`.
    fn factor_rate(&self, f: usize) -> f64;

    /// Draws one instant. The grid has width `bits.len()`: entry `j` is grid bit `bits[j]`.
    fn next_projected(&self, bits: &[usize], rng: &mut dyn RngCore) -> GridSample;

    /// Exact `(μ, ν)`: the probability that at least `level` bits of `indices`
    /// fire given factor `f` is active, and given it is inactive.
    fn conditional_rates(&self, indices: &[usize], level: usize, f: usize) -> Result<(f64, f64)>;

    /// The grid bits `f` fires when active.
    fn linked_bits(&self, f: usize) -> Vec<usize>;

    /// Draws one full-width instant.
    fn next_state(&self, rng: &mut dyn RngCore) -> GridSample {
        let all: Vec<usize> = (0..self.width()).collect();
        self.next_projected(&all, rng)
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

pub(crate) fn check_bits(bits: &[usize], width: usize) -> Result<()> {
    match bits.iter().find(|&&b| b >= width) {
        Some(&index) => Err(Error::IndexOutOfRange { index, width }),
        None => Ok(()),
    }
}

/// `P(Bin(n, p) >= k)`.
pub(crate) fn binomial_tail(n: usize, k: usize, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    (k..=n).map(|j| binomial_pmf(n, j, p)).sum::<f64>().min(1.0)
}

pub(crate) fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose = ln_choose(n, k);
    (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|j| ((n - j) as f64).ln() - ((j + 1) as f64).ln()).sum()
}
