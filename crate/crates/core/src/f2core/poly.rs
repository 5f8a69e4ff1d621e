//! Characteristic polynomials and distribution-weighted operators.
//!
//! Sums over polynomial segments are logical ORs, so `P_I^l` evaluated at `x`
//! is the threshold test `|I ∩ supp(x)| >= l`.

use crate::error::{Error, Result};
use crate::f2core::bitvec::BitVector;

/// Largest width for which exact enumeration over `2^width` states is allowed.
pub const ENUMERATION_CAP: usize = 20;

const PROB_TOLERANCE: f64 = 1e-9;

/// `P_I^{level}` over a domain of fixed width.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharPoly {
    indices: BitVector,
    level: usize,
}

impl CharPoly {
    /// Level must lie in `0..=|I|`; level 0 is the constant-one polynomial.
    pub fn new(index_set: &[usize], level: usize, width: usize) -> Result<Self> {
        let indices = BitVector::from_indices(width, index_set.iter().copied())?;
        Self::from_mask(indices, level)
    }

    pub fn from_mask(indices: BitVector, level: usize) -> Result<Self> {
        let size = indices.count_ones();
        if level > size {
            return Err(Error::InvalidLevel { level, size });
        }
        Ok(Self { indices, level })
    }

    /// The always-true polynomial `P_{I,0}`.
    pub fn always(width: usize) -> Self {
        Self { indices: BitVector::zeros(width), level: 0 }
    }

    /// Conjunction of every index in the set.
    pub fn conjunction(index_set: &[usize], width: usize) -> Result<Self> {
        let indices = BitVector::from_indices(width, index_set.iter().copied())?;
        let level = indices.count_ones();
        Ok(Self { indices, level })
    }

    pub fn width(&self) -> usize {
        self.indices.width()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn mask(&self) -> &BitVector {
        &self.indices
    }

    pub fn index_set(&self) -> Vec<usize> {
        self.indices.support()
    }

    pub fn size(&self) -> usize {
        self.indices.count_ones()
    }

    pub fn eval(&self, x: &BitVector) -> Result<bool> {
        if x.width() != self.width() {
            return Err(Error::WidthMismatch { expected: self.width(), actual: x.width() });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &BitVector) -> bool {
        self.level == 0 || self.indices.and_count(x) >= self.level
    }
}

pub fn eval_charpoly(p: &CharPoly, x: &BitVector) -> Result<bool> {
    p.eval(x)
}

/// One segment `P_{I,l}` with the out-of-range convention: `l = 0` gives 1,
/// `l > |I|` (or negative) gives 0, otherwise the threshold test.
pub fn segment(indices: &BitVector, level: i64, x: &BitVector) -> bool {
    if level == 0 {
        return true;
    }
    if level < 0 || level as usize > indices.count_ones() {
        return false;
    }
    indices.and_count(x) >= level as usize
}

/// A probability for each of the `2^width` states of a small domain.
///
/// State `s` is the vector whose entry `i` is bit `i` of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitDistribution {
    width: usize,
    prob: Vec<f64>,
}

impl ExplicitDistribution {
    pub fn new(width: usize, prob: Vec<f64>) -> Result<Self> {
        check_enumerable(width)?;
        if prob.len() != 1usize << width {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities, got {}",
                1usize << width,
                prob.len()
            )));
        }
        if let Some(bad) = prob.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite probability {bad}")));
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { width, prob })
    }

    /// Tabulates `f` over every state. `f` need not be normalised; the table is
    /// validated as given.
    pub fn from_fn<F>(width: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&BitVector) -> f64,
    {
        check_enumerable(width)?;
        let prob = (0..1u64 << width).map(|s| f(&BitVector::from_state(width, s))).collect();
        Self::new(width, prob)
    }

    pub fn uniform(width: usize) -> Result<Self> {
        check_enumerable(width)?;
        let n = 1usize << width;
        Self::new(width, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(state: &BitVector) -> Result<Self> {
        let width = state.width();
        check_enumerable(width)?;
        let mut prob = vec![0.0; 1usize << width];
        prob[state.to_state() as usize] = 1.0;
        Self::new(width, prob)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn prob(&self, state: u64) -> f64 {
        self.prob[state as usize]
    }

    /// Iterates `(state, probability)` for states with nonzero mass.
    pub fn support(&self) -> impl Iterator<Item = (BitVector, f64)> + '_ {
        self.prob
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(move |(s, p)| (BitVector::from_state(self.width, s as u64), *p))
    }
}

pub(crate) fn check_enumerable(width: usize) -> Result<()> {
    if width > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { width, cap: ENUMERATION_CAP });
    }
    Ok(())
}

/// `‖P‖_d = Σ_x P[x] d_x`.
pub fn norm(p: &CharPoly, d: &ExplicitDistribution) -> Result<f64> {
    if p.width() != d.width() {
        return Err(Error::WidthMismatch { expected: d.width(), actual: p.width() });
    }
    Ok(d.support().filter(|(x, _)| p.eval_unchecked(x)).map(|(_, w)| w).sum())
}

/// `⟨P_1, …, P_k⟩_d = Σ_x (P_1[x] ⋯ P_k[x]) d_x` for `k >= 2`.
pub fn product(ps: &[CharPoly], d: &ExplicitDistribution) -> Result<f64> {
    if ps.len() < 2 {
        return Err(Error::Contract(format!("product needs at least two polynomials, got {}", ps.len())));
    }
    if let Some(p) = ps.iter().find(|p| p.width() != d.width()) {
        return Err(Error::WidthMismatch { expected: d.width(), actual: p.width() });
    }
    Ok(d.support().filter(|(x, _)| ps.iter().all(|p| p.eval_unchecked(x))).map(|(_, w)| w).sum())
}
