use std::fmt::Write as _;

use rand::distributions::{Bernoulli, Distribution};
use rand::RngCore;

use super::{check_bits, check_probability, GridModel, GridSample};
use crate::error::{Error, Result};
use crate::f2core::{BitVector, ENUMERATION_CAP};

/// Largest factor count: factor states are packed into one `u64`.
const MAX_FACTORS: usize = 64;

/// `K` independent factors over a grid of `n` bits. A bit fires iff at least
/// one active factor is linked to it; the linkage is drawn once.
#[derive(Clone, Debug)]
pub struct SparseGridModel {
    n: usize,
    k_factors: usize,
    p_f: f64,
    p_g: f64,
    /// Per bit, the set of linked factors.
    bit_factors: Vec<u64>,
    factor: Bernoulli,
}

impl SparseGridModel {
    /// Draws each (factor, bit) link with probability `p_g`, redrawing any
    /// factor left without a linked bit.
    pub fn new(n: usize, k_factors: usize, p_f: f64, p_g: f64, rng: &mut dyn RngCore) -> Result<Self> {
        check_probability("p_g", p_g)?;
        if p_g == 0.0 || n == 0 {
            return Err(Error::InvalidParameter("p_g and n must be positive".into()));
        }
        let link = Bernoulli::new(p_g).expect("checked probability");
        let rows = (0..k_factors)
            .map(|_| loop {
                let row: Vec<usize> = (0..n).filter(|_| link.sample(rng)).collect();
                if !row.is_empty() {
                    break row;
                }
            })
            .collect();
        Self::from_linkage(n, p_f, p_g, rows)
    }

    /// Builds a model from explicit per-factor linked bits.
    pub fn from_linkage(n: usize, p_f: f64, p_g: f64, rows: Vec<Vec<usize>>) -> Result<Self> {
        check_probability("p_f", p_f)?;
        check_probability("p_g", p_g)?;
        let k_factors = rows.len();
        if k_factors == 0 || k_factors > MAX_FACTORS {
            return Err(Error::InvalidParameter(format!(
                "factor count must lie in 1..={MAX_FACTORS}, got {k_factors}"
            )));
        }
        let mut bit_factors = vec![0u64; n];
        for (f, row) in rows.iter().enumerate() {
            check_bits(row, n)?;
            if row.is_empty() {
                return Err(Error::InvalidParameter(format!("factor {f} has no linked bit")));
            }
            for &b in row {
                bit_factors[b] |= 1 << f;
            }
        }
        Ok(Self { n, k_factors, p_f, p_g, bit_factors, factor: Bernoulli::new(p_f).expect("checked probability") })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_factors(&self) -> usize {
        self.k_factors
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn p_g(&self) -> f64 {
        self.p_g
    }

    /// Number of factors linked to bit `b`.
    pub fn purity_rank(&self, b: usize) -> usize {
        self.bit_factors[b].count_ones() as usize
    }

    pub fn is_linked(&self, f: usize, b: usize) -> bool {
        (self.bit_factors[b] >> f) & 1 == 1
    }

    /// Linkage as `factors`, `bits`, `edges` header lines followed by one
    /// `factor bit 1` triple per link, factor then bit ascending.
    pub fn to_linkage_snapshot(&self) -> String {
        let mut out = String::new();
        let links: Vec<(usize, usize)> =
            (0..self.k_factors).flat_map(|f| self.linked_bits(f).into_iter().map(move |b| (f, b))).collect();
        let _ = writeln!(out, "factors {}\nbits {}\nedges {}", self.k_factors, self.n, links.len());
        for (f, b) in links {
            let _ = writeln!(out, "{f} {b} 1");
        }
        out
    }

    pub fn from_linkage_snapshot(text: &str, p_f: f64, p_g: f64) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Snapshot { line, msg: msg.into() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<usize> {
            let (n, line) = lines.next().ok_or_else(|| bad(0, "truncated header"))?;
            match line.split_whitespace().collect::<Vec<_>>()[..] {
                [k, v] if k == key => v.parse().map_err(|_| bad(n + 1, "bad integer")),
                _ => Err(bad(n + 1, &format!("expected `{key} <count>`"))),
            }
        };
        let k_factors = header("factors")?;
        let n = header("bits")?;
        let m = header("edges")?;
        let mut rows = vec![Vec::new(); k_factors];
        let mut seen = 0;
        for (ln, line) in lines {
            let vals: Vec<usize> = line
                .split_whitespace()
                .map(|v| v.parse().map_err(|_| bad(ln + 1, "bad integer")))
                .collect::<Result<_>>()?;
            match vals[..] {
                [f, b, 1] if f < k_factors && b < n => rows[f].push(b),
                _ => return Err(bad(ln + 1, "expected `factor bit 1`")),
            }
            seen += 1;
        }
        if seen != m {
            return Err(bad(0, "edge count does not match the header"));
        }
        Self::from_linkage(n, p_f, p_g, rows)
    }
}

impl GridModel for SparseGridModel {
    fn width(&self) -> usize {
        self.n
    }

    fn factor_count(&self) -> usize {
        self.k_factors
    }

    fn factor_rate(&self, _f: usize) -> f64 {
        self.p_f
    }

    fn next_projected(&self, bits: &[usize], rng: &mut dyn RngCore) -> GridSample {
        let mut active = 0u64;
        for f in 0..self.k_factors {
            if self.factor.sample(rng) {
                active |= 1 << f;
            }
        }
        let mut grid = BitVector::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if self.bit_factors[b] & active != 0 {
                grid.set(j, true);
            }
        }
        GridSample { grid, factors: BitVector::from_state(self.k_factors, active) }
    }

    /// Enumerates the `2^(K-1)` states of the other factors.
    fn conditional_rates(&self, indices: &[usize], level: usize, f: usize) -> Result<(f64, f64)> {
        if f >= self.k_factors {
            return Err(Error::IndexOutOfRange { index: f, width: self.k_factors });
        }
        let others = self.k_factors - 1;
        if others > ENUMERATION_CAP {
            return Err(Error::EnumerationCap { width: others, cap: ENUMERATION_CAP });
        }
        let set = BitVector::from_indices(self.n, indices.iter().copied())?;
        if level > set.count_ones() {
            return Ok((0.0, 0.0));
        }
        let masks: Vec<u64> = set.iter_ones().map(|b| self.bit_factors[b]).collect();
        let low = (1u64 << f) - 1;
        let (mut mu, mut nu) = (0.0, 0.0);
        for s in 0..1u64 << others {
            let state = (s & low) | ((s & !low) << 1);
            let on = state.count_ones() as i32;
            let weight = self.p_f.powi(on) * (1.0 - self.p_f).powi(others as i32 - on);
            let fired = masks.iter().filter(|&&m| m & state != 0).count();
            let fired_with_f = masks.iter().filter(|&&m| m & (state | 1 << f) != 0).count();
            if fired_with_f >= level {
                mu += weight;
            }
            if fired >= level {
                nu += weight;
            }
        }
        Ok((mu.min(1.0), nu.min(1.0)))
    }

    fn linked_bits(&self, f: usize) -> Vec<usize> {
        (0..self.n).filter(|&b| self.is_linked(f, b)).collect()
    }
}
