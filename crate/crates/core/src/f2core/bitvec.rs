//! Fixed-width bit vectors packed into `u64` words.
//!
//! Index 0 is rendered leftmost: `indicator(&[0, 2], 4)` displays as `1010`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(width: usize) -> usize {
    width.div_ceil(WORD)
}

/// Binary state of a measure grid or a vertex layer at one instant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(width: usize) -> Self {
        Self { width, words: vec![0; words_for(width)] }
    }

    pub fn ones(width: usize) -> Self {
        let mut v = Self { width, words: vec![u64::MAX; words_for(width)] };
        v.clear_tail();
        v
    }

    /// Builds a vector whose support is exactly `indices`.
    pub fn from_indices<I>(width: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut v = Self::zeros(width);
        for index in indices {
            if index >= width {
                return Err(Error::IndexOutOfRange { index, width });
            }
            v.set(index, true);
        }
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Decodes an enumeration index: bit `i` of `state` is entry `i`.
    pub fn from_state(width: usize, state: u64) -> Self {
        assert!(width <= WORD, "from_state supports widths up to 64");
        let mut v = Self::zeros(width);
        if width > 0 {
            v.words[0] = state;
            v.clear_tail();
        }
        v
    }

    /// Inverse of [`BitVector::from_state`].
    pub fn to_state(&self) -> u64 {
        assert!(self.width <= WORD, "to_state supports widths up to 64");
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.width, "bit {index} out of range for width {}", self.width);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.width, "bit {index} out of range for width {}", self.width);
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|supp(self) ∩ supp(other)|`.
    pub fn and_count(&self, other: &BitVector) -> usize {
        debug_assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// True when `supp(self) ⊆ supp(other)`.
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.width, other.width);
        BitVector { width: self.width, words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn or(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.width, other.width);
        BitVector { width: self.width, words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect() }
    }

    pub fn and_not(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.width, other.width);
        BitVector { width: self.width, words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect() }
    }

    /// Iterates over the support in ascending order.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones { words: &self.words, word_index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.width % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_index * WORD + bit);
            }
            self.word_index += 1;
            self.current = *self.words.get(self.word_index)?;
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::InvalidParameter(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(v)
    }
}

/// The set indicator `F_2({I}, G)`: a width-`width` vector with support `index_set`.
pub fn indicator(index_set: &[usize], width: usize) -> Result<BitVector> {
    BitVector::from_indices(width, index_set.iter().copied())
}
