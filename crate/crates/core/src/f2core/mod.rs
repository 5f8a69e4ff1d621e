//! Binary-vector algebra, characteristic polynomials and exhaustive identity checks.

mod bitvec;
mod identities;
mod poly;

pub use bitvec::{indicator, BitVector, Ones};
pub use identities::{
    subsets_of_size, verify_decomposition, verify_element_split, verify_partition, DecompositionCase,
};
pub use poly::{eval_charpoly, norm, product, segment, CharPoly, ExplicitDistribution, ENUMERATION_CAP};
