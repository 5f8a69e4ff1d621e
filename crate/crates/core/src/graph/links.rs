use std::collections::BTreeMap;

use crate::f2core::BitVector;

/// A live edge. Edges whose weight reaches zero are removed from the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub weight: u64,
    /// Feedback events this edge may still receive.
    pub budget: u32,
}

/// Sparse weighted link matrix, stored row-wise with columns in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Link>>,
}

impl LinkMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sets the weight of `(row, col)`; a zero weight removes the edge.
    pub fn set_weight(&mut self, row: usize, col: usize, weight: u64) {
        assert!(row < self.rows && col < self.cols, "link ({row}, {col}) out of range");
        if weight == 0 {
            self.data[row].remove(&col);
        } else {
            self.data[row].entry(col).and_modify(|l| l.weight = weight).or_insert(Link { weight, budget: 0 });
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Link> {
        self.data.get(row)?.get(&col)
    }

    pub fn weight(&self, row: usize, col: usize) -> u64 {
        self.get(row, col).map_or(0, |l| l.weight)
    }

    pub fn remove(&mut self, row: usize, col: usize) -> Option<Link> {
        self.data[row].remove(&col)
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, &Link)> + '_ {
        self.data[row].iter().map(|(c, l)| (*c, l))
    }

    pub(crate) fn row_mut(&mut self, row: usize) -> &mut BTreeMap<usize, Link> {
        &mut self.data[row]
    }

    pub fn out_degree(&self, row: usize) -> usize {
        self.data[row].len()
    }

    pub fn in_degree(&self, col: usize) -> usize {
        self.data.iter().filter(|r| r.contains_key(&col)).count()
    }

    /// Rows with an edge into `col`, ascending.
    pub fn column_sources(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.data[r].contains_key(&col)).collect()
    }

    /// All edges in `(row, col)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Link)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, l)| (r, *c, l)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    /// Unweighted product `x · A`: for each column, the number of active rows linked to it.
    pub fn propagate(&self, x: &BitVector) -> Vec<u32> {
        debug_assert_eq!(x.width(), self.rows);
        let mut counts = vec![0u32; self.cols];
        for r in x.iter_ones() {
            for c in self.data[r].keys() {
                counts[*c] += 1;
            }
        }
        counts
    }
}
