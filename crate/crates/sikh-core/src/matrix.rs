//! Sparse matrices over an exact coefficient ring.
//!
//! Entries are kept in a `BTreeMap` keyed by `(row, col)` so iteration order
//! is deterministic and equality is structural. Explicit zeros are never
//! stored.

use std::collections::BTreeMap;

use crate::coeff::Coeff;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat<C: Coeff> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), C>,
}

impl<C: Coeff> SparseMat<C> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMat::zero(n, n);
        for i in 0..n {
            m.entries.insert((i, i), C::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(C::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: C) {
        assert!(row < self.rows && col < self.cols);
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &C) {
        if value.is_zero() {
            return;
        }
        let sum = self.get(row, col).add(value);
        self.set(row, col, sum);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn scale(&self, factor: &C) -> SparseMat<C> {
        let mut out = SparseMat::zero(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.set(r, c, v.mul(factor));
        }
        out
    }

    pub fn add(&self, rhs: &SparseMat<C>) -> SparseMat<C> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (r, c, v) in rhs.iter() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, rhs: &SparseMat<C>) -> SparseMat<C> {
        self.add(&rhs.scale(&C::zero().sub(&C::one())))
    }

    /// Matrix product `self * rhs`, acting on column vectors.
    pub fn mul(&self, rhs: &SparseMat<C>) -> SparseMat<C> {
        assert_eq!(self.cols, rhs.rows);
        // Group rhs by column is implicit in key order; group self by column
        // for the contraction.
        let mut by_col: BTreeMap<usize, Vec<(usize, &C)>> = BTreeMap::new();
        for (r, c, v) in self.iter() {
            by_col.entry(c).or_default().push((r, v));
        }
        let mut out = SparseMat::zero(self.rows, rhs.cols);
        for (k, c, v) in rhs.iter() {
            if let Some(column) = by_col.get(&k) {
                for &(r, a) in column {
                    out.add_to(r, c, &a.mul(v));
                }
            }
        }
        out
    }

    /// Dense copy, mainly for elimination routines and debugging.
    pub fn to_dense(&self) -> Vec<Vec<C>> {
        let mut rows = vec![vec![C::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            rows[r][c] = v.clone();
        }
        rows
    }
}
