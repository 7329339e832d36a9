//! Exact homology of graded chain complexes: Betti numbers over fields via
//! Gaussian elimination, free rank and invariant factors over the integers
//! via Smith normal form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use crate::coeff::{Coeff, FieldCoeff};
use crate::cube::{BlockKey, ChainBlock, GradedChainComplex};
use crate::error::{Error, Result};
use crate::matrix::SparseMat;

/// The homology of one block in one degree: free rank plus, over the
/// integers, the invariant factors > 1 (each `d` contributing a `Z/d`
/// summand, in divisibility order).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Graded homology: per block, per homological degree, a [`HomologyGroup`].
/// Trivial groups are pruned.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedHomology {
    pub blocks: BTreeMap<BlockKey, BTreeMap<i64, HomologyGroup>>,
}

impl GradedHomology {
    pub fn total_rank(&self) -> usize {
        self.blocks.values().flat_map(|b| b.values()).map(|g| g.rank).sum()
    }

    pub fn total_torsion_factors(&self) -> usize {
        self.blocks.values().flat_map(|b| b.values()).map(|g| g.torsion.len()).sum()
    }

    fn insert(&mut self, key: &BlockKey, h: i64, group: HomologyGroup) {
        if !group.is_trivial() {
            self.blocks.entry(key.clone()).or_default().insert(h, group);
        }
    }

    /// Flat listing `(block, degree, group)` for reporting.
    pub fn rows(&self) -> Vec<(&BlockKey, i64, &HomologyGroup)> {
        self.blocks
            .iter()
            .flat_map(|(k, by_h)| by_h.iter().map(move |(&h, g)| (k, h, g)))
            .collect()
    }
}

/// Pivot selection order for field elimination. Results never depend on the
/// choice; having two orders makes that testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    FirstColumn,
    LastColumn,
}

/// Rank of a matrix over a field by sparse row elimination.
pub fn rank_field<C: FieldCoeff>(m: &SparseMat<C>, rule: PivotRule) -> usize {
    let mut rows: Vec<BTreeMap<usize, C>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.iter() {
        rows[r].insert(c, v.clone());
    }
    // pivot column -> normalized row
    let mut pivots: BTreeMap<usize, BTreeMap<usize, C>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let col = match rule {
                PivotRule::FirstColumn => row.keys().next().copied(),
                PivotRule::LastColumn => row.keys().next_back().copied(),
            };
            let Some(col) = col else { break };
            match pivots.get(&col) {
                Some(pivot_row) => {
                    let factor = row[&col].clone();
                    for (c, v) in pivot_row {
                        let delta = factor.mul(v).neg();
                        let entry = row.get(c).cloned().unwrap_or_else(C::zero).add(&delta);
                        if entry.is_zero() {
                            row.remove(c);
                        } else {
                            row.insert(*c, entry);
                        }
                    }
                }
                None => {
                    let inv = row[&col].inv().expect("nonzero over a field");
                    let normalized: BTreeMap<usize, C> =
                        row.iter().map(|(c, v)| (*c, v.mul(&inv))).collect();
                    pivots.insert(col, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Smith normal form data of an integer matrix: the rank and the full list of
/// nonzero diagonal entries in divisibility order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub rank: usize,
    pub factors: Vec<BigInt>,
}

impl Snf {
    /// Invariant factors > 1, i.e. the torsion the matrix contributes as the
    /// differential into a degree.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| f.magnitude() > &1u32.into()).cloned().collect()
    }
}

fn int_zero(x: &BigInt) -> bool {
    num_traits::Zero::is_zero(x)
}

/// Smith normal form by fraction-free elimination, pivoting on the smallest
/// nonzero magnitude to limit coefficient growth.
pub fn smith_normal_form(m: &SparseMat<BigInt>) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_dense();
    let steps = rows.min(cols);
    let mut factors = Vec::new();

    for k in 0..steps {
        // Find the smallest nonzero magnitude in the trailing submatrix.
        let mut best: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if !int_zero(&a[i][j])
                    && best
                        .map(|(bi, bj)| a[i][j].magnitude() < a[bi][bj].magnitude())
                        .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }

        loop {
            if a[k][k].is_negative() {
                for j in k..cols {
                    a[k][j] = -std::mem::take(&mut a[k][j]);
                }
            }
            // Reduce column k below the pivot.
            let mut dirty = false;
            for i in k + 1..rows {
                if int_zero(&a[i][k]) {
                    continue;
                }
                let q = div_round(&a[i][k], &a[k][k]);
                if !int_zero(&q) {
                    for j in k..cols {
                        let delta = &q * &a[k][j];
                        a[i][j] -= delta;
                    }
                }
                if !int_zero(&a[i][k]) {
                    // Remainder smaller than the pivot: swap it up and retry.
                    a.swap(k, i);
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            // Reduce row k right of the pivot.
            for j in k + 1..cols {
                if int_zero(&a[k][j]) {
                    continue;
                }
                let q = div_round(&a[k][j], &a[k][k]);
                if !int_zero(&q) {
                    for i in k..rows {
                        let delta = &q * &a[i][k];
                        a[i][j] -= delta;
                    }
                }
                if !int_zero(&a[k][j]) {
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility fix-up: everything in the trailing submatrix must
            // be divisible by the pivot.
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if int_zero(&(&a[i][j] % &a[k][k])) {
                        continue;
                    }
                    for jj in k..cols {
                        let add = a[i][jj].clone();
                        a[k][jj] += add;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
            if fixed {
                break;
            }
        }
        factors.push(a[k][k].clone());
    }

    let rank = factors.len();
    Snf { rank, factors }
}

/// Quotient rounded to nearest, which keeps remainders at most half the
/// divisor's magnitude.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = num_integer::Integer::div_rem(a, b);
    let doubled = r.magnitude() * 2u32;
    if &doubled > b.magnitude() {
        if (a.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

fn degree_range<C: Coeff>(block: &ChainBlock<C>) -> impl Iterator<Item = i64> {
    let lo = block.dims.keys().next().copied().unwrap_or(0);
    let hi = block.dims.keys().next_back().copied().unwrap_or(-1);
    lo..=hi
}

/// Betti numbers of every block over a field.
pub fn homology_field<C: FieldCoeff>(cc: &GradedChainComplex<C>) -> GradedHomology {
    let computed: Vec<(BlockKey, Vec<(i64, HomologyGroup)>)> = cc
        .blocks
        .par_iter()
        .map(|(key, block)| {
            let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
            for (&h, d) in &block.diffs {
                ranks.insert(h, rank_field(d, PivotRule::FirstColumn));
            }
            let groups = degree_range(block)
                .map(|h| {
                    let dim = block.dim(h) as i64;
                    let out = *ranks.get(&h).unwrap_or(&0) as i64;
                    let into = *ranks.get(&(h - 1)).unwrap_or(&0) as i64;
                    let betti = dim - out - into;
                    assert!(betti >= 0, "negative Betti number; d² ≠ 0?");
                    (h, HomologyGroup { rank: betti as usize, torsion: Vec::new() })
                })
                .collect();
            (key.clone(), groups)
        })
        .collect();
    let mut out = GradedHomology::default();
    for (key, groups) in computed {
        for (h, g) in groups {
            out.insert(&key, h, g);
        }
    }
    out
}

/// Integral homology of every block: free rank from Smith ranks, torsion in
/// degree `h` from the invariant factors of the differential into `h`.
pub fn homology_integral(cc: &GradedChainComplex<BigInt>) -> Result<GradedHomology> {
    let computed: Vec<(BlockKey, Vec<(i64, HomologyGroup)>)> = cc
        .blocks
        .par_iter()
        .map(|(key, block)| {
            let mut snfs: BTreeMap<i64, Snf> = BTreeMap::new();
            for (&h, d) in &block.diffs {
                snfs.insert(h, smith_normal_form(d));
            }
            let groups = degree_range(block)
                .map(|h| {
                    let dim = block.dim(h) as i64;
                    let out = snfs.get(&h).map(|s| s.rank).unwrap_or(0) as i64;
                    let below = snfs.get(&(h - 1));
                    let into = below.map(|s| s.rank).unwrap_or(0) as i64;
                    let betti = dim - out - into;
                    let torsion = below.map(|s| s.torsion()).unwrap_or_default();
                    (h, HomologyGroup { rank: betti.max(0) as usize, torsion })
                })
                .collect();
            (key.clone(), groups)
        })
        .collect();
    let mut out = GradedHomology::default();
    for (key, groups) in computed {
        for (h, g) in &groups {
            if (g.rank as i64) < 0 {
                return Err(Error::internal("negative free rank"));
            }
            out.insert(&key, *h, g.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn int_mat(rows: usize, cols: usize, data: &[i64]) -> SparseMat<BigInt> {
        let mut m = SparseMat::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, BigInt::from(data[r * cols + c]));
            }
        }
        m
    }

    fn rat_mat(rows: usize, cols: usize, data: &[i64]) -> SparseMat<BigRational> {
        let mut m = SparseMat::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, BigRational::from_integer(BigInt::from(data[r * cols + c])));
            }
        }
        m
    }

    #[test]
    fn field_rank_by_both_pivot_rules() {
        let m = rat_mat(3, 4, &[1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 1, 0]);
        assert_eq!(rank_field(&m, PivotRule::FirstColumn), 2);
        assert_eq!(rank_field(&m, PivotRule::LastColumn), 2);
    }

    #[test]
    fn snf_of_known_matrices() {
        // diag(2, 6) pattern.
        let m = int_mat(2, 2, &[2, 4, -2, 2]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.rank, 2);
        assert_eq!(snf.factors, vec![BigInt::from(2), BigInt::from(6)]);

        let m = int_mat(3, 3, &[1, 0, 0, 0, 2, 0, 0, 0, 0]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.rank, 2);
        assert_eq!(snf.torsion(), vec![BigInt::from(2)]);

        // Divisibility chain d1 | d2 | d3.
        let m = int_mat(3, 3, &[2, 0, 0, 0, 3, 0, 0, 0, 10]);
        let snf = smith_normal_form(&m);
        let f = snf.factors;
        assert_eq!(f.len(), 3);
        for w in f.windows(2) {
            assert!(int_zero(&(&w[1] % &w[0])), "{f:?}");
        }
        // The product of the factors equals |det| = 60.
        assert_eq!(f.iter().product::<BigInt>(), BigInt::from(60));
    }

    #[test]
    fn snf_rank_matches_rational_rank_on_random_matrices() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..40 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let data: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-6..=6)).collect();
            let zm = int_mat(rows, cols, &data);
            let qm = rat_mat(rows, cols, &data);
            let snf = smith_normal_form(&zm);
            assert_eq!(snf.rank, rank_field(&qm, PivotRule::FirstColumn));
            assert_eq!(snf.rank, rank_field(&qm, PivotRule::LastColumn));
            for w in snf.factors.windows(2) {
                assert!(int_zero(&(&w[1] % &w[0])));
            }
        }
    }
}
